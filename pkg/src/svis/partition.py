"""Partitions of a universe: by neighborhood equality, by blockwise
intersection of several partitions, and by cell identity."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .errors import RelationError, TableError
from .relations import Relation
from .table import SetValuedTable


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks ordered by the first occurrence of a member in the universe."""

    universe: tuple[str, ...]
    blocks: tuple[tuple[str, ...], ...]
    block_of: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        block_of = {}
        for k, b in enumerate(self.blocks):
            if not b:
                raise RelationError("partition blocks must be nonempty")
            for x in b:
                if x in block_of:
                    raise RelationError(f"object {x!r} appears in two blocks")
                block_of[x] = k
        if set(block_of) != set(self.universe):
            raise RelationError("partition blocks must cover the universe exactly")
        object.__setattr__(self, "block_of", block_of)

    @classmethod
    def from_labels(cls, universe: Sequence[str], labels: Sequence[Hashable]) -> "Partition":
        """Group objects sharing a label; dict insertion order gives first-occurrence order."""
        groups: dict = {}
        for x, lab in zip(universe, labels):
            groups.setdefault(lab, []).append(x)
        return cls(tuple(universe), tuple(tuple(b) for b in groups.values()))

    @classmethod
    def single_block(cls, universe: Sequence[str]) -> "Partition":
        return cls.from_labels(universe, [0] * len(universe))

    @classmethod
    def discrete(cls, universe: Sequence[str]) -> "Partition":
        return cls(tuple(universe), tuple((x,) for x in universe))

    def __len__(self):
        return len(self.blocks)

    def labels(self) -> list[int]:
        return [self.block_of[x] for x in self.universe]

    def block(self, x: str) -> tuple[str, ...]:
        return self.blocks[self.block_of[x]]

    def as_sets(self) -> set[frozenset]:
        return {frozenset(b) for b in self.blocks}

    def refines(self, other: "Partition") -> bool:
        return all(len({other.block_of[x] for x in b}) == 1 for b in self.blocks)

    def to_list(self) -> list[list[str]]:
        return [list(b) for b in self.blocks]


def partition_by_relation(rel: Relation) -> Partition:
    # ints hash by value and compare exactly, so collisions are resolved by dict equality
    return Partition.from_labels(rel.universe, rel.rows)


def joint_partition(parts: Sequence[Partition], universe: Sequence[str] | None = None) -> Partition:
    """x and y share a block iff they share a block in every input partition."""
    parts = list(parts)
    if not parts:
        if universe is None:
            raise RelationError("universe required for an empty joint")
        return Partition.single_block(universe)
    u = parts[0].universe
    if any(p.universe != u for p in parts[1:]):
        raise RelationError("partitions are defined on different universes")
    keys = zip(*(p.labels() for p in parts))
    return Partition.from_labels(u, list(keys))


def partition_by_equivalence(table: SetValuedTable, attrs: Iterable[str] | None = None) -> Partition:
    """Blocks of objects that are cell-identical on every attribute in ``attrs``."""
    attrs = table.attributes if attrs is None else tuple(attrs)
    try:
        idx = [table.attribute_index(a) for a in attrs]
    except TableError as exc:
        raise RelationError(str(exc)) from None
    return Partition.from_labels(table.objects, [tuple(r[j] for j in idx) for r in table.rows])


def lift_partition(part: Partition, universe: Sequence[str], assignment: dict) -> Partition:
    """Pull a partition of an image universe back to ``universe`` via ``assignment``."""
    return Partition.from_labels(universe, [part.block_of[assignment[x]] for x in universe])
