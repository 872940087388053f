"""Block mappings, consistency checks, and quotient compression of relation
systems and of set-valued tables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ConsistencyError, RelationError
from .partition import Partition, joint_partition, partition_by_equivalence, partition_by_relation
from .relations import Relation, RelationSystem, bits_of
from .table import SetValuedTable


@dataclass(frozen=True)
class BlockMapping:
    """A surjection from ``source`` onto ``image``."""

    source: tuple[str, ...]
    image: tuple[str, ...]
    assignment: dict

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "image", tuple(self.image))
        if set(self.assignment) != set(self.source) or len(set(self.source)) != len(self.source):
            raise RelationError("assignment must cover the source universe exactly")
        object.__setattr__(self, "assignment", {x: self.assignment[x] for x in self.source})
        if len(set(self.image)) != len(self.image):
            raise RelationError("image objects must be unique")
        hit = set(self.assignment.values())
        if not hit <= set(self.image):
            raise RelationError(f"assignment leaves the image: {sorted(hit - set(self.image))}")
        if hit != set(self.image):
            raise RelationError("mapping is not surjective")

    @classmethod
    def from_partition(cls, part: Partition, prefix: str = "y", start: int = 1) -> "BlockMapping":
        image = tuple(f"{prefix}{k + start}" for k in range(len(part)))
        return cls(part.universe, image, {x: image[part.block_of[x]] for x in part.universe})

    @classmethod
    def identity(cls, universe: Sequence[str]) -> "BlockMapping":
        return cls(tuple(universe), tuple(universe), {x: x for x in universe})

    def __call__(self, x: str) -> str:
        return self.assignment[x]

    @property
    def blocks(self) -> tuple[tuple[str, ...], ...]:
        """g^-1(y) for each image object y, members in source order."""
        out = {y: [] for y in self.image}
        for x in self.source:
            out[self.assignment[x]].append(x)
        return tuple(tuple(out[y]) for y in self.image)

    def partition(self) -> Partition:
        return Partition(self.source, tuple(b for b in self.blocks))

    def then(self, other: "BlockMapping") -> "BlockMapping":
        """Composition: apply self, then other."""
        if set(other.source) != set(self.image):
            raise RelationError("cannot compose: image and source differ")
        return BlockMapping(self.source, other.image,
                            {x: other.assignment[y] for x, y in self.assignment.items()})

    def to_dict(self) -> dict:
        return {"assignment": dict(self.assignment),
                "blocks": [list(b) for b in self.blocks],
                "image": list(self.image)}

    @classmethod
    def from_dict(cls, data: dict) -> "BlockMapping":
        # assignment keys carry the source order
        return cls(tuple(data["assignment"]), tuple(data["image"]), dict(data["assignment"]))


def _block_masks(mapping: BlockMapping, rel: Relation) -> list[int]:
    if set(mapping.source) != set(rel.universe) or len(mapping.source) != len(rel.universe):
        raise RelationError("mapping source and relation universe differ")
    return [rel.mask(b) for b in mapping.blocks]


def is_consistent(mapping: BlockMapping, rel: Relation) -> bool:
    """Membership is constant on every rectangle B_i x B_j of blocks."""
    masks = _block_masks(mapping, rel)
    for block in mapping.blocks:
        rows = {rel.rows[rel.index(x)] for x in block}
        if len(rows) != 1:
            return False
        (row,) = rows
        for m in masks:
            hit = row & m
            if hit and hit != m:
                return False
    return True


def image_relation(mapping: BlockMapping, rel: Relation, *, verify: bool = True) -> Relation:
    """g(R)(g(x)) = {g(y) : y in R(x)}."""
    if verify and not is_consistent(mapping, rel):
        raise ConsistencyError("mapping is not consistent with the relation; refusing to compress")
    _block_masks(mapping, rel)
    pos = {y: k for k, y in enumerate(mapping.image)}
    rows = []
    for block in mapping.blocks:
        row = 0
        for j in bits_of(rel.rows[rel.index(block[0])]):
            row |= 1 << pos[mapping.assignment[rel.universe[j]]]
        rows.append(row)
    return Relation(mapping.image, tuple(rows))


def pullback(mapping: BlockMapping, image_rel: Relation) -> Relation:
    """(x, y) related iff (g(x), g(y)) related in the image relation."""
    if tuple(image_rel.universe) != mapping.image:
        raise RelationError("relation is not defined on the mapping's image")
    block_mask = [0] * len(mapping.image)
    pos = {y: k for k, y in enumerate(mapping.image)}
    for i, x in enumerate(mapping.source):
        block_mask[pos[mapping.assignment[x]]] |= 1 << i
    rows = []
    for x in mapping.source:
        row = 0
        for k in bits_of(image_rel.rows[pos[mapping.assignment[x]]]):
            row |= block_mask[k]
        rows.append(row)
    return Relation(mapping.source, tuple(rows))


def system_partitions(system: RelationSystem) -> list[Partition]:
    return [partition_by_relation(r) for _, r in system.relations]


def image_system(mapping: BlockMapping, system: RelationSystem, *, verify: bool = True) -> RelationSystem:
    return RelationSystem(mapping.image, tuple(
        (n, image_relation(mapping, r, verify=verify)) for n, r in system.relations))


def compress_system(system: RelationSystem, *, prefix: str = "y",
                    verify: bool = True) -> tuple[BlockMapping, RelationSystem]:
    """Quotient by the joint of the per-relation partitions.

    Consistency of the resulting mapping is checked for every relation and
    a failure raises ConsistencyError rather than producing an image.
    """
    joint = joint_partition(system_partitions(system), system.universe)
    mapping = BlockMapping.from_partition(joint, prefix)
    for name, rel in system.relations:
        if not is_consistent(mapping, rel):
            raise ConsistencyError(f"joint-partition mapping is inconsistent with {name!r}")
    return mapping, image_system(mapping, system, verify=False)


def quotient_table(table: SetValuedTable, part: Partition, *, prefix: str = "y",
                   start: int = 1) -> tuple[BlockMapping, SetValuedTable]:
    """One row per block, taken from the block's first member."""
    mapping = BlockMapping.from_partition(part, prefix, start)
    rows = tuple(table.row(b[0]) for b in part.blocks)
    return mapping, SetValuedTable(mapping.image, table.attributes, rows)


def compress_table(table: SetValuedTable, *, prefix: str = "y",
                   start: int = 1) -> tuple[BlockMapping, SetValuedTable]:
    return quotient_table(table, partition_by_equivalence(table), prefix=prefix, start=start)
