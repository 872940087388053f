"""Tolerance relations on set-valued tables.

A Relation stores one neighborhood bitset per object (a Python int, bit j
set iff the j-th object of the universe is a neighbor). Three families are
built from cell intersections on one attribute:

* ``tolerance_ge``: ``|f(x,a) & f(y,a)| >= h``
* ``tolerance_exact``: ``|f(x,a) & f(y,a)| == h``
* ``tolerance_valueset``: ``f(x,a) & f(y,a) == P``

``tolerance_ge_joint`` intersects the ``>=`` relations over a threshold
vector, and ``induced_system`` collects them into a RelationSystem.
"""
from __future__ import annotations

import os
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import RelationError
from .table import SetValuedTable

# attribute name -> number of relation builds; read by tests to check that
# incremental updates do not rebuild untouched columns.
BUILD_COUNTS: Counter = Counter()


def bits_of(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Relation:
    universe: tuple[str, ...]
    rows: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "rows", tuple(self.rows))
        if len(self.rows) != len(self.universe):
            raise RelationError("one row per universe object required")
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(self.universe)})

    @classmethod
    def full(cls, universe: Sequence[str]) -> "Relation":
        everything = (1 << len(universe)) - 1
        return cls(tuple(universe), (everything,) * len(universe))

    @classmethod
    def empty(cls, universe: Sequence[str]) -> "Relation":
        return cls(tuple(universe), (0,) * len(universe))

    @classmethod
    def from_pairs(cls, universe: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "Relation":
        index = {x: i for i, x in enumerate(universe)}
        rows = [0] * len(universe)
        for x, y in pairs:
            rows[index[x]] |= 1 << index[y]
        return cls(tuple(universe), tuple(rows))

    @classmethod
    def from_neighborhoods(cls, universe: Sequence[str], rows: dict) -> "Relation":
        index = {x: i for i, x in enumerate(universe)}
        if set(rows) != set(universe):
            raise RelationError("neighborhoods must cover the universe exactly")
        out = []
        for x in universe:
            mask = 0
            for y in rows[x]:
                if y not in index:
                    raise RelationError(f"unknown object {y!r} in neighborhood of {x!r}")
                mask |= 1 << index[y]
            out.append(mask)
        return cls(tuple(universe), tuple(out))

    def index(self, x: str) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise RelationError(f"unknown object {x!r}") from None

    def mask(self, objs: Iterable[str]) -> int:
        m = 0
        for x in objs:
            m |= 1 << self.index(x)
        return m

    def neighbors(self, x: str) -> list[str]:
        """R(x) in universe order."""
        return [self.universe[j] for j in bits_of(self.rows[self.index(x)])]

    def related(self, x: str, y: str) -> bool:
        return bool(self.rows[self.index(x)] >> self.index(y) & 1)

    def pairs(self) -> set[tuple[str, str]]:
        return {(x, self.universe[j]) for x, r in zip(self.universe, self.rows) for j in bits_of(r)}

    def is_symmetric(self) -> bool:
        return self.transpose().rows == self.rows

    def transpose(self) -> "Relation":
        n = len(self.universe)
        cols = [0] * n
        for i, r in enumerate(self.rows):
            for j in bits_of(r):
                cols[j] |= 1 << i
        return Relation(self.universe, tuple(cols))

    def issubset(self, other: "Relation") -> bool:
        _same_universe([self, other])
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __and__(self, other: "Relation") -> "Relation":
        _same_universe([self, other])
        return Relation(self.universe, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: "Relation") -> "Relation":
        _same_universe([self, other])
        return Relation(self.universe, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def to_dict(self) -> dict:
        return {"universe": list(self.universe),
                "rows": {x: self.neighbors(x) for x in self.universe}}

    @classmethod
    def from_dict(cls, data: dict) -> "Relation":
        return cls.from_neighborhoods(data["universe"], data["rows"])


def _same_universe(rels: Sequence[Relation]) -> None:
    if rels and any(r.universe != rels[0].universe for r in rels[1:]):
        raise RelationError("relations are defined on different universes")


def intersect_relations(rels: Sequence[Relation], universe: Sequence[str] | None = None) -> Relation:
    """Row-wise AND. The empty intersection is the full relation on ``universe``."""
    rels = list(rels)
    if not rels:
        if universe is None:
            raise RelationError("universe required to intersect an empty list")
        return Relation.full(universe)
    _same_universe(rels)
    if universe is not None and tuple(universe) != rels[0].universe:
        raise RelationError("relations are defined on a different universe")
    rows = list(rels[0].rows)
    for r in rels[1:]:
        rows = [a & b for a, b in zip(rows, r.rows)]
    return Relation(rels[0].universe, tuple(rows))


def union_relations(rels: Sequence[Relation], universe: Sequence[str]) -> Relation:
    out = Relation.empty(universe)
    for r in rels:
        out = out | r
    return out


def _cell_relation(table: SetValuedTable, attr: str,
                   related: Callable[[frozenset], bool]) -> Relation:
    # objects with identical cells share a neighborhood; compare distinct cells only
    col = table.column(attr)
    groups: dict[frozenset, int] = {}
    for i, c in enumerate(col):
        groups[c] = groups.get(c, 0) | (1 << i)
    cells = list(groups)
    group_row = {}
    for c in cells:
        m = 0
        for d in cells:
            if related(c & d):
                m |= groups[d]
        group_row[c] = m
    BUILD_COUNTS[attr] += 1
    return Relation(table.objects, tuple(group_row[c] for c in col))


def _check_attr(table: SetValuedTable, attr: str) -> None:
    if not table.has_attribute(attr):
        raise RelationError(f"unknown attribute {attr!r}")


def tolerance_ge(table: SetValuedTable, attr: str, h: int) -> Relation:
    _check_attr(table, attr)
    if h < 0:
        raise RelationError("threshold must be non-negative")
    return _cell_relation(table, attr, lambda common: len(common) >= h)


def tolerance_exact(table: SetValuedTable, attr: str, h: int) -> Relation:
    _check_attr(table, attr)
    if h < 0:
        raise RelationError("cardinality must be non-negative")
    return _cell_relation(table, attr, lambda common: len(common) == h)


def tolerance_valueset(table: SetValuedTable, attr: str, values: Iterable[str]) -> Relation:
    """Pairs whose intersection on ``attr`` is exactly ``values``.

    A target set outside the attribute's domain gives the empty relation
    and a warning.
    """
    _check_attr(table, attr)
    target = frozenset(values)
    if not target <= table.domain(attr):
        warnings.warn(f"{sorted(target)} is not a subset of the domain of {attr!r}; "
                      "relation is empty", stacklevel=2)
        return Relation.empty(table.objects)
    return _cell_relation(table, attr, lambda common: common == target)


def max_cell_size(table: SetValuedTable, attr: str) -> int:
    return max((len(c) for c in table.column(attr)), default=0)


def is_covering(rel: Relation) -> bool:
    """Every object lies in at least one neighborhood."""
    covered = 0
    for r in rel.rows:
        covered |= r
    return covered == (1 << len(rel.universe)) - 1


# -- threshold vectors ----------------------------------------------------

def check_thresholds(table: SetValuedTable, thresholds: Sequence[int]) -> tuple[int, ...]:
    thresholds = tuple(int(h) for h in thresholds)
    if len(thresholds) != len(table.attributes):
        raise RelationError(
            f"{len(thresholds)} thresholds given for {len(table.attributes)} attributes")
    if any(h < 0 for h in thresholds):
        raise RelationError("thresholds must be non-negative")
    return thresholds


def parse_thresholds(text: str | None, n: int) -> tuple[int, ...]:
    """``"1,2,1"`` -> (1, 2, 1); ``None`` -> all ones; a single value is broadcast."""
    if text is None:
        return (1,) * n
    try:
        values = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise RelationError(f"malformed threshold list {text!r}") from None
    if len(values) == 1 and n != 1:
        values = values * n
    if len(values) != n or any(h < 0 for h in values):
        raise RelationError(f"need {n} non-negative thresholds, got {text!r}")
    return values


def scope(table: SetValuedTable, thresholds: Sequence[int]) -> list[str]:
    """B = attributes with a positive threshold."""
    return [a for a, h in zip(table.attributes, thresholds) if h >= 1]


def tolerance_ge_joint(table: SetValuedTable, thresholds: Sequence[int]) -> Relation:
    thresholds = check_thresholds(table, thresholds)
    factors = [tolerance_ge(table, a, h) for a, h in zip(table.attributes, thresholds) if h >= 1]
    return intersect_relations(factors, table.objects)


# -- relation systems -----------------------------------------------------

@dataclass(frozen=True)
class RelationSystem:
    universe: tuple[str, ...]
    relations: tuple[tuple[str, Relation], ...]

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "relations", tuple((n, r) for n, r in self.relations))
        names = [n for n, _ in self.relations]
        if len(set(names)) != len(names):
            raise RelationError(f"duplicate relation names in {names}")
        for n, r in self.relations:
            if r.universe != self.universe:
                raise RelationError(f"relation {n!r} is defined on a different universe")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations)

    def __getitem__(self, name: str) -> Relation:
        for n, r in self.relations:
            if n == name:
                return r
        raise RelationError(f"unknown relation {name!r}")

    def __len__(self):
        return len(self.relations)

    def intersection(self, names: Iterable[str] | None = None) -> Relation:
        names = self.names if names is None else list(names)
        return intersect_relations([self[n] for n in names], self.universe)

    def to_dict(self) -> dict:
        return {"universe": list(self.universe),
                "relations": {n: r.to_dict()["rows"] for n, r in self.relations}}

    @classmethod
    def from_dict(cls, data: dict) -> "RelationSystem":
        universe = data["universe"]
        return cls(universe, tuple(
            (n, Relation.from_neighborhoods(universe, rows)) for n, rows in data["relations"].items()))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SVIS_THREADS", "1")))
    except ValueError:
        return 1


def induced_system(table: SetValuedTable, thresholds: Sequence[int] | None = None, *,
                   lax: bool = False, check_covering: bool = True) -> RelationSystem:
    """(U, {R_1..R_m}) with R_i the ``>= h_i`` relation on the i-th attribute.

    A component relation that does not cover U is an error unless ``lax``.
    """
    if thresholds is None:
        thresholds = (1,) * len(table.attributes)
    thresholds = check_thresholds(table, thresholds)
    jobs = list(zip(table.attributes, thresholds))
    n_threads = min(_threads(), len(jobs)) if jobs else 1
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rels = list(pool.map(lambda job: tolerance_ge(table, *job), jobs))
    else:
        rels = [tolerance_ge(table, a, h) for a, h in jobs]
    if check_covering:
        for (a, h), r in zip(jobs, rels):
            if not is_covering(r):
                msg = f"relation on {a!r} with threshold {h} does not cover the universe"
                if not lax:
                    raise RelationError(msg)
                warnings.warn(msg, stacklevel=2)
    return RelationSystem(table.objects, tuple(zip(table.attributes, rels)))
