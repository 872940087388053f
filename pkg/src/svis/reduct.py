"""Attribute reduction of relation systems.

Two independent routes to the same reduct set:

* ``reducts_bruteforce`` enumerates relation subsets by size and keeps the
  minimal ones whose intersection equals the intersection of all relations.
* ``reducts_via_primes`` expands the discernibility CNF into its prime
  implicants (equivalently, minimal hitting sets of the clause family).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import ReductError
from .relations import RelationSystem, induced_system
from .table import SetValuedTable

BRUTEFORCE_LIMIT = 20
PRIMES_LIMIT = 24


def _check_names(system: RelationSystem, names: Iterable[str]) -> list[str]:
    names = list(names)
    known = set(system.names)
    unknown = [n for n in names if n not in known]
    if unknown:
        raise ReductError(f"unknown relation name(s): {unknown}")
    return names


def _canonical(subsets: Iterable[Iterable[str]], order: Sequence[str]) -> list[tuple[str, ...]]:
    rank = {n: i for i, n in enumerate(order)}
    keyed = [sorted(set(s), key=rank.__getitem__) for s in subsets]
    keyed.sort(key=lambda s: (len(s), [rank[n] for n in s]))
    return [tuple(s) for s in keyed]


def preserves(system: RelationSystem, subset: Iterable[str]) -> bool:
    subset = _check_names(system, subset)
    return system.intersection(subset) == system.intersection()


def is_reduct(system: RelationSystem, subset: Iterable[str]) -> bool:
    subset = _check_names(system, subset)
    if len(set(subset)) != len(subset):
        return False
    target = system.intersection()
    if system.intersection(subset) != target:
        return False
    # intersection grows as relations are removed, so single removals suffice
    return all(system.intersection([n for n in subset if n != drop]) != target for drop in subset)


def superfluous_relations(system: RelationSystem) -> list[str]:
    """Relations whose removal leaves the intersection unchanged."""
    target = system.intersection()
    return [n for n in system.names
            if system.intersection([m for m in system.names if m != n]) == target]


def reducts_bruteforce(system: RelationSystem) -> list[tuple[str, ...]]:
    names = system.names
    if len(names) > BRUTEFORCE_LIMIT:
        raise ReductError(f"brute force is limited to {BRUTEFORCE_LIMIT} relations, got {len(names)}")
    target = system.intersection()
    rels = [system[n] for n in names]
    full = system.intersection([]).rows
    found: list[frozenset[int]] = []
    for size in range(len(names) + 1):
        for combo in combinations(range(len(names)), size):
            s = frozenset(combo)
            if any(r <= s for r in found):
                continue
            rows = list(rels[combo[0]].rows) if combo else list(full)
            for i in combo[1:]:
                rows = [a & b for a, b in zip(rows, rels[i].rows)]
            if tuple(rows) == target.rows:
                found.append(s)
    return _canonical(([names[i] for i in s] for s in found), names)


@dataclass(frozen=True)
class DiscernibilityMatrix:
    """``entries[(i, j)]`` for i <= j: the attributes that discern objects i and j."""

    universe: tuple[str, ...]
    attributes: tuple[str, ...]
    entries: dict

    def entry(self, x: str, y: str) -> frozenset:
        i, j = self.universe.index(x), self.universe.index(y)
        return self.entries[(min(i, j), max(i, j))]

    def nonempty(self) -> list[tuple[str, str, frozenset]]:
        return [(self.universe[i], self.universe[j], e)
                for (i, j), e in sorted(self.entries.items()) if e]

    def to_dict(self) -> dict:
        rank = {a: k for k, a in enumerate(self.attributes)}
        return {"universe": list(self.universe),
                "entries": [[x, y, sorted(e, key=rank.__getitem__)] for x, y, e in self.nonempty()]}


def system_discernibility_matrix(system: RelationSystem) -> DiscernibilityMatrix:
    n = len(system.universe)
    entries = {}
    for i in range(n):
        for j in range(i, n):
            entries[(i, j)] = frozenset(name for name, r in system.relations if not r.rows[i] >> j & 1)
    return DiscernibilityMatrix(system.universe, system.names, entries)


def discernibility_matrix(table: SetValuedTable, thresholds: Sequence[int] | None = None) -> DiscernibilityMatrix:
    """Entry (x, y) lists each attribute a with (x, y) outside its ``>= h_a`` relation.

    Diagonal pairs are included; with h_a >= 2 a diagonal entry may be nonempty.
    """
    return system_discernibility_matrix(
        induced_system(table, thresholds, check_covering=False))


@dataclass(frozen=True)
class CnfFormula:
    """Conjunction of clauses; each clause is a disjunction of attribute names."""

    attributes: tuple[str, ...]
    clauses: tuple[frozenset, ...]

    @property
    def infeasible(self) -> bool:
        return any(not c for c in self.clauses)

    def to_list(self) -> list[list[str]]:
        rank = {a: k for k, a in enumerate(self.attributes)}
        return [sorted(c, key=rank.__getitem__) for c in self.clauses]


def _minimal(sets: Iterable[frozenset]) -> list[frozenset]:
    kept: list[frozenset] = []
    for s in sorted(set(sets), key=len):
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


def _clause_order(clauses: Iterable[frozenset], attributes: Sequence[str]) -> tuple[frozenset, ...]:
    rank = {a: k for k, a in enumerate(attributes)}
    return tuple(sorted(clauses, key=lambda c: (len(c), sorted(rank[a] for a in c))))


def discernibility_function(dm: DiscernibilityMatrix, *, absorb: bool = True) -> CnfFormula:
    clauses = {e for e in dm.entries.values() if e}
    if absorb:
        clauses = set(_minimal(clauses))
    return CnfFormula(dm.attributes, _clause_order(clauses, dm.attributes))


def reducts_via_primes(cnf: CnfFormula) -> list[tuple[str, ...]]:
    """Prime implicants of a monotone CNF, by clause-wise distribution with absorption."""
    if len(cnf.attributes) > PRIMES_LIMIT:
        raise ReductError(f"prime expansion is limited to {PRIMES_LIMIT} attributes")
    if cnf.infeasible:
        return []
    terms = [frozenset()]
    for clause in _clause_order(_minimal(cnf.clauses), cnf.attributes):
        grown = []
        for t in terms:
            if t & clause:
                grown.append(t)
            else:
                grown.extend(t | {a} for a in clause)
        terms = _minimal(grown)
    return _canonical(terms, cnf.attributes)


def system_reducts(system: RelationSystem, method: str = "primes") -> list[tuple[str, ...]]:
    if method == "bruteforce":
        return reducts_bruteforce(system)
    if method == "primes":
        return reducts_via_primes(discernibility_function(system_discernibility_matrix(system)))
    raise ReductError(f"unknown reduction method {method!r}")


def lift_reduct(image: RelationSystem, source: RelationSystem | Sequence[str],
                image_reduct: Iterable[str]) -> tuple[str, ...]:
    """Carry a reduct of the image system back to the source by relation index.

    ``source`` may be the source system or just its relation names in order.
    """
    source_names = source.names if isinstance(source, RelationSystem) else tuple(source)
    if len(image) != len(source_names):
        raise ReductError("image and source systems have different relation counts")
    image_reduct = _check_names(image, image_reduct)
    picked = {image.names.index(n) for n in image_reduct}
    return tuple(source_names[i] for i in sorted(picked))


def choose_one(reducts: Sequence[Sequence[str]]) -> tuple[str, ...] | None:
    """Smallest cardinality first, then the lexicographically least sorted names."""
    if not reducts:
        return None
    return tuple(min(reducts, key=lambda r: (len(r), sorted(r))))
