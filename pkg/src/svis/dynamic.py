"""Incremental maintenance of a compressed set-valued table.

A CompressionState keeps two stacked layers:

* the cell-identity layer: classes of objects with identical rows,
  the quotient map onto one representative row per class, and that
  quotient table;
* the tolerance layer: one partition per attribute (objects with equal
  ``>= h`` neighborhoods), their joint, the joint's block mapping, and the
  image relation system.

Tolerance relations are only ever built on the quotient table, since
cell-identical objects have identical neighborhoods. Relations for columns
an update does not touch are pulled back from the stored image instead of
being rebuilt.

Every update returns a new state; ``state.report`` describes what changed.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .compress import (BlockMapping, compress_system, compress_table, image_relation, pullback,
                       quotient_table)
from .errors import ConsistencyError, StateError, SvisError
from .partition import (Partition, joint_partition, lift_partition, partition_by_equivalence,
                        partition_by_relation)
from .relations import (Relation, RelationSystem, bits_of, check_thresholds, induced_system,
                        is_covering, tolerance_ge)
from .table import SetValuedTable, add_columns, append_rows, drop_columns

STATE_VERSION = 1


@dataclass(frozen=True)
class CompressionState:
    table: SetValuedTable
    thresholds: tuple[int, ...]
    partitions: tuple[Partition, ...]
    joint: Partition
    mapping: BlockMapping
    image: RelationSystem
    t_partition: Partition
    t_mapping: BlockMapping
    t_table: SetValuedTable
    lax: bool = False
    report: dict = field(default_factory=dict, compare=False, repr=False)

    def partition_of(self, attr: str) -> Partition:
        return self.partitions[self.table.attribute_index(attr)]

    def source_system(self) -> RelationSystem:
        """The tolerance system on the full universe, pulled back through the image."""
        return RelationSystem(self.table.objects, tuple(
            (n, pullback(self.mapping, r)) for n, r in self.image.relations))


# -- layer construction ---------------------------------------------------

def _check_cover(attr: str, h: int, rel: Relation, lax: bool) -> None:
    if not is_covering(rel):
        msg = f"relation on {attr!r} with threshold {h} does not cover the universe"
        if not lax:
            raise StateError(msg)
        warnings.warn(msg, stacklevel=3)


def _build(t_table: SetValuedTable, attrs: Sequence[str], thresholds: Sequence[int],
           lax: bool) -> list[Relation]:
    rels = []
    for a, h in zip(attrs, thresholds):
        r = tolerance_ge(t_table, a, h)
        _check_cover(a, h, r, lax)
        rels.append(r)
    return rels


def _pull_from_image(state: CompressionState, attrs: Sequence[str], t_mapping: BlockMapping,
                     t_table: SetValuedTable) -> list[Relation]:
    """Relations of ``attrs`` on a new quotient table, read off the stored image.

    Each new quotient object is sent to the old image object of its
    representative; the old image is exact for the attribute, so membership
    carries over unchanged.
    """
    reps = [b[0] for b in t_mapping.blocks]
    pos = {y: k for k, y in enumerate(state.image.universe)}
    target = [pos[state.mapping.assignment[x]] for x in reps]
    inverse = [0] * len(state.image.universe)
    for c, k in enumerate(target):
        inverse[k] |= 1 << c
    out = []
    for a in attrs:
        old = state.image[a]
        rows = []
        for k in target:
            row = 0
            for j in bits_of(old.rows[k]):
                row |= inverse[j]
            rows.append(row)
        out.append(Relation(t_table.objects, tuple(rows)))
    return out


def _assemble(table: SetValuedTable, thresholds: Sequence[int], t_partition: Partition,
              t_mapping: BlockMapping, t_table: SetValuedTable, q_rels: Sequence[Relation], *,
              lax: bool, partitions: Sequence[Partition] | None = None,
              joint: Partition | None = None, report: dict | None = None) -> CompressionState:
    if partitions is None:
        partitions = [lift_partition(partition_by_relation(r), table.objects, t_mapping.assignment)
                      for r in q_rels]
    if joint is None:
        joint = joint_partition(partitions, table.objects)
    mapping = BlockMapping.from_partition(joint)
    if not t_partition.refines(joint):
        raise ConsistencyError("cell-identity classes are split by the tolerance partition")
    q_map = BlockMapping(t_table.objects, mapping.image,
                         {q: mapping.assignment[b[0]] for q, b in zip(t_table.objects, t_mapping.blocks)})
    images = []
    for a, r in zip(table.attributes, q_rels):
        try:
            images.append(image_relation(q_map, r))
        except ConsistencyError:
            raise ConsistencyError(f"joint-partition mapping is inconsistent with {a!r}") from None
    image = RelationSystem(mapping.image, tuple(zip(table.attributes, images)))
    return CompressionState(table, tuple(thresholds), tuple(partitions), joint, mapping, image,
                            t_partition, t_mapping, t_table, lax, report or {})


def build_state(table: SetValuedTable, thresholds: Sequence[int] | None = None, *,
                lax: bool = False) -> CompressionState:
    if thresholds is None:
        thresholds = (1,) * len(table.attributes)
    thresholds = check_thresholds(table, thresholds)
    t_partition = partition_by_equivalence(table)
    t_mapping, t_table = quotient_table(table, t_partition)
    q_rels = _build(t_table, table.attributes, thresholds, lax)
    return _assemble(table, thresholds, t_partition, t_mapping, t_table, q_rels, lax=lax,
                     report={"operation": "build"})


# -- the four updates -----------------------------------------------------

def add_attributes(state: CompressionState, columns: SetValuedTable,
                   thresholds: Sequence[int] | None = None) -> CompressionState:
    """Append columns; only the new columns' relations are built."""
    if thresholds is None:
        thresholds = (1,) * len(columns.attributes)
    new_h = check_thresholds(columns, thresholds)
    table = add_columns(state.table, columns)
    new_attrs = columns.attributes
    all_h = state.thresholds + new_h

    t_partition = joint_partition(
        [state.t_partition, partition_by_equivalence(table, new_attrs)], table.objects)
    t_mapping, t_table = quotient_table(table, t_partition)

    old_rels = _pull_from_image(state, state.table.attributes, t_mapping, t_table)
    new_rels = _build(t_table, new_attrs, new_h, state.lax)
    new_parts = [lift_partition(partition_by_relation(r), table.objects, t_mapping.assignment)
                 for r in new_rels]
    joint = joint_partition([state.joint, *new_parts], table.objects)
    return _assemble(
        table, all_h, t_partition, t_mapping, t_table, old_rels + new_rels, lax=state.lax,
        partitions=state.partitions + tuple(new_parts), joint=joint,
        report={"operation": "add_attributes", "added": list(new_attrs),
                "new_partitions": {a: p.to_list() for a, p in zip(new_attrs, new_parts)},
                "joint": joint.to_list(), "image_size": len(joint)})


def delete_attributes(state: CompressionState, names: Iterable[str]) -> CompressionState:
    names = list(dict.fromkeys(names))
    for n in names:
        if not state.table.has_attribute(n):
            raise StateError(f"unknown attribute {n!r}")
    keep = [a for a in state.table.attributes if a not in set(names)]
    if not keep:
        raise StateError("cannot delete every attribute")
    table = drop_columns(state.table, names)
    kept_h = tuple(h for a, h in zip(state.table.attributes, state.thresholds) if a in keep)

    # coarsen the cell-identity classes on the quotient, then lift
    q_part = partition_by_equivalence(state.t_table, keep)
    t_partition = lift_partition(q_part, table.objects, state.t_mapping.assignment)
    t_mapping, t_table = quotient_table(table, t_partition)

    rels = _pull_from_image(state, keep, t_mapping, t_table)
    parts = tuple(state.partition_of(a) for a in keep)
    joint = joint_partition(parts, table.objects)
    return _assemble(table, kept_h, t_partition, t_mapping, t_table, rels, lax=state.lax,
                     partitions=parts, joint=joint,
                     report={"operation": "delete_attributes", "deleted": names,
                             "joint": joint.to_list(), "image_size": len(joint)})


def add_objects(state: CompressionState, incoming: SetValuedTable) -> CompressionState:
    """Compress the incoming rows alone, merge with the stored quotient, compress again.

    The merged quotient is checked against a direct compression of the full
    union; a mismatch raises StateError.
    """
    if set(incoming.attributes) != set(state.table.attributes):
        raise StateError(f"attribute mismatch: {list(incoming.attributes)} "
                         f"vs {list(state.table.attributes)}")
    incoming = incoming.project(state.table.attributes)
    clash = [o for o in incoming.objects if state.table.has_object(o)]
    if clash:
        raise StateError(f"object id(s) already present: {clash}")
    table = append_rows(state.table, incoming)

    s5_map, s5 = compress_table(incoming, start=len(state.t_table) + 1)
    s6 = append_rows(state.t_table, s5)
    s7_map, s7 = compress_table(s6)
    assignment = {x: s7_map(state.t_mapping(x)) for x in state.table.objects}
    assignment.update({x: s7_map(s5_map(x)) for x in incoming.objects})
    t_mapping = BlockMapping(table.objects, s7.objects, assignment)
    t_partition = t_mapping.partition()

    direct = partition_by_equivalence(table)
    if direct != t_partition or quotient_table(table, direct)[1] != s7:
        raise StateError("merged compression differs from compressing the full union")

    q_rels = _build(s7, table.attributes, state.thresholds, state.lax)
    return _assemble(table, state.thresholds, t_partition, t_mapping, s7, q_rels, lax=state.lax,
                     report={"operation": "add_objects", "added": list(incoming.objects),
                             "incoming_compressed": s5.to_dict(), "merged": s6.to_dict(),
                             "compressed": s7.to_dict(),
                             "correspondence": {y: s7_map(y) for y in s6.objects}})


def delete_objects(state: CompressionState, ids: Iterable[str]) -> CompressionState:
    """Drop a quotient row when its whole class is deleted; keep it otherwise."""
    ids = list(dict.fromkeys(ids))
    for x in ids:
        if not state.table.has_object(x):
            raise StateError(f"unknown object {x!r}")
    if len(ids) == len(state.table):
        raise StateError("cannot delete every object")
    if not ids:
        return replace(state, report={"operation": "delete_objects", "deleted": [], "cancelled": [],
                                      "kept": {y: y for y in state.t_table.objects}, "touched": []})
    gone = set(ids)
    deleted_order = [x for x in state.table.objects if x in gone]
    u3 = partition_by_equivalence(state.table.select(deleted_order))
    cancelled, touched = [], []
    for block in u3.blocks:
        full = state.t_partition.block(block[0])
        if not set(block) <= set(full):
            raise StateError(f"deleted class {list(block)} is not inside {list(full)}")
        y = state.t_mapping(block[0])
        touched.append(y)
        if len(block) == len(full):
            cancelled.append(y)

    remaining = [x for x in state.table.objects if x not in gone]
    # survivors in first-occurrence order, so the quotient stays canonical
    survivors = list(dict.fromkeys(state.t_mapping(x) for x in remaining))
    renamed = {y: f"y{k + 1}" for k, y in enumerate(survivors)}
    table = state.table.select(remaining)
    t_mapping = BlockMapping(remaining, tuple(renamed.values()),
                             {x: renamed[state.t_mapping(x)] for x in remaining})
    t_partition = t_mapping.partition()
    t_table = SetValuedTable(t_mapping.image, table.attributes,
                             tuple(state.t_table.row(y) for y in survivors))

    rels = _pull_from_image(state, table.attributes, t_mapping, t_table)
    return _assemble(table, state.thresholds, t_partition, t_mapping, t_table, rels, lax=state.lax,
                     report={"operation": "delete_objects", "deleted": deleted_order,
                             "original_classes": state.t_partition.to_list(),
                             "deleted_classes": u3.to_list(),
                             "cancelled": cancelled, "kept": renamed,
                             "touched": sorted(set(touched), key=state.t_table.objects.index),
                             "compressed": t_table.to_dict()})


# -- batch comparison -----------------------------------------------------

def _image_pairs(mapping: BlockMapping, rel: Relation) -> set:
    block = dict(zip(mapping.image, (frozenset(b) for b in mapping.blocks)))
    return {(block[x], block[y]) for x, y in rel.pairs()}


def _row_classes(t_mapping: BlockMapping, t_table: SetValuedTable) -> dict:
    return {frozenset(b): t_table.row(y) for y, b in zip(t_mapping.image, t_mapping.blocks)}


def verify_against_batch(state: CompressionState) -> dict:
    """Recompute everything from ``state.table`` on the full universe and compare.

    Partitions are compared as sets of blocks and image relations through
    their blocks, so naming and ordering differences do not count.
    """
    table = state.table
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        system = induced_system(table, state.thresholds, lax=True)
    parts = [partition_by_relation(r) for _, r in system.relations]
    b_joint = joint_partition(parts, table.objects)
    checks = {}
    try:
        b_mapping, b_image = compress_system(system)
    except ConsistencyError:
        b_mapping = b_image = None
    b_tmap, b_ttable = compress_table(table)

    checks["t_partition"] = state.t_partition.as_sets() == partition_by_equivalence(table).as_sets()
    checks["t_table"] = _row_classes(state.t_mapping, state.t_table) == _row_classes(b_tmap, b_ttable)
    checks["partitions"] = (len(parts) == len(state.partitions) and
                            all(p.as_sets() == q.as_sets() for p, q in zip(parts, state.partitions)))
    checks["joint"] = state.joint.as_sets() == b_joint.as_sets()
    checks["mapping"] = b_mapping is not None and \
        state.mapping.partition().as_sets() == b_mapping.partition().as_sets()
    checks["image"] = b_image is not None and state.image.names == b_image.names and all(
        _image_pairs(state.mapping, state.image[n]) == _image_pairs(b_mapping, b_image[n])
        for n in b_image.names)
    return {"equal": all(checks.values()), "checks": checks,
            "image_size": len(state.joint), "objects": len(table)}


# -- persistence ----------------------------------------------------------

def state_to_dict(state: CompressionState) -> dict:
    return {
        "version": STATE_VERSION,
        "table": state.table.to_dict(),
        "thresholds": list(state.thresholds),
        "lax": state.lax,
        "partitions": {a: p.to_list() for a, p in zip(state.table.attributes, state.partitions)},
        "joint": state.joint.to_list(),
        "mapping": state.mapping.to_dict(),
        "image": state.image.to_dict(),
        "t_layer": {"partition": state.t_partition.to_list(),
                    "mapping": state.t_mapping.to_dict(),
                    "table": state.t_table.to_dict()},
    }


def save_state(state: CompressionState) -> str:
    return json.dumps(state_to_dict(state), indent=2) + "\n"


def load_state(text: str | bytes) -> CompressionState:
    try:
        data = json.loads(text)
    except ValueError as exc:
        raise StateError(f"corrupt state payload: {exc}") from None
    if not isinstance(data, dict) or "version" not in data:
        raise StateError("not a compression state (missing version)")
    if data["version"] != STATE_VERSION:
        raise StateError(f"unsupported state version {data['version']!r}; expected {STATE_VERSION}")
    try:
        table = SetValuedTable.from_dict(data["table"], allow_empty=True)
        u = table.objects
        t = data["t_layer"]
        t_table = SetValuedTable.from_dict(t["table"], allow_empty=True)
        if list(data["partitions"]) != list(table.attributes):
            raise StateError("partition columns do not match the table's attributes")
        state = CompressionState(
            table=table,
            thresholds=check_thresholds(table, data["thresholds"]),
            partitions=tuple(Partition(u, data["partitions"][a]) for a in table.attributes),
            joint=Partition(u, data["joint"]),
            mapping=BlockMapping.from_dict(data["mapping"]),
            image=RelationSystem.from_dict(data["image"]),
            t_partition=Partition(u, t["partition"]),
            t_mapping=BlockMapping.from_dict(t["mapping"]),
            t_table=t_table,
            lax=bool(data.get("lax", False)),
        )
    except StateError:
        raise
    except (KeyError, TypeError, ValueError, SvisError) as exc:
        raise StateError(f"corrupt state payload: {exc}") from None
    if state.mapping.source != u or state.t_mapping.source != u:
        raise StateError("corrupt state payload: mappings do not match the table")
    if state.image.universe != state.mapping.image or state.image.names != table.attributes:
        raise StateError("corrupt state payload: image does not match the mapping")
    return state


def read_state(path) -> CompressionState:
    with open(path, encoding="utf-8") as fh:
        return load_state(fh.read())
