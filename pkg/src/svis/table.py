"""Set-valued information systems: objects x attributes -> finite value sets.

Tables are immutable. Value tokens are opaque strings (``"01" != "1"``) and
every output is ordered canonically: objects and attributes in stored
order, values within a cell sorted lexicographically.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import TableError

ValueSet = frozenset  # frozenset[str]; canonical order is sorted()


def valueset(values: Iterable[str]) -> frozenset[str]:
    vs = frozenset(values)
    for v in vs:
        if not isinstance(v, str):
            raise TableError(f"value tokens must be strings, got {v!r}")
    return vs


def format_cell(values: Iterable[str]) -> str:
    return "{" + ",".join(sorted(values)) + "}"


@dataclass(frozen=True)
class SetValuedTable:
    """The system (U, A, V, f).

    ``rows[i][j]`` is f(objects[i], attributes[j]).
    """

    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    rows: tuple[tuple[frozenset, ...], ...]
    _obj_index: dict = field(init=False, repr=False, compare=False)
    _attr_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        objects = tuple(self.objects)
        attributes = tuple(self.attributes)
        rows = tuple(tuple(valueset(c) for c in r) for r in self.rows)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "rows", rows)
        _check_unique(objects, "object id")
        _check_unique(attributes, "attribute name")
        if len(rows) != len(objects):
            raise TableError(f"{len(objects)} objects but {len(rows)} rows")
        for obj, r in zip(objects, rows):
            if len(r) != len(attributes):
                raise TableError(
                    f"row {obj!r} has {len(r)} cells, expected {len(attributes)}")
        object.__setattr__(self, "_obj_index", {o: i for i, o in enumerate(objects)})
        object.__setattr__(self, "_attr_index", {a: j for j, a in enumerate(attributes)})

    @classmethod
    def from_mapping(cls, data: Mapping[str, Mapping[str, Iterable[str]]],
                     attributes: Sequence[str] | None = None) -> "SetValuedTable":
        """Build from ``{object: {attribute: values}}``; insertion order is kept."""
        if attributes is None:
            attributes = []
            for cells in data.values():
                for a in cells:
                    if a not in attributes:
                        attributes.append(a)
        rows = []
        for obj, cells in data.items():
            missing = [a for a in attributes if a not in cells]
            if missing or len(cells) != len(attributes):
                raise TableError(f"row {obj!r} does not match attributes {list(attributes)}")
            rows.append(tuple(cells[a] for a in attributes))
        return cls(tuple(data), tuple(attributes), tuple(rows))

    @classmethod
    def from_dict(cls, data: dict, *, allow_empty: bool = False) -> "SetValuedTable":
        """Inverse of :meth:`to_dict`."""
        return _from_payload(data, allow_empty)

    def __len__(self):
        return len(self.objects)

    def object_index(self, obj: str) -> int:
        try:
            return self._obj_index[obj]
        except KeyError:
            raise TableError(f"unknown object {obj!r}") from None

    def attribute_index(self, attr: str) -> int:
        try:
            return self._attr_index[attr]
        except KeyError:
            raise TableError(f"unknown attribute {attr!r}") from None

    def has_object(self, obj: str) -> bool:
        return obj in self._obj_index

    def has_attribute(self, attr: str) -> bool:
        return attr in self._attr_index

    def cell(self, obj: str, attr: str) -> frozenset:
        return self.rows[self.object_index(obj)][self.attribute_index(attr)]

    def row(self, obj: str) -> tuple[frozenset, ...]:
        return self.rows[self.object_index(obj)]

    def column(self, attr: str) -> tuple[frozenset, ...]:
        j = self.attribute_index(attr)
        return tuple(r[j] for r in self.rows)

    def domain(self, attr: str | None = None) -> frozenset:
        """V_a for one attribute, or V (union over all cells) when attr is None."""
        cols = [self.column(attr)] if attr is not None else [self.column(a) for a in self.attributes]
        out: set = set()
        for col in cols:
            for c in col:
                out |= c
        return frozenset(out)

    def project(self, attrs: Sequence[str]) -> "SetValuedTable":
        idx = [self.attribute_index(a) for a in attrs]
        return SetValuedTable(self.objects, tuple(attrs),
                              tuple(tuple(r[j] for j in idx) for r in self.rows))

    def select(self, objs: Sequence[str]) -> "SetValuedTable":
        idx = [self.object_index(o) for o in objs]
        return SetValuedTable(tuple(objs), self.attributes, tuple(self.rows[i] for i in idx))

    def to_dict(self) -> dict:
        return {
            "attributes": list(self.attributes),
            "objects": [
                {"id": o, "cells": {a: sorted(c) for a, c in zip(self.attributes, r)}}
                for o, r in zip(self.objects, self.rows)
            ],
        }

    def pretty(self) -> str:
        header = ["object", *self.attributes]
        body = [[o, *(format_cell(c) for c in r)] for o, r in zip(self.objects, self.rows)]
        widths = [max(len(str(x)) for x in col) for col in zip(header, *body)]
        lines = ["  ".join(s.ljust(w) for s, w in zip(line, widths)) for line in [header, *body]]
        return "\n".join(line.rstrip() for line in lines)


def _check_unique(names: Sequence[str], what: str) -> None:
    seen = set()
    for n in names:
        if not isinstance(n, str) or not n:
            raise TableError(f"{what} must be a non-empty string, got {n!r}")
        if n in seen:
            raise TableError(f"duplicate {what} {n!r}")
        seen.add(n)


# -- parsing ---------------------------------------------------------------

def parse_cell(text: str, *, allow_empty: bool = False) -> frozenset:
    s = text.strip()
    if len(s) < 2 or s[0] != "{" or s[-1] != "}":
        raise TableError(f"malformed cell {text!r}: braces are mandatory")
    inner = s[1:-1].strip()
    if not inner:
        if not allow_empty:
            raise TableError("empty cell {} (pass allow_empty=True to permit)")
        return frozenset()
    tokens = [t.strip() for t in inner.split(",")]
    for t in tokens:
        if not t or any(ch in t for ch in "{}"):
            raise TableError(f"malformed cell {text!r}")
    return frozenset(tokens)


def _parse_csv(text: str, allow_empty: bool) -> SetValuedTable:
    reader = csv.reader(io.StringIO(text), skipinitialspace=True)
    lines = [r for r in reader if r and any(x.strip() for x in r)]
    if not lines:
        raise TableError("empty CSV input: header row required")
    header = [h.strip() for h in lines[0]]
    if header[0] != "object":
        raise TableError(f"CSV header must start with 'object', got {header[0]!r}")
    attributes = header[1:]
    objects, rows = [], []
    for n, r in enumerate(lines[1:], start=2):
        if len(r) != len(header):
            raise TableError(f"line {n}: ragged row ({len(r)} fields, expected {len(header)})")
        objects.append(r[0].strip())
        rows.append(tuple(parse_cell(c, allow_empty=allow_empty) for c in r[1:]))
    return SetValuedTable(tuple(objects), tuple(attributes), tuple(rows))


def _parse_json(text: str, allow_empty: bool) -> SetValuedTable:
    try:
        data = json.loads(text)
    except ValueError as exc:
        raise TableError(f"malformed table JSON: {exc}") from None
    return _from_payload(data, allow_empty)


def _from_payload(data, allow_empty: bool) -> SetValuedTable:
    try:
        attributes = data["attributes"]
        entries = data["objects"]
    except (KeyError, TypeError) as exc:
        raise TableError(f"malformed table JSON: {exc}") from None
    if not isinstance(attributes, list) or not isinstance(entries, list):
        raise TableError("malformed table JSON: 'attributes' and 'objects' must be lists")
    objects, rows = [], []
    for e in entries:
        try:
            oid, cells = e["id"], e["cells"]
        except (KeyError, TypeError):
            raise TableError(f"malformed object entry {e!r}") from None
        if not isinstance(cells, dict) or set(cells) != set(attributes):
            raise TableError(f"object {oid!r}: cells do not match attributes")
        row = []
        for a in attributes:
            vals = cells[a]
            if not isinstance(vals, list) or not all(isinstance(v, str) for v in vals):
                raise TableError(f"cell ({oid!r}, {a!r}) must be a list of strings")
            if not vals and not allow_empty:
                raise TableError(f"empty cell ({oid!r}, {a!r})")
            row.append(frozenset(vals))
        objects.append(oid)
        rows.append(tuple(row))
    return SetValuedTable(tuple(objects), tuple(attributes), tuple(rows))


def parse_table(text: str | bytes, format: str = "csv", *, allow_empty: bool = False) -> SetValuedTable:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if format == "csv":
        return _parse_csv(text, allow_empty)
    if format == "json":
        return _parse_json(text, allow_empty)
    raise TableError(f"unknown table format {format!r}")


def _csv_field(s: str) -> str:
    if any(ch in s for ch in ',"\n\r') or s != s.strip():
        return '"' + s.replace('"', '""') + '"'
    return s


def serialize_table(table: SetValuedTable, format: str = "csv") -> str:
    if format == "json":
        return json.dumps(table.to_dict(), indent=2) + "\n"
    if format != "csv":
        raise TableError(f"unknown table format {format!r}")
    for c in (c for r in table.rows for c in r):
        for v in c:
            if any(ch in v for ch in ",{}") or v != v.strip():
                raise TableError(f"value {v!r} cannot be represented in CSV; use JSON")
    lines = [",".join(_csv_field(h) for h in ("object", *table.attributes))]
    for obj, r in zip(table.objects, table.rows):
        cells = ['"' + format_cell(c).replace('"', '""') + '"' for c in r]
        lines.append(",".join([_csv_field(obj), *cells]))
    return "\n".join(lines) + "\n"


def read_table(path, *, allow_empty: bool = False) -> SetValuedTable:
    path = str(path)
    fmt = "json" if path.endswith(".json") else "csv"
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read(), fmt, allow_empty=allow_empty)


# -- edits -----------------------------------------------------------------

def add_columns(table: SetValuedTable, columns: SetValuedTable) -> SetValuedTable:
    """Append the attributes of ``columns``; its objects must match the table's."""
    clash = [a for a in columns.attributes if table.has_attribute(a)]
    if clash:
        raise TableError(f"attribute(s) already present: {clash}")
    if set(columns.objects) != set(table.objects) or len(columns) != len(table):
        raise TableError("new columns must cover exactly the table's objects")
    rows = tuple(r + columns.row(o) for o, r in zip(table.objects, table.rows))
    return SetValuedTable(table.objects, table.attributes + columns.attributes, rows)


def drop_columns(table: SetValuedTable, names: Iterable[str]) -> SetValuedTable:
    names = list(names)
    for n in names:
        table.attribute_index(n)
    keep = [a for a in table.attributes if a not in set(names)]
    return table.project(keep)


def append_rows(table: SetValuedTable, rows: SetValuedTable) -> SetValuedTable:
    """Append the objects of ``rows``; attribute lists must be identical."""
    if rows.attributes != table.attributes:
        if set(rows.attributes) != set(table.attributes):
            raise TableError(
                f"attribute mismatch: {list(rows.attributes)} vs {list(table.attributes)}")
        rows = rows.project(table.attributes)
    clash = [o for o in rows.objects if table.has_object(o)]
    if clash:
        raise TableError(f"object id(s) already present: {clash}")
    return SetValuedTable(table.objects + rows.objects, table.attributes, table.rows + rows.rows)


def remove_rows(table: SetValuedTable, ids: Iterable[str]) -> SetValuedTable:
    ids = set(ids)
    for o in ids:
        table.object_index(o)
    return table.select([o for o in table.objects if o not in ids])
