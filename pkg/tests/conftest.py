import random
from pathlib import Path

import pytest

from svis.dynamic import add_attributes, add_objects, delete_attributes, delete_objects
from svis.table import SetValuedTable, read_table

DATA = Path(__file__).parent / "data"


def load(name):
    return read_table(DATA / f"{name}.csv")


@pytest.fixture
def demo6():
    return load("demo6")


@pytest.fixture
def base8():
    return load("base8")


def random_table(rng: random.Random, max_objects=10, max_attrs=4, max_values=5,
                 min_objects=1, prefix="x", attr_prefix="a", start=1) -> SetValuedTable:
    """Nonempty random cells over a small per-attribute value domain."""
    n = rng.randint(min_objects, max_objects)
    m = rng.randint(1, max_attrs)
    domains = [[str(v) for v in range(rng.randint(1, max_values))] for _ in range(m)]
    rows = []
    for _ in range(n):
        row = []
        for dom in domains:
            k = rng.randint(1, len(dom))
            row.append(frozenset(rng.sample(dom, k)))
        rows.append(tuple(row))
    objects = tuple(f"{prefix}{i + start}" for i in range(n))
    attributes = tuple(f"{attr_prefix}{j + 1}" for j in range(m))
    return SetValuedTable(objects, attributes, tuple(rows))


def random_edit(rng, state, fresh):
    """Apply one random edit of the four kinds; ``fresh`` keeps new names unique."""
    t = state.table
    kind = rng.choice(["add_attrs", "del_attrs", "add_objs", "del_objs"])
    if kind == "add_attrs":
        cols = random_table(rng, max_attrs=2, attr_prefix=f"n{fresh}_")
        cols = SetValuedTable(t.objects, cols.attributes,
                              tuple(cols.rows[i % len(cols.rows)] for i in range(len(t))))
        h = tuple(rng.randint(1, 2) if state.lax else 1 for _ in cols.attributes)
        return add_attributes(state, cols, h)
    if kind == "del_attrs" and len(t.attributes) > 1:
        k = rng.randint(1, len(t.attributes) - 1)
        return delete_attributes(state, rng.sample(list(t.attributes), k))
    if kind == "del_objs" and len(t) > 1:
        k = rng.randint(0, len(t) - 1)
        return delete_objects(state, rng.sample(list(t.objects), k))
    extra = random_table(rng, max_objects=4, max_attrs=len(t.attributes), prefix=f"o{fresh}_")
    base = rng.choice(t.rows)
    rows = tuple(base if rng.random() < 0.4 else tuple(
        extra.rows[i][j % len(extra.attributes)] for j in range(len(t.attributes)))
        for i in range(len(extra)))
    return add_objects(state, SetValuedTable(extra.objects, t.attributes, rows))
