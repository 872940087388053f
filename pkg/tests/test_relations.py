import random
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svis.errors import RelationError
from svis.relations import (Relation, RelationSystem, induced_system, intersect_relations,
                            is_covering, max_cell_size, parse_thresholds, tolerance_exact,
                            tolerance_ge, tolerance_ge_joint, tolerance_valueset, union_relations)

import oracles
from conftest import random_table

U6 = ["x1", "x2", "x3", "x4", "x5", "x6"]


def test_classical_tolerance_class(demo6):
    assert tolerance_ge(demo6, "a1", 1).neighbors("x2") == U6


def test_threshold_two_drops_reflexivity(demo6):
    r = tolerance_ge(demo6, "a1", 2)
    assert r.neighbors("x1") == []
    assert not r.related("x1", "x1")


def test_threshold_zero_is_full(demo6):
    assert tolerance_ge(demo6, "a3", 0) == Relation.full(demo6.objects)


def test_joint_single_attribute_scope(demo6):
    r = tolerance_ge_joint(demo6, (1, 0, 0, 0))
    assert r.neighbors("x1") == ["x1", "x2", "x4"]
    assert r.neighbors("x2") == U6
    assert r.neighbors("x4") == U6


def test_joint_empty_scope_is_full(demo6):
    assert tolerance_ge_joint(demo6, (0, 0, 0, 0)) == Relation.full(demo6.objects)


def test_exact_cardinality(demo6):
    one = tolerance_exact(demo6, "a1", 1)
    assert one.related("x1", "x2")
    assert not one.related("x2", "x3")
    assert tolerance_exact(demo6, "a1", 2).related("x2", "x3")


def test_exact_unattainable_is_empty(demo6):
    h = max_cell_size(demo6, "a1") + 1
    assert tolerance_exact(demo6, "a1", h) == Relation.empty(demo6.objects)


def test_valueset_relations(demo6):
    assert tolerance_valueset(demo6, "a1", {"0"}).related("x1", "x4")
    assert tolerance_valueset(demo6, "a1", {"1"}).related("x6", "x4")


def test_valueset_empty_target(demo6):
    # frozen from oracles.pairs_where(demo6, "a1", lambda c: not c)
    expected = {("x1", "x3"), ("x1", "x5"), ("x1", "x6"), ("x3", "x1"), ("x5", "x1"), ("x6", "x1")}
    assert tolerance_valueset(demo6, "a1", set()).pairs() == expected
    assert oracles.pairs_where(demo6, "a1", lambda c: not c) == expected


def test_valueset_outside_domain_warns(demo6):
    with pytest.warns(UserWarning):
        r = tolerance_valueset(demo6, "a1", {"9"})
    assert r == Relation.empty(demo6.objects)


def test_unknown_attribute(demo6):
    for build in (tolerance_ge, tolerance_exact):
        with pytest.raises(RelationError):
            build(demo6, "zz", 1)
    with pytest.raises(RelationError):
        tolerance_valueset(demo6, "zz", {"0"})


def test_covering(demo6):
    assert is_covering(tolerance_ge(demo6, "a1", 1))
    assert not is_covering(tolerance_ge(demo6, "a1", 2))
    assert is_covering(Relation.full(demo6.objects))


def test_induced_system_neighborhoods(demo6, base8):
    sys = induced_system(demo6)
    assert sys.names == ("a1", "a2", "a3", "a4")
    assert sys["a2"].neighbors("x3") == ["x2", "x3", "x5", "x6"]
    assert sys["a2"].neighbors("x6") == ["x2", "x3", "x5", "x6"]
    assert sys["a3"] == Relation.full(demo6.objects)
    assert sys["a4"] == Relation.full(demo6.objects)
    assert induced_system(base8)["a1"].neighbors("x1") == ["x1", "x2", "x4", "x7"]


def test_induced_system_rejects_non_covering(demo6):
    with pytest.raises(RelationError):
        induced_system(demo6, (2, 1, 1, 1))
    with pytest.warns(UserWarning):
        induced_system(demo6, (2, 1, 1, 1), lax=True)


def test_induced_system_threads_agree(demo6, monkeypatch):
    monkeypatch.setenv("SVIS_THREADS", "4")
    threaded = induced_system(demo6)
    monkeypatch.setenv("SVIS_THREADS", "1")
    assert threaded == induced_system(demo6)


def test_intersection_equals_second_relation(demo6):
    sys = induced_system(demo6)
    assert intersect_relations([r for _, r in sys.relations]) == sys["a2"]
    assert intersect_relations([sys["a1"]]) == sys["a1"]
    assert intersect_relations([], demo6.objects) == Relation.full(demo6.objects)


def test_intersection_universe_mismatch(demo6, base8):
    with pytest.raises(RelationError):
        intersect_relations([tolerance_ge(demo6, "a1", 1), tolerance_ge(base8, "a1", 1)])


def test_relation_dump_round_trip(demo6):
    r = tolerance_ge(demo6, "a2", 1)
    d = r.to_dict()
    assert d["rows"]["x1"] == ["x1", "x4"]
    assert Relation.from_dict(d) == r


def test_system_dump_round_trip(demo6):
    sys = induced_system(demo6)
    assert RelationSystem.from_dict(sys.to_dict()) == sys


def test_parse_thresholds():
    assert parse_thresholds(None, 3) == (1, 1, 1)
    assert parse_thresholds("2", 3) == (2, 2, 2)
    assert parse_thresholds("1,0,2", 3) == (1, 0, 2)
    with pytest.raises(RelationError):
        parse_thresholds("1,2", 3)
    with pytest.raises(RelationError):
        parse_thresholds("a", 1)


# -- agreement with the set-based oracle ---------------------------------

def test_ge_matches_oracle_on_random_tables():
    rng = random.Random(11)
    for _ in range(60):
        t = random_table(rng)
        for a in t.attributes:
            for h in range(0, 4):
                assert tolerance_ge(t, a, h).pairs() == oracles.ge_pairs(t, a, h)
                assert tolerance_exact(t, a, h).pairs() == \
                    oracles.pairs_where(t, a, lambda c, h=h: len(c) == h)


@st.composite
def small_tables(draw):
    seed = draw(st.integers(0, 10**6))
    return random_table(random.Random(seed), max_objects=8, max_attrs=3, max_values=4)


@settings(max_examples=60, deadline=None)
@given(small_tables(), st.integers(0, 3))
def test_symmetry_and_decompositions(t, h):
    for a in t.attributes:
        ge = tolerance_ge(t, a, h)
        assert ge.is_symmetric()
        top = max_cell_size(t, a)
        exacts = [tolerance_exact(t, a, j) for j in range(h, top + 1)]
        assert union_relations(exacts, t.objects) == ge
        dom = sorted(t.domain(a))
        pieces = [tolerance_valueset(t, a, p) for p in combinations(dom, h)]
        assert union_relations(pieces, t.objects) == tolerance_exact(t, a, h)


@settings(max_examples=60, deadline=None)
@given(small_tables(), st.data())
def test_joint_monotone_and_factorised(t, data):
    m = len(t.attributes)
    lo = tuple(data.draw(st.integers(0, 2)) for _ in range(m))
    hi = tuple(h + data.draw(st.integers(0, 2)) for h in lo)
    assert tolerance_ge_joint(t, hi).issubset(tolerance_ge_joint(t, lo))
    factors = [tolerance_ge(t, a, h) for a, h in zip(t.attributes, lo) if h]
    assert tolerance_ge_joint(t, lo) == intersect_relations(factors, t.objects)
    assert tolerance_ge_joint(t, lo).pairs() == oracles.joint_ge_pairs(t, lo)


def test_threshold_one_is_classical_relation():
    rng = random.Random(5)
    for _ in range(40):
        t = random_table(rng)
        joint = tolerance_ge_joint(t, (1,) * len(t.attributes))
        classical = {(x, y) for x, y in product(t.objects, repeat=2)
                     if all(t.cell(x, a) & t.cell(y, a) for a in t.attributes)}
        assert joint.pairs() == classical
