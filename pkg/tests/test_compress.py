import random

import pytest

from svis.compress import (BlockMapping, compress_system, compress_table, image_relation,
                           is_consistent, pullback, quotient_table)
from svis.errors import ConsistencyError, RelationError
from svis.partition import Partition, partition_by_equivalence
from svis.relations import Relation, induced_system

import oracles
from conftest import load, random_table


def test_base8_image_system(base8):
    mapping, image = compress_system(induced_system(base8))
    assert mapping.image == ("y1", "y2", "y3", "y4")
    assert mapping.blocks == (("x1", "x7"), ("x2", "x4"), ("x3",), ("x5", "x6", "x8"))
    assert image.names == ("a1", "a2", "a3", "a4")
    a1 = image["a1"]
    assert a1.neighbors("y1") == ["y1", "y2"]
    assert a1.neighbors("y2") == ["y1", "y2", "y3", "y4"]
    assert a1.neighbors("y3") == ["y2", "y3", "y4"]
    assert a1.neighbors("y4") == ["y2", "y3", "y4"]
    assert image["a2"].neighbors("y1") == ["y1", "y2", "y3"]
    assert image["a3"] == Relation.full(mapping.image)


def test_pullback_restores_every_relation(base8, demo6):
    for t in (base8, demo6):
        sys = induced_system(t)
        mapping, image = compress_system(sys)
        for n, r in sys.relations:
            assert pullback(mapping, image[n]) == r


def test_inconsistent_merge_refused(demo6):
    sys = induced_system(demo6)
    part = Partition(demo6.objects, (("x1", "x2"), ("x3",), ("x4",), ("x5",), ("x6",)))
    mapping = BlockMapping.from_partition(part)
    assert not is_consistent(mapping, sys["a2"])
    blocks = {frozenset(b) for b in part.blocks}
    assert not oracles.consistent(blocks, sys["a2"].pairs())
    with pytest.raises(ConsistencyError):
        image_relation(mapping, sys["a2"])


def test_mapping_validation():
    with pytest.raises(RelationError):
        BlockMapping(("x1",), ("y1", "y2"), {"x1": "y1"})
    with pytest.raises(RelationError):
        BlockMapping(("x1", "x2"), ("y1",), {"x1": "y1"})


def test_mapping_round_trip_and_compose():
    part = Partition(("a", "b", "c"), (("a", "c"), ("b",)))
    m = BlockMapping.from_partition(part, "z", 3)
    assert m.image == ("z3", "z4") and m("c") == "z3"
    assert BlockMapping.from_dict(m.to_dict()) == m
    collapse = BlockMapping(m.image, ("w1",), {"z3": "w1", "z4": "w1"})
    assert m.then(collapse).blocks == (("a", "b", "c"),)
    assert BlockMapping.identity(("a", "b")).blocks == (("a",), ("b",))


def test_compress_dup6_gives_three_rows():
    mapping, t = compress_table(load("dup6"))
    assert t == load("dup6_compressed")
    assert mapping.blocks == (("x1", "x2"), ("x3", "x4"), ("x5", "x6"))


def test_compress_incoming_with_offset():
    _, t = compress_table(load("incoming4"), start=4)
    assert t == load("incoming4_compressed")


def test_compress_table_idempotent():
    rng = random.Random(17)
    for _ in range(50):
        t = random_table(rng)
        _, once = compress_table(t)
        m2, twice = compress_table(once)
        assert twice == once
        assert all(len(b) == 1 for b in m2.blocks)


def test_quotient_uses_first_member(base8):
    part = partition_by_equivalence(base8)
    mapping, q = quotient_table(base8, part)
    for y, b in zip(mapping.image, mapping.blocks):
        assert q.row(y) == base8.row(b[0])


def test_random_systems_consistent_and_sized():
    rng = random.Random(23)
    for _ in range(80):
        t = random_table(rng)
        sys = induced_system(t)
        mapping, image = compress_system(sys)
        blocks = {frozenset(b) for b in mapping.blocks}
        expected = {frozenset(t.objects)}
        for a in t.attributes:
            per_attr = oracles.neighborhood_blocks(t.objects, oracles.ge_pairs(t, a, 1))
            expected = {b & c for b in expected for c in per_attr} - {frozenset()}
        assert blocks == expected
        for n, r in sys.relations:
            assert oracles.consistent(blocks, r.pairs())
            assert pullback(mapping, image[n]) == r
        assert len(image.universe) <= len(partition_by_equivalence(t))
