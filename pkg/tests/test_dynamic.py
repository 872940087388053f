import json
import random
import warnings

import pytest

from svis.compress import compress_table
from svis.dynamic import (STATE_VERSION, add_attributes, add_objects, build_state, delete_attributes,
                          delete_objects, load_state, save_state, verify_against_batch)
from svis.errors import StateError
from svis.relations import BUILD_COUNTS, induced_system
from svis.table import SetValuedTable, drop_columns

from conftest import load, random_edit, random_table


def _rows(table):
    return [table.row(x) for x in table.objects]


def test_build_state_layers(base8):
    s = build_state(base8)
    assert s.joint.to_list() == [["x1", "x7"], ["x2", "x4"], ["x3"], ["x5", "x6", "x8"]]
    assert s.t_partition.to_list() == [["x1", "x7"], ["x2"], ["x3"], ["x4"], ["x5"], ["x6", "x8"]]
    assert s.source_system() == induced_system(base8)
    assert verify_against_batch(s)["equal"]


def test_add_attribute_example(base8):
    s = add_attributes(build_state(base8), load("base8_a5_column"))
    assert s.table == load("base8_with_a5")
    assert s.report["new_partitions"]["a5"] == [["x1", "x2", "x3", "x4", "x5", "x6", "x7"], ["x8"]]
    assert s.joint.to_list() == [["x1", "x7"], ["x2", "x4"], ["x3"], ["x5", "x6"], ["x8"]]
    assert verify_against_batch(s)["equal"]


def test_delete_attribute_example(base8):
    s = delete_attributes(build_state(base8), ["a1"])
    assert s.table == load("base8_without_a1")
    assert s.joint.to_list() == [["x1", "x7"], ["x2", "x3", "x4"], ["x5", "x6", "x8"]]
    assert verify_against_batch(s)["equal"]


def test_old_columns_are_not_rebuilt(base8):
    s = build_state(base8)
    BUILD_COUNTS.clear()
    s = add_attributes(s, load("base8_a5_column"))
    assert dict(BUILD_COUNTS) == {"a5": 1}
    BUILD_COUNTS.clear()
    s = delete_attributes(s, ["a2"])
    s = delete_objects(s, ["x3"])
    assert sum(BUILD_COUNTS.values()) == 0


def test_add_objects_example():
    s = build_state(load("dup6"))
    assert s.t_table == load("dup6_compressed")
    s2 = add_objects(s, load("incoming4"))
    r = s2.report
    assert SetValuedTable.from_dict(r["incoming_compressed"]) == load("incoming4_compressed")
    assert SetValuedTable.from_dict(r["merged"]) == load("merged5")
    assert r["correspondence"] == {"y1": "y1", "y2": "y2", "y3": "y3", "y4": "y4", "y5": "y2"}
    assert _rows(s2.t_table) == _rows(load("dup10_compressed"))
    assert s2.table == load("dup10")
    assert verify_against_batch(s2)["equal"]


def test_delete_objects_example():
    s = add_objects(build_state(load("dup6")), load("incoming4"))
    out = delete_objects(s, ["x1", "x2", "x3"])
    r = out.report
    assert r["deleted_classes"] == [["x1", "x2"], ["x3"]]
    assert r["cancelled"] == ["y1"]
    assert r["touched"] == ["y1", "y2"]
    assert r["kept"] == {"y2": "y1", "y3": "y2", "y4": "y3"}
    assert out.table == load("dup7")
    assert _rows(out.t_table) == _rows(load("dup7_compressed"))
    assert verify_against_batch(out)["equal"]


def test_deleted_rows_table():
    s = add_objects(build_state(load("dup6")), load("incoming4"))
    assert s.table.select(["x1", "x2", "x3"]) == load("dup10_deleted3")


def test_delete_nothing_is_noop(base8):
    s = build_state(base8)
    out = delete_objects(s, [])
    assert out == s and out.report["cancelled"] == []


def test_update_errors(base8):
    s = build_state(base8)
    with pytest.raises(StateError):
        delete_attributes(s, ["zz"])
    with pytest.raises(StateError):
        delete_attributes(s, list(base8.attributes))
    with pytest.raises(StateError):
        delete_objects(s, ["x99"])
    with pytest.raises(StateError):
        delete_objects(s, list(base8.objects))
    with pytest.raises(StateError):
        add_objects(s, base8.select(["x1"]))
    with pytest.raises(StateError):
        add_objects(s, load("incoming4"))


def test_non_covering_threshold(demo6):
    with pytest.raises(StateError):
        build_state(demo6, (2, 1, 1, 1))
    with pytest.warns(UserWarning):
        s = build_state(demo6, (2, 1, 1, 1), lax=True)
    assert verify_against_batch(s)["equal"]


def test_save_load_round_trip():
    s = add_objects(build_state(load("dup6")), load("incoming4"))
    again = load_state(save_state(s))
    assert again == s
    assert save_state(again) == save_state(s)


def test_load_rejects_other_versions_and_garbage(base8):
    data = json.loads(save_state(build_state(base8)))
    data["version"] = STATE_VERSION + 1
    with pytest.raises(StateError, match="version"):
        load_state(json.dumps(data))
    with pytest.raises(StateError):
        load_state("{not json")
    with pytest.raises(StateError):
        load_state("[]")
    data["version"] = STATE_VERSION
    del data["joint"]
    with pytest.raises(StateError):
        load_state(json.dumps(data))


def test_verify_detects_tampering(base8):
    data = json.loads(save_state(build_state(base8)))
    data["joint"] = [list(base8.objects)]
    report = verify_against_batch(load_state(json.dumps(data)))
    assert not report["equal"] and not report["checks"]["joint"]


# -- random edit sequences ------------------------------------------------

@pytest.mark.parametrize("lax", [False, True])
def test_random_edit_sequences_match_batch(lax):
    rng = random.Random(41 + lax)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(40):
            t = random_table(rng)
            h = tuple(rng.randint(1, 2) for _ in t.attributes) if lax else None
            state = build_state(t, h, lax=lax)
            for step in range(rng.randint(1, 6)):
                state = random_edit(rng, state, step)
                assert verify_against_batch(state)["equal"], state.report
                assert state.t_table == compress_table(state.table)[1]
                assert load_state(save_state(state)) == state


def test_add_then_delete_attribute_restores(base8):
    s = build_state(base8)
    back = delete_attributes(add_attributes(s, load("base8_a5_column")), ["a5"])
    assert back.table == base8
    assert back.joint == s.joint and back.image == s.image
    assert drop_columns(back.table, ["a4"]) == drop_columns(base8, ["a4"])
