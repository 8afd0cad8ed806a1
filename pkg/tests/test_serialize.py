from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conesheaf import serialize as S
from conesheaf.errors import InputError, InvalidGroup
from conesheaf.groups import small_groups
from conesheaf.matstar import diagonal_partition, random_unitary
from conesheaf.piecewise import ks18_system

from conftest import ex4to3, facecone, fixture_path
from test_finspace import cones


@given(cones())
def test_cone_round_trip(cone):
    assert S.cone_from_json(json.loads(S.dumps(S.cone_to_json(cone)))) == cone


def test_fixture_cones_load():
    assert S.cone_from_json(S.read_json(fixture_path("ex4to3.json"))[0]) == ex4to3()
    assert S.cone_from_json(S.read_json(fixture_path("facecone.json"))[0]) == facecone()


def test_schema_header():
    doc = S.cone_to_json(ex4to3())
    del doc["schema"]
    assert S.cone_from_json(doc) == ex4to3()
    doc["schema"] = "conesheaf/0"
    with pytest.raises(InputError):
        S.cone_from_json(doc)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("apex"),
        lambda d: d["legs"][0].update(codomain="nowhere"),
        lambda d: d["legs"][0]["map"].pop("0"),
        lambda d: d["legs"][0]["map"].update({"0": "zz"}),
        lambda d: d["apex"].update(points=["0", "0"]),
    ],
)
def test_malformed_cones(mutate):
    doc = S.cone_to_json(ex4to3())
    mutate(doc)
    with pytest.raises(InputError):
        S.cone_from_json(doc)


def test_read_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        S.read_json(bad)
    with pytest.raises(InputError):
        S.read_json(tmp_path / "missing.json")


def test_matrix_round_trip():
    m = random_unitary(np.random.default_rng(0), 3)
    assert np.array_equal(S.matrix_from_json(S.matrix_to_json(m)), m)
    with pytest.raises(InputError):
        S.matrix_from_json({"dim": 2, "entries": [[[1, 0]]]})
    with pytest.raises(InputError):
        S.matrix_from_json({"dim": 1, "entries": [[[1]]]})


def test_pou_round_trip():
    c = ex4to3()
    Y = c.legs[0].codomain
    p = diagonal_partition(Y, ["01", "2", "2"], random_unitary(np.random.default_rng(1), 3))
    q = S.pou_from_json(S.pou_to_json(p), {Y.name: Y})
    assert np.array_equal(q.stack, p.stack)


def test_group_round_trip_and_errors():
    for g in small_groups().values():
        assert S.group_from_json(S.group_to_json(g)) == g
    with pytest.raises(InvalidGroup):
        S.group_from_json({"order": 2, "table": [[0, 1], [1, 1]]})
    with pytest.raises(InputError):
        S.group_from_json({"order": 3, "table": [[0, 1], [1, 0]]})


def test_rays_round_trip():
    s = ks18_system()
    t = S.rays_from_json(S.rays_to_json(s))
    assert t.bases == s.bases
    assert max(np.max(np.abs(a - b)) for a, b in zip(s.rays, t.rays)) < 1e-12


def test_quotient_round_trip():
    from conftest import merge12

    h = merge12(ex4to3().apex)
    assert S.quotient_from_json(S.quotient_to_json(h), h.domain) == h


@given(st.dictionaries(st.text(max_size=3), st.integers(), max_size=4))
def test_dumps_sorted_and_stable(d):
    text = S.dumps(d)
    assert text.endswith("\n")
    assert list(json.loads(text)) == sorted(d)
    assert S.dumps(json.loads(text)) == text
