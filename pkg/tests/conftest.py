from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from conesheaf.finspace import FinMap, FinSpace, cone_from_dicts, pushforward, product_space

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(str(resources.files("conesheaf") / "fixtures"))


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def ex4to3():
    X = FinSpace("X", ("0", "1", "2", "3"))
    Y = FinSpace("Y", ("01", "2", "3"))
    Z = FinSpace("Z", ("0", "1", "23"))
    return cone_from_dicts(
        X,
        [(Y, {"0": "01", "1": "01", "2": "2", "3": "3"}), (Z, {"0": "0", "1": "1", "2": "23", "3": "23"})],
    )


def merge12(apex: FinSpace) -> FinMap:
    Xp = FinSpace("Xp", ("0", "12", "3"))
    return FinMap.from_dict(apex, Xp, {"0": "0", "1": "12", "2": "12", "3": "3"})


def ex4to3_pushed():
    c = ex4to3()
    return pushforward(c, merge12(c.apex))


def three_surjections():
    X = FinSpace("X", ("0", "1", "2"))
    legs = []
    for k in range(3):
        legs.append((FinSpace(f"Y{k}", ("0", "1")), {p: "1" if int(p) == k else "0" for p in X.points}))
    return cone_from_dicts(X, legs)


def facecone():
    bit = FinSpace("bit", ("0", "1"))
    cube = product_space([bit, bit, bit], "cube")
    sq = FinSpace("sq", ("00", "01", "10", "11"))
    legs = [(sq, {p: p[1 + 2 * i] + p[1 + 2 * j] for p in cube.points}) for i, j in ((0, 1), (0, 2), (1, 2))]
    return cone_from_dicts(cube, legs)


def digit_sum(apex: FinSpace) -> FinMap:
    D = FinSpace("D", ("0", "1", "2", "3"))
    return FinMap.from_dict(apex, D, {p: str(sum(int(c) for c in p if c in "01")) for p in apex.points})


def product_cone():
    two = FinSpace("T", ("0", "1"))
    sq = product_space([two, two], "P")
    return cone_from_dicts(sq, [(two, {p: p[1] for p in sq.points}), (two, {p: p[3] for p in sq.points})])


@pytest.fixture
def cone_ex4to3():
    return ex4to3()
