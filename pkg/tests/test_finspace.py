from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conesheaf.errors import CompositionMismatch, SearchBudgetExceeded
from conesheaf.finspace import (
    Cone,
    FinMap,
    FinSpace,
    Quotient,
    all_maps,
    canonical_map_to_families,
    compose,
    enumerate_compatible_families,
    factorization,
    factors_through,
    identity,
    is_compatible_family,
    is_jointly_injective,
    pushout,
    set_partitions,
    tupling,
)

from conftest import ex4to3, three_surjections


def sp(n: int, name: str | None = None) -> FinSpace:
    return FinSpace.of_size(n, name)


@st.composite
def finmaps(draw, max_dom=4, max_cod=4, domain=None):
    dom = domain if domain is not None else sp(draw(st.integers(0, max_dom)), "D")
    cod = sp(draw(st.integers(1, max_cod)), "C")
    imgs = draw(st.lists(st.sampled_from(cod.points), min_size=len(dom), max_size=len(dom)))
    return FinMap(dom, cod, tuple(imgs))


@st.composite
def cones(draw, max_apex=4, max_legs=3, max_cod=3):
    apex = sp(draw(st.integers(1, max_apex)), "X")
    k = draw(st.integers(1, max_legs))
    legs = []
    for i in range(k):
        f = draw(finmaps(max_cod=max_cod, domain=apex))
        cod = FinSpace(f"C{i}", f.codomain.points)
        legs.append(FinMap(apex, cod, f.images))
    return Cone(apex, tuple(legs))


def brute_families(cone: Cone) -> list[tuple[str, ...]]:
    return sorted(
        fam
        for fam in itertools.product(*(leg.codomain.points for leg in cone.legs))
        if is_compatible_family(cone, fam)
    )


# --- spaces and maps --------------------------------------------------------


def test_space_sorts_and_rejects_duplicates():
    assert FinSpace("S", ("b", "a")).points == ("a", "b")
    with pytest.raises(ValueError):
        FinSpace("S", ("a", "a"))


def test_map_validation():
    X, Y = sp(2), sp(1, "Y")
    with pytest.raises(ValueError):
        FinMap(X, Y, ("0",))
    with pytest.raises(ValueError):
        FinMap(X, Y, ("0", "7"))
    with pytest.raises(ValueError):
        FinMap.from_dict(X, Y, {"0": "0"})


def test_compose_identity():
    f = FinMap(sp(3), sp(2, "Y"), ("0", "1", "1"))
    assert compose(identity(f.domain), f) == f
    assert compose(f, identity(f.codomain)) == f


def test_compose_constant():
    X, A, PQ = sp(2), FinSpace("A", ("a",)), FinSpace("PQ", ("p", "q"))
    f = FinMap(X, A, ("a", "a"))
    g = FinMap.from_dict(A, PQ, {"a": "p"})
    assert compose(f, g).images == ("p", "p")


def test_compose_mismatch():
    f = FinMap(sp(2), sp(2, "Y"), ("0", "1"))
    g = FinMap(sp(3, "Z"), sp(1), ("0", "0", "0"))
    with pytest.raises(CompositionMismatch):
        compose(f, g)


def test_compose_associative_exhaustive():
    spaces = [sp(n, f"S{n}") for n in (1, 2, 3)]
    for A, B, C, D in itertools.product(spaces, repeat=4):
        if len(A) * len(B) * len(C) * len(D) > 36:
            continue
        for f in all_maps(A, B):
            for g in all_maps(B, C):
                fg = compose(f, g)
                for h in all_maps(C, D):
                    assert compose(fg, h) == compose(f, compose(g, h))


@given(finmaps(), finmaps())
def test_factorization_property(g, f):
    if f.domain != g.domain:
        f = FinMap(g.domain, f.codomain, tuple(f.codomain.points[0] for _ in g.domain))
    m = factorization(g, f)
    assert (m is not None) == factors_through(g, f)
    if m is not None:
        assert compose(f, m) == g


def test_kernel_and_fibers():
    f = FinMap(sp(4), sp(2, "Y"), ("0", "1", "0", "0"))
    assert f.kernel() == ((0, 2, 3), (1,))
    assert f.fiber("0") == ("0", "2", "3")
    assert not f.is_injective() and f.is_surjective()


def test_quotient_blocks():
    q = Quotient.from_blocks(sp(3), [["2", "0"], ["1"]])
    assert q.classes == (("0", "2"), ("1",))
    assert q.quotient_map().images == ("0", "1", "0")
    with pytest.raises(ValueError):
        Quotient.from_blocks(sp(3), [["0"], ["1"]])


def test_set_partitions_bell_numbers():
    assert [sum(1 for _ in set_partitions(list(range(n)))) for n in range(6)] == [1, 1, 2, 5, 15, 52]


# --- pushouts ---------------------------------------------------------------


def test_pushout_identity():
    X = sp(3)
    po = pushout(identity(X), identity(X))
    assert len(po.space) == 3
    assert po.inj_left.is_injective() and po.inj_left.is_surjective()
    assert po.inj_right.is_injective() and po.inj_right.is_surjective()


def test_pushout_two_surjections_is_a_point():
    c = three_surjections()
    f, g = c.legs[0], c.legs[1]
    assert len(pushout(f, g).space) == 1


def test_pushout_ex4to3_classes():
    f, g = ex4to3().legs
    po = pushout(f, g)
    assert len(po.space) == 2
    blocks = sorted(sorted(label for _, label in cls) for cls in po.classes)
    assert blocks == [["0", "01", "1"], ["2", "23", "3"]]


@given(finmaps(max_dom=4), st.data())
def test_pushout_commutes_and_is_symmetric(f, data):
    g = data.draw(finmaps(domain=f.domain))
    po = pushout(f, g)
    assert compose(f, po.inj_left) == compose(g, po.inj_right)
    swapped = pushout(g, f)
    assert len(swapped.space) == len(po.space)
    # the relabeling class -> class is a bijection swapping the injections
    rel = {}
    for y in f.codomain:
        rel.setdefault(po.inj_left(y), set()).add(swapped.inj_right(y))
    for z in g.codomain:
        rel.setdefault(po.inj_right(z), set()).add(swapped.inj_left(z))
    assert all(len(v) == 1 for v in rel.values())
    assert len({next(iter(v)) for v in rel.values()}) == len(rel)


@given(finmaps(max_dom=4), st.data())
def test_pushout_universal_on_small_targets(f, data):
    g = data.draw(finmaps(domain=f.domain))
    po = pushout(f, g)
    T = sp(2, "T")
    # every cocone (a, b) with af = bg factors uniquely through the pushout
    for a in all_maps(f.codomain, T):
        for b in all_maps(g.codomain, T):
            if compose(f, a) != compose(g, b):
                continue
            ms = [
                m
                for m in all_maps(po.space, T)
                if compose(po.inj_left, m) == a and compose(po.inj_right, m) == b
            ]
            assert len(ms) == 1


# --- compatible families ----------------------------------------------------


def test_three_surjections_have_eight_families():
    assert len(enumerate_compatible_families(three_surjections())) == 8


def test_identity_cone_families():
    X = sp(4)
    c = Cone(X, (identity(X),))
    assert enumerate_compatible_families(c) == [(x,) for x in X]
    assert canonical_map_to_families(c)["2"] == ("2",)


def test_ex4to3_families_match_apex():
    c = ex4to3()
    fams = enumerate_compatible_families(c)
    assert len(fams) == 4
    assert sorted(fams) == sorted(canonical_map_to_families(c).values())
    assert canonical_map_to_families(c)["0"] == ("01", "0")


def test_family_budget():
    with pytest.raises(SearchBudgetExceeded):
        enumerate_compatible_families(three_surjections(), budget=2)


@given(cones())
def test_families_match_brute_force(cone):
    assert enumerate_compatible_families(cone) == brute_families(cone)


def test_joint_injectivity_examples():
    X = sp(4)
    assert is_jointly_injective(Cone(X, (identity(X),)))
    assert is_jointly_injective(ex4to3())
    two = sp(2)
    assert not is_jointly_injective(Cone(two, (FinMap(two, sp(1, "P"), ("0", "0")),)))


def test_separation_iff_distinct_families_exhaustive():
    for n in range(1, 5):
        X = sp(n)
        for f in all_maps(X, sp(2, "A")):
            for g in all_maps(X, sp(2, "B")):
                c = Cone(X, (f, g))
                fams = canonical_map_to_families(c)
                separates = all(
                    any(leg(x) != leg(y) for leg in c.legs) for x, y in itertools.combinations(X, 2)
                )
                assert separates == (len(set(fams.values())) == n)


def test_tupling():
    f, g = ex4to3().legs
    t = tupling([f, g])
    assert t("0") == "(01,0)"
    assert len(t.codomain) == 9
