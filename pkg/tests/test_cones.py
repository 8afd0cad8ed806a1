from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conesheaf import cones
from conesheaf.errors import ArityError, NotEffectiveMonic
from conesheaf.finspace import (
    Cone,
    FinMap,
    FinSpace,
    all_maps,
    canonical_map_to_families,
    enumerate_compatible_families,
    identity,
    is_jointly_injective,
    product_space,
    tupling,
)

from conftest import digit_sum, ex4to3, ex4to3_pushed, facecone, merge12, product_cone, three_surjections
from test_finspace import cones as cone_strategy


def sp(n, name=None):
    return FinSpace.of_size(n, name)


# --- effective-monic, Mal'cev, local injectivity ----------------------------


def test_ex4to3_effective_monic():
    v = cones.is_effective_monic(ex4to3())
    assert v.effective_monic == cones.YES
    assert v.n_families == 4


def test_pushed_cone_not_effective_monic_with_witness():
    v = cones.is_effective_monic(ex4to3_pushed())
    assert v.effective_monic == cones.NO
    assert v.witness == ("3", "0")
    assert v.witness_kind == "missing"
    assert (v.n_families, v.n_points) == (4, 3)


def test_three_surjections():
    c = three_surjections()
    v = cones.is_effective_monic(c)
    assert v.effective_monic == cones.NO
    assert (v.n_families, v.n_points) == (8, 3)
    assert cones.is_locally_injective(c)


def test_effective_monic_budget():
    v = cones.is_effective_monic(three_surjections(), budget=1)
    assert v.effective_monic == cones.BUDGET


def test_malcev_examples():
    assert cones.malcev_check(product_cone())
    assert cones.malcev_check(ex4to3())
    assert not cones.malcev_check(ex4to3_pushed())
    with pytest.raises(ArityError):
        cones.malcev_check(three_surjections())


def test_local_injectivity_examples():
    assert not cones.is_locally_injective(ex4to3_pushed())
    X = sp(3)
    assert cones.is_locally_injective(Cone(X, (identity(X), FinMap(X, sp(1, "P"), ("0",) * 3))))


def test_malcev_matches_effective_monic_exhaustive():
    mismatches = 0
    for nx, ny, nz in itertools.product((1, 2, 3), repeat=3):
        X, Y, Z = sp(nx, "X"), sp(ny, "Y"), sp(nz, "Z")
        for f in all_maps(X, Y):
            for g in all_maps(X, Z):
                c = Cone(X, (f, g))
                em = cones.is_effective_monic(c).effective_monic == cones.YES
                mismatches += em != cones.malcev_check(c)
    assert mismatches == 0


@given(cone_strategy())
def test_effective_monic_invariants(cone):
    v = cones.is_effective_monic(cone)
    if v.effective_monic == cones.YES:
        assert len(enumerate_compatible_families(cone)) == len(cone.apex)
        fams = canonical_map_to_families(cone)
        assert len(set(fams.values())) == len(fams)
        assert is_jointly_injective(cone)
    else:
        assert v.witness is not None


# --- directedness -----------------------------------------------------------


def test_facecone_directed_with_verified_witness():
    c = facecone()
    v = cones.is_directed(c)
    assert v.status == cones.DIRECTED
    assert cones.verify_directed_witness(c, v.witness)


def test_ex4to3_not_directed():
    v = cones.is_directed(ex4to3())
    assert v.status == cones.NOT_DIRECTED and v.exhaustive


def test_directed_unknown_outside_bounds():
    v = cones.is_directed(ex4to3(), max_codomain=2)
    assert v.status == cones.UNKNOWN


def test_tupling_closure_directed_with_identity_witness():
    c = cones.tupling_closure(ex4to3(), 2)
    assert tupling(list(ex4to3().legs)).kernel() in {leg.kernel() for leg in c.legs}
    v = cones.is_directed(c)
    assert v.status == cones.DIRECTED
    assert all(len(w) == 1 and w[0].is_injective() for w in v.witness)


def test_tupling_closure_arity_one_is_original():
    c = ex4to3()
    assert cones.tupling_closure(c, 1).legs == c.legs


def test_tupling_closure_preserves_effective_monic_exhaustive():
    for nx in (1, 2, 3):
        X = sp(nx, "X")
        for ny, nz in itertools.product((1, 2, 3), repeat=2):
            for f in all_maps(X, sp(ny, "Y")):
                for g in all_maps(X, sp(nz, "Z")):
                    c = Cone(X, (f, g))
                    if cones.is_effective_monic(c).effective_monic != cones.YES:
                        continue
                    t = cones.tupling_closure(c, 2)
                    assert cones.is_effective_monic(t).effective_monic == cones.YES
                    assert cones.is_directed(t).status == cones.DIRECTED


@given(cone_strategy(max_apex=4, max_legs=3, max_cod=3))
def test_directed_witnesses_reverify(cone):
    v = cones.is_directed(cone)
    if v.status == cones.DIRECTED:
        assert cones.verify_directed_witness(cone, v.witness)


def test_verify_rejects_non_separating_witness():
    c = facecone()
    bad = [(FinMap(leg.codomain, sp(1, "P"), ("0",) * len(leg.codomain)),) for leg in c.legs]
    assert not cones.verify_directed_witness(c, bad)


# --- refinement -------------------------------------------------------------


def test_refinement_ex4to3_none():
    c = ex4to3()
    r = cones.search_refinement(c, merge12(c.apex), max_codomain=4, max_legs=6)
    assert r.status == "NONE"
    assert r.subsets_checked > 0


def test_refinement_facecone_digit_sum_none():
    c = facecone()
    r = cones.search_refinement(c, digit_sum(c.apex), max_codomain=4, max_legs=6)
    assert r.status == "NONE"
    # every admissible leg is constant: a single block
    assert all(len(p) == 1 for p in r.admissible_partitions)


def test_refinement_identity_self():
    c = ex4to3()
    r = cones.search_refinement(c, identity(c.apex))
    assert r.status == "SELF" and r.witness == c


def test_refinement_found_for_injective_h():
    # an injective relabelling admits the pushed cone itself as refinement
    c = ex4to3()
    Xr = FinSpace("Xr", ("a", "b", "c", "d"))
    h = FinMap(c.apex, Xr, ("a", "b", "c", "d"))
    r = cones.search_refinement(c, h)
    assert r.status == "FOUND"
    assert cones.is_effective_monic(r.witness).effective_monic == cones.YES


def test_refinement_candidate_budget():
    # an injective leg makes all 15 partitions of a 4-point target admissible
    c = ex4to3()
    X = c.apex
    c2 = Cone(X, (identity(X),))
    h = FinMap(X, FinSpace("Q", ("a", "b", "c", "d")), ("a", "b", "c", "d"))
    r = cones.search_refinement(c2, h, max_candidates=10)
    assert r.status == "BUDGET"
    assert len(r.admissible_partitions) == 15


def test_refinement_jobs_invariant():
    c = ex4to3()
    Xr = FinSpace("Xr", ("a", "b", "c", "d"))
    h = FinMap(c.apex, Xr, ("a", "b", "c", "d"))
    r1 = cones.search_refinement(c, h, jobs=1)
    r4 = cones.search_refinement(c, h, jobs=4)
    assert (r1.status, r1.witness, r1.subsets_checked) == (r4.status, r4.witness, r4.subsets_checked)


# --- guaranteed commutativity -----------------------------------------------


def test_guarantee_facecone():
    assert cones.classify_guarantee(facecone()).status == cones.GUARANTEED


def test_guarantee_product_cone_refuted():
    v = cones.classify_guarantee(product_cone(), dims=(2,), trials=10)
    assert v.status == cones.REFUTED
    assert v.witness.trial == 0
    assert v.witness.residual > 0.5


def test_guarantee_ex4to3_unknown():
    v = cones.classify_guarantee(ex4to3(), dims=(2,), trials=200)
    assert v.status == cones.UNKNOWN


def test_guarantee_requires_effective_monic():
    with pytest.raises(NotEffectiveMonic):
        cones.classify_guarantee(ex4to3_pushed())


@given(cone_strategy(max_apex=4, max_legs=3, max_cod=3))
def test_directed_cones_never_refuted(cone):
    if cones.is_effective_monic(cone).effective_monic != cones.YES:
        return
    if cones.is_directed(cone).status != cones.DIRECTED:
        return
    from conesheaf.matstar import search_noncommuting_family

    for n in (2, 3):
        assert search_noncommuting_family(cone, n, trials=50, seed=1) is None


def test_directed_product_of_three_never_refuted_many_trials():
    from conesheaf.matstar import search_noncommuting_family

    assert search_noncommuting_family(facecone(), 2, trials=10**4, seed=3, jobs=4) is None


def test_cube_product_space_shape():
    bit = FinSpace("bit", ("0", "1"))
    assert len(product_space([bit] * 3)) == 8


def test_all_maps_to_four_effective_monic():
    F = FinSpace.of_size(4, "4")
    for n in (1, 2, 3):
        X = FinSpace.of_size(n, "X")
        c = Cone(X, tuple(all_maps(X, F)))
        assert len(enumerate_compatible_families(c)) == n
