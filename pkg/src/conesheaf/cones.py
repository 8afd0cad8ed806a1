"""Classification of cones: effective-monic, Mal'cev, locally injective, directed.

Also hosts the refinement search (does some cone of a given class on the
codomain of ``h`` factor through the input cone?) and the guaranteed
commutativity classifier, which combines a directedness certificate with a
matrix-valued counterexample search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from ._parallel import first_true
from .errors import ArityError, NotEffectiveMonic, SearchBudgetExceeded
from .finspace import (
    DEFAULT_NODE_BUDGET,
    Cone,
    FinMap,
    FinSpace,
    canonical_map_to_families,
    enumerate_compatible_families,
    factorization,
    factors_through,
    identity,
    is_jointly_injective,
    set_partitions,
    tupling,
)

YES, NO, BUDGET = "YES", "NO", "BUDGET"
DIRECTED, NOT_DIRECTED, UNKNOWN = "DIRECTED", "NOT_DIRECTED", "UNKNOWN"
GUARANTEED, REFUTED = "GUARANTEED", "REFUTED"

# exact directedness decisions are only claimed inside these bounds
DIRECTED_MAX_LEGS = 4
DIRECTED_MAX_CODOMAIN = 5


@dataclass(frozen=True)
class ConeVerdict:
    effective_monic: str
    witness: tuple[str, ...] | None = None
    # "missing": compatible family hit by no apex point; "duplicated": hit by several
    witness_kind: str | None = None
    witness_points: tuple[str, ...] = ()
    n_families: int | None = None
    n_points: int = 0
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.effective_monic == YES


def is_effective_monic(cone: Cone, budget: int = DEFAULT_NODE_BUDGET) -> ConeVerdict:
    """Decide the point-level sheaf condition on ``cone``."""
    canon = canonical_map_to_families(cone)
    try:
        families = enumerate_compatible_families(cone, budget)
    except SearchBudgetExceeded as exc:
        return ConeVerdict(BUDGET, n_points=len(cone.apex), nodes=exc.nodes)

    preimages: dict[tuple[str, ...], list[str]] = {}
    for x, fam in canon.items():
        preimages.setdefault(fam, []).append(x)
    for fam in families:
        pts = preimages.get(fam, [])
        if len(pts) != 1:
            kind = "missing" if not pts else "duplicated"
            return ConeVerdict(
                NO, fam, kind, tuple(pts), len(families), len(cone.apex)
            )
    # every apex family is compatible, so a bijection remains
    return ConeVerdict(YES, None, None, (), len(families), len(cone.apex))


def malcev_check(cone: Cone) -> bool:
    """Joint injectivity plus the Mal'cev closure of the joint image (two legs only)."""
    if len(cone.legs) != 2:
        raise ArityError(f"Mal'cev check needs exactly 2 legs, got {len(cone.legs)}")
    if not is_jointly_injective(cone):
        return False
    f, g = cone.legs
    rel = set(zip(f.images, g.images))
    by_z: dict[str, set[str]] = {}
    by_y: dict[str, set[str]] = {}
    for y, z in rel:
        by_z.setdefault(z, set()).add(y)
        by_y.setdefault(y, set()).add(z)
    for y, z in rel:
        for y2 in by_z[z]:
            for z2 in by_y[y]:
                if (y2, z2) not in rel:
                    return False
    return True


def is_locally_injective(cone: Cone) -> bool:
    """Every apex point is the only point of its fiber under some leg."""
    for k in range(len(cone.apex)):
        if not any(leg.codes.count(leg.codes[k]) == 1 for leg in cone.legs):
            return False
    return True


# --- directedness -----------------------------------------------------------


@dataclass(frozen=True)
class DirectednessVerdict:
    status: str
    # per leg, the witness cone on that leg's codomain (quotient maps)
    witness: tuple[tuple[FinMap, ...], ...] | None = None
    exhaustive: bool = False
    nodes: int = 0
    reason: str = ""


def _saturated_subsets(leg: FinMap) -> list[frozenset[int]]:
    """Nontrivial bipartitions of im(leg), pulled back to subsets of apex indices.

    Each bipartition is listed once, by the side not containing the least
    image point.
    """
    img = sorted(set(leg.codes))
    out = []
    if len(img) < 2:
        return out
    rest = img[1:]
    for r in range(1, len(rest) + 1):
        for chosen in itertools.combinations(rest, r):
            cs = set(chosen)
            out.append(frozenset(k for k, c in enumerate(leg.codes) if c in cs))
    return out


def _union_of_fibers(subset: frozenset[int], leg: FinMap) -> bool:
    inside: dict[int, bool] = {}
    for k, c in enumerate(leg.codes):
        if inside.setdefault(c, k in subset) != (k in subset):
            return False
    return True


def _bipartition_map(leg: FinMap, subset: frozenset[int]) -> FinMap:
    """The quotient map ``Y -> {0,1}`` sending ``leg(subset)`` to 1 and the rest to 0."""
    ones = {leg.images[k] for k in subset}
    two = FinSpace("2", ("0", "1"))
    return FinMap(leg.codomain, two, tuple("1" if y in ones else "0" for y in leg.codomain))


def _singleton_map(space: FinSpace, y: str) -> FinMap:
    two = FinSpace("2", ("0", "1"))
    return FinMap(space, two, tuple("1" if p == y else "0" for p in space))


def _identity_witness(cone: Cone) -> bool:
    legs = cone.legs
    for i, j in itertools.combinations_with_replacement(range(len(legs)), 2):
        if not any(
            factors_through(legs[i], fk) and factors_through(legs[j], fk) for fk in legs
        ):
            return False
    return True


def is_directed(
    cone: Cone,
    max_legs: int = DIRECTED_MAX_LEGS,
    max_codomain: int = DIRECTED_MAX_CODOMAIN,
    budget: int = 10**6,
) -> DirectednessVerdict:
    """Search for directedness witnesses, restricted to quotient maps of the codomains.

    Witness cones may be taken to consist of maps to a two-point space: any
    separating family of quotient maps coarsens to such maps without losing
    separation or the factorization squares.  The decision procedure is a
    clique search: pick, for each pair of distinct image points of each leg, a
    bipartition separating them, such that every two chosen bipartitions
    (pulled back to the apex) factor through a common leg.

    NOT_DIRECTED is reported only inside the exactness bounds; outside them a
    failed search is UNKNOWN.
    """
    legs = cone.legs
    in_bounds = len(legs) <= max_legs and all(len(leg.codomain) <= max_codomain for leg in legs)

    if _identity_witness(cone):
        wit = tuple((identity(leg.codomain),) for leg in legs)
        return DirectednessVerdict(DIRECTED, wit, exhaustive=True, reason="identity witnesses")

    # candidate nodes (leg index, subset of apex indices)
    nodes: list[tuple[int, frozenset[int]]] = []
    for i, leg in enumerate(legs):
        nodes.extend((i, s) for s in _saturated_subsets(leg))

    compat_cache: dict[tuple[frozenset[int], frozenset[int]], bool] = {}

    def compatible(s: frozenset[int], t: frozenset[int]) -> bool:
        key = (s, t) if hash(s) <= hash(t) else (t, s)
        if key not in compat_cache:
            compat_cache[key] = any(
                _union_of_fibers(s, fk) and _union_of_fibers(t, fk) for fk in legs
            )
        return compat_cache[key]

    # separation requirements: (leg, y, y') for distinct image points
    reqs: list[tuple[int, int, int]] = []
    for i, leg in enumerate(legs):
        img = sorted(set(leg.codes))
        reqs.extend((i, a, b) for a, b in itertools.combinations(img, 2))

    def separates(node, req) -> bool:
        i, s = node
        j, a, b = req
        if i != j:
            return False
        leg = legs[i]
        ka = leg.codes.index(a)
        kb = leg.codes.index(b)
        return (ka in s) != (kb in s)

    candidates = [[n for n in nodes if separates(n, r)] for r in reqs]
    count = 0
    chosen: list[tuple[int, frozenset[int]]] = []

    def satisfied(req) -> bool:
        return any(separates(n, req) for n in chosen)

    def search(r: int) -> bool:
        nonlocal count
        while r < len(reqs) and satisfied(reqs[r]):
            r += 1
        if r == len(reqs):
            return True
        for node in candidates[r]:
            count += 1
            if count > budget:
                raise SearchBudgetExceeded("directedness search budget exhausted", count)
            if all(compatible(node[1], c[1]) for c in chosen):
                chosen.append(node)
                if search(r + 1):
                    return True
                chosen.pop()
        return False

    try:
        found = search(0)
    except SearchBudgetExceeded:
        return DirectednessVerdict(UNKNOWN, nodes=count, reason="search budget exhausted")

    if found:
        wit = []
        for i, leg in enumerate(legs):
            maps = [_bipartition_map(leg, s) for j, s in chosen if j == i]
            img = set(leg.images)
            maps.extend(_singleton_map(leg.codomain, y) for y in leg.codomain if y not in img)
            wit.append(tuple(maps))
        return DirectednessVerdict(DIRECTED, tuple(wit), exhaustive=True, nodes=count)
    if in_bounds:
        return DirectednessVerdict(NOT_DIRECTED, exhaustive=True, nodes=count)
    return DirectednessVerdict(UNKNOWN, nodes=count, reason="outside exact-decision bounds")


def verify_directed_witness(cone: Cone, witness: Sequence[Sequence[FinMap]]) -> bool:
    """Independent re-check of a directedness witness by direct enumeration."""
    legs = cone.legs
    if len(witness) != len(legs):
        return False
    for leg, wcone in zip(legs, witness):
        if any(g.domain != leg.codomain for g in wcone):
            return False
        for a, b in itertools.combinations(leg.codomain.points, 2):
            if not any(g(a) != g(b) for g in wcone):
                return False
    flat = [(i, g) for i, wcone in enumerate(witness) for g in wcone]
    for (i, g), (j, g2) in itertools.product(flat, repeat=2):
        gi = FinMap(cone.apex, g.codomain, tuple(g(y) for y in legs[i].images))
        gj = FinMap(cone.apex, g2.codomain, tuple(g2(y) for y in legs[j].images))
        ok = False
        for fk in legs:
            m1, m2 = factorization(gi, fk), factorization(gj, fk)
            if m1 is not None and m2 is not None:
                ok = True
                break
        if not ok:
            return False
    return True


# --- tupling closure --------------------------------------------------------


def tupling_closure(cone: Cone, max_arity: int) -> Cone:
    """All tuplings of up to ``max_arity`` distinct legs (in index order), deduplicated."""
    if max_arity < 1:
        raise ValueError("max_arity must be at least 1")
    out: list[FinMap] = []
    seen: set[FinMap] = set()
    n = len(cone.legs)
    for r in range(1, min(max_arity, n) + 1):
        for idx in itertools.combinations(range(n), r):
            leg = cone.legs[idx[0]] if r == 1 else tupling([cone.legs[k] for k in idx])
            if leg not in seen:
                seen.add(leg)
                out.append(leg)
    return Cone(cone.apex, tuple(out))


# --- refinement search ------------------------------------------------------


@dataclass
class RefinementReport:
    status: str  # FOUND, SELF, NONE, BUDGET
    requested: str
    witness: Cone | None = None
    admissible_partitions: list[list[list[str]]] = field(default_factory=list)
    subsets_checked: int = 0
    bounds: dict = field(default_factory=dict)


def _is_identity(h: FinMap) -> bool:
    return h.domain == h.codomain and h.images == h.domain.points


def _cone_is_of_class(cone: Cone, requested: str, budget: int) -> bool:
    if not is_effective_monic(cone, budget):
        return False
    if requested == "directed":
        return is_directed(cone).status == DIRECTED
    return True


def search_refinement(
    cone: Cone,
    h: FinMap,
    max_codomain: int = 4,
    max_legs: int = 6,
    requested: str = "effective_monic",
    budget: int = DEFAULT_NODE_BUDGET,
    jobs: int = 1,
    max_candidates: int = 10**6,
) -> RefinementReport:
    """Look for a cone ``{k_i}`` on ``h.codomain`` whose every ``k_i . h`` factors through a leg.

    Cones are searched up to isomorphism: a leg only matters through the
    partition it induces on its domain (points off the image never occur in
    a compatible family, and repeated legs add no constraint), so candidates
    are sets of at most ``max_legs`` partitions of ``h.codomain`` with at most
    ``max_codomain`` blocks.
    """
    if requested not in ("effective_monic", "directed"):
        raise ValueError("requested must be 'effective_monic' or 'directed'")
    bounds = {"max_codomain": max_codomain, "max_legs": max_legs}
    if h.domain != cone.apex:
        raise ValueError("h must start at the apex of the cone")
    if _is_identity(h) and _cone_is_of_class(cone, requested, budget):
        return RefinementReport("SELF", requested, cone, bounds=bounds)

    Xp = h.codomain
    admissible: list[FinMap] = []
    parts: list[list[list[str]]] = []
    for blocks in set_partitions(list(Xp.points)):
        if len(blocks) > max_codomain:
            continue
        labels = ["".join(b) if all(len(p) == 1 for p in b) else "|".join(b) for b in blocks]
        target = FinSpace(f"Q{len(parts)}", labels)
        lookup = {p: labels[n] for n, b in enumerate(blocks) for p in b}
        k = FinMap(Xp, target, tuple(lookup[p] for p in Xp))
        kh = FinMap(cone.apex, target, tuple(k(y) for y in h.images))
        if any(factors_through(kh, f) for f in cone.legs):
            admissible.append(k)
            parts.append([list(b) for b in blocks])

    total = sum(math.comb(len(admissible), r) for r in range(0, max_legs + 1))
    if total > max_candidates:
        return RefinementReport("BUDGET", requested, None, parts, 0, bounds)
    subsets = [
        combo
        for r in range(0, max_legs + 1)
        for combo in itertools.combinations(range(len(admissible)), r)
    ]

    def check(combo) -> bool:
        cand = Cone(Xp, tuple(admissible[k] for k in combo))
        return _cone_is_of_class(cand, requested, budget)

    hit = first_true(check, subsets, jobs)
    if hit is None:
        return RefinementReport("NONE", requested, None, parts, len(subsets), bounds)
    combo = subsets[hit]
    witness = Cone(Xp, tuple(admissible[k] for k in combo))
    return RefinementReport("FOUND", requested, witness, parts, hit + 1, bounds)


# --- guaranteed commutativity -----------------------------------------------


@dataclass
class GuaranteeVerdict:
    status: str
    directedness: DirectednessVerdict | None = None
    witness: object = None  # matstar.NoncommutingWitness
    searched: list[dict] = field(default_factory=list)


def classify_guarantee(
    cone: Cone,
    dims: Sequence[int] = (2, 3),
    trials: int = 10**4,
    seed: int = 0,
    jobs: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
) -> GuaranteeVerdict:
    """GUARANTEED via a directedness certificate, REFUTED via a matrix witness, else UNKNOWN."""
    from .matstar import search_noncommuting_family

    em = is_effective_monic(cone, budget)
    if em.effective_monic != YES:
        raise NotEffectiveMonic(f"cone is not effective-monic ({em.effective_monic})")
    dv = is_directed(cone)
    if dv.status == DIRECTED:
        return GuaranteeVerdict(GUARANTEED, dv)
    searched = []
    for n in dims:
        wit = search_noncommuting_family(cone, n, trials, seed, jobs=jobs, budget=budget)
        searched.append({"dim": n, "trials": trials, "seed": seed, "found": wit is not None})
        if wit is not None:
            return GuaranteeVerdict(REFUTED, dv, wit, searched)
    return GuaranteeVerdict(UNKNOWN, dv, None, searched)
