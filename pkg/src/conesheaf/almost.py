"""Self-actions on matrix algebras and almost *-homomorphisms.

A self-action assigns to each unitary ``v`` a piecewise automorphism
``a(v)``; it must fix exactly the unitaries commuting with ``v`` and be
multiplicative on commuting pairs.  Conjugation ``a(v)(x) = v* x v`` is the
motivating case.  A piecewise *-homomorphism is an almost homomorphism when
it intertwines the conjugation actions of source and target.

All checks are sample-based with seeded streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GeneratorRelationsFail, InputError, NotUnitary, PreconditionFailed
from .matstar import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    dagger,
    derived_rng,
    frob,
    random_normal,
    random_unitary,
    unitarity_residual,
)
from .piecewise import (
    EVIDENCE_NOTE,
    TOL_HOM,
    HomReport,
    PieceMap,
    ViolationWitness,
    commuting_normal_pair,
    verify_piecewise_hom,
)

FIXED_POINT = "FIXED_POINT"
ACTION_MULTIPLICATIVITY = "ACTION_MULTIPLICATIVITY"
ACTION_PIECEWISE = "ACTION_PIECEWISE"
PRESERVES_CONJUGATION = "PRESERVES_CONJUGATION"

# commutator norm below which a sampled "noncommuting" pair is rejected
NONCOMMUTING_MARGIN = 1e-3


@dataclass(frozen=True)
class SelfAction:
    dim: int
    action: Callable[[np.ndarray], PieceMap] = field(compare=False, repr=False)
    builtin: str = "user"

    def __call__(self, nu) -> PieceMap:
        return self.action(np.asarray(nu, dtype=complex))

    @classmethod
    def conjugation(cls, n: int) -> "SelfAction":
        return cls(n, PieceMap.conjugation, "conjugation")

    @classmethod
    def trivial(cls, n: int) -> "SelfAction":
        ident = PieceMap.identity(n)
        return cls(n, lambda nu: ident, "trivial")

    @classmethod
    def user(cls, n: int, fn: Callable[[np.ndarray], PieceMap]) -> "SelfAction":
        return cls(n, fn, "user")


@dataclass(frozen=True)
class ActionWitness:
    kind: str
    operands: tuple[np.ndarray, ...]
    residual: float
    sample: int


@dataclass(frozen=True)
class ActionReport:
    passed: bool
    samples: int
    seed: int
    tol: float
    witness: ActionWitness | None = None
    noncommuting_samples: int = 0
    max_residuals: dict = field(default_factory=dict)
    note: str = EVIDENCE_NOTE

    def __bool__(self) -> bool:
        return self.passed


def _embed(m: np.ndarray, n: int) -> np.ndarray:
    out = np.eye(n, dtype=complex)
    out[: len(m), : len(m)] = m
    return out


def commuting_unitary_pair(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    u = random_unitary(rng, n)
    p1 = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    p2 = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    return (u * p1) @ dagger(u), (u * p2) @ dagger(u)


def noncommuting_unitary_pair(
    rng: np.random.Generator, n: int, tries: int = 100
) -> tuple[np.ndarray, np.ndarray] | None:
    """Haar pair with commutator norm above the margin, by rejection; None in dimension 1."""
    if n < 2:
        return None
    for _ in range(tries):
        nu, tau = random_unitary(rng, n), random_unitary(rng, n)
        if frob(nu @ tau - tau @ nu) > NONCOMMUTING_MARGIN:
            return nu, tau
    return None


def unitary_pair_sample(
    seed: int, k: int, n: int, noncommuting_fraction: float
) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``k`` of the unitary-pair stream.

    Sample 0 is the Pauli pair (``sigma_z``, ``sigma_x``) padded by the
    identity when ``n >= 2``.
    """
    if k == 0 and n >= 2:
        return _embed(SIGMA_Z, n), _embed(SIGMA_X, n)
    rng = derived_rng(seed, k)
    if rng.uniform() < noncommuting_fraction:
        pair = noncommuting_unitary_pair(rng, n)
        if pair is not None:
            return pair
    return commuting_unitary_pair(rng, n)


def verify_self_action(
    a: SelfAction,
    samples: int = 1000,
    seed: int = 0,
    tol: float = TOL_HOM,
    noncommuting_fraction: float = 0.5,
) -> ActionReport:
    """Check both self-action axioms on sampled unitary pairs.

    Per pair: ``[v, t] = 0`` iff ``a(v)(t) = t``; for commuting pairs,
    ``a(vt)`` agrees with ``a(v) a(t)`` on a sampled normal, and ``a(v)``
    respects product and sum of a sampled commuting pair of normals.
    """
    n = a.dim
    worst = {FIXED_POINT: 0.0, ACTION_MULTIPLICATIVITY: 0.0, ACTION_PIECEWISE: 0.0}
    noncomm = 0
    for k in range(samples):
        nu, tau = unitary_pair_sample(seed, k, n, noncommuting_fraction)
        commutes = frob(nu @ tau - tau @ nu) <= tol
        noncomm += not commutes
        av = a(nu)
        fixed_res = frob(av(tau) - tau)
        if commutes != (fixed_res <= tol):
            return ActionReport(
                False, k + 1, seed, tol, ActionWitness(FIXED_POINT, (nu, tau), fixed_res, k), noncomm, worst
            )
        if commutes:
            worst[FIXED_POINT] = max(worst[FIXED_POINT], fixed_res)
            rng = derived_rng(seed, samples + k)
            x = random_normal(rng, n)
            r = frob(a(nu @ tau)(x) - av(a(tau)(x)))
            worst[ACTION_MULTIPLICATIVITY] = max(worst[ACTION_MULTIPLICATIVITY], r)
            if r > tol:
                return ActionReport(
                    False, k + 1, seed, tol, ActionWitness(ACTION_MULTIPLICATIVITY, (nu, tau, x), r, k), noncomm, worst
                )
        rng = derived_rng(seed, 2 * samples + k)
        p, q = commuting_normal_pair(rng, n)
        ap, aq = av(p), av(q)
        r = max(frob(av(p @ q) - ap @ aq), frob(av(p + q) - ap - aq), frob(ap @ aq - aq @ ap))
        worst[ACTION_PIECEWISE] = max(worst[ACTION_PIECEWISE], r)
        if r > tol:
            return ActionReport(
                False, k + 1, seed, tol, ActionWitness(ACTION_PIECEWISE, (nu, p, q), r, k), noncomm, worst
            )
    return ActionReport(True, samples, seed, tol, None, noncomm, worst)


@dataclass(frozen=True)
class AlmostHomReport:
    passed: bool
    piecewise: HomReport
    samples: int
    seed: int
    tol: float
    witness: ViolationWitness | None = None
    max_residual: float = 0.0
    note: str = EVIDENCE_NOTE

    def __bool__(self) -> bool:
        return self.passed


def presconj_residual(zeta: PieceMap, nu: np.ndarray, x: np.ndarray) -> float:
    """``|| z(v)* z(x) z(v) - z(v* x v) ||``."""
    zn = zeta(nu)
    return frob(dagger(zn) @ zeta(x) @ zn - zeta(dagger(nu) @ x @ nu))


def verify_almost_hom(
    zeta: PieceMap, samples: int = 1000, seed: int = 0, tol: float = TOL_HOM
) -> AlmostHomReport:
    """Piecewise clauses, then preservation of conjugation on (unitary, normal) samples."""
    pw = verify_piecewise_hom(zeta, samples, seed, tol)
    if not pw.passed:
        return AlmostHomReport(False, pw, samples, seed, tol, pw.witness)
    worst = 0.0
    for k in range(samples):
        rng = derived_rng(seed, 3 * samples + k)
        nu = random_unitary(rng, zeta.source_dim)
        x = random_normal(rng, zeta.source_dim)
        r = presconj_residual(zeta, nu, x)
        worst = max(worst, r)
        if r > tol:
            wit = ViolationWitness(PRESERVES_CONJUGATION, (nu, x), r, k, check="conjugation")
            return AlmostHomReport(False, pw, k + 1, seed, tol, wit, worst)
    return AlmostHomReport(True, pw, samples, seed, tol, None, worst)


@dataclass(frozen=True)
class CocycleSample:
    nu: np.ndarray
    tau: np.ndarray
    value: np.ndarray
    centrality_residual: float
    unitarity_residual: float
    # probe normals are drawn from derived streams (probe_seed, k), k < probes
    probe_seed: int = 0
    probes: int = 0

    def recompute(self, zeta: PieceMap) -> np.ndarray:
        return cocycle_value(zeta, self.nu, self.tau)


def cocycle_value(zeta: PieceMap, nu: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """``c(v, t) = z(vt)* z(v) z(t)``."""
    return dagger(zeta(nu @ tau)) @ zeta(nu) @ zeta(tau)


def probe_images(zeta: PieceMap, probes: int, seed: int) -> list[np.ndarray]:
    """``z(x)`` for the seeded normals ``x`` used as centrality probes."""
    return [zeta(random_normal(derived_rng(seed, k), zeta.source_dim)) for k in range(probes)]


def compute_cocycle(
    zeta: PieceMap,
    nu,
    tau,
    probes: int = 20,
    seed: int = 0,
    tol: float = TOL_HOM,
    images: list[np.ndarray] | None = None,
) -> CocycleSample:
    """Cocycle value with its unitarity and centrality residuals.

    Centrality is measured against ``z(x)`` for ``probes`` seeded normals
    ``x``; the image generating the target cannot be decided numerically.
    ``images`` lets callers reuse precomputed probe images.
    """
    nu = np.asarray(nu, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    for name, u in (("z(v)", zeta(nu)), ("z(t)", zeta(tau)), ("z(vt)", zeta(nu @ tau))):
        r = unitarity_residual(u)
        if r > tol:
            raise NotUnitary(f"{name} is not unitary (residual {r:.3e})")
    c = cocycle_value(zeta, nu, tau)
    if images is None:
        images = probe_images(zeta, probes, seed)
    central = max((frob(c @ zx - zx @ c) for zx in images), default=0.0)
    return CocycleSample(nu, tau, c, central, unitarity_residual(c), seed, probes)


@dataclass(frozen=True)
class CocycleReport:
    passed: bool
    triples: int
    seed: int
    tol: float
    max_identity_residual: float
    max_centrality_residual: float
    max_unitarity_residual: float
    max_deviation_from_identity: float
    witness: tuple[np.ndarray, ...] | None = None
    note: str = EVIDENCE_NOTE


def verify_cocycle_identity(
    zeta: PieceMap,
    triples: int = 1000,
    seed: int = 0,
    tol: float = TOL_HOM,
    probes: int = 8,
) -> CocycleReport:
    """Check ``c(t,x) c(vt,x)* c(v,tx) c(v,t)* = 1`` on seeded unitary triples.

    Requires ``zeta`` to pass :func:`verify_almost_hom` at the same seed.
    """
    pre = verify_almost_hom(zeta, samples=min(triples, 1000), seed=seed, tol=tol)
    if not pre.passed:
        raise PreconditionFailed(
            f"map is not an almost homomorphism on the samples ({pre.witness.kind if pre.witness else '?'})"
        )
    n = zeta.source_dim
    ident = np.eye(zeta.target_dim)
    images = probe_images(zeta, probes, seed)
    worst_id = worst_c = worst_u = worst_dev = 0.0
    for k in range(triples):
        rng = derived_rng(seed, 5 * triples + k)
        nu, tau, chi = (random_unitary(rng, n) for _ in range(3))
        cs = [
            compute_cocycle(zeta, a, b, probes, seed, tol, images)
            for a, b in ((tau, chi), (nu @ tau, chi), (nu, tau @ chi), (nu, tau))
        ]
        prod = cs[0].value @ dagger(cs[1].value) @ cs[2].value @ dagger(cs[3].value)
        r = frob(prod - ident)
        worst_id = max(worst_id, r)
        worst_c = max(worst_c, *(c.centrality_residual for c in cs))
        worst_u = max(worst_u, *(c.unitarity_residual for c in cs))
        worst_dev = max(worst_dev, *(frob(c.value - ident) for c in cs))
        if r > tol:
            return CocycleReport(False, k + 1, seed, tol, worst_id, worst_c, worst_u, worst_dev, (nu, tau, chi))
    return CocycleReport(True, triples, seed, tol, worst_id, worst_c, worst_u, worst_dev)


# --- the M_2 case -----------------------------------------------------------

PAULI_BASIS = (np.eye(2, dtype=complex), SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class M2Extension:
    extended: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    x_image: np.ndarray = field(repr=False)
    y_image: np.ndarray = field(repr=False)
    relations: dict
    deviation: float
    closure: float
    samples: int
    seed: int
    almost_hom: bool | None = None
    note: str = EVIDENCE_NOTE


def generator_relations(x: np.ndarray, y: np.ndarray) -> dict[str, float]:
    ident = np.eye(len(x))
    return {
        "x_squared": frob(x @ x - ident),
        "y_squared": frob(y @ y - ident),
        "anticommutator": frob(x @ y + y @ x),
    }


def m2_extend(
    zeta: PieceMap,
    samples: int = 100,
    seed: int = 0,
    tol: float = TOL_HOM,
    check_almost_hom: bool = True,
) -> M2Extension:
    """Extend a map on normals of ``M_2`` from its values on ``sigma_x``, ``sigma_y``.

    With ``X = z(sigma_x)``, ``Y = z(sigma_y)`` satisfying ``X^2 = Y^2 = 1``
    and ``XY + YX = 0``, the extension sends ``c0 + cx sx + cy sy + cz sz``
    to ``c0 + cx X + cy Y - i cz XY`` (since ``sz = -i sx sy``).
    Deviation from ``zeta`` is measured on seeded normals.
    """
    if zeta.source_dim != 2:
        raise InputError("m2_extend needs a map out of 2x2 matrices")
    x, y = zeta(SIGMA_X), zeta(SIGMA_Y)
    rel = generator_relations(x, y)
    if max(rel.values()) > tol:
        raise GeneratorRelationsFail("images of sigma_x, sigma_y violate the Clifford relations", rel)
    m = zeta.target_dim
    images = (np.eye(m, dtype=complex), x, y, -1j * x @ y)

    def ext(a) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        coeffs = [np.trace(s @ a) / 2 for s in PAULI_BASIS]
        return sum(c * im for c, im in zip(coeffs, images))

    dev = 0.0
    for k in range(samples):
        a = random_normal(derived_rng(seed, k), 2)
        dev = max(dev, frob(ext(a) - zeta(a)))
    words = (np.eye(2, dtype=complex), SIGMA_X, SIGMA_Y, SIGMA_X @ SIGMA_Y)
    closure = max(frob(ext(s @ t) - ext(s) @ ext(t)) for s in words for t in words)
    almost = verify_almost_hom(zeta, samples, seed, tol).passed if check_almost_hom else None
    return M2Extension(ext, x, y, rel, dev, closure, samples, seed, almost)
