"""Piecewise *-homomorphisms between matrix algebras.

The carrier of ``M_n`` viewed piecewise is its set of normal matrices, with
two elements related when they commute.  A map of normals is a piecewise
*-homomorphism when it preserves that relation, the partial sum and product,
scalars, the adjoint and the unit.  None of this can be checked on all
normals, so every check here is sample-based: a pass is evidence on the
stated number of seeded samples, not a proof.

Also contains the linear extension ``a + ib -> z(a) + i z(b)`` and an exact
search for 0/1 valuations on finite ray systems (Kochen-Specker type).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, SearchBudgetExceeded
from .matstar import (
    FunctionLike,
    apply_function,
    as_matrix,
    dagger,
    derived_rng,
    frob,
    random_unitary,
)

TOL_HOM = 1e-7

MULTIPLICATIVITY = "MULTIPLICATIVITY"
ADDITIVITY = "ADDITIVITY"
COMMUTE_PRESERVATION = "COMMUTE_PRESERVATION"
SCALAR = "SCALAR"
INVOLUTION = "INVOLUTION"
UNIT = "UNIT"

EVIDENCE_NOTE = "sample-based check: a pass is evidence on the listed samples, not a proof"


@dataclass(frozen=True)
class PieceMap:
    """A map from normals of ``M_source_dim`` to ``M_target_dim``.

    ``tag`` records which closed form the evaluator implements; ``params``
    holds its data (the unitary of a conjugation, the multiplicity of an
    embedding, ...).
    """

    source_dim: int
    target_dim: int
    evaluator: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    tag: str = "user"
    params: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, a) -> np.ndarray:
        a = as_matrix(a)
        if a.shape != (self.source_dim, self.source_dim):
            raise InputError(f"expected a {self.source_dim}x{self.source_dim} matrix, got {a.shape}")
        out = as_matrix(self.evaluator(a))
        if out.shape != (self.target_dim, self.target_dim):
            raise InputError(f"evaluator returned shape {out.shape}")
        return out

    @classmethod
    def identity(cls, n: int) -> "PieceMap":
        return cls(n, n, lambda a: a, "identity")

    @classmethod
    def transpose(cls, n: int) -> "PieceMap":
        return cls(n, n, lambda a: a.T.copy(), "transpose")

    @classmethod
    def conjugation(cls, u) -> "PieceMap":
        """``a -> u* a u``."""
        u = as_matrix(u)
        return cls(len(u), len(u), lambda a: dagger(u) @ a @ u, "conjugation", {"unitary": u})

    @classmethod
    def embedding(cls, n: int, copies: int = 2) -> "PieceMap":
        """Block-diagonal embedding ``a -> diag(a, ..., a)`` into ``M_{n*copies}``."""
        eye = np.eye(copies)
        return cls(n, n * copies, lambda a: np.kron(eye, a), "embedding", {"copies": copies})

    @classmethod
    def spectral(cls, n: int, f: FunctionLike) -> "PieceMap":
        """``a -> f(a)`` by functional calculus; ``f`` is a callable or an eigenvalue table."""
        return cls(n, n, lambda a: apply_function(a, f), "spectral", {"function": f})

    @classmethod
    def user(cls, n: int, m: int, fn: Callable[[np.ndarray], np.ndarray]) -> "PieceMap":
        return cls(n, m, fn, "user")

    @classmethod
    def zero(cls, n: int, m: int | None = None) -> "PieceMap":
        m = n if m is None else m
        return cls(n, m, lambda a: np.zeros((m, m), dtype=complex), "user")

    def then(self, other: "PieceMap") -> "PieceMap":
        """Composite ``other . self``."""
        if other.source_dim != self.target_dim:
            raise InputError("dimension mismatch in composite")
        return PieceMap(
            self.source_dim, other.target_dim, lambda a: other(self(a)), "user", {"parts": (self.tag, other.tag)}
        )


@dataclass(frozen=True)
class ViolationWitness:
    kind: str
    operands: tuple[np.ndarray, ...]
    residual: float
    sample: int = -1
    scalar: complex = 0j
    # "piecewise" (commuting operands) or "unitary" (arbitrary unitary pair)
    check: str = "piecewise"


@dataclass(frozen=True)
class HomReport:
    passed: bool
    samples: int
    seed: int
    tol: float
    witness: ViolationWitness | None = None
    max_residuals: dict = field(default_factory=dict)
    note: str = EVIDENCE_NOTE

    def __bool__(self) -> bool:
        return self.passed


def commuting_normal_pair(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Two normals ``u d1 u*``, ``u d2 u*`` sharing a Haar eigenbasis."""
    u = random_unitary(rng, n)
    d1 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    d2 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return (u * d1) @ dagger(u), (u * d2) @ dagger(u)


def random_scalar(rng: np.random.Generator) -> complex:
    return complex(rng.standard_normal(), rng.standard_normal())


def _hom_residuals(zeta: PieceMap, a: np.ndarray, b: np.ndarray, z: complex) -> dict[str, float]:
    za, zb = zeta(a), zeta(b)
    return {
        COMMUTE_PRESERVATION: frob(za @ zb - zb @ za),
        MULTIPLICATIVITY: frob(zeta(a @ b) - za @ zb),
        ADDITIVITY: frob(zeta(a + b) - za - zb),
        SCALAR: frob(zeta(z * a) - z * za),
        INVOLUTION: frob(zeta(dagger(a)) - dagger(za)),
    }


def unit_residual(zeta: PieceMap) -> float:
    return frob(zeta(np.eye(zeta.source_dim)) - np.eye(zeta.target_dim))


def verify_piecewise_hom(
    zeta: PieceMap, samples: int = 1000, seed: int = 0, tol: float = TOL_HOM
) -> HomReport:
    """Check the piecewise *-homomorphism clauses on seeded commuting pairs.

    The unit is checked first; then sample ``k`` draws a commuting pair and a
    complex scalar from the stream ``(seed, k)``.  Stops at the first
    violation.
    """
    worst: dict[str, float] = {UNIT: unit_residual(zeta)}
    if worst[UNIT] > tol:
        wit = ViolationWitness(UNIT, (np.eye(zeta.source_dim, dtype=complex),), worst[UNIT])
        return HomReport(False, 0, seed, tol, wit, worst)
    for k in range(samples):
        rng = derived_rng(seed, k)
        a, b = commuting_normal_pair(rng, zeta.source_dim)
        z = random_scalar(rng)
        res = _hom_residuals(zeta, a, b, z)
        for kind, r in res.items():
            worst[kind] = max(worst.get(kind, 0.0), r)
            if r > tol:
                return HomReport(False, k + 1, seed, tol, ViolationWitness(kind, (a, b), r, k, z), worst)
    return HomReport(True, samples, seed, tol, None, worst)


def reevaluate(zeta: PieceMap, w: ViolationWitness) -> float:
    """Recompute the residual stored in a witness."""
    if w.kind == UNIT:
        return unit_residual(zeta)
    if w.check == "unitary":
        nu, tau = w.operands
        return frob(zeta(nu @ tau) - zeta(nu) @ zeta(tau))
    a, b = w.operands
    return _hom_residuals(zeta, a, b, w.scalar)[w.kind]


def check_unitary_multiplicativity(
    zeta: PieceMap, samples: int = 1000, seed: int = 0, tol: float = TOL_HOM
) -> HomReport:
    """Check ``z(nu tau) = z(nu) z(tau)`` on seeded Haar pairs, commuting or not."""
    worst = 0.0
    n = zeta.source_dim
    for k in range(samples):
        rng = derived_rng(seed, k)
        nu, tau = random_unitary(rng, n), random_unitary(rng, n)
        r = frob(zeta(nu @ tau) - zeta(nu) @ zeta(tau))
        worst = max(worst, r)
        if r > tol:
            wit = ViolationWitness(MULTIPLICATIVITY, (nu, tau), r, k, check="unitary")
            return HomReport(False, k + 1, seed, tol, wit, {MULTIPLICATIVITY: worst})
    return HomReport(True, samples, seed, tol, None, {MULTIPLICATIVITY: worst})


@dataclass(frozen=True)
class ExtensionReport:
    """Outcome of extending a piecewise map linearly to all matrices."""

    extended: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    residuals: dict
    passed: dict
    samples: int
    seed: int
    tol: float
    note: str = EVIDENCE_NOTE

    @property
    def clean(self) -> bool:
        return all(self.passed.values())


def linear_extension(zeta: PieceMap) -> Callable[[np.ndarray], np.ndarray]:
    """``x -> z(re x) + i z(im x)`` with ``re x = (x + x*)/2``, ``im x = (x - x*)/2i``."""

    def ext(x) -> np.ndarray:
        x = as_matrix(x)
        re = (x + dagger(x)) / 2
        im = (x - dagger(x)) / 2j
        return zeta(re) + 1j * zeta(im)

    return ext


def extend(zeta: PieceMap, samples: int = 200, seed: int = 0, tol: float = TOL_HOM) -> ExtensionReport:
    """Build the linear extension and test it on seeded arbitrary matrices.

    Reports linearity, multiplicativity, involution and unit separately.
    """
    ext = linear_extension(zeta)
    n, m = zeta.source_dim, zeta.target_dim
    res = {"linearity": 0.0, "multiplicativity": 0.0, "involution": 0.0}
    res["unit"] = frob(ext(np.eye(n)) - np.eye(m))
    for k in range(samples):
        rng = derived_rng(seed, k)
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        z = random_scalar(rng)
        ex, ey = ext(x), ext(y)
        res["linearity"] = max(res["linearity"], frob(ext(z * x + y) - z * ex - ey))
        res["multiplicativity"] = max(res["multiplicativity"], frob(ext(x @ y) - ex @ ey))
        res["involution"] = max(res["involution"], frob(ext(dagger(x)) - dagger(ex)))
    passed = {k: v <= tol for k, v in res.items()}
    return ExtensionReport(ext, res, passed, samples, seed, tol)


# --- Kochen-Specker valuations ---------------------------------------------


@dataclass(frozen=True)
class RaySystem:
    """Unit rays in ``C^dim`` and bases given as index tuples into ``rays``.

    Rays are normalized on construction.
    """

    dim: int
    rays: tuple[np.ndarray, ...]
    bases: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rays = []
        for r in self.rays:
            v = np.asarray(r, dtype=complex).reshape(-1)
            if v.shape != (self.dim,):
                raise InputError(f"ray of length {v.shape[0]} in dimension {self.dim}")
            nv = np.linalg.norm(v)
            if nv == 0:
                raise InputError("zero ray")
            rays.append(v / nv)
        bases = tuple(tuple(int(i) for i in b) for b in self.bases)
        for b in bases:
            if len(b) != self.dim or len(set(b)) != self.dim:
                raise InputError(f"basis {b} must list {self.dim} distinct rays")
            if any(not 0 <= i < len(rays) for i in b):
                raise InputError(f"basis {b} refers to a missing ray")
        object.__setattr__(self, "rays", tuple(rays))
        object.__setattr__(self, "bases", bases)

    def orthonormality_residual(self) -> float:
        worst = 0.0
        for b in self.bases:
            m = np.array([self.rays[i] for i in b]).T
            worst = max(worst, frob(dagger(m) @ m - np.eye(self.dim)))
        return worst

    @classmethod
    def from_bases(cls, dim: int, bases: Sequence[Sequence], tol: float = 1e-9) -> "RaySystem":
        """Build from explicit basis vectors, identifying rays that agree up to phase."""
        rays: list[np.ndarray] = []
        idx_bases = []
        for b in bases:
            idx = []
            for v in b:
                v = np.asarray(v, dtype=complex)
                v = v / np.linalg.norm(v)
                for k, r in enumerate(rays):
                    if abs(abs(np.vdot(r, v)) - 1) <= tol:
                        idx.append(k)
                        break
                else:
                    rays.append(v)
                    idx.append(len(rays) - 1)
            idx_bases.append(tuple(idx))
        return cls(dim, tuple(rays), tuple(idx_bases))


@dataclass(frozen=True)
class KSResult:
    status: str  # SAT, UNSAT or BUDGET
    assignment: tuple[int, ...] | None
    solutions: int | None
    nodes: int

    @property
    def satisfiable(self) -> bool:
        return self.status == "SAT"


def ks_assignment_search(
    system: RaySystem, budget: int = 10**7, count: bool = True
) -> KSResult:
    """Exact search for ray valuations with exactly one 1 in every basis.

    Branches on which ray carries the 1 in the open basis with fewest
    unassigned rays, with unit propagation.  Branches are disjoint, so leaf
    counts add up to the number of valuations; rays in no basis contribute a
    factor of 2.  With ``count=False`` the search stops at the first solution.
    """
    n = len(system.rays)
    bases = system.bases
    member: list[list[int]] = [[] for _ in range(n)]
    for bi, b in enumerate(bases):
        for r in b:
            member[r].append(bi)
    free = sum(1 for r in range(n) if not member[r])
    value = [-1] * n
    nodes = 0
    first: list[tuple[int, ...]] = []
    total = 0

    def assign(r: int, v: int, trail: list[int]) -> bool:
        if value[r] != -1:
            return value[r] == v
        value[r] = v
        trail.append(r)
        return True

    def propagate(trail: list[int], queue: list[int]) -> bool:
        while queue:
            r = queue.pop()
            for bi in member[r]:
                ones = [x for x in bases[bi] if value[x] == 1]
                if len(ones) > 1:
                    return False
                open_ = [x for x in bases[bi] if value[x] == -1]
                if ones:
                    for x in open_:
                        assign(x, 0, trail)
                        queue.append(x)
                elif not open_:
                    return False
                elif len(open_) == 1:
                    assign(open_[0], 1, trail)
                    queue.append(open_[0])
        return True

    def undo(trail: list[int]) -> None:
        for r in trail:
            value[r] = -1

    def search() -> bool:
        """Returns True when the caller should stop."""
        nonlocal nodes, total
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded("ray valuation search exceeded its node budget", nodes)
        best, best_open = None, None
        for b in bases:
            if any(value[x] == 1 for x in b):
                continue
            open_ = [x for x in b if value[x] == -1]
            if best_open is None or len(open_) < len(best_open):
                best, best_open = b, open_
        if best is None:
            total += 2**free
            if not first:
                first.append(tuple(0 if v == -1 else v for v in value))
            return not count
        for r in best_open:
            trail: list[int] = []
            ok = assign(r, 1, trail)
            queue = [r]
            for x in best_open:
                if x != r:
                    ok = ok and assign(x, 0, trail)
                    queue.append(x)
            if ok and propagate(trail, queue):
                if search():
                    undo(trail)
                    return True
            undo(trail)
        return False

    try:
        search()
    except SearchBudgetExceeded:
        return KSResult("BUDGET", first[0] if first else None, None, nodes)
    if first:
        return KSResult("SAT", first[0], total if count else None, nodes)
    return KSResult("UNSAT", None, 0, nodes)


def ks_brute_force(system: RaySystem) -> int:
    """Number of valuations by direct enumeration of all 0/1 vectors."""
    n = len(system.rays)
    return sum(
        1
        for vals in itertools.product((0, 1), repeat=n)
        if all(sum(vals[i] for i in b) == 1 for b in system.bases)
    )


def valuation_is_valid(system: RaySystem, assignment: Sequence[int]) -> bool:
    return all(sum(assignment[i] for i in b) == 1 for b in system.bases)


# Nine orthogonal bases of R^4 built from 18 rays, each ray in exactly two
# bases.  Parity rules out any 0/1 valuation: summing over bases counts every
# ray twice, yet nine bases must each contribute exactly one.
KS18_BASES: tuple[tuple[tuple[int, ...], ...], ...] = (
    ((0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0), (1, -1, 0, 0)),
    ((0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, -1, 0)),
    ((1, -1, 1, -1), (1, -1, -1, 1), (1, 1, 0, 0), (0, 0, 1, 1)),
    ((1, -1, 1, -1), (1, 1, 1, 1), (1, 0, -1, 0), (0, 1, 0, -1)),
    ((0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 0, -1)),
    ((1, -1, -1, 1), (1, 1, 1, 1), (1, 0, 0, -1), (0, 1, -1, 0)),
    ((1, 1, -1, 1), (1, 1, 1, -1), (1, -1, 0, 0), (0, 0, 1, 1)),
    ((1, 1, -1, 1), (-1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, -1)),
    ((1, 1, 1, -1), (-1, 1, 1, 1), (1, 0, 0, 1), (0, 1, -1, 0)),
)


def ks18_system() -> RaySystem:
    return RaySystem.from_bases(4, KS18_BASES)
