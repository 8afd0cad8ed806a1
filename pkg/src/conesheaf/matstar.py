"""Dense complex matrix core.

Normal matrices and their spectral resolutions, functional calculus in one
and two commuting variables, partitions of unity (unital *-homomorphisms
``C(X) -> M_n`` for finite ``X``), coarse-graining along finite maps,
compatibility of matrix families over a cone and lifting them to the apex.

Residuals are Frobenius norms throughout.  The Frobenius norm dominates the
operator norm and exceeds it by at most a factor ``sqrt(n)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from ._parallel import first_hit
from .errors import (
    DomainGap,
    NonCommuting,
    NotALift,
    NotCompatible,
    NotNormal,
    NotSeparating,
    SpaceMismatch,
)
from .finspace import (
    DEFAULT_NODE_BUDGET,
    Cone,
    FinMap,
    FinSpace,
    enumerate_compatible_families,
    is_jointly_injective,
    pushout,
)

TOL_NORMAL = 1e-9
TOL_COMMUTE = 1e-9
CLUSTER_GAP = 1e-8
TOL_COMPAT = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def normality_residual(a) -> float:
    a = as_matrix(a)
    return frob(a @ dagger(a) - dagger(a) @ a)


def unitarity_residual(a) -> float:
    a = as_matrix(a)
    return frob(dagger(a) @ a - np.eye(len(a)))


def projection_residual(a) -> float:
    a = as_matrix(a)
    return max(frob(a @ a - a), frob(dagger(a) - a))


def is_normal(a, tol: float = TOL_NORMAL) -> bool:
    return normality_residual(a) <= tol


def is_unitary(a, tol: float = TOL_NORMAL) -> bool:
    return unitarity_residual(a) <= tol


# --- spectral decomposition -------------------------------------------------


def _clusters(values: np.ndarray, gap: float) -> list[list[int]]:
    """Group sorted real values whose consecutive distance is at most ``gap``."""
    groups: list[list[int]] = []
    for k, v in enumerate(values):
        if groups and v - values[groups[-1][-1]] <= gap:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _eigenspaces(a: np.ndarray, cluster_gap: float) -> list[tuple[complex, np.ndarray]]:
    """Orthonormal bases of the eigenspaces of a normal matrix.

    Diagonalizes the self-adjoint part, then the skew part inside each
    cluster of the first spectrum.  Returns (eigenvalue, basis columns) pairs
    sorted by real then imaginary part.
    """
    n = len(a)
    if n == 0:
        return []
    h = (a + dagger(a)) / 2
    k = (a - dagger(a)) / 2j
    w, v = np.linalg.eigh(h)
    spaces: list[tuple[complex, np.ndarray]] = []
    for grp in _clusters(w, cluster_gap):
        vc = v[:, grp]
        kc = dagger(vc) @ k @ vc
        kc = (kc + dagger(kc)) / 2
        w2, v2 = np.linalg.eigh(kc)
        for grp2 in _clusters(w2, cluster_gap):
            basis = vc @ v2[:, grp2]
            lam = complex(np.trace(dagger(basis) @ a @ basis) / basis.shape[1])
            spaces.append((lam, basis))
    spaces.sort(key=lambda s: (s[0].real, s[0].imag))

    merged: list[tuple[complex, np.ndarray]] = []
    for lam, basis in spaces:
        for idx, (mu, b2) in enumerate(merged):
            if abs(lam - mu) <= cluster_gap:
                nb = np.hstack([b2, basis])
                merged[idx] = (complex(np.trace(dagger(nb) @ a @ nb) / nb.shape[1]), nb)
                break
        else:
            merged.append((lam, basis))
    return merged


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    projections: tuple[np.ndarray, ...]

    def reconstruct(self) -> np.ndarray:
        n = self.projections[0].shape[0] if self.projections else 0
        out = np.zeros((n, n), dtype=complex)
        for lam, p in zip(self.eigenvalues, self.projections):
            out += lam * p
        return out


def _require_normal(a: np.ndarray, tol: float) -> None:
    res = normality_residual(a)
    if res > tol:
        raise NotNormal(f"normality residual {res:.3e} exceeds {tol:.1e}")


def spectral_decompose(
    a, tol_normal: float = TOL_NORMAL, cluster_gap: float = CLUSTER_GAP
) -> SpectralDecomposition:
    a = as_matrix(a)
    _require_normal(a, tol_normal)
    spaces = _eigenspaces(a, cluster_gap)
    return SpectralDecomposition(
        np.array([lam for lam, _ in spaces], dtype=complex),
        tuple(b @ dagger(b) for _, b in spaces),
    )


FunctionLike = Union[Callable[[complex], complex], Mapping[complex, complex], Sequence]


def _table_lookup(table, lam: complex, gap: float) -> complex:
    items = table.items() if isinstance(table, Mapping) else table
    for point, value in items:
        if abs(complex(point) - lam) <= gap:
            return complex(value)
    raise DomainGap(f"function is undefined at eigenvalue {lam}")


def apply_function(
    a, f: FunctionLike, tol_normal: float = TOL_NORMAL, cluster_gap: float = CLUSTER_GAP
) -> np.ndarray:
    """``f(a) = sum f(lambda_k) P_k``.  ``f`` is a callable or a table of (point, value) pairs."""
    dec = spectral_decompose(a, tol_normal, cluster_gap)
    if callable(f):
        values = [complex(f(lam)) for lam in dec.eigenvalues]
    else:
        values = [_table_lookup(f, lam, cluster_gap) for lam in dec.eigenvalues]
    return SpectralDecomposition(np.array(values), dec.projections).reconstruct()


# --- commuting families -----------------------------------------------------


@dataclass(frozen=True)
class JointDiagonalization:
    unitary: np.ndarray
    diagonals: tuple[np.ndarray, ...]
    # joint eigenspaces: (tuple of eigenvalues, one per input; basis columns)
    blocks: tuple[tuple[tuple[complex, ...], np.ndarray], ...]


def joint_diagonalize(
    mats: Sequence, tol_commute: float = TOL_COMMUTE, cluster_gap: float = CLUSTER_GAP
) -> JointDiagonalization:
    """Common eigenbasis of pairwise commuting normal matrices, by successive refinement."""
    mats = [as_matrix(m) for m in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    n = len(mats[0])
    if any(m.shape != (n, n) for m in mats):
        raise ValueError("all matrices must have the same dimension")
    for m in mats:
        _require_normal(m, TOL_NORMAL)
    for i, j in itertools.combinations(range(len(mats)), 2):
        res = frob(commutator(mats[i], mats[j]))
        if res > tol_commute:
            raise NonCommuting(
                f"matrices {i} and {j} do not commute (residual {res:.3e})", (i, j), res
            )
    blocks: list[tuple[tuple[complex, ...], np.ndarray]] = [((), np.eye(n, dtype=complex))]
    for m in mats:
        refined = []
        for vals, basis in blocks:
            sub = dagger(basis) @ m @ basis
            for lam, b2 in _eigenspaces(sub, cluster_gap):
                refined.append((vals + (lam,), basis @ b2))
        blocks = refined
    u = np.hstack([b for _, b in blocks]) if blocks else np.eye(n, dtype=complex)
    diags = tuple(dagger(u) @ m @ u for m in mats)
    return JointDiagonalization(u, diags, tuple(blocks))


def bivariate_op(
    a, b, op: Union[str, Callable[[complex, complex], complex], Mapping],
    tol_commute: float = TOL_COMMUTE, cluster_gap: float = CLUSTER_GAP,
) -> np.ndarray:
    """Apply a function of two variables to a commuting pair via their joint spectrum.

    ``op`` is ``"add"``, ``"mul"``, a callable, or a table keyed by eigenvalue pairs.
    """
    if op == "add":
        fn = lambda x, y: x + y  # noqa: E731
    elif op == "mul":
        fn = lambda x, y: x * y  # noqa: E731
    elif callable(op):
        fn = op
    else:
        table = dict(op)

        def fn(x, y):
            for (p, q), v in table.items():
                if abs(complex(p) - x) <= cluster_gap and abs(complex(q) - y) <= cluster_gap:
                    return complex(v)
            raise DomainGap(f"operation is undefined at eigenvalue pair {(x, y)}")

    jd = joint_diagonalize([a, b], tol_commute, cluster_gap)
    n = len(jd.unitary)
    out = np.zeros((n, n), dtype=complex)
    for (x, y), basis in jd.blocks:
        out += complex(fn(x, y)) * (basis @ dagger(basis))
    return out


# --- partitions of unity ----------------------------------------------------


@dataclass(frozen=True)
class PartitionOfUnity:
    """Projections indexed by the points of a finite space, summing to the identity.

    ``stack[k]`` is the projection at ``space.points[k]``.
    """

    space: FinSpace
    stack: np.ndarray

    def __post_init__(self):
        st = np.asarray(self.stack, dtype=complex)
        if st.ndim != 3 or st.shape[1] != st.shape[2] or st.shape[0] != len(self.space):
            raise ValueError("need one square projection per point, all of one dimension")
        object.__setattr__(self, "stack", st)

    @classmethod
    def from_dict(cls, space: FinSpace, projs: Mapping[str, np.ndarray], dim: int | None = None) -> "PartitionOfUnity":
        if not len(space):
            return cls(space, np.zeros((0, dim or 0, dim or 0), dtype=complex))
        return cls(space, np.array([as_matrix(projs[p]) for p in space]))

    @property
    def projections(self) -> list[np.ndarray]:
        return list(self.stack)

    @property
    def dim(self) -> int:
        return self.stack.shape[1]

    def __getitem__(self, point: str) -> np.ndarray:
        return self.stack[self.space.index(point)]

    def residuals(self) -> dict[str, float]:
        st = self.stack
        total = st.sum(axis=0)
        prods = np.einsum("pik,qkl->pqil", st, st)
        norms = np.sqrt(np.sum(np.abs(prods) ** 2, axis=(2, 3)))
        off = norms[~np.eye(len(st), dtype=bool)]
        ortho = float(off.max()) if off.size else 0.0
        idem = np.sqrt(np.sum(np.abs(np.einsum("ppil->pil", prods) - st) ** 2, axis=(1, 2)))
        herm = np.sqrt(np.sum(np.abs(st.conj().transpose(0, 2, 1) - st) ** 2, axis=(1, 2)))
        proj = float(max(idem.max(), herm.max())) if len(st) else 0.0
        return {"sum": frob(total - np.eye(self.dim)), "orthogonality": ortho, "projection": proj}

    def is_valid(self, tol: float = 1e-8) -> bool:
        return all(v <= tol for v in self.residuals().values())


def diagonal_partition(space: FinSpace, assignment: Sequence[str], unitary=None) -> PartitionOfUnity:
    """Partition whose ``k``-th basis vector (rotated by ``unitary``) lies in point ``assignment[k]``."""
    n = len(assignment)
    u = np.eye(n, dtype=complex) if unitary is None else np.asarray(unitary, dtype=complex)
    ind = np.array([[1.0 if a == p else 0.0 for a in assignment] for p in space]).reshape(len(space), n)
    # (u * ind) scales columns of u; then multiply by u^*
    stack = np.einsum("ij,pj,kj->pik", u, ind, u.conj())
    return PartitionOfUnity(space, stack)


def _incidence(f: FinMap) -> np.ndarray:
    m = np.zeros((len(f.codomain), len(f.domain)))
    m[list(f.codes), list(range(len(f.domain)))] = 1.0
    return m


def coarse_grain(p: PartitionOfUnity, f: FinMap) -> PartitionOfUnity:
    """Push a partition of unity forward: ``Q_y = sum of P_x over f(x) = y``."""
    if p.space != f.domain:
        raise SpaceMismatch("partition of unity does not live on the domain of the map")
    n = p.dim
    out = np.zeros((len(f.codomain), n, n), dtype=complex)
    for proj, c in zip(p.stack, f.codes):
        out[c] += proj
    return PartitionOfUnity(f.codomain, out)


@dataclass(frozen=True)
class MatrixFamily:
    """One partition of unity per leg codomain of ``cone``."""

    cone: Cone
    members: tuple[PartitionOfUnity, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if len(members) != len(self.cone.legs):
            raise ValueError("need one member per leg")
        for leg, mem in zip(self.cone.legs, members):
            if mem.space != leg.codomain:
                raise SpaceMismatch("member space differs from its leg codomain")
        if len({m.dim for m in members}) > 1:
            raise ValueError("members must share a dimension")
        object.__setattr__(self, "members", members)

    @property
    def dim(self) -> int:
        return self.members[0].dim if self.members else 0


@dataclass(frozen=True)
class CompatibilityResult:
    compatible: bool
    pair: tuple[int, int] | None = None
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.compatible


def _max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def check_compatibility(fam: MatrixFamily, tol: float = TOL_COMPAT) -> CompatibilityResult:
    """Coarse-grain every two members into their pushout and compare entrywise."""
    legs = fam.cone.legs
    worst = 0.0
    for i, j in itertools.combinations_with_replacement(range(len(legs)), 2):
        po = pushout(legs[i], legs[j])
        qi = np.tensordot(_incidence(po.inj_left), fam.members[i].stack, axes=1)
        qj = np.tensordot(_incidence(po.inj_right), fam.members[j].stack, axes=1)
        res = _max_abs_diff(qi, qj)
        if res > tol:
            return CompatibilityResult(False, (i, j), res)
        worst = max(worst, res)
    return CompatibilityResult(True, None, worst)


def _first_noncommuting(fam: MatrixFamily, tol_commute: float):
    legs, members = fam.cone.legs, fam.members
    for i, j in itertools.combinations(range(len(legs)), 2):
        a, b = members[i].stack, members[j].stack
        comm = np.einsum("pik,qkl->pqil", a, b) - np.einsum("qik,pkl->pqil", b, a)
        norms = np.sqrt(np.sum(np.abs(comm) ** 2, axis=(2, 3)))
        bad = np.argwhere(norms > tol_commute)
        if len(bad):
            p, q = bad[0]
            pair = ((i, legs[i].codomain.points[p]), (j, legs[j].codomain.points[q]))
            return pair, float(norms[p, q])
    return None


def lift_family(
    fam: MatrixFamily, tol: float = TOL_COMPAT, tol_commute: float = TOL_COMMUTE
) -> PartitionOfUnity:
    """Glue a compatible family into one partition of unity on the apex.

    ``P_x`` is the product over legs of ``Q_{i, f_i(x)}``; this needs all
    cross-member projections to commute.
    """
    compat = check_compatibility(fam, tol)
    if not compat:
        raise NotCompatible(
            f"members {compat.pair} disagree in their pushout", compat.pair, compat.residual
        )
    cone = fam.cone
    if not is_jointly_injective(cone):
        raise NotSeparating("cone does not separate apex points")
    bad = _first_noncommuting(fam, tol_commute)
    if bad is not None:
        (i, y), (j, y2) = bad[0]
        raise NonCommuting(f"projections ({i},{y}) and ({j},{y2}) do not commute", bad[0], bad[1])
    legs, members = cone.legs, fam.members
    n = fam.dim if members else 1
    projs = np.empty((len(cone.apex), n, n), dtype=complex)
    for k in range(len(cone.apex)):
        p = np.eye(n, dtype=complex)
        for leg, mem in zip(legs, members):
            p = p @ mem.stack[leg.codes[k]]
        projs[k] = p
    lifted = PartitionOfUnity(cone.apex, projs)
    if not lifted.is_valid(max(tol, 1e-8)):
        raise NotALift(f"products do not form a partition of unity: {lifted.residuals()}")
    for leg, mem in zip(legs, members):
        res = _max_abs_diff(coarse_grain(lifted, leg).stack, mem.stack)
        if res > tol:
            raise NotALift(f"lift does not reproduce member (residual {res:.3e})")
    return lifted


# --- random matrices --------------------------------------------------------


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with phase correction."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_normal(rng: np.random.Generator, n: int, unitary=None) -> np.ndarray:
    u = random_unitary(rng, n) if unitary is None else unitary
    d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return u @ np.diag(d) @ dagger(u)


def random_self_adjoint(rng: np.random.Generator, n: int) -> np.ndarray:
    u = random_unitary(rng, n)
    return u @ np.diag(rng.standard_normal(n)).astype(complex) @ dagger(u)


def random_commuting_normals(rng: np.random.Generator, n: int, count: int = 2) -> list[np.ndarray]:
    """Commuting normal matrices sharing one random eigenbasis."""
    u = random_unitary(rng, n)
    return [random_normal(rng, n, u) for _ in range(count)]


def random_commuting_unitaries(rng: np.random.Generator, n: int, count: int = 2) -> list[np.ndarray]:
    u = random_unitary(rng, n)
    out = []
    for _ in range(count):
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        out.append(u @ np.diag(phases) @ dagger(u))
    return out


def derived_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for sample ``index``; independent of how samples are scheduled."""
    return np.random.default_rng([seed, index])


# --- counterexample search --------------------------------------------------


@dataclass(frozen=True)
class NoncommutingWitness:
    family: MatrixFamily
    trial: int
    pair: tuple
    residual: float


def _dft(b: int) -> np.ndarray:
    k = np.arange(b)
    return np.exp(-2j * np.pi * np.outer(k, k) / b) / np.sqrt(b)


def _spread_picks(families: Sequence[tuple[int, ...]], n: int) -> list[int]:
    """Greedy choice of ``n`` families that take as many new values per leg as possible."""
    picks = [0]
    while len(picks) < n:
        used = [set(families[p][i] for p in picks) for i in range(len(families[0]))]
        best, score = None, -1
        for k, fam in enumerate(families):
            if k in picks:
                continue
            s = sum(fam[i] not in used[i] for i in range(len(fam)))
            if s > score:
                best, score = k, s
        picks.append(best if best is not None else picks[len(picks) % len(picks)])
    return picks


def search_noncommuting_family(
    cone: Cone,
    dim: int,
    trials: int = 10**4,
    seed: int = 0,
    jobs: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
) -> NoncommutingWitness | None:
    """Look for a compatible matrix family over ``cone`` whose members do not commute.

    Each trial picks ``dim`` compatible point families ``F_1..F_dim`` and puts
    basis vector ``r`` of leg ``i`` at point ``F_r(i)``, rotated by a unitary
    ``V W_i``.  ``W_i`` only mixes basis vectors that every pairwise pushout
    puts in the same class, so the family is compatible by construction
    (it is re-checked anyway).  Trial 0 is structured (``V = 1``, discrete
    Fourier blocks); the others draw Haar-random ``V`` and ``W_i`` from a
    stream derived from ``(seed, trial)``.
    """
    legs = cone.legs
    if dim < 1 or not legs:
        return None
    coded = []
    for fam in enumerate_compatible_families(cone, budget):
        coded.append(tuple(leg.codomain.index(y) for leg, y in zip(legs, fam)))
    if not coded:
        return None
    pair_classes = []
    for i, j in itertools.combinations(range(len(legs)), 2):
        pair_classes.append((i, pushout(legs[i], legs[j]).left_classes))

    def build(t: int) -> MatrixFamily:
        rng = None if t == 0 else derived_rng(seed, t)
        if rng is None:
            picks = _spread_picks(coded, dim)
        else:
            picks = list(rng.integers(len(coded), size=dim))
        fams = [coded[p] for p in picks]
        groups: dict[tuple, list[int]] = {}
        for r, fam in enumerate(fams):
            key = tuple(cls[fam[i]] for i, cls in pair_classes)
            groups.setdefault(key, []).append(r)
        blocks = list(groups.values())
        v = np.eye(dim, dtype=complex) if rng is None else random_unitary(rng, dim)
        members = []
        for i, leg in enumerate(legs):
            w = np.zeros((dim, dim), dtype=complex)
            for blk in blocks:
                b = len(blk)
                if rng is not None:
                    sub = random_unitary(rng, b)
                elif i == 0:
                    sub = np.eye(b, dtype=complex)
                else:
                    sub = np.diag(np.exp(1j * np.pi * (i - 1) * np.arange(b) / (b + 1))) @ _dft(b)
                w[np.ix_(blk, blk)] = sub
            u = v @ w
            assignment = [leg.codomain.points[fam[i]] for fam in fams]
            members.append(diagonal_partition(leg.codomain, assignment, u))
        return MatrixFamily(cone, tuple(members))

    def probe(t: int):
        fam = build(t)
        try:
            lift_family(fam)
        except NonCommuting as exc:
            return NoncommutingWitness(fam, t, exc.pair, exc.residual)
        except (NotCompatible, NotALift, NotSeparating):
            return None
        return None

    hit = first_hit(probe, trials, jobs)
    return None if hit is None else hit[1]
