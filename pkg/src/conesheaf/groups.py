"""Finite groups as piecewise groups with a self-action.

A group is read from its Cayley table.  Viewed piecewise, only products of
commuting elements are remembered; the self-action ``a(g)(h) = g^-1 h g``
adds back part of the noncommutative structure.  This module checks the
self-action axioms, checks whether a map of elements is an almost group
homomorphism, and enumerates all almost endomorphisms of small groups.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvalidGroup, SearchBudgetExceeded

IS_GROUP_HOM = "IS_GROUP_HOM"
NOT_GROUP_HOM = "NOT_GROUP_HOM"


@dataclass(frozen=True)
class FiniteGroup:
    """Cayley table on indices ``0..order-1``; validated on construction."""

    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()
    name: str = field(default="G", compare=False)
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        n = len(table)
        if n == 0:
            raise InvalidGroup("a group needs at least one element")
        if any(len(row) != n for row in table):
            raise InvalidGroup("Cayley table must be square")
        if any(not 0 <= x < n for row in table for x in row):
            raise InvalidGroup("Cayley table entries out of range")
        labels = tuple(str(x) for x in self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n or len(set(labels)) != n:
            raise InvalidGroup("need one distinct label per element")
        ids = [e for e in range(n) if all(table[e][g] == g == table[g][e] for g in range(n))]
        if not ids:
            raise InvalidGroup("no identity element")
        e = ids[0]
        inv = []
        for g in range(n):
            cands = [h for h in range(n) if table[g][h] == e and table[h][g] == e]
            if not cands:
                raise InvalidGroup(f"element {labels[g]} has no inverse")
            inv.append(cands[0])
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise InvalidGroup(f"not associative at ({labels[a]}, {labels[b]}, {labels[c]})")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def commute(self, g: int, h: int) -> bool:
        return self.table[g][h] == self.table[h][g]

    def conj(self, g: int, h: int) -> int:
        """``g^-1 h g``."""
        return self.table[self.table[self.inverse[g]][h]][g]

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverse[g], -k
        out = self.identity
        for _ in range(k):
            out = self.table[out][g]
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.table[x][g]
            k += 1
        return k

    def is_abelian(self) -> bool:
        return all(self.commute(g, h) for g in range(self.order) for h in range(g))

    def centralizer(self, g: int) -> tuple[int, ...]:
        return tuple(h for h in range(self.order) if self.commute(g, h))


# --- builders ---------------------------------------------------------------


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)), name=f"Z{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup, name: str | None = None) -> FiniteGroup:
    pairs = [(a, b) for a in range(g.order) for b in range(h.order)]
    index = {p: k for k, p in enumerate(pairs)}
    table = tuple(
        tuple(index[(g.mul(a, c), h.mul(b, d))] for (c, d) in pairs) for (a, b) in pairs
    )
    labels = tuple(f"({g.labels[a]},{h.labels[b]})" for a, b in pairs)
    return FiniteGroup(table, labels, name or f"{g.name}x{h.name}")


def from_permutations(generators: Sequence[Sequence[int]], name: str = "G") -> FiniteGroup:
    """Group generated by permutations; product ``p.q`` applies ``p`` first."""
    gens = [tuple(p) for p in generators]
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in gens:
                r = tuple(q[p[x]] for x in range(n))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    elems = sorted(seen)
    index = {p: k for k, p in enumerate(elems)}
    table = tuple(tuple(index[tuple(q[p[x]] for x in range(n))] for q in elems) for p in elems)
    return FiniteGroup(table, tuple("".join(map(str, p)) for p in elems), name)


def symmetric3() -> FiniteGroup:
    return from_permutations([(1, 0, 2), (1, 2, 0)], "S3")


def dihedral4() -> FiniteGroup:
    """Symmetries of a square, order 8."""
    return from_permutations([(1, 2, 3, 0), (3, 2, 1, 0)], "D4")


def quaternion() -> FiniteGroup:
    units = ["1", "i", "j", "k"]
    # unit products: (sign, unit)
    prod = {
        ("1", u): (1, u) for u in units
    } | {(u, "1"): (1, u) for u in units} | {
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    }
    elems = [(s, u) for u in units for s in (1, -1)]
    index = {e: k for k, e in enumerate(elems)}

    def mul(x, y):
        s, u = prod[(x[1], y[1])]
        return (x[0] * y[0] * s, u)

    table = tuple(tuple(index[mul(x, y)] for y in elems) for x in elems)
    labels = tuple(("" if s > 0 else "-") + u for s, u in elems)
    return FiniteGroup(table, labels, "Q8")


def small_groups() -> dict[str, FiniteGroup]:
    """One group from each isomorphism class of order at most 8."""
    z2 = cyclic(2)
    out = {f"Z{n}": cyclic(n) for n in range(1, 9)}
    out["Z2xZ2"] = direct_product(z2, z2, "Z2xZ2")
    out["S3"] = symmetric3()
    out["Z2xZ4"] = direct_product(z2, cyclic(4), "Z2xZ4")
    out["Z2xZ2xZ2"] = direct_product(out["Z2xZ2"], z2, "Z2xZ2xZ2")
    out["D4"] = dihedral4()
    out["Q8"] = quaternion()
    return out


# --- self-actions -----------------------------------------------------------


@dataclass(frozen=True)
class GroupSelfAction:
    """``action[g][h]`` is the image of ``h`` under the map assigned to ``g``."""

    group: FiniteGroup
    action: tuple[tuple[int, ...], ...]

    def __call__(self, g: int, h: int) -> int:
        return self.action[g][h]


def conjugation_self_action(group: FiniteGroup) -> GroupSelfAction:
    n = group.order
    return GroupSelfAction(group, tuple(tuple(group.conj(g, h) for h in range(n)) for g in range(n)))


@dataclass(frozen=True)
class GroupWitness:
    kind: str
    elements: tuple[int, ...]
    labels: tuple[str, ...]
    detail: str = ""


@dataclass(frozen=True)
class GroupCheck:
    passed: bool
    witness: GroupWitness | None = None

    def __bool__(self) -> bool:
        return self.passed


def _wit(kind: str, group: FiniteGroup, elems: Sequence[int], detail: str = "") -> GroupWitness:
    return GroupWitness(kind, tuple(elems), tuple(group.labels[x] for x in elems), detail)


def piecewise_hom_witness(
    zeta: Sequence[int], source: FiniteGroup, target: FiniteGroup
) -> GroupWitness | None:
    """First commuting pair whose images fail to commute or to multiply correctly."""
    n = source.order
    for g in range(n):
        for h in range(n):
            if not source.commute(g, h):
                continue
            if not target.commute(zeta[g], zeta[h]):
                return _wit("PIECEWISE_COMMUTE", source, (g, h))
            if zeta[source.mul(g, h)] != target.mul(zeta[g], zeta[h]):
                return _wit("PIECEWISE_PRODUCT", source, (g, h))
    return None


def verify_group_self_action(act: GroupSelfAction) -> GroupCheck:
    """Exhaustive check: each ``a(g)`` a piecewise automorphism, fixed points = centralizer,
    and ``a(gh) = a(g) a(h)`` for commuting ``g, h``."""
    G = act.group
    n = G.order
    for g in range(n):
        row = act.action[g]
        if sorted(row) != list(range(n)):
            return GroupCheck(False, _wit("NOT_BIJECTIVE", G, (g,)))
        w = piecewise_hom_witness(row, G, G)
        if w is not None:
            return GroupCheck(False, GroupWitness("NOT_PIECEWISE_" + w.kind, (g,) + w.elements, (G.labels[g],) + w.labels))
    for g in range(n):
        for h in range(n):
            if G.commute(g, h) != (act(g, h) == h):
                return GroupCheck(False, _wit("FIXED_POINT", G, (g, h)))
            if G.commute(g, h):
                gh = G.mul(g, h)
                if any(act(gh, x) != act(g, act(h, x)) for x in range(n)):
                    return GroupCheck(False, _wit("ACTION_MULTIPLICATIVITY", G, (g, h)))
    return GroupCheck(True)


def is_group_hom(zeta: Sequence[int], source: FiniteGroup, target: FiniteGroup) -> bool:
    n = source.order
    return all(
        zeta[source.mul(g, h)] == target.mul(zeta[g], zeta[h]) for g in range(n) for h in range(n)
    )


@dataclass(frozen=True)
class AlmostGroupHomReport:
    passed: bool
    piecewise: bool
    preserves_action: bool
    witness: GroupWitness | None = None
    group_hom: bool = False

    def __bool__(self) -> bool:
        return self.passed


def verify_almost_group_hom(
    zeta: Sequence[int],
    source: FiniteGroup,
    target: FiniteGroup | None = None,
    source_action: GroupSelfAction | None = None,
    target_action: GroupSelfAction | None = None,
) -> AlmostGroupHomReport:
    """Exhaustive check of the piecewise clauses and ``b(z(g))(z(h)) = z(a(g)(h))``.

    Actions default to conjugation.
    """
    target = source if target is None else target
    zeta = tuple(int(z) for z in zeta)
    if len(zeta) != source.order or any(not 0 <= z < target.order for z in zeta):
        raise InvalidGroup("map table does not match the groups")
    a = source_action or conjugation_self_action(source)
    b = target_action or conjugation_self_action(target)
    pw = piecewise_hom_witness(zeta, source, target)
    act_wit = None
    for g in range(source.order):
        for h in range(source.order):
            if b(zeta[g], zeta[h]) != zeta[a(g, h)]:
                act_wit = _wit(
                    "ACTION", source, (g, h),
                    f"b(z(g))(z(h)) = {target.labels[b(zeta[g], zeta[h])]}, "
                    f"z(a(g)(h)) = {target.labels[zeta[a(g, h)]]}",
                )
                break
        if act_wit:
            break
    return AlmostGroupHomReport(
        pw is None and act_wit is None,
        pw is None,
        act_wit is None,
        pw or act_wit,
        is_group_hom(zeta, source, target),
    )


# --- enumeration ------------------------------------------------------------


@dataclass
class EndoReport:
    status: str  # COMPLETE or BUDGET
    maps: list[tuple[int, ...]]
    flags: list[str]
    nodes: int
    group: str = ""

    @property
    def group_homs(self) -> list[tuple[int, ...]]:
        return [m for m, f in zip(self.maps, self.flags) if f == IS_GROUP_HOM]


class _EndoSearch:
    def __init__(self, G: FiniteGroup, a: GroupSelfAction, budget: int):
        self.G = G
        self.a = a
        self.budget = budget
        self.nodes = 0
        n = G.order
        self.orders = [G.element_order(g) for g in range(n)]
        self.powers = [[G.power(g, k) for k in range(self.orders[g])] for g in range(n)]
        # constraints: ("p", g, h, gh) for commuting pairs; ("a", g, h, a(g)(h)) for all pairs
        cons = []
        for g in range(n):
            for h in range(n):
                if G.commute(g, h):
                    cons.append(("p", g, h, G.mul(g, h)))
                cons.append(("a", g, h, a(g, h)))
        self.by_elem: list[list[tuple]] = [[] for _ in range(n)]
        for c in cons:
            for x in set(c[1:]):
                self.by_elem[x].append(c)

    def candidates(self, g: int) -> list[int]:
        og = self.orders[g]
        return [y for y in range(self.G.order) if og % self.orders[y] == 0]

    def _ok(self, zeta: list[int], c: tuple) -> bool:
        G, a = self.G, self.a
        kind, g, h, x = c
        if zeta[g] < 0 or zeta[h] < 0 or zeta[x] < 0:
            return True
        if kind == "p":
            return G.commute(zeta[g], zeta[h]) and zeta[x] == G.mul(zeta[g], zeta[h])
        return a(zeta[g], zeta[h]) == zeta[x]

    def try_assign(self, zeta: list[int], g: int, y: int) -> list[int] | None:
        """Set ``z(g^k) = y^k``; returns the newly set elements, or None on conflict (zeta restored)."""
        new = []
        for k, gk in enumerate(self.powers[g]):
            yk = self.G.power(y, k)
            if zeta[gk] == -1:
                zeta[gk] = yk
                new.append(gk)
            elif zeta[gk] != yk:
                for x in new:
                    zeta[x] = -1
                return None
        for x in new:
            for c in self.by_elem[x]:
                if not self._ok(zeta, c):
                    for z in new:
                        zeta[z] = -1
                    return None
        return new

    def run(self, zeta: list[int], out: list[tuple[int, ...]]) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceeded("almost-endomorphism search exceeded its node budget", self.nodes)
        try:
            g = zeta.index(-1)
        except ValueError:
            out.append(tuple(zeta))
            return
        for y in self.candidates(g):
            new = self.try_assign(zeta, g, y)
            if new is None:
                continue
            self.run(zeta, out)
            for x in new:
                zeta[x] = -1


def enumerate_almost_endos(
    group: FiniteGroup,
    budget: int = 10**7,
    jobs: int = 1,
    action: GroupSelfAction | None = None,
) -> EndoReport:
    """All maps ``G -> G`` that are almost group homomorphisms, in lexicographic order.

    The identity is fixed first, then values are propagated along cyclic
    subgroups (``z(g^k) = z(g)^k``) and every constraint is checked as soon
    as its elements are assigned.  Top-level branches run independently,
    each with the full node budget; the merged result is independent of
    ``jobs``, and BUDGET is reported when the total node count exceeds the
    budget.
    """
    a = action or conjugation_self_action(group)
    root = _EndoSearch(group, a, budget)
    zeta = [-1] * group.order
    if root.try_assign(zeta, group.identity, group.identity) is None:
        return EndoReport("COMPLETE", [], [], 1, group.name)
    try:
        first = zeta.index(-1)
    except ValueError:
        return EndoReport("COMPLETE", [tuple(zeta)], [IS_GROUP_HOM], 1, group.name)

    def branch(y: int) -> tuple[list[tuple[int, ...]], int, bool]:
        s = _EndoSearch(group, a, budget)
        z = list(zeta)
        out: list[tuple[int, ...]] = []
        if s.try_assign(z, first, y) is None:
            return out, 1, False
        try:
            s.run(z, out)
        except SearchBudgetExceeded:
            return out, s.nodes, True
        return out, s.nodes, False

    cands = root.candidates(first)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(branch, cands))
    else:
        results = [branch(y) for y in cands]
    maps = sorted(m for res, _, _ in results for m in res)
    nodes = 1 + sum(n for _, n, _ in results)
    status = "BUDGET" if any(b for _, _, b in results) or nodes > budget else "COMPLETE"
    flags = [IS_GROUP_HOM if is_group_hom(m, group, group) else NOT_GROUP_HOM for m in maps]
    return EndoReport(status, maps, flags, nodes, group.name)


def all_group_endos(group: FiniteGroup) -> list[tuple[int, ...]]:
    """Group endomorphisms by brute force over images of a generating set."""
    n = group.order
    gens: list[int] = []
    span = {group.identity}
    for g in range(n):
        if g not in span:
            gens.append(g)
            frontier = list(span | {g})
            span = set(frontier)
            while True:
                more = {group.mul(x, y) for x in span for y in span} - span
                if not more:
                    break
                span |= more
    out = []
    for imgs in itertools.product(range(n), repeat=len(gens)):
        z = [-1] * n
        z[group.identity] = group.identity
        for g, y in zip(gens, imgs):
            z[g] = y
        changed = True
        while changed:
            changed = False
            for x in range(n):
                for y in range(n):
                    if z[x] >= 0 and z[y] >= 0:
                        xy = group.mul(x, y)
                        v = group.mul(z[x], z[y])
                        if z[xy] == -1:
                            z[xy] = v
                            changed = True
        if min(z) >= 0 and is_group_hom(z, group, group):
            out.append(tuple(z))
    return sorted(set(out))
