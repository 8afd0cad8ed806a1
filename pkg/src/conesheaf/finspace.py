"""Finite spaces, maps between them, cones, pushouts and compatible point families.

A finite discrete space stands in for a compact Hausdorff space; every map of
finite sets is continuous, so all constructions here are purely combinatorial.
Point labels are strings and are always kept in sorted order, which makes
every enumeration below deterministic.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CompositionMismatch, SearchBudgetExceeded

DEFAULT_NODE_BUDGET = 10**7


@dataclass(frozen=True)
class FinSpace:
    """A finite set of point labels.  Equality ignores ``name``."""

    name: str = field(compare=False)
    points: tuple[str, ...]

    def __post_init__(self):
        pts = tuple(sorted(str(p) for p in self.points))
        if len(set(pts)) != len(pts):
            raise ValueError(f"space {self.name!r} has duplicate point labels")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_index", {p: k for k, p in enumerate(pts)})

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[str]:
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return p in self._index

    def index(self, p: str) -> int:
        return self._index[p]

    @classmethod
    def of_size(cls, n: int, name: str | None = None) -> "FinSpace":
        return cls(name or str(n), tuple(str(k) for k in range(n)))


@dataclass(frozen=True)
class FinMap:
    """A total function ``domain -> codomain``.

    ``images[k]`` is the image of ``domain.points[k]``.
    """

    domain: FinSpace
    codomain: FinSpace
    images: tuple[str, ...]

    def __post_init__(self):
        imgs = tuple(str(y) for y in self.images)
        if len(imgs) != len(self.domain):
            raise ValueError("map must assign exactly one image to every domain point")
        for y in imgs:
            if y not in self.codomain:
                raise ValueError(f"image {y!r} not in codomain {self.codomain.name!r}")
        object.__setattr__(self, "images", imgs)
        object.__setattr__(
            self, "codes", tuple(self.codomain.index(y) for y in imgs)
        )

    @classmethod
    def from_dict(
        cls, domain: FinSpace, codomain: FinSpace, mapping: Mapping[str, str]
    ) -> "FinMap":
        missing = [x for x in domain if x not in mapping]
        if missing:
            raise ValueError(f"map is not total; missing {missing}")
        extra = [x for x in mapping if x not in domain]
        if extra:
            raise ValueError(f"map assigns points outside the domain: {extra}")
        return cls(domain, codomain, tuple(mapping[x] for x in domain))

    def __call__(self, x: str) -> str:
        return self.images[self.domain.index(x)]

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.domain.points, self.images))

    def image(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.images)))

    def fiber(self, y: str) -> tuple[str, ...]:
        return tuple(x for x, fx in zip(self.domain.points, self.images) if fx == y)

    def kernel(self) -> tuple[tuple[int, ...], ...]:
        """The induced partition of the domain, as sorted blocks of point indices."""
        blocks: dict[int, list[int]] = {}
        for k, c in enumerate(self.codes):
            blocks.setdefault(c, []).append(k)
        return tuple(sorted(tuple(b) for b in blocks.values()))

    def is_injective(self) -> bool:
        return len(set(self.codes)) == len(self.codes)

    def is_surjective(self) -> bool:
        return len(set(self.codes)) == len(self.codomain)


def identity(space: FinSpace) -> FinMap:
    return FinMap(space, space, space.points)


def compose(f: FinMap, g: FinMap) -> FinMap:
    """Return ``g . f`` (first ``f``, then ``g``)."""
    if f.codomain != g.domain:
        raise CompositionMismatch(
            f"cannot compose: codomain {f.codomain.name!r} != domain {g.domain.name!r}"
        )
    return FinMap(f.domain, g.codomain, tuple(g.images[c] for c in f.codes))


def all_maps(domain: FinSpace, codomain: FinSpace) -> Iterator[FinMap]:
    for imgs in itertools.product(codomain.points, repeat=len(domain)):
        yield FinMap(domain, codomain, imgs)


def factors_through(g: FinMap, f: FinMap) -> bool:
    """True iff ``g = m . f`` for some map ``m`` (both maps share a domain)."""
    seen: dict[int, int] = {}
    for cf, cg in zip(f.codes, g.codes):
        if seen.setdefault(cf, cg) != cg:
            return False
    return True


def factorization(g: FinMap, f: FinMap) -> FinMap | None:
    """The map ``m`` with ``g = m . f``, sending points off ``im(f)`` to the first target point."""
    if not factors_through(g, f):
        return None
    if len(f.codomain) and not len(g.codomain):
        return None
    table = dict(zip(f.images, g.images))
    fill = g.codomain.points[0] if len(g.codomain) else None
    return FinMap(f.codomain, g.codomain, tuple(table.get(y, fill) for y in f.codomain))


@dataclass(frozen=True)
class Cone:
    """A family of maps out of a common apex.  An empty ``legs`` tuple is the empty cone."""

    apex: FinSpace
    legs: tuple[FinMap, ...]

    def __post_init__(self):
        legs = tuple(self.legs)
        for k, leg in enumerate(legs):
            if leg.domain != self.apex:
                raise ValueError(f"leg {k} does not start at the apex")
        object.__setattr__(self, "legs", legs)

    def __len__(self) -> int:
        return len(self.legs)

    @property
    def spaces(self) -> tuple[FinSpace, ...]:
        return tuple(leg.codomain for leg in self.legs)


# --- quotients and pushouts -------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for a in range(len(self.parent)):
            out.setdefault(self.find(a), []).append(a)
        return list(out.values())


@dataclass(frozen=True)
class Quotient:
    """A partition of ``carrier`` into classes, each represented by its least label."""

    carrier: FinSpace
    classes: tuple[tuple[str, ...], ...]

    @property
    def representatives(self) -> tuple[str, ...]:
        return tuple(c[0] for c in self.classes)

    @classmethod
    def from_blocks(cls, carrier: FinSpace, blocks: Iterable[Iterable[str]]) -> "Quotient":
        classes = sorted(tuple(sorted(b)) for b in blocks)
        seen = [p for c in classes for p in c]
        if sorted(seen) != list(carrier.points) or any(not c for c in classes):
            raise ValueError("classes must be nonempty, disjoint and cover the carrier")
        return cls(carrier, tuple(classes))

    def quotient_map(self, name: str | None = None) -> FinMap:
        target = FinSpace(name or f"{self.carrier.name}/~", self.representatives)
        rep = {p: c[0] for c in self.classes for p in c}
        return FinMap(self.carrier, target, tuple(rep[p] for p in self.carrier))


@dataclass(frozen=True)
class PushoutResult:
    space: FinSpace
    inj_left: FinMap
    inj_right: FinMap
    # class ids of the codomain points of each side, indexed like the codomain points
    left_classes: tuple[int, ...]
    right_classes: tuple[int, ...]
    classes: tuple[tuple[tuple[str, str], ...], ...]


@functools.lru_cache(maxsize=8192)
def pushout(f: FinMap, g: FinMap) -> PushoutResult:
    """Pushout of ``Y <-f- X -g-> Z``: the quotient of ``Y + Z`` by ``f(x) ~ g(x)``.

    Each class is labelled by its least point label.  If two classes would end
    up with the same label, all labels are prefixed by the side (``L:``/``R:``)
    of that least element instead.
    """
    if f.domain != g.domain:
        raise CompositionMismatch("pushout needs two maps with a common domain")
    Y, Z = f.codomain, g.codomain
    ny = len(Y)
    uf = _UnionFind(ny + len(Z))
    for cf, cg in zip(f.codes, g.codes):
        uf.union(cf, ny + cg)

    tagged = [("L", y) for y in Y.points] + [("R", z) for z in Z.points]
    blocks = [sorted(((tagged[a][1], tagged[a][0]) for a in b)) for b in uf.blocks()]
    plain = [b[0][0] for b in blocks]
    if len(set(plain)) == len(plain):
        labels = plain
    else:
        labels = [f"{b[0][1]}:{b[0][0]}" for b in blocks]
    order = sorted(range(len(blocks)), key=lambda k: labels[k])
    labels = [labels[k] for k in order]
    blocks = [blocks[k] for k in order]

    space = FinSpace(f"{Y.name}+{Z.name}", labels)
    class_of: dict[tuple[str, str], int] = {}
    for cid, b in enumerate(blocks):
        for label, side in b:
            class_of[(side, label)] = cid
    left = tuple(class_of[("L", y)] for y in Y.points)
    right = tuple(class_of[("R", z)] for z in Z.points)
    return PushoutResult(
        space=space,
        inj_left=FinMap(Y, space, tuple(labels[c] for c in left)),
        inj_right=FinMap(Z, space, tuple(labels[c] for c in right)),
        left_classes=left,
        right_classes=right,
        classes=tuple(tuple((side, label) for label, side in b) for b in blocks),
    )


def pushforward(cone: Cone, h: FinMap) -> Cone:
    """Push every leg of ``cone`` out along ``h``; the result is a cone on ``h.codomain``."""
    return Cone(h.codomain, tuple(pushout(leg, h).inj_right for leg in cone.legs))


# --- compatible families ----------------------------------------------------


def _pair_constraints(cone: Cone) -> dict[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]]:
    out = {}
    legs = cone.legs
    for i, j in itertools.combinations(range(len(legs)), 2):
        po = pushout(legs[i], legs[j])
        out[(i, j)] = (po.left_classes, po.right_classes)
    return out


class _FamilySearch:
    """Backtracking with maintained arc consistency over pairwise pushout constraints.

    Variables are the legs, values are codomain point indices.  The diagonal
    constraint (pushout of a leg with itself) only keeps points in the image,
    so it is applied once to the initial domains.
    """

    def __init__(self, cone: Cone, budget: int):
        self.cone = cone
        self.budget = budget
        self.nodes = 0
        self.m = len(cone.legs)
        self.cons = _pair_constraints(cone)

    def _classes(self, i: int, j: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if i < j:
            return self.cons[(i, j)]
        right, left = self.cons[(j, i)]
        return left, right

    def _revise(self, doms: list[set[int]], i: int, j: int) -> bool:
        ci, cj = self._classes(i, j)
        support = {cj[z] for z in doms[j]}
        keep = {y for y in doms[i] if ci[y] in support}
        if len(keep) != len(doms[i]):
            doms[i] = keep
            return True
        return False

    def _propagate(self, doms: list[set[int]], free: Sequence[int], touched: Iterable[int]) -> bool:
        free_set = set(free)
        queue = deque((i, j) for j in touched for i in free if i != j)
        queued = set(queue)
        while queue:
            i, j = queue.popleft()
            queued.discard((i, j))
            if self._revise(doms, i, j):
                if not doms[i]:
                    return False
                for k in free_set:
                    if k != i and k != j and (k, i) not in queued:
                        queue.append((k, i))
                        queued.add((k, i))
        return True

    def run(self) -> list[tuple[int, ...]]:
        doms = [set(leg.codes) for leg in self.cone.legs]
        if any(not d for d in doms) and self.m:
            return []
        all_vars = list(range(self.m))
        if not self._propagate(doms, all_vars, all_vars):
            return []
        out: list[tuple[int, ...]] = []
        self._search(doms, 0, [], out)
        return out

    def _search(self, doms, k, partial, out):
        if k == self.m:
            out.append(tuple(partial))
            return
        for v in sorted(doms[k]):
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetExceeded(
                    f"compatible-family search exceeded {self.budget} nodes", self.nodes
                )
            new = [set(d) for d in doms]
            new[k] = {v}
            if self._propagate(new, range(k + 1, self.m), [k]):
                partial.append(v)
                self._search(new, k + 1, partial, out)
                partial.pop()


def enumerate_compatible_families(
    cone: Cone, budget: int = DEFAULT_NODE_BUDGET
) -> list[tuple[str, ...]]:
    """All compatible point families of ``cone``, in lexicographic order.

    A family picks one point in each leg codomain such that every two choices
    agree in the pushout of the corresponding legs.
    """
    search = _FamilySearch(cone, budget)
    coded = search.run()
    spaces = cone.spaces
    return [tuple(spaces[i].points[c] for i, c in enumerate(fam)) for fam in coded]


def canonical_map_to_families(cone: Cone) -> dict[str, tuple[str, ...]]:
    return {x: tuple(leg(x) for leg in cone.legs) for x in cone.apex}


def is_jointly_injective(cone: Cone) -> bool:
    fams = canonical_map_to_families(cone)
    return len(set(fams.values())) == len(fams)


def is_compatible_family(cone: Cone, family: Sequence[str]) -> bool:
    """Direct check of the pairwise pushout conditions (no search)."""
    legs = cone.legs
    if len(family) != len(legs):
        return False
    for i, leg in enumerate(legs):
        if family[i] not in set(leg.images):
            return False
    for i, j in itertools.combinations(range(len(legs)), 2):
        po = pushout(legs[i], legs[j])
        if po.inj_left(family[i]) != po.inj_right(family[j]):
            return False
    return True


# --- small constructors -----------------------------------------------------


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items`` in a fixed order (restricted growth strings)."""
    n = len(items)
    if n == 0:
        yield []
        return

    def rec(k: int, rgs: list[int], nblocks: int):
        if k == n:
            blocks: list[list] = [[] for _ in range(nblocks)]
            for item, b in zip(items, rgs):
                blocks[b].append(item)
            yield blocks
            return
        for b in range(nblocks + 1):
            rgs.append(b)
            yield from rec(k + 1, rgs, max(nblocks, b + 1))
            rgs.pop()

    yield from rec(1, [0], 1)


def product_space(spaces: Sequence[FinSpace], name: str | None = None) -> FinSpace:
    pts = ["(" + ",".join(t) + ")" for t in itertools.product(*(s.points for s in spaces))]
    return FinSpace(name or "x".join(s.name for s in spaces), pts)


def tupling(legs: Sequence[FinMap]) -> FinMap:
    """The pairing ``(f_1, ..., f_n): X -> Y_1 x ... x Y_n``."""
    target = product_space([leg.codomain for leg in legs])
    domain = legs[0].domain
    imgs = tuple(
        "(" + ",".join(leg.images[k] for leg in legs) + ")" for k in range(len(domain))
    )
    return FinMap(domain, target, imgs)


def cone_from_dicts(
    apex: FinSpace, legs: Sequence[tuple[FinSpace, Mapping[str, str]]]
) -> Cone:
    return Cone(apex, tuple(FinMap.from_dict(apex, cod, m) for cod, m in legs))
