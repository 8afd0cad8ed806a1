"""Words in the free group on ``a`` and ``b``.

Words are plain strings over ``a``, ``A``, ``b``, ``B`` with ``A = a^-1``
and ``B = b^-1``.  The map :func:`zeta` counts, on the cyclically reduced
word read cyclically, occurrences of ``ab`` minus occurrences of ``BA``.  It
is conjugation invariant and additive on powers, hence a piecewise map
that preserves conjugation, yet ``zeta(a) = zeta(b) = 0`` and
``zeta(ab) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NotCommuting

ALPHABET = "aAbB"
_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def check_word(w: str) -> str:
    bad = set(w) - set(ALPHABET)
    if bad:
        raise InputError(f"letters {sorted(bad)} are not in {{a, A, b, B}}")
    return w


def reduce(w: str) -> str:
    """Free reduction: cancel adjacent inverse pairs until none remain."""
    out: list[str] = []
    for c in check_word(w):
        if out and out[-1] == _INV[c]:
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def inverse(w: str) -> str:
    return "".join(_INV[c] for c in reversed(check_word(w)))


def multiply(*words: str) -> str:
    return reduce("".join(words))


def power(w: str, k: int) -> str:
    w = reduce(w)
    return reduce(w * k) if k >= 0 else reduce(inverse(w) * -k)


def conjugate(w: str, g: str) -> str:
    """``g^-1 w g``."""
    return multiply(inverse(g), w, g)


def split_conjugator(w: str) -> tuple[str, str]:
    """Write a reduced word as ``p c p^-1`` with ``c`` cyclically reduced; returns ``(p, c)``."""
    w = reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == _INV[w[j - 1]]:
        i += 1
        j -= 1
    return w[:i], w[i:j]


def least_rotation(w: str) -> str:
    return min((w[k:] + w[:k] for k in range(len(w))), default="")


def cyclic_reduce(w: str) -> str:
    """Canonical cyclic word: the least rotation of the cyclically reduced core."""
    return least_rotation(split_conjugator(w)[1])


def zeta(w: str) -> int:
    """``#(a directly before b) - #(B directly before A)`` on the cyclic core, with wraparound."""
    core = split_conjugator(w)[1]
    n = len(core)
    total = 0
    for k in range(n):
        pair = core[k] + core[(k + 1) % n]
        if n > 1 and pair == "ab":
            total += 1
        elif n > 1 and pair == "BA":
            total -= 1
    return total


def commute_free(v: str, w: str) -> bool:
    return multiply(v, w) == multiply(w, v)


def primitive_root(w: str) -> tuple[str, int]:
    """``(u, k)`` with ``u`` not a proper power and ``u^k = w``, ``k > 0``; ``("", 0)`` for the empty word."""
    p, c = split_conjugator(w)
    if not c:
        return "", 0
    n = len(c)
    for d in range(1, n + 1):
        if n % d == 0 and c[:d] * (n // d) == c:
            return multiply(p, c[:d], inverse(p)), n // d
    raise AssertionError("unreachable")


def common_root(v: str, w: str) -> tuple[str, int, int]:
    """``(u, m, n)`` with ``u^m = v``, ``u^n = w`` and ``u`` primitive.

    ``u`` is the primitive root of ``v`` (so ``m > 0``) when ``v`` is
    nonempty, else of ``w``.
    """
    v, w = reduce(v), reduce(w)
    if not commute_free(v, w):
        raise NotCommuting(f"{v!r} and {w!r} do not commute")
    if not v and not w:
        return "", 0, 0
    u, m = primitive_root(v) if v else primitive_root(w)
    if not v:
        return u, 0, m
    if not w:
        return u, m, 0
    u2, n = primitive_root(w)
    if u2 == inverse(u):
        n = -n
    elif u2 != u:
        raise NotCommuting(f"{v!r} and {w!r} have different primitive roots")
    return u, m, n


# --- sampling and the counterexample report --------------------------------


def random_reduced_word(rng: np.random.Generator, length: int) -> str:
    out: list[str] = []
    while len(out) < length:
        c = ALPHABET[int(rng.integers(4))]
        if out and out[-1] == _INV[c]:
            continue
        out.append(c)
    return "".join(out)


@dataclass
class ZetaReport:
    samples: int
    seed: int
    max_length: int
    max_power: int
    power_failures: list = field(default_factory=list)
    conjugation_failures: list = field(default_factory=list)
    inversion_failures: list = field(default_factory=list)
    generators: dict = field(default_factory=dict)

    @property
    def power_law(self) -> bool:
        return not self.power_failures

    @property
    def conjugation_invariant(self) -> bool:
        return not self.conjugation_failures

    @property
    def not_a_homomorphism(self) -> bool:
        g = self.generators
        return g.get("a") == 0 and g.get("b") == 0 and g.get("ab") == 1

    @property
    def passed(self) -> bool:
        return self.power_law and self.conjugation_invariant and self.not_a_homomorphism and not self.inversion_failures


def verify_zeta_counterexample(
    samples: int = 10**4, seed: int = 0, max_length: int = 20, max_power: int = 10
) -> ZetaReport:
    """Check the three properties of ``zeta`` on seeded samples.

    (i) ``zeta(u^k) = k zeta(u)``; (ii) ``zeta(g^-1 w g) = zeta(w)``;
    (iii) ``zeta(a) = zeta(b) = 0`` while ``zeta(ab) = 1``.  Also records
    ``zeta(w^-1) = -zeta(w)``.
    """
    rep = ZetaReport(samples, seed, max_length, max_power)
    rep.generators = {"a": zeta("a"), "b": zeta("b"), "ab": zeta("ab")}
    for s in range(samples):
        rng = np.random.default_rng([seed, s])
        u = random_reduced_word(rng, int(rng.integers(0, max_length + 1)))
        k = int(rng.integers(-max_power, max_power + 1))
        w = random_reduced_word(rng, int(rng.integers(0, max_length + 1)))
        g = random_reduced_word(rng, int(rng.integers(0, max_length + 1)))
        if zeta(power(u, k)) != k * zeta(u):
            rep.power_failures.append((u, k))
        if zeta(conjugate(w, g)) != zeta(w):
            rep.conjugation_failures.append((w, g))
        if zeta(inverse(w)) != -zeta(w):
            rep.inversion_failures.append(w)
    return rep
