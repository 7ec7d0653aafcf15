"""Exact arithmetic primitives shared by every engine.

All values are `fractions.Fraction` (arbitrary-precision, always reduced);
no floating point is used anywhere in this package.  Multi-indices are the
finitely supported integer sequences that index kappa monomials: the index
``{1: 2, 3: 1}`` stands for kappa_1^2 * kappa_3.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, factorial

__all__ = [
    "MultiIndex",
    "double_factorial",
    "multiindex_norms",
    "multiindex_binomial",
    "enumerate_sub_multiindices",
    "enumerate_triple_splits",
    "multiindex_multinomial",
    "invert_coefficient_family",
    "CoefficientFamilyInverse",
]


def double_factorial(k: int) -> int:
    """k!! with the empty-product conventions (-1)!! = 0!! = 1."""
    if k < -1:
        raise ValueError(f"double factorial undefined for k={k} < -1")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


class MultiIndex:
    """Finitely supported map i -> m_i (i >= 1, m_i >= 1 when stored).

    Immutable and hashable; used as the exponent vector of a kappa
    monomial and as the summation variable of all coefficient families.
    """

    __slots__ = ("entries",)

    def __init__(self, entries=()):
        if isinstance(entries, dict):
            items = entries.items()
        else:
            items = entries
        cleaned = {}
        for i, m in items:
            if i < 1:
                raise ValueError(f"multi-index positions start at 1, got {i}")
            if m < 0:
                raise ValueError(f"negative multiplicity {m} at position {i}")
            if m:
                cleaned[i] = cleaned.get(i, 0) + m
        object.__setattr__(self, "entries", tuple(sorted(cleaned.items())))

    def __setattr__(self, name, value):
        raise AttributeError("MultiIndex is immutable")

    @property
    def weight(self) -> int:
        """|m| = sum_i i*m_i."""
        return sum(i * m for i, m in self.entries)

    @property
    def size(self) -> int:
        """||m|| = sum_i m_i."""
        return sum(m for _, m in self.entries)

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        return isinstance(other, MultiIndex) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __getitem__(self, i: int) -> int:
        for j, m in self.entries:
            if j == i:
                return m
        return 0

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        out = dict(self.entries)
        for i, m in other.entries:
            out[i] = out.get(i, 0) + m
        return MultiIndex(out)

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        out = dict(self.entries)
        for i, m in other.entries:
            out[i] = out.get(i, 0) - m
            if out[i] < 0:
                raise ValueError(f"{self} - {other} has a negative entry")
        return MultiIndex(out)

    def factorial(self) -> int:
        """m! = prod_i m_i!."""
        out = 1
        for _, m in self.entries:
            out *= factorial(m)
        return out

    def __repr__(self):
        if not self.entries:
            return "MultiIndex()"
        body = ", ".join(f"{i}: {m}" for i, m in self.entries)
        return f"MultiIndex({{{body}}})"

    def __str__(self):
        return ",".join(f"{i}:{m}" for i, m in self.entries) if self.entries else "-"

    @classmethod
    def parse(cls, text: str) -> "MultiIndex":
        """Parse the CLI syntax 'i:mult,i:mult'; '' or '-' is the empty index."""
        text = text.strip()
        if text in ("", "-"):
            return cls()
        pairs = []
        for chunk in text.split(","):
            i, _, m = chunk.partition(":")
            pairs.append((int(i), int(m) if m else 1))
        return cls(pairs)


EMPTY = MultiIndex()


def multiindex_norms(m: MultiIndex) -> tuple[int, int]:
    """Return (weight |m|, size ||m||) in one pass."""
    w = s = 0
    for i, mult in m.entries:
        w += i * mult
        s += mult
    return w, s


def multiindex_binomial(b: MultiIndex, t: MultiIndex) -> int:
    """prod_i C(b_i, t_i); zero when t exceeds b in any slot."""
    out = 1
    bmap = dict(b.entries)
    for i, ti in t.entries:
        out *= comb(bmap.get(i, 0), ti)
        if out == 0:
            return 0
    return out


def multiindex_multinomial(b: MultiIndex, parts: tuple[MultiIndex, ...]) -> int:
    """prod_i b_i! / (a_1(i)! ... a_n(i)!) for a split sum(parts) = b."""
    out = 1
    for i, bi in b.entries:
        out *= factorial(bi)
        for p in parts:
            out //= factorial(p[i])
    return out


def enumerate_sub_multiindices(b: MultiIndex):
    """All ordered pairs (L, L') with L + L' = b, lexicographic in L.

    Yields exactly prod_i (b_i + 1) pairs; the order is deterministic so
    that memo tables fill identically across runs.
    """
    positions = [i for i, _ in b.entries]
    ranges = [range(m + 1) for _, m in b.entries]
    for choice in product(*ranges):
        left = MultiIndex(
            [(i, c) for i, c in zip(positions, choice)])
        right = b - left
        yield left, right


def enumerate_triple_splits(b: MultiIndex):
    """All ordered triples (L, e, f) with L + e + f = b, deterministic order."""
    for left, rest in enumerate_sub_multiindices(b):
        for e, f in enumerate_sub_multiindices(rest):
            yield left, e, f


def multiindices_of_weight(w: int) -> list[MultiIndex]:
    """All multi-indices of weight exactly w (partitions of w by part counts)."""
    if w == 0:
        return [EMPTY]
    out = []

    def rec(rem, cap, counts):
        if rem == 0:
            out.append(MultiIndex(dict(counts)))
            return
        for p in range(min(rem, cap), 0, -1):
            counts[p] = counts.get(p, 0) + 1
            rec(rem - p, p, counts)
            counts[p] -= 1
            if not counts[p]:
                del counts[p]

    rec(w, w, {})
    return out


def multiindices_up_to_weight(bmax: int) -> list[MultiIndex]:
    """All multi-indices of weight <= bmax, the empty one first."""
    out = []
    for w in range(bmax + 1):
        out.extend(multiindices_of_weight(w))
    return out


class CoefficientFamilyInverse:
    """Inverse of a coefficient family under multi-index convolution.

    Given beta with beta(0) != 0, the inverse alpha is the unique family
    with alpha(0)*beta(0) = 1 and sum_{L+L'=b} alpha(L)*beta(L') = 0 for
    every b != 0.  Values are memoized by multi-index and computed on
    demand, so the family is usable up to any weight bound.
    """

    def __init__(self, beta):
        self._beta = beta
        b0 = beta(EMPTY)
        if b0 == 0:
            raise ValueError("family has beta(0) = 0; no inverse exists")
        self._cache = {EMPTY: Fraction(1, 1) / b0}

    def __call__(self, b: MultiIndex) -> Fraction:
        hit = self._cache.get(b)
        if hit is not None:
            return hit
        acc = Fraction(0)
        for left, right in enumerate_sub_multiindices(b):
            if not right:
                continue
            acc += self(left) * self._beta(right)
        val = -acc / self._beta(EMPTY)
        self._cache[b] = val
        return val


def invert_coefficient_family(beta) -> CoefficientFamilyInverse:
    """Memoized inverse family of ``beta`` (see CoefficientFamilyInverse)."""
    return CoefficientFamilyInverse(beta)
