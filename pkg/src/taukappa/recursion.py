"""Mixed tau/kappa correlators by double-factorial recursion on the pivot.

The engine evaluates (2d_1+1)!! <kappa(b) prod tau_{d_j}>_g as three sums:
a pair merge of the pivot with another tau insertion, a genus-lowering
term producing tau_r tau_s at genus g-1, and a sum over ordered stable
splits of the remaining insertions, all weighted by the recursively
defined constants alpha_L and multi-index binomials.  With b = 0 this is
the classical pure-psi recursion (base cases <tau_0^3>_0 = 1 and
<tau_1>_1 = 1/24); any correlator violating the dimension constraint
sum(d) + |b| = 3g - 3 + n or stability contributes zero inside every sum.

An independent reduction oracle trades one kappa index at a time for a
psi power at a new point (inclusion-exclusion over sub-multi-indices)
and is used only to cross-check the recursion.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction
from math import comb, factorial

from .core import (EMPTY, MultiIndex, double_factorial,
                   enumerate_sub_multiindices, enumerate_triple_splits,
                   multiindex_binomial, multiindex_multinomial)

__all__ = [
    "EngineDisagreement", "CorrelatorKey", "CorrelatorTable",
    "alpha_constant", "genus0_psi_oracle", "RecursionEngine",
    "psi_correlator_wk", "mixed_correlator", "pure_kappa_volume",
    "kappa_reduction_oracle", "string_identity_residual",
    "dilaton_identity_residual", "default_engine",
]


class EngineDisagreement(Exception):
    """Two engines produced different values for the same correlator."""


def corr_key(g: int, d, b: MultiIndex) -> tuple:
    return (g, tuple(sorted(d, reverse=True)), b)


class CorrelatorKey:
    """Canonical identifier of one bracket <prod tau_d kappa(b)>_g."""

    __slots__ = ("genus", "psi_exponents", "kappa_index")

    def __init__(self, genus: int, psi_exponents, kappa_index: MultiIndex = EMPTY):
        self.genus = genus
        self.psi_exponents = tuple(sorted(psi_exponents, reverse=True))
        self.kappa_index = kappa_index

    @property
    def npoints(self) -> int:
        return len(self.psi_exponents)

    def dimension_ok(self) -> bool:
        return (sum(self.psi_exponents) + self.kappa_index.weight
                == 3 * self.genus - 3 + self.npoints)

    def __eq__(self, other):
        return (isinstance(other, CorrelatorKey)
                and self.genus == other.genus
                and self.psi_exponents == other.psi_exponents
                and self.kappa_index == other.kappa_index)

    def __hash__(self):
        return hash((self.genus, self.psi_exponents, self.kappa_index))

    def __repr__(self):
        return (f"CorrelatorKey(g={self.genus}, d={list(self.psi_exponents)}, "
                f"b={self.kappa_index})")


_LINE = re.compile(r"^(\d+)\|([0-9,]*)\|([0-9:,]*)\|(-?\d+)/(\d+)$")


class CorrelatorTable:
    """Write-once map from correlator keys to exact values.

    Every entry carries a provenance tag naming the engine that produced
    it.  Recording a key twice with the same value is a no-op (the first
    tag wins); recording a different value raises EngineDisagreement.
    Persists to a line-oriented text cache, one `g|d,...|i:b,...|num/den`
    record per line.
    """

    def __init__(self):
        self.values: dict[tuple, Fraction] = {}
        self.provenance: dict[tuple, str] = {}
        self._persisted: set[tuple] = set()

    def __len__(self):
        return len(self.values)

    def get(self, g: int, d, b: MultiIndex = EMPTY):
        return self.values.get(corr_key(g, d, b))

    def record(self, g: int, d, b: MultiIndex, value: Fraction, engine: str) -> Fraction:
        key = corr_key(g, d, b)
        old = self.values.get(key)
        if old is None:
            self.values[key] = value
            self.provenance[key] = engine
        elif old != value:
            raise EngineDisagreement(
                f"{key}: {self.provenance[key]} computed {old}, "
                f"{engine} computed {value}")
        return value

    # -- persistence -------------------------------------------------------

    @staticmethod
    def _format_line(key: tuple, value: Fraction) -> str:
        g, d, b = key
        dfield = ",".join(str(x) for x in d)
        bfield = ",".join(f"{i}:{m}" for i, m in b.entries)
        return f"{g}|{dfield}|{bfield}|{value.numerator}/{value.denominator}"

    def load(self, path: str) -> int:
        """Merge records from a cache file; returns the number loaded."""
        if not os.path.exists(path):
            return 0
        count = 0
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                m = _LINE.match(line)
                if not m:
                    raise ValueError(f"malformed cache line: {line!r}")
                g = int(m.group(1))
                d = tuple(int(x) for x in m.group(2).split(",") if x)
                b = MultiIndex.parse(m.group(3))
                val = Fraction(int(m.group(4)), int(m.group(5)))
                self.record(g, d, b, val, "cache")
                self._persisted.add(corr_key(g, d, b))
                count += 1
        return count

    def append_new(self, path: str) -> int:
        """Append entries not yet persisted; returns the number written."""
        fresh = sorted((k for k in self.values if k not in self._persisted),
                       key=lambda k: (k[0], k[1], k[2].entries))
        if not fresh:
            return 0
        with open(path, "a", encoding="ascii") as fh:
            for key in fresh:
                fh.write(self._format_line(key, self.values[key]) + "\n")
        self._persisted.update(fresh)
        return len(fresh)


# -- tautological constants -------------------------------------------------

_ALPHA_CACHE: dict[MultiIndex, Fraction] = {EMPTY: Fraction(1)}


def alpha_constant(L: MultiIndex) -> Fraction:
    """alpha_b = b! sum_{L+L'=b, L'!=0} (-1)^(||L'||-1) alpha_L
    / (L! L'! (2|L'|+1)!!), with alpha_0 = 1."""
    hit = _ALPHA_CACHE.get(L)
    if hit is not None:
        return hit
    acc = Fraction(0)
    for left, right in enumerate_sub_multiindices(L):
        if not right:
            continue
        acc += (Fraction((-1) ** (right.size - 1))
                * alpha_constant(left)
                / (left.factorial() * right.factorial()
                   * double_factorial(2 * right.weight + 1)))
    val = L.factorial() * acc
    _ALPHA_CACHE[L] = val
    return val


def genus0_psi_oracle(d) -> Fraction:
    """(n-3)!/prod d_j! for sum d = n - 3; follows from the string equation
    alone, admitted as an independent genus-0 oracle."""
    d = tuple(d)
    n = len(d)
    if n < 3 or sum(d) != n - 3 or any(x < 0 for x in d):
        return Fraction(0)
    denom = 1
    for x in d:
        denom *= factorial(x)
    return Fraction(factorial(n - 3), denom)


def _multiset_splits(values: tuple):
    """Ordered splits of a multiset into (part, rest) with multiplicities.

    Yields (part, rest, ways) where ways counts the labeled subsets
    realizing the split.  Deterministic order.
    """
    distinct = sorted(set(values), reverse=True)
    counts = [values.count(v) for v in distinct]

    def rec(i, part, ways):
        if i == len(distinct):
            chosen = tuple(part)
            rest = list(values)
            for x in chosen:
                rest.remove(x)
            yield chosen, tuple(rest), ways
            return
        v, c = distinct[i], counts[i]
        for k in range(c + 1):
            yield from rec(i + 1, part + [v] * k, ways * comb(c, k))

    yield from rec(0, [], 1)


class RecursionEngine:
    """Memoized evaluator for mixed correlators, backed by a CorrelatorTable."""

    def __init__(self, table: CorrelatorTable | None = None):
        self.table = table if table is not None else CorrelatorTable()
        self._oracle_cache: dict[tuple, Fraction] = {}

    # -- main recursion ----------------------------------------------------

    def value(self, g: int, d, b: MultiIndex = EMPTY) -> Fraction:
        """<kappa(b) prod tau_d>_g with the zero conventions applied."""
        d = tuple(sorted(d, reverse=True))
        n = len(d)
        if g < 0 or n < 1 or (d and d[-1] < 0):
            return Fraction(0)
        if sum(d) + b.weight != 3 * g - 3 + n:
            return Fraction(0)
        if 2 * g - 2 + n <= 0:
            return Fraction(0)
        hit = self.table.get(g, d, b)
        if hit is not None:
            return hit
        if g == 0 and d == (0, 0, 0):
            val = Fraction(1)           # b is empty here by dimension
        elif g == 1 and d == (1,) and not b:
            val = Fraction(1, 24)
        elif d[0] == 0 and n == 1:
            val = self._string_reduce(g, b)
        else:
            val = self._three_sums(g, d, b)
        tag = "wk" if not b else "mixed"
        return self.table.record(g, d, b, val, tag)

    def _string_reduce(self, g: int, b: MultiIndex) -> Fraction:
        # <tau_0 kappa(b)>_g: the displayed recursion is empty at this
        # shape; one generalized-string step trades b for a positive pivot.
        acc = Fraction(0)
        for left, right in enumerate_sub_multiindices(b):
            if not left:
                continue
            acc += ((-1) ** left.size * multiindex_binomial(b, left)
                    * self.value(g, (left.weight,), right))
        return -acc

    def _three_sums(self, g: int, d: tuple, b: MultiIndex) -> Fraction:
        d1 = d[0]
        rest = d[1:]
        total = Fraction(0)

        # distinct values of the remaining insertions, with multiplicities
        rest_counts = {}
        for v in rest:
            rest_counts[v] = rest_counts.get(v, 0) + 1

        for left, right in enumerate_sub_multiindices(b):
            a_l = alpha_constant(left)
            bin_l = multiindex_binomial(b, left)
            w = left.weight

            # pair merge: pivot absorbs one other insertion
            for v, mult in rest_counts.items():
                idx = w + d1 + v - 1
                if idx < 0:
                    continue
                coef = Fraction(double_factorial(2 * (w + d1 + v) - 1),
                                double_factorial(2 * v - 1))
                newd = list(rest)
                newd.remove(v)
                newd.append(idx)
                total += mult * a_l * bin_l * coef * self.value(g, newd, right)

            # genus lowering
            m = w + d1 - 2
            if m >= 0 and g >= 1:
                for r in range(m + 1):
                    s = m - r
                    coef = double_factorial(2 * r + 1) * double_factorial(2 * s + 1)
                    total += (Fraction(1, 2) * a_l * bin_l * coef
                              * self.value(g - 1, rest + (r, s), right))

        # stable splits: kappa index splits three ways, insertions two ways
        for left, e, f in enumerate_triple_splits(b):
            m = left.weight + d1 - 2
            if m < 0:
                continue
            a_l = alpha_constant(left)
            tri = multiindex_multinomial(b, (left, e, f))
            for part, other, ways in _multiset_splits(rest):
                for r in range(m + 1):
                    s = m - r
                    # genus of the first factor is fixed by its dimension
                    num = r + sum(part) + e.weight - len(part) + 2
                    gp, remdr = divmod(num, 3)
                    if remdr or gp < 0 or gp > g:
                        continue
                    v1 = self.value(gp, part + (r,), e)
                    if not v1:
                        continue
                    v2 = self.value(g - gp, other + (s,), f)
                    if not v2:
                        continue
                    coef = double_factorial(2 * r + 1) * double_factorial(2 * s + 1)
                    total += Fraction(1, 2) * a_l * tri * ways * coef * v1 * v2

        return total / double_factorial(2 * d1 + 1)

    # -- derived quantities --------------------------------------------------

    def pure_kappa_volume(self, g: int, b: MultiIndex) -> Fraction:
        """<kappa(b)>_g via the dilaton-type identity with no tau insertions."""
        if g < 2:
            raise ValueError("pure kappa volumes need g >= 2")
        if b.weight != 3 * g - 3:
            return Fraction(0)
        acc = Fraction(0)
        for left, right in enumerate_sub_multiindices(b):
            acc += ((-1) ** left.size * multiindex_binomial(b, left)
                    * self.value(g, (left.weight + 1,), right))
        val = acc / (2 * g - 2)
        return self.table.record(g, (), b, val, "mixed")

    def reduction_oracle(self, g: int, d, b: MultiIndex) -> Fraction:
        """Trade kappa indices for psi powers one at a time (test oracle).

        <kappa_a kappa(b0) prod tau_d>_{g,n}
          = sum_{S <= b0} (-1)^||S|| binom(b0, S)
            <tau_{a+1+|S|} kappa(b0-S) prod tau_d>_{g,n+1}.
        Delegates to the pure-psi recursion once b is exhausted.
        """
        d = tuple(sorted(d, reverse=True))
        if g < 0 or (d and d[-1] < 0):
            return Fraction(0)
        if sum(d) + b.weight != 3 * g - 3 + len(d):
            return Fraction(0)
        if not b:
            if not d:
                return Fraction(0)
            return self.value(g, d, EMPTY)
        key = (g, d, b)
        hit = self._oracle_cache.get(key)
        if hit is not None:
            return hit
        a = b.entries[-1][0]            # largest kappa index
        b0 = b - MultiIndex({a: 1})
        acc = Fraction(0)
        for s_idx, remaining in enumerate_sub_multiindices(b0):
            acc += ((-1) ** s_idx.size * multiindex_binomial(b0, s_idx)
                    * self.reduction_oracle(
                        g, d + (a + 1 + s_idx.weight,), remaining))
        self._oracle_cache[key] = acc
        # cross-record: write-once semantics force agreement with the
        # recursion engine wherever both visit the same key
        self.table.record(g, d, b, acc, "oracle")
        return acc

    def string_residual(self, g: int, d, b: MultiIndex) -> Fraction:
        """LHS - RHS of the generalized string identity (contract: zero on
        stable base shapes, 2g - 2 + n > 0)."""
        d = tuple(d)
        lhs = Fraction(0)
        for left, right in enumerate_sub_multiindices(b):
            lhs += ((-1) ** left.size * multiindex_binomial(b, left)
                    * self.value(g, d + (left.weight,), right))
        rhs = Fraction(0)
        for j in range(len(d)):
            if d[j] >= 1:
                rhs += self.value(g, d[:j] + (d[j] - 1,) + d[j + 1:], b)
        return lhs - rhs

    def dilaton_residual(self, g: int, d, b: MultiIndex) -> Fraction:
        """LHS - RHS of the generalized dilaton identity (contract: zero on
        stable base shapes)."""
        d = tuple(d)
        lhs = Fraction(0)
        for left, right in enumerate_sub_multiindices(b):
            lhs += ((-1) ** left.size * multiindex_binomial(b, left)
                    * self.value(g, d + (left.weight + 1,), right))
        if d:
            base = self.value(g, d, b)
        elif g >= 2:
            base = self.pure_kappa_volume(g, b)
        else:
            base = Fraction(0)
        rhs = (2 * g - 2 + len(d)) * base
        return lhs - rhs


_DEFAULT = RecursionEngine()


def default_engine() -> RecursionEngine:
    return _DEFAULT


def psi_correlator_wk(g: int, d, engine: RecursionEngine | None = None) -> Fraction:
    """Pure-psi correlator by the b = 0 specialization of the recursion."""
    eng = engine or _DEFAULT
    if len(tuple(d)) < 1:
        raise ValueError("need at least one tau insertion")
    return eng.value(g, d, EMPTY)


def mixed_correlator(g: int, d, b: MultiIndex, engine: RecursionEngine | None = None
                     ) -> Fraction:
    """<kappa(b) prod tau_d>_g; at least one tau insertion required."""
    eng = engine or _DEFAULT
    if len(tuple(d)) < 1:
        raise ValueError("mixed_correlator needs n >= 1; "
                         "use pure_kappa_volume for n = 0")
    return eng.value(g, d, b)


def pure_kappa_volume(g: int, b: MultiIndex, engine: RecursionEngine | None = None
                      ) -> Fraction:
    return (engine or _DEFAULT).pure_kappa_volume(g, b)


def kappa_reduction_oracle(g: int, d, b: MultiIndex,
                           engine: RecursionEngine | None = None) -> Fraction:
    return (engine or _DEFAULT).reduction_oracle(g, d, b)


def string_identity_residual(g: int, d, b: MultiIndex,
                             engine: RecursionEngine | None = None) -> Fraction:
    return (engine or _DEFAULT).string_residual(g, d, b)


def dilaton_identity_residual(g: int, d, b: MultiIndex,
                              engine: RecursionEngine | None = None) -> Fraction:
    return (engine or _DEFAULT).dilaton_residual(g, d, b)
