"""Residual checks for the vanishing and closed-form correlator identities.

Each check evaluates both sides of one identity with the exact engines and
reports the residual lhs - rhs.  Identity names follow the workbench's
verification grammar (thm7, thm8, prop9, thm10, prop11, thm12, conj13).
Split sums run over ordered pairs of complementary labeled subsets, empty
parts allowed, and the genus of each split factor is the unique one
permitted by the dimension constraint (terms with no such genus vanish).
conj13 is experimental: its reports never gate a verification run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .core import (EMPTY, MultiIndex, double_factorial,
                   enumerate_sub_multiindices, multiindex_binomial,
                   multiindices_up_to_weight)
from .recursion import RecursionEngine, default_engine

__all__ = [
    "IdentityReport", "check_theorem7", "check_theorem8",
    "check_proposition9", "check_theorem10", "check_proposition11",
    "check_theorem12", "check_conjecture13", "identity_grid", "run_identity",
    "IDENTITY_NAMES",
]


@dataclass
class IdentityReport:
    identity: str
    params: dict
    lhs: Fraction
    rhs: Fraction
    conjectural: bool = False
    residual: Fraction = field(init=False)
    status: str = field(init=False)

    def __post_init__(self):
        self.residual = self.lhs - self.rhs
        self.status = "holds" if self.residual == 0 else "fails"

    def to_json(self) -> str:
        def fmt(v: Fraction) -> str:
            return f"{v.numerator}/{v.denominator}"
        payload = {
            "identity": self.identity,
            "params": self.params,
            "lhs": fmt(self.lhs),
            "rhs": fmt(self.rhs),
            "residual": fmt(self.residual),
            "status": self.status,
        }
        if self.conjectural:
            payload["conjectural"] = True
        return json.dumps(payload, sort_keys=True)


def _genus_for(d, kappa_weight: int = 0):
    """The unique genus allowed by the dimension constraint, or None."""
    num = sum(d) + kappa_weight - len(d) + 3
    g, rem = divmod(num, 3)
    if rem or g < 0:
        return None
    return g


def _labeled_splits(d: tuple):
    """Ordered pairs of complementary labeled subsets of d (empty allowed)."""
    n = len(d)
    for mask in range(1 << n):
        left = tuple(d[i] for i in range(n) if mask >> i & 1)
        right = tuple(d[i] for i in range(n) if not mask >> i & 1)
        yield left, right


def _split_pair_value(eng: RecursionEngine, g: int, head1, head2, d,
                      b1: MultiIndex = EMPTY, b2: MultiIndex = EMPTY) -> Fraction:
    """sum over splits I|J of <head1, d_I, kappa(b1)>_{g'} <head2, d_J, kappa(b2)>_{g-g'}."""
    total = Fraction(0)
    for left, right in _labeled_splits(d):
        d1 = head1 + left
        gp = _genus_for(d1, b1.weight)
        if gp is None or gp > g:
            continue
        v1 = eng.value(gp, d1, b1)
        if not v1:
            continue
        v2 = eng.value(g - gp, head2 + right, b2)
        if v2:
            total += v1 * v2
    return total


def check_theorem7(g: int, d, k: int, engine: RecursionEngine | None = None
                   ) -> IdentityReport:
    """Alternating split sum with two tau_0^2 blocks.

    Part 1 (k > 2g, sum d = 3g+n-k): the sum vanishes.  Part 2 (k = 2g,
    d_j >= 1, sum d = g+n): it equals
    (2g+n+1)! / (4^g (2g+1)! prod (2d_j-1)!!).
    """
    d = tuple(sorted(d, reverse=True))
    n = len(d)
    if any(x < 0 for x in d) or k < 2 * g:
        raise ValueError("need d_j >= 0 and k >= 2g")
    if k > 2 * g:
        if 3 * g + n - k < 0:
            raise ValueError(f"no admissible d at g={g}, n={n}, k={k}")
        # off-constraint tuples are allowed: every term of the sum then
        # violates a dimension constraint and the identity reads 0 = 0
        rhs = Fraction(0)
    else:
        if any(x < 1 for x in d) or sum(d) != g + n:
            raise ValueError("part 2 needs d_j >= 1 and sum(d) = g+n")
        denom = 4 ** g * factorial(2 * g + 1)
        for x in d:
            denom *= double_factorial(2 * x - 1)
        rhs = Fraction(factorial(2 * g + n + 1), denom)
    eng = engine or default_engine()
    lhs = Fraction(0)
    for j in range(k + 1):
        lhs += (-1) ** j * _split_pair_value(
            eng, g, (j, 0, 0), (k - j, 0, 0), d)
    return IdentityReport("thm7", {"g": g, "d": list(d), "k": k}, lhs, rhs)


def check_theorem8(g: int, d, k: int, engine: RecursionEngine | None = None
                   ) -> IdentityReport:
    """Alternating pair sum sum_j (-1)^j <tau_{k-j} tau_j prod tau_d>_g.

    Vanishes for k > 2g with sum d = 3g+n-k-1; at k = 2g with d_j >= 1 and
    sum (d_j - 1) = g-1 it equals (2g+n-1)! / (4^g (2g+1)! prod (2d_j-1)!!).
    """
    d = tuple(sorted(d, reverse=True))
    n = len(d)
    if any(x < 0 for x in d) or k < 2 * g:
        raise ValueError("need d_j >= 0 and k >= 2g")
    if k > 2 * g:
        if 3 * g + n - k - 1 < 0:
            raise ValueError(f"no admissible d at g={g}, n={n}, k={k}")
        rhs = Fraction(0)
    else:
        if any(x < 1 for x in d) or sum(x - 1 for x in d) != g - 1:
            raise ValueError("part 2 needs d_j >= 1 and sum(d_j - 1) = g-1")
        denom = 4 ** g * factorial(2 * g + 1)
        for x in d:
            denom *= double_factorial(2 * x - 1)
        rhs = Fraction(factorial(2 * g + n - 1), denom)
    eng = engine or default_engine()
    lhs = Fraction(0)
    for j in range(k + 1):
        lhs += (-1) ** j * eng.value(g, (k - j, j) + d, EMPTY)
    return IdentityReport("thm8", {"g": g, "d": list(d), "k": k}, lhs, rhs)


def check_proposition9(g: int, d, engine: RecursionEngine | None = None
                       ) -> IdentityReport:
    """Split form of the k = 2g pair sum against its three-point collapse."""
    d = tuple(sorted(d, reverse=True))
    n = len(d)
    if any(x < 0 for x in d):
        raise ValueError("needs d_j >= 0")
    eng = engine or default_engine()
    lhs = Fraction(0)
    for j in range(2 * g + 1):
        sign = (-1) ** j
        lhs += sign * _split_pair_value(
            eng, g, (j, 0, 0), (2 * g - j, 0, 0), d)
        lhs += sign * _split_pair_value(
            eng, g, (j, 2 * g - j, 0, 0), (0, 0), d)
    rhs = Fraction(0)
    for j in range(2 * g + 1):
        rhs += (-1) ** j * eng.value(g, (0, j, 2 * g - j) + d, EMPTY)
    rhs *= (2 * g + n + 1)
    return IdentityReport("prop9", {"g": g, "d": list(d)}, lhs, rhs)


def check_theorem10(g: int, d, k: int, engine: RecursionEngine | None = None
                    ) -> IdentityReport:
    """Vanishing recursion for one tau_k insertion, k even and k >= 2g."""
    d = tuple(sorted(d, reverse=True))
    n = len(d)
    if k % 2 or k < 2 * g or k < 2:
        raise ValueError("k must be a positive even number with k >= 2g")
    if any(x < 0 for x in d):
        raise ValueError("need d_j >= 0")
    if 3 * g + n - k - 2 < 0:
        raise ValueError(f"no admissible d at g={g}, n={n}, k={k}")
    eng = engine or default_engine()
    lhs = eng.value(g, d + (k,), EMPTY)
    for j in range(n):
        lhs -= eng.value(g, d[:j] + (d[j] + k - 1,) + d[j + 1:], EMPTY)
    half = Fraction(0)
    for j in range(k - 1):
        half += (-1) ** j * _split_pair_value(eng, g, (j,), (k - 2 - j,), d)
    lhs += Fraction(1, 2) * half
    return IdentityReport("thm10", {"g": g, "d": list(d), "k": k},
                          lhs, Fraction(0))


def check_proposition11(g: int, d, b: MultiIndex,
                        engine: RecursionEngine | None = None) -> IdentityReport:
    """Kappa generalization of the prop9 split identity."""
    d = tuple(sorted(d, reverse=True))
    if any(x < 0 for x in d):
        raise ValueError("need d_j >= 0")
    eng = engine or default_engine()
    lhs = Fraction(0)
    for j in range(2 * g + 1):
        lhs += (-1) ** j * eng.value(g, (0, 1, j, 2 * g - j) + d, b)
    rhs = Fraction(0)
    for left, right in enumerate_sub_multiindices(b):
        bin_l = multiindex_binomial(b, left)
        for j in range(2 * g + 1):
            sign = (-1) ** j * bin_l
            rhs += sign * _split_pair_value(
                eng, g, (j, 0, 0), (2 * g - j, 0, 0), d, left, right)
            rhs += sign * _split_pair_value(
                eng, g, (j, 2 * g - j, 0, 0), (0, 0), d, left, right)
    return IdentityReport("prop11", {"g": g, "d": list(d), "b": str(b)},
                          lhs, rhs)


def check_theorem12(g: int, d, b: MultiIndex, M: int,
                    engine: RecursionEngine | None = None) -> IdentityReport:
    """Kappa generalization of the tau_M vanishing recursion (M even, >= 2g)."""
    d = tuple(sorted(d, reverse=True))
    n = len(d)
    if M % 2 or M < 2 * g or M < 2:
        raise ValueError("M must be a positive even number with M >= 2g")
    if any(x < 0 for x in d):
        raise ValueError("need d_j >= 0")
    eng = engine or default_engine()
    lhs = Fraction(0)
    for left, right in enumerate_sub_multiindices(b):
        lhs += ((-1) ** left.size * multiindex_binomial(b, left)
                * eng.value(g, d + (left.weight + M,), right))
    rhs = Fraction(0)
    for j in range(n):
        rhs += eng.value(g, d[:j] + (d[j] + M - 1,) + d[j + 1:], b)
    half = Fraction(0)
    for left, right in enumerate_sub_multiindices(b):
        bin_l = multiindex_binomial(b, left)
        for j in range(M - 1):
            half += ((-1) ** j * bin_l
                     * _split_pair_value(eng, g, (j,), (M - 2 - j,), d,
                                         left, right))
    rhs -= Fraction(1, 2) * half
    return IdentityReport("thm12", {"g": g, "d": list(d), "b": str(b), "M": M},
                          lhs, rhs)


def check_conjecture13(g: int, d, engine: RecursionEngine | None = None
                       ) -> IdentityReport:
    """Experimental closed form at k = 2g-2; reported, never asserted."""
    d = tuple(sorted(d, reverse=True))
    n = len(d)
    if g < 2:
        raise ValueError("needs g >= 2")
    if any(x < 1 for x in d) or sum(x - 1 for x in d) != g:
        raise ValueError("needs d_j >= 1 and sum(d_j - 1) = g")
    eng = engine or default_engine()
    lhs = eng.value(g, d + (2 * g - 2,), EMPTY)
    for j in range(n):
        lhs -= eng.value(g, d[:j] + (d[j] + 2 * g - 3,) + d[j + 1:], EMPTY)
    half = Fraction(0)
    for j in range(2 * g - 3):
        half += (-1) ** j * _split_pair_value(eng, g, (j,), (2 * g - 4 - j,), d)
    lhs += Fraction(1, 2) * half
    denom = 2 ** (2 * g + 1) * factorial(2 * g - 3)
    for x in d:
        denom *= double_factorial(2 * x - 1)
    rhs = Fraction(factorial(2 * g - 3 + n), denom)
    return IdentityReport("conj13", {"g": g, "d": list(d)}, lhs, rhs,
                          conjectural=True)


# -- parameter grids ---------------------------------------------------------

IDENTITY_NAMES = ("thm7", "thm8", "prop9", "thm10", "prop11", "thm12", "conj13")


def _partitions_padded(total: int, slots: int):
    """Sorted-desc tuples of length `slots` with entries >= 0 summing to total."""
    def rec(rem, slots_left, cap):
        if slots_left == 0:
            if rem == 0:
                yield ()
            return
        for v in range(min(rem, cap), -1, -1):
            for rest in rec(rem - v, slots_left - 1, v):
                yield (v,) + rest
    yield from rec(total, slots, total if total else 1)


_kappa_indices_up_to = multiindices_up_to_weight


def identity_grid(name: str, gmax: int, nmax: int, bmax: int = 0):
    """Admissible parameter tuples for one identity over the test grid."""
    if name == "thm7":
        for g in range(gmax + 1):
            for n in range(1, nmax + 1):
                for k in range(2 * g + 1, 3 * g + n + 1):
                    for d in _partitions_padded(3 * g + n - k, n):
                        yield {"g": g, "d": d, "k": k}
                for e in _partitions_padded(g, n):   # part 2: d_j >= 1
                    yield {"g": g, "d": tuple(x + 1 for x in e), "k": 2 * g}
    elif name == "thm8":
        for g in range(gmax + 1):
            for n in range(1, nmax + 1):
                for k in range(2 * g + 1, 3 * g + n):
                    for d in _partitions_padded(3 * g + n - k - 1, n):
                        yield {"g": g, "d": d, "k": k}
                if g >= 1:
                    for e in _partitions_padded(g - 1, n):
                        yield {"g": g, "d": tuple(x + 1 for x in e), "k": 2 * g}
    elif name == "prop9":
        for g in range(gmax + 1):
            for n in range(1, nmax + 1):
                for d in _partitions_padded(g + n, n):
                    yield {"g": g, "d": d}
    elif name == "thm10":
        for g in range(gmax + 1):
            for n in range(nmax + 1):
                for k in range(max(2 * g, 2), 3 * g + n - 1, 2):
                    for d in _partitions_padded(3 * g + n - k - 2, n):
                        yield {"g": g, "d": d, "k": k}
    elif name == "prop11":
        for g in range(gmax + 1):
            for n in range(nmax + 1):
                for b in _kappa_indices_up_to(bmax):
                    budget = g + n - 1 - b.weight
                    if budget < 0:
                        continue
                    for d in _partitions_padded(budget, n):
                        yield {"g": g, "d": d, "b": b}
    elif name == "thm12":
        for g in range(gmax + 1):
            for n in range(nmax + 1):
                for b in _kappa_indices_up_to(bmax):
                    for M in range(max(2 * g, 2), 3 * g + n - 1 - b.weight, 2):
                        budget = 3 * g + n - 2 - M - b.weight
                        if budget < 0:
                            continue
                        for d in _partitions_padded(budget, n):
                            yield {"g": g, "d": d, "b": b, "M": M}
    elif name == "conj13":
        for g in range(2, gmax + 1):
            for n in range(1, nmax + 1):
                for e in _partitions_padded(g, n):
                    yield {"g": g, "d": tuple(x + 1 for x in e)}
    else:
        raise ValueError(f"unknown identity {name!r}")


_CHECKS = {
    "thm7": lambda p, eng: check_theorem7(p["g"], p["d"], p["k"], eng),
    "thm8": lambda p, eng: check_theorem8(p["g"], p["d"], p["k"], eng),
    "prop9": lambda p, eng: check_proposition9(p["g"], p["d"], eng),
    "thm10": lambda p, eng: check_theorem10(p["g"], p["d"], p["k"], eng),
    "prop11": lambda p, eng: check_proposition11(p["g"], p["d"], p["b"], eng),
    "thm12": lambda p, eng: check_theorem12(p["g"], p["d"], p["b"], p["M"], eng),
    "conj13": lambda p, eng: check_conjecture13(p["g"], p["d"], eng),
}


def run_identity(name: str, params: dict,
                 engine: RecursionEngine | None = None) -> IdentityReport:
    return _CHECKS[name](params, engine or default_engine())
