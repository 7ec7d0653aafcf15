"""Denominator invariants of intersection numbers.

D(g, n) is the lcm of the reduced denominators of every pure-psi
correlator on the genus-g n-point moduli space; script-D(g) is the same
over all pure-kappa volumes of weight 3g-3 on the unmarked space.  The
two are tied by divisibility (D(g, n) divides D(g, n+1)) and by the
equality script-D(g) = D(g, 3g-3), which the analyzer recomputes from
both definitions and refuses to report unless they agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import lcm

from .core import multiindices_of_weight
from .recursion import RecursionEngine, default_engine

__all__ = [
    "DenominatorReport", "compute_D", "compute_script_D",
    "check_proposition17", "check_lemma20", "check_iz_fixture",
    "factorize", "load_fixture_orders",
]


@dataclass
class DenominatorReport:
    genus: int
    point_count: int | None      # None marks the pure-kappa invariant
    value: int
    correlator_count: int
    factorization: dict

    def to_json(self) -> str:
        return json.dumps({
            "genus": self.genus,
            "n": self.point_count,
            "value": str(self.value),
            "correlators": self.correlator_count,
            "factorization": {str(p): e for p, e in self.factorization.items()},
        }, sort_keys=True)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (denominators are smooth)."""
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _partitions_exact(total: int, slots: int):
    """Sorted-desc tuples of length `slots`, entries >= 0, summing to total."""
    def rec(rem, slots_left, cap):
        if slots_left == 0:
            if rem == 0:
                yield ()
            return
        for v in range(min(rem, cap), -1, -1):
            for rest in rec(rem - v, slots_left - 1, v):
                yield (v,) + rest
    yield from rec(total, slots, total if total else 1)


def compute_D(g: int, n: int, engine: RecursionEngine | None = None
              ) -> DenominatorReport:
    """lcm of denominators over all <prod tau_d>_g with sum d = 3g-3+n."""
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise ValueError(f"({g}, {n}) is not a stable shape")
    eng = engine or default_engine()
    dim = 3 * g - 3 + n
    value = 1
    count = 0
    for d in _partitions_exact(dim, n):
        val = eng.value(g, d)
        count += 1
        value = lcm(value, val.denominator)
    return DenominatorReport(g, n, value, count, factorize(value))


def compute_script_D(g: int, engine: RecursionEngine | None = None
                     ) -> DenominatorReport:
    """Pure-kappa denominator lcm at genus g >= 2, computed twice.

    Both the kappa-volume definition and the equal psi-side invariant
    D(g, 3g-3) are evaluated; a mismatch raises (it would falsify the
    divisibility theory or expose an engine bug).
    """
    if g < 2:
        raise ValueError("script-D needs g >= 2")
    eng = engine or default_engine()
    value = 1
    count = 0
    for b in multiindices_of_weight(3 * g - 3):
        val = eng.pure_kappa_volume(g, b)
        count += 1
        value = lcm(value, val.denominator)
    psi_side = compute_D(g, 3 * g - 3, eng)
    if psi_side.value != value:
        raise ArithmeticError(
            f"script-D({g}) mismatch: kappa path {value}, "
            f"psi path {psi_side.value}")
    return DenominatorReport(g, None, value, count + psi_side.correlator_count,
                             factorize(value))


def check_proposition17(g: int, nmax: int, engine: RecursionEngine | None = None,
                        include_script: bool | None = None):
    """Divisibility ladder D(g, n) | D(g, n+1) up to nmax, plus
    D(g, n) | script-D(g) when the pure-kappa invariant is computed.

    Returns a list of (description, verdict) pairs, all expected True.
    """
    eng = engine or default_engine()
    nmin = 3 if g == 0 else 1
    if nmax < nmin:
        raise ValueError(f"need nmax >= {nmin} at genus {g}")
    values = {n: compute_D(g, n, eng).value for n in range(nmin, nmax + 1)}
    verdicts = []
    for n in range(nmin, nmax):
        verdicts.append((f"D({g},{n}) | D({g},{n+1})",
                         values[n + 1] % values[n] == 0))
    if include_script is None:
        include_script = 2 <= g <= 3
    if include_script and g >= 2:
        script = compute_script_D(g, eng).value
        for n in sorted(values):
            if n <= 3 * g - 3:
                verdicts.append((f"D({g},{n}) | script-D({g})",
                                 script % values[n] == 0))
    return verdicts


def check_lemma20(g: int, engine: RecursionEngine | None = None):
    """For every prime p <= g+1, the order of p in D(g, 3) is at least 2.

    Returns (p, order, verdict) triples.
    """
    if g < 2:
        raise ValueError("needs g >= 2")
    eng = engine or default_engine()
    value = compute_D(g, 3, eng).value
    fac = factorize(value)
    out = []
    for p in _primes_up_to(g + 1):
        order = fac.get(p, 0)
        out.append((p, order, order >= 2))
    return out


def _primes_up_to(n: int):
    sieve = [True] * (n + 1)
    ps = []
    for p in range(2, n + 1):
        if sieve[p]:
            ps.append(p)
            for q in range(p * p, n + 1, p):
                sieve[q] = False
    return ps


def check_iz_fixture(g: int, orders, engine: RecursionEngine | None = None,
                     value: int | None = None):
    """Partial divisibility check of curve-automorphism orders.

    `orders` are externally supplied group orders of curves of genus
    1 < g' <= g (fixture data, not computed truth); each must divide
    script-D(g).  Returns (order, verdict) pairs.
    """
    if value is None:
        value = compute_script_D(g, engine).value
    return [(o, value % o == 0) for o in orders]


def load_fixture_orders(path: str):
    """Fixture rows `order genus comment...`; returns (order, genus, comment)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 2)
            rows.append((int(parts[0]), int(parts[1]),
                         parts[2] if len(parts) > 2 else ""))
    return rows
