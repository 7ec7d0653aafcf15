"""Truncated multivariate series in t_0, t_1, ... and s_1, s_2, ...

A monomial is a pair (tpart, spart) of sorted (index, exponent) tuples.
Because the generating functions are truncated, a series carries an
explicit admission set: the monomials whose coefficients are fully
determined by the data that went in.  `admitted is None` means the series
is exact (a polynomial: every absent coefficient is a true zero).
Arithmetic intersects admission conservatively; a product coefficient is
admitted only when every factorization of the monomial stays admitted in
both factors.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from math import factorial

__all__ = [
    "Monomial", "mono_mul", "mono_t_count", "mono_s_weight", "mono_t_degree",
    "mono_divisors", "genus_of_monomial", "format_monomial", "TruncatedSeries",
]

Monomial = tuple   # ((t_idx, exp), ...), ((s_idx, exp), ...)

EMPTY_MONO: Monomial = ((), ())


def _merge(a, b, sign=1):
    out = dict(a)
    for i, e in b:
        out[i] = out.get(i, 0) + sign * e
        if out[i] < 0:
            raise ValueError("negative exponent in monomial merge")
    return tuple(sorted((i, e) for i, e in out.items() if e))


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    return (_merge(m1[0], m2[0]), _merge(m1[1], m2[1]))


def mono_t_count(m: Monomial) -> int:
    return sum(e for _, e in m[0])


def mono_t_degree(m: Monomial) -> int:
    return sum(i * e for i, e in m[0])


def mono_s_weight(m: Monomial) -> int:
    return sum(i * e for i, e in m[1])


def mono_max_t_index(m: Monomial) -> int:
    return max((i for i, _ in m[0]), default=-1)


def genus_of_monomial(m: Monomial):
    """Genus forced by the dimension constraint, or None if fractional."""
    num = mono_t_degree(m) + mono_s_weight(m) - mono_t_count(m) + 3
    g, rem = divmod(num, 3)
    return None if rem or g < 0 else g


def is_stable_shape(g: int, n: int) -> bool:
    return 2 * g - 2 + n > 0


def mono_divisors(m: Monomial):
    """All monomials dividing m, the trivial one included."""
    tpart, spart = m
    tvars = [(("t", i), e) for i, e in tpart] + [(("s", i), e) for i, e in spart]
    ranges = [range(e + 1) for _, e in tvars]
    for choice in iproduct(*ranges):
        tsel = []
        ssel = []
        for (kind, i), e in zip((v for v, _ in tvars), choice):
            if not e:
                continue
            (tsel if kind == "t" else ssel).append((i, e))
        yield (tuple(tsel), tuple(ssel))


def format_monomial(m: Monomial) -> str:
    bits = []
    for i, e in m[0]:
        bits.append(f"t{i}" + (f"^{e}" if e > 1 else ""))
    for i, e in m[1]:
        bits.append(f"s{i}" + (f"^{e}" if e > 1 else ""))
    return "*".join(bits) if bits else "1"


def symmetry_factor(m: Monomial) -> int:
    """prod n_i! * prod m_j! dividing a correlator in the generating series."""
    out = 1
    for _, e in m[0]:
        out *= factorial(e)
    for _, e in m[1]:
        out *= factorial(e)
    return out


class TruncatedSeries:
    """Sparse series with explicit admission bookkeeping.

    No monomial is stored outside the admission region: coefficients a
    truncation corrupted are dropped on construction, so `terms` only
    ever holds trusted values (admitted-but-absent means exactly zero).
    """

    def __init__(self, terms=None, admitted=None):
        self.admitted = None if admitted is None else frozenset(admitted)
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c and (self.admitted is None or m in self.admitted):
                    self.terms[m] = Fraction(c)

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def is_admitted(self, m: Monomial) -> bool:
        return self.admitted is None or m in self.admitted

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, Fraction(0)) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return TruncatedSeries(terms, _intersect(self.admitted, other.admitted))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other.scaled(-1)

    def scaled(self, scalar) -> "TruncatedSeries":
        scalar = Fraction(scalar)
        if not scalar:
            return TruncatedSeries({}, self.admitted)
        return TruncatedSeries({m: c * scalar for m, c in self.terms.items()},
                               self.admitted)

    def mul(self, other: "TruncatedSeries", keep=None, region=None
            ) -> "TruncatedSeries":
        """Product; `keep` optionally filters output monomials (a structural
        cap, required to stay divisor-monotone by the caller).

        When either factor is truncated, admission is granted on the
        candidate monomials (`region` if supplied, else the product's
        support) whose every factorization stays admitted in both factors.
        """
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                if keep is not None and not keep(m):
                    continue
                s = terms.get(m, Fraction(0)) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        if self.admitted is None and other.admitted is None:
            adm = None
        else:
            cands = set(terms) if region is None else set(region)
            adm = set()
            for m in cands:
                if all(self.is_admitted(d) and other.is_admitted(
                        (_merge(m[0], d[0], -1), _merge(m[1], d[1], -1)))
                        for d in mono_divisors(m)):
                    adm.add(m)
        return TruncatedSeries(terms, adm)

    def exp(self, keep, region=None) -> "TruncatedSeries":
        """exp of a series with no constant term, filtered by `keep`.

        The admission of an output monomial requires every divisor to be
        admitted in the input: any multiplicative partition of the output
        draws on exactly those coefficients.  `region` supplies the
        candidate monomials when the input is truncated.
        """
        if EMPTY_MONO in self.terms:
            raise ValueError("exp needs a series with zero constant term")
        acc = {EMPTY_MONO: Fraction(1)}
        power = {EMPTY_MONO: Fraction(1)}
        k = 0
        while power:
            k += 1
            nxt: dict[Monomial, Fraction] = {}
            for m1, c1 in power.items():
                for m2, c2 in self.terms.items():
                    m = mono_mul(m1, m2)
                    if not keep(m):
                        continue
                    s = nxt.get(m, Fraction(0)) + c1 * c2
                    if s:
                        nxt[m] = s
                    else:
                        nxt.pop(m, None)
            power = nxt
            for m, c in power.items():
                s = acc.get(m, Fraction(0)) + c / factorial(k)
                if s:
                    acc[m] = s
                else:
                    acc.pop(m, None)
        if self.admitted is None:
            adm = None
        else:
            cands = set(acc) if region is None else set(region)
            adm = set()
            for m in cands:
                if all(d in self.admitted for d in mono_divisors(m)
                       if d != EMPTY_MONO):
                    adm.add(m)
        return TruncatedSeries(acc, adm)

    def derivative(self, idx: int, kind: str = "t") -> "TruncatedSeries":
        """d/dt_idx (or d/ds_idx); admission shifts along the derivative."""
        slot = 0 if kind == "t" else 1
        terms = {}
        for m, c in self.terms.items():
            part = dict(m[slot])
            e = part.get(idx, 0)
            if not e:
                continue
            part[idx] = e - 1
            new = tuple(sorted((i, v) for i, v in part.items() if v))
            mm = (new, m[1]) if slot == 0 else (m[0], new)
            terms[mm] = terms.get(mm, Fraction(0)) + c * e
        if self.admitted is None:
            adm = None
        else:
            unit = (((idx, 1),), ()) if slot == 0 else ((), ((idx, 1),))
            adm = {m for m in _shifted_down(self.admitted, unit)}
        return TruncatedSeries(terms, adm)

    def nonzero_admitted(self):
        """(monomial, coefficient) pairs that are admitted and nonzero."""
        return [(m, c) for m, c in sorted(self.terms.items())
                if c and self.is_admitted(m)]

    def to_json(self) -> str:
        """JSON map from monomial strings ("t0^2*s1") to "num/den"."""
        import json
        return json.dumps(
            {format_monomial(m): f"{c.numerator}/{c.denominator}"
             for m, c in sorted(self.terms.items())}, sort_keys=True)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        adm = "exact" if self.admitted is None else f"admitted={len(self.admitted)}"
        return f"TruncatedSeries(terms={len(self.terms)}, {adm})"


def _intersect(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return frozenset(a) & frozenset(b)


def _shifted_down(admitted, unit):
    for m in admitted:
        try:
            yield (_merge(m[0], unit[0], -1), _merge(m[1], unit[1], -1))
        except ValueError:
            continue
