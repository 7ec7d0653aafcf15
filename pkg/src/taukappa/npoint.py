"""Generating-function engines for pure psi-class correlators.

The correlator <tau_{d_1}...tau_{d_n}>_g is the coefficient of
prod x_j^{d_j} in the degree-(3g+n-3) part of the n-point function F.
Two independent expansions of F are implemented:

* the `normalized` route: F = exp(sum x_j^3/24) * G with G assembled from
  homogeneous pieces P_r and Delta = ((sum x)^3 - sum x^3)/3, weighted by
  (2r+n-3)!! / (4^s (2r+2s+n-1)!!);
* the `direct` route: F = exp((sum x)^3/24) * sum of
  (-1)^s P_r Delta^s / (8^s (2r+2s+n-1) s!).

Both agree coefficientwise; the second is used as a cross-check of the
first.  The one- and two-point normalized functions are the Laurent atoms
x^-2 and 1/(x+y); they never enter computations directly, only through the
certified products (sum_I x)^2 * x^-2 = 1 and (x+y)^2 * 1/(x+y) = x+y,
which keep every assembled numerator a genuine polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .core import double_factorial
from .poly import (HomogeneousPolynomial, SymmetricPoly,
                   divide_by_variable_sum, partitions_le)

__all__ = [
    "LaurentAtom", "ONE_POINT_ATOM", "TWO_POINT_ATOM",
    "NormalizedComponentKey", "NPointEngine",
    "delta_polynomial", "p_r_polynomial", "normalized_component",
    "two_point_p0_numerator", "psi_correlator_npoint",
    "npoint_crosscheck_theorem3",
]


@dataclass(frozen=True)
class LaurentAtom:
    """Symbolic stand-in for the two non-polynomial normalized functions."""
    label: str
    degree: int


ONE_POINT_ATOM = LaurentAtom("x^-2", -2)
TWO_POINT_ATOM = LaurentAtom("1/(x1+x2)", -1)


@dataclass(frozen=True)
class NormalizedComponentKey:
    """One normalized component: an ordered variable subset and a genus.

    Either the shape is stable (3g - 3 + n >= 0 away from the two special
    pairs) or it is one of the Laurent special cases (0, 1) and (0, 2).
    """
    variables: tuple
    genus: int

    def __post_init__(self):
        n, g = len(self.variables), self.genus
        if g < 0 or n < 1:
            raise ValueError(f"invalid component shape ({n}, {g})")
        if 3 * g + n - 3 < 0 and not self.is_special:
            raise ValueError(f"unstable component shape ({n}, {g})")

    @property
    def is_special(self) -> bool:
        return self.genus == 0 and len(self.variables) in (1, 2)


def _multinomial(total: int, parts) -> int:
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out


def _simplex_power(n: int, p: int) -> SymmetricPoly:
    """(x_1 + ... + x_n)^p by classes."""
    return SymmetricPoly(n, p, {key: Fraction(_multinomial(p, key))
                                for key in partitions_le(p, n)})


def _cube_sum_power(n: int, k: int) -> SymmetricPoly:
    """(x_1^3 + ... + x_n^3)^k by classes."""
    classes = {}
    for mu in partitions_le(k, n):
        key = tuple(3 * v for v in mu)
        classes[key] = Fraction(_multinomial(k, mu))
    return SymmetricPoly(n, 3 * k, classes)


def _delta_classes(n: int) -> SymmetricPoly:
    """Delta = ((sum x)^3 - sum x^3)/3; integer coefficients by construction."""
    classes = {}
    if n >= 2:
        classes[(2, 1)] = Fraction(1)
    if n >= 3:
        classes[(1, 1, 1)] = Fraction(2)
    return SymmetricPoly(n, 3, classes)


class NPointEngine:
    """Caches every normalized component, split factor and F-part by shape.

    Components depend on the variable set only through its size, so all
    caches are keyed by (variable count, genus index) with the variables
    canonically renamed.
    """

    def __init__(self):
        self._component = {}   # (n, g) -> SymmetricPoly
        self._afactor = {}     # (m, r) -> SymmetricPoly, (sum x)^2 * G_r
        self._p = {}           # (n, r) -> SymmetricPoly, n >= 3
        self._delta_pow = {}   # (n, s) -> SymmetricPoly
        self._fpart = {}       # (route, n, g) -> SymmetricPoly

    # -- normalized components -------------------------------------------

    def component(self, n: int, g: int) -> SymmetricPoly:
        """Degree 3g+n-3 homogeneous component of the normalized function.

        Only polynomial components may be requested: (n, g) with
        3g + n - 3 >= 0 and (n, g) not in {(1, 0), (2, 0)}.
        """
        key = (n, g)
        hit = self._component.get(key)
        if hit is not None:
            return hit
        if n < 1 or g < 0:
            raise ValueError(f"invalid component ({n}, {g})")
        if n == 1:
            if g == 0:
                raise ValueError("the one-point normalized function is the "
                                 "Laurent atom x^-2, not a polynomial")
            val = SymmetricPoly(1, 3 * g - 2)   # identically zero
        elif n == 2:
            if g == 0:
                raise ValueError("the two-point normalized function is the "
                                 "Laurent atom 1/(x+y), not a polynomial")
            num = self.delta_power(2, g)
            scale = Fraction(1, 4 ** g * double_factorial(2 * g + 1))
            val = divide_by_variable_sum(num).scaled(scale)
        else:
            val = SymmetricPoly(n, 3 * g + n - 3)
            for r in range(g + 1):
                s = g - r
                c = Fraction(double_factorial(2 * r + n - 3),
                             4 ** s * double_factorial(2 * r + 2 * s + n - 1))
                val.add_into(self.p_poly(n, r).mul(self.delta_power(n, s)), c)
        self._component[key] = val
        return val

    def delta_power(self, n: int, s: int) -> SymmetricPoly:
        key = (n, s)
        hit = self._delta_pow.get(key)
        if hit is None:
            hit = _delta_classes(n).power(s)
            self._delta_pow[key] = hit
        return hit

    def a_factor(self, m: int, r: int) -> SymmetricPoly:
        """(sum_{i<=m} x_i)^2 * G_r(x_1..x_m), a polynomial for every shape.

        The m = 1 and m = 2 genus-0 values are the certified atom products
        1 and x_1 + x_2.
        """
        key = (m, r)
        hit = self._afactor.get(key)
        if hit is not None:
            return hit
        if m == 1:
            val = (SymmetricPoly(1, 0, {(): Fraction(1)}) if r == 0
                   else SymmetricPoly(1, 3 * r))
        elif m == 2 and r == 0:
            val = SymmetricPoly(2, 1, {(1,): Fraction(1)})
        else:
            comp = self.component(m, r)
            deg = comp.degree + 2
            classes = {}
            for tkey in partitions_le(deg, m):
                ev = list(tkey) + [0] * (m - len(tkey))
                tot = Fraction(0)
                for i in range(m):
                    for j in range(m):
                        w = list(ev)
                        w[i] -= 1
                        w[j] -= 1
                        if w[i] < 0 or w[j] < 0:
                            continue
                        tot += comp.get(w)
                if tot:
                    classes[tkey] = tot
            val = SymmetricPoly(m, deg, classes)
        self._afactor[key] = val
        return val

    def p_poly(self, n: int, r: int) -> SymmetricPoly:
        """P_r(x_1..x_n) for n >= 3: split-sum numerator over ordered pairs
        of complementary nonempty subsets, exactly divided by 2*(sum x)."""
        key = (n, r)
        hit = self._p.get(key)
        if hit is not None:
            return hit
        if n < 3:
            raise ValueError("p_poly handles n >= 3; the two-point P_r are "
                             "the atom (r=0) and zero (r>0)")
        deg_num = 3 * r + n - 2
        num = SymmetricPoly(n, deg_num)
        rest = list(range(1, n))
        for ckey in partitions_le(deg_num, n):
            ev = tuple(list(ckey) + [0] * (n - len(ckey)))
            tot = Fraction(0)
            # degree of the restriction to I, for I = {0} + subset(rest)
            degsum = [0] * (1 << (n - 1))
            for mask in range(1, 1 << (n - 1)):
                low = mask & -mask
                degsum[mask] = degsum[mask ^ low] + ev[rest[low.bit_length() - 1]]
            for mask in range((1 << (n - 1)) - 1):
                m = mask.bit_count() + 1
                d_i = ev[0] + degsum[mask]
                r1, rem = divmod(d_i - m + 1, 3)
                if rem or r1 < 0 or r1 > r:
                    continue
                pos_i = [0] + [rest[t] for t in range(n - 1) if mask >> t & 1]
                a_i = self.a_factor(m, r1).get([ev[i] for i in pos_i])
                if not a_i:
                    continue
                pos_j = [i for i in range(1, n) if i not in pos_i]
                a_j = self.a_factor(n - m, r - r1).get([ev[j] for j in pos_j])
                if a_j:
                    tot += a_i * a_j
            if tot:
                num.classes[ckey] = 2 * tot   # both orders of each (I, J)
        val = divide_by_variable_sum(num).scaled(Fraction(1, 2))
        self._p[key] = val
        return val

    # -- F-parts and correlators -----------------------------------------

    def f_part(self, n: int, g: int, route: str = "normalized") -> SymmetricPoly:
        """Degree 3g+n-3 part of the n-point function F, n >= 2."""
        key = (route, n, g)
        hit = self._fpart.get(key)
        if hit is not None:
            return hit
        if n < 2:
            raise ValueError("f_part requires n >= 2")
        if n == 2 and g == 0:
            raise ValueError("the (0,2) part of F is the Laurent atom")
        if route == "normalized":
            val = self._f_part_normalized(n, g)
        elif route == "direct":
            val = self._f_part_direct(n, g)
        else:
            raise ValueError(f"unknown route {route!r}")
        self._fpart[key] = val
        return val

    def _f_part_normalized(self, n: int, g: int) -> SymmetricPoly:
        # exp(sum x^3/24) * G, collected in degree 3g+n-3
        if n == 2:
            # work with (x+y)*F-part, using (x+y)*G_m = Delta^m/(4^m (2m+1)!!)
            num = SymmetricPoly(2, 3 * g)
            for k in range(g + 1):
                m = g - k
                num.add_into(
                    _cube_sum_power(2, k).mul(self.delta_power(2, m)),
                    Fraction(1, 24 ** k * factorial(k))
                    * Fraction(1, 4 ** m * double_factorial(2 * m + 1)))
            return divide_by_variable_sum(num)
        val = SymmetricPoly(n, 3 * g + n - 3)
        for k in range(g + 1):
            val.add_into(_cube_sum_power(n, k).mul(self.component(n, g - k)),
                         Fraction(1, 24 ** k * factorial(k)))
        return val

    def _f_part_direct(self, n: int, g: int) -> SymmetricPoly:
        if n == 2:
            # (x+y)*F-part with (x+y)*P_0 = 1; P_r = 0 for r > 0
            num = SymmetricPoly(2, 3 * g)
            for a in range(g + 1):
                s = g - a
                c = (Fraction(1, 24 ** a * factorial(a))
                     * Fraction((-1) ** s, 8 ** s * (2 * s + 1) * factorial(s)))
                num.add_into(_simplex_power(2, 3 * a).mul(self.delta_power(2, s)), c)
            return divide_by_variable_sum(num)
        val = SymmetricPoly(n, 3 * g + n - 3)
        for a in range(g + 1):
            pref = Fraction(1, 24 ** a * factorial(a))
            cube = _simplex_power(n, 3 * a)
            for r in range(g - a + 1):
                s = g - a - r
                c = pref * Fraction((-1) ** s,
                                    8 ** s * (2 * r + 2 * s + n - 1) * factorial(s))
                val.add_into(
                    cube.mul(self.p_poly(n, r).mul(self.delta_power(n, s))), c)
        return val

    def correlator(self, g: int, d, route: str = "normalized") -> Fraction:
        """<tau_{d_1}...tau_{d_n}>_g, zero off the dimension constraint."""
        d = tuple(d)
        n = len(d)
        if n < 1 or g < 0 or any(x < 0 for x in d):
            return Fraction(0)
        if sum(d) != 3 * g - 3 + n:
            return Fraction(0)
        if 2 * g - 2 + n <= 0:
            return Fraction(0)
        if n == 1:
            # coefficient of x^{3g-2} in exp(x^3/24) * x^-2
            return Fraction(1, 24 ** g * factorial(g))
        return self.f_part(n, g, route).get(d)


_ENGINE = NPointEngine()


def delta_polynomial(n: int) -> HomogeneousPolynomial:
    """((sum x)^3 - sum x^3)/3 expanded over n variables."""
    if n < 1:
        raise ValueError("need at least one variable")
    return _delta_classes(n).expand()


def p_r_polynomial(n: int, r: int, engine: NPointEngine | None = None
                   ) -> HomogeneousPolynomial:
    """P_r on n >= 2 variables as a genuine polynomial.

    For n = 2 the only polynomial values are P_r = 0 (r > 0); requesting
    P_0(x, y) raises, since that value is the Laurent atom 1/(x+y) whose
    certified numerator is available via two_point_p0_numerator().
    """
    if n < 2:
        raise ValueError("P_r needs at least two variables")
    if r < 0:
        raise ValueError("negative genus index")
    if n == 2:
        if r == 0:
            raise ValueError("P_0(x, y) = 1/(x+y) is not a polynomial; "
                             "the engine records (x+y)*P_0 = 1 instead")
        return HomogeneousPolynomial(2, 3 * r - 1)
    eng = engine or _ENGINE
    return eng.p_poly(n, r).expand()


def two_point_p0_numerator() -> HomogeneousPolynomial:
    """The certified product (x+y) * P_0(x, y), identically 1."""
    return HomogeneousPolynomial(2, 0, {(0, 0): Fraction(1)})


def normalized_component(n, g: int | None = None,
                         engine: NPointEngine | None = None):
    """G_g on n variables: a HomogeneousPolynomial, or the Laurent atom
    for the special shapes (n, g) = (1, 0) and (2, 0).  Accepts either
    (n, g) or a NormalizedComponentKey."""
    if isinstance(n, NormalizedComponentKey):
        n, g = len(n.variables), n.genus
    if n == 1 and g == 0:
        return ONE_POINT_ATOM
    if n == 2 and g == 0:
        return TWO_POINT_ATOM
    if n < 1 or g < 0 or (3 * g + n - 3) < 0:
        raise ValueError(f"unstable component shape ({n}, {g})")
    eng = engine or _ENGINE
    return eng.component(n, g).expand()


def psi_correlator_npoint(g: int, d, engine: NPointEngine | None = None) -> Fraction:
    """Correlator via the normalized-function expansion."""
    eng = engine or _ENGINE
    return eng.correlator(g, d, "normalized")


def npoint_crosscheck_theorem3(g: int, d, engine: NPointEngine | None = None) -> Fraction:
    """Correlator via the direct expansion; must agree with the normalized
    route coefficient by coefficient (n >= 2)."""
    d = tuple(d)
    if len(d) < 2:
        raise ValueError("the direct expansion is defined for n >= 2")
    eng = engine or _ENGINE
    return eng.correlator(g, d, "direct")
