"""Sparse homogeneous polynomials with exact rational coefficients.

Two representations live here.  `HomogeneousPolynomial` is the public one:
a sparse map from exponent vectors to Fractions.  The generating-function
engines only ever build polynomials that are invariant under permuting the
variables, so internally they use `SymmetricPoly`, which stores one
coefficient per sorted-exponent class.  A class key is the exponent vector
sorted descending with trailing zeros dropped; `(2, 1)` in three variables
stands for all six monomials of shape x_i^2 x_j.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import factorial

__all__ = ["HomogeneousPolynomial", "SymmetricPoly", "class_key", "partitions_le"]


def class_key(vec) -> tuple:
    """Sorted-descending exponent tuple with zeros dropped."""
    return tuple(sorted((v for v in vec if v), reverse=True))


def partitions_le(d: int, max_parts: int) -> list[tuple]:
    """Partitions of d into at most max_parts parts, as sorted-desc tuples."""
    if d == 0:
        return [()]
    if max_parts <= 0:
        return []
    out = []

    def rec(rem, cap, slots, cur):
        if rem == 0:
            out.append(tuple(cur))
            return
        if slots == 0:
            return
        for p in range(min(rem, cap), 0, -1):
            cur.append(p)
            rec(rem - p, p, slots - 1, cur)
            cur.pop()

    rec(d, d, max_parts, [])
    return out


def orbit_size(key: tuple, nvars: int) -> int:
    """Number of distinct monomials in the class `key` on nvars variables."""
    padded = list(key) + [0] * (nvars - len(key))
    counts = {}
    for v in padded:
        counts[v] = counts.get(v, 0) + 1
    out = factorial(nvars)
    for c in counts.values():
        out //= factorial(c)
    return out


class HomogeneousPolynomial:
    """Sparse homogeneous polynomial: exponent tuple (length nvars) -> Fraction.

    Every stored exponent vector sums to `degree`; zero coefficients are
    never stored.  Addition requires equal (nvars, degree); multiplication
    adds degrees.
    """

    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars: int, degree: int, terms=None):
        self.nvars = nvars
        self.degree = degree
        self.terms = {}
        if terms:
            for e, c in (terms.items() if isinstance(terms, dict) else terms):
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has length != {nvars}")
                if sum(e) != degree:
                    raise ValueError(f"exponent {e} violates degree {degree}")
                c = Fraction(c)
                if c:
                    self.terms[tuple(e)] = self.terms.get(tuple(e), Fraction(0)) + c
            self.terms = {e: c for e, c in self.terms.items() if c}

    def coefficient(self, expo) -> Fraction:
        return self.terms.get(tuple(expo), Fraction(0))

    def __eq__(self, other):
        return (isinstance(other, HomogeneousPolynomial)
                and self.nvars == other.nvars
                and self.terms == other.terms)

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if self.nvars != other.nvars or (self.terms and other.terms
                                         and self.degree != other.degree):
            raise ValueError("can only add polynomials of equal shape")
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return HomogeneousPolynomial(self.nvars, self.degree, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        scalar = Fraction(scalar)
        if not scalar:
            return HomogeneousPolynomial(self.nvars, self.degree)
        return HomogeneousPolynomial(
            self.nvars, self.degree, {e: c * scalar for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__rmul__(other)
        if self.nvars != other.nvars:
            raise ValueError("variable counts differ")
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(a + b for a, b in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return HomogeneousPolynomial(self.nvars, self.degree + other.degree,
                                     {e: c for e, c in out.items() if c})

    def is_symmetric(self) -> bool:
        for e, c in self.terms.items():
            for p in set(permutations(e)):
                if self.terms.get(p, Fraction(0)) != c:
                    return False
        return True

    def __repr__(self):
        return (f"HomogeneousPolynomial(nvars={self.nvars}, degree={self.degree}, "
                f"terms={len(self.terms)})")


class SymmetricPoly:
    """Homogeneous symmetric polynomial stored by sorted-exponent class."""

    __slots__ = ("nvars", "degree", "classes")

    def __init__(self, nvars: int, degree: int, classes=None):
        self.nvars = nvars
        self.degree = degree
        self.classes = dict(classes) if classes else {}
        for k in self.classes:
            if sum(k) != degree or len(k) > nvars:
                raise ValueError(f"class {k} violates shape ({nvars}, {degree})")

    def get(self, vec_or_key) -> Fraction:
        """Coefficient at an exponent vector (any order) or class key."""
        return self.classes.get(class_key(vec_or_key), Fraction(0))

    def __bool__(self):
        return bool(self.classes)

    def scaled(self, scalar) -> "SymmetricPoly":
        scalar = Fraction(scalar)
        if not scalar:
            return SymmetricPoly(self.nvars, self.degree)
        return SymmetricPoly(self.nvars, self.degree,
                             {k: c * scalar for k, c in self.classes.items()})

    def add_into(self, other: "SymmetricPoly", scalar=1) -> None:
        if other.classes and other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        scalar = Fraction(scalar)
        for k, c in other.classes.items():
            s = self.classes.get(k, Fraction(0)) + c * scalar
            if s:
                self.classes[k] = s
            else:
                self.classes.pop(k, None)

    def mul(self, other: "SymmetricPoly") -> "SymmetricPoly":
        """Class-wise product via divisor scan of each target class."""
        n = self.nvars
        deg = self.degree + other.degree
        out = {}
        for key in partitions_le(deg, n):
            ev = list(key) + [0] * (n - len(key))
            tot = Fraction(0)
            for f in _sub_vectors(ev, self.degree):
                ca = self.classes.get(class_key(f))
                if not ca:
                    continue
                cb = other.classes.get(
                    class_key([e - x for e, x in zip(ev, f)]))
                if cb:
                    tot += ca * cb
            if tot:
                out[key] = tot
        return SymmetricPoly(n, deg, out)

    def power(self, k: int) -> "SymmetricPoly":
        out = SymmetricPoly(self.nvars, 0, {(): Fraction(1)})
        for _ in range(k):
            out = out.mul(self)
        return out

    def expand(self) -> HomogeneousPolynomial:
        """Materialize the full polynomial (exponential in class orbit sizes)."""
        terms = {}
        for key, c in self.classes.items():
            padded = tuple(list(key) + [0] * (self.nvars - len(key)))
            for p in set(permutations(padded)):
                terms[p] = c
        return HomogeneousPolynomial(self.nvars, self.degree, terms)

    @classmethod
    def from_polynomial(cls, poly: HomogeneousPolynomial) -> "SymmetricPoly":
        classes = {}
        for e, c in poly.terms.items():
            k = class_key(e)
            prev = classes.get(k)
            if prev is None:
                classes[k] = c
            elif prev != c:
                raise ValueError("polynomial is not symmetric")
        return cls(poly.nvars, poly.degree, classes)

    def __repr__(self):
        return (f"SymmetricPoly(nvars={self.nvars}, degree={self.degree}, "
                f"classes={len(self.classes)})")


def _sub_vectors(ev, target_degree):
    """All componentwise 0 <= f <= ev with sum(f) == target_degree."""
    n = len(ev)
    out = []
    cur = [0] * n

    def rec(i, rem):
        if rem < 0:
            return
        if i == n:
            if rem == 0:
                out.append(tuple(cur))
            return
        # prune: remaining capacity
        for v in range(min(ev[i], rem), -1, -1):
            cur[i] = v
            rec(i + 1, rem - v)
        cur[i] = 0

    rec(0, target_degree)
    return out


def divide_by_variable_sum(num: SymmetricPoly) -> SymmetricPoly:
    """Exact quotient num / (x_1 + ... + x_n) for symmetric num.

    Solves the triangular system Q[f] = num[f + e_1] - (other unit moves),
    walking quotient classes in descending lex order, then verifies every
    class of num against the reconstructed product.  Raises ValueError if
    the division is not exact.
    """
    n = num.nvars
    deg = num.degree
    if deg < 1:
        if not num.classes:
            return SymmetricPoly(n, deg - 1)
        raise ValueError("nonzero polynomial of degree < 1 is not divisible")
    out = {}
    for f in sorted(partitions_le(deg - 1, n), reverse=True):
        ev = [f[0] + 1 if f else 1] + list(f[1:] if f else ())
        ev += [0] * (n - len(ev))
        total = num.classes.get(class_key(ev), Fraction(0))
        acc = Fraction(0)
        for kk, mult in _unit_decrements(ev):
            if kk == f:
                # f itself enters with multiplicity 1: ev starts at f[0]+1,
                # strictly above every other entry of the sorted vector
                continue
            acc += mult * out.get(kk, Fraction(0))
        out[f] = total - acc
    quotient = SymmetricPoly(n, deg - 1, {k: v for k, v in out.items() if v})
    # exactness: reconstruct every class of num
    for key in partitions_le(deg, n):
        ev = list(key) + [0] * (n - len(key))
        s = Fraction(0)
        for kk, mult in _unit_decrements(ev):
            s += mult * quotient.classes.get(kk, Fraction(0))
        if s != num.classes.get(key, Fraction(0)):
            raise ValueError("polynomial is not divisible by the variable sum")
    return quotient


def _unit_decrements(ev):
    """Distinct classes obtained by lowering one positive entry of ev by 1."""
    seen_vals = {}
    for v in ev:
        if v >= 1:
            seen_vals[v] = seen_vals.get(v, 0) + 1
    for v, mult in seen_vals.items():
        w = list(ev)
        w[w.index(v)] = v - 1
        yield class_key(w), mult
