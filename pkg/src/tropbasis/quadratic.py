"""Exact arithmetic in multiquadratic extensions ``Q(sqrt(d1), ..., sqrt(dk))``.

Lift constructions occasionally need the root of a quadratic whose
discriminant is not a rational square.  Such coefficients are represented as
``QuadElement`` values: coordinates over the basis of square-root products
``prod_{i in S} sqrt(d_i)``, indexed by the bitmask ``S``.  Radicands are
nonsquare integers, independent modulo squares, and grow only by appending,
so an element built over a shorter radicand tuple embeds into a longer one by
zero padding.

Every operation whose result is rational returns a plain ``gmpy2.mpq``, so
rational code paths never see this type.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpq

__all__ = [
    "QuadElement",
    "is_rational_square",
    "rational_sqrt",
    "sqrt_in_field",
    "radicand_for",
    "coef_to_json",
    "coef_from_json",
]


def _as_mpq(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return mpq(x)
    raise TypeError(f"not an exact rational: {x!r}")


def is_rational_square(q) -> bool:
    q = _as_mpq(q)
    if q < 0:
        return False
    return bool(gmpy2.is_square(q.numerator)) and bool(gmpy2.is_square(q.denominator))


def rational_sqrt(q) -> mpq:
    """Nonnegative square root of a rational square."""
    q = _as_mpq(q)
    return mpq(gmpy2.isqrt(q.numerator), gmpy2.isqrt(q.denominator))


@lru_cache(maxsize=None)
def _mul_table(rads: tuple) -> tuple:
    # (S, T) -> (S ^ T, prod of d_i over S & T)
    n = 1 << len(rads)
    table = []
    for s in range(n):
        row = []
        for t in range(n):
            f = 1
            for i, d in enumerate(rads):
                if (s & t) >> i & 1:
                    f *= d
            row.append((s ^ t, mpq(f)))
        table.append(tuple(row))
    return tuple(table)


def _conj_signs(k: int) -> tuple:
    # sign vectors of the nontrivial Galois conjugations
    n = 1 << k
    return tuple(
        tuple(-1 if bin(s & u).count("1") % 2 else 1 for s in range(n)) for u in range(1, n)
    )


class QuadElement:
    """Immutable element of ``Q(sqrt(d1), ..., sqrt(dk))`` with an irrational part."""

    __slots__ = ("rads", "coords")

    def __init__(self, rads, coords):
        self.rads = tuple(int(d) for d in rads)
        coords = tuple(_as_mpq(c) for c in coords)
        if len(coords) != 1 << len(self.rads):
            raise ValueError("coordinate count must be 2**len(rads)")
        self.coords = coords

    @staticmethod
    def make(rads, coords):
        """Build an element, collapsing to ``mpq`` when the result is rational."""
        if not any(coords[1:]):
            return coords[0]
        e = object.__new__(QuadElement)
        e.rads = rads
        e.coords = tuple(coords)
        return e

    @staticmethod
    def sqrt_of(rads, d: int):
        """``sqrt(d)`` for a radicand ``d`` already at the end of ``rads``."""
        i = rads.index(d)
        coords = [mpq(0)] * (1 << len(rads))
        coords[1 << i] = mpq(1)
        return QuadElement.make(rads, coords)

    # -- coercion ------------------------------------------------------------

    def _pair(self, other):
        if isinstance(other, QuadElement):
            a, b = self.rads, other.rads
            if len(a) >= len(b):
                if a[: len(b)] != b:
                    raise ValueError("incompatible radicand towers")
                return a, self.coords, other.coords + (mpq(0),) * (len(self.coords) - len(other.coords))
            if b[: len(a)] != a:
                raise ValueError("incompatible radicand towers")
            return b, self.coords + (mpq(0),) * (len(other.coords) - len(self.coords)), other.coords
        q = _as_mpq(other)
        return self.rads, self.coords, (q,) + (mpq(0),) * (len(self.coords) - 1)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        try:
            rads, a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return QuadElement.make(rads, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return QuadElement.make(self.rads, [-x for x in self.coords])

    def __sub__(self, other):
        try:
            rads, a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return QuadElement.make(rads, [x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QuadElement):
            try:
                q = _as_mpq(other)
            except TypeError:
                return NotImplemented
            return QuadElement.make(self.rads, [x * q for x in self.coords])
        rads, a, b = self._pair(other)
        table = _mul_table(rads)
        out = [mpq(0)] * len(a)
        for s, x in enumerate(a):
            if not x:
                continue
            row = table[s]
            for t, y in enumerate(b):
                if y:
                    u, f = row[t]
                    out[u] += x * y * f
        return QuadElement.make(rads, out)

    __rmul__ = __mul__

    def _conjugate(self, signs):
        return QuadElement.make(self.rads, [x * s for x, s in zip(self.coords, signs)])

    def inverse(self):
        prod = mpq(1)
        for signs in _conj_signs(len(self.rads)):
            prod = prod * self._conjugate(signs)
        norm = self * prod
        if isinstance(norm, QuadElement):  # pragma: no cover - radicands are independent
            raise ArithmeticError("norm is not rational; radicands are dependent")
        return prod * (1 / norm)

    def __truediv__(self, other):
        if isinstance(other, QuadElement):
            return self * other.inverse()
        try:
            q = _as_mpq(other)
        except TypeError:
            return NotImplemented
        return QuadElement.make(self.rads, [x / q for x in self.coords])

    def __rtruediv__(self, other):
        return self.inverse() * other

    # -- comparison ------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QuadElement):
            try:
                _, a, b = self._pair(other)
            except ValueError:
                return False
            return a == b
        # an element of this type always has a nonzero irrational part
        return False

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.rads, self.coords))

    def __bool__(self):
        return True

    def __repr__(self):
        parts = []
        for s, c in enumerate(self.coords):
            if not c:
                continue
            radical = "*".join(f"sqrt({d})" for i, d in enumerate(self.rads) if s >> i & 1)
            parts.append(f"{c}" if not radical else f"({c})*{radical}")
        return " + ".join(parts)


def sqrt_in_field(q, rads: tuple):
    """Square root of rational ``q`` inside ``Q(sqrt(rads))``, or ``None``.

    ``sqrt(q)`` lies in the field exactly when ``q / prod_{i in S} d_i`` is a
    rational square for some subset ``S``.
    """
    q = _as_mpq(q)
    if q == 0:
        return mpq(0)
    for s in range(1 << len(rads)):
        f = 1
        for i, d in enumerate(rads):
            if s >> i & 1:
                f *= d
        r = q / f
        if is_rational_square(r):
            coords = [mpq(0)] * (1 << len(rads))
            coords[s] = rational_sqrt(r)
            return QuadElement.make(rads, coords)
    return None


def radicand_for(q) -> tuple[int, mpq]:
    """Integer radicand ``d`` and rational ``r`` with ``sqrt(q) = r * sqrt(d)``."""
    q = _as_mpq(q)
    d = int(q.numerator) * int(q.denominator)
    r = mpq(1, int(q.denominator))
    # strip small square factors to keep radicands short
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while d % (p * p) == 0:
            d //= p * p
            r *= p
    return d, r


def coef_to_json(c):
    if isinstance(c, QuadElement):
        return {
            "radicands": [str(d) for d in c.rads],
            "coords": [str(Fraction(int(x.numerator), int(x.denominator))) for x in c.coords],
        }
    c = _as_mpq(c)
    return str(Fraction(int(c.numerator), int(c.denominator)))


def coef_from_json(obj):
    if isinstance(obj, dict):
        rads = tuple(int(d) for d in obj["radicands"])
        return QuadElement.make(rads, [_as_mpq(Fraction(x)) for x in obj["coords"]])
    return _as_mpq(Fraction(obj))
