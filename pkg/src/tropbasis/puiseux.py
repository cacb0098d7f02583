"""Truncated Puiseux series over Q with exact precision bookkeeping.

A series is a finite list of terms ``c * t**e`` together with a cutoff: all
information at exponents ``>= cutoff`` is unknown.  Arithmetic propagates the
cutoff the way absolute precision is propagated for p-adic numbers, so a
result never claims a term it cannot know.

Coefficients and exponents are stored as ``gmpy2.mpq``; the public surface
accepts and returns ``fractions.Fraction`` where that matters (serialization).
Coefficients may also be ``QuadElement`` values when a lift needs a square
root that is not rational; arithmetic is generic over both.
"""
from __future__ import annotations

import heapq
import random
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import CutoffExhausted, DivisionByZeroToCutoff
from .quadratic import QuadElement, coef_from_json, coef_to_json

__all__ = [
    "ZeroToCutoff",
    "ZERO_TO_CUTOFF",
    "PuiseuxSeries",
    "SeriesMatrix",
    "DivisionByZeroToCutoff",
    "CutoffExhausted",
    "deg",
    "add",
    "sub",
    "mul",
    "div",
    "det",
    "row_minors",
    "series_rank",
    "sqrt",
    "random_generic_coefficient",
    "GENERIC_RANGE",
]

# Generic coefficients are drawn uniformly from the integers in this range.
GENERIC_RANGE = (1, 2**31)


class ZeroToCutoff:
    """Degree marker for a series with no terms below its cutoff."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "ZeroToCutoff"


ZERO_TO_CUTOFF = ZeroToCutoff()


def _q(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or string")
    return mpq(x)


def _coef(x):
    # coefficients are rationals, or algebraic elements produced by lift solves
    if isinstance(x, QuadElement):
        return x
    return _q(x)


def _frac(x: mpq) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class PuiseuxSeries:
    """Immutable truncated series ``sum c_k t**e_k  (mod t**cutoff)``."""

    __slots__ = ("exps", "coefs", "cutoff")

    def __init__(self, terms: Iterable[tuple] = (), cutoff=0):
        cut = _q(cutoff)
        acc: dict[mpq, mpq] = {}
        for e, c in terms:
            e, c = _q(e), _coef(c)
            if e < cut:
                acc[e] = acc.get(e, 0) + c
        items = sorted((e, c) for e, c in acc.items() if c != 0)
        self.exps = tuple(e for e, _ in items)
        self.coefs = tuple(c for _, c in items)
        self.cutoff = cut

    @classmethod
    def _raw(cls, exps, coefs, cutoff) -> "PuiseuxSeries":
        # trusted constructor: sorted, nonzero, all below cutoff
        s = object.__new__(cls)
        s.exps = exps
        s.coefs = coefs
        s.cutoff = cutoff
        return s

    @classmethod
    def monomial(cls, coef, exp, cutoff) -> "PuiseuxSeries":
        return cls([(exp, coef)], cutoff)

    @classmethod
    def constant(cls, c, cutoff) -> "PuiseuxSeries":
        return cls([(0, c)], cutoff)

    @classmethod
    def zero(cls, cutoff) -> "PuiseuxSeries":
        return cls((), cutoff)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[mpq, mpq], ...]:
        return tuple(zip(self.exps, self.coefs))

    def is_zero_to_cutoff(self) -> bool:
        return not self.exps

    @property
    def valuation(self) -> mpq:
        """Leading exponent, or the cutoff when nothing is known below it."""
        return self.exps[0] if self.exps else self.cutoff

    @property
    def leading_coefficient(self) -> mpq:
        if not self.exps:
            raise DivisionByZeroToCutoff("series is zero up to its cutoff")
        return self.coefs[0]

    def __len__(self) -> int:
        return len(self.exps)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PuiseuxSeries)
            and self.exps == other.exps
            and self.coefs == other.coefs
            and self.cutoff == other.cutoff
        )

    def __hash__(self) -> int:
        return hash((self.exps, self.coefs, self.cutoff))

    def agrees_with(self, other: "PuiseuxSeries") -> bool:
        """Equal on every exponent below both cutoffs."""
        c = min(self.cutoff, other.cutoff)
        return self.truncate(c)._terms_eq(other.truncate(c))

    def _terms_eq(self, other) -> bool:
        return self.exps == other.exps and self.coefs == other.coefs

    def __repr__(self) -> str:
        if not self.exps:
            return f"O(t^{self.cutoff})"
        parts = [f"{c}*t^{e}" for e, c in zip(self.exps, self.coefs)]
        return " + ".join(parts) + f" + O(t^{self.cutoff})"

    # -- precision ----------------------------------------------------------

    def truncate(self, cutoff) -> "PuiseuxSeries":
        cut = _q(cutoff)
        if cut >= self.cutoff:
            return self
        k = 0
        while k < len(self.exps) and self.exps[k] < cut:
            k += 1
        return PuiseuxSeries._raw(self.exps[:k], self.coefs[:k], cut)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries._raw(self.exps, tuple(-c for c in self.coefs), self.cutoff)

    def __add__(self, other) -> "PuiseuxSeries":
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        cut = min(self.cutoff, other.cutoff)
        acc: dict[mpq, mpq] = {}
        for e, c in zip(self.exps, self.coefs):
            if e >= cut:
                break
            acc[e] = c
        for e, c in zip(other.exps, other.coefs):
            if e >= cut:
                break
            acc[e] = acc.get(e, 0) + c
        items = sorted((e, c) for e, c in acc.items() if c != 0)
        return PuiseuxSeries._raw(tuple(e for e, _ in items), tuple(c for _, c in items), cut)

    def __sub__(self, other) -> "PuiseuxSeries":
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "PuiseuxSeries":
        if not isinstance(other, PuiseuxSeries):
            try:
                k = _coef(other)
            except TypeError:
                return NotImplemented
            if k == 0:
                return PuiseuxSeries.zero(self.cutoff)
            return PuiseuxSeries._raw(self.exps, tuple(c * k for c in self.coefs), self.cutoff)
        cut = min(self.cutoff + other.valuation, other.cutoff + self.valuation)
        acc: dict[mpq, mpq] = {}
        oe, oc = other.exps, other.coefs
        for e1, c1 in zip(self.exps, self.coefs):
            for e2, c2 in zip(oe, oc):
                e = e1 + e2
                if e >= cut:
                    break
                acc[e] = acc.get(e, 0) + c1 * c2
        items = sorted((e, c) for e, c in acc.items() if c != 0)
        return PuiseuxSeries._raw(tuple(e for e, _ in items), tuple(c for _, c in items), cut)

    __rmul__ = __mul__

    def shift(self, exp) -> "PuiseuxSeries":
        """Multiply by ``t**exp`` (exact; the cutoff moves with it)."""
        d = _q(exp)
        return PuiseuxSeries._raw(tuple(e + d for e in self.exps), self.coefs, self.cutoff + d)

    def __truediv__(self, other) -> "PuiseuxSeries":
        if not isinstance(other, PuiseuxSeries):
            k = _coef(other)
            return PuiseuxSeries._raw(self.exps, tuple(c / k for c in self.coefs), self.cutoff)
        return div(self, other)

    # -- (de)serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {
            "terms": [[str(_frac(e)), coef_to_json(c)] for e, c in zip(self.exps, self.coefs)],
            "cutoff": str(_frac(self.cutoff)),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PuiseuxSeries":
        return cls(((Fraction(e), coef_from_json(c)) for e, c in obj["terms"]), Fraction(obj["cutoff"]))


def deg(a: PuiseuxSeries):
    """Leading exponent as a Fraction, or ``ZERO_TO_CUTOFF``."""
    if a.is_zero_to_cutoff():
        return ZERO_TO_CUTOFF
    return _frac(a.exps[0])


def add(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a + b


def sub(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a - b


def mul(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a * b


def div(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    """Long division ``a / b``, exact on every exponent below the result cutoff.

    The cutoff is ``min(cut(a) - v(b), cut(b) + v(a) - 2 v(b))``, the
    precision both operand tails allow.
    """
    if b.is_zero_to_cutoff():
        raise DivisionByZeroToCutoff(f"divisor {b!r} has no known terms")
    vb, lb = b.exps[0], b.coefs[0]
    cut = min(a.cutoff - vb, b.cutoff + a.valuation - 2 * vb)
    # remainder lives at exponents < cut + vb
    rcut = cut + vb
    rem: dict[mpq, mpq] = {e: c for e, c in zip(a.exps, a.coefs) if e < rcut}
    heap = list(rem)
    heapq.heapify(heap)
    q_exps: list[mpq] = []
    q_coefs: list[mpq] = []
    bt = list(zip(b.exps, b.coefs))
    while heap:
        e = heapq.heappop(heap)
        c = rem.pop(e, None)
        if c is None or c == 0:
            continue
        qe = e - vb
        qc = c / lb
        q_exps.append(qe)
        q_coefs.append(qc)
        for be, bc in bt[1:]:
            ne = qe + be
            if ne >= rcut:
                break
            if ne in rem:
                rem[ne] -= qc * bc
            else:
                rem[ne] = -qc * bc
                heapq.heappush(heap, ne)
    return PuiseuxSeries._raw(tuple(q_exps), tuple(q_coefs), cut)


def sqrt(a: PuiseuxSeries, lead_root) -> PuiseuxSeries:
    """Square root of ``a`` whose leading coefficient is ``lead_root``.

    ``lead_root**2`` must equal the leading coefficient of ``a``; the caller
    picks the branch and the coefficient field.  The result has valuation
    ``v(a)/2`` and keeps the relative precision of ``a``.
    """
    if a.is_zero_to_cutoff():
        raise DivisionByZeroToCutoff(f"square root of {a!r}: no known terms")
    if lead_root * lead_root != a.coefs[0]:
        raise ValueError("lead_root does not square to the leading coefficient")
    half = a.exps[0] / 2
    cut = a.cutoff - half
    s = PuiseuxSeries._raw((half,), (lead_root,), cut)
    # Newton's iteration doubles the number of correct terms each step
    while True:
        nxt = (s + a / s) * mpq(1, 2)
        nxt = nxt.truncate(cut)
        if nxt == s:
            return s
        s = nxt


def random_generic_coefficient(rng: random.Random) -> Fraction:
    """Uniform nonzero integer from ``GENERIC_RANGE``, as a Fraction."""
    return Fraction(rng.randint(*GENERIC_RANGE))


# --------------------------------------------------------------------------
# matrices over the series field


class SeriesMatrix:
    """Grid of series truncated to one common cutoff (the smallest given)."""

    __slots__ = ("entries", "rows", "cols", "cutoff")

    def __init__(self, entries: Sequence[Sequence[PuiseuxSeries]]):
        grid = [list(row) for row in entries]
        if not grid or not grid[0] or any(len(r) != len(grid[0]) for r in grid):
            raise ValueError("series matrix must be non-empty and rectangular")
        cut = min(s.cutoff for row in grid for s in row)
        self.entries = tuple(tuple(s.truncate(cut) for s in row) for row in grid)
        self.rows = len(grid)
        self.cols = len(grid[0])
        self.cutoff = cut

    def __getitem__(self, ij) -> PuiseuxSeries:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, SeriesMatrix) and self.entries == other.entries

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i] for i in range(self.rows) for j in range(i)
        )

    def tropicalize(self) -> list[list]:
        """Entrywise degree (``ZERO_TO_CUTOFF`` where unknown)."""
        return [[deg(s) for s in row] for row in self.entries]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SeriesMatrix":
        return SeriesMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def minor(self, rows: Sequence[int], cols: Sequence[int]) -> PuiseuxSeries:
        return det([[self.entries[i][j] for j in cols] for i in rows])

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "cutoff": str(_frac(self.cutoff)),
            "entries": [[s.to_json()["terms"] for s in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SeriesMatrix":
        cut = Fraction(obj["cutoff"])
        return cls(
            [[PuiseuxSeries(((Fraction(e), coef_from_json(c)) for e, c in cell), cut) for cell in row] for row in obj["entries"]]
        )


def _expand(rows: Sequence[Sequence[PuiseuxSeries]], ncols: int) -> dict[int, PuiseuxSeries]:
    # Laplace expansion over the given rows, memoized over column subsets;
    # returns every maximal minor keyed by its column bitmask
    prev: dict[int, PuiseuxSeries] = {0: None}  # type: ignore[dict-item]
    for row in rows:
        cur: dict[int, PuiseuxSeries] = {}
        for mask, sub in prev.items():
            for c in range(ncols):
                bit = 1 << c
                if mask & bit:
                    continue
                term = row[c] if sub is None else sub * row[c]
                # sign: number of already-used columns to the right of c
                if bin(mask >> (c + 1)).count("1") & 1:
                    term = -term
                nm = mask | bit
                cur[nm] = term if nm not in cur else cur[nm] + term
        prev = cur
    return prev


def det(rows: Sequence[Sequence[PuiseuxSeries]]) -> PuiseuxSeries:
    """Determinant by Laplace expansion memoized over column subsets."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    return _expand(rows, n)[(1 << n) - 1]


def row_minors(M: SeriesMatrix, rows: Sequence[int]) -> dict[tuple[int, ...], PuiseuxSeries]:
    """All minors on ``rows`` (one per column subset of the same size)."""
    table = _expand([M.entries[r] for r in rows], M.cols)
    return {tuple(c for c in range(M.cols) if mask >> c & 1): m for mask, m in table.items()}


def series_rank(M: SeriesMatrix, min_cutoff=None) -> int:
    """Rank modulo ``t**cutoff`` by elimination on minimal-degree pivots.

    Residual entries with no known terms count as zero.  That verdict is only
    trusted when the residual's cutoff exceeds ``min_cutoff`` (default: the
    largest degree among the input entries); otherwise ``CutoffExhausted``.
    """
    work = [list(row) for row in M.entries]
    if min_cutoff is None:
        known = [s.exps[0] for row in work for s in row if s.exps]
        min_cutoff = max(known) if known else M.cutoff
    min_cutoff = _q(min_cutoff)
    rank = 0
    rows_left = list(range(M.rows))
    cols_left = list(range(M.cols))
    while rows_left and cols_left:
        best = None
        for i in rows_left:
            for j in cols_left:
                s = work[i][j]
                if s.exps and (best is None or s.exps[0] < best[0]):
                    best = (s.exps[0], i, j)
        if best is None:
            for i in rows_left:
                for j in cols_left:
                    if work[i][j].cutoff <= min_cutoff:
                        raise CutoffExhausted(
                            f"residual entry known only below t^{work[i][j].cutoff}; "
                            f"need more than t^{min_cutoff}"
                        )
            break
        _, pi, pj = best
        piv = work[pi][pj]
        rows_left.remove(pi)
        cols_left.remove(pj)
        for i in rows_left:
            # even an all-unknown multiplier carries its cutoff into the row
            ratio = div(work[i][pj], piv)
            for j in cols_left:
                work[i][j] = work[i][j] - ratio * work[pi][j]
        rank += 1
    return rank
