"""Exact min-plus linear algebra.

Everything here works on exact rationals.  Internally a matrix is also kept
as an integer grid (entries multiplied by the lcm of their denominators) so
that the brute-force permutation sweeps only ever add machine integers; the
scaling is uniform, so ties are preserved exactly.

Indices are 0-based throughout the API.  Human-facing strings (``str`` of
permutations and monomials) use the 1-based convention of the literature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "as_fraction",
    "TropMatrix",
    "SymMatrix",
    "Permutation",
    "SubmatrixSelector",
    "Monomial",
    "SymMonomial",
    "TropPolynomial",
    "trop_eval",
    "on_hypersurface",
    "trop_det",
    "minimizing_monomials",
    "sym_minimizing_monomials",
    "is_trop_singular",
    "is_sym_trop_singular",
    "find_nonsingular",
    "tropical_rank",
    "symmetric_tropical_rank",
    "determinantal_polynomial",
]

# Largest submatrix handled by exhaustive enumeration (7! = 5040 terms).
MAX_DET_SIZE = 7


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings and mpq values to Fraction.

    Floats are rejected: a float tie is not an exact tie.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not tropical values")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError(f"refusing inexact float {x!r}; pass a Fraction or string")
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot interpret {x!r} as a rational")


class TropMatrix:
    """Rectangular matrix of exact rationals under min-plus semantics."""

    __slots__ = ("entries", "rows", "cols", "_int", "_denom")

    def __init__(self, entries: Iterable[Iterable]):
        grid = tuple(tuple(as_fraction(v) for v in row) for row in entries)
        if not grid or not grid[0]:
            raise ValueError("matrix must be non-empty")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise ValueError("ragged matrix")
        self.entries = grid
        self.rows = len(grid)
        self.cols = width
        denom = 1
        for row in grid:
            for v in row:
                denom = denom * v.denominator // math.gcd(denom, v.denominator)
        self._denom = denom
        self._int = tuple(tuple(int(v * denom) for v in row) for row in grid)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, TropMatrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in row) for row in self.entries)
        return f"{type(self).__name__}([{body}])"

    def transpose(self) -> "TropMatrix":
        return TropMatrix(zip(*self.entries))

    def submatrix(self, sel: "SubmatrixSelector") -> "TropMatrix":
        return TropMatrix([[self.entries[i][j] for j in sel.cols] for i in sel.rows])

    def int_grid(self) -> tuple[tuple[int, ...], ...]:
        """Entries times the common denominator (see module docstring)."""
        return self._int

    @property
    def denominator(self) -> int:
        return self._denom

    def tolist(self) -> list[list[Fraction]]:
        return [list(row) for row in self.entries]


class SymMatrix(TropMatrix):
    """Square symmetric tropical matrix; symmetry is checked on construction."""

    __slots__ = ()

    def __init__(self, entries):
        super().__init__(entries)
        if self.rows != self.cols:
            raise ValueError(f"symmetric matrix must be square, got {self.shape}")
        for i in range(self.rows):
            for j in range(i):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError(f"not symmetric at ({i}, {j})")

    @property
    def n(self) -> int:
        return self.rows


class Permutation:
    """Bijection on ``{0..n-1}`` stored as its tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(v) for v in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        images = list(range(n))
        seen: set[int] = set()
        for cyc in cycles:
            for k, v in enumerate(cyc):
                if v in seen:
                    raise ValueError(f"cycles overlap at {v}")
                seen.add(v)
                images[v] = cyc[(k + 1) % len(cyc)]
        return cls(images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Permutation({self.images})"

    def __str__(self) -> str:
        cycles = [c for c in self.cycles() if len(c) > 1]
        if not cycles:
            return "id"
        return "".join("(" + "".join(str(v + 1) for v in c) + ")" for c in cycles)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.images):
            inv[v] = i
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other`` (apply ``other`` first)."""
        return Permutation(self.images[v] for v in other.images)

    def cycles(self) -> list[tuple[int, ...]]:
        """Canonical cycle decomposition including fixed points.

        Each cycle starts at its smallest element; cycles are sorted by it.
        """
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            v = self.images[start]
            while v != start:
                cyc.append(v)
                seen[v] = True
                v = self.images[v]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def has_transposition(self) -> bool:
        return any(len(c) == 2 for c in self.cycles())


@dataclass(frozen=True)
class SubmatrixSelector:
    """Row and column index sets of a submatrix, in parent coordinates."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(sorted(self.rows)))
        object.__setattr__(self, "cols", tuple(sorted(self.cols)))
        if len(set(self.rows)) != len(self.rows) or len(set(self.cols)) != len(self.cols):
            raise ValueError("repeated index in selector")

    @property
    def is_square(self) -> bool:
        return len(self.rows) == len(self.cols)

    @property
    def size(self) -> int:
        return len(self.rows)

    @classmethod
    def full(cls, m: int, n: int | None = None) -> "SubmatrixSelector":
        return cls(tuple(range(m)), tuple(range(m if n is None else n)))

    @classmethod
    def minor(cls, n: int, drop_row: int, drop_col: int) -> "SubmatrixSelector":
        """Submatrix with one row and one column removed (``A_ij`` notation)."""
        return cls(
            tuple(k for k in range(n) if k != drop_row),
            tuple(k for k in range(n) if k != drop_col),
        )

    @classmethod
    def principal(cls, indices: Iterable[int]) -> "SubmatrixSelector":
        idx = tuple(indices)
        return cls(idx, idx)

    @classmethod
    def all_square(cls, m: int, n: int, r: int) -> Iterator["SubmatrixSelector"]:
        for rows in combinations(range(m), r):
            for cols in combinations(range(n), r):
                yield cls(rows, cols)

    def label(self) -> str:
        r = ",".join(str(i + 1) for i in self.rows)
        c = ",".join(str(j + 1) for j in self.cols)
        return f"rows {{{r}}} x cols {{{c}}}"


def _fmt_var(i: int, j: int) -> str:
    return f"X{i + 1}{j + 1}" if max(i, j) < 9 else f"X{i + 1},{j + 1}"


@dataclass(frozen=True)
class Monomial:
    """A product ``X[i, rho(i)]`` over the rows of a submatrix."""

    pairs: tuple[tuple[int, int], ...]
    weight: Fraction

    def __str__(self) -> str:
        return "*".join(_fmt_var(i, j) for i, j in self.pairs)

    def unordered(self) -> "SymMonomial":
        return SymMonomial.from_pairs(self.pairs, self.weight)


@dataclass(frozen=True)
class SymMonomial:
    """Monomial under ``X[i,j] = X[j,i]``: a sorted multiset of pairs ``i <= j``."""

    pairs: tuple[tuple[int, int], ...]
    weight: Fraction

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], weight) -> "SymMonomial":
        canon = tuple(sorted((min(i, j), max(i, j)) for i, j in pairs))
        return cls(canon, as_fraction(weight))

    def involving(self, k: int) -> tuple[tuple[int, int], ...]:
        """The sub-multiset of variables that mention index ``k``."""
        return tuple(p for p in self.pairs if k in p)

    def contains(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.pairs

    def exponent(self, i: int, j: int) -> int:
        return self.pairs.count((min(i, j), max(i, j)))

    def __str__(self) -> str:
        out = []
        for p in sorted(set(self.pairs)):
            e = self.pairs.count(p)
            out.append(_fmt_var(*p) + (f"^{e}" if e > 1 else ""))
        return "*".join(out)


# --------------------------------------------------------------------------
# tropical polynomials


@dataclass(frozen=True)
class TropPolynomial:
    """Min of linear forms ``coeff + <exponents, x>``."""

    monomials: tuple[tuple[Fraction, tuple[int, ...]], ...]

    def __post_init__(self):
        mons = tuple((as_fraction(c), tuple(int(e) for e in exps)) for c, exps in self.monomials)
        if not mons:
            raise ValueError("a tropical polynomial needs at least one monomial")
        dims = {len(e) for _, e in mons}
        if len(dims) != 1:
            raise ValueError("exponent vectors differ in length")
        if any(e < 0 for _, exps in mons for e in exps):
            raise ValueError("exponents must be non-negative")
        object.__setattr__(self, "monomials", mons)

    @property
    def nvars(self) -> int:
        return len(self.monomials[0][1])


def trop_eval(F: TropPolynomial, point: Sequence) -> tuple[Fraction, frozenset[int]]:
    """Value of ``F`` at ``point`` and the indices of all minimizing monomials."""
    pt = [as_fraction(v) for v in point]
    if len(pt) != F.nvars:
        raise ValueError(f"point has dimension {len(pt)}, polynomial has {F.nvars} variables")
    values = [c + sum(e * x for e, x in zip(exps, pt)) for c, exps in F.monomials]
    best = min(values)
    return best, frozenset(k for k, v in enumerate(values) if v == best)


def on_hypersurface(F: TropPolynomial, point: Sequence) -> bool:
    """True on the double-min locus of ``F``."""
    return len(trop_eval(F, point)[1]) >= 2


def determinantal_polynomial(n: int) -> TropPolynomial:
    """Tropical determinant of an n×n matrix of indeterminates (row-major vars)."""
    mons = []
    for perm in permutations(range(n)):
        exps = [0] * (n * n)
        for i, j in enumerate(perm):
            exps[i * n + j] = 1
        mons.append((0, tuple(exps)))
    return TropPolynomial(tuple(mons))


# --------------------------------------------------------------------------
# determinants


@lru_cache(maxsize=None)
def _perms(r: int) -> tuple[tuple[int, ...], ...]:
    return tuple(permutations(range(r)))


def _check_square(A: TropMatrix, sel: SubmatrixSelector | None) -> SubmatrixSelector:
    if sel is None:
        sel = SubmatrixSelector.full(A.rows, A.cols)
    if not sel.is_square:
        raise ValueError(f"non-square selection {len(sel.rows)}x{len(sel.cols)}")
    if sel.rows and (sel.rows[-1] >= A.rows or sel.cols[-1] >= A.cols or sel.rows[0] < 0 or sel.cols[0] < 0):
        raise IndexError("selector out of range")
    if sel.size > MAX_DET_SIZE:
        raise ValueError(f"exhaustive determinant limited to size {MAX_DET_SIZE}")
    if sel.size == 0:
        raise ValueError("empty selection")
    return sel


def _int_realizers(grid, rows, cols) -> tuple[int, list[tuple[int, ...]]]:
    sub = [[grid[i][j] for j in cols] for i in rows]
    best = None
    winners: list[tuple[int, ...]] = []
    for perm in _perms(len(rows)):
        w = 0
        for a, b in enumerate(perm):
            w += sub[a][b]
        if best is None or w < best:
            best = w
            winners = [perm]
        elif w == best:
            winners.append(perm)
    return best, winners


def trop_det(A: TropMatrix, sel: SubmatrixSelector | None = None) -> tuple[Fraction, tuple[Permutation, ...]]:
    """Tropical determinant of the selected square submatrix.

    Returns the value and every realizing bijection, as permutations of
    positions within the selection (row position ``a`` goes to column position
    ``perm(a)``), sorted lexicographically.
    """
    sel = _check_square(A, sel)
    best, winners = _int_realizers(A.int_grid(), sel.rows, sel.cols)
    return Fraction(best, A.denominator), tuple(Permutation(w) for w in winners)


def minimizing_monomials(A: TropMatrix, sel: SubmatrixSelector | None = None) -> tuple[Monomial, ...]:
    sel = _check_square(A, sel)
    value, realizers = trop_det(A, sel)
    return tuple(
        Monomial(tuple((sel.rows[a], sel.cols[p(a)]) for a in range(sel.size)), value)
        for p in realizers
    )


def _sym_key_set(rows, cols, winners) -> set[tuple[tuple[int, int], ...]]:
    keys = set()
    for perm in winners:
        pairs = []
        for a, b in enumerate(perm):
            i, j = rows[a], cols[b]
            pairs.append((i, j) if i <= j else (j, i))
        pairs.sort()
        keys.add(tuple(pairs))
    return keys


def sym_minimizing_monomials(A: TropMatrix, sel: SubmatrixSelector | None = None) -> tuple[SymMonomial, ...]:
    """Minimizing monomials after identifying ``X[i,j]`` with ``X[j,i]``.

    Pairs are labelled by parent indices, so for a non-principal selection a
    row index and a column index that coincide name the same variable.
    """
    sel = _check_square(A, sel)
    best, winners = _int_realizers(A.int_grid(), sel.rows, sel.cols)
    value = Fraction(best, A.denominator)
    keys = _sym_key_set(sel.rows, sel.cols, winners)
    return tuple(SymMonomial(k, value) for k in sorted(keys))


def is_trop_singular(A: TropMatrix, sel: SubmatrixSelector | None = None) -> bool:
    sel = _check_square(A, sel)
    _, winners = _int_realizers(A.int_grid(), sel.rows, sel.cols)
    return len(winners) >= 2


def is_sym_trop_singular(A: TropMatrix, sel: SubmatrixSelector | None = None) -> bool:
    sel = _check_square(A, sel)
    _, winners = _int_realizers(A.int_grid(), sel.rows, sel.cols)
    if len(winners) < 2:
        return False
    return len(_sym_key_set(sel.rows, sel.cols, winners)) >= 2


# --------------------------------------------------------------------------
# ranks

# Rows of r×r submatrices evaluated per numpy chunk; bounds peak memory.
_CHUNK_ELEMS = 4_000_000


def _batched_nonsingular(grid: np.ndarray, r: int, symmetric: bool) -> tuple[int, int] | None:
    """Vectorized search for a nonsingular r×r submatrix.

    Returns (row-combo index, col-combo index) of the first hit in
    lexicographic order, or None when every r×r submatrix is singular.
    """
    m, n = grid.shape
    rc = np.array(list(combinations(range(m), r)), dtype=np.int64)
    cc = np.array(list(combinations(range(n), r)), dtype=np.int64)
    perms = np.array(_perms(r), dtype=np.int64)
    # colsel[b, p, k] = column index used by row position k under perm p
    colsel = cc[:, perms]
    ar = np.arange(r)
    per_row = max(1, _CHUNK_ELEMS // (len(cc) * len(perms) * r))
    base = max(m, n)
    for start in range(0, len(rc), per_row):
        rows = rc[start:start + per_row]                       # (a, r)
        vals = grid[rows[:, None, None, :], colsel[None, :, :, :]]  # (a, b, p, r)
        w = vals.sum(axis=3)
        best = w.min(axis=2, keepdims=True)
        is_min = w == best
        nmin = is_min.sum(axis=2)
        if not symmetric:
            hits = np.argwhere(nmin == 1)
        else:
            ri = np.broadcast_to(rows[:, None, None, :], vals.shape)
            ci = np.broadcast_to(colsel[None, :, :, :], vals.shape)
            pid = np.minimum(ri, ci) * base + np.maximum(ri, ci)
            pid = np.sort(pid, axis=3)
            key = np.zeros(w.shape, dtype=np.int64)
            for k in ar:
                key = key * (base * base) + pid[..., k]
            key = np.where(is_min, key, -1)
            key = np.sort(key, axis=2)
            distinct = ((key[..., 1:] != key[..., :-1]) & (key[..., 1:] >= 0)).sum(axis=2)
            distinct += key[..., 0] >= 0
            hits = np.argwhere(distinct == 1)
        if len(hits):
            a, b = hits[0]
            return start + int(a), int(b)
    return None


def _fits_int64(A: TropMatrix, r: int) -> bool:
    bound = max(abs(v) for row in A.int_grid() for v in row)
    return bound * r < 2**62 and (max(A.shape) ** 2) ** r < 2**62


def find_nonsingular(A: TropMatrix, r: int, symmetric: bool = False) -> SubmatrixSelector | None:
    """First (lexicographic) r×r submatrix that is (symmetrically) nonsingular."""
    if r > min(A.shape):
        return None
    if r == 1:
        return SubmatrixSelector((0,), (0,))
    if _fits_int64(A, r):
        hit = _batched_nonsingular(np.array(A.int_grid(), dtype=np.int64), r, symmetric)
        if hit is None:
            return None
        rows = list(combinations(range(A.rows), r))[hit[0]]
        cols = list(combinations(range(A.cols), r))[hit[1]]
        return SubmatrixSelector(rows, cols)
    test = is_sym_trop_singular if symmetric else is_trop_singular
    for sel in SubmatrixSelector.all_square(A.rows, A.cols, r):
        if not test(A, sel):
            return sel
    return None


def _rank(A: TropMatrix, symmetric: bool) -> int:
    # Singularity of every r×r submatrix forces singularity of every larger
    # one (expand along a realizer), so the first all-singular size ends
    # the search.
    rank = 1
    for r in range(2, min(A.shape) + 1):
        if r > MAX_DET_SIZE:
            raise ValueError(f"rank search beyond size {MAX_DET_SIZE} is not supported")
        if find_nonsingular(A, r, symmetric) is None:
            break
        rank = r
    return rank


def tropical_rank(A: TropMatrix) -> int:
    """Largest r such that some r×r submatrix is tropically nonsingular."""
    return _rank(A, symmetric=False)


def symmetric_tropical_rank(A: SymMatrix) -> int:
    """Largest r such that some r×r submatrix is symmetrically nonsingular."""
    if not isinstance(A, SymMatrix):
        A = SymMatrix(A.entries)
    return _rank(A, symmetric=True)
