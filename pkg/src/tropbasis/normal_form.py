"""Symmetry-preserving transformations and the nonnegative normal form.

Two moves keep a symmetric matrix inside its class (same symmetric
minimizing monomials in every submatrix, up to relabelling):

* diagonal permutation: the same permutation on rows and columns;
* symmetric scaling: add ``c`` to row ``i`` and to column ``i``.

:func:`normalize` combines one diagonal permutation with a sequence of
scalings to bring a 5x5 symmetric matrix into a frame where a chosen
realizer sits on zeros and every entry is nonnegative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    IterationLimitExceeded,
    NotARealizer,
    NotSingular,
    TranspositionNotFound,
)
from .trop_core import (
    Permutation,
    SymMatrix,
    as_fraction,
    is_sym_trop_singular,
    trop_det,
)

__all__ = [
    "diagonal_permute",
    "symmetric_scale",
    "ScalingSequence",
    "Blank",
    "Plus",
    "FormMatrix",
    "matches_form",
    "lemma1_rewrite",
    "find_transposition_realizer",
    "NormalForm",
    "normalize",
    "frame_for",
]


def diagonal_permute(A: SymMatrix, sigma: Permutation) -> SymMatrix:
    """``result[i][j] = A[sigma^-1(i)][sigma^-1(j)]``."""
    if sigma.n != A.n:
        raise ValueError(f"permutation on {sigma.n} points for a {A.n}x{A.n} matrix")
    inv = sigma.inverse().images
    return SymMatrix([[A.entries[inv[i]][inv[j]] for j in range(A.n)] for i in range(A.n)])


def symmetric_scale(A: SymMatrix, i: int, c) -> SymMatrix:
    """Tropically multiply row ``i`` and column ``i`` by ``c``."""
    if not 0 <= i < A.n:
        raise IndexError(f"index {i} out of range for size {A.n}")
    c = as_fraction(c)
    rows = [list(r) for r in A.entries]
    for k in range(A.n):
        rows[i][k] += c
        rows[k][i] += c
    return SymMatrix(rows)


@dataclass
class ScalingSequence:
    """Ordered ``(index, c)`` scaling steps; replaying them is exact."""

    steps: list[tuple[int, Fraction]] = field(default_factory=list)

    def apply(self, A: SymMatrix) -> SymMatrix:
        rows = [list(r) for r in A.entries]
        for i, c in self.steps:
            for k in range(len(rows)):
                rows[i][k] += c
                rows[k][i] += c
        return SymMatrix(rows)

    def totals(self, n: int) -> list[Fraction]:
        """Net amount added to each row/column."""
        out = [Fraction(0)] * n
        for i, c in self.steps:
            out[i] += c
        return out

    def __len__(self) -> int:
        return len(self.steps)


# --------------------------------------------------------------------------
# form matrices


class _Blank:
    def __repr__(self):
        return "."


class _Plus:
    def __repr__(self):
        return "+"


Blank = _Blank()
Plus = _Plus()


class FormMatrix:
    """Pattern whose cells are Blank, Plus (strictly positive) or a constant."""

    def __init__(self, cells: Sequence[Sequence]):
        grid = []
        for row in cells:
            out = []
            for cell in row:
                if cell is Blank or cell is Plus:
                    out.append(cell)
                else:
                    v = as_fraction(cell)
                    if v < 0:
                        raise ValueError(f"form constants must be nonnegative, got {v}")
                    out.append(v)
            grid.append(tuple(out))
        n = len(grid)
        if any(len(r) != n for r in grid):
            raise ValueError("form matrix must be square")
        for i in range(n):
            for j in range(i):
                if grid[i][j] != grid[j][i] and not (grid[i][j] is grid[j][i]):
                    raise ValueError(f"form is not symmetric at ({i}, {j})")
        self.cells = tuple(grid)
        self.n = n

    @classmethod
    def parse(cls, text: str) -> "FormMatrix":
        """Grid of ``.`` (blank), ``+`` and rationals, one row per line."""
        rows = []
        for line in text.strip().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            row = []
            for tok in line.split():
                if tok == ".":
                    row.append(Blank)
                elif tok == "+":
                    row.append(Plus)
                else:
                    row.append(Fraction(tok))
            rows.append(row)
        return cls(rows)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(c) if isinstance(c, Fraction) else repr(c) for c in row) for row in self.cells)


def matches_form(A: SymMatrix, F: FormMatrix) -> bool:
    if A.n != F.n:
        raise ValueError(f"size mismatch: matrix {A.n}, form {F.n}")
    for i in range(A.n):
        for j in range(A.n):
            cell = F.cells[i][j]
            if cell is Blank:
                continue
            v = A.entries[i][j]
            if cell is Plus:
                if v <= 0:
                    return False
            elif v != cell:
                return False
    return True


# --------------------------------------------------------------------------
# realizer manipulations


def lemma1_rewrite(sigma: Permutation, cycle: Sequence[int]) -> tuple[Permutation, Permutation]:
    """Replace the 4-cycle ``(k1 k2 k3 k4)`` of ``sigma`` by its two
    transposition pairs ``(k1 k2)(k3 k4)`` and ``(k1 k4)(k2 k3)``."""
    k = tuple(cycle)
    if len(k) != 4:
        raise ValueError("expected a 4-cycle")
    if any(sigma(k[a]) != k[(a + 1) % 4] for a in range(4)):
        raise ValueError(f"cycle {k} is not part of {sigma}")
    first = list(sigma.images)
    first[k[0]], first[k[1]], first[k[2]], first[k[3]] = k[1], k[0], k[3], k[2]
    second = list(sigma.images)
    second[k[0]], second[k[3]], second[k[1]], second[k[2]] = k[3], k[0], k[2], k[1]
    return Permutation(first), Permutation(second)


def find_transposition_realizer(A: SymMatrix) -> Permutation:
    """A realizer of ``trop_det(A)`` containing a 2-cycle (5x5, singular A)."""
    if A.n != 5:
        raise ValueError("defined for 5x5 matrices")
    if not is_sym_trop_singular(A):
        raise NotSingular("matrix is symmetrically tropically nonsingular")
    _, realizers = trop_det(A)
    for sigma in realizers:
        if sigma.has_transposition():
            return sigma
    for sigma in realizers:
        for cyc in sigma.cycles():
            if len(cyc) == 4:
                for cand in lemma1_rewrite(sigma, cyc):
                    if cand in realizers:
                        return cand
    raise TranspositionNotFound(f"no transposition realizer for {A!r}")


# --------------------------------------------------------------------------
# normalization


@dataclass
class NormalForm:
    """Result of :func:`normalize`.

    ``matrix == scaling.apply(diagonal_permute(source, frame))`` and
    ``realizer`` is the input realizer conjugated into that frame.
    """

    matrix: SymMatrix
    frame: Permutation
    realizer: Permutation
    scaling: ScalingSequence
    source_realizer: Permutation


def frame_for(sigma: Permutation) -> Permutation:
    """Diagonal permutation moving ``sigma`` to its canonical representative.

    Non-trivial cycles come first (longest odd cycle, then transpositions,
    each walked from its smallest element), fixed points last in order.
    So ``(ab)`` becomes ``(12)``, ``(abc)(de)`` becomes ``(123)(45)``.
    """
    cycles = sigma.cycles()
    odd = [c for c in cycles if len(c) >= 3]
    twos = [c for c in cycles if len(c) == 2]
    ones = [c for c in cycles if len(c) == 1]
    order = [v for c in sorted(odd, key=len, reverse=True) for v in c]
    order += [v for c in twos for v in c] + [v for c in ones for v in c]
    images = [0] * sigma.n
    for pos, v in enumerate(order):
        images[v] = pos
    return Permutation(images)


class _Scaler:
    """Mutable working copy that logs every scaling step."""

    def __init__(self, A: SymMatrix, cap: int):
        self.a = [list(r) for r in A.entries]
        self.n = A.n
        self.steps: list[tuple[int, Fraction]] = []
        self.cap = cap
        self.fixups = 0

    def scale(self, i: int, c) -> None:
        c = Fraction(c)
        if c == 0:
            return
        for k in range(self.n):
            self.a[i][k] += c
            self.a[k][i] += c
        self.steps.append((i, c))

    def tick(self) -> None:
        self.fixups += 1
        if self.fixups > self.cap:
            raise IterationLimitExceeded(f"normalization fix-ups exceeded {self.cap} steps")


def _solve_block_shifts(w: _Scaler, blocks: Sequence[tuple[int, int]]) -> None:
    """Make every entry nonnegative by shifting weight inside transposition blocks.

    Block ``(p, q)`` gets one parameter ``d``: row/column ``p`` is scaled by
    ``d`` and ``q`` by ``-d``, which keeps ``a[p][q]`` at zero.  Each entry
    then gives a linear constraint on the (at most two) parameters.  The
    chosen shift is the feasible point of least L1 norm, found exactly among
    the vertices of the constraint arrangement (axes included).
    """
    k = len(blocks)
    coef = [[0] * k for _ in range(w.n)]
    for b, (p, q) in enumerate(blocks):
        coef[p][b], coef[q][b] = 1, -1
    cons = []  # (vector, bound): vector . d >= bound
    for i in range(w.n):
        for j in range(i, w.n):
            vec = tuple(coef[i][b] + coef[j][b] for b in range(k))
            bound = -w.a[i][j]
            if any(vec):
                cons.append((vec, bound))
            elif bound > 0:
                raise NotARealizer(f"entry ({i}, {j}) is negative and cannot move")

    def feasible(d):
        return all(sum(v * x for v, x in zip(vec, d)) >= bound for vec, bound in cons)

    origin = tuple(Fraction(0) for _ in range(k))
    if feasible(origin):
        return
    lines = cons + [(tuple(int(b == c) for b in range(k)), Fraction(0)) for c in range(k)]
    cands = []
    if k == 1:
        cands = [(Fraction(bound) / vec[0],) for vec, bound in lines if vec[0]]
    else:
        for x in range(len(lines)):
            (a1, b1), r1 = lines[x]
            for y in range(x + 1, len(lines)):
                (a2, b2), r2 = lines[y]
                det = a1 * b2 - a2 * b1
                if det:
                    cands.append((Fraction(r1 * b2 - r2 * b1) / det, Fraction(a1 * r2 - a2 * r1) / det))
    best = None
    for d in cands:
        if feasible(d):
            key = (sum(abs(x) for x in d), d)
            if best is None or key < best:
                best = key
    if best is None:
        raise NotARealizer("no nonnegative frame exists for this realizer")
    for (p, q), d in zip(blocks, best[1]):
        w.tick()
        w.scale(p, d)
        w.scale(q, -d)


def _normalize_frame(w: _Scaler, ctype: tuple[int, ...]) -> None:
    a = w.a
    n = w.n
    if ctype == (1, 1, 1, 1, 1):
        for i in range(n):
            w.scale(i, -a[i][i] / 2)
    elif ctype == (2, 1, 1, 1):
        c = -a[0][1] / 2
        w.scale(0, c)
        w.scale(1, c)
        for i in (2, 3, 4):
            w.scale(i, -a[i][i] / 2)
        _solve_block_shifts(w, [(0, 1)])
    elif ctype in ((3, 1, 1), (3, 2)):
        w.scale(1, -a[0][1])
        w.scale(2, -a[1][2])
        v = a[0][2]
        w.scale(0, -v / 2)
        w.scale(2, -v / 2)
        w.scale(1, v / 2)
        if ctype == (3, 1, 1):
            w.scale(3, -a[3][3] / 2)
            w.scale(4, -a[4][4] / 2)
        else:
            c = -a[3][4] / 2
            w.scale(3, c)
            w.scale(4, c)
            _solve_block_shifts(w, [(3, 4)])
    elif ctype == (2, 2, 1):
        for p, q in ((0, 1), (2, 3)):
            c = -a[p][q] / 2
            w.scale(p, c)
            w.scale(q, c)
        w.scale(4, -a[4][4] / 2)
        _solve_block_shifts(w, [(0, 1), (2, 3)])
    elif ctype == (5,):
        for i in range(1, 5):
            w.scale(i, -a[i - 1][i])
        v = a[0][4]
        for i in range(5):
            w.scale(i, -v / 2 if i % 2 == 0 else v / 2)
    else:
        raise ValueError(f"unsupported cycle type {ctype}")


def normalize(A: SymMatrix, sigma: Permutation, max_steps: int | None = None) -> NormalForm:
    """Bring ``A`` to a nonnegative frame with zeros along a realizer.

    A 4-cycle in ``sigma`` is first replaced by two transpositions.  The
    scalings follow the cycle type of the realizer; whatever freedom is left
    (one shift per transposition) is then fixed by an exact feasibility solve.
    """
    if A.n != 5 or sigma.n != 5:
        raise ValueError("normalization is defined for 5x5 matrices")
    value, realizers = trop_det(A)
    if sigma not in realizers:
        raise NotARealizer(f"{sigma} does not realize the tropical determinant")
    source = sigma
    for cyc in sigma.cycles():
        if len(cyc) == 4:
            sigma = lemma1_rewrite(sigma, cyc)[0]
            if sigma not in realizers:
                raise NotARealizer(f"4-cycle rewrite {sigma} is not a realizer")
            break
    frame = frame_for(sigma)
    framed = diagonal_permute(A, frame)
    sigma_f = frame.compose(sigma).compose(frame.inverse())
    w = _Scaler(framed, 20 * A.n * A.n if max_steps is None else max_steps)
    _normalize_frame(w, sigma_f.cycle_type())
    out = SymMatrix(w.a)
    bad = [(i, j) for i in range(5) for j in range(5) if out.entries[i][j] < 0]
    if bad:
        raise NotARealizer(f"negative entries {bad} survive normalization")
    if any(out.entries[i][sigma_f(i)] != 0 for i in range(5)):
        raise NotARealizer("realizer entries are not zero after normalization")
    return NormalForm(out, frame, sigma_f, ScalingSequence(w.steps), source)
