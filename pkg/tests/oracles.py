"""Independent reference implementations used to check the package.

Nothing here imports the package's algorithms: determinants and monomials
are enumerated directly, assignments come from scipy, and series arithmetic
uses plain dicts of Fractions.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment


# --------------------------------------------------------------------------
# tropical determinants and monomials


def brute_tdet(M, rows=None, cols=None):
    """(value, realizers) with realizers as tuples of chosen column indices."""
    rows = list(range(len(M))) if rows is None else list(rows)
    cols = list(range(len(M[0]))) if cols is None else list(cols)
    best, winners = None, []
    for p in itertools.permutations(cols):
        w = sum(Fraction(M[r][c]) for r, c in zip(rows, p))
        if best is None or w < best:
            best, winners = w, [p]
        elif w == best:
            winners.append(p)
    return best, winners


def assignment_value(M) -> Fraction:
    """Optimal assignment cost from scipy (integer matrices only)."""
    a = np.array([[int(v) for v in row] for row in M], dtype=np.int64)
    r, c = linear_sum_assignment(a)
    return Fraction(int(a[r, c].sum()))


def sym_monos(M, rows, cols):
    """Minimizing monomials with pairs unordered, as sorted tuples of pairs."""
    _, winners = brute_tdet(M, rows, cols)
    return {tuple(sorted(tuple(sorted((r, c))) for r, c in zip(rows, p))) for p in winners}


def sym_singular(M, rows, cols) -> bool:
    return len(sym_monos(M, rows, cols)) >= 2


def rank_le3(M) -> bool:
    return all(
        sym_singular(M, R, C) for R in itertools.combinations(range(5), 4) for C in itertools.combinations(range(5), 4)
    )


def brute_rank(M, symmetric: bool) -> int:
    n = len(M)
    for r in range(n, 0, -1):
        for R in itertools.combinations(range(n), r):
            for C in itertools.combinations(range(n), r):
                if symmetric:
                    if not sym_singular(M, R, C):
                        return r
                elif len(brute_tdet(M, R, C)[1]) == 1:
                    return r
    return 0


def joint_pairs(M):
    """All pairs i < j satisfying the three joint conditions, by enumeration."""
    out = []
    for i, j in itertools.combinations(range(5), 2):

        def requirement(a, b):
            R = [r for r in range(5) if r != a]
            S = list(sym_monos(M, R, R))
            touching = lambda m: sorted(x for x in m if b in x)  # noqa: E731
            return any(touching(x) != touching(y) for x in S for y in S)

        R = [r for r in range(5) if r != j]
        C = [c for c in range(5) if c != i]
        T = sym_monos(M, R, C)
        cond3 = any((i, j) in m for m in T) and any((i, j) not in m for m in T)
        if requirement(i, j) and requirement(j, i) and cond3:
            out.append((i, j))
    return out


def exceptional_pattern(B) -> bool:
    """Exact match of the exceptional pattern in a fixed frame."""
    zeros = [(0, 0), (0, 1), (1, 1), (2, 2), (2, 3), (3, 3), (4, 4)]
    if any(B[i][j] != 0 for i, j in zeros):
        return False
    N1, N2, P = B[0][4], B[1][4], B[2][4]
    block = [B[i][j] for i in (0, 1) for j in (2, 3)]
    return B[3][4] == P and N1 > 0 and P > 0 and N2 >= N1 and all(N1 + P < b for b in block)


# --------------------------------------------------------------------------
# truncated series as {exponent: coefficient} dicts


def s_add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def s_mul(a, b, cutoff):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            if e1 + e2 < cutoff:
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def s_scale(a, k):
    return {e: c * k for e, c in a.items() if c * k != 0}


def leibniz_det(M, cutoff):
    """Determinant of a square matrix of series dicts by the Leibniz formula.

    Products are formed exactly and truncated only at the end, since later
    factors may carry negative exponents.
    """
    n = len(M)
    total = {}
    for p in itertools.permutations(range(n)):
        sign = 1
        for x, y in itertools.combinations(range(n), 2):
            if p[x] > p[y]:
                sign = -sign
        term = {Fraction(0): Fraction(1)}
        for r in range(n):
            term = s_mul(term, M[r][p[r]], float("inf"))
        total = s_add(total, s_scale(term, sign))
    return {e: c for e, c in total.items() if e < cutoff}
