"""Symmetric rank-three lifts of 5x5 matrices over truncated Puiseux series.

Two constructions are provided.  :func:`joint_lift` handles matrices with
joints: a generic 3x3 block is bordered by two columns, each solved so the
bordered 4x4 is singular, and the shared off-diagonal entry comes from one
more singular 4x4.  :func:`exceptional_lift` handles the exceptional form
through a 6x6 augmentation whose extra index is deleted at the end.

Every construction returns a :class:`LiftCertificate` that
:func:`verify_lift` checks from scratch.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .errors import (
    CertificateInvalid,
    CutoffExhausted,
    DegreeMismatch,
    DivisionByZeroToCutoff,
    GenericityExhausted,
    NotOnHypersurface,
)
from .joints import (
    Exceptional,
    ExceptionalParams,
    HasJoints,
    JointCertificate,
    all_joints,
    _match_exceptional,
    verify_joint_certificate,
)
from .puiseux import (
    PuiseuxSeries,
    SeriesMatrix,
    _frac,
    det,
    random_generic_coefficient,
    row_minors,
    series_rank,
)
from .puiseux import sqrt as series_sqrt
from .quadratic import QuadElement, radicand_for, sqrt_in_field
from .trop_core import (
    Permutation,
    SubmatrixSelector,
    SymMatrix,
    TropMatrix,
    sym_minimizing_monomials,
    trop_det,
)

__all__ = [
    "LiftCertificate",
    "LiftReport",
    "default_cutoff",
    "precision_need",
    "kapranov_entry_solve",
    "joint_lift",
    "exceptional_lift",
    "lift",
    "verify_lift",
    "MAX_RETRIES",
    "MAX_ESCALATIONS",
]

MAX_RETRIES = 16
MAX_ESCALATIONS = 4
_NEWTON_STEPS = 64

Series = PuiseuxSeries


def precision_need(A: TropMatrix) -> Fraction:
    """Least cutoff at which a lift of the 5x5 ``A`` says anything about its 4x4 minors.

    The term of a minor along a bijection with entries ``e_1..e_4`` is known
    below ``cutoff + sum(e) - max(e)``.  A minor that vanishes modulo its
    cutoff certifies singularity only when that bound exceeds the minor's
    tropical determinant, and every entry must itself be known.
    """
    E = A.entries
    need = max(v for row in E for v in row)
    for rows in itertools.combinations(range(A.rows), 4):
        for cols in itertools.combinations(range(A.cols), 4):
            best = slack = None
            for perm in itertools.permutations(cols):
                es = [E[r][c] for r, c in zip(rows, perm)]
                w = sum(es)
                best = w if best is None or w < best else best
                s = w - max(es)
                slack = s if slack is None or s < slack else slack
            need = max(need, best - slack)
    return need


def default_cutoff(A: TropMatrix) -> Fraction:
    """:func:`precision_need` plus a margin of 2 for the rank elimination."""
    return precision_need(A) + 2


def _generic(rng: random.Random, degree, cutoff) -> Series:
    return Series.monomial(random_generic_coefficient(rng), degree, cutoff)


def _deg(s: Series):
    return None if s.is_zero_to_cutoff() else _frac(s.exps[0])


def _expect_degree(x: Series, target, what: str) -> None:
    d = _deg(x)
    if d is None:
        raise CutoffExhausted(f"{what} vanished to its cutoff t^{x.cutoff}")
    if d != target:
        raise DegreeMismatch(f"{what} has degree {d}, expected {target}")


def _degree_matrix(M: Sequence[Sequence[Series]], skip=None) -> list[list[Fraction]]:
    out = []
    for a, row in enumerate(M):
        cur = []
        for b, s in enumerate(row):
            if (a, b) == skip:
                cur.append(None)
                continue
            d = _deg(s)
            if d is None:
                raise CutoffExhausted("an entry vanished to its cutoff")
            cur.append(d)
        out.append(cur)
    return out


# --------------------------------------------------------------------------
# entry solves


def _linear_solve(M: Sequence[Sequence[Series]], r: int, c: int, cutoff) -> Series:
    """``x`` with ``det(M[r][c] := x) == 0``; ``det`` is affine in ``x``."""
    n = len(M)
    minor = [[M[a][b] for b in range(n) if b != c] for a in range(n) if a != r]
    alpha = det(minor)
    if (r + c) % 2:
        alpha = -alpha
    zeroed = [list(row) for row in M]
    zeroed[r][c] = Series.zero(cutoff)
    beta = det(zeroed)
    if alpha.is_zero_to_cutoff():
        raise CutoffExhausted("cofactor of the unknown entry vanished to its cutoff")
    return -(beta / alpha)


def kapranov_entry_solve(M: Sequence[Sequence[Series]], r: int, c: int, target_degree, check: bool = True) -> Series:
    """Solve the single unknown ``M[r][c]`` so that ``det(M)`` vanishes.

    The value stored at ``(r, c)`` is ignored.  With ``check`` the degree
    matrix (target at ``(r, c)``) must have minimizing permutations both
    through and avoiding ``(r, c)``; otherwise NotOnHypersurface.  The
    result must have degree ``target_degree`` or DegreeMismatch is raised.
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("square matrix required")
    target = Fraction(target_degree)
    cutoff = min(s.cutoff for row in M for s in row)
    if check:
        degs = _degree_matrix(M, skip=(r, c))
        degs[r][c] = target
        _, realizers = trop_det(TropMatrix(degs))
        through = any(p(r) == c for p in realizers)
        avoid = any(p(r) != c for p in realizers)
        if not (through and avoid):
            raise NotOnHypersurface(f"entry ({r}, {c}) does not sit on a double minimum at degree {target}")
    x = _linear_solve(M, r, c, cutoff)
    _expect_degree(x, target, f"entry ({r}, {c})")
    return x


def _univariate_coefficients(M: list[list[Series]], a: int, b: int, cutoff) -> tuple[Series, Series, Series]:
    """Coefficients of ``det`` as a quadratic in ``y = M[a][b] = M[b][a]``."""

    def at(v):
        W = [list(row) for row in M]
        W[a][b] = W[b][a] = Series.constant(v, cutoff) if v else Series.zero(cutoff)
        return det(W)

    f0, f1, fm = at(0), at(1), at(-1)
    c1 = (f1 - fm) * Fraction(1, 2)
    c2 = (f1 + fm) * Fraction(1, 2) - f0
    return f0, c1, c2


def _leading_root(c: tuple[Series, Series, Series], S: set[int], target: Fraction, rads: tuple):
    """Leading coefficient of a simple root of ``c0 + c1 y + c2 y^2`` at degree
    ``target`` whose tied exponents are ``S``.

    Returns ``(zeta, rads)``.  A quadratic leading equation with a nonsquare
    discriminant adjoins its square root to the radicand tower ``rads``; a
    repeated root gives ``zeta = None``.
    """
    lead = {}
    for e in range(3):
        d = _deg(c[e])
        if d is not None:
            lead[e] = (d + e * target, c[e].coefs[0])
    if not lead:
        raise CutoffExhausted("univariate coefficients vanished to their cutoff")
    low = min(v for v, _ in lead.values())
    lead = {e: v for e, v in lead.items() if v[0] == low}
    if set(lead) != set(S):
        raise DegreeMismatch(f"tied exponents {sorted(lead)} differ from {sorted(S)} at degree {target}")
    p = [lead[e][1] if e in lead else 0 for e in range(3)]
    if p[2] == 0:
        return -p[0] / p[1], rads
    if p[0] == 0:
        return -p[1] / p[2], rads
    disc = p[1] * p[1] - 4 * p[0] * p[2]
    if disc == 0:
        return None, rads
    if isinstance(disc, QuadElement):
        raise NotOnHypersurface("discriminant outside the rational field")
    root, rads = _extend_sqrt(disc, rads)
    return (root - p[1]) / (2 * p[2]), rads


def _extend_sqrt(q, rads: tuple):
    """``(sqrt(q), rads')`` with ``rads'`` extended when ``sqrt(q)`` is new."""
    if isinstance(q, QuadElement):
        raise NotOnHypersurface("square root of an algebraic coefficient is not supported")
    root = sqrt_in_field(q, rads)
    if root is None:
        d, r = radicand_for(q)
        rads = rads + (d,)
        root = QuadElement.sqrt_of(rads, d) * r
    return root, rads


def _formula_root(c: tuple[Series, Series, Series], target: Fraction, rads: tuple):
    """Root of degree ``target`` from the quadratic formula, for leading
    equations with a repeated root, where Newton's method cannot start.
    The discriminant's square root may carry a half-integer exponent."""
    c0, c1, c2 = c
    delta = c1 * c1 - c0 * c2 * 4
    two_c2 = c2 * 2
    if delta.is_zero_to_cutoff():
        return -c1 / two_c2, rads
    lead, rads = _extend_sqrt(delta.coefs[0], rads)
    root = series_sqrt(delta, lead)
    for y in ((root - c1) / two_c2, (-root - c1) / two_c2):
        if _deg(y) == target:
            return y, rads
    raise DegreeMismatch(f"neither quadratic root has degree {target}")


def _newton_root(c: tuple[Series, Series, Series], zeta, target: Fraction, cutoff) -> Series:
    """Hensel lift of the simple root of ``c0 + c1 y + c2 y^2`` with leading term ``zeta t^target``."""
    y = Series.monomial(zeta, target, cutoff)
    c0, c1, c2 = c
    two_c2 = c2 * 2
    for _ in range(_NEWTON_STEPS):
        f = c0 + y * (c1 + c2 * y)
        if f.is_zero_to_cutoff():
            return y
        step = f / (c1 + two_c2 * y)
        if step.is_zero_to_cutoff():
            return y
        y = y - step
    raise CutoffExhausted("Newton iteration did not settle")


def _exponent_sets(degs: list[list[Fraction]], k: int) -> dict[tuple[int, int], set[int]]:
    """For the bordered principal block ``{0,1,2,k}``, the exponents each
    unknown takes across the minimizing symmetric monomials."""
    sel = SubmatrixSelector.principal((0, 1, 2, k))
    monos = sym_minimizing_monomials(SymMatrix(degs), sel)
    out = {}
    for var in ((k, k), (0, k), (1, k), (2, k)):
        out[var] = {m.exponent(*var) for m in monos}
    return out


def _solve_border(
    G: list[list[Series]],
    degs: list[list[Fraction]],
    k: int,
    rng: random.Random,
    cutoff,
    rads: tuple = (),
) -> tuple[list[Series], tuple]:
    """Column ``[x0, x1, x2, xkk]`` bordering ``G`` into a singular 4x4.

    One unknown is solved; the others are generic at their degrees.  The
    diagonal unknown is preferred (the determinant is affine in it), then
    off-diagonal unknowns whose leading equation is linear, then the rest,
    whose leading coefficient solves a quadratic.  Returns the column and
    the possibly extended radicand tower.
    """
    sets = _exponent_sets(degs, k)
    linear, quadratic = [], []
    if {0, 1} <= sets[(k, k)]:
        linear.append((k, k))
    for t in range(3):
        S = sets[(t, k)]
        if len(S) < 2:
            continue
        if len(S) == 2 and max(S) - min(S) == 1:
            linear.append((t, k))
        else:
            quadratic.append((t, k))
    if not linear and not quadratic:
        raise _DegenerateFrame(f"no unknown in column {k} sits in two minimizing monomials")
    col = [_generic(rng, degs[i][k], cutoff) for i in range(3)] + [_generic(rng, degs[k][k], cutoff)]
    M = [G[0] + [col[0]], G[1] + [col[1]], G[2] + [col[2]], [col[0], col[1], col[2], col[3]]]
    if linear and linear[0] == (k, k):
        col[3] = kapranov_entry_solve(M, 3, 3, degs[k][k], check=False)
        return col, rads
    candidates = []
    for t, _ in linear + quadratic:
        coeffs = _univariate_coefficients(M, t, 3, cutoff)
        zeta, ext = _leading_root(coeffs, sets[(t, k)], degs[t][k], rads)
        # prefer simple roots needing no new radicand
        candidates.append((zeta is None, len(ext), t, coeffs, zeta, ext))
        if zeta is not None and ext == rads:
            break
    _, _, t, coeffs, zeta, ext = min(candidates, key=lambda c: c[:3])
    if zeta is None:
        col[t], ext = _formula_root(coeffs, degs[t][k], rads)
    else:
        col[t] = _newton_root(coeffs, zeta, degs[t][k], cutoff)
    _expect_degree(col[t], degs[t][k], f"border entry ({t}, {k})")
    return col, ext


# --------------------------------------------------------------------------
# certificates


@dataclass
class LiftCertificate:
    """A symmetric series matrix claimed to be a rank-three lift of ``source``.

    ``combination`` maps each non-basis column to its coefficients over the
    ``basis`` columns.
    """

    source: SymMatrix
    lift: SeriesMatrix
    basis: tuple[int, ...]
    combination: dict[int, tuple[Series, ...]]
    cutoff: Fraction
    seed: Any = None
    method: str = ""
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "source": [[str(v) for v in row] for row in self.source.entries],
            "lift": self.lift.to_json(),
            "basis": list(self.basis),
            "combination": {str(c): [s.to_json() for s in coeffs] for c, coeffs in self.combination.items()},
            "cutoff": str(self.cutoff),
            "seed": self.seed,
            "method": self.method,
            "witness": self.witness,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LiftCertificate":
        return cls(
            source=SymMatrix([[Fraction(v) for v in row] for row in obj["source"]]),
            lift=SeriesMatrix.from_json(obj["lift"]),
            basis=tuple(obj["basis"]),
            combination={
                int(c): tuple(Series.from_json(s) for s in coeffs) for c, coeffs in obj["combination"].items()
            },
            cutoff=Fraction(obj["cutoff"]),
            seed=obj.get("seed"),
            method=obj.get("method", ""),
            witness=obj.get("witness", {}),
        )

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "LiftCertificate":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass
class LiftReport:
    """Outcome of :func:`verify_lift`; truthy exactly when every check passed."""

    ok: bool
    failures: list[str]
    rank: int | None = None

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return f"lift verified (rank {self.rank})"
        return "lift rejected: " + "; ".join(self.failures)


def _solve3(cols: list[list[Series]], rhs: list[Series]) -> tuple[Series, Series, Series]:
    """Cramer's rule for ``sum_k x_k cols[k] = rhs`` (three rows)."""
    d = det([[cols[k][r] for k in range(3)] for r in range(3)])
    if d.is_zero_to_cutoff():
        raise DivisionByZeroToCutoff("basis minor vanished to its cutoff")
    out = []
    for k in range(3):
        mat = [[(rhs[r] if kk == k else cols[kk][r]) for kk in range(3)] for r in range(3)]
        out.append(det(mat) / d)
    return tuple(out)


def _combination(L: SeriesMatrix, basis: Sequence[int]) -> tuple[tuple[int, ...], dict[int, tuple[Series, ...]]]:
    """Express every other column of ``L`` over ``basis`` using rows ``basis``."""
    rows = list(basis)
    out = {}
    for c in range(L.cols):
        if c in basis:
            continue
        cols = [[L.entries[r][b] for r in rows] for b in basis]
        rhs = [L.entries[r][c] for r in rows]
        out[c] = _solve3(cols, rhs)
    return tuple(basis), out


def _best_basis(L: SeriesMatrix, preferred: Sequence[int]) -> tuple[int, ...]:
    cands = [tuple(preferred)] + [b for b in itertools.combinations(range(L.cols), 3) if b != tuple(preferred)]
    for b in cands:
        if not L.minor(b, b).is_zero_to_cutoff():
            return b
    raise CutoffExhausted("no principal 3x3 minor is known to be nonzero")


# --------------------------------------------------------------------------
# the joints construction


def _frame_perm(i: int, j: int) -> Permutation:
    """Diagonal permutation sending ``i -> 3``, ``j -> 4`` and the rest, in order, to ``0, 1, 2``."""
    rest = [v for v in range(5) if v not in (i, j)]
    images = [0] * 5
    for pos, v in enumerate(rest + [i, j]):
        images[v] = pos
    return Permutation(images)


def _joint_attempt(F: list[list[Fraction]], rng: random.Random, cutoff) -> list[list[Series]]:
    G = [[None] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(a, 3):
            G[a][b] = G[b][a] = _generic(rng, F[a][b], cutoff)
    col3, rads = _solve_border(G, F, 3, rng, cutoff)
    col4, rads = _solve_border(G, F, 4, rng, cutoff, rads)
    # make column 3 generic relative to column 4 without losing singularity
    u = _generic(rng, 0, cutoff)
    col3 = [x * u for x in col3[:3]] + [col3[3] * u * u]
    # x34 from the singular submatrix on rows {0,1,2,3}, cols {0,1,2,4}
    M54 = [G[0] + [col4[0]], G[1] + [col4[1]], G[2] + [col4[2]], col3[:3] + [Series.zero(cutoff)]]
    x34 = kapranov_entry_solve(M54, 3, 3, F[3][4], check=False)
    L = [
        G[0] + [col3[0], col4[0]],
        G[1] + [col3[1], col4[1]],
        G[2] + [col3[2], col4[2]],
        col3[:3] + [col3[3], x34],
        col4[:3] + [x34, col4[3]],
    ]
    return L


def _check_joint_singularities(L: list[list[Series]]) -> None:
    for rows, cols, name in (
        ((0, 1, 2, 3), (0, 1, 2, 3), "without index 5"),
        ((0, 1, 2, 4), (0, 1, 2, 4), "without index 4"),
        ((0, 1, 2, 3), (0, 1, 2, 4), "rows without 5, columns without 4"),
    ):
        d = det([[L[r][c] for c in cols] for r in rows])
        if not d.is_zero_to_cutoff():
            raise CutoffExhausted(f"bordered submatrix {name} is not singular to its cutoff")


def _transport(L: list[list[Series]], perm: Permutation, shifts: Sequence[Fraction]) -> list[list[Series]]:
    """Pull a frame lift back to source indices, undoing the scaling ``shifts``."""
    n = len(L)
    p = perm.images
    return [[L[p[a]][p[b]].shift(-(shifts[a] + shifts[b])) for b in range(n)] for a in range(n)]


def _run_with_retries(build, seed, cutoff, margin):
    """Retry on genericity failures and widen the working precision on cutoff loss."""
    cutoff = Fraction(cutoff)
    for _ in range(MAX_ESCALATIONS + 1):
        rng = random.Random(f"{seed}/{cutoff}/{margin}")
        work = cutoff + margin
        failures = []
        for _attempt in range(MAX_RETRIES):
            try:
                L = build(rng, work)
            except (DegreeMismatch, DivisionByZeroToCutoff) as exc:
                failures.append(str(exc))
                continue
            except CutoffExhausted:
                break
            lifted = SeriesMatrix(L)
            if lifted.cutoff < cutoff:
                break
            return SeriesMatrix([[s.truncate(cutoff) for s in row] for row in L])
        else:
            raise GenericityExhausted(
                f"{MAX_RETRIES} generic draws failed; last: {failures[-1] if failures else '?'}"
            )
        margin *= 2
    raise CutoffExhausted(f"working precision still short after {MAX_ESCALATIONS} escalations")


def _margin(A: SymMatrix) -> Fraction:
    vals = [v for row in A.entries for v in row]
    return 2 * (max(vals) - min(vals)) + 4


class _DegenerateFrame(NotOnHypersurface):
    """The chosen joint frame forces a repeated leading root; try another frame."""


def _frame_score(F: list[list[Fraction]]) -> int:
    # 0: affine diagonal solve, 1: linear leading equation, 2: quadratic
    score = 0
    for k in (3, 4):
        sets = _exponent_sets(F, k)
        if {0, 1} <= sets[(k, k)]:
            continue
        if any(len(S) == 2 and max(S) - min(S) == 1 for (t, _), S in sets.items() if t != k):
            score += 1
        else:
            score += 2
    return score


def joint_lift(A: SymMatrix, cert: JointCertificate, seed=0, cutoff=None) -> LiftCertificate:
    """Rank-three symmetric lift of a matrix with joints ``cert.i, cert.j``.

    The construction runs in the frame that moves the joints to the last two
    indices.  When that frame only offers quadratic leading equations with a
    repeated root, the other joint pairs of ``A`` are tried in order of how
    simple their leading equations are.
    """
    verify_joint_certificate(A, cert)
    cutoff = default_cutoff(A) if cutoff is None else Fraction(cutoff)
    frames = []
    for c in [cert] + [c for c in all_joints(A) if (c.i, c.j) != (cert.i, cert.j)]:
        for i, j in ((c.i, c.j), (c.j, c.i)):
            perm = _frame_perm(i, j)
            inv = perm.inverse().images
            F = [[A.entries[inv[r]][inv[s]] for s in range(5)] for r in range(5)]
            frames.append((_frame_score(F), len(frames), c, perm, F))
    frames.sort(key=lambda f: f[:2])
    zero = (Fraction(0),) * 5
    last = None
    for _, _, used, perm, F in frames:

        def build(rng, work, F=F, perm=perm):
            L = _joint_attempt(F, rng, work)
            _check_joint_singularities(L)
            return _transport(L, perm, zero)

        try:
            lift_m = _run_with_retries(build, seed, cutoff, _margin(A))
        except (_DegenerateFrame, GenericityExhausted) as exc:
            last = exc
            continue
        inv = perm.inverse().images
        basis, combo = _combination(lift_m, _best_basis(lift_m, tuple(inv[k] for k in range(3))))
        witness = used.to_json()
        witness["frame"] = [inv[3], inv[4]]
        return LiftCertificate(A, lift_m, basis, combo, lift_m.cutoff, seed, "joints", witness)
    if isinstance(last, GenericityExhausted):
        raise GenericityExhausted(f"every joint frame failed; last: {last}")
    raise NotOnHypersurface(f"every joint frame is degenerate; last: {last}")


# --------------------------------------------------------------------------
# the exceptional construction

# augmented index 2; the others map to frame indices
_AUG_TO_FRAME = {0: 0, 1: 1, 3: 2, 4: 3, 5: 4}


def _augmented_degrees(B: list[list[Fraction]], P: Fraction) -> list[list[Fraction]]:
    D = [[Fraction(0)] * 6 for _ in range(6)]
    for a, fa in _AUG_TO_FRAME.items():
        for b, fb in _AUG_TO_FRAME.items():
            D[a][b] = B[fa][fb]
    for b, v in ((0, 0), (1, 0), (2, 0), (3, P), (4, P), (5, 0)):
        D[2][b] = D[b][2] = Fraction(v)
    return D


def _exceptional_attempt(D: list[list[Fraction]], P: Fraction, rng: random.Random, cutoff) -> list[list[Series]]:
    a: dict[tuple[int, int], Series] = {}

    def put(i, j, s):
        a[(i, j)] = a[(j, i)] = s

    # upper-right 4x4: rows 0..3, columns 2..5; (2,3) and (3,2) start independent
    R = [[_generic(rng, D[r][c], cutoff) for c in range(2, 6)] for r in range(4)]
    degs = [[D[r][c] for c in range(2, 6)] for r in range(4)]
    _, realizers = trop_det(TropMatrix(degs))
    spot = None
    for r, c in itertools.product(range(4), range(4)):
        if any(p(r) == c for p in realizers) and any(p(r) != c for p in realizers):
            spot = (r, c)
            break
    if spot is None:
        raise NotOnHypersurface("upper-right 4x4 of the augmented matrix is not singular")
    R[spot[0]][spot[1]] = kapranov_entry_solve(R, spot[0], spot[1], degs[spot[0]][spot[1]])
    # rescale the first column so the two copies of a[2][3] agree
    lam = R[2][1] / R[3][0]
    for r in range(4):
        R[r][0] = R[r][0] * lam
    for r in range(4):
        for c in range(4):
            put(r, c + 2, R[r][c])
    # alpha a_2 + beta a_3 + gamma a_5 = a_4 on rows 0, 1, 3
    rows = (0, 1, 3)
    cols = [[a[(r, 2)] for r in rows], [a[(r, 3)] for r in rows], [a[(r, 5)] for r in rows]]
    alpha, beta, gamma = _solve3(cols, [a[(r, 4)] for r in rows])
    check = alpha * a[(2, 2)] + beta * a[(2, 3)] + gamma * a[(2, 5)] - a[(2, 4)]
    if not check.is_zero_to_cutoff():
        raise CutoffExhausted("column relation fails on the augmented row")
    _expect_degree(beta, 0, "beta")
    da, dg = _deg(alpha), _deg(gamma)
    if da is None or dg is None:
        raise CutoffExhausted("alpha or gamma vanished to its cutoff")
    if not (da > P and dg >= P):
        raise DegreeMismatch(f"deg alpha = {da}, deg gamma = {dg} with P = {P}")
    put(5, 5, _generic(rng, 0, cutoff))
    put(4, 5, alpha * a[(2, 5)] + beta * a[(3, 5)] + gamma * a[(5, 5)])
    _expect_degree(a[(4, 5)], P, "a56")
    put(4, 4, alpha * a[(2, 4)] + beta * a[(3, 4)] + gamma * a[(4, 5)])
    _expect_degree(a[(4, 4)], 0, "a55")

    def solve(rows, cols, unknown):
        M = [[a.get((r, c), Series.zero(cutoff)) for c in cols] for r in rows]
        rr, cc = rows.index(unknown[0]), cols.index(unknown[1])
        return kapranov_entry_solve(M, rr, cc, D[unknown[0]][unknown[1]], check=False)

    put(0, 0, solve((0, 2, 3, 5), (0, 2, 3, 5), (0, 0)))
    put(1, 0, solve((1, 2, 3, 5), (0, 2, 3, 5), (1, 0)))
    put(1, 1, solve((0, 1, 3, 5), (0, 1, 3, 5), (1, 1)))
    return [[a[(r, c)] for c in range(6)] for r in range(6)]


def exceptional_lift(A: SymMatrix, params: ExceptionalParams, seed=0, cutoff=None) -> LiftCertificate:
    """Rank-three symmetric lift of a matrix in exceptional form."""
    if A.n != 5:
        raise CertificateInvalid("exceptional lifts are defined for 5x5 matrices")
    B = params.frame_matrix(A).entries
    hit = _match_exceptional(B)
    if hit is None or hit != (params.N1, params.N2, params.P, params.M):
        raise CertificateInvalid("matrix does not have the claimed exceptional form")
    cutoff = default_cutoff(A) if cutoff is None else Fraction(cutoff)
    D = _augmented_degrees([list(r) for r in B], params.P)
    # working precision is measured in the frame; widen it by the shifts
    extra = 2 * max(abs(s) for s in params.shifts)

    def build(rng, work):
        L6 = _exceptional_attempt(D, params.P, rng, work + extra)
        keep = [0, 1, 3, 4, 5]
        L5 = [[L6[r][c] for c in keep] for r in keep]
        return _transport(L5, params.perm, params.shifts)

    lift_m = _run_with_retries(build, seed, cutoff, _margin(A))
    inv = params.perm.inverse().images
    basis, combo = _combination(lift_m, _best_basis(lift_m, tuple(sorted(inv[k] for k in (0, 2, 4)))))
    return LiftCertificate(A, lift_m, basis, combo, lift_m.cutoff, seed, "exceptional", params.to_json())


def lift(A: SymMatrix, classification, seed=0, cutoff=None) -> LiftCertificate:
    """Dispatch on a rank-three classification."""
    if isinstance(classification, HasJoints):
        return joint_lift(A, classification.certificate, seed, cutoff)
    if isinstance(classification, Exceptional):
        return exceptional_lift(A, classification.params, seed, cutoff)
    raise CertificateInvalid(f"no lift for classification {classification}")


# --------------------------------------------------------------------------
# verification


def verify_lift(cert: LiftCertificate) -> LiftReport:
    """Re-check a certificate from its data alone."""
    failures: list[str] = []
    A, L = cert.source, cert.lift
    if L.rows != 5 or L.cols != 5 or A.n != 5:
        return LiftReport(False, ["lift and source must be 5x5"])
    if not L.is_symmetric():
        failures.append("lift is not symmetric")
    trop = L.tropicalize()
    bad = [
        (i, j)
        for i in range(5)
        for j in range(5)
        if trop[i][j] != A.entries[i][j]
    ]
    if bad:
        failures.append(f"tropicalization mismatch at {[(i + 1, j + 1) for i, j in bad]}")
    short = []
    for rows in itertools.combinations(range(5), 4):
        for cols, m in row_minors(L, rows).items():
            label = SubmatrixSelector(rows, cols).label()
            if not m.is_zero_to_cutoff():
                failures.append(f"4x4 minor {label} is nonzero at t^{m.exps[0]}")
                continue
            tdet, _ = trop_det(A, SubmatrixSelector(rows, cols))
            if m.cutoff <= tdet:
                short.append(label)
    if short:
        failures.append(f"insufficient cutoff: minors {', '.join(short)} known only below their tropical determinant")
    rank = None
    if not bad:
        try:
            rank = series_rank(L)
        except CutoffExhausted as exc:
            failures.append(f"insufficient cutoff for the rank computation: {exc}")
        else:
            if rank != 3:
                failures.append(f"series rank is {rank}, expected 3")
    if not any(
        not L.minor(r, c).is_zero_to_cutoff()
        for r in itertools.combinations(range(5), 3)
        for c in itertools.combinations(range(5), 3)
    ):
        failures.append("no 3x3 minor is known to be nonzero")
    for col, coeffs in cert.combination.items():
        for r in range(5):
            acc = L.entries[r][col]
            for b, k in zip(cert.basis, coeffs):
                acc = acc - k * L.entries[r][b]
            if not acc.is_zero_to_cutoff():
                failures.append(f"combination for column {col + 1} fails on row {r + 1}")
                break
    return LiftReport(not failures, failures, rank)
