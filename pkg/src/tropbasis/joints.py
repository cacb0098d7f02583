"""Joints, the exceptional form, and the rank-three classifier for 5x5 matrices.

Indices are 0-based throughout; printed monomials use 1-based labels.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import CertificateInvalid, ClassificationGap, NotARealizer
from .normal_form import diagonal_permute, normalize
from .trop_core import (
    Permutation,
    SubmatrixSelector,
    SymMatrix,
    SymMonomial,
    find_nonsingular,
    is_sym_trop_singular,
    sym_minimizing_monomials,
    trop_det,
)

__all__ = [
    "JointCertificate",
    "ExceptionalParams",
    "HasJoints",
    "Exceptional",
    "NotRankAtMost3",
    "Rank3Classification",
    "satisfies_joint_requirement",
    "joint_submatrix_monomials",
    "find_joints",
    "all_joints",
    "verify_joint_certificate",
    "detect_exceptional",
    "exceptional_form_matrix",
    "classify_rank3",
    "rank3_json",
    "is_rank_at_most_3",
]


def _mono_json(m: SymMonomial) -> dict:
    return {"pairs": [list(p) for p in m.pairs], "weight": str(m.weight)}


def _mono_from_json(obj: dict) -> SymMonomial:
    return SymMonomial(tuple(tuple(p) for p in obj["pairs"]), Fraction(obj["weight"]))


@dataclass(frozen=True)
class JointCertificate:
    """Witnesses that ``i < j`` are joints.

    ``mono_ii`` are two minimizers of the principal submatrix without ``i``
    whose variables touching ``j`` differ; ``mono_jj`` likewise with the roles
    swapped.  ``mono_ji`` are minimizers of the submatrix without row ``j``
    and column ``i``: the first contains ``X[i,j]``, the second does not.
    """

    i: int
    j: int
    mono_ii: tuple[SymMonomial, SymMonomial]
    mono_jj: tuple[SymMonomial, SymMonomial]
    mono_ji: tuple[SymMonomial, SymMonomial]

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "mono_ii": [_mono_json(m) for m in self.mono_ii],
            "mono_jj": [_mono_json(m) for m in self.mono_jj],
            "mono_ji": [_mono_json(m) for m in self.mono_ji],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "JointCertificate":
        def pair(key):
            a, b = (_mono_from_json(m) for m in obj[key])
            return (a, b)

        return cls(int(obj["i"]), int(obj["j"]), pair("mono_ii"), pair("mono_jj"), pair("mono_ji"))

    def __str__(self) -> str:
        return (
            f"joints ({self.i + 1}, {self.j + 1}): "
            f"A_ii {self.mono_ii[0]} / {self.mono_ii[1]}; "
            f"A_jj {self.mono_jj[0]} / {self.mono_jj[1]}; "
            f"A_ji {self.mono_ji[0]} / {self.mono_ji[1]}"
        )


@dataclass(frozen=True)
class ExceptionalParams:
    """Data of the exceptional form.

    ``shifts[k]`` is added to row and column ``k`` of the source matrix, then
    ``perm`` is applied as a diagonal permutation; the result matches the
    exceptional pattern with these ``N1, N2, P`` and block minimum ``M``.
    """

    perm: Permutation
    N1: Fraction
    N2: Fraction
    P: Fraction
    M: Fraction
    shifts: tuple[Fraction, ...] = (Fraction(0),) * 5

    def to_json(self) -> dict:
        return {
            "perm": list(self.perm.images),
            "N1": str(self.N1),
            "N2": str(self.N2),
            "P": str(self.P),
            "M": str(self.M),
            "shifts": [str(s) for s in self.shifts],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExceptionalParams":
        return cls(
            Permutation(obj["perm"]),
            Fraction(obj["N1"]),
            Fraction(obj["N2"]),
            Fraction(obj["P"]),
            Fraction(obj["M"]),
            tuple(Fraction(s) for s in obj["shifts"]),
        )

    def frame_matrix(self, A: SymMatrix) -> SymMatrix:
        """The source matrix moved into the exceptional frame."""
        s = self.shifts
        scaled = SymMatrix([[A.entries[a][b] + s[a] + s[b] for b in range(A.n)] for a in range(A.n)])
        return diagonal_permute(scaled, self.perm)


@dataclass(frozen=True)
class HasJoints:
    certificate: JointCertificate
    kind = "joints"

    def __str__(self) -> str:
        return f"HasJoints({self.certificate.i + 1},{self.certificate.j + 1})"


@dataclass(frozen=True)
class Exceptional:
    params: ExceptionalParams
    kind = "exceptional"

    def __str__(self) -> str:
        p = self.params
        return f"Exceptional(N1={p.N1},N2={p.N2},P={p.P},M={p.M})"


@dataclass(frozen=True)
class NotRankAtMost3:
    witness: SubmatrixSelector
    kind = "nonsingular"

    def __str__(self) -> str:
        return f"NotRankAtMost3({self.witness.label()})"


Rank3Classification = HasJoints | Exceptional | NotRankAtMost3


# --------------------------------------------------------------------------
# joints


def _check_pair(A: SymMatrix, i: int, j: int) -> None:
    if A.n != 5:
        raise ValueError("joints are defined here for 5x5 matrices")
    if i == j or not (0 <= i < 5 and 0 <= j < 5):
        raise ValueError(f"need two distinct indices in range, got {i}, {j}")


def satisfies_joint_requirement(A: SymMatrix, i: int, j: int) -> tuple[SymMonomial, SymMonomial] | None:
    """Two minimizers of ``A_ii`` whose variables involving ``j`` differ."""
    _check_pair(A, i, j)
    monos = sym_minimizing_monomials(A, SubmatrixSelector.minor(5, i, i))
    for a, b in itertools.combinations(monos, 2):
        if a.involving(j) != b.involving(j):
            return (a, b)
    return None


def joint_submatrix_monomials(A: SymMatrix, i: int, j: int) -> tuple[SymMonomial, SymMonomial] | None:
    """Minimizers of ``A_ji`` with and without the variable ``X[i,j]``."""
    _check_pair(A, i, j)
    monos = sym_minimizing_monomials(A, SubmatrixSelector.minor(5, j, i))
    with_ij = [m for m in monos if m.contains(i, j)]
    without = [m for m in monos if not m.contains(i, j)]
    if with_ij and without:
        return (with_ij[0], without[0])
    return None


def _certificate(A: SymMatrix, i: int, j: int) -> JointCertificate | None:
    ii = satisfies_joint_requirement(A, i, j)
    if ii is None:
        return None
    jj = satisfies_joint_requirement(A, j, i)
    if jj is None:
        return None
    ji = joint_submatrix_monomials(A, i, j)
    if ji is None:
        return None
    return JointCertificate(i, j, ii, jj, ji)


def all_joints(A: SymMatrix) -> list[JointCertificate]:
    """Certificates for every joint pair, lexicographic in ``(i, j)``."""
    out = []
    for i, j in itertools.combinations(range(5), 2):
        cert = _certificate(A, i, j)
        if cert is not None:
            out.append(cert)
    return out


def find_joints(A: SymMatrix) -> JointCertificate | None:
    """The first joint pair in lexicographic order, with its certificate."""
    if A.n != 5:
        raise ValueError("joints are defined here for 5x5 matrices")
    for i, j in itertools.combinations(range(5), 2):
        cert = _certificate(A, i, j)
        if cert is not None:
            return cert
    return None


def verify_joint_certificate(A: SymMatrix, cert: JointCertificate) -> None:
    """Re-check every claim of ``cert`` against ``A``; raise CertificateInvalid."""
    i, j = cert.i, cert.j
    try:
        _check_pair(A, i, j)
    except ValueError as exc:
        raise CertificateInvalid(str(exc)) from None
    if i > j:
        raise CertificateInvalid("joint indices must satisfy i < j")

    def minimizers(r, c):
        return set(sym_minimizing_monomials(A, SubmatrixSelector.minor(5, r, c)))

    for (a, b), (r, other) in ((cert.mono_ii, (i, j)), (cert.mono_jj, (j, i))):
        mins = minimizers(r, r)
        if a not in mins or b not in mins:
            raise CertificateInvalid(f"monomials for A_{r + 1}{r + 1} are not minimizing")
        if a.involving(other) == b.involving(other):
            raise CertificateInvalid(f"A_{r + 1}{r + 1} monomials agree on index {other + 1}")
    a, b = cert.mono_ji
    mins = minimizers(j, i)
    if a not in mins or b not in mins:
        raise CertificateInvalid("monomials for A_ji are not minimizing")
    if not a.contains(i, j) or b.contains(i, j):
        raise CertificateInvalid("A_ji monomials do not separate X[i,j]")


# --------------------------------------------------------------------------
# exceptional form


def exceptional_form_matrix(N1, N2, P, block) -> SymMatrix:
    """Instance of the exceptional pattern; ``block`` is the 2x2 rows {0,1} x cols {2,3}."""
    (b02, b03), (b12, b13) = block
    rows = [
        [0, 0, b02, b03, N1],
        [0, 0, b12, b13, N2],
        [b02, b12, 0, 0, P],
        [b03, b13, 0, 0, P],
        [N1, N2, P, P, 0],
    ]
    return SymMatrix(rows)


def _match_exceptional(B: tuple[tuple[Fraction, ...], ...]):
    for i, j in ((0, 0), (0, 1), (1, 1), (2, 2), (2, 3), (3, 3), (4, 4)):
        if B[i][j] != 0:
            return None
    block = [B[i][j] for i in (0, 1) for j in (2, 3)]
    if min(block) <= 0:
        return None
    P = B[2][4]
    if B[3][4] != P or P <= 0:
        return None
    N1, N2 = B[0][4], B[1][4]
    if N1 <= 0 or N2 < N1:
        return None
    M = min(block)
    if not N1 + P < M:
        return None
    return N1, N2, P, M


def detect_exceptional(A: SymMatrix) -> ExceptionalParams | None:
    """Search all diagonal permutations for the exceptional pattern (exact match)."""
    if A.n != 5:
        raise ValueError("defined for 5x5 matrices")
    for images in itertools.permutations(range(5)):
        sigma = Permutation(images)
        inv = sigma.inverse().images
        B = tuple(tuple(A.entries[inv[r]][inv[c]] for c in range(5)) for r in range(5))
        hit = _match_exceptional(B)
        if hit is not None:
            return ExceptionalParams(sigma, *hit)
    return None


def _exceptional_up_to_scaling(A: SymMatrix) -> ExceptionalParams | None:
    # The pattern has zero diagonal, so the identity realizes the determinant
    # of any equivalent matrix and the scaling that zeroes the diagonal is
    # forced.  Normalizing with the identity therefore finds the frame.
    ident = Permutation.identity(5)
    _, realizers = trop_det(A)
    if ident not in realizers:
        return None
    try:
        nf = normalize(A, ident)
    except NotARealizer:
        return None
    params = detect_exceptional(nf.matrix)
    if params is None:
        return None
    return ExceptionalParams(
        params.perm, params.N1, params.N2, params.P, params.M, tuple(nf.scaling.totals(5))
    )


def classify_rank3(A: SymMatrix) -> Rank3Classification:
    """Joints, exceptional form, or a nonsingular 4x4 witness.

    Raises ClassificationGap when every 4x4 is singular but neither joints nor
    the exceptional form is found.
    """
    if A.n != 5:
        raise ValueError("classification is defined for 5x5 matrices")
    witness = find_nonsingular(A, 4, symmetric=True)
    if witness is not None:
        return NotRankAtMost3(witness)
    cert = find_joints(A)
    if cert is not None:
        return HasJoints(cert)
    params = _exceptional_up_to_scaling(A)
    if params is not None:
        return Exceptional(params)
    raise ClassificationGap("rank <= 3 matrix with neither joints nor exceptional form", matrix=A)


def rank3_json(result: Rank3Classification) -> dict[str, Any]:
    if isinstance(result, HasJoints):
        return {"kind": "joints", "certificate": result.certificate.to_json()}
    if isinstance(result, Exceptional):
        return {"kind": "exceptional", "params": result.params.to_json()}
    w = result.witness
    return {"kind": "nonsingular", "rows": list(w.rows), "cols": list(w.cols)}


def is_rank_at_most_3(A: SymMatrix) -> bool:
    """All 25 4x4 submatrices are symmetrically tropically singular."""
    return find_nonsingular(A, 4, symmetric=True) is None

