"""Tropical linear algebra for symmetric matrices and rank-three lift certificates.

The package checks, one matrix at a time, that the 4x4 minors of a symmetric
5x5 matrix of indeterminates form a tropical basis: every symmetric 5x5 matrix
whose 4x4 submatrices are all symmetrically tropically singular is classified
(joints or the exceptional form) and lifted to a symmetric rank-three matrix
over truncated Puiseux series, with a certificate that re-verifies from JSON.
"""
from .errors import (
    CertificateInvalid,
    ClassificationGap,
    CutoffExhausted,
    DegreeMismatch,
    DivisionByZeroToCutoff,
    GenericityExhausted,
    IterationLimitExceeded,
    NotARealizer,
    NotOnHypersurface,
    NotSingular,
    TranspositionNotFound,
    TropBasisError,
)
from .joints import (
    Exceptional,
    ExceptionalParams,
    HasJoints,
    JointCertificate,
    NotRankAtMost3,
    all_joints,
    classify_rank3,
    detect_exceptional,
    exceptional_form_matrix,
    find_joints,
    is_rank_at_most_3,
)
from .lifts import LiftCertificate, LiftReport, exceptional_lift, joint_lift, lift, verify_lift
from .matrix_io import MatrixParseError, load_matrix, parse_matrix
from .normal_form import FormMatrix, diagonal_permute, matches_form, normalize, symmetric_scale
from .puiseux import PuiseuxSeries, SeriesMatrix, series_rank
from .trop_core import (
    Permutation,
    SubmatrixSelector,
    SymMatrix,
    TropMatrix,
    TropPolynomial,
    is_sym_trop_singular,
    is_trop_singular,
    minimizing_monomials,
    on_hypersurface,
    sym_minimizing_monomials,
    symmetric_tropical_rank,
    trop_det,
    trop_eval,
    tropical_rank,
)

__version__ = "0.1.0"
