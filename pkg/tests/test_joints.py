import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_sym, sym_matrices
from oracles import exceptional_pattern, joint_pairs, rank_le3, sym_monos
from tropbasis.errors import CertificateInvalid, ClassificationGap
from tropbasis.joints import (
    Exceptional,
    HasJoints,
    JointCertificate,
    NotRankAtMost3,
    all_joints,
    classify_rank3,
    detect_exceptional,
    exceptional_form_matrix,
    find_joints,
    is_rank_at_most_3,
    joint_submatrix_monomials,
    rank3_json,
    satisfies_joint_requirement,
    verify_joint_certificate,
)
from tropbasis.normal_form import diagonal_permute
from tropbasis.trop_core import Permutation, SymMatrix, SymMonomial

# matrices with rank <= 3, no joint pair and no exceptional form (see the ledger)
GAPS = [
    [[0, 3, 2, 0, 3], [3, 3, 1, 3, 2], [2, 1, 0, 0, 0], [0, 3, 0, 0, 2], [3, 2, 0, 2, 1]],
    [[3, 1, 0, 2, 0], [1, 1, 2, 1, 2], [0, 2, 0, 2, 0], [2, 1, 2, 1, 3], [0, 2, 0, 3, 0]],
    [[2, 3, 2, 1, 3], [3, 0, 0, 3, 0], [2, 0, 2, 3, 0], [1, 3, 3, 0, 3], [3, 0, 0, 3, 0]],
]


EXC = exceptional_form_matrix(1, 2, 1, [[3, 3], [3, 3]])


def mono(pairs, weight=0):
    return SymMonomial.from_pairs(pairs, weight)


# -- the joints example -----------------------------------------------------------


def test_example_joint_requirement_at_4(example_21):
    pair = satisfies_joint_requirement(example_21, 3, 4)
    assert pair is not None
    expected = {mono([(0, 1), (0, 1), (2, 2), (4, 4)]).pairs, mono([(0, 1), (0, 1), (2, 4), (2, 4)]).pairs}
    assert {m.pairs for m in pair} <= {m.pairs for m in _principal_monos(example_21, 3)}
    assert {m.pairs for m in _principal_monos(example_21, 3)} >= expected
    assert pair[0].involving(4) != pair[1].involving(4)


def _principal_monos(A, i):
    rows = [r for r in range(5) if r != i]
    return [mono(m) for m in sym_monos(A.entries, rows, rows)]


def test_example_off_diagonal_monomials(example_21):
    pair = joint_submatrix_monomials(example_21, 3, 4)
    assert pair is not None
    with_x45, without = pair
    assert with_x45.contains(3, 4) and not without.contains(3, 4)
    rows, cols = [0, 1, 2, 3], [0, 1, 2, 4]
    assert {m.pairs for m in pair} <= sym_monos(example_21.entries, rows, cols)
    assert sym_monos(example_21.entries, rows, cols) == {
        mono([(0, 1), (0, 1), (2, 2), (3, 4)]).pairs,
        mono([(0, 1), (0, 1), (2, 3), (2, 4)]).pairs,
    }


def test_example_joint_pairs(example_21):
    pairs = [(c.i, c.j) for c in all_joints(example_21)]
    assert (3, 4) in pairs
    assert pairs == joint_pairs(example_21.entries)
    # lexicographic first pair
    cert = find_joints(example_21)
    assert (cert.i, cert.j) == pairs[0]


def test_example_classifies_with_joints(example_21):
    result = classify_rank3(example_21)
    assert isinstance(result, HasJoints)
    verify_joint_certificate(example_21, result.certificate)


def test_requirement_absent_when_principal_nonsingular():
    A = SymMatrix([[0, 5, 5, 5, 5], [5, 0, 5, 5, 5], [5, 5, 0, 5, 5], [5, 5, 5, 0, 5], [5, 5, 5, 5, 0]])
    assert satisfies_joint_requirement(A, 0, 1) is None


def test_requirement_needs_distinct_indices(example_21):
    with pytest.raises(ValueError):
        satisfies_joint_requirement(example_21, 2, 2)


# -- certificates ----------------------------------------------------------------


def test_certificate_json_round_trip(example_21):
    cert = find_joints(example_21)
    again = JointCertificate.from_json(json.loads(json.dumps(cert.to_json())))
    assert again == cert
    verify_joint_certificate(example_21, again)


def test_forged_certificate_rejected(example_21):
    cert = find_joints(example_21)
    forged = JointCertificate(cert.i, cert.j, cert.mono_ii, cert.mono_jj, (cert.mono_ji[1], cert.mono_ji[0]))
    with pytest.raises(CertificateInvalid):
        verify_joint_certificate(example_21, forged)
    fake = mono([(0, 0), (1, 1), (2, 2), (3, 3)], 99)
    forged = JointCertificate(cert.i, cert.j, (fake, cert.mono_ii[1]), cert.mono_jj, cert.mono_ji)
    with pytest.raises(CertificateInvalid):
        verify_joint_certificate(example_21, forged)


@settings(max_examples=300)
@given(sym_matrices(lo=0, hi=3))
def test_joints_match_oracle(A):
    certs = all_joints(A)
    assert [(c.i, c.j) for c in certs] == joint_pairs(A.entries)
    for c in certs:
        verify_joint_certificate(A, c)


# -- exceptional form -------------------------------------------------------------


def test_detect_constructed_instance(exceptional_121):
    params = detect_exceptional(exceptional_121)
    assert (params.N1, params.N2, params.P, params.M) == (1, 2, 1, 3)
    assert params.perm == Permutation.identity(5)


def test_exceptional_has_no_joints(exceptional_121):
    assert find_joints(exceptional_121) is None
    assert joint_pairs(exceptional_121.entries) == []


def test_exceptional_equal_weights_has_no_joints():
    A = exceptional_form_matrix(1, 1, 1, [[3, 3], [3, 3]])
    assert find_joints(A) is None and detect_exceptional(A) is not None


def test_detect_rejects_zero_matrix():
    assert detect_exceptional(SymMatrix([[0] * 5 for _ in range(5)])) is None


def test_detect_rejects_offdiagonal_form():
    A = SymMatrix([[1, 1, 0, 0, 1], [1, 1, 0, 0, 1], [0, 0, 1, 1, 1], [0, 0, 1, 1, 1], [1, 1, 1, 1, 0]])
    assert detect_exceptional(A) is None


@given(st.permutations(range(5)))
def test_detect_under_relabeling(images):
    sigma = Permutation(tuple(images))
    B = diagonal_permute(EXC, sigma)
    params = detect_exceptional(B)
    assert params is not None
    assert exceptional_pattern(diagonal_permute(B, params.perm).entries)


def test_classify_exceptional(exceptional_121):
    result = classify_rank3(exceptional_121)
    assert isinstance(result, Exceptional)
    assert str(result) == "Exceptional(N1=1,N2=2,P=1,M=3)"


@given(
    st.permutations(range(5)),
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=2), min_size=5, max_size=5),
)
def test_classify_exceptional_after_scaling(images, shifts):
    E = EXC.entries
    A = SymMatrix([[E[a][b] + shifts[a] + shifts[b] for b in range(5)] for a in range(5)])
    A = diagonal_permute(A, Permutation(tuple(images)))
    result = classify_rank3(A)
    assert isinstance(result, Exceptional)
    B = result.params.frame_matrix(A).entries
    assert exceptional_pattern(B)


# -- classification ----------------------------------------------------------------


def test_classify_nonsingular_witness():
    A = SymMatrix([[0, 5, 5, 5, 5], [5, 0, 5, 5, 5], [5, 5, 0, 5, 5], [5, 5, 5, 0, 5], [5, 5, 5, 5, 0]])
    result = classify_rank3(A)
    assert isinstance(result, NotRankAtMost3)
    w = result.witness
    assert len(sym_monos(A.entries, w.rows, w.cols)) == 1
    assert rank3_json(result)["kind"] == "nonsingular"


def test_classify_requires_5x5():
    with pytest.raises(ValueError):
        classify_rank3(SymMatrix([[0, 1], [1, 0]]))


@pytest.mark.parametrize("M", GAPS)
def test_gap_matrices_are_reported(M):
    A = SymMatrix(M)
    assert rank_le3(M)
    assert joint_pairs(M) == []
    with pytest.raises(ClassificationGap) as info:
        classify_rank3(A)
    assert info.value.matrix == A


def test_gap_matrix_has_no_exceptional_frame():
    # the pattern has a zero diagonal after scaling, so the identity must realize
    from oracles import brute_tdet

    for M in GAPS:
        _, winners = brute_tdet(M)
        assert (0, 1, 2, 3, 4) not in winners


def test_random_classification_against_oracles():
    rng = random.Random(77)
    kinds = set()
    for _ in range(400):
        A = random_sym(rng, 0, 2)
        low = rank_le3(A.entries)
        assert is_rank_at_most_3(A) == low
        try:
            result = classify_rank3(A)
        except ClassificationGap:
            assert low and joint_pairs(A.entries) == []
            continue
        kinds.add(result.kind)
        if isinstance(result, NotRankAtMost3):
            assert not low
        elif isinstance(result, HasJoints):
            assert (result.certificate.i, result.certificate.j) == joint_pairs(A.entries)[0]
        else:
            assert joint_pairs(A.entries) == []
    assert {"joints", "nonsingular"} <= kinds


@settings(max_examples=150)
@given(sym_matrices(lo=0, hi=2), st.permutations(range(5)))
def test_classification_invariant_under_relabeling(A, images):
    B = diagonal_permute(A, Permutation(tuple(images)))

    def kind(M):
        try:
            return classify_rank3(M).kind
        except ClassificationGap:
            return "gap"

    assert kind(A) == kind(B)
