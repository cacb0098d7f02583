import gzip
import json
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner

from oracles import rank_le3
from tropbasis.cli import main
from tropbasis.harness import (
    JOBS_ENV,
    RunConfig,
    cube_matrix,
    default_jobs,
    exhaustive_01,
    form_corpus,
    parse_alphabet,
    process_matrix,
    recheck_certificate,
    rejection_corpus,
    revalidate_rank3,
    run,
    worked_examples,
)
from tropbasis.matrix_io import format_matrix
from tropbasis.trop_core import SymMatrix

from test_joints import GAPS

EX21 = [[1, 0, 1, 1, 1], [0, 1, 1, 1, 1], [1, 1, 0, 0, 0], [1, 1, 0, 0, 0], [1, 1, 0, 0, 0]]
NONSING = [[0, 5, 5, 5, 5], [5, 0, 5, 5, 5], [5, 5, 0, 5, 5], [5, 5, 5, 0, 5], [5, 5, 5, 5, 0]]


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, M):
    p = tmp_path / name
    p.write_text(format_matrix(SymMatrix(M)))
    return str(p)


# -- corpora ----------------------------------------------------------------------


def test_cube_enumeration():
    mats = list(exhaustive_01())
    assert len(mats) == 32768
    assert len({m.entries for m in mats}) == 32768
    assert cube_matrix(0).entries == SymMatrix([[0] * 5] * 5).entries


def test_parse_alphabet():
    assert parse_alphabet("3, 1,1 ,1/2") == (Fraction(1, 2), 1, 3)
    for bad in ("", "a,b", "1/0"):
        with pytest.raises(ValueError):
            parse_alphabet(bad)


def test_rejection_corpus_is_deterministic_and_sound():
    a = rejection_corpus(5, 12, (0, 1, 2, 3))
    b = rejection_corpus(5, 12, (0, 1, 2, 3))
    assert [(k, m.entries) for k, m in a] == [(k, m.entries) for k, m in b]
    assert len(a) == 12
    indices = [k for k, _ in a]
    assert indices == sorted(indices)
    for _, A in a:
        assert rank_le3(A.entries) and revalidate_rank3(A)


def test_rejection_corpus_prefix_property():
    long = rejection_corpus(8, 10, (0, 1, 2))
    short = rejection_corpus(8, 4, (0, 1, 2))
    assert [k for k, _ in short] == [k for k, _ in long[:4]]


def test_rejection_corpus_single_letter():
    # single-letter matrices are constant and always rank 1, so this must succeed
    assert len(rejection_corpus(0, 3, (7,))) == 3


def test_form_corpus_deterministic():
    a = form_corpus(3, 24, (0, 1, 2, 3))
    assert [m.entries for _, m in a] == [m.entries for _, m in form_corpus(3, 24, (0, 1, 2, 3))]
    assert len(a) == 24


def test_default_jobs(monkeypatch):
    monkeypatch.setenv(JOBS_ENV, "3")
    assert default_jobs() == 3
    monkeypatch.setenv(JOBS_ENV, "zero")
    with pytest.raises(ValueError):
        default_jobs()
    monkeypatch.setenv(JOBS_ENV, "0")
    with pytest.raises(ValueError):
        default_jobs()
    monkeypatch.delenv(JOBS_ENV)
    assert default_jobs() >= 1


# -- pipeline ----------------------------------------------------------------------


def test_process_matrix_kinds(tmp_path):
    ok = process_matrix(("t", 0, SymMatrix(EX21), 0, None, tmp_path))
    assert ok.kind == "joints" and ok.lift == "verified" and ok.finding is None
    assert recheck_certificate(tmp_path / ok.certificate)
    ns = process_matrix(("t", 1, SymMatrix(NONSING), 0, None, None))
    assert ns.kind == "nonsingular" and ns.lift is None
    gap = process_matrix(("t", 2, SymMatrix(GAPS[0]), 0, None, None))
    assert gap.kind == "gap" and gap.finding


def test_certificate_files_are_gzipped_json(tmp_path):
    res = process_matrix(("t", 7, SymMatrix(EX21), 0, None, tmp_path))
    assert res.certificate == "t-000007.json.gz"
    path = tmp_path / res.certificate
    obj = json.loads(gzip.decompress(path.read_bytes()))
    assert obj["method"] == "joints"


def test_empty_run():
    report = run(RunConfig(samples=0))
    assert report.ok and report.results == [] and report.corpora == {}


def test_run_is_deterministic():
    cfg = RunConfig(seed=4, samples=15, forms=12)
    a, b = run(cfg), run(cfg)
    assert a.body() == b.body()
    assert a.counters["lift_failed"] == 0


def test_jobs_do_not_change_results():
    one = run(RunConfig(seed=2, samples=20, forms=12, jobs=1))
    two = run(RunConfig(seed=2, samples=20, forms=12, jobs=2))
    assert one.body() == two.body()


def test_summary_starts_with_seed():
    report = run(RunConfig(seed=9, forms=3))
    assert report.summary_lines()[0] == "seed: 9"


def test_worked_examples_hold():
    results = worked_examples()
    assert len(results) >= 8
    assert all(ok for _, ok in results), [c for c, ok in results if not ok]


# -- command line ------------------------------------------------------------------


def test_cli_rank(runner, tmp_path):
    f = write(tmp_path, "a.txt", EX21)
    res = runner.invoke(main, ["rank", f, "--symmetric"])
    assert res.exit_code == 0
    assert "tropical rank:" in res.output and "symmetric tropical rank:" in res.output


def test_cli_classify_joints(runner, tmp_path):
    f = write(tmp_path, "a.txt", EX21)
    res = runner.invoke(main, ["classify", f])
    assert res.exit_code == 0
    assert "(3,4)" in res.output
    payload = json.loads(Path(f + ".classification.json").read_text())
    assert [3, 4] in payload["joint_pairs"]


def test_cli_classify_gap(runner, tmp_path):
    f = write(tmp_path, "g.txt", GAPS[1])
    res = runner.invoke(main, ["classify", f])
    assert res.exit_code == 3 and "finding" in res.output


def test_cli_parse_error_exit_2(runner, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("5 sym\n0 1 2\n")
    res = runner.invoke(main, ["classify", str(p)])
    assert res.exit_code == 2
    assert "bad.txt:2:5" in res.output


def test_cli_wrong_size_exit_2(runner, tmp_path):
    p = tmp_path / "small.txt"
    p.write_text("2 sym\n0 1\n1 0\n")
    assert runner.invoke(main, ["lift", str(p)]).exit_code == 2


def test_cli_lift_and_check(runner, tmp_path):
    f = write(tmp_path, "a.txt", EX21)
    res = runner.invoke(main, ["lift", f, "--seed", "3"])
    assert res.exit_code == 0, res.output
    assert res.output.startswith("seed: 3")
    assert "lift verified" in res.output
    res = runner.invoke(main, ["check-certificate", f + ".lift.json"])
    assert res.exit_code == 0 and "lift verified" in res.output


def test_cli_lift_nonsingular_exit_3(runner, tmp_path):
    f = write(tmp_path, "n.txt", NONSING)
    assert runner.invoke(main, ["lift", f]).exit_code == 3


def test_cli_check_certificate_tampered(runner, tmp_path):
    f = write(tmp_path, "a.txt", EX21)
    runner.invoke(main, ["lift", f])
    cert = Path(f + ".lift.json")
    obj = json.loads(cert.read_text())
    obj["source"][0][0] = "2"
    cert.write_text(json.dumps(obj))
    res = runner.invoke(main, ["check-certificate", str(cert)])
    assert res.exit_code == 3 and "rejected" in res.output
    junk = tmp_path / "junk.json"
    junk.write_text("{}")
    assert runner.invoke(main, ["check-certificate", str(junk)]).exit_code == 2


def test_cli_verify_theorem_empty(runner, tmp_path):
    out = tmp_path / "run"
    res = runner.invoke(main, ["verify-theorem", "--samples", "0", "--seed", "1", "-o", str(out)])
    assert res.exit_code == 0
    assert res.output.startswith("seed: 1")
    report = json.loads((out / "report.json").read_text())
    assert report["results"] == [] and report["counters"]["gap"] == 0
    assert json.loads((out / "findings.json").read_text())["findings"] == []


def test_cli_verify_theorem_samples(runner, tmp_path):
    out = tmp_path / "run"
    res = runner.invoke(main, ["verify-theorem", "--samples", "10", "--forms", "12", "--seed", "3", "--jobs", "1", "-o", str(out)])
    assert res.exit_code in (0, 3)
    assert "sampling: rejection sampling" in res.output
    report = json.loads((out / "report.json").read_text())
    assert report["counters"]["lift_failed"] == 0
    certs = sorted((out / "certificates").glob("*.json.gz"))
    assert len(certs) == report["counters"]["lift_verified"]
    for c in certs[:5]:
        assert recheck_certificate(c)


def test_cli_verify_theorem_bad_config(runner, tmp_path, monkeypatch):
    assert runner.invoke(main, ["verify-theorem", "--alphabet", "x", "-o", str(tmp_path)]).exit_code == 2
    monkeypatch.setenv(JOBS_ENV, "-1")
    assert runner.invoke(main, ["verify-theorem", "-o", str(tmp_path)]).exit_code == 2


def test_cli_examples(runner):
    res = runner.invoke(main, ["examples"])
    assert res.exit_code == 0 and "FAILED" not in res.output


def test_cli_version(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0 and "0.1.0" in res.output
