"""Command-line interface: ``tropbasis rank|classify|lift|verify-theorem|check-certificate|examples``.

Exit codes: 0 when every claim checked out, 2 for input or configuration
errors, 3 for a mathematical finding (classification gap or failed lift).
"""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from .errors import TropBasisError
from .harness import (
    JOBS_ENV,
    SAMPLING_NOTE,
    RunConfig,
    default_jobs,
    parse_alphabet,
    recheck_certificate,
    run,
    worked_examples,
)
from .joints import Exceptional, HasJoints, NotRankAtMost3, all_joints, classify_rank3, rank3_json
from .lifts import lift as build_lift
from .lifts import verify_lift
from .matrix_io import MatrixParseError, load_matrix
from .trop_core import SymMatrix, symmetric_tropical_rank, tropical_rank

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FINDING = 3


def _fail_input(msg: str) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_INPUT)


def _load(path: str, symmetric: bool = False):
    try:
        A = load_matrix(path)
    except MatrixParseError as exc:
        _fail_input(str(exc))
    if symmetric and not isinstance(A, SymMatrix):
        if A.rows != A.cols or any(A.entries[i][j] != A.entries[j][i] for i in range(A.rows) for j in range(i)):
            _fail_input(f"{path}: matrix is not symmetric")
        A = SymMatrix(A.entries)
    return A


def _load5(path: str) -> SymMatrix:
    A = _load(path, symmetric=True)
    if A.n != 5:
        _fail_input(f"{path}: expected a symmetric 5x5 matrix, got {A.n}x{A.n}")
    return A


def _cutoff(value: str | None) -> Fraction | None:
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        _fail_input(f"bad cutoff {value!r}")


@click.group()
@click.version_option(package_name="tropbasis")
def main() -> None:
    """Tropical ranks, joints and certified symmetric rank-three lifts."""


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--symmetric", is_flag=True, help="Also report the symmetric tropical rank.")
def rank(file: str, symmetric: bool) -> None:
    """Print the tropical rank (and symmetric tropical rank) of FILE."""
    A = _load(file, symmetric=symmetric)
    click.echo(f"tropical rank: {tropical_rank(A)}")
    if symmetric:
        click.echo(f"symmetric tropical rank: {symmetric_tropical_rank(A)}")


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Certificate file (default: FILE.classification.json).")
def classify(file: str, output: str | None) -> None:
    """Classify a symmetric 5x5 matrix: joints, exceptional form, or a nonsingular 4x4."""
    A = _load5(file)
    try:
        result = classify_rank3(A)
    except TropBasisError as exc:
        click.echo(f"finding: {exc}")
        sys.exit(EXIT_FINDING)
    click.echo(str(result))
    payload = rank3_json(result)
    if isinstance(result, HasJoints):
        pairs = [(c.i + 1, c.j + 1) for c in all_joints(A)]
        click.echo("joint pairs: " + " ".join(f"({i},{j})" for i, j in pairs))
        payload["joint_pairs"] = pairs
    out = Path(output) if output else Path(f"{file}.classification.json")
    payload["source"] = [[str(v) for v in row] for row in A.entries]
    out.write_text(json.dumps(payload, indent=1))
    if not isinstance(result, NotRankAtMost3):
        click.echo(f"certificate: {out}")
    else:
        click.echo(f"witness: {out}")


@main.command("lift")
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--seed", default=0, show_default=True, type=int, help="Seed for the generic coefficients.")
@click.option("--cutoff", default=None, help="Series cutoff exponent (default: from the matrix).")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Certificate file (default: FILE.lift.json).")
def lift_cmd(file: str, seed: int, cutoff: str | None, output: str | None) -> None:
    """Build and verify a symmetric rank-three lift of FILE."""
    A = _load5(file)
    click.echo(f"seed: {seed}")
    try:
        result = classify_rank3(A)
    except TropBasisError as exc:
        click.echo(f"finding: {exc}")
        sys.exit(EXIT_FINDING)
    if not isinstance(result, (HasJoints, Exceptional)):
        click.echo(f"{result}: some 4x4 submatrix is symmetrically nonsingular, no rank-three lift exists")
        sys.exit(EXIT_FINDING)
    click.echo(str(result))
    try:
        cert = build_lift(A, result, seed=seed, cutoff=_cutoff(cutoff))
    except TropBasisError as exc:
        click.echo(f"lift failed: {type(exc).__name__}: {exc}")
        sys.exit(EXIT_FINDING)
    out = Path(output) if output else Path(f"{file}.lift.json")
    cert.dump(out)
    click.echo(f"certificate: {out}")
    report = verify_lift(cert)
    click.echo(str(report))
    sys.exit(EXIT_OK if report else EXIT_FINDING)


@main.command("check-certificate")
@click.argument("files", nargs=-1, required=True, type=click.Path(dir_okay=False, exists=True))
def check_certificate(files: tuple[str, ...]) -> None:
    """Re-verify lift certificates (plain or gzipped JSON) from scratch."""
    bad = 0
    for f in files:
        try:
            report = recheck_certificate(f)
        except (ValueError, KeyError, TypeError, OSError) as exc:
            _fail_input(f"{f}: unreadable certificate: {exc}")
        click.echo(f"{f}: {report}")
        bad += not report
    sys.exit(EXIT_FINDING if bad else EXIT_OK)


@main.command("verify-theorem")
@click.option("--samples", default=0, show_default=True, type=click.IntRange(min=0), help="Random rank <= 3 matrices.")
@click.option("--alphabet", default="0,1,2,3", show_default=True, help="Comma-separated entry values for sampling.")
@click.option("--seed", default=0, show_default=True, type=int, help="Run seed (printed in every report).")
@click.option("--exhaustive-01", is_flag=True, help="Also sweep all 32768 symmetric {0,1} matrices.")
@click.option("--forms", default=0, show_default=True, type=click.IntRange(min=0), help="Perturbed named-form instances.")
@click.option("--cutoff", default=None, help="Series cutoff override.")
@click.option("--jobs", default=None, type=click.IntRange(min=1), help=f"Worker processes (default: ${JOBS_ENV} or CPU count).")
@click.option("-o", "--output", default="tropbasis-run", show_default=True, type=click.Path(file_okay=False), help="Report directory.")
@click.option("--certificates/--no-certificates", default=True, show_default=True, help="Write gzipped lift certificates.")
@click.option("--quiet", is_flag=True, help="Only print the summary.")
def verify_theorem(samples, alphabet, seed, exhaustive_01, forms, cutoff, jobs, output, certificates, quiet) -> None:
    """Classify, lift and verify every matrix of the generated corpora."""
    try:
        letters = parse_alphabet(alphabet)
        workers = jobs if jobs is not None else default_jobs()
    except ValueError as exc:
        _fail_input(str(exc))
    cfg = RunConfig(
        seed=seed,
        samples=samples,
        alphabet=letters,
        exhaustive_01=exhaustive_01,
        forms=forms,
        cutoff=_cutoff(cutoff),
        jobs=workers,
        output=Path(output),
        certificates=certificates,
    )
    click.echo(f"seed: {seed}")
    if samples:
        click.echo(f"sampling: {SAMPLING_NOTE}")

    def progress(res):
        if not quiet and res.finding is not None:
            click.echo(f"finding {res.corpus}#{res.index}: {res.finding}")

    try:
        report = run(cfg, progress=progress)
    except ValueError as exc:
        _fail_input(str(exc))
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_json(), indent=1))
    findings = [r.to_json() for r in report.findings]
    (out / "findings.json").write_text(json.dumps({"seed": seed, "findings": findings, "unsound": report.unsound}, indent=1))
    for line in report.summary_lines():
        click.echo(line)
    click.echo(f"elapsed: {report.meta['elapsed_seconds']} s on {workers} worker(s)")
    click.echo(f"report: {out / 'report.json'}")
    sys.exit(EXIT_OK if report.ok else EXIT_FINDING)


@main.command()
def examples() -> None:
    """Recompute the introductory worked examples."""
    results = worked_examples()
    for claim, holds in results:
        click.echo(f"[{'ok' if holds else 'FAILED'}] {claim}")
    sys.exit(EXIT_OK if all(h for _, h in results) else EXIT_FINDING)


if __name__ == "__main__":  # pragma: no cover
    main()
