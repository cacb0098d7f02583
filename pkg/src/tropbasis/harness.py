"""Corpus generation, the classify -> lift -> verify pipeline, and findings reports.

A run is fully determined by its :class:`RunConfig`.  Every random choice is
drawn from a ``random.Random`` seeded with a string derived from the run seed
and the position of the matrix in its corpus, so results do not depend on the
number of workers or the order in which they finish.

Generated "rank at most three" matrices come from rejection sampling: each
draw fills the 15 upper-triangular entries uniformly from the alphabet and is
kept when all 25 4x4 submatrices are symmetrically tropically singular.  This
distribution is a choice of this package; reports state it.
"""
from __future__ import annotations

import gzip
import itertools
import json
import multiprocessing
import os
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

from .errors import ClassificationGap, TropBasisError
from .joints import (
    Exceptional,
    HasJoints,
    NotRankAtMost3,
    all_joints,
    classify_rank3,
    exceptional_form_matrix,
    is_rank_at_most_3,
)
from .lifts import LiftCertificate, lift, verify_lift
from .matrix_io import FORM_FILES, load_form
from .normal_form import Blank, Plus, diagonal_permute
from .puiseux import PuiseuxSeries, SeriesMatrix
from .trop_core import (
    Permutation,
    SubmatrixSelector,
    SymMatrix,
    TropPolynomial,
    is_sym_trop_singular,
    is_trop_singular,
    minimizing_monomials,
    on_hypersurface,
    sym_minimizing_monomials,
    trop_eval,
)

__all__ = [
    "RunConfig",
    "FindingsReport",
    "MatrixResult",
    "JOBS_ENV",
    "SAMPLING_NOTE",
    "default_jobs",
    "parse_alphabet",
    "random_symmetric",
    "cube_matrix",
    "exhaustive_01",
    "rejection_corpus",
    "form_corpus",
    "revalidate_rank3",
    "process_matrix",
    "run",
    "recheck_certificate",
    "worked_examples",
]

JOBS_ENV = "TROPBASIS_JOBS"
SAMPLING_NOTE = (
    "rejection sampling: the 15 upper-triangular entries are drawn uniformly and "
    "independently from the alphabet; a draw is kept when all 25 4x4 submatrices "
    "are symmetrically tropically singular"
)
_UPPER = tuple((i, j) for i in range(5) for j in range(i, 5))
_DRAW_CHUNK = 2000
_MAX_DRAWS_PER_SAMPLE = 10_000


def default_jobs() -> int:
    """Worker count from ``TROPBASIS_JOBS``, else the CPU count."""
    raw = os.environ.get(JOBS_ENV)
    if raw:
        try:
            jobs = int(raw)
        except ValueError:
            raise ValueError(f"{JOBS_ENV} must be a positive integer, got {raw!r}") from None
        if jobs < 1:
            raise ValueError(f"{JOBS_ENV} must be a positive integer, got {raw!r}")
        return jobs
    return os.cpu_count() or 1


def parse_alphabet(text: str) -> tuple[Fraction, ...]:
    """Comma-separated rationals, deduplicated and sorted."""
    try:
        vals = sorted({Fraction(tok.strip()) for tok in text.split(",") if tok.strip()})
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad alphabet {text!r}; expected comma-separated rationals") from None
    if not vals:
        raise ValueError("alphabet is empty")
    return tuple(vals)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = 0
    alphabet: tuple[Fraction, ...] = (Fraction(0), Fraction(1), Fraction(2), Fraction(3))
    exhaustive_01: bool = False
    forms: int = 0
    cutoff: Fraction | None = None
    jobs: int = 1
    output: Path | None = None
    certificates: bool = True

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "alphabet": [str(a) for a in self.alphabet],
            "exhaustive_01": self.exhaustive_01,
            "forms": self.forms,
            "cutoff": None if self.cutoff is None else str(self.cutoff),
            "certificates": self.certificates,
        }


# --------------------------------------------------------------------------
# corpora


def _from_upper(vals: Sequence) -> SymMatrix:
    M = [[Fraction(0)] * 5 for _ in range(5)]
    for (i, j), v in zip(_UPPER, vals):
        M[i][j] = M[j][i] = Fraction(v)
    return SymMatrix(M)


def random_symmetric(rng: random.Random, alphabet: Sequence) -> SymMatrix:
    """Symmetric 5x5 with upper-triangular entries drawn uniformly from ``alphabet``."""
    return _from_upper([rng.choice(alphabet) for _ in _UPPER])


def cube_matrix(code: int) -> SymMatrix:
    """The symmetric {0,1} matrix whose upper-triangular bits are ``code``."""
    return _from_upper([(code >> k) & 1 for k in range(len(_UPPER))])


def exhaustive_01() -> Iterator[SymMatrix]:
    """All 2**15 symmetric 5x5 matrices with entries in {0, 1}."""
    for code in range(1 << len(_UPPER)):
        yield cube_matrix(code)


def _draw(seed: int, k: int, alphabet) -> SymMatrix:
    return random_symmetric(random.Random(f"{seed}/draw/{k}"), alphabet)


def _accepted_in(args) -> list[int]:
    seed, alphabet, start, stop = args
    return [k for k in range(start, stop) if is_rank_at_most_3(_draw(seed, k, alphabet))]


def rejection_corpus(seed: int, samples: int, alphabet: Sequence, pool=None) -> list[tuple[int, SymMatrix]]:
    """The first ``samples`` accepted draws, as ``(draw index, matrix)`` pairs.

    Draw ``k`` depends only on ``(seed, k)``; chunks of draws are filtered in
    parallel when a pool is given and merged in draw order.
    """
    if samples <= 0:
        return []
    alphabet = tuple(alphabet)
    out: list[int] = []
    limit = samples * _MAX_DRAWS_PER_SAMPLE
    start = 0
    width = pool._processes if pool is not None else 1  # noqa: SLF001
    while len(out) < samples:
        if start >= limit:
            raise ValueError(
                f"alphabet {[str(a) for a in alphabet]} yields too few rank <= 3 matrices "
                f"({len(out)} in {start} draws)"
            )
        chunks = [(seed, alphabet, s, s + _DRAW_CHUNK) for s in range(start, start + width * _DRAW_CHUNK, _DRAW_CHUNK)]
        results = pool.map(_accepted_in, chunks) if pool is not None else map(_accepted_in, chunks)
        for acc in results:
            out.extend(acc)
        start += width * _DRAW_CHUNK
    return [(k, _draw(seed, k, alphabet)) for k in out[:samples]]


def _instantiate(form, rng: random.Random, alphabet) -> list[list[Fraction]]:
    positive = [a for a in alphabet if a > 0] or [Fraction(1)]
    nonneg = [a for a in alphabet if a >= 0] or [Fraction(0)]
    M = [[Fraction(0)] * 5 for _ in range(5)]
    for i in range(5):
        for j in range(i, 5):
            cell = form.cells[i][j]
            if cell is Blank:
                v = rng.choice(nonneg)
            elif cell is Plus:
                v = rng.choice(positive)
            else:
                v = cell
            M[i][j] = M[j][i] = Fraction(v)
    return M


def _exceptional_instance(rng: random.Random) -> list[list[Fraction]]:
    N1 = Fraction(rng.randint(1, 3))
    N2 = N1 + rng.randint(0, 2)
    P = Fraction(rng.randint(1, 3))
    block = [[N1 + P + rng.randint(1, 3) for _ in range(2)] for _ in range(2)]
    return [list(r) for r in exceptional_form_matrix(N1, N2, P, block).entries]


def form_corpus(seed: int, count: int, alphabet: Sequence) -> list[tuple[int, SymMatrix]]:
    """Named forms and exceptional instances, disguised by scaling and relabeling.

    Instance ``k`` cycles through the bundled forms plus the exceptional
    pattern, fills the cells at random, adds a random symmetric scaling and
    applies a random diagonal permutation.  Instances that turn out to have a
    nonsingular 4x4 are kept: they exercise the witness path.
    """
    forms = [load_form(name) for name in FORM_FILES]
    out = []
    for k in range(count):
        rng = random.Random(f"{seed}/form/{k}")
        slot = k % (len(forms) + 1)
        M = _exceptional_instance(rng) if slot == len(forms) else _instantiate(forms[slot], rng, alphabet)
        shifts = [Fraction(rng.randint(-4, 4), 2) for _ in range(5)]
        M = [[M[a][b] + shifts[a] + shifts[b] for b in range(5)] for a in range(5)]
        images = list(range(5))
        rng.shuffle(images)
        out.append((k, diagonal_permute(SymMatrix(M), Permutation(tuple(images)))))
    return out


def revalidate_rank3(A: SymMatrix) -> bool:
    """All 25 4x4 submatrices symmetrically singular, by direct enumeration."""
    return all(
        is_sym_trop_singular(A, SubmatrixSelector(rows, cols))
        for rows in itertools.combinations(range(5), 4)
        for cols in itertools.combinations(range(5), 4)
    )


# --------------------------------------------------------------------------
# per-matrix pipeline


@dataclass
class MatrixResult:
    corpus: str
    index: int
    matrix: list[list[str]]
    kind: str
    detail: str = ""
    lift: str | None = None
    certificate: str | None = None
    finding: str | None = None

    def to_json(self) -> dict:
        out = {
            "corpus": self.corpus,
            "index": self.index,
            "matrix": self.matrix,
            "kind": self.kind,
            "detail": self.detail,
        }
        for key in ("lift", "certificate", "finding"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


def _cert_name(corpus: str, index: int) -> str:
    return f"{corpus}-{index:06d}.json.gz"


def _write_cert(cert: LiftCertificate, path: Path) -> None:
    text = json.dumps(cert.to_json(), separators=(",", ":"))
    # mtime=0 keeps the files byte-identical across runs
    with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as fh:
        fh.write(text.encode())


def _read_cert(path: Path) -> LiftCertificate:
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt") as fh:
        return LiftCertificate.from_json(json.load(fh))


def recheck_certificate(path: str | Path):
    """Load a certificate file (plain or gzipped JSON) and verify it from scratch."""
    return verify_lift(_read_cert(Path(path)))


def process_matrix(task) -> MatrixResult:
    """Classify, lift, write the certificate, reload it and verify the reloaded copy.

    Without a certificate directory the certificate still goes through a
    JSON round trip before verification.
    """
    corpus, index, A, seed, cutoff, cert_dir = task
    res = MatrixResult(corpus, index, [[str(v) for v in row] for row in A.entries], kind="")
    try:
        cls = classify_rank3(A)
    except ClassificationGap as exc:
        res.kind = "gap"
        res.finding = str(exc)
        return res
    res.kind = cls.kind
    res.detail = str(cls)
    if isinstance(cls, NotRankAtMost3):
        return res
    if isinstance(cls, HasJoints):
        res.detail += " pairs " + " ".join(f"({c.i + 1},{c.j + 1})" for c in all_joints(A))
    elif not isinstance(cls, Exceptional):  # pragma: no cover
        raise TypeError(cls)
    try:
        cert = lift(A, cls, seed=f"{seed}/{corpus}/{index}", cutoff=cutoff)
        if cert_dir is not None:
            path = Path(cert_dir) / _cert_name(corpus, index)
            _write_cert(cert, path)
            res.certificate = path.name
            report = recheck_certificate(path)
        else:
            report = verify_lift(LiftCertificate.from_json(json.loads(json.dumps(cert.to_json()))))
    except TropBasisError as exc:
        res.lift = "failed"
        res.finding = f"{type(exc).__name__}: {exc}"
        return res
    if report:
        res.lift = "verified"
    else:
        res.lift = "failed"
        res.finding = str(report)
    return res


# --------------------------------------------------------------------------
# reports


@dataclass
class FindingsReport:
    config: dict
    sampling: str
    corpora: dict[str, dict[str, int]] = field(default_factory=dict)
    results: list[MatrixResult] = field(default_factory=list)
    unsound: list[dict] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def counters(self) -> Counter:
        c = Counter()
        for r in self.results:
            c[r.kind] += 1
            if r.lift is not None:
                c["lift_" + r.lift] += 1
        return c

    @property
    def findings(self) -> list[MatrixResult]:
        return [r for r in self.results if r.finding is not None]

    @property
    def ok(self) -> bool:
        return not self.findings and not self.unsound

    def body(self) -> dict:
        """The comparable part of the report (no timings or timestamps)."""
        c = self.counters
        return {
            "config": self.config,
            "sampling": self.sampling,
            "counters": {k: c[k] for k in ("joints", "exceptional", "nonsingular", "gap", "lift_verified", "lift_failed")},
            "corpora": self.corpora,
            "unsound": self.unsound,
            "findings": [r.to_json() for r in self.findings],
            "results": [r.to_json() for r in self.results],
        }

    def to_json(self) -> dict:
        return {"meta": self.meta, **self.body()}

    def summary_lines(self) -> list[str]:
        c = self.counters
        lines = [f"seed: {self.config['seed']}"]
        for name, counts in self.corpora.items():
            lines.append(f"corpus {name}: {counts['size']} matrices")
        lines.append(
            f"joints: {c['joints']}  exceptional: {c['exceptional']}  "
            f"nonsingular: {c['nonsingular']}  gaps: {c['gap']}"
        )
        lines.append(f"lifts verified: {c['lift_verified']}  failed: {c['lift_failed']}")
        if self.unsound:
            lines.append(f"corpus soundness violations: {len(self.unsound)}")
        for r in self.findings[:20]:
            lines.append(f"finding {r.corpus}#{r.index}: {r.finding} matrix={r.matrix}")
        if len(self.findings) > 20:
            lines.append(f"... {len(self.findings) - 20} more findings in the report file")
        return lines


def _tasks(corpus: str, items: Iterable[tuple[int, SymMatrix]], cfg: RunConfig, cert_dir):
    for index, A in items:
        yield (corpus, index, A, cfg.seed, cfg.cutoff, cert_dir)


def run(cfg: RunConfig, progress=None) -> FindingsReport:
    """Build the corpora of ``cfg`` and run every matrix through the pipeline."""
    t0 = time.perf_counter()
    report = FindingsReport(cfg.to_json(), SAMPLING_NOTE)
    cert_dir = None
    if cfg.output is not None and cfg.certificates:
        cert_dir = Path(cfg.output) / "certificates"
        cert_dir.mkdir(parents=True, exist_ok=True)
    pool = multiprocessing.Pool(cfg.jobs) if cfg.jobs > 1 else None
    try:
        corpora: list[tuple[str, list[tuple[int, SymMatrix]], bool]] = []
        if cfg.exhaustive_01:
            corpora.append(("cube01", list(enumerate(exhaustive_01())), False))
        if cfg.samples > 0:
            corpora.append(("random", rejection_corpus(cfg.seed, cfg.samples, cfg.alphabet, pool), True))
        if cfg.forms > 0:
            corpora.append(("forms", form_corpus(cfg.seed, cfg.forms, cfg.alphabet), False))
        for name, items, filtered in corpora:
            if filtered:
                for index, A in items:
                    if not revalidate_rank3(A):
                        report.unsound.append({"corpus": name, "index": index})
            tasks = _tasks(name, items, cfg, cert_dir)
            mapper = pool.imap(process_matrix, tasks, chunksize=16) if pool is not None else map(process_matrix, tasks)
            before = len(report.results)
            for res in mapper:
                report.results.append(res)
                if progress is not None:
                    progress(res)
            sub = Counter(r.kind for r in report.results[before:])
            report.corpora[name] = {"size": len(items), **{k: sub[k] for k in ("joints", "exceptional", "nonsingular", "gap")}}
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    report.meta = {
        "jobs": cfg.jobs,
        "elapsed_seconds": round(time.perf_counter() - t0, 3),
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    return report


# --------------------------------------------------------------------------
# worked examples


def _poly(*monomials) -> TropPolynomial:
    return TropPolynomial(tuple(monomials))


def worked_examples() -> list[tuple[str, bool]]:
    """Recompute the introductory examples; each entry is ``(claim, holds)``."""
    out: list[tuple[str, bool]] = []
    line = _poly((0, (1, 0)), (0, (0, 1)), (0, (0, 0)))
    out.append(("(1,0) lies on the tropical line X + Y + 0", on_hypersurface(line, (1, 0))))
    out.append(("(-1,0) is off the line: X is the unique minimum", trop_eval(line, (-1, 0))[1] == {0}))

    # f = 2x + y + 1 and g = t x + t y + 1 meet at (1/t - 1, -2/t + 1)
    cut = 8
    t = PuiseuxSeries.monomial(1, 1, cut)
    one = PuiseuxSeries.constant(1, cut)
    x = PuiseuxSeries([(-1, 1), (0, -1)], cut)
    y = PuiseuxSeries([(-1, -2), (0, 1)], cut)
    f = x * PuiseuxSeries.constant(2, cut) + y + one
    g = t * x + t * y + one
    out.append(("(1/t - 1, -2/t + 1) is a common zero of f and g", f.is_zero_to_cutoff() and g.is_zero_to_cutoff()))
    point = (Fraction(str(x.valuation)), Fraction(str(y.valuation)))
    out.append(("that point tropicalizes to (-1,-1)", point == (-1, -1)))
    tf = line
    tg = _poly((1, (1, 0)), (1, (0, 1)), (0, (0, 0)))
    out.append(("(-1,-1) lies on both tropical lines", on_hypersurface(tf, point) and on_hypersurface(tg, point)))
    grid = [Fraction(v) for v in (-3, -2, -1, Fraction(-1, 2), 0)]
    members = [a for a in grid if on_hypersurface(tf, (a, a)) and on_hypersurface(tg, (a, a))]
    out.append(("on the diagonal grid the prevariety is exactly a <= -1", members == [a for a in grid if a <= -1]))
    out.append(("(-2,-2) is in the prevariety but differs from the variety point", Fraction(-2) in members and (-2, -2) != point))
    trop_f = _poly((2, (1, 1)), (1, (3, 0)))
    out.append(("2XY + 1X^3 at (0,0) has value 1, attained only by 1X^3", trop_eval(trop_f, (0, 0)) == (1, frozenset({1}))))

    A = SymMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    mons = {tuple(sorted(m.pairs)) for m in minimizing_monomials(A)}
    out.append(
        (
            "3x3 example: minimizing monomials X12 X23 X31 and X13 X21 X32",
            mons == {((0, 1), (1, 2), (2, 0)), ((0, 2), (1, 0), (2, 1))},
        )
    )
    out.append(("3x3 example is tropically singular", is_trop_singular(A)))
    sym = sym_minimizing_monomials(A)
    out.append(
        (
            "3x3 example: X12 X23 X13 is the unique symmetric minimizer, so it is symmetrically nonsingular",
            len(sym) == 1 and sym[0].pairs == ((0, 1), (0, 2), (1, 2)) and not is_sym_trop_singular(A),
        )
    )
    return out
