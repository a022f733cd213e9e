"""Sampling harness: empirical Hermite proportions, growth rates and their
comparison against the three limit constants.

Per-sample work is a single certified scan (quotients, flags, denominator
logs), so a 200-sample run at depth 5000 stays in the minutes range on one
core; samples are independent and can be farmed out to processes without
changing the result.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import HermiteLabError
from .hermite import criterion_scan
from .numeric import DecimalSpec, RealSpec, ln_big, make_decimal, spec_text

HERMITE_PROPORTION = math.log(3) / math.log(4)  # 0.79248125036...
LEVY_RATE = math.pi**2 / (12 * math.log(2))  # 1.18656911041...
HERMITE_GROWTH_RATE = math.pi**2 / (6 * math.log(3))  # 1.49728349682...

_BITS_PER_LEVEL = 3.43  # expected input bits consumed per certified quotient


def auto_precision_bits(depth: int) -> int:
    """Input precision that certifies `depth` quotients with ample slack."""
    return max(256, int(depth * _BITS_PER_LEVEL * 1.12) + 192)


@dataclass(frozen=True)
class ExperimentConfig:
    sample_count: int
    depth_n: int = 5000
    seed: int = 42
    precision_bits: int | None = None
    theta_source: Sequence[RealSpec] | str = "uniform01"
    workers: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if self.depth_n < 10:
            raise ValueError("depth_n must be >= 10")
        if self.precision_bits is not None and self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")

    @property
    def effective_bits(self) -> int:
        if self.precision_bits is not None:
            return self.precision_bits
        return auto_precision_bits(self.depth_n)


@dataclass(frozen=True)
class ThetaReport:
    theta_id: str
    depth: int
    n_flags_decided: int
    hermite_count: int
    proportion: Optional[float]
    levy_rate: Optional[float]
    hermite_growth: Optional[float]
    undecided_count: int
    quotient_count: int
    terminated: bool = False

    def as_row(self) -> dict:
        return {
            "theta_id": self.theta_id,
            "n": self.depth,
            "decided": self.n_flags_decided,
            "hermite_count": self.hermite_count,
            "proportion": self.proportion,
            "levy_rate": self.levy_rate,
            "hermite_growth": self.hermite_growth,
            "undecided": self.undecided_count,
        }


@dataclass(frozen=True)
class StatSummary:
    mean: float
    stddev: float
    stderr: float
    target: float
    deviation: float


@dataclass(frozen=True)
class AggregateReport:
    sample_count: int
    depth: int
    seed: int
    proportion: StatSummary
    levy_rate: StatSummary
    hermite_growth: StatSummary
    rejected_count: int
    reports: tuple[ThetaReport, ...] = field(repr=False)

    def as_dict(self, include_reports: bool = True) -> dict:
        payload = {
            "sample_count": self.sample_count,
            "depth": self.depth,
            "seed": self.seed,
            "rejected_count": self.rejected_count,
            "statistics": {
                name: vars(summary)
                for name, summary in (
                    ("proportion", self.proportion),
                    ("levy_rate", self.levy_rate),
                    ("hermite_growth", self.hermite_growth),
                )
            },
        }
        if include_reports:
            payload["per_theta"] = [r.as_row() for r in self.reports]
        return payload


# ---------------------------------------------------------------------------
# sampling


def _digit_count(bits: int) -> int:
    digits = bits * 30103 // 100000 + 1
    while 10**digits < 1 << bits:
        digits += 1
    return digits


_CHUNK_DIGITS = 18
_CHUNK_BYTES = 15  # 120 random bits per 18-digit chunk: mod bias ~ 1e-18


def sample_thetas(seed: int, count: int, precision_bits: int) -> list[DecimalSpec]:
    """Deterministic counter-mode decimals, uniform on (0, 1).

    Sample i depends only on (seed, i): bytes come from blake2b keyed with
    the seed over a running block counter.  Digits are assembled in chunks,
    so precisions of tens of thousands of bits stay cheap.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    digits = _digit_count(precision_bits)
    chunks = -(-digits // _CHUNK_DIGITS)
    need_bytes = chunks * _CHUNK_BYTES
    key = seed.to_bytes(8, "big", signed=False)
    out = []
    for i in range(count):
        stream = b""
        block = 0
        while len(stream) < need_bytes:
            h = hashlib.blake2b(
                i.to_bytes(8, "big") + block.to_bytes(4, "big"), key=key
            )
            stream += h.digest()
            block += 1
        pieces = []
        for k in range(chunks):
            raw = int.from_bytes(stream[k * _CHUNK_BYTES : (k + 1) * _CHUNK_BYTES], "big")
            pieces.append(f"{raw % 10**_CHUNK_DIGITS:0{_CHUNK_DIGITS}d}")
        digit_str = "".join(pieces)[:digits]
        if digit_str == "0" * digits:
            digit_str = digit_str[:-1] + "1"
        n = 0
        for k in range(0, digits, _CHUNK_DIGITS):
            part = digit_str[k : k + _CHUNK_DIGITS]
            n = n * 10 ** len(part) + int(part)
        text = "0." + digit_str
        out.append(
            make_decimal(Fraction(n, 10**digits), precision_bits, text=text)
        )
    return out


# ---------------------------------------------------------------------------
# per-theta analysis


def _short_id(spec: RealSpec) -> str:
    """Display identifier: full text for small specs, a prefix for long ones."""
    if isinstance(spec, DecimalSpec) and spec.text and len(spec.text) > 40:
        return f"{spec.text[:28]}...({spec.declared_bits}b)"
    text = spec_text(spec)
    return text if len(text) <= 40 else f"{text[:28]}...({len(text)})"


class _ScanRecorder:
    """Collects counts, the deepest Hermite denominator and checkpoint rows."""

    def __init__(self, checkpoints: Sequence[int] = ()):
        self.decided = 0
        self.true_count = 0
        self.undecided = 0
        self.deepest_h = None
        self.deepest_h_rank = 0
        self.rows = []
        self._checkpoints = sorted(set(checkpoints))

    def __call__(self, index: int, flag, q: int) -> None:
        if index == 0:
            return  # X_0 is conventional; proportions count q >= 1 vectors
        if flag is None:
            self.undecided += 1
        else:
            self.decided += 1
            if flag:
                self.true_count += 1
                self.deepest_h = q
                self.deepest_h_rank = self.true_count
        if self._checkpoints and index == self._checkpoints[0]:
            self._checkpoints.pop(0)
            self.rows.append(
                (
                    index,
                    self.decided,
                    self.true_count / self.decided if self.decided else None,
                    ln_big(q) / index if q >= 1 else None,
                    ln_big(self.deepest_h) / self.deepest_h_rank
                    if self.deepest_h and self.deepest_h >= 1
                    else None,
                )
            )


def analyze_theta(
    spec: RealSpec, n: int, checkpoints: Sequence[int] = ()
) -> ThetaReport:
    """Flags, Hermite proportion, denominator growth rates for one input."""
    recorder = _ScanRecorder(checkpoints)
    flags, state = criterion_scan(spec, n, observer=recorder)
    quotient_count = state.quotient_count
    levy = ln_big(state.q_cur) / quotient_count if quotient_count >= 1 else None
    growth = None
    if recorder.deepest_h and recorder.deepest_h >= 1 and recorder.deepest_h_rank >= 1:
        growth = ln_big(recorder.deepest_h) / recorder.deepest_h_rank
    proportion = (
        recorder.true_count / recorder.decided if recorder.decided else None
    )
    return ThetaReport(
        theta_id=_short_id(spec),
        depth=len(flags.flags),
        n_flags_decided=recorder.decided,
        hermite_count=recorder.true_count,
        proportion=proportion,
        levy_rate=levy,
        hermite_growth=growth,
        undecided_count=recorder.undecided,
        quotient_count=quotient_count,
        terminated=state.terminated,
    )


def _checkpoint_rows(spec: RealSpec, n: int, checkpoints: Sequence[int]) -> list[tuple]:
    recorder = _ScanRecorder(checkpoints)
    criterion_scan(spec, n, observer=recorder)
    return recorder.rows


# ---------------------------------------------------------------------------
# experiment driver


def _analyze_job(args: tuple[RealSpec, int]) -> ThetaReport:
    spec, depth = args
    return analyze_theta(spec, depth)


def _experiment_samples(cfg: ExperimentConfig) -> list[RealSpec]:
    if cfg.theta_source == "uniform01":
        return list(sample_thetas(cfg.seed, cfg.sample_count, cfg.effective_bits))
    specs = list(cfg.theta_source)
    if len(specs) != cfg.sample_count:
        raise ValueError("theta_source length must equal sample_count")
    return specs


def _summary(values: list[float], target: float) -> StatSummary:
    count = len(values)
    mean = sum(values) / count
    if count > 1:
        var = sum((v - mean) ** 2 for v in values) / (count - 1)
        stddev = math.sqrt(var)
    else:
        stddev = 0.0
    return StatSummary(mean, stddev, stddev / math.sqrt(count), target, mean - target)


def run_experiment(cfg: ExperimentConfig) -> AggregateReport:
    """Analyze every sample and aggregate against the three limit constants.

    Samples whose undecided flags exceed 1% of the depth (or that produce no
    statistic at all) are rejected and counted, never silently averaged.
    Results are bit-identical for a fixed config regardless of `workers`.
    """
    specs = _experiment_samples(cfg)
    jobs = [(spec, cfg.depth_n) for spec in specs]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(_analyze_job, jobs, chunksize=8))
    else:
        reports = [_analyze_job(job) for job in jobs]
    accepted: list[ThetaReport] = []
    rejected = 0
    for report in reports:
        # a terminated (rational) input is complete however short it is;
        # anything else must certify all but 1% of the requested flags
        shortfall = (cfg.depth_n - 1) - report.n_flags_decided
        unusable = (
            (not report.terminated and shortfall > 0.01 * cfg.depth_n)
            or report.proportion is None
            or report.levy_rate is None
            or report.hermite_growth is None
        )
        if unusable:
            rejected += 1
        else:
            accepted.append(report)
    if not accepted:
        raise HermiteLabError("every sample was rejected; raise precision_bits")
    return AggregateReport(
        sample_count=cfg.sample_count,
        depth=cfg.depth_n,
        seed=cfg.seed,
        proportion=_summary([r.proportion for r in accepted], HERMITE_PROPORTION),
        levy_rate=_summary([r.levy_rate for r in accepted], LEVY_RATE),
        hermite_growth=_summary(
            [r.hermite_growth for r in accepted], HERMITE_GROWTH_RATE
        ),
        rejected_count=rejected,
        reports=tuple(reports),
    )


_TABLE_COLUMNS = ("n", "decided", "proportion", "levy_rate", "hermite_growth")


def convergence_table(
    target: RealSpec | ExperimentConfig, checkpoints: Sequence[int]
) -> list[dict]:
    """Running statistics at each checkpoint depth.

    For a single input the rows are that orbit's partial averages; for a
    config the per-checkpoint columns are averaged over all samples.
    """
    checkpoints = list(checkpoints)
    if checkpoints != sorted(checkpoints) or len(set(checkpoints)) != len(checkpoints):
        raise ValueError("checkpoints must be strictly increasing")
    if not checkpoints:
        return []
    if isinstance(target, ExperimentConfig):
        depth = max(max(checkpoints) + 1, target.depth_n)
        per_sample = [
            _checkpoint_rows(spec, depth, checkpoints)
            for spec in _experiment_samples(target)
        ]
        rows = []
        for i, n in enumerate(checkpoints):
            cells = [sample[i] for sample in per_sample if len(sample) > i]
            if not cells:
                continue
            averaged = [n]
            for col in range(1, len(_TABLE_COLUMNS)):
                values = [c[col] for c in cells if c[col] is not None]
                averaged.append(sum(values) / len(values) if values else None)
            rows.append(dict(zip(_TABLE_COLUMNS, averaged)))
        return rows
    depth = max(checkpoints) + 1
    return [
        dict(zip(_TABLE_COLUMNS, row))
        for row in _checkpoint_rows(target, depth, checkpoints)
    ]
