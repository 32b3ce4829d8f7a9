"""Statistical checks on reference-count corpora, simulated or real.

Covers the rank-frequency power-law fit, the identifier-cost rate bound,
vocabulary-growth (Heaps) fitting, the distinct-component normality check,
and a DEFLATE-based incompressibility probe.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .codes import log_plus
from .errors import AnalysisPreconditionError, UndefinedFitError, ValidationError
from .ingest import Corpus

_AD_SIGNIFICANCES = (0.15, 0.10, 0.05, 0.025, 0.01)


@dataclass(frozen=True)
class RankFrequencyTable:
    """Sorted (rank, count, rate) triples; rate is references per corpus bit."""

    entries: tuple[tuple[int, int, float], ...]
    total_bits: int

    def __post_init__(self):
        ranks = [e[0] for e in self.entries]
        counts = [e[1] for e in self.entries]
        if any(b <= a for a, b in zip(ranks, ranks[1:])):
            raise ValidationError("ranks must be strictly increasing")
        if any(b > a for a, b in zip(counts, counts[1:])):
            raise ValidationError("counts must be nonincreasing in rank")
        if any(e[2] < 0 for e in self.entries):
            raise ValidationError("rates must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    """Least-squares power-law fit on log-log axes."""

    exponent: float
    log_scale: float          # intercept of the log2-log2 fit
    r_squared: float
    n_points: int


@dataclass(frozen=True)
class RateBoundResult:
    sum: float
    satisfied: bool
    tail_profile: tuple[float, ...]


@dataclass(frozen=True)
class NormalityReport:
    sample_size: int
    normalized_values: tuple[float, ...]
    statistic: float          # Anderson-Darling A^2
    passed: bool
    degenerate: bool
    c_hat: float
    significance: float


@dataclass(frozen=True)
class ProbeResult:
    ratio: float


def rank_frequency(corpus: Corpus, rank_offset: int = 0) -> RankFrequencyTable:
    """Rank/count/rate table for a corpus, with an optional rank offset.

    A nonzero offset shifts the numbering (offset 49 starts the components
    at rank 50), which is how machine instructions excluded from a tally can
    be accounted for at analysis time.
    """
    if rank_offset < 0:
        raise ValidationError("rank_offset must be >= 0")
    if not corpus.objects:
        raise AnalysisPreconditionError("corpus is empty")
    totals = corpus.total_counts()
    if not totals:
        raise AnalysisPreconditionError("corpus has no component references")
    total_bits = corpus.total_bits()
    entries = []
    for sym, rank in sorted(corpus.component_index.items(), key=lambda kv: kv[1]):
        count = totals[sym]
        entries.append((rank + rank_offset, count, count / total_bits))
    return RankFrequencyTable(entries=tuple(entries), total_bits=total_bits)


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-12 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def fit_zipf(table: RankFrequencyTable, min_count: int = 5) -> FitResult:
    """Least-squares fit of log2(count) against log2(rank).

    Entries with count below ``min_count`` are excluded, which removes the
    stepped low-count tail.  The exponent is reported positive for decaying
    laws.
    """
    pts = [(rank, count) for rank, count, _rate in table.entries if count >= min_count]
    if len(pts) < 2:
        raise UndefinedFitError(
            f"need >= 2 entries with count >= {min_count}, have {len(pts)}")
    x = np.log2([p[0] for p in pts])
    y = np.log2([p[1] for p in pts])
    if np.ptp(x) == 0.0:
        raise UndefinedFitError("all qualifying entries share one rank")
    slope, intercept, r2 = _linear_fit(x, y)
    return FitResult(exponent=-slope, log_scale=intercept, r_squared=r2,
                     n_points=len(pts))


def check_rate_bound(table: RankFrequencyTable) -> RateBoundResult:
    """Evaluate the identifier-cost inequality sum(rate * log_plus(rank)) <= 1.

    The tail profile lists rate * (rank * log2(rank) * log_plus(rank)) per
    entry for comparison against the asymptotic rate bound.
    """
    total = 0.0
    profile = []
    for rank, _count, rate in table.entries:
        lp = log_plus(rank)
        total += rate * lp
        l2 = np.log2(rank) if rank > 1 else 0.0
        profile.append(rate * (rank * l2 * lp))
    return RateBoundResult(sum=total, satisfied=bool(total <= 1.0 + 1e-6),
                           tail_profile=tuple(profile))


def heaps_curve(corpus: Corpus, seed: int = 0) -> list[tuple[int, int]]:
    """Cumulative (bits examined, distinct components) in seeded random order."""
    order = np.random.default_rng(seed).permutation(len(corpus.objects))
    seen: set[str] = set()
    bits = 0
    curve = []
    for idx in order:
        obj = corpus.objects[int(idx)]
        bits += obj.size_bits
        seen.update(obj.refs.keys())
        curve.append((bits, len(seen)))
    return curve


def fit_heaps(corpus: Corpus, seed: int = 0) -> FitResult:
    """Vocabulary-growth exponent: distinct components ~ (bits examined)^alpha.

    Objects are visited in seeded random order; the exponent should be
    reported together with the seed.
    """
    if len(corpus.objects) < 10:
        raise AnalysisPreconditionError(
            f"need >= 10 objects, have {len(corpus.objects)}")
    pts = [(b, v) for b, v in heaps_curve(corpus, seed) if b >= 1 and v >= 1]
    if len(pts) < 2:
        raise UndefinedFitError("fewer than 2 usable growth points")
    x = np.log2([p[0] for p in pts])
    y = np.log2([p[1] for p in pts])
    if np.ptp(x) == 0.0:
        raise UndefinedFitError("no variation in examined size")
    slope, intercept, r2 = _linear_fit(x, y)
    return FitResult(exponent=slope, log_scale=intercept, r_squared=r2,
                     n_points=len(pts))


def erdos_kac_check(
    corpus: Corpus,
    significance: float = 0.01,
    size_band: Optional[tuple[int, int]] = None,
    n_bands: int = 8,
) -> NormalityReport:
    """Test whether per-object distinct-component counts look normal.

    Counts are centered per size band and scaled by sqrt(c_hat * size^2),
    with c_hat fit by least squares of squared deviations on size^2.  The
    Anderson-Darling statistic is compared against the critical value at
    ``significance``.  ``size_band`` restricts the test to objects whose
    size in bits falls within [lo, hi].
    """
    if significance not in _AD_SIGNIFICANCES:
        raise ValidationError(f"significance must be one of {_AD_SIGNIFICANCES}")
    objects = corpus.objects
    if size_band is not None:
        lo, hi = size_band
        objects = tuple(o for o in objects if lo <= o.size_bits <= hi)
    if len(objects) < 100:
        raise AnalysisPreconditionError(
            f"need >= 100 objects in the size band, have {len(objects)}")

    ordered = sorted(objects, key=lambda o: (o.size_bits, o.name))
    counts = np.array([len(o.refs) for o in ordered], dtype=np.float64)
    sizes = np.array([o.size_bits for o in ordered], dtype=np.float64)

    deviations = np.empty_like(counts)
    for band in np.array_split(np.arange(len(ordered)), min(n_bands, len(ordered))):
        if band.size == 0:
            continue
        deviations[band] = counts[band] - counts[band].mean()

    s2 = sizes ** 2
    denominator = float(np.sum(s2 ** 2))
    c_hat = float(np.sum(deviations ** 2 * s2) / denominator) if denominator > 0 else 0.0
    if c_hat <= 0.0 or not np.isfinite(c_hat):
        return NormalityReport(sample_size=len(ordered), normalized_values=(),
                               statistic=float("nan"), passed=False,
                               degenerate=True, c_hat=0.0, significance=significance)

    z = deviations / np.sqrt(c_hat * s2)
    result = stats.anderson(z, dist="norm")
    idx = int(np.argmin(np.abs(result.significance_level - significance * 100.0)))
    passed = bool(result.statistic < result.critical_values[idx])
    return NormalityReport(
        sample_size=len(ordered),
        normalized_values=tuple(float(v) for v in z),
        statistic=float(result.statistic),
        passed=passed,
        degenerate=False,
        c_hat=c_hat,
        significance=significance,
    )


def incompressibility_probe(blob: bytes) -> ProbeResult:
    """Size ratio of raw DEFLATE (level 9, no preset dictionary) over input.

    A proxy for how close the blob is to algorithmically random data; the
    ratio is comparative only and makes no absolute complexity claim.
    """
    if len(blob) < 1024:
        raise AnalysisPreconditionError("probe needs at least 1 KiB of input")
    co = zlib.compressobj(level=9, wbits=-15)
    compressed = co.compress(blob) + co.flush()
    return ProbeResult(ratio=len(compressed) / len(blob))
