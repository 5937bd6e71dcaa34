"""Deterministic Monte Carlo estimates of X_r and Y_r over G(n, p).

Trial ``t`` of a run with master seed ``m`` samples its graph from seed
``splitmix64_output(m, t)``: the t-th output of a SplitMix64 stream rooted at
``m``.  Aggregates hold exact integers and rationals, so merging is
associative and commutative and the result does not depend on how trials
are split across workers.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from . import _kernels as K
from .analytic import concentration_window, expected_dominating_cliques
from .errors import DomainError, UndefinedEstimateError
from .graph import GnpParams

WORKERS_ENV = "DOMCLIQUE_WORKERS"
CONFIDENCE = 0.95
_Z = NormalDist().inv_cdf(0.5 + CONFIDENCE / 2)


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{WORKERS_ENV}={raw!r} is not an integer") from None
    if value < 1:
        raise DomainError(f"{WORKERS_ENV} must be at least 1, got {value}")
    return value


def trial_seed(master_seed: int, index: int) -> int:
    """Graph seed of trial ``index``."""
    return int(K.splitmix64_output(np.uint64(master_seed), index))


@dataclass(frozen=True)
class TrialAggregate:
    """Exact sums over a set of trials.

    ``ratio_sum`` and ``ratio_sq`` run over trials with ``Y_r > 0`` only;
    ``ratio_trials`` counts those.  ``min_x``/``max_x`` are ``None`` for an
    empty aggregate.
    """

    trials: int = 0
    sum_x: int = 0
    sum_x_sq: int = 0
    sum_y: int = 0
    exists_count: int = 0
    ratio_sum: Fraction = field(default_factory=Fraction)
    ratio_sq: Fraction = field(default_factory=Fraction)
    ratio_trials: int = 0
    min_x: int | None = None
    max_x: int | None = None

    @classmethod
    def from_counts(cls, xs: np.ndarray, ys: np.ndarray) -> TrialAggregate:
        if len(xs) == 0:
            return cls()
        xi = xs.astype(object)
        pairs, counts = np.unique(np.stack([xs, ys], axis=1), axis=0, return_counts=True)
        ratio_sum = Fraction()
        ratio_sq = Fraction()
        ratio_trials = 0
        for (x, y), c in zip(pairs.tolist(), counts.tolist()):
            if y > 0:
                f = Fraction(x, y)
                ratio_sum += c * f
                ratio_sq += c * f * f
                ratio_trials += c
        return cls(
            trials=len(xs),
            sum_x=int(xi.sum()),
            sum_x_sq=int((xi * xi).sum()),
            sum_y=int(ys.astype(object).sum()),
            exists_count=int(np.count_nonzero(xs)),
            ratio_sum=ratio_sum,
            ratio_sq=ratio_sq,
            ratio_trials=ratio_trials,
            min_x=int(xs.min()),
            max_x=int(xs.max()),
        )

    def merge(self, other: TrialAggregate) -> TrialAggregate:
        return TrialAggregate(
            trials=self.trials + other.trials,
            sum_x=self.sum_x + other.sum_x,
            sum_x_sq=self.sum_x_sq + other.sum_x_sq,
            sum_y=self.sum_y + other.sum_y,
            exists_count=self.exists_count + other.exists_count,
            ratio_sum=self.ratio_sum + other.ratio_sum,
            ratio_sq=self.ratio_sq + other.ratio_sq,
            ratio_trials=self.ratio_trials + other.ratio_trials,
            min_x=_opt(min, self.min_x, other.min_x),
            max_x=_opt(max, self.max_x, other.max_x),
        )

    @property
    def excluded_trials(self) -> int:
        """Trials without any maximal r-clique, where the ratio is undefined."""
        return self.trials - self.ratio_trials


def _opt(fn, a, b):
    if a is None:
        return b
    if b is None:
        return a
    return fn(a, b)


@dataclass(frozen=True)
class EstimateWithCI:
    """Point estimate with a 95% interval.

    ``method`` is ``"wilson"`` (score interval for a proportion) or
    ``"normal"`` (mean plus or minus z standard errors).
    """

    point: float
    ci_low: float
    ci_high: float
    method: str
    se: float
    used: int
    excluded: int = 0


def _check_run(n: int, p: float, r: int, trials: int, master_seed: int) -> None:
    GnpParams(n, p, master_seed)
    if not 1 <= r <= n:
        raise DomainError(f"clique size r={r} outside 1..n={n}")
    if trials < 1:
        raise DomainError(f"trials={trials} must be at least 1")


def _sample_counts(n, p, r, master_seed, start, stop, rmax=None):
    xs = np.empty(stop - start, np.int64)
    ys = np.empty(stop - start, np.int64)
    rmax = r if rmax is None else rmax
    K.trial_counts(
        K.wtag(K.word_width(n)), n, float(p), r, rmax, np.uint64(master_seed), start, stop, xs, ys
    )
    return xs, ys


def _chunk(args):
    n, p, r, master_seed, start, stop, window = args
    xs, ys = _sample_counts(n, p, r, master_seed, start, stop)
    inside = 0
    if window is not None:
        lo, hi = window
        inside = int(np.count_nonzero((xs >= lo) & (xs <= hi)))
    return TrialAggregate.from_counts(xs, ys), inside


def _ranges(trials: int, workers: int) -> list[tuple[int, int]]:
    pieces = max(1, min(trials, workers * 4))
    bounds = [trials * k // pieces for k in range(pieces + 1)]
    return [(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]


def _run(n, p, r, trials, master_seed, workers, window):
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise DomainError(f"workers={workers} must be at least 1")
    jobs = [(n, p, r, master_seed, a, b, window) for a, b in _ranges(trials, workers)]
    if workers == 1 or len(jobs) == 1:
        results = [_chunk(job) for job in jobs]
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            results = list(pool.map(_chunk, jobs))
    agg = TrialAggregate()
    inside = 0
    for part, k in results:
        agg = agg.merge(part)
        inside += k
    return agg, inside


def run_trials(
    n: int, p: float, r: int, trials: int, master_seed: int, workers: int | None = None
) -> TrialAggregate:
    """Sample ``trials`` graphs from G(n, p) and accumulate X_r and Y_r.

    ``workers`` defaults to the ``DOMCLIQUE_WORKERS`` environment variable,
    or 1.  The result is identical for every worker count.
    """
    _check_run(n, p, r, trials, master_seed)
    return _run(n, p, r, trials, master_seed, workers, None)[0]


def estimate_existence_probability(agg: TrialAggregate) -> EstimateWithCI:
    """Fraction of trials with at least one dominating r-clique, with a Wilson interval."""
    t = agg.trials
    if t < 1:
        raise UndefinedEstimateError("no trials to estimate from")
    k = agg.exists_count
    phat = k / t
    z2 = _Z * _Z
    denom = 1.0 + z2 / t
    centre = (phat + z2 / (2 * t)) / denom
    half = _Z / denom * math.sqrt(phat * (1.0 - phat) / t + z2 / (4.0 * t * t))
    lo = 0.0 if k == 0 else min(phat, centre - half)
    hi = 1.0 if k == t else max(phat, centre + half)
    return EstimateWithCI(phat, lo, hi, "wilson", math.sqrt(phat * (1 - phat) / t), t)


def _normal_interval(total: Fraction, total_sq: Fraction, k: int, lo_clip, hi_clip):
    mean = total / k
    var = (total_sq - k * mean * mean) / (k - 1) if k > 1 else Fraction(0)
    se = math.sqrt(float(var) / k)
    point = float(mean)
    lo, hi = point - _Z * se, point + _Z * se
    if lo_clip is not None:
        lo = max(lo, lo_clip)
    if hi_clip is not None:
        hi = min(hi, hi_clip)
    return point, lo, hi, se


def estimate_mean_ratio(agg: TrialAggregate) -> EstimateWithCI:
    """Mean of X_r / Y_r over trials with Y_r > 0, with a normal interval clipped to [0, 1]."""
    k = agg.ratio_trials
    if k < 1:
        raise UndefinedEstimateError("no trial had a maximal r-clique; the ratio is undefined")
    point, lo, hi, se = _normal_interval(agg.ratio_sum, agg.ratio_sq, k, 0.0, 1.0)
    return EstimateWithCI(point, lo, hi, "normal", se, k, agg.excluded_trials)


def estimate_mean_x(agg: TrialAggregate) -> EstimateWithCI:
    """Mean number of dominating r-cliques per graph, with a normal interval."""
    t = agg.trials
    if t < 1:
        raise UndefinedEstimateError("no trials to estimate from")
    point, lo, hi, se = _normal_interval(Fraction(agg.sum_x), Fraction(agg.sum_x_sq), t, 0.0, None)
    return EstimateWithCI(point, lo, hi, "normal", se, t)


@dataclass(frozen=True)
class ConcentrationReport:
    """How often X_r falls within ``E(X_r) * (1 +- window)``."""

    n: int
    p: float
    r: int
    trials: int
    seed: int
    expected: float
    window: float
    lower: float
    upper: float
    in_window: int
    aggregate: TrialAggregate

    @property
    def fraction(self) -> float:
        return self.in_window / self.trials


def concentration_check(
    n: int, p: float, r: int, trials: int, seed: int, workers: int | None = None
) -> ConcentrationReport:
    """Fraction of trials whose X_r lies in the concentration window around its mean.

    The window's relative half-width is ``(ln n)^3 n^(-beta/2)``.  The
    report is data: the asymptotic statement has an unknown constant, so no
    threshold is applied here.
    """
    _check_run(n, p, r, trials, seed)
    if n < 2:
        raise DomainError(f"n={n} must be at least 2")
    e = expected_dominating_cliques(n, r, p)
    w = concentration_window(n, p)
    lower, upper = e - e * w, e + e * w
    agg, inside = _run(n, p, r, trials, seed, workers, (lower, upper))
    return ConcentrationReport(n, p, r, trials, seed, e, w, lower, upper, inside, agg)


def coupled_existence(
    n: int, r: int, ps: list[float], trials: int, master_seed: int, at_least: bool = False
) -> np.ndarray:
    """Existence of a dominating r-clique per trial (rows) and p (columns).

    All columns of a row threshold the same uniforms, so the sampled edge
    sets are nested in p.  With ``at_least`` the event is a dominating
    clique of any size ``>= r``; that event is monotone under adding edges,
    whereas a fixed size is not (an added edge can make an outside node
    adjacent to the whole clique).
    """
    for p in ps:
        _check_run(n, p, r, trials, master_seed)
    out = np.empty((trials, len(ps)), np.bool_)
    for c, p in enumerate(ps):
        xs, _ = _sample_counts(n, p, r, master_seed, 0, trials, n if at_least else r)
        out[:, c] = xs > 0
    return out


def monotonicity_violations(existence: np.ndarray) -> int:
    """Trials where existence drops as p increases along the columns."""
    return int(np.count_nonzero(existence[:, :-1] & ~existence[:, 1:]))
