"""Exit criteria, one test each.  Every test prints a ``criterion N: PASS|FAIL`` line."""

import math
import time

import numpy as np
import pytest

from domclique import analytic as A
from domclique.analytic import OffsetKind, PhaseKind
from domclique.exact import (
    clique_number,
    exhaustive_expectation_Xr,
    exhaustive_expectation_Yr,
    exhaustive_second_moment_Xr,
)
from domclique.graph import GnpParams, sample_gnp
from domclique.montecarlo import (
    coupled_existence,
    estimate_mean_x,
    monotonicity_violations,
    run_trials,
    trial_seed,
)

pytestmark = pytest.mark.acceptance

ORACLE_PS = [0.2, A.P_STAR, 0.45, 0.5, 0.7]
P_GRID = [k / 100 for k in range(1, 100)]


def _close(a, b, rel=1e-9, atol=1e-12):
    if b == 0.0:
        return abs(a) <= atol
    return abs(a - b) <= rel * abs(b)


def _grid():
    for n in range(2, 7):
        for r in range(1, n + 1):
            for p in ORACLE_PS:
                yield n, r, p


def test_criterion_1_dominating_expectation_oracle(verdict):
    start = time.perf_counter()
    bad = [(n, r, p) for n, r, p in _grid()
           if not _close(exhaustive_expectation_Xr(n, r, p), A.expected_dominating_cliques(n, r, p))]
    elapsed = time.perf_counter() - start
    verdict(1, not bad and elapsed < 60, f"mismatches={bad[:3]} count={len(bad)} time={elapsed:.1f}s")


def test_criterion_2_maximal_expectation_oracle(verdict):
    bad = []
    for n, r, p in _grid():
        exhaustive = exhaustive_expectation_Yr(n, r, p)
        literal = math.comb(n, r) * p ** math.comb(r, 2) * (1 - p**r) ** (n - r)
        if not (_close(exhaustive, literal) and _close(A.expected_maximal_cliques(n, r, p), literal)):
            bad.append((n, r, p))
    verdict(2, not bad, f"mismatches={bad[:3]} count={len(bad)}")


def test_criterion_3_alpha_identities(verdict):
    errs = [abs(A.alpha(0.5) - 1.0), abs(A.alpha(A.P_STAR) - 0.5)]
    worst_exchange = 0.0
    worst_ctx = 0.0
    for p in P_GRID:
        a = A.alpha(p)
        for r in range(1, 41):
            lhs = (1 - p) ** r
            worst_exchange = max(worst_exchange, abs(lhs - p ** (r * a)) / lhs)
        ctx = A.AnalyticContext(p)
        worst_ctx = max(worst_ctx, abs(ctx.rho_hat * ctx.alpha - 1), abs(ctx.epsilon_hat - (2 - ctx.rho_hat)))
    ok = max(errs) <= 1e-12 and worst_exchange <= 1e-12 and worst_ctx <= 1e-12
    verdict(3, ok, f"endpoints={max(errs):.1e} exchange={worst_exchange:.1e} rho/eps={worst_ctx:.1e}")


def test_criterion_4_phase_table(verdict):
    dom = A.classify_phase(0.6, 1.5)
    nondom = A.classify_phase(0.381966, 1.5)
    crit = A.classify_phase(0.45, 1.5)
    ok = (
        dom.kind is PhaseKind.DOMINATING
        and nondom.kind is PhaseKind.NOT_DOMINATING
        and crit.kind is PhaseKind.CRITICAL
        and abs(crit.rho_hat - 1.33566) <= 1e-3
    )
    verdict(4, ok, f"0.6->{dom} 0.381966->{nondom} 0.45->{crit}")


def test_criterion_5_critical_band_limits(verdict):
    p = 0.45
    at_1e8 = A.ratio_analytic(10**8, A.critical_r(10**8, p), p)
    rho_hat = 1 / A.alpha(p)
    ordered = True
    curves = {}
    for e in range(3, 8):
        n = 10**e
        hi, mid, lo = (A.ratio_analytic(n, A.r_from_rho(n, rho, p), p) for rho in (1.9, rho_hat, 1.05))
        ordered &= hi > mid > lo
        curves[e] = (hi, lo)
    limits = all(curves[e][0] >= 0.99 and curves[e][1] <= 0.01 for e in (6, 7))
    ok = abs(at_1e8 - math.exp(-1)) <= 0.02 and ordered and limits
    verdict(5, ok, f"ratio(1e8)={at_1e8:.6f} ordered={ordered} n=1e6 curves={curves[6][0]:.4f}/{curves[6][1]:.2e}")


def test_criterion_6_offset_asymptotes(verdict):
    lam = max(abs(A.ratio_offset_asymptote(p, 0.0, OffsetKind.CONSTANT_LAMBDA) - math.exp(-1)) for p in P_GRID)
    offsets = [0, 1, 2, 5, 10]
    shape = True
    for p in (0.4, 0.45, 0.5):
        plus = [A.ratio_offset_asymptote(p, d, OffsetKind.PLUS_DELTA) for d in offsets]
        minus = [A.ratio_offset_asymptote(p, d, OffsetKind.MINUS_DELTA) for d in offsets]
        shape &= all(a < b for a, b in zip(plus, plus[1:])) and plus[-1] <= 1.0
        shape &= all(a > b for a, b in zip(minus, minus[1:])) and minus[-1] >= 0.0
        shape &= 1 - plus[-1] < 1 - plus[0] and minus[-1] < minus[0]
        shape &= A.ratio_offset_asymptote(p, 500, OffsetKind.PLUS_DELTA) == pytest.approx(1.0, abs=1e-12)
        shape &= A.ratio_offset_asymptote(p, 500, OffsetKind.MINUS_DELTA) == 0.0
    verdict(6, lam <= 1e-12 and shape, f"lambda err={lam:.1e} monotone={shape}")


def test_criterion_7_second_moment_bound(verdict):
    # known FAIL: the bound undercounts the fully overlapping pair term at small n
    cases = [(n, r, p) for n in (4, 5, 6) for r in (2, 3) if r <= n / 2 for p in (0.3, 0.45, 0.5, 0.7)]
    bad = []
    for n, r, p in cases:
        exact = exhaustive_second_moment_Xr(n, r, p)
        bound = math.exp(A.second_moment_upper_log(n, r, p))
        if exact > bound:
            bad.append(f"({n},{r},{p}) E[X^2]={exact:.6g} > bound={bound:.6g}")
    verdict(7, not bad, f"{len(cases) - len(bad)}/{len(cases)} hold; " + "; ".join(bad[:2]))


def test_criterion_8_monte_carlo_calibration(verdict):
    start = time.perf_counter()
    aggs = [run_trials(4, 0.5, 2, 10**6, 20240, workers=w) for w in (1, 4, 8)]
    elapsed = time.perf_counter() - start
    est = estimate_mean_x(aggs[0])
    within = abs(est.point - 0.75) <= 3 * est.se
    identical = aggs[0] == aggs[1] == aggs[2]
    ok = within and identical and elapsed < 30
    verdict(8, ok, f"mean={est.point:.6f} se={est.se:.2e} identical={identical} time={elapsed:.1f}s")


def test_criterion_9_clique_number_window(verdict):
    n, p, samples, master = 500, 0.5, 500, 909
    lo, hi = math.floor(A.r0(n, p)), math.ceil(A.r1(n, p))
    start = time.perf_counter()
    omegas = np.array([clique_number(sample_gnp(GnpParams(n, p, trial_seed(master, t)))) for t in range(samples)])
    elapsed = time.perf_counter() - start
    inside = float(np.mean((omegas >= lo) & (omegas <= hi)))
    ok = inside >= 0.99 and elapsed < 300
    verdict(9, ok, f"window=[{lo},{hi}] inside={inside:.3f} range={omegas.min()}..{omegas.max()} time={elapsed:.0f}s")


def test_criterion_10_overlap_sums(verdict):
    p = 0.5
    ladder = [10**e for e in range(3, 7)]
    gaps = []
    qgaps = {0: [], 1: []}
    for n in ladder:
        L = math.log(n) / math.log(1 / p)
        r = math.ceil(1.5 * L)
        gaps.append(abs(A.s_sum(n, r, 0, 1, p) - 1))
        rq = 2 * L
        qgaps[0].append(A.q_factor(n, rq, 0, p) - 1)
        qgaps[1].append(A.q_factor(n, rq, rq / 2, p) - 1)
    dec = all(a > b for a, b in zip(gaps, gaps[1:]))
    qdec = all(all(a > b >= 0 for a, b in zip(g, g[1:])) for g in qgaps.values())
    ok = dec and gaps[-1] < 1e-3 and qdec
    verdict(10, ok, f"s-gaps={[f'{g:.2e}' for g in gaps]} q-gaps(j=0)={[f'{g:.1e}' for g in qgaps[0]]}")


def test_criterion_11_tail_error_constant(verdict):
    worst = 0.0
    for p in (0.3, 0.5, 0.7):
        for e in range(2, 7):
            n = 10**e
            k = 2 * math.log(n) / math.log(1 / p)
            x = p**k
            scale = n * x * x * math.exp(-n * x)
            worst = max(worst, abs(A.claim1_error(n, k, p)) / scale)
    verdict(11, worst <= 4, f"max ratio={worst:.6f}")


def test_criterion_12_fixed_size_monotonicity(verdict):
    # known FAIL: a fixed-size dominating clique can vanish when an edge is added
    ps = [0.30, 0.40, 0.45, 0.50, 0.60]
    exist = coupled_existence(30, 3, ps, 10**4, 12)
    violations = monotonicity_violations(exist)
    rates = ", ".join(f"{p}:{v:.3f}" for p, v in zip(ps, exist.mean(axis=0)))
    verdict(12, violations == 0, f"violations={violations} existence by p: {rates}")
