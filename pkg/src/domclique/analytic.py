"""Closed-form and asymptotic quantities for dominating cliques in G(n, p).

Everything is evaluated in natural-log space.  ``b`` is ``1/p`` and
``q`` is ``1 - p`` throughout.  Functions taking a clique size accept real
``r`` where the size is a continuous parameter (``r = rho * log_b n``) and
require an integer where it counts subsets.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field

from .errors import DomainError

P_STAR = (3.0 - math.sqrt(5.0)) / 2.0
"""Lower edge of the critical band; at this p, (1 - p)^2 = p."""

NEG_INF = float("-inf")
_LOG_MAX = math.log(sys.float_info.max)


def _exp(x: float) -> float:
    return math.exp(x) if x < _LOG_MAX else math.inf


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise DomainError(f"edge probability p={p} outside the open interval (0, 1)")


def alpha(p: float) -> float:
    """Exponent with ``(1 - p)^r == p^(r * alpha(p))``, i.e. ``ln(1-p) / ln p``."""
    _check_p(p)
    return math.log1p(-p) / math.log(p)


@dataclass(frozen=True)
class AnalyticContext:
    """Derived constants for one edge probability."""

    p: float
    b: float = field(init=False)
    alpha: float = field(init=False)
    beta: float = field(init=False)
    nu: float = field(init=False)
    epsilon_hat: float = field(init=False)
    rho_hat: float = field(init=False)

    def __post_init__(self) -> None:
        a = alpha(self.p)
        values = {
            "b": 1.0 / self.p,
            "alpha": a,
            "beta": min(2.0 / 3.0, 2.0 * a),
            "nu": min(1.0, a),
            "epsilon_hat": epsilon_hat(self.p),
            "rho_hat": 1.0 / a,
        }
        for name, value in values.items():
            object.__setattr__(self, name, value)

    def log_b(self, x: float) -> float:
        return math.log(x) / -math.log(self.p)


class PhaseKind(enum.Enum):
    DOMINATING = "AlmostSurelyDominating"
    NOT_DOMINATING = "AlmostSurelyNotDominating"
    CRITICAL = "Critical"


class Side(enum.Enum):
    DOMINATING = "dominating"
    NOT_DOMINATING = "not-dominating"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class PhaseClass:
    """Outcome of the three-way classification.

    ``rho_hat`` and ``side`` are set only for the critical band, where
    ``side`` says on which side of ``rho_hat`` the queried ``rho`` lies.
    """

    kind: PhaseKind
    rho_hat: float | None = None
    side: Side | None = None

    def __str__(self) -> str:
        if self.kind is PhaseKind.CRITICAL:
            return f"Critical({self.rho_hat!r})"
        return self.kind.value


def _log_b_n(n: float, p: float) -> float:
    return math.log(n) / -math.log(p)


def _window_base(n: int, p: float) -> tuple[float, float]:
    _check_p(p)
    if n < 3:
        raise DomainError(f"n={n} too small; the clique window needs n >= 3")
    L = _log_b_n(n, p)
    if L <= 1.0:
        raise DomainError(f"log_b n = {L} <= 1 at n={n}, p={p}; log_b log_b n is not positive")
    return L, -math.log(p)


def r0(n: int, p: float) -> float:
    """Lower end of the clique-number window."""
    L, ln_b = _window_base(n, p)
    return L - 2.0 * math.log(L) / ln_b + math.log(2.0) / ln_b + math.log(1.0 / ln_b) / ln_b


def r1(n: int, p: float) -> float:
    """Upper end of the clique-number window."""
    L, ln_b = _window_base(n, p)
    return 2.0 * L - 2.0 * math.log(L) / ln_b + 2.0 / ln_b + 1.0 - 2.0 * math.log(2.0) / ln_b


def log_binomial(n: int, k: int) -> float:
    """``ln C(n, k)``; exact big-integer log for moderate k, log-gamma beyond."""
    if k < 0 or k > n:
        return NEG_INF
    k = min(k, n - k)
    if k <= 2000:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_bracket(r: float, p: float, subtract_q: bool) -> float:
    """ln(1 - p^r - (1-p)^r), or ln(1 - p^r) when ``subtract_q`` is false."""
    q = 1.0 - p
    pr = p**r
    s = pr + q**r if subtract_q else pr
    if s <= 0.5:
        return math.log1p(-s)
    if subtract_q and float(r).is_integer():
        # (p + q)^r - p^r - q^r expanded: all terms positive, no cancellation
        ri = int(r)
        if ri <= 1:
            return NEG_INF
        terms = [math.comb(ri, k) * p**k * q ** (ri - k) for k in range(1, ri)]
        return math.log(math.fsum(terms))
    if not subtract_q:
        # 1 - p^r = -expm1(r ln p)
        return math.log(-math.expm1(r * math.log(p)))
    rest = 1.0 - s
    return math.log(rest) if rest > 0.0 else NEG_INF


def _check_counting(n: int, r: int, p: float) -> None:
    _check_p(p)
    if not 1 <= r <= n:
        raise DomainError(f"clique size r={r} outside 1..n={n}")


def expected_dominating_cliques_log(n: int, r: int, p: float) -> float:
    """ln E(X_r) = ln C(n,r) + C(r,2) ln p + (n-r) ln(1 - p^r - (1-p)^r).

    Returns ``-inf`` when the expectation is zero, which happens exactly at
    ``r == 1 < n``.
    """
    _check_counting(n, r, p)
    head = log_binomial(n, r) + math.comb(r, 2) * math.log(p)
    if n == r:
        return head
    lb = _log_bracket(r, p, True)
    if lb == NEG_INF:
        return NEG_INF
    return head + (n - r) * lb


def expected_dominating_cliques(n: int, r: int, p: float) -> float:
    return _exp(expected_dominating_cliques_log(n, r, p))


def expected_maximal_cliques_log(n: int, r: int, p: float) -> float:
    """ln E(Y_r) = ln C(n,r) + C(r,2) ln p + (n-r) ln(1 - p^r)."""
    _check_counting(n, r, p)
    head = log_binomial(n, r) + math.comb(r, 2) * math.log(p)
    if n == r:
        return head
    return head + (n - r) * _log_bracket(r, p, False)


def expected_maximal_cliques(n: int, r: int, p: float) -> float:
    return _exp(expected_maximal_cliques_log(n, r, p))


def ratio_analytic(n: int, r: float, p: float) -> float:
    """Leading-order ratio of dominating to maximal r-cliques, ``exp(-n q^r / (1 - p^r))``."""
    _check_p(p)
    if r < 1:
        raise DomainError(f"clique size r={r} must be at least 1")
    log_rate = math.log(n) + r * math.log1p(-p) - _log_bracket(r, p, False)
    return math.exp(-_exp(log_rate))


def ratio_finite(n: int, r: float, p: float) -> float:
    """Exact ratio of expectations E(X_r) / E(Y_r) = ((1 - p^r - q^r) / (1 - p^r))^(n - r).

    ``ratio_analytic`` is its large-n limit.  At desk-scale n the two differ
    by more than Monte Carlo noise, so simulations compare against this one.
    """
    _check_p(p)
    if not 1 <= r <= n:
        raise DomainError(f"clique size r={r} outside 1..n={n}")
    if r == n:
        return 1.0
    lb = _log_bracket(r, p, True)
    if lb == NEG_INF:
        return 0.0
    return math.exp((n - r) * (lb - _log_bracket(r, p, False)))


def r_from_rho(n: int, rho: float, p: float) -> float:
    """Clique size ``rho * log_b n`` for rho in the admissible window [1, 2]."""
    _check_p(p)
    if not 1.0 <= rho <= 2.0:
        raise DomainError(f"rho={rho} outside [1, 2]")
    if n < 2:
        raise DomainError(f"n={n} must be at least 2")
    return rho * _log_b_n(n, p)


def classify_phase(p: float, rho: float) -> PhaseClass:
    """Asymptotic fate of an r-node clique with ``r = rho * log_b n``.

    Ties follow the strict inequalities: ``p == P_STAR`` is not dominating and
    ``p == 1/2`` lies in the critical band.
    """
    _check_p(p)
    if not 1.0 <= rho <= 2.0:
        raise DomainError(f"rho={rho} outside [1, 2]")
    if p > 0.5:
        return PhaseClass(PhaseKind.DOMINATING)
    if p <= P_STAR:
        return PhaseClass(PhaseKind.NOT_DOMINATING)
    rho_hat = 1.0 / alpha(p)
    if rho > rho_hat:
        side = Side.DOMINATING
    elif rho < rho_hat:
        side = Side.NOT_DOMINATING
    else:
        side = Side.BOUNDARY
    return PhaseClass(PhaseKind.CRITICAL, rho_hat, side)


def critical_r(n: int, p: float) -> float:
    """``log_{1/(1-p)} n``, the clique size where the ratio sits at 1/e."""
    _check_p(p)
    if not P_STAR < p <= 0.5:
        raise DomainError(f"p={p} outside the critical band ((3-sqrt 5)/2, 1/2]")
    if n < 2:
        raise DomainError(f"n={n} must be at least 2")
    return math.log(n) / -math.log1p(-p)


class OffsetKind(enum.Enum):
    PLUS_DELTA = "plus-delta"
    MINUS_DELTA = "minus-delta"
    CONSTANT_LAMBDA = "lambda"


def ratio_offset_asymptote(p: float, offset: float, kind: OffsetKind) -> float:
    """Limit of the ratio at ``r = log_{1/(1-p)} n + offset`` (or ``- offset``)."""
    _check_p(p)
    if kind is not OffsetKind.CONSTANT_LAMBDA and offset < 0:
        raise DomainError(f"delta offset must be nonnegative, got {offset}")
    sign = -1.0 if kind is OffsetKind.MINUS_DELTA else 1.0
    return math.exp(-_exp(sign * offset * math.log1p(-p)))


def variance_bound_factor(n: int, p: float) -> float:
    """Shape ``(ln n)^3 / n^beta`` of the relative variance bound."""
    if n < 3:
        raise DomainError(f"n={n} must be at least 3")
    beta = AnalyticContext(p).beta
    return math.log(n) ** 3 / n**beta


def concentration_window(n: int, p: float) -> float:
    """Relative half-width ``(ln n)^3 n^(-beta/2)`` of the concentration window for X_r."""
    if n < 2:
        raise DomainError(f"n={n} must be at least 2")
    beta = AnalyticContext(p).beta
    return math.log(n) ** 3 * n ** (-beta / 2.0)


def chebyshev_tail_bound(variance: float, t: float) -> float:
    """Upper bound on ``Pr[|X - E X| >= t]``, ``min(1, Var / t^2)``."""
    if t <= 0:
        raise DomainError(f"deviation t={t} must be positive")
    return min(1.0, variance / (t * t))


def q_factor(n: int, r: float, j: float, p: float) -> float:
    """``(1 - p^r - (1-p)^r)^(2j - 2r)``, the correction left after extracting E^2."""
    _check_p(p)
    if not 2 <= r <= n:
        raise DomainError(f"clique size r={r} outside 2..n={n}")
    if not 0 <= j <= r:
        raise DomainError(f"overlap j={j} outside 0..r={r}")
    if j == r:
        return 1.0
    lb = _log_bracket(r, p, True)
    if lb == NEG_INF:
        raise DomainError(f"bracket 1 - p^r - (1-p)^r is not positive at r={r}, p={p}")
    return _exp((2.0 * j - 2.0 * r) * lb)


def _log_sum_largest_first(terms: list[float]) -> float:
    finite = sorted((t for t in terms if t != NEG_INF), reverse=True)
    if not finite:
        return NEG_INF
    top = finite[0]
    return top + math.log(math.fsum(math.exp(t - top) for t in finite))


def _overlap_log_terms(n: int, r: int, c: int, d: int, p: float) -> list[float]:
    ln_b = -math.log(p)
    base = log_binomial(n, r)
    return [
        log_binomial(r, j) + log_binomial(n - r, r - j) - base + math.comb(j, 2) * ln_b
        for j in range(c, d + 1)
    ]


def s_sum(n: int, r: int, c: int, d: int, p: float) -> float:
    """``sum_{j=c..d} C(n,r)^-1 C(r,j) C(n-r,r-j) b^C(j,2)``."""
    _check_p(p)
    if not (0 <= c <= d <= r and 2 * r <= n):
        raise DomainError(f"need 0 <= c <= d <= r <= n/2, got c={c}, d={d}, r={r}, n={n}")
    return _exp(_log_sum_largest_first(_overlap_log_terms(n, r, c, d, p)))


def second_moment_upper_log(n: int, r: int, p: float) -> float:
    """ln of the bound ``E(X_r)^2 * sum_j C(n,r)^-1 C(r,j) C(n-r,r-j) p^-C(j,2) Q(p,r,j)``.

    The only step from the exact second moment is bounding the probability
    that the two cliques' leftover nodes are good for each other by 1.
    """
    _check_p(p)
    if not 2 <= r <= n / 2:
        raise DomainError(f"need 2 <= r <= n/2, got r={r}, n={n}")
    lb = _log_bracket(r, p, True)
    terms = [
        t + (2 * j - 2 * r) * lb
        for j, t in enumerate(_overlap_log_terms(n, r, 0, r, p))
    ]
    return 2.0 * expected_dominating_cliques_log(n, r, p) + _log_sum_largest_first(terms)


def epsilon_hat(p: float) -> float:
    """``2 - ln p / ln(1-p)``; zero at P_STAR and one at p = 1/2."""
    _check_p(p)
    return 2.0 - math.log(p) / math.log1p(-p)


def stirling_clique_term_log(n: int, r: float, p: float) -> float:
    """``r ln(n e p^((r-1)/2) / r)``, the Stirling form of ln(C(n,r) p^C(r,2))."""
    _check_p(p)
    if not 1 <= r <= n:
        raise DomainError(f"clique size r={r} outside 1..n={n}")
    return r * (math.log(n) + 1.0 + 0.5 * (r - 1.0) * math.log(p) - math.log(r))


def _log1p_neg_plus(x: float) -> float:
    # ln(1 - x) + x without cancellation for small x
    if x < 0.01:
        return -math.fsum(x**m / m for m in range(2, 14))
    return math.log1p(-x) + x


def claim1_error(n: int, k: float, p: float) -> float:
    """``(1 - p^k)^n - exp(-n p^k)``.

    Factored as ``exp(-n x) * expm1(n (ln(1-x) + x))`` with ``x = p^k``.  The
    magnitude is close to ``n p^(2k) exp(-n p^k) / 2`` while ``n p^(2k)`` is
    small, so a constant of 1/2 suffices there.
    """
    _check_p(p)
    x = p**k
    if not x < 1.0:
        raise DomainError(f"p^k={x} must be below 1")
    return math.exp(-n * x) * math.expm1(n * _log1p_neg_plus(x))
