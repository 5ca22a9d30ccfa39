"""Deterministic core of the Hawkes intensity process.

Views on day t are driven by exogenous stimuli plus a power-law-decayed
self-excitation of past views:

    xi[t] = mu * s[t] + C * sum_{tau=1..t} xi[t - tau] * (tau + c)^-(1 + theta)

The lag-0 self-term is excluded so the recurrence stays explicit. Everything
here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DivergentResponse, InsufficientExogenousData, InvalidArgument
from .series import DailySeries, EXOGENOUS_KINDS, SeriesKind

C_MIN = 1e-3          # lower bound on the kernel offset c
THETA_MAX = 10.0

# Lags summed explicitly before switching to the Euler-Maclaurin tail
# estimate; the estimate's truncation error is then far below 1e-12 relative.
_KERNEL_DIRECT_TERMS = 20_000


@dataclass(frozen=True)
class HipParams:
    """The four fitted parameters (mu, C, c, theta)."""

    mu: float      # exogenous sensitivity, views per unit of stimulus
    C: float       # endogenous excitation scale
    c: float       # kernel offset, days
    theta: float   # power-law decay exponent of social memory

    def __post_init__(self):
        for name in ("mu", "C", "c", "theta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not all(np.isfinite([self.mu, self.C, self.c, self.theta])):
            raise InvalidArgument("parameters must be finite")
        if self.mu < 0:
            raise InvalidArgument(f"mu must be >= 0, got {self.mu}")
        if self.C < 0:
            raise InvalidArgument(f"C must be >= 0, got {self.C}")
        if self.c < C_MIN:
            raise InvalidArgument(f"c must be >= {C_MIN}, got {self.c}")
        if not 0 < self.theta <= THETA_MAX:
            raise InvalidArgument(f"theta must be in (0, {THETA_MAX}], got {self.theta}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.mu, self.C, self.c, self.theta)


@dataclass(frozen=True)
class ImpulseResponse:
    """Unit-impulse response with exogenous scaling removed."""

    series: DailySeries
    total: float          # endogenous response A, simulated mass + tail estimate
    truncated_at: int     # simulated horizon, days
    tail_bound: float     # mass attributed to days beyond the horizon


@dataclass(frozen=True)
class PromotionSchedule:
    amounts: DailySeries

    def __post_init__(self):
        if self.amounts.kind is not SeriesKind.PROMOTION:
            object.__setattr__(
                self, "amounts", DailySeries(self.amounts.values, SeriesKind.PROMOTION)
            )


def _kernel_weights(c: float, theta: float, lags: np.ndarray) -> np.ndarray:
    return (lags + c) ** -(1.0 + theta)


def _kernel_total_sum(c: float, theta: float) -> float:
    """sum_{tau=1..inf} (tau + c)^-(1+theta).

    Partial sum plus an Euler-Maclaurin-corrected integral tail. The
    correction terms keep the relative error below 1e-9 even for small
    theta, where a bare integral bound would need an astronomically long
    partial sum.
    """
    # cast before the cache lookup so numpy scalars share entries with floats
    return _kernel_total_sum_cached(float(c), float(theta))


@lru_cache(maxsize=1024)
def _kernel_total_sum_cached(c: float, theta: float) -> float:
    n = _KERNEL_DIRECT_TERMS
    lags = np.arange(1, n, dtype=np.float64)
    head = float(_kernel_weights(c, theta, lags).sum())
    a = float(n + c)
    # integral from n to inf, plus f(n)/2 and -f'(n)/12 corrections
    tail = a ** -theta / theta + 0.5 * a ** -(1.0 + theta) \
        + (1.0 + theta) / 12.0 * a ** -(2.0 + theta)
    return head + tail


def kernel_mass(params: HipParams) -> float:
    """Branching factor n* = C * sum_{tau>=1} (tau + c)^-(1+theta)."""
    if params.C == 0:
        return 0.0
    return params.C * _kernel_total_sum(params.c, params.theta)


def _simulate_values(params: HipParams, s: np.ndarray, horizon: int) -> np.ndarray:
    """Run the recurrence for days 0..horizon-1 over exogenous values s."""
    mu, C, c, theta = params.as_tuple()
    xi = np.empty(horizon)
    xi[0] = mu * s[0]
    if horizon == 1:
        return xi
    w = _kernel_weights(c, theta, np.arange(1, horizon, dtype=np.float64))
    # wr[i] = w(horizon-1-i): reversed weights, so each step dots contiguous views
    wr = w[::-1].copy()
    n = horizon - 1
    for t in range(1, horizon):
        xi[t] = mu * s[t] + C * np.dot(xi[:t], wr[n - t:n])
    return xi


def simulate(
    params: HipParams,
    exo: DailySeries,
    horizon: int,
    allow_short_exo: bool = False,
) -> DailySeries:
    """Deterministic daily view series driven by the exogenous series."""
    if horizon < 1:
        raise InvalidArgument(f"horizon must be >= 1, got {horizon}")
    if exo.kind not in EXOGENOUS_KINDS:
        raise InvalidArgument(f"exogenous series must be shares or promotion, got {exo.kind}")
    if len(exo) < horizon and not allow_short_exo:
        raise InsufficientExogenousData(
            f"exogenous series covers {len(exo)} days, horizon is {horizon}"
        )
    s = exo.padded(horizon)
    xi = _simulate_values(params, s, horizon)
    return DailySeries(xi, SeriesKind.VIEWS)


def _total_with_tail(
    params: HipParams,
    exo_values: np.ndarray,
    tail_tol: float,
    max_horizon: int,
    min_horizon: int = 256,
) -> tuple[np.ndarray, float, int, float]:
    """Simulate and add the analytic mass of views beyond the horizon.

    Each simulated view at day u still owes direct offspring at lags beyond
    the horizon; their expected count is C * (S_inf - P[T-1-u]) where P is
    the partial kernel sum. Every boundary-crossing offspring carries a full
    cascade of expected size 1/(1-n*), so the remaining mass follows by the
    geometric sum over cascade generations.

    Returns (values, total, horizon, tail_estimate).
    """
    n_star = kernel_mass(params)
    if n_star >= 1.0:
        raise DivergentResponse(n_star)
    mu, C, c, theta = params.as_tuple()
    s_inf = _kernel_total_sum(c, theta)
    amplification = 1.0 / (1.0 - n_star)
    horizon = min(max(min_horizon, len(exo_values)), max_horizon)
    xi = np.empty(0)
    while True:
        # extend the recurrence from the already-simulated prefix
        done = xi.size
        xi = np.concatenate([xi, np.empty(horizon - done)])
        w = _kernel_weights(c, theta, np.arange(1, horizon, dtype=np.float64))
        wr = w[::-1].copy()
        n = horizon - 1
        for t in range(done, horizon):
            exo = mu * exo_values[t] if t < exo_values.size else 0.0
            endo = C * np.dot(xi[:t], wr[n - t:n]) if t > 0 else 0.0
            xi[t] = exo + endo
        head = float(xi.sum())
        # partial kernel sums P[k] = sum_{tau=1..k} w(tau); tail per view at
        # day u is S_inf - P[horizon-1-u]
        partial = np.concatenate([[0.0], np.cumsum(w)])
        crossing = C * float(np.dot(xi, (s_inf - partial)[::-1]))
        tail = crossing * amplification
        total = head + tail
        if tail <= tail_tol * total or horizon >= max_horizon:
            return xi, total, horizon, tail
        horizon = min(horizon * 2, max_horizon)


def impulse_response(
    params: HipParams,
    tail_tol: float = 1e-9,
    max_horizon: int = 1 << 14,
) -> ImpulseResponse:
    """Response to a single exogenous impulse at day 0 with mu factored out.

    The returned total is the endogenous response A: simulated mass plus the
    analytic estimate of the mass beyond the truncation horizon.
    """
    n_star = kernel_mass(params)
    if n_star >= 1.0:
        raise DivergentResponse(n_star)
    unit = HipParams(1.0, params.C, params.c, params.theta)
    xi, total, horizon, tail = _total_with_tail(
        unit, np.array([1.0]), tail_tol, max_horizon
    )
    return ImpulseResponse(
        series=DailySeries(xi, SeriesKind.VIEWS),
        total=total,
        truncated_at=horizon,
        tail_bound=tail,
    )


def viral_potential(mu: float, endo_response: float) -> float:
    """Total views per unit of promotion: nu = mu * A."""
    if mu < 0:
        raise InvalidArgument(f"mu must be >= 0, got {mu}")
    if endo_response < 1:
        raise InvalidArgument(f"endogenous response must be >= 1, got {endo_response}")
    return mu * endo_response


def even_schedule(volume: float, days: int = 90) -> PromotionSchedule:
    """Spread a promotion volume uniformly over the first ``days`` days."""
    if days < 1:
        raise InvalidArgument(f"days must be >= 1, got {days}")
    if volume < 0:
        raise InvalidArgument(f"volume must be >= 0, got {volume}")
    return PromotionSchedule(
        DailySeries(np.full(days, volume / days), SeriesKind.PROMOTION)
    )


def promoted_series(
    params: HipParams,
    organic_exo: DailySeries,
    promo: PromotionSchedule,
    horizon: int,
) -> DailySeries:
    """Views under organic stimuli plus a promotion schedule."""
    if horizon < 1:
        raise InvalidArgument(f"horizon must be >= 1, got {horizon}")
    if len(organic_exo) < horizon:
        raise InsufficientExogenousData(
            f"organic series covers {len(organic_exo)} days, horizon is {horizon}"
        )
    combined = organic_exo.padded(horizon) + promo.amounts.padded(horizon)
    return simulate(
        params, DailySeries(combined, SeriesKind.PROMOTION), horizon
    )


def promotion_total_views(
    params: HipParams,
    promo: PromotionSchedule,
    tail_tol: float = 1e-6,
    max_horizon: int = 1 << 14,
) -> float:
    """Total incremental views a promotion generates over an open horizon.

    By linearity of the recurrence this is the promotion-only response
    summed to infinity; for an even schedule of volume V it converges to
    mu * A * V.
    """
    _, total, _, _ = _total_with_tail(
        params, promo.amounts.values, tail_tol, max_horizon
    )
    return total
