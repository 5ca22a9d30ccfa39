"""Multistart nonlinear least-squares fitting of HIP parameters.

Parameters are fitted on an observed prefix of the views and shares series
by minimizing the sum of squared per-day errors. Each round is a
bound-constrained trust-region least-squares run in log-parameter space;
rounds start from random log-uniform draws, one fixed default point, and
the best of a coarse random search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import FitFailed, InvalidArgument, NumericOverflow
from .hip_core import HipParams, _simulate_values, kernel_mass, simulate
from .series import DailySeries, EXOGENOUS_KINDS, SeriesKind

DEFAULT_BOUNDS = {
    "mu": (1e-3, 1e3),
    "C": (1e-4, 10.0),
    "c": (1e-3, 100.0),
    "theta": (0.05, 10.0),
}

_PARAM_ORDER = ("mu", "C", "c", "theta")
_DEFAULT_START = (1.0, 0.1, 1.0, 1.0)
_COARSE_SAMPLES = 1000


@dataclass(frozen=True)
class FitConfig:
    train_days: int = 90
    total_days: int = 120
    restarts: int = 8          # random starts; +1 default +1 coarse = rounds
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    seed: int = 0
    objective: str = "sse"

    def __post_init__(self):
        if self.train_days < 7:
            raise InvalidArgument(f"train_days must be >= 7, got {self.train_days}")
        if self.total_days <= self.train_days:
            raise InvalidArgument("total_days must exceed train_days")
        if self.restarts < 1:
            raise InvalidArgument(f"restarts must be >= 1, got {self.restarts}")
        if self.objective != "sse":
            raise InvalidArgument(f"unknown objective {self.objective!r}")

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([self.bounds[k][0] for k in _PARAM_ORDER])
        hi = np.array([self.bounds[k][1] for k in _PARAM_ORDER])
        return lo, hi


@dataclass(frozen=True)
class FitRound:
    start: tuple[float, float, float, float]
    final_objective: float
    converged: bool


@dataclass(frozen=True)
class FitResult:
    params: HipParams
    objective_value: float
    branching_factor: float
    train_days: int
    rounds: tuple[FitRound, ...]
    best_round_index: int

    def to_dict(self) -> dict:
        return {
            "params": {
                "mu": self.params.mu,
                "C": self.params.C,
                "c": self.params.c,
                "theta": self.params.theta,
            },
            "objective_value": self.objective_value,
            "branching_factor": self.branching_factor,
            "train_days": self.train_days,
            "rounds": [
                {
                    "start": list(r.start),
                    "final_objective": r.final_objective,
                    "converged": r.converged,
                }
                for r in self.rounds
            ],
            "best_round_index": self.best_round_index,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        return cls(
            params=HipParams(**d["params"]),
            objective_value=d["objective_value"],
            branching_factor=d["branching_factor"],
            train_days=d["train_days"],
            rounds=tuple(
                FitRound(tuple(r["start"]), r["final_objective"], r["converged"])
                for r in d["rounds"]
            ),
            best_round_index=d["best_round_index"],
        )


def objective(
    params: HipParams,
    views: DailySeries,
    shares: DailySeries,
    train_days: int,
) -> float:
    """Sum of squared per-day errors over the training window."""
    if len(views) < train_days or len(shares) < train_days:
        raise InvalidArgument(
            f"both series must cover {train_days} days "
            f"(views {len(views)}, shares {len(shares)})"
        )
    model = simulate(params, shares.prefix(train_days), train_days)
    resid = model.values - views.values[:train_days]
    value = float(np.dot(resid, resid))
    if not np.isfinite(value):
        raise NumericOverflow(
            "model output overflowed on the training window",
            params=params.as_tuple(),
        )
    return value


def _residuals(z, s, obs):
    p = np.exp(z)
    model = _simulate_values(
        HipParams(p[0], p[1], p[2], p[3]), s, obs.size
    )
    r = model - obs
    return np.where(np.isfinite(r), r, 1e150)


def fit(views: DailySeries, shares: DailySeries, cfg: FitConfig) -> FitResult:
    """Best-of-rounds bound-constrained least squares; deterministic per seed."""
    if views.kind is not SeriesKind.VIEWS:
        raise InvalidArgument("views series must have kind views")
    if shares.kind not in EXOGENOUS_KINDS:
        raise InvalidArgument("shares series must have kind shares or promotion")
    if len(views) < cfg.train_days or len(shares) < cfg.train_days:
        raise InvalidArgument(
            f"series must cover {cfg.train_days} training days"
        )

    lo, hi = cfg.bounds_arrays()
    obs = views.values[: cfg.train_days]
    s = shares.values[: cfg.train_days]

    if not obs.any() and not s.any():
        # degenerate all-zero input: mu is unidentifiable, return lower bounds
        params = HipParams(*lo)
        rounds = (FitRound(tuple(lo), 0.0, True),)
        return FitResult(params, 0.0, kernel_mass(params), cfg.train_days, rounds, 0)

    rng = np.random.default_rng(cfg.seed)
    log_lo, log_hi = np.log(lo), np.log(hi)

    def sse(p):
        r = _residuals(np.log(p), s, obs)
        return float(np.dot(r, r))

    starts = [
        np.exp(rng.uniform(log_lo, log_hi)) for _ in range(cfg.restarts)
    ]
    starts.append(np.clip(np.array(_DEFAULT_START), lo, hi))
    coarse = np.exp(rng.uniform(log_lo, log_hi, size=(_COARSE_SAMPLES, 4)))
    coarse_obj = np.array([sse(p) for p in coarse])
    starts.append(coarse[int(np.argmin(coarse_obj))])

    rounds: list[FitRound] = []
    candidates: list[tuple[float, HipParams]] = []
    for start in starts:
        start_obj = sse(start)
        try:
            sol = least_squares(
                _residuals,
                np.log(start),
                bounds=(log_lo, log_hi),
                args=(s, obs),
                method="trf",
                xtol=1e-12,
                ftol=1e-12,
                gtol=1e-10,
                max_nfev=400,
            )
            final = np.clip(np.exp(sol.x), lo, hi)
            final_obj = sse(final)
            converged = bool(sol.success)
        except (ValueError, FloatingPointError):
            final, final_obj, converged = start, start_obj, False
        if final_obj > start_obj:
            final, final_obj = start, start_obj
        rounds.append(FitRound(tuple(float(v) for v in start), final_obj, converged))
        if np.isfinite(final_obj):
            candidates.append((final_obj, HipParams(*final)))

    if not candidates:
        raise FitFailed(
            "all optimization rounds failed numerically",
            rounds=[r.final_objective for r in rounds],
        )

    best_obj = min(obj for obj, _ in candidates)
    tied = [(obj, p) for obj, p in candidates if obj == best_obj]
    # tie-break: smaller branching factor, then lexicographic parameters
    tied.sort(key=lambda t: (kernel_mass(t[1]), t[1].as_tuple()))
    best_params = tied[0][1]
    best_index = next(
        i for i, r in enumerate(rounds) if r.final_objective == best_obj
    )
    return FitResult(
        params=best_params,
        objective_value=best_obj,
        branching_factor=kernel_mass(best_params),
        train_days=cfg.train_days,
        rounds=tuple(rounds),
        best_round_index=best_index,
    )


def forecast(
    fit_result: FitResult,
    views_prefix: DailySeries,
    shares_full: DailySeries,
    from_day: int,
    to_day: int,
) -> DailySeries:
    """Continue the recurrence past observed history.

    Days before ``from_day`` use observed views as history; days in
    [from_day, to_day) are generated by the model. Returns the generated
    segment only.
    """
    if from_day < 0 or to_day < from_day:
        raise InvalidArgument(f"bad window [{from_day}, {to_day})")
    if len(views_prefix) < from_day:
        raise InvalidArgument(
            f"views prefix covers {len(views_prefix)} days, need {from_day}"
        )
    if len(shares_full) < to_day:
        raise InvalidArgument(
            f"shares series covers {len(shares_full)} days, need {to_day}"
        )
    if to_day == from_day:
        return DailySeries(np.zeros(0), SeriesKind.VIEWS)

    mu, C, c, theta = fit_result.params.as_tuple()
    s = shares_full.values[:to_day]
    xi = np.empty(to_day)
    xi[:from_day] = views_prefix.values[:from_day]
    if to_day > 1:
        w = (np.arange(1, to_day, dtype=np.float64) + c) ** -(1.0 + theta)
        wr = w[::-1].copy()
    n = to_day - 1
    for t in range(from_day, to_day):
        endo = C * np.dot(xi[:t], wr[n - t:n]) if t > 0 else 0.0
        xi[t] = mu * s[t] + endo
    return DailySeries(np.maximum(xi[from_day:to_day], 0.0), SeriesKind.VIEWS)


def mape(predicted: DailySeries, observed: DailySeries) -> float:
    """Mean absolute percentage error on per-day views, denominator floored at 1."""
    if len(predicted) != len(observed) or len(observed) < 1:
        raise InvalidArgument(
            f"need equal non-empty series: {len(predicted)} vs {len(observed)}"
        )
    denom = np.maximum(observed.values, 1.0)
    return float(100.0 * np.mean(np.abs(predicted.values - observed.values) / denom))


def mape_aggregate(predicted: DailySeries, observed: DailySeries) -> float:
    """Percentage error of the window totals, denominator floored at 1."""
    if len(predicted) != len(observed) or len(observed) < 1:
        raise InvalidArgument(
            f"need equal non-empty series: {len(predicted)} vs {len(observed)}"
        )
    return float(
        100.0 * abs(predicted.values.sum() - observed.values.sum())
        / max(observed.values.sum(), 1.0)
    )
