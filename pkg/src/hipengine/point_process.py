"""Non-homogeneous Poisson process primitives.

Inter-event log-probabilities, event-sequence log-likelihood and an
Ogata-style thinning simulator used for self-tests. The compensator
(integrated intensity) can be supplied analytically or computed by
adaptive quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import InvalidArgument

_NEG_INF = float("-inf")

# points where a supplied compensator is spot-checked against the rate
_CONSISTENCY_POINTS = (0.37, 1.23, 2.89)


@dataclass(frozen=True)
class EventSequence:
    """Strictly increasing event times with an observation horizon."""

    times: np.ndarray = field(repr=False)
    horizon: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.times, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidArgument("event times must be a 1-d array")
        if arr.size and (not np.all(np.isfinite(arr)) or arr[0] < 0):
            raise InvalidArgument("event times must be finite and >= 0")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise InvalidArgument("event times must be strictly increasing")
        horizon = float(self.horizon) if self.horizon else (
            float(arr[-1]) if arr.size else 0.0
        )
        if arr.size and horizon < arr[-1]:
            raise InvalidArgument("horizon must cover the last event")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "times", arr)
        object.__setattr__(self, "horizon", horizon)

    def __len__(self) -> int:
        return int(self.times.size)


@dataclass(frozen=True)
class IntensitySpec:
    """Rate function with optional analytic compensator and thinning bound."""

    rate: Callable[[float], float]
    compensator: Optional[Callable[[float], float]] = None
    upper_bound: float = 0.0

    def __post_init__(self):
        if self.compensator is not None:
            self._check_compensator()

    def _check_compensator(self):
        # finite-difference derivative of the compensator must match the rate
        h = 1e-5
        for t in _CONSISTENCY_POINTS:
            lam = self.rate(t)
            deriv = (self.compensator(t + h) - self.compensator(t - h)) / (2 * h)
            if abs(deriv - lam) > 1e-6 * max(1.0, abs(lam)):
                raise InvalidArgument(
                    f"compensator inconsistent with rate at t={t}: "
                    f"dLambda/dt={deriv:.9g} vs lambda={lam:.9g}"
                )

    def integrated(self, t: float) -> float:
        """Lambda(t), analytic when given, adaptive quadrature otherwise."""
        if t < 0:
            raise InvalidArgument(f"time must be >= 0, got {t}")
        if self.compensator is not None:
            return float(self.compensator(t))
        if t == 0.0:
            return 0.0
        value, _ = quad(self.rate, 0.0, t, epsabs=1e-12, epsrel=1e-10, limit=200)
        return float(value)


def constant_rate(lam: float) -> IntensitySpec:
    """Homogeneous Poisson process of rate lam."""
    return IntensitySpec(
        rate=lambda t: lam,
        compensator=lambda t: lam * t,
        upper_bound=lam,
    )


def first_event_logpdf(intensity: IntensitySpec, t: float) -> float:
    """log density of the first event arriving at time t: log lam(t) - Lambda(t)."""
    if t < 0:
        raise InvalidArgument(f"time must be >= 0, got {t}")
    lam = intensity.rate(t)
    if lam <= 0:
        return _NEG_INF
    return float(np.log(lam) - intensity.integrated(t))


def next_event_logprob(intensity: IntensitySpec, t_prev: float, t_next: float) -> float:
    """log conditional density of the next event at t_next given one at t_prev."""
    if t_prev < 0 or t_next <= t_prev:
        raise InvalidArgument(f"need 0 <= t_prev < t_next, got {t_prev}, {t_next}")
    lam = intensity.rate(t_next)
    if lam <= 0:
        return _NEG_INF
    return float(
        np.log(lam) + intensity.integrated(t_prev) - intensity.integrated(t_next)
    )


def log_likelihood(
    intensity: IntensitySpec,
    events: EventSequence,
    censor_at_horizon: bool = False,
) -> float:
    """sum_i log lam(t_i) - Lambda(t_n).

    By default the compensator is evaluated at the last event time; pass
    ``censor_at_horizon=True`` to account for an event-free tail up to the
    observation horizon instead.
    """
    end = events.horizon if censor_at_horizon else (
        float(events.times[-1]) if len(events) else 0.0
    )
    total = 0.0
    for t in events.times:
        lam = intensity.rate(float(t))
        if lam <= 0:
            return _NEG_INF
        total += np.log(lam)
    return float(total - intensity.integrated(end))


def simulate_thinning(
    intensity: IntensitySpec,
    horizon: float,
    seed: int,
) -> EventSequence:
    """Ogata thinning: propose at the upper-bound rate, accept at lam(t)/lam_max."""
    if horizon < 0:
        raise InvalidArgument(f"horizon must be >= 0, got {horizon}")
    lam_max = intensity.upper_bound
    if lam_max < 0 or not np.isfinite(lam_max):
        raise InvalidArgument(f"need a finite upper bound, got {lam_max}")
    if lam_max == 0:
        return EventSequence(np.zeros(0), horizon)
    rng = np.random.default_rng(seed)
    times = []
    t = 0.0
    while True:
        t += rng.exponential(1.0 / lam_max)
        if t > horizon:
            break
        if rng.uniform() * lam_max <= intensity.rate(t):
            times.append(t)
    return EventSequence(np.asarray(times), horizon)
