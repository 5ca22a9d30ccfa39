"""hipengine: fit, forecast and explain the popularity of online videos."""

from .hip_core import (
    HipParams,
    ImpulseResponse,
    PromotionSchedule,
    even_schedule,
    impulse_response,
    kernel_mass,
    promoted_series,
    simulate,
    viral_potential,
)
from .series import DailySeries, SeriesKind

__all__ = [
    "DailySeries",
    "SeriesKind",
    "HipParams",
    "ImpulseResponse",
    "PromotionSchedule",
    "even_schedule",
    "impulse_response",
    "kernel_mass",
    "promoted_series",
    "simulate",
    "viral_potential",
]
