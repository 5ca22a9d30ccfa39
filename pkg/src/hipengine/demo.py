"""Deterministic synthetic fixtures and the seeded demo collection.

The demo videos are noiseless model output from fixed random parameter
draws, so fits recover them almost exactly and every downstream surface
(map, series, promotion what-if) has well-understood expected values.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.special import zeta

from .hip_core import HipParams, simulate
from .hip_fit import FitConfig, fit
from .ingestion import VideoRecord, export_series, import_series, validate_for_fit
from .series import DailySeries, SeriesKind
from .store import Store

DEMO_COLLECTION = "demo"
_TITLES = (
    "Sunrise timelapse", "Kitten on a keyboard", "DIY bottle rocket",
    "Street food tour", "Unboxing retro console", "Marble run machine",
    "Backyard astronomy", "Speedrun highlights",
)
_AUTHORS = ("alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi")


def demo_video_id(index: int) -> str:
    return f"demo{index:07d}"


def synthetic_record(index: int, total_days: int = 120, seed: int = 2024) -> VideoRecord:
    """Noiseless synthetic video with a subcritical random parameter draw."""
    rng = np.random.default_rng(seed + index)
    theta = rng.uniform(0.4, 2.5)
    c = rng.uniform(0.5, 5.0)
    n_star = rng.uniform(0.2, 0.85)
    C = n_star / zeta(1 + theta, 1 + c)
    params = HipParams(rng.uniform(0.5, 20.0), C, c, theta)
    s = rng.gamma(2.0, 8.0, size=total_days) * np.exp(
        -np.arange(total_days) / rng.uniform(20, 80)
    )
    shares = DailySeries(s, SeriesKind.SHARES)
    views = simulate(params, shares, total_days)
    return VideoRecord(
        video_id=demo_video_id(index),
        views=views,
        shares=shares,
        title=_TITLES[index % len(_TITLES)],
        author=_AUTHORS[index % len(_AUTHORS)],
        category="Music",
        upload_date="2016-01-01",
    )


def write_demo_fixtures(fixture_dir: Path, count: int = 6, seed: int = 2024) -> list[str]:
    fixture_dir = Path(fixture_dir)
    fixture_dir.mkdir(parents=True, exist_ok=True)
    ids = []
    for i in range(count):
        record = synthetic_record(i, seed=seed)
        export_series(record, fixture_dir / f"{record.video_id}.csv")
        ids.append(record.video_id)
    return ids


def seed_demo_collection(
    store: Store,
    fixture_dir: Path,
    count: int = 6,
    seed: int = 2024,
    fit_seed: int = 0,
) -> list[str]:
    """Fit and store the demo videos behind an immutable default collection."""
    ids = write_demo_fixtures(fixture_dir, count, seed)
    for vid in ids:
        if store.has_video(vid) and store.load_video(vid).fit is not None:
            continue
        record = import_series(Path(fixture_dir) / f"{vid}.csv")
        validate_for_fit(record)
        record.fit = fit(record.views, record.shares, FitConfig(seed=fit_seed))
        store.save_video(record)
    store.seed_default_collection(DEMO_COLLECTION, ids)
    return ids
