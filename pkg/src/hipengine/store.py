"""File-backed store for video records, fits and collections.

Layout under the data directory:

    videos/<video_id>.json   one document per video
    collections.json         index of all collections

All writes go through a single lock and land via write-temp-then-rename,
so readers always see a consistent snapshot.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from .errors import (
    InvalidArgument,
    MutateDefaultCollection,
    NameConflict,
    UnknownCollection,
    UnknownVideo,
)
from .hip_core import impulse_response, kernel_mass, viral_potential
from .hip_fit import FitResult
from .ingestion import VideoRecord
from .series import DailySeries, SeriesKind


@dataclass
class Collection:
    name: str
    video_ids: list[str] = field(default_factory=list)
    default_flag: bool = False


@dataclass(frozen=True)
class EndoExoPoint:
    """One bubble on the endo-exo map, percentiles relative to its collection."""

    video_id: str
    exo_sensitivity: float     # mu
    endo_response: float       # A; inf when the fitted cascade diverges
    viral_potential: float     # nu = mu * A
    views_total: float
    shares_total: float
    views_percentile: float
    shares_percentile: float
    supercritical_flag: bool
    title: str = ""
    author: str = ""

    def to_dict(self) -> dict:
        d = {
            "video_id": self.video_id,
            "exo_sensitivity": self.exo_sensitivity,
            "endo_response": self.endo_response,
            "viral_potential": self.viral_potential,
            "views_total": self.views_total,
            "shares_total": self.shares_total,
            "views_percentile": self.views_percentile,
            "shares_percentile": self.shares_percentile,
            "supercritical_flag": self.supercritical_flag,
            "title": self.title,
            "author": self.author,
        }
        # JSON has no infinity; divergent responses serialize as null
        for key in ("endo_response", "viral_potential"):
            if math.isinf(d[key]):
                d[key] = None
        return d


def collection_percentiles(totals: list[float]) -> list[float]:
    """Mean-rank percentiles scaled to [0, 100]; a single item sits at 100."""
    n = len(totals)
    if n == 0:
        return []
    if n == 1:
        return [100.0]
    ranks = rankdata(totals, method="average")
    return [float((r - 1.0) / (n - 1) * 100.0) for r in ranks]


class Store:
    def __init__(self, data_dir: str | os.PathLike):
        self.data_dir = Path(data_dir)
        self.videos_dir = self.data_dir / "videos"
        self.collections_path = self.data_dir / "collections.json"
        self.videos_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        if not self.collections_path.exists():
            self._write_collections({})

    # -- low-level persistence -------------------------------------------

    def _atomic_write(self, path: Path, payload: dict) -> None:
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        os.replace(tmp, path)

    def _read_collections(self) -> dict[str, Collection]:
        raw = json.loads(self.collections_path.read_text(encoding="utf-8"))
        return {
            name: Collection(name, c["video_ids"], c["default_flag"])
            for name, c in raw.items()
        }

    def _write_collections(self, collections: dict[str, Collection]) -> None:
        payload = {
            name: {"video_ids": c.video_ids, "default_flag": c.default_flag}
            for name, c in collections.items()
        }
        self._atomic_write(self.collections_path, payload)

    # -- video records ----------------------------------------------------

    def save_video(self, record: VideoRecord) -> None:
        doc = {
            "video_id": record.video_id,
            "title": record.title,
            "author": record.author,
            "category": record.category,
            "upload_date": record.upload_date,
            "exo_source": record.exo_source,
            "views": record.views.values.tolist(),
            "shares": record.shares.values.tolist(),
            "fit": record.fit.to_dict() if record.fit else None,
            "fit_eligible": record.fit_eligible,
        }
        with self._lock:
            self._atomic_write(self.videos_dir / f"{record.video_id}.json", doc)

    def load_video(self, video_id: str) -> VideoRecord:
        path = self.videos_dir / f"{video_id}.json"
        if not path.exists():
            raise UnknownVideo(f"video {video_id} is not stored")
        doc = json.loads(path.read_text(encoding="utf-8"))
        return VideoRecord(
            video_id=doc["video_id"],
            views=DailySeries(np.asarray(doc["views"]), SeriesKind.VIEWS),
            shares=DailySeries(np.asarray(doc["shares"]), SeriesKind.SHARES),
            title=doc.get("title", ""),
            author=doc.get("author", ""),
            category=doc.get("category", ""),
            upload_date=doc.get("upload_date", ""),
            exo_source=doc.get("exo_source", "shares"),
            fit=FitResult.from_dict(doc["fit"]) if doc.get("fit") else None,
            fit_eligible=doc.get("fit_eligible", False),
        )

    def has_video(self, video_id: str) -> bool:
        return (self.videos_dir / f"{video_id}.json").exists()

    def list_videos(self) -> list[str]:
        return sorted(p.stem for p in self.videos_dir.glob("*.json"))

    # -- collections ------------------------------------------------------

    def create_collection(self, name: str, default: bool = False) -> Collection:
        if not name:
            raise InvalidArgument("collection name must be non-empty")
        with self._lock:
            collections = self._read_collections()
            if name in collections:
                raise NameConflict(f"collection {name!r} already exists")
            collections[name] = Collection(name, [], default)
            self._write_collections(collections)
            return collections[name]

    def delete_collection(self, name: str) -> None:
        with self._lock:
            collections = self._read_collections()
            col = collections.get(name)
            if col is None:
                raise UnknownCollection(f"no collection named {name!r}")
            if col.default_flag:
                raise MutateDefaultCollection(f"collection {name!r} is a default collection")
            del collections[name]
            self._write_collections(collections)

    def get_collection(self, name: str) -> Collection:
        collections = self._read_collections()
        if name not in collections:
            raise UnknownCollection(f"no collection named {name!r}")
        return collections[name]

    def list_collections(self) -> list[Collection]:
        return sorted(self._read_collections().values(), key=lambda c: c.name)

    def add_video(self, name: str, video_id: str) -> bool:
        """Add a stored video to a collection; returns False on duplicate no-op."""
        with self._lock:
            collections = self._read_collections()
            col = collections.get(name)
            if col is None:
                raise UnknownCollection(f"no collection named {name!r}")
            if col.default_flag:
                raise MutateDefaultCollection(f"collection {name!r} is a default collection")
            if not self.has_video(video_id):
                raise UnknownVideo(f"video {video_id} is not stored")
            if video_id in col.video_ids:
                return False
            col.video_ids.append(video_id)
            self._write_collections(collections)
            return True

    def remove_video(self, name: str, video_id: str) -> None:
        with self._lock:
            collections = self._read_collections()
            col = collections.get(name)
            if col is None:
                raise UnknownCollection(f"no collection named {name!r}")
            if col.default_flag:
                raise MutateDefaultCollection(f"collection {name!r} is a default collection")
            if video_id not in col.video_ids:
                raise UnknownVideo(f"video {video_id} is not in collection {name!r}")
            col.video_ids.remove(video_id)
            self._write_collections(collections)

    def seed_default_collection(self, name: str, video_ids: list[str]) -> None:
        """Install a default (immutable) collection; idempotent."""
        with self._lock:
            collections = self._read_collections()
            if name in collections:
                return
            collections[name] = Collection(name, list(video_ids), True)
            self._write_collections(collections)

    # -- endo-exo map -----------------------------------------------------

    def endo_exo_points(self, name: str) -> tuple[list[EndoExoPoint], list[str]]:
        """Map points for fitted members plus the ids still pending a fit."""
        col = self.get_collection(name)
        fitted: list[VideoRecord] = []
        pending: list[str] = []
        for vid in col.video_ids:
            record = self.load_video(vid)
            if record.fit is None:
                pending.append(vid)
            else:
                fitted.append(record)

        views_pct = collection_percentiles([r.views.total() for r in fitted])
        shares_pct = collection_percentiles([r.shares.total() for r in fitted])
        points = []
        for record, vp, sp in zip(fitted, views_pct, shares_pct):
            points.append(make_point(record, vp, sp))
        return points, pending


def make_point(record: VideoRecord, views_percentile: float,
               shares_percentile: float) -> EndoExoPoint:
    params = record.fit.params
    n_star = kernel_mass(params)
    if n_star >= 1.0:
        endo = float("inf")
    else:
        endo = impulse_response(params).total
    return EndoExoPoint(
        video_id=record.video_id,
        exo_sensitivity=params.mu,
        endo_response=endo,
        viral_potential=viral_potential(params.mu, endo) if math.isfinite(endo)
        else float("inf"),
        views_total=record.views.total(),
        shares_total=record.shares.total(),
        views_percentile=views_percentile,
        shares_percentile=shares_percentile,
        supercritical_flag=n_star >= 1.0,
        title=record.title,
        author=record.author,
    )
