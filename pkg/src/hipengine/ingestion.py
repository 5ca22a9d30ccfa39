"""Acquisition of video metadata and daily popularity series.

Two sources exist behind the same interface: a remote insight-style HTTP
API (when configured) and local CSV import. All engine tests run from
files, so the remote client is pluggable and cached.
"""

from __future__ import annotations

import csv
import json
import os
import re
import tempfile
import time
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path
from typing import Optional, Protocol

import numpy as np
import requests

from .errors import (
    EmptySeries,
    FetchFailed,
    GappedSeries,
    InvalidArgument,
    InvalidValue,
    InvalidVideoId,
    NotFound,
    StatsUnavailable,
    TooShort,
)
from .hip_fit import FitResult
from .series import DailySeries, SeriesKind

FIT_MIN_DAYS = 120

_ID_RE = re.compile(r"^[A-Za-z0-9_-]{11}$")
_URL_RES = (
    re.compile(r"(?:https?://)?(?:www\.|m\.)?youtube\.com/watch\?(?:.*&)?v=([A-Za-z0-9_-]{11})"),
    re.compile(r"(?:https?://)?(?:www\.)?youtu\.be/([A-Za-z0-9_-]{11})"),
    re.compile(r"(?:https?://)?(?:www\.)?youtube\.com/(?:shorts|embed)/([A-Za-z0-9_-]{11})"),
)


@dataclass
class VideoRecord:
    video_id: str
    views: DailySeries
    shares: DailySeries
    title: str = ""
    author: str = ""
    category: str = ""
    upload_date: str = ""
    exo_source: str = "shares"
    fit: Optional[FitResult] = None
    fit_eligible: bool = False

    def __post_init__(self):
        if not self.video_id:
            raise InvalidArgument("video_id must be non-empty")
        if len(self.views) != len(self.shares):
            raise InvalidArgument(
                f"views and shares must be the same length "
                f"({len(self.views)} vs {len(self.shares)})"
            )


def parse_video_id(text: str) -> str:
    """Extract the bare 11-character video ID from an ID or a watch URL."""
    if not text:
        raise InvalidVideoId("empty video id")
    text = text.strip()
    if _ID_RE.match(text):
        return text
    for pattern in _URL_RES:
        m = pattern.match(text)
        if m:
            return m.group(1)
    raise InvalidVideoId(f"unrecognized video id or URL: {text!r}")


def import_series(path: str | os.PathLike, sidecar: str | os.PathLike | None = None) -> VideoRecord:
    """Read a ``day,views,shares`` CSV (plus optional metadata sidecar JSON)."""
    path = Path(path)
    days, view_vals, share_vals = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or \
                [f.strip() for f in reader.fieldnames] != ["day", "views", "shares"]:
            raise InvalidValue(0, f"expected header day,views,shares in {path}")
        for i, row in enumerate(reader, start=1):
            try:
                day = int(row["day"])
                v = float(row["views"])
                s = float(row["shares"])
            except (TypeError, ValueError) as e:
                raise InvalidValue(i, f"unparseable row {i} in {path}: {e}") from e
            if v < 0 or s < 0:
                raise InvalidValue(i, f"negative value on row {i} in {path}")
            days.append(day)
            view_vals.append(v)
            share_vals.append(s)
    if not days:
        raise EmptySeries(f"no data rows in {path}")
    for expected, day in enumerate(days):
        if day != expected:
            raise GappedSeries(expected)

    meta = {}
    sidecar_path = Path(sidecar) if sidecar else path.with_suffix(".json")
    if sidecar_path.exists():
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    video_id = meta.get("video_id", path.stem)
    return VideoRecord(
        video_id=video_id,
        views=DailySeries(np.asarray(view_vals), SeriesKind.VIEWS),
        shares=DailySeries(np.asarray(share_vals), SeriesKind.SHARES),
        title=meta.get("title", ""),
        author=meta.get("author", ""),
        category=meta.get("category", ""),
        upload_date=meta.get("upload_date", ""),
    )


def export_series(record: VideoRecord, path: str | os.PathLike) -> None:
    """Write the record back to CSV + sidecar; inverse of import_series."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "views", "shares"])
        for day in range(len(record.views)):
            writer.writerow([
                day,
                repr(float(record.views.values[day])),
                repr(float(record.shares.values[day])),
            ])
    sidecar = {
        "video_id": record.video_id,
        "title": record.title,
        "author": record.author,
        "category": record.category,
        "upload_date": record.upload_date,
    }
    path.with_suffix(".json").write_text(
        json.dumps(sidecar, indent=2), encoding="utf-8"
    )


def validate_for_fit(record: VideoRecord, total_days: int = FIT_MIN_DAYS) -> VideoRecord:
    """Require enough days for the train/holdout split; mark eligibility."""
    if len(record.views) < total_days:
        raise TooShort(len(record.views), total_days)
    record.fit_eligible = True
    return record


class VideoSource(Protocol):
    def fetch_video(self, video_id: str) -> VideoRecord: ...


@dataclass
class FixtureSource:
    """Reads ``<dir>/<video_id>.csv`` (+ sidecar) as if crawled remotely."""

    directory: Path

    def fetch_video(self, video_id: str) -> VideoRecord:
        video_id = parse_video_id(video_id)
        path = Path(self.directory) / f"{video_id}.csv"
        if not path.exists():
            raise NotFound(f"no fixture for video {video_id}")
        record = import_series(path)
        return replace(record, video_id=video_id)


@dataclass
class RemoteConfig:
    base_url: str
    api_key: str = ""
    timeout: float = 30.0
    cache_dir: Optional[Path] = None

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "RemoteConfig":
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg["base_url"] = os.environ.get("HIPENGINE_BASE_URL", cfg.get("base_url", ""))
        cfg["api_key"] = os.environ.get("HIPENGINE_API_KEY", cfg.get("api_key", ""))
        if cfg.get("cache_dir"):
            cfg["cache_dir"] = Path(cfg["cache_dir"])
        return cls(**cfg)


class InsightClient:
    """HTTP client for an insight-style daily statistics endpoint.

    Responses are cached on disk keyed by (video_id, fetch date) so replays
    work offline; failed transports retry with exponential backoff.
    """

    RETRIES = 3

    def __init__(self, config: RemoteConfig, session: Optional[requests.Session] = None):
        self.config = config
        self.session = session or requests.Session()

    def _cache_path(self, video_id: str) -> Optional[Path]:
        if self.config.cache_dir is None:
            return None
        return Path(self.config.cache_dir) / f"{video_id}.{date.today().isoformat()}.json"

    def fetch_video(self, video_id: str) -> VideoRecord:
        video_id = parse_video_id(video_id)
        cache = self._cache_path(video_id)
        if cache is not None and cache.exists():
            payload = json.loads(cache.read_text(encoding="utf-8"))
        else:
            payload = self._request(video_id)
            if cache is not None:
                cache.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(dir=cache.parent, suffix=".tmp")
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    json.dump(payload, fh)
                os.replace(tmp, cache)
        return self._to_record(video_id, payload)

    def _request(self, video_id: str) -> dict:
        url = f"{self.config.base_url.rstrip('/')}/videos/{video_id}"
        headers = {}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        last_error: Exception | None = None
        for attempt in range(self.RETRIES):
            try:
                resp = self.session.get(url, headers=headers, timeout=self.config.timeout)
            except requests.RequestException as e:
                last_error = e
                time.sleep(2 ** attempt * 0.5)
                continue
            if resp.status_code == 404:
                raise NotFound(f"video {video_id} not found")
            if resp.status_code == 403:
                raise StatsUnavailable(f"statistics for {video_id} are not public")
            if resp.status_code >= 500:
                last_error = FetchFailed(f"server error {resp.status_code}")
                time.sleep(2 ** attempt * 0.5)
                continue
            resp.raise_for_status()
            return resp.json()
        raise FetchFailed(
            f"failed to fetch {video_id} after {self.RETRIES} attempts: {last_error}"
        )

    @staticmethod
    def _to_record(video_id: str, payload: dict) -> VideoRecord:
        if payload.get("stats_hidden"):
            raise StatsUnavailable(f"statistics for {video_id} are hidden")
        views = payload.get("daily_views") or []
        shares = payload.get("daily_shares") or []
        if not views:
            raise StatsUnavailable(f"no daily series for {video_id}")
        if len(shares) != len(views):
            raise InvalidArgument("daily views and shares length mismatch in payload")
        return VideoRecord(
            video_id=video_id,
            views=DailySeries(np.asarray(views, dtype=float), SeriesKind.VIEWS),
            shares=DailySeries(np.asarray(shares, dtype=float), SeriesKind.SHARES),
            title=payload.get("title", ""),
            author=payload.get("author", ""),
            category=payload.get("category", ""),
            upload_date=payload.get("upload_date", ""),
        )
