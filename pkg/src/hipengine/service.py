"""HTTP JSON API over the engine: collections, series, maps, fit jobs and
promotion what-if simulation.

All routes live under ``/api/v1``. Errors share a uniform
``{code, message, details}`` envelope. Fits run on a small background
worker pool and are observable by polling ``/jobs/{job_id}``.
"""

from __future__ import annotations

import itertools
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import hip_core, hip_fit
from .errors import (
    DemotionOverflow,
    HipError,
    InvalidArgument,
    InvalidVideoId,
    MutateDefaultCollection,
    NameConflict,
    NotFitted,
    NotFound,
    UnknownCollection,
    UnknownVideo,
    WindowOutOfRange,
)
from .ingestion import (
    FixtureSource,
    InsightClient,
    RemoteConfig,
    VideoSource,
    parse_video_id,
    validate_for_fit,
)
from .series import DailySeries, SeriesKind
from .store import Store, make_point

_STATUS_BY_CODE = {
    "invalid-argument": 422,
    "invalid-id": 422,
    "window-out-of-range": 422,
    "demotion-overflow": 422,
    "insufficient-exogenous-data": 422,
    "not-found": 404,
    "unknown-collection": 404,
    "unknown-video": 404,
    "name-conflict": 409,
    "not-yet-fitted": 409,
    "mutate-default-collection": 403,
}

JOB_STATES = ("queued", "crawling", "fitting", "done", "failed")


@dataclass
class ServiceConfig:
    data_dir: Path
    fixture_dir: Optional[Path] = None
    remote: Optional[RemoteConfig] = None
    workers: int = 2
    fit_seed: int = 0
    train_days: int = 90
    total_days: int = 120
    static_dir: Optional[Path] = None


@dataclass
class FitJob:
    job_id: str
    video_id: str
    collection: str
    state: str = "queued"
    error: Optional[dict] = None
    submitted_at: float = field(default_factory=time.time)
    finished_at: Optional[float] = None

    def advance(self, state: str) -> None:
        # transitions only move forward along the queue
        if JOB_STATES.index(state) < JOB_STATES.index(self.state):
            raise InvalidArgument(
                f"job cannot move from {self.state} back to {state}"
            )
        self.state = state
        if state in ("done", "failed"):
            self.finished_at = time.time()

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "video_id": self.video_id,
            "collection": self.collection,
            "state": self.state,
            "error": self.error,
            "submitted_at": self.submitted_at,
            "finished_at": self.finished_at,
        }


class JobRegistry:
    def __init__(self, workers: int):
        self._jobs: dict[str, FitJob] = {}
        self._lock = threading.Lock()
        self._ids = itertools.count(1)
        self._pool = ThreadPoolExecutor(max_workers=workers)

    def submit(self, video_id: str, collection: str, work) -> FitJob:
        with self._lock:
            for job in self._jobs.values():
                if job.video_id == video_id and job.state not in ("done", "failed"):
                    return job
            job = FitJob(job_id=f"job-{next(self._ids)}", video_id=video_id,
                         collection=collection)
            self._jobs[job.job_id] = job
        self._pool.submit(work, job)
        return job

    def get(self, job_id: str) -> FitJob:
        job = self._jobs.get(job_id)
        if job is None:
            raise NotFound(f"no job {job_id}")
        return job

    def queue_depth(self) -> int:
        with self._lock:
            return sum(
                1 for j in self._jobs.values() if j.state not in ("done", "failed")
            )


class AddVideoRequest(BaseModel):
    id_or_url: str
    collection: str


class CollectionVideoRequest(BaseModel):
    video_id: str


class SimulatePromotionRequest(BaseModel):
    volume: float
    days: int = 90
    horizon: int = 120


def create_app(config: ServiceConfig) -> FastAPI:
    store = Store(config.data_dir)
    jobs = JobRegistry(config.workers)
    source = _make_source(config)

    app = FastAPI(title="hipengine")
    app.state.store = store
    app.state.jobs = jobs
    api = "/api/v1"

    @app.exception_handler(HipError)
    async def hip_error_handler(request: Request, exc: HipError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 400),
            content={"code": exc.code, "message": exc.message,
                     "details": exc.details},
        )

    @app.get(api + "/health")
    def health():
        return {"status": "ok", "queue_depth": jobs.queue_depth()}

    # -- collections ------------------------------------------------------

    @app.get(api + "/collections")
    def list_collections():
        return [
            {"name": c.name, "video_ids": c.video_ids, "default_flag": c.default_flag}
            for c in store.list_collections()
        ]

    @app.post(api + "/collections/{name}", status_code=201)
    def create_collection(name: str):
        c = store.create_collection(name)
        return {"name": c.name, "video_ids": c.video_ids, "default_flag": c.default_flag}

    @app.delete(api + "/collections/{name}")
    def delete_collection(name: str):
        store.delete_collection(name)
        return {"deleted": name}

    @app.post(api + "/collections/{name}/videos")
    def add_collection_video(name: str, req: CollectionVideoRequest):
        added = store.add_video(name, req.video_id)
        return {"added": added, "video_id": req.video_id}

    @app.delete(api + "/collections/{name}/videos/{video_id}")
    def remove_collection_video(name: str, video_id: str):
        store.remove_video(name, video_id)
        return {"removed": video_id}

    @app.get(api + "/collections/{name}/map")
    def collection_map(name: str):
        points, pending = store.endo_exo_points(name)
        return {"points": [p.to_dict() for p in points], "pending": pending}

    # -- videos and jobs --------------------------------------------------

    def run_job(job: FitJob):
        try:
            job.advance("crawling")
            record = source.fetch_video(job.video_id)
            validate_for_fit(record, config.total_days)
            job.advance("fitting")
            cfg = hip_fit.FitConfig(
                train_days=config.train_days,
                total_days=config.total_days,
                seed=config.fit_seed,
            )
            record.fit = hip_fit.fit(record.views, record.shares, cfg)
            store.save_video(record)
            store.add_video(job.collection, record.video_id)
            job.advance("done")
        except HipError as exc:
            job.error = {"code": exc.code, "message": exc.message}
            job.advance("failed")
        except Exception as exc:  # keep the job observable on unexpected errors
            job.error = {"code": "internal", "message": str(exc)}
            job.advance("failed")

    @app.post(api + "/videos", status_code=202)
    def submit_video(req: AddVideoRequest):
        video_id = parse_video_id(req.id_or_url)
        col = store.get_collection(req.collection)
        if col.default_flag:
            raise MutateDefaultCollection(
                f"collection {req.collection!r} is a default collection"
            )
        job = jobs.submit(video_id, req.collection, run_job)
        return job.to_dict()

    @app.get(api + "/jobs/{job_id}")
    def get_job(job_id: str):
        return jobs.get(job_id).to_dict()

    @app.get(api + "/videos/{video_id}")
    def get_video(video_id: str):
        record = _load(store, video_id)
        fitted = record.fit is not None
        out = {
            "video_id": record.video_id,
            "title": record.title,
            "author": record.author,
            "category": record.category,
            "upload_date": record.upload_date,
            "days": len(record.views),
            "views_total": record.views.total(),
            "shares_total": record.shares.total(),
            "fitted": fitted,
        }
        if fitted:
            p = record.fit.params
            out["params"] = {"mu": p.mu, "C": p.C, "c": p.c, "theta": p.theta}
            out["branching_factor"] = record.fit.branching_factor
        return out

    @app.get(api + "/videos/{video_id}/series")
    def get_series(video_id: str, forecast_from: int = 90, to: int = 120):
        record = _load(store, video_id)
        if record.fit is None:
            raise NotFitted(f"video {video_id} has no fit yet")
        if not 0 <= forecast_from <= to:
            raise WindowOutOfRange(f"bad window [{forecast_from}, {to})")
        if to > len(record.views):
            raise WindowOutOfRange(
                f"window end {to} beyond stored series of {len(record.views)} days"
            )
        train = min(record.fit.train_days, forecast_from)
        fitted = hip_core.simulate(
            record.fit.params, record.shares.prefix(train), train
        ) if train else DailySeries.zeros(0)
        predicted = hip_fit.forecast(
            record.fit, record.views, record.shares, forecast_from, to
        )
        return {
            "video_id": video_id,
            "train_days": record.fit.train_days,
            "forecast_from": forecast_from,
            "to": to,
            "observed_views": record.views.values[:to].tolist(),
            "shares": record.shares.values[:to].tolist(),
            "fitted_views": fitted.values.tolist(),
            "forecast_views": predicted.values.tolist(),
        }

    @app.post(api + "/videos/{video_id}/simulate-promotion")
    def simulate_promotion(video_id: str, req: SimulatePromotionRequest):
        record = _load(store, video_id)
        if record.fit is None:
            raise NotFitted(f"video {video_id} has no fit yet")
        if req.days < 1 or req.horizon < 1:
            raise InvalidArgument("days and horizon must be >= 1")
        if req.horizon > len(record.shares):
            raise WindowOutOfRange(
                f"horizon {req.horizon} beyond stored series of "
                f"{len(record.shares)} days"
            )
        params = record.fit.params
        per_day = req.volume / req.days
        combined = record.shares.padded(req.horizon)
        combined[: req.days] += per_day
        if (combined < 0).any():
            raise DemotionOverflow(
                "demotion volume exceeds organic exogenous stimuli"
            )
        promoted = hip_core.simulate(
            params, DailySeries(combined, SeriesKind.PROMOTION), req.horizon
        )
        if req.volume == 0:
            incremental = 0.0
        else:
            magnitude = hip_core.promotion_total_views(
                params, hip_core.even_schedule(abs(req.volume), req.days)
            )
            incremental = magnitude if req.volume > 0 else -magnitude
        base_point = make_point(record, 100.0, 100.0)
        projected = base_point.to_dict()
        projected["views_total"] = record.views.total() + incremental
        projected["shares_total"] = record.shares.total() + req.volume
        projected["views_percentile"] = None
        projected["shares_percentile"] = None
        return {
            "video_id": video_id,
            "volume": req.volume,
            "promoted_views": promoted.values.tolist(),
            "incremental_total": incremental,
            "projected_point": projected,
        }

    if config.static_dir is not None and Path(config.static_dir).exists():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True))

    return app


def _make_source(config: ServiceConfig) -> VideoSource:
    if config.fixture_dir is not None:
        return FixtureSource(Path(config.fixture_dir))
    if config.remote is not None:
        return InsightClient(config.remote)
    raise InvalidArgument("service needs a fixture directory or a remote source")


def _load(store: Store, video_id: str):
    try:
        return store.load_video(video_id)
    except UnknownVideo:
        raise NotFound(f"video {video_id} is not stored")
