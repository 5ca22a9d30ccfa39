import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from hipengine.demo import (
    DEMO_COLLECTION,
    seed_demo_collection,
    synthetic_record,
    write_demo_fixtures,
)
from hipengine.hip_core import impulse_response
from hipengine.ingestion import export_series
from hipengine.service import ServiceConfig, create_app
from hipengine.store import Store


def wait_for_job(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    states = []
    while time.time() < deadline:
        job = client.get(f"/api/v1/jobs/{job_id}").json()
        if not states or states[-1] != job["state"]:
            states.append(job["state"])
        if job["state"] in ("done", "failed"):
            return job, states
        time.sleep(0.05)
    raise TimeoutError(f"job {job_id} did not finish; states seen: {states}")


@pytest.fixture(scope="module")
def service(tmp_path_factory):
    root = tmp_path_factory.mktemp("service")
    fixtures = root / "fixtures"
    data = root / "data"
    store = Store(data)
    seed_demo_collection(store, fixtures)
    # extra fixtures: one full-length unstored video, one too-short video
    extra = synthetic_record(20)
    export_series(extra, fixtures / f"{extra.video_id}.csv")
    short = synthetic_record(21, total_days=60)
    export_series(short, fixtures / f"{short.video_id}.csv")
    app = create_app(ServiceConfig(data_dir=data, fixture_dir=fixtures))
    with TestClient(app) as client:
        yield client, extra.video_id, short.video_id


class TestCollections:
    def test_map_of_seeded_demo(self, service):
        client, _, _ = service
        resp = client.get(f"/api/v1/collections/{DEMO_COLLECTION}/map")
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["points"]) >= 6
        for pt in body["points"]:
            assert pt["viral_potential"] == pytest.approx(
                pt["exo_sensitivity"] * pt["endo_response"]
            )
            assert 0 <= pt["views_percentile"] <= 100

    def test_delete_default_forbidden(self, service):
        client, _, _ = service
        assert client.delete(f"/api/v1/collections/{DEMO_COLLECTION}").status_code == 403

    def test_unknown_collection(self, service):
        client, _, _ = service
        resp = client.get("/api/v1/collections/ghost/map")
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown-collection"

    def test_create_conflict_and_delete(self, service):
        client, _, _ = service
        assert client.post("/api/v1/collections/scratch").status_code == 201
        assert client.post("/api/v1/collections/scratch").status_code == 409
        assert client.delete("/api/v1/collections/scratch").status_code == 200

    def test_health(self, service):
        client, _, _ = service
        body = client.get("/api/v1/health").json()
        assert body["status"] == "ok"
        assert body["queue_depth"] >= 0


class TestJobs:
    def test_add_video_end_to_end(self, service):
        client, extra_id, _ = service
        client.post("/api/v1/collections/jobtest")
        before = client.get("/api/v1/collections/jobtest/map").json()
        resp = client.post(
            "/api/v1/videos",
            json={"id_or_url": extra_id, "collection": "jobtest"},
        )
        assert resp.status_code == 202
        job, states = wait_for_job(client, resp.json()["job_id"])
        assert job["state"] == "done", job
        # observed states move forward only
        order = ["queued", "crawling", "fitting", "done", "failed"]
        assert [order.index(s) for s in states] == sorted(order.index(s) for s in states)
        after = client.get("/api/v1/collections/jobtest/map").json()
        assert len(after["points"]) == len(before["points"]) + 1
        pt = next(p for p in after["points"] if p["video_id"] == extra_id)
        assert pt["viral_potential"] == pt["exo_sensitivity"] * pt["endo_response"]

    def test_short_fixture_fails_too_short(self, service):
        client, _, short_id = service
        client.post("/api/v1/collections/shorttest")
        resp = client.post(
            "/api/v1/videos",
            json={"id_or_url": short_id, "collection": "shorttest"},
        )
        job, _ = wait_for_job(client, resp.json()["job_id"])
        assert job["state"] == "failed"
        assert job["error"]["code"] == "too-short"

    def test_malformed_id_rejected_upfront(self, service):
        client, _, _ = service
        resp = client.post(
            "/api/v1/videos",
            json={"id_or_url": "definitely not an id", "collection": DEMO_COLLECTION},
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "invalid-id"

    def test_submit_to_default_collection_forbidden(self, service):
        client, extra_id, _ = service
        resp = client.post(
            "/api/v1/videos",
            json={"id_or_url": extra_id, "collection": DEMO_COLLECTION},
        )
        assert resp.status_code == 403


class TestSeries:
    def test_forecast_close_on_noiseless_video(self, service):
        client, _, _ = service
        vid = "demo0000000"
        body = client.get(f"/api/v1/videos/{vid}/series",
                          params={"forecast_from": 90, "to": 120}).json()
        observed = np.array(body["observed_views"])
        forecasted = np.array(body["forecast_views"])
        assert len(forecasted) == 30
        denom = np.maximum(observed[90:120], 1.0)
        day_mape = 100.0 * np.mean(np.abs(forecasted - observed[90:120]) / denom)
        assert day_mape <= 1.0
        fitted = np.array(body["fitted_views"])
        assert len(fitted) == 90

    def test_empty_forecast_window(self, service):
        client, _, _ = service
        body = client.get("/api/v1/videos/demo0000000/series",
                          params={"forecast_from": 120, "to": 120}).json()
        assert body["forecast_views"] == []

    def test_window_out_of_range(self, service):
        client, _, _ = service
        resp = client.get("/api/v1/videos/demo0000000/series",
                          params={"forecast_from": 90, "to": 400})
        assert resp.status_code == 422
        assert resp.json()["code"] == "window-out-of-range"

    def test_unknown_video_404(self, service):
        client, _, _ = service
        assert client.get("/api/v1/videos/nosuchvid11/series").status_code == 404

    def test_metadata_endpoint(self, service):
        client, _, _ = service
        body = client.get("/api/v1/videos/demo0000000").json()
        assert body["fitted"]
        assert set(body["params"]) == {"mu", "C", "c", "theta"}
        assert body["title"]


class TestSimulatePromotion:
    def test_volume_zero_no_increment(self, service):
        client, _, _ = service
        body = client.post("/api/v1/videos/demo0000000/simulate-promotion",
                           json={"volume": 0.0}).json()
        assert body["incremental_total"] == 0.0
        assert len(body["promoted_views"]) == 120

    def test_roi_matches_impulse_superposition(self, service):
        client, _, _ = service
        meta = client.get("/api/v1/videos/demo0000000").json()
        volume = 50.0
        body = client.post("/api/v1/videos/demo0000000/simulate-promotion",
                           json={"volume": volume}).json()
        mu = meta["params"]["mu"]
        from hipengine.hip_core import HipParams
        A = impulse_response(HipParams(**meta["params"])).total
        assert body["incremental_total"] == pytest.approx(mu * A * volume, rel=0.01)
        assert body["projected_point"]["views_total"] > meta["views_total"]

    def test_stateless_and_repeatable(self, service):
        client, _, _ = service
        before = client.get(f"/api/v1/collections/{DEMO_COLLECTION}/map").text
        b1 = client.post("/api/v1/videos/demo0000001/simulate-promotion",
                         json={"volume": 25.0}).text
        b2 = client.post("/api/v1/videos/demo0000001/simulate-promotion",
                         json={"volume": 25.0}).text
        assert b1 == b2
        after = client.get(f"/api/v1/collections/{DEMO_COLLECTION}/map").text
        assert before == after

    def test_demotion_overflow(self, service):
        client, _, _ = service
        resp = client.post("/api/v1/videos/demo0000000/simulate-promotion",
                           json={"volume": -1e9})
        assert resp.status_code == 422
        assert resp.json()["code"] == "demotion-overflow"

    def test_moderate_demotion_allowed(self, service):
        client, _, _ = service
        body = client.post("/api/v1/videos/demo0000000/simulate-promotion",
                           json={"volume": -0.5}).json()
        assert body["incremental_total"] < 0
