"""Batch interface: import, fit, forecast, simulate and export without the service.

Structured outputs are JSON, series and map tables are CSV. Every failure
exits nonzero with a single machine-parseable ``error: <code>: <message>``
line on stderr.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from . import hip_core, hip_fit
from .demo import seed_demo_collection
from .errors import HipError, WindowOutOfRange
from .hip_fit import FitConfig, FitResult
from .ingestion import import_series, validate_for_fit
from .series import DailySeries, SeriesKind
from .store import Store


def _fail(exc: HipError) -> None:
    click.echo(f"error: {exc.code}: {exc.message}", err=True)
    sys.exit(1)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _fit_json(result: FitResult) -> str:
    return json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"


@click.group()
def main():
    """Fit, forecast and explain daily video popularity."""


@main.command("import")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--collection", default=None, help="Also add the video to this collection.")
def import_cmd(input_path, data_dir, collection):
    """Validate a day,views,shares CSV and store it."""
    try:
        record = import_series(input_path)
        validate_for_fit(record)
        store = Store(data_dir)
        store.save_video(record)
        if collection:
            names = {c.name for c in store.list_collections()}
            if collection not in names:
                store.create_collection(collection)
            store.add_video(collection, record.video_id)
        click.echo(f"imported {record.video_id} ({len(record.views)} days)")
    except HipError as exc:
        _fail(exc)


@main.command("fit")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--train-days", default=90, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default=None, type=click.Path())
def fit_cmd(input_path, train_days, seed, out):
    """Fit model parameters on the training prefix of a series CSV."""
    try:
        record = import_series(input_path)
        cfg = FitConfig(train_days=train_days, total_days=max(train_days + 1, len(record.views)),
                        seed=seed)
        result = hip_fit.fit(record.views, record.shares, cfg)
        _emit(_fit_json(result), out)
        if out:
            click.echo(
                f"fit {record.video_id}: objective {result.objective_value:.6g}, "
                f"branching factor {result.branching_factor:.4f}"
            )
    except HipError as exc:
        _fail(exc)


@main.command("forecast")
@click.option("--fit", "fit_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--from", "from_day", default=90, show_default=True)
@click.option("--to", "to_day", default=120, show_default=True)
@click.option("--out", default=None, type=click.Path())
def forecast_cmd(fit_path, input_path, from_day, to_day, out):
    """Forecast views on [from, to) and score against observed overlap."""
    try:
        result = FitResult.from_dict(json.loads(Path(fit_path).read_text()))
        record = import_series(input_path)
        if from_day > len(record.views) or to_day > len(record.shares):
            raise WindowOutOfRange(
                f"window [{from_day}, {to_day}) beyond stored series of "
                f"{len(record.views)} days"
            )
        predicted = hip_fit.forecast(result, record.views, record.shares, from_day, to_day)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["day", "forecast_views"])
        for i, value in enumerate(predicted.values):
            writer.writerow([from_day + i, repr(float(value))])
        _emit(buf.getvalue(), out)
        overlap = min(to_day, len(record.views)) - from_day
        if overlap > 0:
            observed = DailySeries(record.views.values[from_day:from_day + overlap],
                                   SeriesKind.VIEWS)
            pred_overlap = DailySeries(predicted.values[:overlap], SeriesKind.VIEWS)
            click.echo(
                f"MAPE over [{from_day},{from_day + overlap}): "
                f"{hip_fit.mape(pred_overlap, observed):.4f}% "
                f"(aggregate {hip_fit.mape_aggregate(pred_overlap, observed):.4f}%)"
            )
    except HipError as exc:
        _fail(exc)


@main.command("simulate-promotion")
@click.option("--fit", "fit_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--volume", required=True, type=float)
@click.option("--days", default=90, show_default=True)
@click.option("--horizon", default=120, show_default=True)
@click.option("--out", default=None, type=click.Path())
def simulate_promotion_cmd(fit_path, input_path, volume, days, horizon, out):
    """Views under an even promotion schedule on top of the organic stimuli."""
    try:
        result = FitResult.from_dict(json.loads(Path(fit_path).read_text()))
        record = import_series(input_path)
        if horizon > len(record.shares):
            raise WindowOutOfRange(
                f"horizon {horizon} beyond stored series of {len(record.shares)} days"
            )
        promo = hip_core.even_schedule(volume, days)
        promoted = hip_core.promoted_series(result.params, record.shares, promo, horizon)
        incremental = hip_core.promotion_total_views(result.params, promo)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["day", "promoted_views"])
        for day, value in enumerate(promoted.values):
            writer.writerow([day, repr(float(value))])
        _emit(buf.getvalue(), out)
        click.echo(f"incremental total views: {incremental:.6g}")
    except HipError as exc:
        _fail(exc)


@main.command("map-export")
@click.option("--collection", required=True)
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--out", default=None, type=click.Path())
def map_export_cmd(collection, data_dir, out):
    """Export the endo-exo map of a collection as CSV."""
    try:
        store = Store(data_dir)
        points, pending = store.endo_exo_points(collection)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([
            "video_id", "exo_sensitivity", "endo_response", "viral_potential",
            "views_total", "shares_total", "views_percentile", "shares_percentile",
            "supercritical_flag",
        ])
        for p in points:
            writer.writerow([
                p.video_id, repr(p.exo_sensitivity), repr(p.endo_response),
                repr(p.viral_potential), repr(p.views_total), repr(p.shares_total),
                repr(p.views_percentile), repr(p.shares_percentile),
                int(p.supercritical_flag),
            ])
        _emit(buf.getvalue(), out)
        if pending:
            click.echo(f"pending (unfitted): {','.join(pending)}", err=True)
    except HipError as exc:
        _fail(exc)


@main.command("seed-demo")
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--fixture-dir", required=True, type=click.Path())
@click.option("--count", default=6, show_default=True)
def seed_demo_cmd(data_dir, fixture_dir, count):
    """Generate and fit the synthetic demo collection."""
    try:
        ids = seed_demo_collection(Store(data_dir), Path(fixture_dir), count)
        click.echo(f"seeded demo collection with {len(ids)} videos")
    except HipError as exc:
        _fail(exc)


@main.command("serve")
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--fixture-dir", default=None, type=click.Path())
@click.option("--remote-config", default=None, type=click.Path(exists=True))
@click.option("--static-dir", default=None, type=click.Path())
@click.option("--port", default=8080, show_default=True)
@click.option("--workers", default=2, show_default=True)
@click.option("--seed-demo/--no-seed-demo", "seed_demo", default=False)
def serve_cmd(data_dir, fixture_dir, remote_config, static_dir, port, workers, seed_demo):
    """Launch the HTTP JSON API (and the web UI when --static-dir is given)."""
    import uvicorn

    from .ingestion import RemoteConfig
    from .service import ServiceConfig, create_app

    try:
        remote = RemoteConfig.from_file(remote_config) if remote_config else None
        if seed_demo:
            fixture_dir = fixture_dir or str(Path(data_dir) / "fixtures")
            seed_demo_collection(Store(data_dir), Path(fixture_dir))
        config = ServiceConfig(
            data_dir=Path(data_dir),
            fixture_dir=Path(fixture_dir) if fixture_dir else None,
            remote=remote,
            workers=workers,
            static_dir=Path(static_dir) if static_dir else None,
        )
        app = create_app(config)
    except HipError as exc:
        _fail(exc)
    uvicorn.run(app, host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
