"""Command-line interface: sketch in, Pareto front out.

Stages talk through flat JSON documents (scene.json, model.json,
opt.json, session.json) so each can run and be inspected independently:

    sketchopt vectorize sketch.png --out scene.json
    sketchopt parametrize scene.json --out model.json
    sketchopt optimize model.json --config opt.json --out session.json
    sketchopt render model.json --vars 0,12.5,-3 --out layout.svg
    sketchopt run sketch.png --seed 42 --out results/
    sketchopt serve results/session.json --port 8000
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .errors import SketchOptError
from .model import Parametrizer
from .nsga2 import OptConfig
from .pipeline import (
    run_full,
    run_optimize,
    run_parametrize,
    run_render,
    run_vectorize,
)
from .vectorizer import Vectorizer


def _fail(exc: BaseException) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Sketch-based parametric floorplan optimization."""


@main.command()
@click.argument("input_image", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", default="scene.json", show_default=True)
@click.option("--threshold", type=float, default=5e-4, show_default=True,
              help="Detection threshold as a fraction of the luminosity range.")
@click.option("--levels", type=int, default=5, show_default=True)
@click.option("--orientations", type=int, default=16, show_default=True)
@click.option("--min-length", type=float, default=8.0, show_default=True)
@click.option("--snap-tol-deg", type=float, default=5.0, show_default=True,
              help="Snap near-axis-aligned segments to 0/90 degrees (0 disables).")
def vectorize(input_image, out, threshold, levels, orientations, min_length,
              snap_tol_deg):
    """Detect line segments in a raster sketch."""
    vec = Vectorizer(
        levels=levels,
        orientations=orientations,
        threshold_fraction=threshold,
        min_length=min_length,
        snap_tol_deg=snap_tol_deg,
    )
    try:
        doc = run_vectorize(input_image, out, vec)
    except SketchOptError as exc:
        _fail(exc)
    click.echo(f"{out}: {len(doc['segments'])} segments")


def _parse_var(spec: str) -> tuple[int, float, float]:
    fields = dict(part.split("=", 1) for part in spec.split(","))
    try:
        return int(fields["axis"]), float(fields["lo"]), float(fields["hi"])
    except (KeyError, ValueError) as exc:
        raise click.BadParameter(
            f"expected axis=<id>,lo=<v>,hi=<v>, got {spec!r}"
        ) from exc


@main.command()
@click.argument("scene", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", default="model.json", show_default=True)
@click.option("--snap-tol", type=float, default=4.0, show_default=True)
@click.option("--search-radius", type=float, default=40.0, show_default=True,
              help="Annotation-to-axis binding radius in pixels.")
@click.option("--var", "var_specs", multiple=True,
              help="Manual variable override: axis=<id>,lo=<v>,hi=<v>. "
                   "Replaces any automatic binding on that axis; ids are "
                   "renumbered afterwards.")
def parametrize(scene, out, snap_tol, search_radius, var_specs):
    """Build the constrained parametric model from a scene."""
    overrides = [_parse_var(v) for v in var_specs]
    par = Parametrizer(snap_tol=snap_tol, search_radius=search_radius)
    try:
        doc = run_parametrize(scene, out, par, var_overrides=overrides or None)
    except SketchOptError as exc:
        _fail(exc)
    click.echo(
        f"{out}: {len(doc['nodes'])} nodes, {len(doc['edges'])} edges, "
        f"{len(doc['axes'])} axes, {len(doc['variables'])} variables"
    )


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", default="session.json", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="opt.json configuration document.")
@click.option("--seed", type=int, default=None, help="Override the RNG seed.")
@click.option("--population", type=int, default=None)
@click.option("--generations", type=int, default=None)
@click.option("--quiet", is_flag=True, help="Suppress per-generation progress.")
def optimize(model, out, config_path, seed, population, generations, quiet):
    """Run NSGA-II over the model's design variables."""
    config = None
    if config_path is None:
        config = OptConfig(
            population_size=population or 40,
            generations=generations if generations is not None else 60,
        )
    try:
        doc = run_optimize(
            model, out, config=config, opt_path=config_path, seed=seed,
            quiet=quiet,
        )
    except SketchOptError as exc:
        _fail(exc)
    click.echo(f"{out}: front size {len(doc['front'])}")


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", default="layout.svg", show_default=True)
@click.option("--vars", "vars_csv", default="",
              help="Comma-separated variable values in ascending id order "
                   "(empty: the as-drawn layout).")
def render(model, out, vars_csv):
    """Instantiate an assignment and write the layout SVG."""
    values = [float(v) for v in vars_csv.split(",") if v != ""]
    try:
        run_render(model, out, values)
    except SketchOptError as exc:
        _fail(exc)
    click.echo(out)


@main.command()
@click.argument("input_image", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", "out_dir", default="sketchopt_out", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--population", type=int, default=40, show_default=True)
@click.option("--generations", type=int, default=60, show_default=True)
@click.option("--no-gallery", is_flag=True, help="Skip front SVG rendering.")
@click.option("--quiet", is_flag=True)
def run(input_image, out_dir, config_path, seed, population, generations,
        no_gallery, quiet):
    """Full pipeline: vectorize, parametrize, optimize, render the front."""
    config = None
    if config_path is None:
        config = OptConfig(population_size=population, generations=generations)
    try:
        doc = run_full(
            input_image,
            out_dir,
            config=config,
            opt_path=config_path,
            seed=seed,
            gallery=not no_gallery,
            quiet=quiet,
        )
    except SketchOptError as exc:
        _fail(exc)
    click.echo(
        f"{out_dir}: session with {len(doc['front'])} front members, "
        f"{len(doc['generations'])} generation snapshots"
    )


@main.command()
@click.argument("session", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", type=click.Path(exists=True),
              help="Override the model embedded in the session.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--assets", type=click.Path(exists=True, file_okay=False),
              help="Static explorer assets directory.")
def serve(session, model_path, port, host, assets):
    """Serve the read-only exploration API over a session document."""
    import uvicorn

    from .pipeline import load_session
    from .serialize import load_document, model_from_doc

    try:
        sess, doc = load_session(session)
        model = sess.model
        if model_path is not None:
            model = model_from_doc(load_document(model_path, "model"))
    except SketchOptError as exc:
        _fail(exc)
    from .service import create_app

    app = create_app(
        doc,
        model,
        sess.config,
        area_target=sess.area_target,
        assets_dir=assets,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
