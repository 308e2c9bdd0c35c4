"""Stage orchestration: sketch in, scene/model/session documents out.

Each stage reads and writes flat JSON documents so stages can run
independently, and the end-to-end runner chains the same stage functions
over intermediate files; given equal seeds and parameters, the chained
and end-to-end paths produce byte-identical session documents.
"""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .annotation import DesignVariable
from .errors import ConfigError, SketchOptError
from .model import ParametricModel, Parametrizer
from .nsga2 import GenerationSnapshot, OptConfig, ParetoFront, evolve
from .objective import build_registry
from .raster import load_raster
from .render import write_layout_svg
from .serialize import (
    dump_document,
    encode_document,
    load_document,
    model_from_doc,
    model_to_doc,
    opt_config_from_doc,
    scene_from_doc,
    scene_to_doc,
    session_to_doc,
    sha256_file,
)
from .vectorizer import Vectorizer


@dataclass(frozen=True)
class Session:
    """The full optimization record bound to its source model."""

    model: ParametricModel
    config: OptConfig
    front: ParetoFront
    history: list[GenerationSnapshot]
    provenance: dict
    area_target: float | None = None

    def validate(self) -> None:
        bounds = self.model.bounds()
        for snap in self.history:
            for genome in snap.genomes:
                for v, (lo, hi) in zip(genome, bounds):
                    if not lo <= v <= hi:
                        raise ConfigError(
                            f"generation {snap.index}: gene {v} outside "
                            f"[{lo}, {hi}]"
                        )
        if self.history:
            final = {tuple(g) for g in self.history[-1].genomes}
            for member in self.front.members:
                if tuple(member.genome) not in final:
                    raise ConfigError(
                        "front member missing from the final generation"
                    )


def load_session(path: str | Path) -> tuple[Session, dict]:
    """Load and validate a session document; returns (Session, raw doc)."""
    from .serialize import session_from_doc

    doc = load_document(path, "session")
    bundle = session_from_doc(doc)
    session = Session(
        model=bundle["model"],
        config=bundle["config"],
        front=bundle["front"],
        history=bundle["history"],
        provenance=bundle["provenance"],
        area_target=bundle["area_target"],
    )
    session.validate()
    return session, doc


def run_vectorize(
    input_path: str | Path,
    out_path: str | Path,
    vectorizer: Vectorizer | None = None,
) -> dict:
    """Vectorize a raster sketch and write scene.json."""
    vectorizer = vectorizer or Vectorizer()
    image = load_raster(input_path)
    scene = vectorizer.transform(image)
    provenance = dict(scene.provenance)
    provenance["source"] = str(input_path)
    provenance["source_sha256"] = sha256_file(input_path)
    scene = type(scene)(
        segments=scene.segments,
        image_size=scene.image_size,
        luminosity_range=scene.luminosity_range,
        provenance=provenance,
    )
    doc = scene_to_doc(scene)
    dump_document(doc, out_path, "scene")
    return doc


def run_parametrize(
    scene_path: str | Path,
    out_path: str | Path,
    parametrizer: Parametrizer | None = None,
    var_overrides: list[tuple[int, float, float]] | None = None,
) -> dict:
    """Build the parametric model from scene.json and write model.json.

    var_overrides entries (axis_id, lo, hi) mirror the manual workflow:
    they replace an automatic binding on that axis or add a new variable.
    """
    parametrizer = parametrizer or Parametrizer()
    scene = scene_from_doc(load_document(scene_path, "scene"))
    model = parametrizer.transform(scene)
    if var_overrides:
        axes_used = [a for a, _, _ in var_overrides]
        if len(set(axes_used)) != len(axes_used):
            raise ConfigError("duplicate --var override for one axis")
        variables = [
            v for v in model.variables
            if v.axis_id not in {axis for axis, _, _ in var_overrides}
        ]
        for axis_id, lo, hi in var_overrides:
            if axis_id not in model.graph.axes:
                raise ConfigError(f"--var references unknown axis {axis_id}")
            variables.append(
                DesignVariable(
                    id=-1, axis_id=axis_id, lo=lo, hi=hi, source_mark=None
                )
            )
        variables.sort(key=lambda v: (v.axis_id,))
        variables = [
            DesignVariable(
                id=i,
                axis_id=v.axis_id,
                lo=v.lo,
                hi=v.hi,
                source_mark=v.source_mark,
            )
            for i, v in enumerate(variables)
        ]
        model = ParametricModel(
            graph=model.graph,
            variables=tuple(variables),
            warnings=model.warnings,
            provenance=model.provenance,
        )
    doc = model_to_doc(model)
    dump_document(doc, out_path, "model")
    for warning in model.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return doc


def run_optimize(
    model_path: str | Path,
    out_path: str | Path,
    config: OptConfig | None = None,
    opt_path: str | Path | None = None,
    seed: int | None = None,
    area_target: float | None = None,
    quiet: bool = False,
) -> dict:
    """Optimize a model's design variables and write session.json."""
    model_doc = load_document(model_path, "model")
    model = model_from_doc(model_doc)
    if config is None:
        if opt_path is not None:
            config, doc_target = opt_config_from_doc(
                load_document(opt_path, "opt")
            )
            area_target = area_target if area_target is not None else doc_target
        else:
            config = OptConfig()
    if seed is not None:
        config = replace(config, seed=seed)
    if not model.variables:
        raise ConfigError("model has no design variables; nothing to optimize")
    registry = build_registry(list(config.objectives), area_target=area_target)

    def report(snap: GenerationSnapshot) -> None:
        best = ", ".join(f"{v:.6g}" for v in snap.best)
        print(
            f"generation {snap.index}: front={snap.front_size} best=[{best}]",
            file=sys.stderr,
        )

    front, history = evolve(
        model.graph,
        list(model.variables),
        registry,
        config,
        progress=None if quiet else report,
    )
    model_sha = hashlib.sha256(
        encode_document(model_doc).encode()
    ).hexdigest()
    provenance = {"model_sha256": model_sha, "seed": config.seed}
    doc = session_to_doc(
        model, config, front, history, provenance, area_target=area_target
    )
    dump_document(doc, out_path, "session")
    return doc


def run_render(
    model_path: str | Path,
    out_path: str | Path,
    values: list[float] | None = None,
) -> None:
    """Instantiate an assignment and write the layout SVG."""
    model = model_from_doc(load_document(model_path, "model"))
    ordered = sorted(model.variables, key=lambda v: v.id)
    values = values or []
    if len(values) not in (0, len(ordered)):
        raise ConfigError(
            f"expected {len(ordered)} values (one per variable), got {len(values)}"
        )
    assignment = {v.id: val for v, val in zip(ordered, values)}
    layout = model.layout(assignment)
    write_layout_svg(out_path, layout, model)


def run_full(
    input_path: str | Path,
    out_dir: str | Path,
    config: OptConfig | None = None,
    opt_path: str | Path | None = None,
    seed: int | None = None,
    vectorizer: Vectorizer | None = None,
    parametrizer: Parametrizer | None = None,
    gallery: bool = True,
    quiet: bool = False,
) -> dict:
    """Full pipeline: vectorize, parametrize, optimize, render the front.

    Stage failures abort with a stage-tagged error. Intermediate documents
    land in out_dir, so the result is identical to chaining the stage
    commands by hand.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scene_path = out_dir / "scene.json"
    model_path = out_dir / "model.json"
    session_path = out_dir / "session.json"

    def staged(stage: str, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SketchOptError as exc:
            raise type(exc)(f"[{stage}] {exc}") from exc

    staged("vectorize", run_vectorize, input_path, scene_path, vectorizer)
    staged("parametrize", run_parametrize, scene_path, model_path, parametrizer)
    session_doc = staged(
        "optimize",
        run_optimize,
        model_path,
        session_path,
        config=config,
        opt_path=opt_path,
        seed=seed,
        quiet=quiet,
    )
    if gallery:
        model = model_from_doc(load_document(model_path, "model"))
        ordered = sorted(model.variables, key=lambda v: v.id)
        gallery_dir = out_dir / "front"
        gallery_dir.mkdir(exist_ok=True)
        for i, member in enumerate(session_doc["front"]):
            assignment = {
                v.id: val for v, val in zip(ordered, member["genome"])
            }
            layout = staged("render", model.layout, assignment)
            write_layout_svg(gallery_dir / f"member_{i:03d}.svg", layout, model)
    return session_doc
