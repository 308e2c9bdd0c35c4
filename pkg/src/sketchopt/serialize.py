"""JSON document encoding, decoding, and schema validation.

Four flat-file documents form the stage boundaries of the pipeline:
scene.json (vectorizer output), model.json (parametrizer output), opt.json
(optimizer configuration), and session.json (the persisted optimization
record). Every document validates against a JSON Schema shipped with the
package, and encoding is canonical (sorted keys, fixed separators) so
equal inputs produce byte-identical files.

Coordinates are sketch pixels, y-down; the SVG renderer flips to y-up.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

import jsonschema

from .annotation import AnnotationMark, DesignVariable
from .errors import SchemaError
from .model import ParametricModel
from .nsga2 import GenerationSnapshot, Individual, OptConfig, ParetoFront
from .objective import ObjectiveVector
from .parametrizer import ParametricGraph, WallAxis
from .vectorizer import LineSegment, VectorScene

TOOL_VERSION = "0.1.0"

_SCHEMA_CACHE: dict[str, dict] = {}


def _schema(name: str) -> dict:
    if name not in _SCHEMA_CACHE:
        text = (
            resources.files("sketchopt.schemas").joinpath(f"{name}.json").read_text()
        )
        _SCHEMA_CACHE[name] = json.loads(text)
    return _SCHEMA_CACHE[name]


def validate_document(doc: dict, schema_name: str) -> None:
    try:
        jsonschema.validate(doc, _schema(schema_name))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"{schema_name}.json: {exc.message}") from exc


def dump_document(doc: dict, path: str | Path, schema_name: str) -> None:
    validate_document(doc, schema_name)
    Path(path).write_text(encode_document(doc))


def encode_document(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def load_document(path: str | Path, schema_name: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot parse {path}: {exc}") from exc
    validate_document(doc, schema_name)
    return doc


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- scene ------------------------------------------------------------------


def scene_to_doc(scene: VectorScene) -> dict:
    return {
        "image_size": list(scene.image_size),
        "luminosity_range": scene.luminosity_range,
        "provenance": scene.provenance,
        "segments": [
            {
                "p0": list(seg.p0),
                "p1": list(seg.p1),
                "gain": seg.gain,
                "width_estimate": seg.width_estimate,
            }
            for seg in scene.segments
        ],
    }


def scene_from_doc(doc: dict) -> VectorScene:
    return VectorScene(
        segments=tuple(
            LineSegment(
                p0=tuple(s["p0"]),
                p1=tuple(s["p1"]),
                gain=s["gain"],
                width_estimate=s["width_estimate"],
            )
            for s in doc["segments"]
        ),
        image_size=tuple(doc["image_size"]),
        luminosity_range=doc["luminosity_range"],
        provenance=doc.get("provenance", {}),
    )


# -- model ------------------------------------------------------------------


def _segment_to_doc(seg: LineSegment) -> dict:
    return {
        "p0": list(seg.p0),
        "p1": list(seg.p1),
        "gain": seg.gain,
        "width_estimate": seg.width_estimate,
    }


def _segment_from_doc(doc: dict) -> LineSegment:
    return LineSegment(
        p0=tuple(doc["p0"]),
        p1=tuple(doc["p1"]),
        gain=doc["gain"],
        width_estimate=doc["width_estimate"],
    )


def _mark_to_doc(mark: AnnotationMark) -> dict:
    return {
        "stem_p0": list(mark.stem_p0),
        "stem_p1": list(mark.stem_p1),
        "caps": [_segment_to_doc(c) for c in mark.caps],
    }


def _mark_from_doc(doc: dict) -> AnnotationMark:
    return AnnotationMark(
        stem_p0=tuple(doc["stem_p0"]),
        stem_p1=tuple(doc["stem_p1"]),
        caps=tuple(_segment_from_doc(c) for c in doc["caps"]),
    )


def model_to_doc(model: ParametricModel) -> dict:
    g = model.graph
    return {
        "snap_tol": g.snap_tol,
        "nodes": [
            {"id": nid, "x": pos[0], "y": pos[1]}
            for nid, pos in sorted(g.nodes.items())
        ],
        "edges": [
            {"id": eid, "a": e[0], "b": e[1], "kind": e[2]}
            for eid, e in sorted(g.edges.items())
        ],
        "axes": [
            {
                "id": axis.id,
                "direction": list(axis.direction),
                "anchor": list(axis.anchor),
                "nodes": list(axis.node_ids),
                "edges": list(axis.edge_ids),
            }
            for axis in sorted(g.axes.values(), key=lambda a: a.id)
        ],
        "groups": [
            {"id": gid, "criterion": crit, "nodes": list(members)}
            for gid, (crit, members) in sorted(g.groups.items())
        ],
        "variables": [
            {
                "id": v.id,
                "axis_id": v.axis_id,
                "lo": v.lo,
                "hi": v.hi,
                "mark": _mark_to_doc(v.source_mark) if v.source_mark else None,
            }
            for v in sorted(model.variables, key=lambda v: v.id)
        ],
        "warnings": list(model.warnings),
        "provenance": model.provenance,
    }


def model_from_doc(doc: dict) -> ParametricModel:
    nodes = {n["id"]: (n["x"], n["y"]) for n in doc["nodes"]}
    edges = {e["id"]: (e["a"], e["b"], e["kind"]) for e in doc["edges"]}
    axes = {
        a["id"]: WallAxis(
            id=a["id"],
            direction=tuple(a["direction"]),
            anchor=tuple(a["anchor"]),
            node_ids=tuple(a["nodes"]),
            edge_ids=tuple(a["edges"]),
        )
        for a in doc["axes"]
    }
    groups = {
        grp["id"]: (grp["criterion"], tuple(grp["nodes"])) for grp in doc["groups"]
    }
    graph = ParametricGraph(
        nodes=nodes,
        edges=edges,
        axes=axes,
        groups=groups,
        snap_tol=doc["snap_tol"],
    )
    variables = tuple(
        DesignVariable(
            id=v["id"],
            axis_id=v["axis_id"],
            lo=v["lo"],
            hi=v["hi"],
            source_mark=_mark_from_doc(v["mark"]) if v.get("mark") else None,
        )
        for v in doc["variables"]
    )
    return ParametricModel(
        graph=graph,
        variables=variables,
        warnings=tuple(doc.get("warnings", ())),
        provenance=doc.get("provenance", {}),
    )


# -- optimizer config -------------------------------------------------------


def opt_config_to_doc(config: OptConfig, area_target: float | None = None) -> dict:
    doc = {
        "population_size": config.population_size,
        "generations": config.generations,
        "crossover_prob": config.crossover_prob,
        "mutation_prob": config.mutation_prob,
        "eta_c": config.eta_c,
        "eta_m": config.eta_m,
        "seed": config.seed,
        "objectives": list(config.objectives),
    }
    if area_target is not None:
        doc["area_target"] = area_target
    return doc


def opt_config_from_doc(doc: dict) -> tuple[OptConfig, float | None]:
    config = OptConfig(
        population_size=doc.get("population_size", 40),
        generations=doc.get("generations", 60),
        crossover_prob=doc.get("crossover_prob", 0.9),
        mutation_prob=doc.get("mutation_prob"),
        eta_c=doc.get("eta_c", 20.0),
        eta_m=doc.get("eta_m", 20.0),
        seed=doc.get("seed", 0),
        objectives=tuple(doc.get("objectives", ("stress", "torsion"))),
    )
    return config, doc.get("area_target")


# -- session ----------------------------------------------------------------


def session_to_doc(
    model: ParametricModel,
    config: OptConfig,
    front: ParetoFront,
    history: list[GenerationSnapshot],
    provenance: dict,
    area_target: float | None = None,
) -> dict:
    return {
        "model": model_to_doc(model),
        "config": opt_config_to_doc(config, area_target),
        "objectives": list(config.objectives),
        "provenance": {"tool_version": TOOL_VERSION, **provenance},
        "generations": [
            {
                "index": s.index,
                "genomes": [list(g) for g in s.genomes],
                "objectives": [
                    list(o) if o is not None else None for o in s.objectives
                ],
                "ranks": list(s.ranks),
                "front_size": s.front_size,
                "hypervolume": s.hypervolume,
                "best": list(s.best),
            }
            for s in history
        ],
        "front": [
            {"genome": list(m.genome), "objectives": list(m.objectives.values)}
            for m in front.members
        ],
        "hypervolume_history": list(front.hypervolume_history),
    }


def session_from_doc(doc: dict) -> dict:
    """Decode a session into live objects; returns a plain dict bundle."""
    model = model_from_doc(doc["model"])
    config, area_target = opt_config_from_doc(doc["config"])
    labels = tuple(doc["objectives"])
    front = ParetoFront(
        members=tuple(
            Individual(
                genome=tuple(m["genome"]),
                objectives=ObjectiveVector(
                    labels=labels, values=tuple(m["objectives"])
                ),
                rank=0,
            )
            for m in doc["front"]
        ),
        hypervolume_history=tuple(doc.get("hypervolume_history", ())),
    )
    history = [
        GenerationSnapshot(
            index=s["index"],
            genomes=tuple(tuple(g) for g in s["genomes"]),
            objectives=tuple(
                tuple(o) if o is not None else None for o in s["objectives"]
            ),
            ranks=tuple(s["ranks"]),
            front_size=s["front_size"],
            hypervolume=s["hypervolume"],
            best=tuple(s["best"]),
        )
        for s in doc["generations"]
    ]
    return {
        "model": model,
        "config": config,
        "area_target": area_target,
        "front": front,
        "history": history,
        "provenance": doc.get("provenance", {}),
    }
