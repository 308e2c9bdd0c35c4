"""Read-only HTTP service for interactive exploration of a session.

Endpoints:
  GET /api/session          the full session document
  GET /api/layout?vars=...  server-side instantiation of an assignment:
                            layout polylines plus the objective vector
  GET /                     static explorer assets (or a built-in page)

All served state is immutable after load; there are no mutation
endpoints, so concurrent reads are safe and responses are pure functions
of the query.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import DegenerateLayoutError, RangeError
from .objective import build_registry, evaluate_objectives

FALLBACK_PAGE = """<!DOCTYPE html>
<html><head><title>sketchopt session</title></head>
<body>
<h1>sketchopt session service</h1>
<p>No explorer assets configured. The API is live:</p>
<ul>
<li><code>GET /api/session</code></li>
<li><code>GET /api/layout?vars=v1,...,vn</code></li>
</ul>
</body></html>
"""


def create_app(
    session_doc: dict,
    model,
    config,
    area_target: float | None = None,
    assets_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service over an already-loaded session."""
    app = FastAPI(title="sketchopt", docs_url=None, redoc_url=None)
    variables = sorted(model.variables, key=lambda v: v.id)
    registry = build_registry(list(config.objectives), area_target=area_target)
    assets = Path(assets_dir) if assets_dir else None

    @app.get("/api/session")
    def api_session():
        return JSONResponse(session_doc)

    @app.get("/api/layout")
    def api_layout(vars: str = Query(default="")):
        parts = [p for p in vars.split(",") if p != ""]
        if len(parts) != len(variables):
            return JSONResponse(
                {
                    "error": f"expected {len(variables)} comma-separated values, "
                    f"got {len(parts)}"
                },
                status_code=400,
            )
        try:
            values = [float(p) for p in parts]
        except ValueError:
            return JSONResponse(
                {"error": f"malformed vars parameter: {vars!r}"}, status_code=400
            )
        assignment = {v.id: val for v, val in zip(variables, values)}
        for v, val in zip(variables, values):
            if not (v.lo <= val <= v.hi):
                return JSONResponse(
                    {
                        "error": f"variable {v.id}: value {val} outside "
                        f"[{v.lo}, {v.hi}]"
                    },
                    status_code=400,
                )
        try:
            layout = model.layout(assignment)
        except (RangeError, DegenerateLayoutError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        objectives = evaluate_objectives(
            model.graph, list(variables), assignment, registry
        )
        return JSONResponse(
            {
                "assignment": {str(v.id): val for v, val in zip(variables, values)},
                "polylines": [
                    [[x, y] for x, y in line] for line in layout.polylines
                ],
                "node_positions": {
                    str(nid): [x, y]
                    for nid, (x, y) in sorted(layout.node_positions.items())
                },
                "objectives": {
                    "labels": list(objectives.labels),
                    "values": list(objectives.values)
                    if objectives.feasible
                    else None,
                },
            }
        )

    if assets is not None and (assets / "index.html").is_file():
        # Mounted last so /api/* keeps precedence.
        app.mount("/", StaticFiles(directory=assets, html=True), name="static")
    else:

        @app.get("/")
        def index():
            return HTMLResponse(FALLBACK_PAGE)

    return app
