"""JSON-over-HTTP facade for the advisor and table generation.

Versioned under /api/v1; handlers are stateless and the engine is pure,
so requests never interact.  Error mapping: 400 for malformed bodies
(bad JSON or wrong shape), 422 for well-formed but impossible states
(shoe underflow, terminal hands), 404 for unknown table ids, 500 for
anything unexpected.  A built web UI directory can be mounted at /.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import Body, FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .exact import ShoeTooSmallError
from .scenario import (
    InconsistentStateError,
    StateParseError,
    change_on_14_comparison,
    evaluate_actions,
    parse_observed_state,
    recommend,
)
from .tables import build_table


def _eval_payload(payload: dict) -> dict:
    state, options = parse_observed_state(payload)
    evals = evaluate_actions(
        state, source=options["source"], opponent_model=options["opponent_model"]
    )
    best = recommend(evals)
    response = {
        "request_id": payload.get("request_id"),
        "engine_version": __version__,
        "source": options["source"],
        "opponent_model": options["opponent_model"],
        "evaluations": [
            {
                "action": e.action.value,
                "win": float(e.win),
                "tie": float(e.tie),
                "tie_breakdown": {str(m): float(p) for m, p in sorted(e.tie_breakdown.items())},
                "lose": float(e.lose),
                "rank": e.recommendation_rank,
            }
            for e in evals
        ],
        "recommendation": best.value,
    }
    if state.my_hand.total == 14 and state.rules.change_on_14_allowed:
        cont, restart = change_on_14_comparison(state, state.my_policy.stand_on)
        response["change14_comparison"] = {
            "stand_on": state.my_policy.stand_on,
            "continue": float(cont),
            "restart": float(restart),
        }
    return response


def create_app(cors_origins: list[str] | None = None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="einz advisor", version=__version__, docs_url=None, redoc_url=None)
    origins = cors_origins or [o for o in os.environ.get("EINZ_CORS_ORIGINS", "*").split(",") if o]
    app.add_middleware(
        CORSMiddleware,
        allow_origins=origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_, exc: RequestValidationError):
        # bad JSON or a non-object body: a parse problem, not a state problem
        return JSONResponse({"error": f"malformed request body: {exc.errors()[0].get('msg', 'invalid')}"},
                            status_code=400)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    # sync handlers run on the framework's bounded worker pool, which caps
    # how many heavy evaluations execute concurrently
    @app.post("/api/v1/evaluate")
    def evaluate(payload: dict = Body(...)):
        try:
            return _eval_payload(payload)
        except StateParseError as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        except (InconsistentStateError, ShoeTooSmallError) as e:
            return JSONResponse({"error": str(e)}, status_code=422)

    @app.get("/api/v1/tables/{table_id}")
    def table(table_id: int, decks: int = 1, source: str = "exact"):
        if table_id not in range(1, 7):
            return JSONResponse({"error": f"unknown table id {table_id}"}, status_code=404)
        try:
            data = build_table(table_id, decks=decks, source=source)
        except ValueError as e:
            return JSONResponse({"error": str(e)}, status_code=422)
        return {
            "id": data.id,
            "title": data.title,
            "source": data.source,
            "decks": data.decks,
            "columns": data.columns,
            "rows": data.rows,
            "values": [[None if v is None else float(v) for v in row] for row in data.values],
            "notes": data.notes,
            "engine_version": __version__,
        }

    static = static_dir or os.environ.get("EINZ_STATIC_DIR")
    if static is None:
        bundled = Path.cwd() / "frontend" / "dist"
        static = str(bundled) if bundled.is_dir() else None
    if static and Path(static).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static, html=True), name="ui")

    return app
