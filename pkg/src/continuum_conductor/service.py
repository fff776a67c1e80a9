"""Local HTTP/JSON API over the engine, plus static hosting for the web UI.

Sessions are in-memory and independent of each other; every response is
reproducible by calling the underlying module operations with the same
inputs. The service binds localhost by default and carries no auth: it is
a single-operator desk tool.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from . import fixtures
from .conductor import (
    Assessment,
    Phase,
    PhaseVerdict,
    assessment_from_json,
    catalog_to_json,
    decide_all,
    verdict_to_json,
)
from .errors import (
    ConductorError,
    InputError,
    InsufficientCapacity,
    SeedMismatch,
    UnresolvedConflict,
)
from .placement import PlacementPlan, all_cloud_variant, plan_from_verdicts, plan_to_json
from .scenario import config_from_json, generate_scenario
from .simulator import SimMetrics, compare, comparison_to_json, metrics_to_json, run_scenario


@dataclass
class SessionState:
    assessment: Assessment | None = None
    verdicts: dict[Phase, PhaseVerdict] | None = None
    plan: PlacementPlan | None = None
    runs: list[SimMetrics] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _hints_json(hints) -> list[dict]:
    return [{"kind": h.kind.value, "text": h.text} for h in hints]


def create_app(static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="continuum-conductor", docs_url=None, redoc_url=None)
    sessions: dict[str, SessionState] = {}
    registry_lock = threading.Lock()

    def session_of(session_id: str, create: bool = False) -> SessionState:
        with registry_lock:
            if session_id not in sessions:
                if not create:
                    raise HTTPException(404, detail=f"unknown session {session_id!r}")
                sessions[session_id] = SessionState()
            return sessions[session_id]

    @app.get("/api/catalog")
    def get_catalog() -> list[dict]:
        return catalog_to_json()

    @app.get("/api/fixtures")
    def get_fixtures() -> dict:
        return fixtures.fixture_payloads()

    @app.put("/api/session/{session_id}/answers")
    def put_answers(session_id: str, payload: Any = Body(...)) -> dict:
        record = {"answers": payload} if isinstance(payload, list) else payload
        if not isinstance(record, dict):
            raise HTTPException(400, detail="body must be an answer list or object")
        try:
            assessment = assessment_from_json(record)
        except (ConductorError, ValueError, KeyError, TypeError) as exc:
            raise HTTPException(400, detail=f"bad answers: {exc}") from exc
        state = session_of(session_id, create=True)
        with state.lock:
            state.assessment = assessment
            state.verdicts = decide_all(assessment)
            state.plan = None
            return {
                "session": session_id,
                "verdicts": [verdict_to_json(state.verdicts[p]) for p in Phase],
            }

    @app.post("/api/session/{session_id}/plan")
    def post_plan(session_id: str) -> dict:
        state = session_of(session_id)
        with state.lock:
            if state.verdicts is None:
                raise HTTPException(400, detail="no answers submitted yet")
            topology = fixtures.port_topology()
            try:
                plan = plan_from_verdicts(
                    state.verdicts,
                    topology,
                    fixtures.port_demands(),
                    preprocess=fixtures.port_preprocess_config(),
                    rules=fixtures.port_rules(),
                    watermark=20.0,
                )
            except UnresolvedConflict as exc:
                raise HTTPException(
                    409,
                    detail={
                        "error": "unresolved-conflict",
                        "message": str(exc),
                        "phases": [p.key for p in exc.phases],
                        "hints": _hints_json(exc.hints),
                    },
                ) from exc
            except InsufficientCapacity as exc:
                raise HTTPException(
                    409,
                    detail={
                        "error": "insufficient-capacity",
                        "message": str(exc),
                        "hints": _hints_json(exc.hints),
                    },
                ) from exc
            state.plan = plan
            return plan_to_json(plan)

    @app.post("/api/session/{session_id}/run")
    def post_run(session_id: str, payload: dict = Body(default={})) -> dict:
        state = session_of(session_id)
        with state.lock:
            variant = payload.get("plan", "derived")
            if variant not in ("derived", "all-cloud"):
                raise HTTPException(400, detail=f"unknown plan variant {variant!r}")
            if state.plan is None:
                raise HTTPException(400, detail="no plan derived yet")
            plan = state.plan if variant == "derived" else all_cloud_variant(state.plan)

            scenario_spec = payload.get("scenario", "port")
            if scenario_spec == "port":
                config = fixtures.port_scenario_config()
            elif isinstance(scenario_spec, dict):
                try:
                    config = config_from_json(scenario_spec)
                except InputError as exc:
                    raise HTTPException(400, detail=str(exc)) from exc
            else:
                raise HTTPException(404, detail=f"unknown scenario {scenario_spec!r}")

            topology = fixtures.port_topology()
            skews = {n.node_id: n.clock_skew for n in topology.nodes}
            scenario = generate_scenario(config, skews)
            _, metrics = run_scenario(plan, scenario, topology)
            state.runs.append(metrics)
            if len(state.runs) > 2:
                del state.runs[0]
            return metrics_to_json(metrics)

    @app.get("/api/session/{session_id}/compare")
    def get_compare(session_id: str) -> dict:
        state = session_of(session_id)
        with state.lock:
            if len(state.runs) < 2:
                raise HTTPException(400, detail="need two runs to compare")
            try:
                report = compare(state.runs[0], state.runs[1])
            except SeedMismatch as exc:
                raise HTTPException(409, detail=str(exc)) from exc
            return comparison_to_json(report)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
