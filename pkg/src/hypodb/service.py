"""HTTP/JSON service over the research store, for scripts and the web UI.

Mutating endpoints persist the store directory after each call, so the CLI
and the service can interleave on one store.  Long operations (synthesize,
condition) can be launched as tracked jobs and polled through /status.
"""

from __future__ import annotations

import os
import threading
import time
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .cli import _csv_out, rank_rows_to_table
from .errors import (
    DuplicateError,
    HypoDBError,
    ParseError,
    UnknownIdError,
    ValidationError,
)
from .ingest import TrialManifest
from .store import QuerySpec, Store

_STATUS_OF = [
    (DuplicateError, 409),
    (UnknownIdError, 404),
    (ParseError, 400),
    (ValidationError, 400),
    (HypoDBError, 422),
]


def _http_status(exc: HypoDBError) -> int:
    for cls, code in _STATUS_OF:
        if isinstance(exc, cls):
            return code
    return 422


class JobLog:
    def __init__(self):
        self._jobs: list[dict] = []
        self._lock = threading.Lock()

    def start(self, op: str, params: dict) -> dict:
        with self._lock:
            job = {
                "id": len(self._jobs) + 1,
                "op": op,
                "params": params,
                "status": "running",
                "started": time.time(),
                "result": None,
                "error": None,
            }
            self._jobs.append(job)
            return job

    def finish(self, job: dict, result: Any = None, error: dict | None = None) -> None:
        with self._lock:
            job["status"] = "failed" if error else "done"
            job["result"] = result
            job["error"] = error
            job["finished"] = time.time()

    def snapshot(self) -> list[dict]:
        with self._lock:
            return [dict(j) for j in self._jobs]

    def get(self, job_id: int) -> dict | None:
        with self._lock:
            for j in self._jobs:
                if j["id"] == job_id:
                    return dict(j)
        return None


def create_app(store_path: str) -> FastAPI:
    app = FastAPI(title="hypodb", version="0.1.0")
    if os.path.isfile(os.path.join(store_path, "registry.json")):
        store = Store.load(store_path)
    else:
        os.makedirs(store_path, exist_ok=True)
        store = Store()
        store.save(store_path)
    app.state.store = store
    app.state.store_path = store_path
    app.state.jobs = JobLog()

    @app.exception_handler(HypoDBError)
    async def _domain_error(request: Request, exc: HypoDBError):
        return JSONResponse(status_code=_http_status(exc), content=exc.to_payload())

    def _persist() -> None:
        store.save(store_path)

    # ------------------------------------------------------------- registry

    @app.get("/phenomena")
    def list_phenomena():
        return [
            {
                "phenomenon_id": phi,
                "description": desc,
                "observations": store.observations[phi].n_points
                if phi in store.observations else 0,
                "symbols": list(store.observations[phi].symbols)
                if phi in store.observations else [],
            }
            for phi, desc in sorted(store.phenomena.items())
        ]

    @app.post("/phenomena", status_code=201)
    def add_phenomenon(body: dict):
        if "phenomenon_id" not in body:
            raise ValidationError("body requires phenomenon_id")
        store.add_phenomenon(int(body["phenomenon_id"]), body.get("description", ""))
        _persist()
        return {"phenomenon_id": int(body["phenomenon_id"])}

    @app.get("/hypotheses")
    def list_hypotheses():
        return [
            {
                "hypothesis_id": ups,
                "name": h.name,
                "equations": len(h.structure.equations),
                "variables": len(h.structure.variables),
                "synthesized": ups in store.synthesis,
            }
            for ups, h in sorted(store.hypotheses.items())
        ]

    @app.post("/hypotheses", status_code=201)
    def add_hypothesis(body: dict):
        import json as _json

        name = body.pop("name", "")
        hyp = store.add_hypothesis(_json.dumps(body), name)
        sigma = store.encode(hyp.hypothesis_id)
        _persist()
        return {
            "hypothesis_id": hyp.hypothesis_id,
            "equations": len(hyp.structure.equations),
            "variables": len(hyp.structure.variables),
            "sigma": sigma.to_text(),
        }

    @app.get("/hypotheses/{upsilon}/encoding")
    def encoding(upsilon: int):
        return {"hypothesis_id": upsilon, "sigma": store.encode(upsilon).to_text()}

    @app.post("/hypotheses/{upsilon}/trials", status_code=201)
    def add_trial(upsilon: int, body: dict):
        manifest = TrialManifest(
            phenomenon_id=int(body["phenomenon_id"]),
            hypothesis_id=upsilon,
            trial_id=int(body["trial_id"]),
            mappings=tuple((k, v) for k, v in body.get("mappings", {}).items()),
        )
        rows = store.load_trial(manifest, body["csv"])
        pair = (manifest.phenomenon_id, upsilon)
        weight = body.get("weight")
        if weight is not None or pair not in store.explanations:
            store.record_explanation(*pair, 1.0 if weight is None else float(weight))
        _persist()
        return {"rows": rows, "trial_id": manifest.trial_id}

    @app.post("/phenomena/{phi}/observations", status_code=201)
    def add_observations(phi: int, body: dict):
        obs = store.load_observations(phi, body["csv"])
        _persist()
        return {"points": obs.n_points, "symbols": list(obs.symbols)}

    @app.get("/phenomena/{phi}/observations", response_class=PlainTextResponse)
    def get_observations(phi: int):
        obs = store.observations.get(phi)
        if obs is None:
            raise UnknownIdError(f"no observations loaded for phenomenon {phi}")
        lines = [",".join([obs.coordinate_name, *obs.symbols])]
        for i in range(obs.n_points):
            row = [repr(float(obs.coordinates[i]))]
            row += [repr(float(obs.values[s][i])) for s in obs.symbols]
            lines.append(",".join(row))
        return PlainTextResponse("\r\n".join(lines) + "\r\n", media_type="text/csv")

    # ------------------------------------------------------------- pipeline

    def _run_job(op: str, params: dict, fn):
        job = app.state.jobs.start(op, params)

        def body():
            try:
                result = fn()
                _persist()
                app.state.jobs.finish(job, result)
            except HypoDBError as exc:
                app.state.jobs.finish(job, error=exc.to_payload())

        thread = threading.Thread(target=body, daemon=True)
        thread.start()
        return job["id"]

    @app.post("/synthesize/{upsilon}")
    def synthesize(upsilon: int, background: bool = False):
        if upsilon not in store.hypotheses:
            raise UnknownIdError(f"unknown hypothesis {upsilon}")
        if background:
            job_id = _run_job(
                "synthesize", {"hypothesis_id": upsilon},
                lambda: store.synthesize_hypothesis(upsilon).report(),
            )
            return {"job_id": job_id}
        result = store.synthesize_hypothesis(upsilon)
        _persist()
        return result.report()

    @app.post("/condition/{phi}")
    def condition(phi: int, body: dict, background: bool = False):
        if "symbol" not in body or "sigma" not in body:
            raise ValidationError("body requires symbol and sigma")
        symbol = str(body["symbol"])
        sigma = float(body["sigma"])
        intersect = bool(body.get("intersect", False))
        if background:
            job_id = _run_job(
                "condition", {"phenomenon_id": phi, "symbol": symbol, "sigma": sigma},
                lambda: store.condition(phi, symbol, sigma, intersect).to_obj(),
            )
            return {"job_id": job_id}
        table = store.condition(phi, symbol, sigma, intersect)
        _persist()
        return table.to_obj()

    # ------------------------------------------------------------ analytics

    def _rank_rows(phi: int, at: str | None, symbol: str | None):
        at_pair = None
        if at:
            from .cli import _parse_filter

            attr, _, value = _parse_filter(at)
            at_pair = (attr, value)
        return store.rank(phi, at_pair, symbol)

    @app.get("/rank/{phi}")
    def rank(phi: int, at: str | None = None, symbol: str | None = None):
        rows = _rank_rows(phi, at, symbol)
        columns, table = rank_rows_to_table(rows)
        return {"columns": columns, "rows": table,
                "conditioned": phi in store.posteriors}

    @app.get("/rank/{phi}/csv", response_class=PlainTextResponse)
    def rank_csv(phi: int, at: str | None = None, symbol: str | None = None):
        rows = _rank_rows(phi, at, symbol)
        return PlainTextResponse(_csv_out(*rank_rows_to_table(rows)),
                                 media_type="text/csv")

    def _query_spec(projection: str, filter: list[str], order: str, group: str,
                    aggregate: str, columns: str) -> QuerySpec:
        from .cli import _parse_filter

        return QuerySpec(
            projection=projection,
            filters=[_parse_filter(f) for f in filter],
            order=[c for c in order.split(",") if c],
            group=[c for c in group.split(",") if c],
            aggregate=aggregate,
            columns=[c for c in columns.split(",") if c] or None,
        )

    @app.get("/query")
    def query(projection: str, filter: list[str] = Query(default=[]), order: str = "",
              group: str = "", aggregate: str = "none", columns: str = ""):
        cols, rows = store.query(
            _query_spec(projection, filter, order, group, aggregate, columns)
        )
        return {"columns": cols, "rows": rows}

    @app.get("/query/csv", response_class=PlainTextResponse)
    def query_csv(projection: str, filter: list[str] = Query(default=[]), order: str = "",
                  group: str = "", aggregate: str = "none", columns: str = ""):
        cols, rows = store.query(
            _query_spec(projection, filter, order, group, aggregate, columns)
        )
        return PlainTextResponse(_csv_out(cols, rows), media_type="text/csv")

    @app.get("/status")
    def status():
        return {"store": store.status(), "jobs": app.state.jobs.snapshot()}

    @app.get("/jobs/{job_id}")
    def job(job_id: int):
        j = app.state.jobs.get(job_id)
        if j is None:
            raise UnknownIdError(f"unknown job {job_id}")
        return j

    # Serve the built web UI when present.
    ui_dir = os.environ.get("HYPODB_UI_DIR", os.path.join(os.getcwd(), "frontend", "dist"))
    if os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
