"""HTTP session service over the simulator, estimator, and query engine.

A session owns an environment, an agent, and a growing forest of traces;
clients branch the forest with interventions, collect counted rollouts in
background jobs, assemble models from the counts, and query them. Every
POST body is appended to a JSON-lines log in the data directory, so a
recorded analysis can be replayed against a fresh server.

State lives in memory; the log is the only artifact on disk. Ids are
dense counters assigned in request order, which keeps a replayed log
aligned with the original responses.
"""

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from causalprobe.agents import AgentSpec, UnknownAgentError
from causalprobe.engine import (
    InvalidQueryError,
    ModelFamily,
    ModelStructureError,
    Query,
    ZeroEvidenceError,
    answer,
    answer_family,
)
from causalprobe.estimation import Regime, RolloutTree, VariableDef, collect
from causalprobe.experiments import (
    UnknownExperimentError,
    assemble,
    experiment,
    experiment_names,
    recipe_from_json,
    run_named,
)
from causalprobe.gridworld import EnvSpec, IllegalEditError, TerminatedWorldError, UnknownEnvError
from causalprobe.seeds import Seed
from causalprobe.simulator import InterventionSpec, InvalidInterventionError, Trace, extend, intervene, rollout

DATA_DIR_VAR = "CAUSALPROBE_DATA"
JOB_WAIT_SECONDS = 300.0

_CONFLICT_ERRORS = (InvalidInterventionError, IllegalEditError, TerminatedWorldError)
_SCHEMA_ERRORS = (
    InvalidQueryError,
    ModelStructureError,
    ZeroEvidenceError,
    KeyError,
    TypeError,
    ValueError,
)
_NOT_FOUND_ERRORS = (UnknownAgentError, UnknownEnvError, UnknownExperimentError)


class ApiError(Exception):
    """Carries the structured error body every failure responds with."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _not_found(what: str, ident: str) -> ApiError:
    return ApiError(404, "not-found", f"no {what} {ident!r}")


@dataclass
class CollectionJob:
    job_id: str
    tree_id: str
    status: str = "running"
    error: str | None = None
    event: threading.Event = field(default_factory=threading.Event)

    def payload(self) -> dict:
        return {
            "job-id": self.job_id,
            "tree-id": self.tree_id,
            "status": self.status,
            "error": self.error,
        }


@dataclass
class SessionState:
    session_id: str
    env: EnvSpec
    agent: AgentSpec
    seed: Seed
    created_at: float
    traces: dict[str, Trace] = field(default_factory=dict)
    trees: dict[str, RolloutTree] = field(default_factory=dict)
    jobs: dict[str, CollectionJob] = field(default_factory=dict)
    model_ids: list[str] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def payload(self) -> dict:
        return {
            "session-id": self.session_id,
            "env": self.env.to_json(),
            "agent": self.agent.to_json(),
            "seed": self.seed.to_json(),
            "created-at": self.created_at,
            "trace-ids": list(self.traces),
            "model-ids": list(self.model_ids),
        }


class Service:
    """All server state plus the append-only request log."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.log_path = data_dir / "requests.jsonl"
        self.sessions: dict[str, SessionState] = {}
        self.models: dict[str, object] = {}
        self.recorded: dict[tuple[str, str], tuple[int, dict]] = {}
        self.counters = {"session": 0, "tree": 0, "model": 0, "job": 0}
        self.lock = threading.Lock()

    def next_id(self, kind: str, prefix: str) -> str:
        with self.lock:
            self.counters[kind] += 1
            return f"{prefix}{self.counters[kind]}"

    def session(self, sid: str) -> SessionState:
        try:
            return self.sessions[sid]
        except KeyError:
            raise _not_found("session", sid) from None

    def log(self, path: str, key: str | None, body: dict) -> None:
        line = json.dumps({"path": path, "key": key, "body": body}, sort_keys=True)
        with self.lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def recall(self, path: str, key: str | None) -> tuple[int, dict] | None:
        if key is None:
            return None
        with self.lock:
            return self.recorded.get((path, key))

    def record(self, path: str, key: str | None, status: int, body: dict) -> None:
        if key is None:
            return
        with self.lock:
            self.recorded[(path, key)] = (status, body)


def build_app(data_dir: str | Path | None = None, static_dir: str | Path | None = None) -> FastAPI:
    resolved = Path(data_dir or os.environ.get(DATA_DIR_VAR) or "causalprobe-data")
    resolved.mkdir(parents=True, exist_ok=True)
    service = Service(resolved)
    app = FastAPI(title="causalprobe", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content={"code": "schema-violation", "message": str(exc)}
        )

    def guarded(path: str, key: str | None, body: dict, handler):
        """Log the request, honor a replayed request key, translate domain
        errors to the structured envelope, and record the outcome."""
        service.log(path, key, body)
        stored = service.recall(path, key)
        if stored is not None:
            status, payload = stored
            return JSONResponse(status_code=status, content=payload)
        try:
            payload = handler()
            status = 200
        except ApiError as exc:
            service.record(path, key, exc.status, {"code": exc.code, "message": exc.message})
            raise
        except _CONFLICT_ERRORS as exc:
            err = ApiError(409, "illegal-intervention", str(exc))
            service.record(path, key, err.status, {"code": err.code, "message": err.message})
            raise err from exc
        except _NOT_FOUND_ERRORS as exc:
            err = ApiError(404, "not-found", str(exc))
            service.record(path, key, err.status, {"code": err.code, "message": err.message})
            raise err from exc
        except _SCHEMA_ERRORS as exc:
            err = ApiError(422, "schema-violation", str(exc))
            service.record(path, key, err.status, {"code": err.code, "message": err.message})
            raise err from exc
        service.record(path, key, status, payload)
        return JSONResponse(status_code=status, content=payload)

    @app.post("/sessions")
    def create_session(body: dict, request_key: str | None = Header(default=None, alias="Request-Key")):
        def handler():
            env = EnvSpec.from_json(body["env"])
            agent = AgentSpec.from_json(body["agent"])
            seed = Seed(int(body["seed"]))
            steps = body.get("steps")
            trace = rollout(env, agent, seed, None if steps is None else int(steps))
            session = SessionState(
                session_id=service.next_id("session", "s"),
                env=env,
                agent=agent,
                seed=seed,
                created_at=time.time(),
            )
            session.traces[trace.trace_id] = trace
            service.sessions[session.session_id] = session
            return session.payload()

        return guarded("/sessions", request_key, body, handler)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = service.session(sid)
        with session.lock:
            return session.payload()

    @app.get("/sessions/{sid}/traces")
    def list_traces(sid: str):
        session = service.session(sid)
        with session.lock:
            return {"session-id": sid, "traces": [t.to_json() for t in session.traces.values()]}

    @app.post("/sessions/{sid}/traces/{tid}/extend")
    def extend_trace(sid: str, tid: str, body: dict, request_key: str | None = Header(default=None, alias="Request-Key")):
        def handler():
            session = service.session(sid)
            with session.lock:
                if tid not in session.traces:
                    raise _not_found("trace", tid)
                limit = body.get("t")
                grown = extend(session.traces[tid], None if limit is None else int(limit))
                session.traces[tid] = grown
                return grown.to_json()

        return guarded(f"/sessions/{sid}/traces/{tid}/extend", request_key, body, handler)

    @app.post("/sessions/{sid}/traces/{tid}/intervene")
    def intervene_trace(sid: str, tid: str, body: dict, request_key: str | None = Header(default=None, alias="Request-Key")):
        def handler():
            session = service.session(sid)
            iv = InterventionSpec.from_json(body)
            with session.lock:
                if tid not in session.traces:
                    raise _not_found("trace", tid)
                branch = intervene(session.traces[tid], iv)
                session.traces[branch.trace_id] = branch
                return branch.to_json()

        return guarded(f"/sessions/{sid}/traces/{tid}/intervene", request_key, body, handler)

    @app.post("/sessions/{sid}/collect")
    def collect_rollouts(sid: str, body: dict, request_key: str | None = Header(default=None, alias="Request-Key")):
        def handler():
            session = service.session(sid)
            regimes = [Regime.from_json(r) for r in body["regimes"]]
            variables = tuple(VariableDef.from_json(v) for v in body["extractors"])
            n = int(body["n"])
            seed = int(body["seed"])
            if n < 0:
                raise ApiError(422, "schema-violation", "n must be nonnegative")
            job = CollectionJob(
                job_id=service.next_id("job", "j"),
                tree_id=service.next_id("tree", "r"),
            )
            with session.lock:
                session.jobs[job.job_id] = job
            worker = threading.Thread(
                target=_collect_into,
                args=(session, job, variables, regimes, n, seed),
                daemon=True,
            )
            worker.start()
            return {"job-id": job.job_id, "tree-id": job.tree_id}

        return guarded(f"/sessions/{sid}/collect", request_key, body, handler)

    @app.get("/sessions/{sid}/collect/{jid}")
    def collection_status(sid: str, jid: str):
        session = service.session(sid)
        with session.lock:
            if jid not in session.jobs:
                raise _not_found("collection job", jid)
            return session.jobs[jid].payload()

    @app.post("/sessions/{sid}/models")
    def build_model(sid: str, body: dict, request_key: str | None = Header(default=None, alias="Request-Key")):
        def handler():
            session = service.session(sid)
            tree = _tree_when_ready(session, body["tree"])
            recipe = recipe_from_json(body["recipe"])
            keys = tuple(body.get("regimes") or sorted(tree.regimes))
            alpha = float(body.get("alpha", 1.0))
            model = assemble(tree, recipe, keys, alpha)
            model_id = service.next_id("model", "m")
            service.models[model_id] = model
            with session.lock:
                session.model_ids.append(model_id)
            return {"model-id": model_id}

        return guarded(f"/sessions/{sid}/models", request_key, body, handler)

    @app.post("/models/{mid}/query")
    def query_model(mid: str, body: dict, request_key: str | None = Header(default=None, alias="Request-Key")):
        def handler():
            if mid not in service.models:
                raise _not_found("model", mid)
            model = service.models[mid]
            query = Query.from_json(body)
            if isinstance(model, ModelFamily):
                result = answer_family(model, query)
            else:
                result = answer(model, query)
            return result.to_json()

        return guarded(f"/models/{mid}/query", request_key, body, handler)

    @app.get("/experiments")
    def list_experiments():
        return {"experiments": [experiment(name).to_json() for name in experiment_names()]}

    @app.post("/experiments/{name}/run")
    def run_experiment_endpoint(name: str, body: dict, request_key: str | None = Header(default=None, alias="Request-Key")):
        def handler():
            rollouts = body.get("rollouts")
            table = run_named(
                name, int(body["seed"]), None if rollouts is None else int(rollouts)
            )
            return table.to_json()

        return guarded(f"/experiments/{name}/run", request_key, body, handler)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def _collect_into(session: SessionState, job: CollectionJob, variables, regimes, n: int, seed: int) -> None:
    """Worker body for one collection job; outcome lands on the job record."""
    tree = RolloutTree(variables)
    try:
        for i, regime in enumerate(regimes):
            collect(tree, session.env, session.agent, regime, n, Seed(seed).child(i))
        with session.lock:
            session.trees[job.tree_id] = tree
            job.status = "done"
    except Exception as exc:
        with session.lock:
            job.status = "failed"
            job.error = str(exc)
    finally:
        job.event.set()


def _tree_when_ready(session: SessionState, tree_id: str) -> RolloutTree:
    """Resolve a tree id, waiting out its collection job if still running."""
    with session.lock:
        if tree_id in session.trees:
            return session.trees[tree_id]
        job = next((j for j in session.jobs.values() if j.tree_id == tree_id), None)
    if job is None:
        raise _not_found("rollout tree", tree_id)
    job.event.wait(JOB_WAIT_SECONDS)
    with session.lock:
        if job.status == "failed":
            raise ApiError(409, "collection-failed", job.error or "collection failed")
        if tree_id not in session.trees:
            raise ApiError(409, "collection-failed", "collection did not finish in time")
        return session.trees[tree_id]


def replay_log(client, log_path: str | Path) -> list[tuple[int, dict]]:
    """Re-issue every logged request through the given HTTP client, in
    order, returning each (status, body) pair."""
    out = []
    with open(log_path, encoding="utf-8") as fh:
        for line in fh:
            entry = json.loads(line)
            headers = {"Request-Key": entry["key"]} if entry.get("key") else {}
            response = client.post(entry["path"], json=entry["body"], headers=headers)
            out.append((response.status_code, response.json()))
    return out
