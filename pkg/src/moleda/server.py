"""HTTP + WebSocket service over the document store and embedding core.

REST endpoints expose collections, summaries, and per-session
fingerprint/cluster/embed calls; a WebSocket per session drives the
interactive constrained-KPCA loop. Each session owns a single solver
worker that drains a latest-wins move mailbox plus an ordered topology
queue, so at most one solve lags the newest input and every subscriber
sees versions strictly increase.
"""

from __future__ import annotations

import asyncio
import json
import math
import threading
import time
from collections import deque
from contextlib import asynccontextmanager
from dataclasses import dataclass, field, replace
from functools import partial
from uuid import uuid4

import numpy as np
from fastapi import Body, FastAPI, WebSocket
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.middleware.cors import CORSMiddleware
from starlette.websockets import WebSocketDisconnect

from .cluster import (
    DegenerateLabeling,
    KTooLarge,
    agglomerative,
    kmeans,
    validity,
)
from .docstore import (
    DocStore,
    Document,
    FilterError,
    NonNumericField,
    UnknownCollection,
)
from .embed import (
    CkpcaState,
    ConstraintSet,
    DegenerateData,
    Embedding,
    InvalidConstraint,
    KernelSpec,
    PerplexityTooLarge,
    RankDeficient,
    SingularSystem,
    TanimotoOnDense,
    TooFewControls,
    TsneParams,
    UnknownControl,
    ckpca_move_control,
    ckpca_solve,
)
from .fingerprint import Fingerprint
from .pipeline import (
    CLUSTER_ALGOS,
    DEFAULT_KERNEL_KIND,
    EMBED_METHODS,
    FINGERPRINT_METHODS,
    embed_coordinates,
    fingerprint_batch,
    path_config,
    quality_report,
)
from .serialize import (
    clustering_to_json,
    constraints_from_json,
    constraints_to_json,
    coords_to_json,
    document_to_json,
    field_summary_to_json,
    quality_to_json,
)

DEFAULT_IDLE_SECONDS = 3600.0


class ApiError(Exception):
    """Domain error carried to the wire as {"code", "message"}."""

    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Session:
    """One fetched working set plus derived numeric state.

    The websocket fields (wake, queue, moves, subscribers) are touched
    only on the event loop; numeric solves take ``numeric_lock`` so the
    per-session single-solver rule holds across REST and the worker.
    """

    id: str
    collection: str
    docs: list[Document]
    created: float
    last_active: float
    closed: bool = False
    fingerprints: list[Fingerprint] | None = None
    fp_method: str | None = None
    vectors: np.ndarray | None = None
    solver: CkpcaState | None = None
    pending: ConstraintSet | None = None
    embedding: Embedding | None = None
    embed_method: str | None = None
    version: int = 0
    numeric_lock: threading.Lock = field(default_factory=threading.Lock)
    wake: asyncio.Event = field(default_factory=asyncio.Event)
    queue: deque = field(default_factory=deque)
    moves: dict = field(default_factory=dict)
    subscribers: set = field(default_factory=set)
    worker: asyncio.Task | None = None

    @property
    def n(self) -> int:
        return len(self.docs)


class SessionRegistry:
    """In-memory session table with idle eviction on every access."""

    def __init__(self, idle_seconds: float, clock) -> None:
        self.idle_seconds = idle_seconds
        self.clock = clock
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _evict_locked(self) -> None:
        now = self.clock()
        stale = [sid for sid, session in self._sessions.items()
                 if now - session.last_active > self.idle_seconds]
        for sid in stale:
            self._sessions.pop(sid).closed = True

    def create(self, collection: str, docs: list[Document]) -> Session:
        with self._lock:
            self._evict_locked()
            now = self.clock()
            session = Session(id=uuid4().hex, collection=collection,
                              docs=docs, created=now, last_active=now)
            self._sessions[session.id] = session
            return session

    def get(self, session_id: str) -> Session:
        session = self.find(session_id)
        if session is None:
            raise ApiError(404, "unknown_session",
                           f"no session {session_id!r}")
        return session

    def find(self, session_id: str) -> Session | None:
        with self._lock:
            self._evict_locked()
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_active = self.clock()
            return session

    def touch(self, session: Session) -> None:
        session.last_active = self.clock()

    def delete(self, session_id: str) -> Session:
        with self._lock:
            self._evict_locked()
            session = self._sessions.pop(session_id, None)
        if session is None:
            raise ApiError(404, "unknown_session",
                           f"no session {session_id!r}")
        session.closed = True
        return session


# ---------------------------------------------------------------------------
# request validation helpers
# ---------------------------------------------------------------------------


def _invalid(message: str) -> ApiError:
    return ApiError(422, "invalid_request", message)


def _expect_dict(value, name: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise _invalid(f"{name} must be a JSON object")
    return value


def _expect_str_list(value, name: str) -> list[str]:
    if value is None:
        return []
    if not isinstance(value, list) or \
            not all(isinstance(item, str) for item in value):
        raise _invalid(f"{name} must be a list of strings")
    return value


def _expect_int(value, name: str, minimum: int | None = None):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise _invalid(f"{name} must be an integer")
    if minimum is not None and value < minimum:
        raise _invalid(f"{name} must be >= {minimum}")
    return value


def _fetch_args(body: dict) -> dict:
    limit = _expect_int(body.get("limit"), "limit", minimum=0)
    sample = body.get("sample", False)
    if not isinstance(sample, bool):
        raise _invalid("sample must be a boolean")
    seed = _expect_int(body.get("seed"), "seed")
    filter_ = body.get("filter")
    if filter_ is not None and not isinstance(filter_, dict):
        raise _invalid("filter must be a JSON object")
    return {"filter": filter_, "limit": limit, "sample": sample,
            "seed": 0 if seed is None else seed}


def _kernel_spec(body) -> KernelSpec:
    if body is None:
        return KernelSpec(kind=DEFAULT_KERNEL_KIND)
    if not isinstance(body, dict):
        raise ApiError(422, "invalid_parameter",
                       "kernel must be a JSON object")
    unknown = set(body) - {"kind", "gamma"}
    if unknown:
        raise ApiError(422, "invalid_parameter",
                       f"unknown kernel keys: {sorted(unknown)}")
    kind = body.get("kind", DEFAULT_KERNEL_KIND)
    gamma = body.get("gamma")
    if not isinstance(kind, str):
        raise ApiError(422, "invalid_parameter", "kernel kind must be text")
    if gamma is not None and (isinstance(gamma, bool)
                              or not isinstance(gamma, (int, float))):
        raise ApiError(422, "invalid_parameter", "gamma must be a number")
    try:
        return KernelSpec(kind=kind, gamma=gamma)
    except ValueError as exc:
        raise ApiError(422, "invalid_parameter", str(exc)) from exc


def _parse_constraints(body) -> ConstraintSet:
    try:
        return constraints_from_json(body)
    except (ValueError, TypeError) as exc:
        raise ApiError(422, "invalid_constraint", str(exc)) from exc


def _tsne_params(params: dict) -> TsneParams:
    allowed = {"perplexity": (int, float), "iters": int,
               "learning_rate": (int, float),
               "early_exaggeration": (int, float), "seed": int}
    unknown = set(params) - set(allowed)
    if unknown:
        raise ApiError(422, "invalid_parameter",
                       f"unknown tsne parameters: {sorted(unknown)}")
    for key, types in allowed.items():
        if key in params and (isinstance(params[key], bool)
                              or not isinstance(params[key], types)):
            raise ApiError(422, "invalid_parameter",
                           f"tsne parameter {key} has the wrong type")
    return TsneParams(**params)


# ---------------------------------------------------------------------------
# websocket interaction
# ---------------------------------------------------------------------------


class _WsError(Exception):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


def _error_event(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def _embedding_payload(session: Session) -> dict:
    return {
        "version": session.version,
        "method": session.embed_method,
        "coords": coords_to_json(session.embedding.coords),
        "constraints": None if session.solver is None
        else constraints_to_json(session.solver.constraints),
    }


def _embedding_event(session: Session) -> dict:
    return {"type": "embedding", **_embedding_payload(session)}


def _ws_int(payload: dict, key: str) -> int:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise _WsError("invalid_message", f"{key} must be an integer")
    return value


def _ws_number(payload: dict, key: str) -> float:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) \
            or not math.isfinite(value):
        raise _WsError("invalid_message", f"{key} must be a finite number")
    return float(value)


def _next_constraints(session: Session, payload: dict) -> ConstraintSet:
    """Build the constraint set a topology message asks for."""
    pending = session.pending
    kind = payload["type"]
    if kind == "add_control":
        index = _ws_int(payload, "index")
        x = _ws_number(payload, "x")
        y = _ws_number(payload, "y")
        cset = replace(pending, control_points=pending.control_points
                       + ((index, x, y),))
    elif kind == "remove_control":
        index = _ws_int(payload, "index")
        remaining = tuple(c for c in pending.control_points if c[0] != index)
        if len(remaining) == len(pending.control_points):
            raise _WsError("unknown_control",
                           f"index {index} has no control entry")
        cset = replace(pending, control_points=remaining)
    elif kind in ("add_link", "remove_link"):
        link_kind = payload.get("kind")
        if link_kind not in ("must", "cannot"):
            raise _WsError("invalid_message",
                           "link kind must be 'must' or 'cannot'")
        i = _ws_int(payload, "i")
        j = _ws_int(payload, "j")
        attr = "must_links" if link_kind == "must" else "cannot_links"
        links = getattr(pending, attr)
        if kind == "add_link":
            cset = replace(pending, **{attr: links + ((i, j),)})
        else:
            remaining = tuple(pair for pair in links
                              if frozenset(pair) != frozenset((i, j)))
            if len(remaining) == len(links):
                raise _WsError("unknown_link",
                               f"no {link_kind}-link between {i} and {j}")
            cset = replace(pending, **{attr: remaining})
    elif kind == "set_strength":
        attr = {"control": "mu_cp", "must": "mu_ml",
                "cannot": "mu_cl"}.get(payload.get("target"))
        if attr is None:
            raise _WsError("invalid_message",
                           "target must be control, must, or cannot")
        cset = replace(pending, **{attr: _ws_number(payload, "value")})
    else:
        raise _WsError("invalid_message", f"unknown message type {kind!r}")
    cset.validate_indices(session.n)
    return cset


def _handle_interaction(session: Session, outbox: asyncio.Queue,
                        text: str) -> None:
    """Validate one message and stage it for the solver worker.

    Runs on the event loop with no awaits, so pending-state updates and
    mailbox writes are atomic with respect to the worker's drain steps.
    """
    try:
        payload = json.loads(text)
    except ValueError:
        outbox.put_nowait(_error_event("invalid_message", "not valid JSON"))
        return
    if not isinstance(payload, dict) or \
            not isinstance(payload.get("type"), str):
        outbox.put_nowait(_error_event(
            "invalid_message", "messages are objects with a 'type' field"))
        return
    if session.solver is None or session.pending is None:
        outbox.put_nowait(_error_event(
            "not_ckpca", "interaction requires an active ckpca embedding"))
        return
    try:
        if payload["type"] == "move_control":
            index = _ws_int(payload, "index")
            x = _ws_number(payload, "x")
            y = _ws_number(payload, "y")
            anchored = {c[0] for c in session.pending.control_points}
            if index not in anchored:
                raise _WsError("unknown_control",
                               f"index {index} has no control entry")
            moved = tuple((i, x, y) if i == index else (i, cx, cy)
                          for i, cx, cy in session.pending.control_points)
            session.pending = replace(session.pending, control_points=moved)
            session.moves[index] = (x, y, outbox)
        else:
            cset = _next_constraints(session, payload)
            session.pending = cset
            # Earlier moves are already folded into this snapshot.
            session.moves.clear()
            session.queue.append((cset, outbox))
    except _WsError as exc:
        outbox.put_nowait(_error_event(exc.code, str(exc)))
        return
    except InvalidConstraint as exc:
        outbox.put_nowait(_error_event("invalid_constraint", str(exc)))
        return
    session.wake.set()


def _interaction_code(exc: Exception) -> str:
    if isinstance(exc, SingularSystem):
        return "singular_system"
    if isinstance(exc, UnknownControl):
        return "unknown_control"
    if isinstance(exc, InvalidConstraint):
        return "invalid_constraint"
    return "internal_error"


def _solve_full(session: Session, cset: ConstraintSet) -> Embedding:
    with session.numeric_lock:
        return ckpca_solve(session.solver, cset)


def _solve_move(session: Session, index: int, x: float, y: float) -> Embedding:
    with session.numeric_lock:
        return ckpca_move_control(session.solver, index, x, y)


async def _session_worker(session: Session) -> None:
    """Drain the topology queue, then the move mailbox, one solve at a time."""
    while True:
        await session.wake.wait()
        session.wake.clear()
        if session.closed:
            return
        while session.queue or session.moves:
            if session.queue:
                cset, outbox = session.queue.popleft()
                solve = partial(_solve_full, session, cset)
            else:
                index, (x, y, outbox) = next(iter(session.moves.items()))
                del session.moves[index]
                solve = partial(_solve_move, session, index, x, y)
            try:
                embedding = await asyncio.to_thread(solve)
            except Exception as exc:  # noqa: BLE001 - worker must survive
                if session.solver is not None:
                    session.pending = session.solver.constraints
                outbox.put_nowait(_error_event(
                    _interaction_code(exc), str(exc) or repr(exc)))
                continue
            session.version += 1
            session.embedding = embedding
            event = _embedding_event(session)
            for subscriber in list(session.subscribers):
                subscriber.put_nowait(event)


async def _pump(websocket: WebSocket, outbox: asyncio.Queue) -> None:
    """Single writer per connection: preserves per-subscriber ordering."""
    try:
        while True:
            await websocket.send_json(await outbox.get())
    except Exception:  # noqa: BLE001 - connection gone
        return


# ---------------------------------------------------------------------------
# application factory
# ---------------------------------------------------------------------------


def create_app(store: DocStore | None = None, *,
               data_dir=None,
               idle_seconds: float = DEFAULT_IDLE_SECONDS,
               clock=None) -> FastAPI:
    if store is None:
        store = DocStore(data_dir)
    registry = SessionRegistry(idle_seconds=idle_seconds,
                               clock=time.monotonic if clock is None else clock)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        tasks = list(app.state.worker_tasks)
        for task in tasks:
            task.cancel()
        await asyncio.gather(*tasks, return_exceptions=True)

    app = FastAPI(title="moleda", lifespan=lifespan)
    # Web front ends are served from their own origin during development.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.registry = registry
    app.state.worker_tasks = set()

    @app.exception_handler(ApiError)
    async def _api_error(request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code,
                                     "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": "invalid_request",
                                     "message": str(exc)})

    # -- collections --------------------------------------------------------

    @app.get("/collections")
    def collections():
        sizes = store.collections()
        return {"collections": [{"name": name, "size": size}
                                for name, size in sorted(sizes.items())]}

    @app.get("/collections/{name}/fields")
    def collection_fields(name: str):
        try:
            info = store.field_info(name)
        except UnknownCollection as exc:
            raise ApiError(404, "unknown_collection", str(exc)) from exc
        return {"fields": [{"name": field_name, "type": kind}
                           for field_name, kind in sorted(info.items())]}

    @app.post("/collections/{name}/summary")
    def collection_summary(name: str, body: dict = Body(default={})):
        fields = _expect_str_list(body.get("fields"), "fields")
        opts = _expect_dict(body.get("opts"), "opts")
        unknown = set(opts) - {"bins", "group_by"}
        if unknown:
            raise _invalid(f"unknown opts: {sorted(unknown)}")
        bins = opts.get("bins", "auto")
        group_by = opts.get("group_by")
        if group_by is not None and not isinstance(group_by, str):
            raise _invalid("group_by must be a field name")
        try:
            summaries = store.summarize(name, fields,
                                        filter=body.get("filter"),
                                        bins=bins, group_by=group_by)
        except UnknownCollection as exc:
            raise ApiError(404, "unknown_collection", str(exc)) from exc
        except FilterError as exc:
            raise ApiError(422, "invalid_filter", str(exc)) from exc
        except NonNumericField as exc:
            raise ApiError(422, "non_numeric_field", str(exc)) from exc
        except ValueError as exc:
            raise ApiError(422, "invalid_parameter", str(exc)) from exc
        return [field_summary_to_json(summary) for summary in summaries]

    @app.post("/collections/{name}/fetch")
    def collection_fetch(name: str, body: dict = Body(default={})):
        args = _fetch_args(body)
        fields = body.get("fields")
        if fields is not None:
            fields = _expect_str_list(fields, "fields")
        try:
            docs = store.fetch(name, filter=args["filter"], fields=fields,
                               limit=args["limit"], sample=args["sample"],
                               seed=args["seed"])
        except UnknownCollection as exc:
            raise ApiError(404, "unknown_collection", str(exc)) from exc
        except FilterError as exc:
            raise ApiError(422, "invalid_filter", str(exc)) from exc
        return [document_to_json(doc) for doc in docs]

    # -- session lifecycle ---------------------------------------------------

    @app.post("/sessions")
    def create_session(body: dict = Body(default={})):
        collection = body.get("collection")
        if not isinstance(collection, str) or not collection:
            raise _invalid("collection is required")
        args = _fetch_args(body)
        try:
            docs = store.fetch(collection, filter=args["filter"],
                               limit=args["limit"], sample=args["sample"],
                               seed=args["seed"])
        except UnknownCollection as exc:
            raise ApiError(404, "unknown_collection", str(exc)) from exc
        except FilterError as exc:
            raise ApiError(422, "invalid_filter", str(exc)) from exc
        session = registry.create(collection, docs)
        return {"id": session.id, "collection": collection,
                "count": session.n}

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        session = registry.delete(session_id)
        return {"id": session.id, "deleted": True}

    @app.get("/sessions/{session_id}/search")
    def search_session(session_id: str, q: str = ""):
        session = registry.get(session_id)
        matches = [{"index": index, "id": doc.id, "smiles": doc.smiles}
                   for index, doc in enumerate(session.docs)
                   if q in doc.id or q in doc.smiles]
        return {"query": q, "count": len(matches), "matches": matches}

    # -- numeric pipeline ----------------------------------------------------

    @app.post("/sessions/{session_id}/fingerprint")
    def fingerprint_session(session_id: str, body: dict = Body(default={})):
        session = registry.get(session_id)
        method = body.get("method", "hashed_path")
        params = _expect_dict(body.get("params"), "params")
        if method not in FINGERPRINT_METHODS:
            raise ApiError(422, "unknown_method",
                           f"fingerprint method must be one of "
                           f"{FINGERPRINT_METHODS}, got {method!r}")
        config = None
        if method == "hashed_path":
            try:
                config = path_config(params)
            except ValueError as exc:
                raise ApiError(422, "invalid_parameter", str(exc)) from exc
        elif params:
            raise ApiError(422, "invalid_parameter",
                           "atmo_keys takes no parameters")

        batch = fingerprint_batch([doc.smiles for doc in session.docs],
                                  method, config)
        session.fingerprints = list(batch.fingerprints)
        session.fp_method = method
        session.vectors = batch.dense()
        # New features invalidate everything numeric downstream.
        session.solver = None
        session.pending = None
        session.embedding = None
        session.embed_method = None
        return {"method": method, "count": session.n,
                "dimension": batch.dimension, "n_failed": batch.n_failed,
                "density": batch.density_stats()}

    @app.post("/sessions/{session_id}/cluster")
    def cluster_session(session_id: str, body: dict = Body(default={})):
        session = registry.get(session_id)
        if session.vectors is None:
            raise ApiError(409, "fingerprints_missing",
                           "compute fingerprints before clustering")
        algo = body.get("algo", "kmeans")
        if algo not in CLUSTER_ALGOS:
            raise ApiError(422, "unknown_method",
                           f"algo must be one of {CLUSTER_ALGOS}, "
                           f"got {algo!r}")
        k = body.get("k")
        if isinstance(k, bool) or not isinstance(k, int):
            raise ApiError(422, "invalid_parameter", "k must be an integer")
        try:
            if algo == "kmeans":
                seed = _expect_int(body.get("seed"), "seed")
                clustering = kmeans(session.vectors, k,
                                    seed=0 if seed is None else seed)
            else:
                linkage = body.get("linkage", "average")
                clustering = agglomerative(session.vectors, k,
                                           linkage=linkage)
        except KTooLarge as exc:
            raise ApiError(422, "k_too_large", str(exc)) from exc
        except (TypeError, ValueError) as exc:
            raise ApiError(422, "invalid_parameter", str(exc)) from exc
        try:
            report = validity(session.vectors, clustering.labels)
        except DegenerateLabeling:
            report = None
        return clustering_to_json(clustering, report)

    @app.post("/sessions/{session_id}/embed")
    def embed_session(session_id: str, body: dict = Body(default={})):
        session = registry.get(session_id)
        if session.vectors is None:
            raise ApiError(409, "fingerprints_missing",
                           "compute fingerprints before embedding")
        method = body.get("method")
        if method not in EMBED_METHODS:
            raise ApiError(422, "unknown_method",
                           f"method must be one of {EMBED_METHODS}, "
                           f"got {method!r}")
        params = _expect_dict(body.get("params"), "params")
        cset = _parse_constraints(body.get("constraints"))
        try:
            tsne_params = None
            k_neighbors = 10
            if method == "tsne":
                tsne_params = _tsne_params(params)
            elif method == "lsp":
                unknown = set(params) - {"k_neighbors"}
                if unknown:
                    raise ApiError(422, "invalid_parameter",
                                   f"unknown parameters: {sorted(unknown)}")
                k_neighbors = params.get("k_neighbors", 10)
            elif params:
                raise ApiError(422, "invalid_parameter",
                               f"{method} takes no parameters")
            spec = _kernel_spec(body.get("kernel")) \
                if method in ("kpca", "ckpca") else None
            with session.numeric_lock:
                embedding, solver = embed_coordinates(
                    session.vectors, method, kernel_spec=spec,
                    constraints=cset, tsne_params=tsne_params,
                    k_neighbors=k_neighbors)
        except ApiError:
            raise
        except PerplexityTooLarge as exc:
            raise ApiError(422, "perplexity_too_large", str(exc)) from exc
        except TooFewControls as exc:
            raise ApiError(422, "too_few_controls", str(exc)) from exc
        except InvalidConstraint as exc:
            raise ApiError(422, "invalid_constraint", str(exc)) from exc
        except SingularSystem as exc:
            raise ApiError(422, "singular_system", str(exc)) from exc
        except TanimotoOnDense as exc:
            raise ApiError(422, "invalid_parameter", str(exc)) from exc
        except (RankDeficient, DegenerateData) as exc:
            raise ApiError(422, "degenerate_data", str(exc)) from exc
        except (TypeError, ValueError) as exc:
            raise ApiError(422, "invalid_parameter", str(exc)) from exc

        quality = quality_report(session.vectors, embedding.coords)
        session.solver = solver
        session.pending = None if solver is None else solver.constraints
        session.embedding = embedding
        session.embed_method = method
        session.version += 1
        return {"method": method, "version": session.version,
                "coords": coords_to_json(embedding.coords),
                "quality": quality_to_json(quality),
                "constraints": None if solver is None
                else constraints_to_json(solver.constraints)}

    @app.get("/sessions/{session_id}/embedding")
    def get_embedding(session_id: str):
        session = registry.get(session_id)
        if session.embedding is None:
            raise ApiError(409, "no_embedding",
                           "no embedding computed for this session")
        return _embedding_payload(session)

    # -- interaction ---------------------------------------------------------

    @app.websocket("/sessions/{session_id}/interact")
    async def interact(websocket: WebSocket, session_id: str):
        await websocket.accept()
        session = registry.find(session_id)
        if session is None:
            await websocket.send_json(_error_event(
                "unknown_session", f"no session {session_id!r}"))
            await websocket.close(code=1008)
            return
        outbox: asyncio.Queue = asyncio.Queue()
        session.subscribers.add(outbox)
        if session.embedding is not None:
            outbox.put_nowait(_embedding_event(session))
        if session.worker is None:
            session.worker = asyncio.create_task(_session_worker(session))
            app.state.worker_tasks.add(session.worker)
            session.worker.add_done_callback(app.state.worker_tasks.discard)
        sender = asyncio.create_task(_pump(websocket, outbox))
        try:
            while True:
                text = await websocket.receive_text()
                if session.closed:
                    outbox.put_nowait(_error_event(
                        "unknown_session", "session was closed"))
                    break
                registry.touch(session)
                _handle_interaction(session, outbox, text)
        except WebSocketDisconnect:
            pass
        finally:
            session.subscribers.discard(outbox)
            sender.cancel()

    return app
