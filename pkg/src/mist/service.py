"""HTTP session service for the interactive refinement UI.

One process, sessions held in memory (optionally persisted to disk as
JSON + the uploaded image). Mutations on one session are strictly
serialized: a second concurrent mutation gets 409. Idle sessions expire
after a TTL and answer 404 with an "expired" reason afterwards.
"""

from __future__ import annotations

import io
import json
import tempfile
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import engine, serialize
from .errors import EmptyForegroundError, MistError, RasterError
from .raster import BoundingBox, Raster, load_raster

API_VERSION = serialize.SCHEMA_VERSION


class ApiError(Exception):
    def __init__(self, status: int, detail):
        self.status = status
        self.detail = detail
        super().__init__(str(detail))


@dataclass
class StoredSession:
    session: engine.Session
    image_path: Path
    image_hash: str
    created_at: float
    last_access: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Thread-safe session map with idle expiry and optional persistence."""

    def __init__(self, ttl_seconds: float = 3600.0, state_dir=None):
        self.ttl = ttl_seconds
        self._lock = threading.RLock()
        self._sessions: dict[str, StoredSession] = {}
        self._expired: set[str] = set()
        if state_dir:
            self.state_dir = Path(state_dir)
            self.state_dir.mkdir(parents=True, exist_ok=True)
        else:
            self._tmp = tempfile.TemporaryDirectory(prefix="mist-sessions-")
            self.state_dir = Path(self._tmp.name)
        self._restore()

    # -- persistence -------------------------------------------------

    def _doc_path(self, sid: str) -> Path:
        return self.state_dir / f"{sid}.json"

    def _persist(self, sid: str, stored: StoredSession) -> None:
        doc = serialize.session_to_dict(stored.session, str(stored.image_path),
                                        stored.image_hash)
        doc["session_id"] = sid
        doc["created_at"] = stored.created_at
        doc["last_access"] = stored.last_access
        self._doc_path(sid).write_text(json.dumps(doc))

    def _restore(self) -> None:
        for path in sorted(self.state_dir.glob("*.json")):
            try:
                doc = json.loads(path.read_text())
                image_path = Path(doc["image"]["path"])
                if serialize.file_sha256(image_path) != doc["image"]["sha256"]:
                    continue  # image changed underneath the session
                session = serialize.session_from_dict(doc, load_raster(image_path))
                sid = doc["session_id"]
                self._sessions[sid] = StoredSession(
                    session, image_path, doc["image"]["sha256"],
                    doc.get("created_at", time.time()),
                    doc.get("last_access", time.time()))
            except (OSError, KeyError, ValueError, MistError):
                continue  # unreadable snapshots are skipped, not fatal

    # -- access ------------------------------------------------------

    def spool_image(self, sid: str, data: bytes, suffix: str) -> Path:
        path = self.state_dir / f"{sid}{suffix}"
        path.write_bytes(data)
        return path

    def put(self, sid: str, stored: StoredSession) -> None:
        with self._lock:
            self._sessions[sid] = stored
            self._persist(sid, stored)

    def get(self, sid: str, touch: bool = True) -> StoredSession:
        with self._lock:
            self._sweep()
            stored = self._sessions.get(sid)
            if stored is None:
                reason = "expired" if sid in self._expired else "unknown session"
                raise ApiError(404, {"reason": reason, "session_id": sid})
            if touch:
                stored.last_access = time.time()
            return stored

    def update(self, sid: str, session: engine.Session) -> None:
        with self._lock:
            stored = self._sessions[sid]
            stored.session = session
            stored.last_access = time.time()
            self._persist(sid, stored)

    def delete(self, sid: str) -> None:
        with self._lock:
            stored = self._sessions.pop(sid, None)
            if stored is None:
                reason = "expired" if sid in self._expired else "unknown session"
                raise ApiError(404, {"reason": reason, "session_id": sid})
            self._doc_path(sid).unlink(missing_ok=True)

    def _sweep(self) -> None:
        now = time.time()
        for sid in [s for s, st in self._sessions.items()
                    if now - st.last_access > self.ttl]:
            self._sessions.pop(sid)
            self._expired.add(sid)
            self._doc_path(sid).unlink(missing_ok=True)


def _parse_strokes(doc) -> list[engine.Scribble]:
    if not isinstance(doc, dict) or "strokes" not in doc:
        raise ApiError(400, "body must be a JSON object with a 'strokes' list")
    strokes = doc["strokes"]
    if not isinstance(strokes, list) or not strokes:
        raise ApiError(400, "'strokes' must be a non-empty list")
    out = []
    for i, s in enumerate(strokes):
        try:
            side = {"fg": "fg", "foreground": "fg",
                    "bg": "bg", "background": "bg"}[str(s["side"]).lower()]
            points = [(float(x), float(y)) for x, y in s["points"]]
            out.append(engine.Scribble(side=side, points=points,
                                       brush_radius=float(s.get("brush_radius", 0))))
        except (KeyError, TypeError, ValueError) as e:
            raise ApiError(400, f"stroke {i} is malformed: {e}") from e
    return out


def _session_payload(sid: str, session: engine.Session) -> dict:
    return {
        "v": API_VERSION,
        "session_id": sid,
        "mask": serialize.mask_to_rle(session.trimap.foreground()),
        "energy_log": serialize.energy_log_to_list(session.energy_log),
    }


def _mask_png(session: engine.Session) -> bytes:
    from PIL import Image

    bits = session.trimap.foreground().bits
    img = Image.fromarray(np.where(bits, 255, 0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def create_app(ttl_seconds: float = 3600.0, state_dir=None,
               max_dim: int = 4096) -> FastAPI:
    app = FastAPI(title="mist session service")
    store = SessionStore(ttl_seconds=ttl_seconds, state_dir=state_dir)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "v": API_VERSION}

    @app.post("/sessions")
    def create_session(image: UploadFile = File(...), params: str = Form(...)):
        try:
            doc = json.loads(params)
            bbox = BoundingBox(*(int(v) for v in doc["bbox"]))
            cfg_doc = doc.get("config", {})
            cfg = engine.EngineConfig(**{k: cfg_doc[k] for k in cfg_doc})
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ApiError(400, f"malformed params: {e}") from e

        sid = str(uuid.uuid4())
        suffix = Path(image.filename or "upload.png").suffix or ".png"
        data = image.file.read()
        path = store.spool_image(sid, data, suffix)
        try:
            raster = load_raster(path)
        except RasterError as e:
            path.unlink(missing_ok=True)
            raise ApiError(400, f"bad image: {e}") from e
        if raster.width > max_dim or raster.height > max_dim:
            path.unlink(missing_ok=True)
            raise ApiError(413, f"image exceeds {max_dim}x{max_dim} limit")
        try:
            bbox.validate(raster.width, raster.height)
            session = engine.start_session(raster, bbox, cfg)
            session = engine.iterate(session, cfg.k_iterations)
        except (EmptyForegroundError, ValueError) as e:
            path.unlink(missing_ok=True)
            raise ApiError(400, str(e)) from e
        now = time.time()
        store.put(sid, StoredSession(session, path, serialize.file_sha256(path),
                                     now, now))
        return _session_payload(sid, session)

    @app.post("/sessions/{sid}/scribbles")
    async def post_scribbles(sid: str, request: Request):
        try:
            doc = await request.json()
        except json.JSONDecodeError as e:
            raise ApiError(400, f"body is not valid JSON: {e}") from e
        strokes = _parse_strokes(doc)
        stored = store.get(sid)
        if not stored.lock.acquire(blocking=False):
            raise ApiError(409, "session is busy with another mutation")
        try:
            session = engine.apply_scribbles(stored.session, strokes)
            store.update(sid, session)
        finally:
            stored.lock.release()
        return _session_payload(sid, session)

    @app.get("/sessions/{sid}/mask")
    def get_mask(sid: str):
        stored = store.get(sid)
        return Response(content=_mask_png(stored.session), media_type="image/png")

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        stored = store.get(sid, touch=False)
        s = stored.session
        return {
            "v": API_VERSION,
            "session_id": sid,
            "width": s.image.width,
            "height": s.image.height,
            "bbox": [s.bbox.x0, s.bbox.y0, s.bbox.x1, s.bbox.y1],
            "config": serialize.config_to_dict(s.config),
            "iterated": s.iterated,
            "energy_log": serialize.energy_log_to_list(s.energy_log),
            "created_at": stored.created_at,
            "last_access": stored.last_access,
        }

    @app.delete("/sessions/{sid}")
    def delete_session(sid: str):
        store.delete(sid)
        return {"v": API_VERSION, "deleted": sid}

    return app
