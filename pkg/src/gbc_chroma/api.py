"""JSON-over-HTTP facade: session lifecycle, layout, legend, renders, picking.

All routes live under /api/v1.  A malformed request body is a 400, an
unknown session or sample a 404, and a config value that violates a
pipeline invariant a 422.  Every response that depends on the config
carries the current config version so clients can discard stale fetches.
"""

from __future__ import annotations

import io
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response, UploadFile, File
from fastapi.responses import JSONResponse

from .data_model import DataError, DataTable, load_table
from .session import Session

API_PREFIX = "/api/v1"


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def remove(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None


def _parse_csv_upload(data: bytes) -> DataTable:
    import tempfile

    with tempfile.NamedTemporaryFile(suffix=".csv", delete=False) as tmp:
        tmp.write(data)
        tmp_path = Path(tmp.name)
    try:
        return load_table(tmp_path)
    finally:
        tmp_path.unlink(missing_ok=True)


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="gbc-chroma", docs_url=None, redoc_url=None)
    store = SessionStore()
    app.state.sessions = store

    def _session_or_404(session_id: str) -> Session:
        session = store.get(session_id)
        if session is None:
            raise LookupError(session_id)
        return session

    @app.exception_handler(LookupError)
    async def _not_found(_request, exc):
        return JSONResponse(status_code=404, content={"detail": f"not found: {exc}"})

    @app.exception_handler(DataError)
    async def _bad_data(_request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _invariant(_request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.post(API_PREFIX + "/sessions", status_code=201)
    async def create_session(file: UploadFile = File(...)):
        data = await file.read()
        table = _parse_csv_upload(data)
        session = Session(table)
        store.add(session)
        return {
            "id": session.id,
            "attributes": list(table.attribute_names),
            "m": table.n_samples,
            "version": session.version,
            "extent": list(session.grid_spec().extent),
        }

    @app.get(API_PREFIX + "/sessions/{session_id}/config")
    def get_config(session_id: str):
        session = _session_or_404(session_id)
        return {
            "version": session.version,
            "config": session.config.as_dict(),
            "extent": list(session.grid_spec().extent),
        }

    @app.patch(API_PREFIX + "/sessions/{session_id}/config")
    async def patch_config(session_id: str, request: Request):
        session = _session_or_404(session_id)
        try:
            changes = await request.json()
        except Exception:
            return JSONResponse(status_code=400, content={"detail": "body is not valid JSON"})
        if not isinstance(changes, dict):
            return JSONResponse(status_code=400, content={"detail": "body must be a JSON object"})
        try:
            version, config = session.patch_config(changes)
        except KeyError as exc:
            return JSONResponse(
                status_code=422, content={"detail": f"unknown config field: {exc}"}
            )
        except (TypeError, ValueError) as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        return {"version": version, "config": config.as_dict()}

    @app.get(API_PREFIX + "/sessions/{session_id}/layout")
    def get_layout(session_id: str):
        session = _session_or_404(session_id)
        layout = session.layout()
        return {
            "version": session.version,
            "order": list(layout.order),
            "vertex_angles": [float(a) for a in layout.vertex_angles],
            "points": [[float(x), float(y)] for x, y in layout.points],
        }

    @app.get(API_PREFIX + "/sessions/{session_id}/legend")
    def get_legend(session_id: str):
        session = _session_or_404(session_id)
        if session.table is None:  # sessions always hold a table; kept as a guard
            return JSONResponse(status_code=409, content={"detail": "no dataset loaded"})
        return session.legend_payload()

    def _png_response(session: Session, field) -> Response:
        from .render import png_bytes

        return Response(
            content=png_bytes(field),
            media_type="image/png",
            headers={"X-Config-Version": str(session.version)},
        )

    @app.get(API_PREFIX + "/sessions/{session_id}/render")
    def get_render(session_id: str):
        session = _session_or_404(session_id)
        return _png_response(session, session.render_map())

    @app.get(API_PREFIX + "/sessions/{session_id}/render/legend")
    def get_render_legend(session_id: str):
        session = _session_or_404(session_id)
        return _png_response(session, session.render_legend())

    @app.get(API_PREFIX + "/sessions/{session_id}/render/attribute/{name}")
    def get_render_attribute(session_id: str, name: str):
        session = _session_or_404(session_id)
        try:
            index = session.table.attribute_names.index(name)
        except ValueError:
            raise LookupError(f"attribute {name!r}") from None
        return _png_response(session, session.render_attribute(index))

    @app.get(API_PREFIX + "/sessions/{session_id}/samples/nearest")
    def get_nearest(session_id: str, x: float, y: float):
        session = _session_or_404(session_id)
        index, distance = session.nearest_sample(x, y)
        payload = session.sample_payload(index)
        payload["distance"] = distance
        payload["version"] = session.version
        return payload

    @app.get(API_PREFIX + "/sessions/{session_id}/samples/{index}")
    def get_sample(session_id: str, index: int):
        session = _session_or_404(session_id)
        try:
            payload = session.sample_payload(index)
        except IndexError:
            raise LookupError(f"sample {index}") from None
        payload["version"] = session.version
        return payload

    @app.delete(API_PREFIX + "/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        if not store.remove(session_id):
            raise LookupError(session_id)
        return Response(status_code=204)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
