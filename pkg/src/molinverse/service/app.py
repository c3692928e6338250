"""HTTP service over the workspace pipeline.

All state lives in workspace directories under the data directory; the
process itself only holds the in-memory job queue, so a restart loses
queued and running jobs but never a committed node.  Every error body is
``{"code": ..., "message": ...}``.
"""

from __future__ import annotations

import json
import os
import re

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles

from ..chem import ChemError, parse_smiles
from ..workspace import (
    DATASET,
    FEATURE_SET,
    GENERATION_RESULT,
    MERGED_FEATURE_SET,
    MODEL,
    NOTE,
    SEARCH_RESULT,
    IngestError,
    LineageError,
    Workspace,
    WorkspaceError,
    ingest_csv,
    run_method,
)
from ..workspace.methods import _check_lineage, _METHODS
from .depict import DepictError, depict
from .jobs import JobQueue

METHOD_KIND = {
    "extract_features": FEATURE_SET,
    "merge_features": MERGED_FEATURE_SET,
    "build_model": MODEL,
    "search": SEARCH_RESULT,
    "generate": GENERATION_RESULT,
    "note": NOTE,
}

_WS_ID = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def create_app(data_dir: str | None = None, max_jobs: int | None = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("MID_DATA_DIR", "./mid-data")
    max_jobs = max_jobs or int(os.environ.get("MID_MAX_JOBS", "2"))
    os.makedirs(data_dir, exist_ok=True)
    app = FastAPI(title="molinverse", version="0.1.0")

    def ws_path(ws_id: str) -> str:
        return os.path.join(data_dir, ws_id)

    def open_ws(ws_id: str) -> Workspace:
        return Workspace.open(ws_path(ws_id))

    def runner(job):
        ws = open_ws(job.workspace)
        job.progress["stage"] = job.method
        node = run_method(ws, job.parent, job.method, job.params)
        job.progress.update(
            {k: v for k, v in node.params.items() if isinstance(v, (int, float))}
        )
        return node.id

    queue = JobQueue(runner, max_jobs=max_jobs)
    app.state.queue = queue
    app.state.data_dir = data_dir

    def find_node(node_id: str):
        """Node ids are unique enough to resolve without a workspace id."""
        for name in sorted(os.listdir(data_dir)):
            if not os.path.exists(os.path.join(data_dir, name, "meta.json")):
                continue
            ws = open_ws(name)
            if node_id in ws.nodes:
                return ws, ws.nodes[node_id]
        return None, None

    @app.exception_handler(WorkspaceError)
    async def _ws_error(request: Request, exc: WorkspaceError):
        if isinstance(exc, LineageError):
            return _error(422, "lineage", str(exc))
        if isinstance(exc, IngestError):
            return _error(400, "ingest", str(exc))
        return _error(400, "workspace", str(exc))

    @app.post("/workspaces", status_code=201)
    async def create_workspace(
        file: UploadFile = File(...), name: str = Form(None)
    ):
        ws_id = name or os.path.splitext(os.path.basename(file.filename or "data"))[0]
        ws_id = ws_id.replace(" ", "_")
        if not _WS_ID.match(ws_id):
            return _error(400, "validation", f"bad workspace name {ws_id!r}")
        if os.path.exists(ws_path(ws_id)):
            return _error(409, "exists", f"workspace {ws_id!r} already exists")
        text = (await file.read()).decode("utf-8", errors="replace")
        try:
            ws = ingest_csv(text, ws_path(ws_id), ws_id)
        except IngestError as exc:
            return _error(400, "ingest", str(exc))
        return {"workspace": ws_id, "root": ws.root.id}

    @app.get("/workspaces")
    async def list_workspaces():
        out = []
        for entry in sorted(os.listdir(data_dir)):
            if os.path.exists(os.path.join(data_dir, entry, "meta.json")):
                out.append(entry)
        return {"workspaces": out}

    @app.get("/workspaces/{ws_id}/tree")
    async def get_tree(ws_id: str):
        if not os.path.exists(os.path.join(ws_path(ws_id), "meta.json")):
            return _error(404, "not-found", f"no workspace {ws_id!r}")
        ws = open_ws(ws_id)
        nodes = [
            {
                "id": n.id,
                "parent": n.parent,
                "kind": n.kind,
                "method": n.method,
                "params": n.params,
                "created_at": n.created_at,
            }
            for n in (ws.nodes[i] for i in ws.order)
        ]
        return {"workspace": ws_id, "nodes": nodes, "text": ws.tree()}

    @app.post("/workspaces/{ws_id}/nodes/{parent}/run", status_code=202)
    async def run(ws_id: str, parent: str, body: dict):
        if not os.path.exists(os.path.join(ws_path(ws_id), "meta.json")):
            return _error(404, "not-found", f"no workspace {ws_id!r}")
        method = body.get("method")
        params = body.get("params") or {}
        if method not in _METHODS:
            return _error(
                400, "validation",
                f"unknown method {method!r}; valid methods: {sorted(_METHODS)}",
            )
        ws = open_ws(ws_id)
        if parent not in ws.nodes:
            return _error(404, "not-found", f"no node {parent!r}")
        try:
            _check_lineage(METHOD_KIND[method], ws.nodes[parent])
        except LineageError as exc:
            return _error(422, "lineage", str(exc))
        job = queue.submit(ws_id, parent, method, params)
        return {"job": job.id}

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str):
        job = queue.get(job_id)
        if job is None:
            return _error(404, "not-found", f"no job {job_id!r}")
        return job.to_dict()

    @app.delete("/jobs/{job_id}")
    async def cancel_job(job_id: str):
        job = queue.cancel(job_id)
        if job is None:
            return _error(404, "not-found", f"no job {job_id!r}")
        return job.to_dict()

    @app.get("/nodes/{node_id}")
    async def get_node(node_id: str):
        ws, node = find_node(node_id)
        if node is None:
            return _error(404, "not-found", f"no node {node_id!r}")
        return {
            "workspace": ws.name,
            "id": node.id,
            "parent": node.parent,
            "kind": node.kind,
            "method": node.method,
            "params": node.params,
            "created_at": node.created_at,
            "payload_sha256": node.payload,
            "payload_size": len(ws.payload_bytes(node)),
        }

    @app.get("/nodes/{node_id}/molecules")
    async def get_molecules(node_id: str, offset: int = 0, limit: int = 20):
        ws, node = find_node(node_id)
        if node is None:
            return _error(404, "not-found", f"no node {node_id!r}")
        if node.kind == DATASET:
            lines = ws.payload_text(node).strip().splitlines()[1:]
            smiles = [l.split(",")[0] for l in lines]
        elif node.kind in (FEATURE_SET, MERGED_FEATURE_SET):
            smiles = json.loads(ws.payload_text(node))["smiles"]
        elif node.kind == GENERATION_RESULT:
            smiles = []
            for item in json.loads(ws.payload_text(node))["items"]:
                for s in item["smiles"]:
                    if s not in smiles:
                        smiles.append(s)
        else:
            return _error(400, "validation", f"{node.kind} nodes hold no molecules")
        page = smiles[offset : offset + max(0, limit)]
        return {"total": len(smiles), "offset": offset, "limit": limit, "smiles": page}

    @app.get("/nodes/{node_id}/model")
    async def get_model(node_id: str):
        ws, node = find_node(node_id)
        if node is None:
            return _error(404, "not-found", f"no node {node_id!r}")
        if node.kind != MODEL:
            return _error(400, "validation", f"node {node_id!r} is a {node.kind}")
        return {"id": node.id, "params": node.params, "text": ws.payload_text(node)}

    @app.get("/nodes/{node_id}/candidates")
    async def get_candidates(node_id: str):
        ws, node = find_node(node_id)
        if node is None:
            return _error(404, "not-found", f"no node {node_id!r}")
        if node.kind != SEARCH_RESULT:
            return _error(400, "validation", f"node {node_id!r} is a {node.kind}")
        d = json.loads(ws.payload_text(node))
        return {"id": node.id, "candidates": d["candidates"]}

    @app.get("/nodes/{node_id}/payload")
    async def get_payload(node_id: str):
        ws, node = find_node(node_id)
        if node is None:
            return _error(404, "not-found", f"no node {node_id!r}")
        return PlainTextResponse(ws.payload_text(node))

    @app.get("/molecules/svg")
    async def molecule_svg(smiles: str):
        try:
            svg = depict(parse_smiles(smiles))
        except ChemError as exc:
            return _error(400, "smiles", str(exc))
        except DepictError as exc:
            return _error(400, "too-large", str(exc))
        return Response(svg, media_type="image/svg+xml")

    static_dir = os.environ.get("MID_STATIC_DIR")
    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
