"""HTTP facade: workspaces, clips, synthesis jobs, outlines, references.

The app is built by `create_app` from a workspace directory and a
dependency bundle, so tests and the CLI can wire snapshot or live
providers interchangeably. Every acknowledged write hits disk before the
response is sent; job execution runs off the request path and is observed
by polling the job snapshot.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .corpus.client import CorpusClient
from .errors import ProviderUnreachableError
from .graph import SeedClip
from .orchestrator import PipelineConfig, SynthesisJob, execute_job
from .outline import (
    InvalidEditError,
    StaleRevisionError,
    export_markdown,
    find_hierarchy_node,
)
from .storage import WorkspaceNotFoundError, WorkspaceStore


@dataclass
class ServiceDeps:
    """Everything the pipeline needs, injected so tests can swap providers."""

    client: CorpusClient
    embedder: object
    generator: object
    config: PipelineConfig = field(default_factory=PipelineConfig)
    api_token: str | None = None
    # Run jobs on the request thread; used by tests and the offline CLI.
    synchronous_jobs: bool = False


class ClipIn(BaseModel):
    text: str = ""
    seed_reference_ids: list[str] = []


class SynthesisIn(BaseModel):
    clip_ids: list[str]


def create_app(workspace_root: str, deps: ServiceDeps) -> FastAPI:
    app = FastAPI(title="threadloom", docs_url=None, redoc_url=None)
    store = WorkspaceStore(workspace_root)

    def error(status: int, detail: str, **extra) -> JSONResponse:
        return JSONResponse({"detail": detail, **extra}, status_code=status)

    @app.exception_handler(WorkspaceNotFoundError)
    async def _workspace_missing(request: Request, exc: WorkspaceNotFoundError):
        return error(404, f"unknown workspace {exc.workspace_id!r}")

    @app.exception_handler(ProviderUnreachableError)
    async def _provider_down(request: Request, exc: ProviderUnreachableError):
        return error(502, str(exc))

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        if deps.api_token is not None:
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {deps.api_token}":
                return error(401, "missing or invalid bearer token")
        return await call_next(request)

    # -- workspaces and clips -----------------------------------------

    @app.post("/workspaces", status_code=201)
    def create_workspace():
        workspace_id = store.create_workspace()
        return {"workspace_id": workspace_id}

    @app.get("/workspaces/{workspace_id}/clips")
    def list_clips(workspace_id: str):
        clips = store.load_clips(workspace_id)
        return {
            "clips": [clips[clip_id].to_dict() for clip_id in sorted(clips)]
        }

    @app.post("/workspaces/{workspace_id}/clips", status_code=201)
    def add_clip(workspace_id: str, clip: ClipIn):
        store.require(workspace_id)
        if not clip.text.strip():
            return error(400, "clip text must be non-empty")
        if not clip.seed_reference_ids:
            return error(400, "clip needs at least one seed reference")
        for seed in clip.seed_reference_ids:
            if deps.client.metadata.get_paper(seed) is None:
                return error(400, f"seed reference {seed!r} does not resolve")
        with store.lock(workspace_id):
            clips = store.load_clips(workspace_id)
            clip_id = f"clip{len(clips):03d}"
            while clip_id in clips:
                clip_id = f"clip{uuid.uuid4().hex[:8]}"
            stored = SeedClip(
                clip_id=clip_id,
                text=clip.text,
                seed_reference_ids=list(clip.seed_reference_ids),
            )
            clips[clip_id] = stored
            store.save_clips(workspace_id, clips)
        return stored.to_dict()

    # -- synthesis jobs ------------------------------------------------

    @app.post("/workspaces/{workspace_id}/syntheses", status_code=202)
    def start_synthesis(workspace_id: str, request: SynthesisIn):
        store.require(workspace_id)
        clips = store.load_clips(workspace_id)
        if not request.clip_ids:
            return error(400, "clip_ids must be non-empty")
        missing = [cid for cid in request.clip_ids if cid not in clips]
        if missing:
            return error(404, f"unknown clips: {', '.join(sorted(missing))}")
        selected = [clips[cid] for cid in request.clip_ids]
        job = SynthesisJob(
            job_id=uuid.uuid4().hex,
            clip_ids=list(request.clip_ids),
            created_at=time.time(),
        )
        job_store = store.job_store(workspace_id)
        job_store.save_job(job)  # acknowledged only after this write

        def work():
            execute_job(
                job,
                job_store,
                selected,
                deps.client,
                deps.embedder,
                deps.generator,
                config=deps.config,
            )

        if deps.synchronous_jobs:
            work()
        else:
            threading.Thread(target=work, daemon=True).start()
        return {"job_id": job.job_id}

    @app.get("/workspaces/{workspace_id}/syntheses/{job_id}")
    def job_snapshot(workspace_id: str, job_id: str):
        job = store.job_store(workspace_id).load_job(job_id)
        if job is None:
            return error(404, f"unknown job {job_id!r}")
        return job.to_dict()

    @app.get("/workspaces/{workspace_id}/hierarchies/{job_id}")
    def job_hierarchy(workspace_id: str, job_id: str):
        job_store = store.job_store(workspace_id)
        job = job_store.load_job(job_id)
        if job is None:
            return error(404, f"unknown job {job_id!r}")
        if job.state != "done":
            return error(409, f"job {job_id!r} is {job.state}, not done")
        return job_store.load_result(job_id)

    # -- outline -------------------------------------------------------

    @app.get("/workspaces/{workspace_id}/outline")
    def get_outline(workspace_id: str):
        outline = store.load_outline(workspace_id)
        return outline.to_dict()

    @app.put("/workspaces/{workspace_id}/outline")
    def edit_outline(workspace_id: str, command: dict = Body(...)):
        store.require(workspace_id)
        with store.lock(workspace_id):
            outline = store.load_outline(workspace_id)
            resolved = _resolve_import(store, workspace_id, command)
            if isinstance(resolved, JSONResponse):
                return resolved
            try:
                result = outline.apply(resolved)
            except StaleRevisionError as exc:
                return error(
                    409,
                    "stale revision",
                    revision=exc.current_revision,
                )
            except InvalidEditError as exc:
                return error(422, str(exc))
            store.save_outline(workspace_id, outline)
        return {**result, "outline": outline.to_dict()}

    @app.get("/workspaces/{workspace_id}/outline/markdown")
    def outline_markdown(workspace_id: str):
        outline = store.load_outline(workspace_id)
        papers = _paper_lookup(
            deps, [entry.paper_id for entry in outline.reference_panel()]
        )
        return PlainTextResponse(export_markdown(outline, papers))

    @app.get("/workspaces/{workspace_id}/references")
    def reference_panel(workspace_id: str):
        outline = store.load_outline(workspace_id)
        panel = outline.reference_panel()
        papers = _paper_lookup(deps, [entry.paper_id for entry in panel])
        return {
            "references": [
                {
                    "paper_id": entry.paper_id,
                    "context_count": entry.context_count,
                    "context_ids": list(entry.context_ids),
                    "paper": papers.get(entry.paper_id),
                }
                for entry in panel
            ]
        }

    # -- paper metadata proxy -----------------------------------------

    @app.get("/papers/{paper_id}")
    def paper_metadata(paper_id: str):
        record = deps.client.metadata.get_paper(paper_id)
        if record is None:
            return error(404, f"unknown paper {paper_id!r}")
        return record.to_dict()

    return app


def _resolve_import(
    store: WorkspaceStore, workspace_id: str, command: dict
) -> dict | JSONResponse:
    """Inline the referenced hierarchy subtree into an import command."""
    if command.get("op") != "import":
        return command
    payload = dict(command.get("payload") or {})
    if "subtree" in payload:
        return command
    job_id = payload.get("job_id")
    source_id = payload.get("source_node_id")
    result = (
        store.job_store(workspace_id).load_result(job_id) if job_id else None
    )
    hierarchy = (result or {}).get("hierarchy")
    if hierarchy is None:
        return JSONResponse(
            {"detail": f"no finished hierarchy for job {job_id!r}"},
            status_code=422,
        )
    node = find_hierarchy_node(hierarchy, source_id) if source_id else None
    if node is None:
        return JSONResponse(
            {"detail": f"node {source_id!r} not found in job {job_id!r}"},
            status_code=422,
        )
    payload["subtree"] = node
    return {**command, "payload": payload}


def _paper_lookup(deps: ServiceDeps, paper_ids: list[str]) -> dict[str, dict]:
    papers: dict[str, dict] = {}
    for paper_id in paper_ids:
        try:
            record = deps.client.metadata.get_paper(paper_id)
        except Exception:
            record = None
        if record is not None:
            papers[paper_id] = record.to_dict()
    return papers
