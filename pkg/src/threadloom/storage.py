"""Durable workspace state on disk.

Each workspace is a directory under the store root holding the clips, the
outline, and the job records with their synthesis results. Every mutation
is written atomically before the HTTP layer acknowledges it, so a process
restart never loses acknowledged state.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from .graph import SeedClip
from .jsonio import read_json_or_none, write_json_atomic
from .orchestrator import JobStore
from .outline import Outline


class WorkspaceNotFoundError(KeyError):
    def __init__(self, workspace_id: str):
        super().__init__(workspace_id)
        self.workspace_id = workspace_id


class WorkspaceStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, workspace_id: str) -> threading.Lock:
        """Per-workspace mutation lock, created on first use."""
        with self._locks_guard:
            lock = self._locks.get(workspace_id)
            if lock is None:
                lock = self._locks[workspace_id] = threading.Lock()
            return lock

    def create_workspace(self) -> str:
        workspace_id = uuid.uuid4().hex
        directory = self.root / workspace_id
        directory.mkdir(parents=True)
        write_json_atomic(directory / "clips.json", {})
        write_json_atomic(directory / "outline.json", Outline().to_dict())
        return workspace_id

    def exists(self, workspace_id: str) -> bool:
        return (self.root / workspace_id).is_dir()

    def require(self, workspace_id: str) -> Path:
        directory = self.root / workspace_id
        if not directory.is_dir():
            raise WorkspaceNotFoundError(workspace_id)
        return directory

    # -- clips ---------------------------------------------------------

    def load_clips(self, workspace_id: str) -> dict[str, SeedClip]:
        directory = self.require(workspace_id)
        data = read_json_or_none(directory / "clips.json") or {}
        return {
            clip_id: SeedClip.from_dict(entry) for clip_id, entry in data.items()
        }

    def save_clips(self, workspace_id: str, clips: dict[str, SeedClip]) -> None:
        directory = self.require(workspace_id)
        payload = {clip_id: clip.to_dict() for clip_id, clip in clips.items()}
        write_json_atomic(directory / "clips.json", payload)

    # -- outline -------------------------------------------------------

    def load_outline(self, workspace_id: str) -> Outline:
        directory = self.require(workspace_id)
        data = read_json_or_none(directory / "outline.json")
        return Outline.from_dict(data) if data else Outline()

    def save_outline(self, workspace_id: str, outline: Outline) -> None:
        directory = self.require(workspace_id)
        write_json_atomic(directory / "outline.json", outline.to_dict())

    # -- jobs ----------------------------------------------------------

    def job_store(self, workspace_id: str) -> JobStore:
        return JobStore(self.require(workspace_id))
