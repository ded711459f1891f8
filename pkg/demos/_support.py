"""Shared console formatting for the demo scripts."""

from __future__ import annotations

import sys
from pathlib import Path

# Demos live one level below the repository root; resolve the checked-in
# snapshot fixture relative to this file so they run from any directory.
REPO_ROOT = Path(__file__).resolve().parent.parent
SNAPSHOT_DIR = REPO_ROOT / "tests" / "data" / "snapshot"

# The clip the snapshot fixture was built around (see
# tools/make_snapshot_fixture.py).
FIXTURE_CLIP = (
    "anchor corpus baseline evidence measure method passage query "
    "relevance retrieval shared signal study survey tokens benchmark "
    "dataset protocol metric sampling replication artifact notation "
    "appendix citation footnote paragraph section table figure abstract "
    "introduction discussion conclusion review procedure material "
    "analysis experiment observation"
)


def banner(title: str) -> None:
    print()
    print("=" * 72)
    print(title)
    print("=" * 72)


def require_snapshot() -> Path:
    if not SNAPSHOT_DIR.exists():
        print(
            "snapshot fixture missing; run "
            "`python3 tools/make_snapshot_fixture.py` first",
            file=sys.stderr,
        )
        raise SystemExit(1)
    return SNAPSHOT_DIR
