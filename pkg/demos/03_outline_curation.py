"""Curate an outline: import system threads, edit, survive a conflict.

The outline is the user-owned half of the workflow. This script imports a
thread from a synthesized hierarchy, rearranges it with the full edit
vocabulary, shows how a stale revision is rejected without side effects,
and prints the exported markdown plus the automatically ranked reference
panel at the end.

Run from the repository root:

    python3 demos/03_outline_curation.py
"""

from __future__ import annotations

from threadloom.outline import (
    Outline,
    ROOT_ID,
    StaleRevisionError,
    export_markdown,
)

from _support import banner


def context(cid: str, text: str, cited) -> dict:
    return {
        "context_id": cid, "source_paper_id": "survey_2020", "text": text,
        "cited_ids": list(cited), "section_header": "Related Work",
        "page_number": 2,
    }


SYSTEM_THREAD = {
    "node_id": "g000.t000",
    "level": "thread",
    "label": "sparse attention kernels",
    "color_index": 0,
    "degraded": False,
    "children": [],
    "contexts": [
        context("c000", "Block-sparse kernels cut attention cost.", ["p_atten"]),
        context("c001", "Sliding windows bound the context length.", ["p_atten", "p_long"]),
        context("c002", "Routing layers pick tokens dynamically.", ["p_route"]),
    ],
}


def cmd(outline: Outline, op: str, target: str = ROOT_ID, **payload) -> dict:
    return {
        "op": op, "target": target,
        "payload": payload, "revision": outline.revision,
    }


def main() -> None:
    outline = Outline()

    banner("Import a synthesized thread, then shape the outline")
    outline.apply(cmd(outline, "import", subtree=SYSTEM_THREAD))
    background = outline.apply(
        cmd(outline, "insert_child", label="Background")
    )["node_id"]
    outline.apply(cmd(
        outline, "import", target=background,
        subtree=context("c100", "Dense attention is quadratic.", ["p_base"]),
    ))
    # Move the imported thread under Background and rename it.
    thread_id = outline.to_dict()["root"]["children"][0]["node_id"]
    outline.apply(cmd(
        outline, "move", target=thread_id,
        new_parent_id=background, position=1,
    ))
    outline.apply(cmd(
        outline, "edit_label", target=thread_id,
        label="Efficient attention variants",
    ))
    print(f"outline revision is now {outline.revision}")

    banner("A concurrent editor with a stale revision is refused")
    stale = {
        "op": "remove_subtree", "target": background,
        "payload": {}, "revision": 0,
    }
    try:
        outline.apply(stale)
    except StaleRevisionError as exc:
        print(
            f"rejected: command carried revision 0, outline is at "
            f"{exc.current_revision}; nothing changed"
        )

    banner("Exported markdown")
    print(export_markdown(outline))

    banner("Reference panel (papers ranked by how often the outline cites them)")
    for entry in outline.reference_panel():
        print(
            f"  {entry.paper_id:8s} cited by {entry.context_count} "
            f"outline context(s): {', '.join(entry.context_ids)}"
        )


if __name__ == "__main__":
    main()
