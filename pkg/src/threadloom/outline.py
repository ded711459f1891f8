"""Editable outline tree with an incrementally maintained reference panel.

The outline is a rooted tree of thread nodes (labeled headings) and
context leaves (citation passages copied out of a hierarchy). Imports are
deep copies; edits are small commands validated before any mutation, so a
rejected command leaves the outline untouched. A revision counter
increments on every successful edit and backs optimistic concurrency.

The reference panel ranks the papers the outline's contexts cite. It is
maintained incrementally on every edit and can always be recomputed from
scratch; the two must agree after any edit sequence.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus.models import CitationContext

ROOT_ID = "root"
ROOT_LABEL = "Your Outline"


class InvalidEditError(ValueError):
    """The command can never apply to the current tree (bad target, cycle)."""


class StaleRevisionError(Exception):
    """The command was built against an older revision of the outline."""

    def __init__(self, current_revision: int):
        super().__init__(f"outline is at revision {current_revision}")
        self.current_revision = current_revision


@dataclass
class OutlineNode:
    node_id: str
    kind: str  # "thread" | "context"
    label: str = ""
    context: CitationContext | None = None
    provenance: str | None = None
    children: list["OutlineNode"] = field(default_factory=list)

    def to_dict(self) -> dict:
        data: dict = {
            "node_id": self.node_id,
            "kind": self.kind,
            "provenance": self.provenance,
        }
        if self.kind == "thread":
            data["label"] = self.label
            data["children"] = [child.to_dict() for child in self.children]
        else:
            data["context"] = self.context.to_dict() if self.context else None
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "OutlineNode":
        node = cls(
            node_id=data["node_id"],
            kind=data["kind"],
            label=data.get("label", ""),
            provenance=data.get("provenance"),
        )
        if node.kind == "context" and data.get("context"):
            node.context = CitationContext.from_dict(data["context"])
        node.children = [
            cls.from_dict(child) for child in data.get("children", [])
        ]
        return node


@dataclass(frozen=True)
class ReferenceEntry:
    """One panel row: a cited paper and the outline contexts citing it."""

    paper_id: str
    context_count: int
    context_ids: tuple[str, ...]  # sorted, duplicates kept


def _cited_papers(context: CitationContext) -> list[str]:
    """Papers a context contributes to the panel.

    Extracted contexts contribute their cited papers; fallback
    pseudo-contexts (no cited ids) stand for their source paper.
    """
    return list(context.cited_ids) if context.cited_ids else [context.source_paper_id]


class Outline:
    """The outline document. All edits go through the public methods."""

    def __init__(self):
        self.root = OutlineNode(node_id=ROOT_ID, kind="thread", label=ROOT_LABEL)
        self.revision = 0
        self._next_id = 1
        self._nodes: dict[str, OutlineNode] = {ROOT_ID: self.root}
        self._parents: dict[str, str] = {}
        # paper_id -> multiset of contributing context_ids
        self._panel_index: dict[str, Counter] = {}

    # -- queries -------------------------------------------------------

    def node(self, node_id: str) -> OutlineNode:
        node = self._nodes.get(node_id)
        if node is None:
            raise InvalidEditError(f"unknown outline node {node_id!r}")
        return node

    def context_nodes(self) -> list[OutlineNode]:
        out: list[OutlineNode] = []

        def walk(node: OutlineNode) -> None:
            if node.kind == "context":
                out.append(node)
            for child in node.children:
                walk(child)

        walk(self.root)
        return out

    def reference_panel(self) -> list[ReferenceEntry]:
        """From-scratch panel: walk the tree and rank cited papers."""
        index: dict[str, Counter] = {}
        for node in self.context_nodes():
            if node.context is None:
                continue
            for paper_id in _cited_papers(node.context):
                index.setdefault(paper_id, Counter())[node.context.context_id] += 1
        return _panel_from(index)

    def panel_from_index(self) -> list[ReferenceEntry]:
        """Incrementally maintained panel; must equal reference_panel()."""
        return _panel_from(self._panel_index)

    def to_dict(self) -> dict:
        return {
            "revision": self.revision,
            "next_id": self._next_id,
            "root": self.root.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Outline":
        outline = cls()
        outline.revision = int(data["revision"])
        outline._next_id = int(data.get("next_id", 1))
        outline.root = OutlineNode.from_dict(data["root"])
        outline._nodes = {}
        outline._parents = {}
        outline._panel_index = {}
        outline._reindex(outline.root, parent_id=None)
        return outline

    # -- commands ------------------------------------------------------

    def apply(self, command: dict) -> dict:
        """Validate and apply one wire command {op, target, payload, revision}.

        `target` is the node the op acts on (the parent for import and
        insert_child). The command must carry the current revision;
        mismatches raise StaleRevisionError without touching the tree.
        Returns a small result dict including the new revision.
        """
        if command.get("revision") != self.revision:
            raise StaleRevisionError(self.revision)
        op = command.get("op")
        target = command.get("target", ROOT_ID)
        payload = command.get("payload") or {}
        result: dict = {}
        if op == "import":
            result["node_id"] = self.import_subtree(
                target, payload.get("subtree") or {}, payload.get("position")
            )
        elif op == "insert_child":
            result["node_id"] = self.insert_child(
                target, payload.get("label", ""), payload.get("position")
            )
        elif op == "edit_label":
            self.edit_label(target, payload.get("label", ""))
        elif op == "remove_subtree":
            self.remove_subtree(target)
        elif op == "remove_and_promote":
            self.remove_and_promote(target)
        elif op == "move":
            self.move(
                target, payload.get("new_parent_id", ROOT_ID), payload.get("position")
            )
        else:
            raise InvalidEditError(f"unknown outline op {op!r}")
        result["revision"] = self.revision
        return result

    # -- edit operations ----------------------------------------------

    def import_subtree(
        self, parent_id: str, source: dict, position: int | None = None
    ) -> str:
        """Deep-copy a hierarchy node or single context under a thread.

        `source` is a serialized hierarchy node (with "level", "label",
        "children", "contexts") or a serialized context (with "text").
        Returns the new outline node's id.
        """
        parent = self._require_thread(parent_id)
        saved_next_id = self._next_id
        try:
            copied = self._copy_source(source)
        except InvalidEditError:
            self._next_id = saved_next_id
            raise
        except Exception as exc:
            self._next_id = saved_next_id
            raise InvalidEditError(f"malformed import payload: {exc}") from exc
        self._attach(parent, copied, position)
        self.revision += 1
        return copied.node_id

    def insert_child(
        self, parent_id: str, label: str, position: int | None = None
    ) -> str:
        parent = self._require_thread(parent_id)
        label = label.strip()
        if not label:
            raise InvalidEditError("thread label must be non-empty")
        node = OutlineNode(node_id=self._fresh_id(), kind="thread", label=label)
        self._attach(parent, node, position)
        self.revision += 1
        return node.node_id

    def edit_label(self, node_id: str, label: str) -> None:
        node = self.node(node_id)
        if node.kind != "thread":
            raise InvalidEditError("only thread labels can be edited")
        label = label.strip()
        if not label:
            raise InvalidEditError("thread label must be non-empty")
        node.label = label
        self.revision += 1

    def remove_subtree(self, node_id: str) -> None:
        if node_id == ROOT_ID:
            raise InvalidEditError("the outline root cannot be removed")
        node = self.node(node_id)
        parent = self._nodes[self._parents[node_id]]
        parent.children.remove(node)
        self._unregister(node)
        self.revision += 1

    def remove_and_promote(self, node_id: str) -> None:
        """Remove a node, splicing its children into its place in order."""
        if node_id == ROOT_ID:
            raise InvalidEditError("the outline root cannot be removed")
        node = self.node(node_id)
        parent = self._nodes[self._parents[node_id]]
        index = parent.children.index(node)
        children = list(node.children)
        parent.children[index : index + 1] = children
        for child in children:
            self._parents[child.node_id] = parent.node_id
        node.children = []
        self._unregister(node)
        self.revision += 1

    def move(
        self, node_id: str, new_parent_id: str, position: int | None = None
    ) -> None:
        if node_id == ROOT_ID:
            raise InvalidEditError("the outline root cannot be moved")
        node = self.node(node_id)
        new_parent = self._require_thread(new_parent_id)
        probe_id: str | None = new_parent_id
        while probe_id is not None:
            if probe_id == node_id:
                raise InvalidEditError("cannot move a node into its own subtree")
            probe_id = self._parents.get(probe_id)
        old_parent = self._nodes[self._parents[node_id]]
        old_index = old_parent.children.index(node)
        old_parent.children.pop(old_index)
        if position is None:
            position = len(new_parent.children)
        position = max(0, min(position, len(new_parent.children)))
        new_parent.children.insert(position, node)
        self._parents[node_id] = new_parent.node_id
        self.revision += 1

    # -- internals -----------------------------------------------------

    def _fresh_id(self) -> str:
        node_id = f"n{self._next_id}"
        self._next_id += 1
        return node_id

    def _require_thread(self, node_id: str) -> OutlineNode:
        node = self.node(node_id)
        if node.kind != "thread":
            raise InvalidEditError(
                f"node {node_id!r} is a context and cannot hold children"
            )
        return node

    def _attach(
        self, parent: OutlineNode, node: OutlineNode, position: int | None
    ) -> None:
        if position is None:
            position = len(parent.children)
        position = max(0, min(position, len(parent.children)))
        parent.children.insert(position, node)
        self._register(node, parent.node_id)

    def _register(self, node: OutlineNode, parent_id: str) -> None:
        self._nodes[node.node_id] = node
        self._parents[node.node_id] = parent_id
        if node.kind == "context" and node.context is not None:
            for paper_id in _cited_papers(node.context):
                self._panel_index.setdefault(paper_id, Counter())[
                    node.context.context_id
                ] += 1
        for child in node.children:
            self._register(child, node.node_id)

    def _unregister(self, node: OutlineNode) -> None:
        for child in node.children:
            self._unregister(child)
        del self._nodes[node.node_id]
        self._parents.pop(node.node_id, None)
        if node.kind == "context" and node.context is not None:
            for paper_id in _cited_papers(node.context):
                bucket = self._panel_index.get(paper_id)
                if bucket is None:
                    continue
                bucket[node.context.context_id] -= 1
                if bucket[node.context.context_id] <= 0:
                    del bucket[node.context.context_id]
                if not bucket:
                    del self._panel_index[paper_id]

    def _reindex(self, node: OutlineNode, parent_id: str | None) -> None:
        self._nodes[node.node_id] = node
        if parent_id is not None:
            self._parents[node.node_id] = parent_id
        if node.kind == "context" and node.context is not None:
            for paper_id in _cited_papers(node.context):
                self._panel_index.setdefault(paper_id, Counter())[
                    node.context.context_id
                ] += 1
        numeric = _numeric_suffix(node.node_id)
        if numeric is not None and numeric >= self._next_id:
            self._next_id = numeric + 1
        for child in node.children:
            self._reindex(child, node.node_id)

    def _copy_source(self, source: dict) -> OutlineNode:
        if "text" in source:
            context = CitationContext.from_dict(source)
            return OutlineNode(
                node_id=self._fresh_id(),
                kind="context",
                context=context,
                provenance=context.context_id,
            )
        if "level" in source:
            node = OutlineNode(
                node_id=self._fresh_id(),
                kind="thread",
                label=source.get("label", "") or "untitled",
                provenance=source.get("node_id"),
            )
            for child in source.get("children", []):
                node.children.append(self._copy_source(child))
            for context in source.get("contexts", []):
                node.children.append(self._copy_source(context))
            return node
        raise InvalidEditError("import payload is neither a node nor a context")


def _panel_from(index: dict[str, Counter]) -> list[ReferenceEntry]:
    entries = []
    for paper_id, bucket in index.items():
        context_ids = tuple(sorted(bucket.elements()))
        entries.append(
            ReferenceEntry(
                paper_id=paper_id,
                context_count=len(context_ids),
                context_ids=context_ids,
            )
        )
    entries.sort(key=lambda e: (-e.context_count, e.paper_id))
    return entries


def _numeric_suffix(node_id: str) -> int | None:
    if node_id.startswith("n") and node_id[1:].isdigit():
        return int(node_id[1:])
    return None


def find_hierarchy_node(hierarchy_root: dict, node_id: str) -> dict | None:
    """Locate a node or context dict by id inside a serialized hierarchy."""
    if hierarchy_root.get("node_id") == node_id:
        return hierarchy_root
    for context in hierarchy_root.get("contexts", []):
        if context.get("context_id") == node_id:
            return context
    for child in hierarchy_root.get("children", []):
        found = find_hierarchy_node(child, node_id)
        if found is not None:
            return found
    return None


def export_markdown(
    outline: Outline, papers: dict[str, dict] | None = None
) -> str:
    """Render the outline as nested Markdown with a references section."""
    lines: list[str] = []

    def walk(node: OutlineNode, depth: int) -> None:
        if node.kind == "thread":
            lines.append(f"{'#' * min(depth + 1, 6)} {node.label}")
            lines.append("")
            for child in node.children:
                walk(child, depth + 1)
        else:
            context = node.context
            if context is None:
                return
            cited = ", ".join(_cited_papers(context))
            lines.append(f"> {context.text}")
            lines.append(f"> [{cited}]")
            lines.append("")

    walk(outline.root, 0)
    panel = outline.reference_panel()
    if panel:
        lines.append("## References")
        lines.append("")
        for rank, entry in enumerate(panel, start=1):
            title = entry.paper_id
            if papers and entry.paper_id in papers:
                title = papers[entry.paper_id].get("title") or entry.paper_id
            noun = "context" if entry.context_count == 1 else "contexts"
            lines.append(f"{rank}. {title} ({entry.context_count} {noun})")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
