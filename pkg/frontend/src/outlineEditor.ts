// The drag-and-drop outline editor. All mutations go through the service
// as wire commands carrying the last acknowledged revision; local state
// changes only as an optimistic echo of a command in flight, and any 4xx
// restores the pre-command render (409 additionally refetches).

import { ServiceError, type ServiceClient } from "./api.js";
import { renderMarkedText } from "./hierarchyView.js";
import { openContextMenu, type MenuAction } from "./menu.js";
import type { ViewState } from "./state.js";
import type { TooltipController } from "./tooltip.js";
import { describeProvenance } from "./tooltip.js";
import type {
  ContextInfo,
  OutlineCommand,
  OutlineDoc,
  OutlineNode,
} from "./types.js";
import { OUTLINE_ROOT_ID } from "./types.js";

export interface OutlineEditorOptions {
  workspaceId: string;
  tooltips?: TooltipController;
  /** Called after every server-acknowledged change (references refresh). */
  onChanged?: () => void;
  /** Called when the server rejects a command (after the render restore). */
  onRejected?: (error: ServiceError) => void;
  /** Called for affordances this build cannot serve. */
  onNotice?: (message: string) => void;
  /** Label input hook; null cancels the edit. Defaults to window.prompt. */
  promptLabel?: (current: string) => string | null;
}

const PENDING_ID = "pending";

export class OutlineEditor {
  private readonly container: HTMLElement;
  private readonly client: ServiceClient;
  private readonly state: ViewState;
  private readonly options: OutlineEditorOptions;
  private outlineDoc: OutlineDoc | null = null;
  private inFlight = false;

  constructor(
    container: HTMLElement,
    client: ServiceClient,
    state: ViewState,
    options: OutlineEditorOptions,
  ) {
    this.container = container;
    this.client = client;
    this.state = state;
    this.options = options;
    this.container.addEventListener("keydown", (event) =>
      this.handleKeydown(event as KeyboardEvent),
    );
  }

  get revision(): number {
    return this.state.outlineRevision;
  }

  get doc(): OutlineDoc | null {
    return this.outlineDoc;
  }

  async load(): Promise<void> {
    this.adopt(await this.client.getOutline(this.options.workspaceId));
    this.render();
  }

  private adopt(doc: OutlineDoc): void {
    this.outlineDoc = doc;
    this.state.setRevision(doc.revision);
  }

  /** The context payload carried by an outline node, if any. */
  findContext(contextId: string): ContextInfo | null {
    if (this.outlineDoc === null) return null;
    let found: ContextInfo | null = null;
    walk(this.outlineDoc.root, (node) => {
      if (node.context && node.context.context_id === contextId) {
        found = node.context;
      }
    });
    return found;
  }

  // -- rendering -----------------------------------------------------

  render(): void {
    this.container.textContent = "";
    if (this.outlineDoc === null) return;
    this.container.appendChild(this.renderNode(this.outlineDoc.root, true));
  }

  private docEl(): Document {
    return this.container.ownerDocument;
  }

  private renderNode(node: OutlineNode, isRoot: boolean): HTMLElement {
    const doc = this.docEl();
    const el = doc.createElement("div");
    el.dataset.nodeId = node.node_id;
    el.tabIndex = 0;
    if (node.node_id === PENDING_ID) el.classList.add("tl-pending");

    if (node.kind === "context" && node.context) {
      el.className += " tl-outline-node tl-outline-context";
      el.dataset.contextId = node.context.context_id;
      this.wireContextNode(el, node);
      const body = doc.createElement("div");
      body.className = "tl-context-text";
      renderMarkedText(body, node.context, this.options.tooltips);
      el.appendChild(body);
      const provenance = doc.createElement("div");
      provenance.className = "tl-provenance";
      provenance.textContent = describeProvenance(node.context);
      el.appendChild(provenance);
      return el;
    }

    el.className += isRoot
      ? " tl-outline-node tl-outline-root"
      : " tl-outline-node tl-outline-thread";
    const header = doc.createElement("div");
    header.className = "tl-outline-label";
    header.textContent = node.label ?? "";
    el.appendChild(header);
    this.wireThreadNode(el, node, isRoot);

    const children = doc.createElement("div");
    children.className = "tl-outline-children";
    for (const child of node.children ?? []) {
      children.appendChild(this.renderNode(child, false));
    }
    el.appendChild(children);
    return el;
  }

  private wireThreadNode(
    el: HTMLElement,
    node: OutlineNode,
    isRoot: boolean,
  ): void {
    el.addEventListener("dragover", (event) => {
      if (this.state.dragPayload === null) return;
      event.preventDefault();
      event.stopPropagation();
      el.classList.add("tl-drop-ok");
    });
    el.addEventListener("dragleave", () => el.classList.remove("tl-drop-ok"));
    el.addEventListener("drop", (event) => {
      event.preventDefault();
      event.stopPropagation();
      el.classList.remove("tl-drop-ok");
      void this.handleDrop(node.node_id);
    });
    if (!isRoot) {
      el.draggable = true;
      el.addEventListener("dragstart", (event) => {
        event.stopPropagation();
        this.state.beginDrag({
          kind: "outline-node",
          nodeId: node.node_id,
          label: node.label,
        });
        (event as DragEvent).dataTransfer?.setData("text/plain", node.node_id);
      });
      el.addEventListener("dragend", () => this.state.endDrag());
    }
    el.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      event.stopPropagation();
      if (isRoot) return; // the root accepts drops but has no menu
      openContextMenu(this.docEl(), {
        kind: "thread",
        x: (event as MouseEvent).clientX,
        y: (event as MouseEvent).clientY,
        onAction: (action) => void this.runMenuAction(node, action),
      });
    });
  }

  private wireContextNode(el: HTMLElement, node: OutlineNode): void {
    // Contexts are leaves: dropping into one is rejected client-side.
    el.addEventListener("dragover", (event) => {
      if (this.state.dragPayload === null) return;
      event.stopPropagation();
      el.classList.add("tl-drop-reject");
    });
    el.addEventListener("dragleave", () =>
      el.classList.remove("tl-drop-reject"),
    );
    el.addEventListener("drop", (event) => {
      event.preventDefault();
      event.stopPropagation();
      el.classList.add("tl-drop-reject");
      this.state.endDrag();
    });
    el.draggable = true;
    el.addEventListener("dragstart", (event) => {
      event.stopPropagation();
      this.state.beginDrag({ kind: "outline-node", nodeId: node.node_id });
      (event as DragEvent).dataTransfer?.setData("text/plain", node.node_id);
    });
    el.addEventListener("dragend", () => this.state.endDrag());
    el.addEventListener("contextmenu", (event) => {
      event.preventDefault();
      event.stopPropagation();
      openContextMenu(this.docEl(), {
        kind: "context",
        x: (event as MouseEvent).clientX,
        y: (event as MouseEvent).clientY,
        onAction: (action) => void this.runMenuAction(node, action),
      });
    });
  }

  // -- drops -----------------------------------------------------------

  async handleDrop(targetId: string): Promise<void> {
    const payload = this.state.dragPayload;
    this.state.endDrag();
    if (payload === null) return;

    if (payload.kind === "hierarchy-node") {
      if (payload.jobId === undefined) return;
      await this.send(
        {
          op: "import",
          target: targetId,
          payload: { job_id: payload.jobId, source_node_id: payload.nodeId },
          revision: this.state.outlineRevision,
        },
        (draft) =>
          appendEcho(draft, targetId, payload.label ?? payload.nodeId),
      );
      return;
    }

    if (payload.nodeId === targetId) return;
    await this.send(
      {
        op: "move",
        target: payload.nodeId,
        payload: { new_parent_id: targetId },
        revision: this.state.outlineRevision,
      },
      (draft) => moveEcho(draft, payload.nodeId, targetId),
    );
  }

  // -- context menu ----------------------------------------------------

  private async runMenuAction(
    node: OutlineNode,
    action: MenuAction,
  ): Promise<void> {
    const revision = this.state.outlineRevision;
    switch (action) {
      case "insert-child": {
        const label = this.prompt("");
        if (label === null || label.trim() === "") return;
        await this.send(
          {
            op: "insert_child",
            target: node.node_id,
            payload: { label },
            revision,
          },
          (draft) => appendEcho(draft, node.node_id, label),
        );
        return;
      }
      case "remove-subtree": {
        await this.send(
          { op: "remove_subtree", target: node.node_id, payload: {}, revision },
          (draft) => removeEcho(draft, node.node_id),
        );
        return;
      }
      case "remove-and-promote": {
        await this.send(
          {
            op: "remove_and_promote",
            target: node.node_id,
            payload: {},
            revision,
          },
          (draft) => promoteEcho(draft, node.node_id),
        );
        return;
      }
      case "edit": {
        if (node.kind === "context") {
          this.options.onNotice?.(
            "Context text is read-only; remove it and import a different one instead.",
          );
          return;
        }
        const label = this.prompt(node.label ?? "");
        if (label === null || label.trim() === "") return;
        await this.send(
          {
            op: "edit_label",
            target: node.node_id,
            payload: { label },
            revision,
          },
          (draft) => editLabelEcho(draft, node.node_id, label),
        );
        return;
      }
      case "cancel":
        return;
    }
  }

  private prompt(current: string): string | null {
    if (this.options.promptLabel) return this.options.promptLabel(current);
    const win = this.docEl().defaultView;
    return win ? win.prompt("Thread label", current) : null;
  }

  // -- keyboard alternative to drag-and-drop ---------------------------

  private cutNodeId: string | null = null;

  private handleKeydown(event: KeyboardEvent): void {
    if (!(event.ctrlKey || event.metaKey)) {
      if (event.key === "Escape") this.cutNodeId = null;
      return;
    }
    const focused = (event.target as HTMLElement | null)?.closest?.(
      "[data-node-id]",
    ) as HTMLElement | null;
    const nodeId = focused?.dataset.nodeId;
    if (!nodeId) return;
    if (event.key.toLowerCase() === "x" && nodeId !== OUTLINE_ROOT_ID) {
      event.preventDefault();
      this.cutNodeId = nodeId;
      focused?.classList.add("tl-cut");
    } else if (event.key.toLowerCase() === "v" && this.cutNodeId !== null) {
      event.preventDefault();
      const moving = this.cutNodeId;
      this.cutNodeId = null;
      void this.send(
        {
          op: "move",
          target: moving,
          payload: { new_parent_id: nodeId },
          revision: this.state.outlineRevision,
        },
        (draft) => moveEcho(draft, moving, nodeId),
      );
    }
  }

  // -- the optimistic command loop -------------------------------------

  /**
   * Send one command. The echo mutates a draft copy for immediate
   * feedback; the server response is authoritative. On 4xx the
   * pre-command render is restored and, for 409, the outline refetched.
   */
  async send(
    command: OutlineCommand,
    echo?: (draft: OutlineDoc) => void,
  ): Promise<void> {
    if (this.outlineDoc === null || this.inFlight) return;
    this.inFlight = true;
    const snapshotDoc = this.outlineDoc;
    const snapshotHtml = this.container.innerHTML;

    if (echo) {
      const draft = structuredClone(snapshotDoc);
      try {
        echo(draft);
        this.outlineDoc = draft;
        this.render();
        this.container.classList.add("tl-awaiting-ack");
      } catch {
        // echo failure is cosmetic only; the command still goes out
        this.outlineDoc = snapshotDoc;
      }
    }

    try {
      const result = await this.client.applyOutline(
        this.options.workspaceId,
        command,
      );
      this.adopt(result.outline);
      this.render();
      this.options.onChanged?.();
    } catch (error) {
      // Any rejection restores exactly what was on screen beforehand.
      this.outlineDoc = snapshotDoc;
      this.container.innerHTML = snapshotHtml;
      if (error instanceof ServiceError) {
        if (error.status === 409) {
          this.inFlight = false;
          await this.load();
        }
        this.options.onRejected?.(error);
      } else {
        throw error;
      }
    } finally {
      this.container.classList.remove("tl-awaiting-ack");
      this.inFlight = false;
    }
  }
}

// -- echo helpers over the plain outline dict --------------------------

function walk(node: OutlineNode, visit: (node: OutlineNode) => void): void {
  visit(node);
  for (const child of node.children ?? []) walk(child, visit);
}

function findNode(doc: OutlineDoc, nodeId: string): OutlineNode | null {
  let found: OutlineNode | null = null;
  walk(doc.root, (node) => {
    if (node.node_id === nodeId) found = node;
  });
  return found;
}

function findParent(doc: OutlineDoc, nodeId: string): OutlineNode | null {
  let found: OutlineNode | null = null;
  walk(doc.root, (node) => {
    if ((node.children ?? []).some((child) => child.node_id === nodeId)) {
      found = node;
    }
  });
  return found;
}

function appendEcho(draft: OutlineDoc, parentId: string, label: string): void {
  const parent = findNode(draft, parentId);
  if (parent === null || parent.kind !== "thread") return;
  parent.children = parent.children ?? [];
  parent.children.push({
    node_id: PENDING_ID,
    kind: "thread",
    provenance: null,
    label,
    children: [],
  });
}

function removeEcho(draft: OutlineDoc, nodeId: string): void {
  const parent = findParent(draft, nodeId);
  if (parent === null) return;
  parent.children = (parent.children ?? []).filter(
    (child) => child.node_id !== nodeId,
  );
}

function promoteEcho(draft: OutlineDoc, nodeId: string): void {
  const parent = findParent(draft, nodeId);
  if (parent === null) return;
  const children = parent.children ?? [];
  const index = children.findIndex((child) => child.node_id === nodeId);
  if (index < 0) return;
  children.splice(index, 1, ...(children[index].children ?? []));
}

function editLabelEcho(draft: OutlineDoc, nodeId: string, label: string): void {
  const node = findNode(draft, nodeId);
  if (node !== null && node.kind === "thread") node.label = label;
}

function moveEcho(draft: OutlineDoc, nodeId: string, newParentId: string): void {
  const node = findNode(draft, nodeId);
  const newParent = findNode(draft, newParentId);
  if (node === null || newParent === null || newParent.kind !== "thread") {
    return;
  }
  // moving into one's own subtree is a server-side rejection; skip the echo
  let cyclic = false;
  walk(node, (inner) => {
    if (inner.node_id === newParentId) cyclic = true;
  });
  if (cyclic) return;
  removeEcho(draft, nodeId);
  newParent.children = newParent.children ?? [];
  newParent.children.push(node);
}
