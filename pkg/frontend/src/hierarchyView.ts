// Renders a synthesized hierarchy as an indented interactive tree:
// color bars per group, collapsible threads, contexts grouped by source
// paper with three visible by default, and draggable nodes for curation.

import { splitMarkers, markerPaperMap } from "./markers.js";
import type { ViewState } from "./state.js";
import type { TooltipController } from "./tooltip.js";
import { describeProvenance } from "./tooltip.js";
import type {
  ContextInfo,
  HierarchyNode,
  PaperInfo,
  SynthesisResult,
} from "./types.js";
import { paletteColor } from "./types.js";

export const DEFAULT_VISIBLE_CONTEXTS = 3;

export interface HierarchyViewOptions {
  /** Job the hierarchy came from; stamped into drag payloads for import. */
  jobId?: string;
  tooltips?: TooltipController;
}

export class HierarchyView {
  private readonly container: HTMLElement;
  private readonly state: ViewState;
  private readonly options: HierarchyViewOptions;
  private papers: Record<string, PaperInfo> = {};
  private jobId?: string;

  constructor(
    container: HTMLElement,
    state: ViewState,
    options: HierarchyViewOptions = {},
  ) {
    this.container = container;
    this.state = state;
    this.options = options;
    this.jobId = options.jobId;
  }

  render(result: SynthesisResult, jobId?: string): void {
    if (jobId !== undefined) this.jobId = jobId;
    this.papers = result.papers ?? {};
    this.container.textContent = "";
    if (result.empty || result.hierarchy === null) {
      const empty = this.doc().createElement("p");
      empty.className = "tl-empty";
      empty.textContent =
        "No citation contexts matched your clips; try a broader clip or different seeds.";
      this.container.appendChild(empty);
      return;
    }
    for (const group of result.hierarchy.children) {
      this.container.appendChild(this.renderNode(group, 0));
    }
    for (const context of result.hierarchy.contexts) {
      this.container.appendChild(this.renderContext(context));
    }
  }

  private doc(): Document {
    return this.container.ownerDocument;
  }

  private renderNode(node: HierarchyNode, depth: number): HTMLElement {
    const doc = this.doc();
    const section = doc.createElement("section");
    section.className = depth === 0 ? "tl-node tl-group" : "tl-node tl-thread";
    section.dataset.nodeId = node.node_id;

    const header = doc.createElement("div");
    header.className = "tl-node-header";
    header.draggable = true;
    header.addEventListener("dragstart", (event) => {
      this.state.beginDrag({
        kind: "hierarchy-node",
        nodeId: node.node_id,
        jobId: this.jobId,
        label: node.label,
      });
      setDragData(event, node.node_id);
    });
    header.addEventListener("dragend", () => this.state.endDrag());

    const bar = doc.createElement("span");
    bar.className = "tl-color-bar";
    const color = paletteColor(node.color_index);
    if (color !== null) {
      bar.style.backgroundColor = color;
      bar.dataset.color = color;
    }
    header.appendChild(bar);

    const toggle = doc.createElement("button");
    toggle.type = "button";
    toggle.className = "tl-toggle";
    const expanded = () => !this.state.isExpanded(`collapsed:${node.node_id}`);
    const syncToggle = () => {
      toggle.textContent = expanded() ? "-" : "+";
      body.hidden = !expanded();
      section.classList.toggle("tl-collapsed", !expanded());
    };
    toggle.addEventListener("click", () => {
      // the expanded set records exceptions from the default-open state
      this.state.setExpanded(`collapsed:${node.node_id}`, expanded());
      syncToggle();
    });
    header.appendChild(toggle);

    const label = doc.createElement("span");
    label.className = "tl-node-label";
    label.textContent = node.label;
    header.appendChild(label);
    section.appendChild(header);

    const body = doc.createElement("div");
    body.className = "tl-node-body";
    for (const child of node.children) {
      body.appendChild(this.renderNode(child, depth + 1));
    }
    if (node.contexts.length > 0) {
      body.appendChild(this.renderContextList(node.contexts));
    }
    section.appendChild(body);
    syncToggle();
    return section;
  }

  /** Contexts of one thread, grouped by source paper, three visible. */
  private renderContextList(contexts: ContextInfo[]): HTMLElement {
    const doc = this.doc();
    const list = doc.createElement("div");
    list.className = "tl-context-list";

    const bySource = new Map<string, ContextInfo[]>();
    for (const context of contexts) {
      const bucket = bySource.get(context.source_paper_id);
      if (bucket) {
        bucket.push(context);
      } else {
        bySource.set(context.source_paper_id, [context]);
      }
    }

    let shown = 0;
    const overflow: HTMLElement[] = [];
    for (const [sourceId, bucket] of bySource) {
      const groupEl = doc.createElement("div");
      groupEl.className = "tl-source-group";
      groupEl.dataset.source = sourceId;
      const heading = doc.createElement("div");
      heading.className = "tl-source-heading";
      heading.textContent = this.papers[sourceId]?.title ?? sourceId;
      groupEl.appendChild(heading);
      for (const context of bucket) {
        const card = this.renderContext(context);
        if (shown >= DEFAULT_VISIBLE_CONTEXTS) {
          card.classList.add("tl-overflow");
          card.hidden = true;
          overflow.push(card);
        }
        shown += 1;
        groupEl.appendChild(card);
      }
      list.appendChild(groupEl);
    }

    if (overflow.length > 0) {
      const showMore = doc.createElement("button");
      showMore.type = "button";
      showMore.className = "tl-show-more";
      showMore.textContent = "[show more]";
      showMore.addEventListener("click", () => {
        for (const card of overflow) {
          card.hidden = false;
          card.classList.remove("tl-overflow");
        }
        showMore.remove();
      });
      list.appendChild(showMore);
    }
    return list;
  }

  private renderContext(context: ContextInfo): HTMLElement {
    const doc = this.doc();
    const card = doc.createElement("div");
    card.className = "tl-context";
    card.dataset.contextId = context.context_id;
    card.draggable = true;
    card.addEventListener("dragstart", (event) => {
      event.stopPropagation();
      this.state.beginDrag({
        kind: "hierarchy-node",
        nodeId: context.context_id,
        jobId: this.jobId,
        label: context.text.slice(0, 60),
      });
      setDragData(event, context.context_id);
    });
    card.addEventListener("dragend", () => this.state.endDrag());

    const body = doc.createElement("div");
    body.className = "tl-context-text";
    renderMarkedText(body, context, this.options.tooltips);
    card.appendChild(body);

    const provenance = doc.createElement("div");
    provenance.className = "tl-provenance";
    provenance.textContent = describeProvenance(context);
    card.appendChild(provenance);
    return card;
  }
}

/** Render text with bracketed citation markers as dotted-underline spans. */
export function renderMarkedText(
  target: HTMLElement,
  context: ContextInfo,
  tooltips?: TooltipController,
): void {
  const doc = target.ownerDocument;
  const byKey = markerPaperMap(context.text, context.cited_ids);
  for (const segment of splitMarkers(context.text)) {
    if (segment.kind === "text") {
      target.appendChild(doc.createTextNode(segment.text));
      continue;
    }
    const span = doc.createElement("span");
    span.className = "tl-marker";
    span.textContent = segment.text;
    const paperId = segment.keys
      .map((key) => byKey.get(key))
      .find((id) => id !== undefined);
    if (paperId !== undefined) {
      span.dataset.paperId = paperId;
      tooltips?.attachPaper(span, paperId);
    }
    target.appendChild(span);
  }
}

function setDragData(event: DragEvent, nodeId: string): void {
  // happy-dom fires DragEvent without a dataTransfer; state carries the
  // payload, so this is browser-only affordance.
  event.dataTransfer?.setData("text/plain", nodeId);
}
