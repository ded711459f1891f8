// Hover tooltips. Citation markers reveal the cited paper's metadata
// fetched through the service proxy; reference-panel context cards reveal
// the citation context with the relevant marker highlighted.

import type { ServiceClient } from "./api.js";
import { markerPaperMap, splitMarkers } from "./markers.js";
import type { ViewState } from "./state.js";
import type { ContextInfo } from "./types.js";

function field(
  doc: Document,
  name: string,
  text: string,
  className = "tl-tooltip-field",
): HTMLElement {
  const el = doc.createElement("div");
  el.className = className;
  el.dataset.field = name;
  el.textContent = text;
  return el;
}

export class TooltipController {
  private readonly doc: Document;
  private readonly client: ServiceClient;
  private readonly state: ViewState;
  private current: HTMLElement | null = null;
  // Bumped on every show/hide so a slow fetch cannot resurrect a tooltip
  // the pointer already left.
  private seq = 0;

  constructor(doc: Document, client: ServiceClient, state: ViewState) {
    this.doc = doc;
    this.client = client;
    this.state = state;
  }

  get element(): HTMLElement | null {
    return this.current;
  }

  hide(): void {
    this.seq += 1;
    this.current?.remove();
    this.current = null;
    this.state.tooltipTarget = null;
  }

  private mount(card: HTMLElement, anchor: HTMLElement): HTMLElement {
    this.current?.remove();
    const rect = anchor.getBoundingClientRect();
    card.style.left = `${rect.left}px`;
    card.style.top = `${rect.bottom + 4}px`;
    this.doc.body.appendChild(card);
    this.current = card;
    return card;
  }

  /** Show the metadata card for one paper; degraded card on fetch failure. */
  async showPaper(anchor: HTMLElement, paperId: string): Promise<HTMLElement> {
    this.seq += 1;
    const token = this.seq;
    this.state.tooltipTarget = paperId;

    let card: HTMLElement;
    try {
      const paper = await this.client.getPaper(paperId);
      card = this.doc.createElement("div");
      card.className = "tl-tooltip tl-tooltip-paper";
      card.appendChild(field(this.doc, "title", paper.title, "tl-tooltip-title"));
      card.appendChild(
        field(this.doc, "year", paper.year === null ? "year unknown" : String(paper.year)),
      );
      card.appendChild(field(this.doc, "venue", paper.venue ?? "venue unknown"));
      card.appendChild(
        field(this.doc, "citation-count", `${paper.citation_count} citations`),
      );
      card.appendChild(
        field(
          this.doc,
          "authors",
          paper.authors.length ? paper.authors.join(", ") : "authors unknown",
        ),
      );
      card.appendChild(field(this.doc, "abstract", paper.abstract ?? ""));
    } catch {
      card = this.doc.createElement("div");
      card.className = "tl-tooltip tl-tooltip-paper tl-tooltip-degraded";
      card.appendChild(field(this.doc, "paper-id", paperId, "tl-tooltip-title"));
      card.appendChild(field(this.doc, "note", "metadata unavailable"));
    }

    if (token !== this.seq) {
      // The pointer moved on while the fetch was in flight.
      return card;
    }
    return this.mount(card, anchor);
  }

  /**
   * Show a citation context card; markers resolving to highlightPaperId
   * are rendered highlighted.
   */
  showContext(
    anchor: HTMLElement,
    context: ContextInfo,
    highlightPaperId?: string,
  ): HTMLElement {
    this.seq += 1;
    this.state.tooltipTarget = context.context_id;

    const card = this.doc.createElement("div");
    card.className = "tl-tooltip tl-tooltip-context";
    const body = this.doc.createElement("div");
    body.className = "tl-tooltip-field";
    body.dataset.field = "context-text";
    const byKey = markerPaperMap(context.text, context.cited_ids);
    for (const segment of splitMarkers(context.text)) {
      if (segment.kind === "text") {
        body.appendChild(this.doc.createTextNode(segment.text));
        continue;
      }
      const marker = this.doc.createElement("span");
      marker.className = "tl-marker";
      marker.textContent = segment.text;
      const hit =
        highlightPaperId !== undefined &&
        segment.keys.some((key) => byKey.get(key) === highlightPaperId);
      if (hit) marker.classList.add("tl-marker-highlight");
      body.appendChild(marker);
    }
    card.appendChild(body);
    card.appendChild(
      field(this.doc, "provenance", describeProvenance(context)),
    );
    return this.mount(card, anchor);
  }

  /** Wire hover behavior: paper card on enter, removal on leave. */
  attachPaper(element: HTMLElement, paperId: string): void {
    element.addEventListener("mouseenter", () => {
      void this.showPaper(element, paperId);
    });
    element.addEventListener("mouseleave", () => this.hide());
  }

  attachContext(
    element: HTMLElement,
    context: ContextInfo,
    highlightPaperId?: string,
  ): void {
    element.addEventListener("mouseenter", () => {
      this.showContext(element, context, highlightPaperId);
    });
    element.addEventListener("mouseleave", () => this.hide());
  }
}

export function describeProvenance(context: ContextInfo): string {
  const parts = [context.source_paper_id];
  if (context.section_header) parts.push(context.section_header);
  if (context.page_number !== null && context.page_number !== undefined) {
    parts.push(`p. ${context.page_number}`);
  }
  return parts.join(", ");
}
