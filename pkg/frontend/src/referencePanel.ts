// The live reference panel under the outline editor: papers ranked by
// how often the outline cites them, each with one square card per
// citation context. Hovering a card reveals the context with the
// matching inline marker highlighted, in the panel and in the editor.

import type { ServiceClient } from "./api.js";
import type { ViewState } from "./state.js";
import type { TooltipController } from "./tooltip.js";
import type { ContextInfo, ReferenceEntry } from "./types.js";

export interface ReferencePanelOptions {
  workspaceId: string;
  tooltips?: TooltipController;
  /** Resolves a context id to its payload (the outline editor holds them). */
  resolveContext?: (contextId: string) => ContextInfo | null;
  /** Editor subtree in which to highlight markers while hovering a card. */
  highlightRoot?: HTMLElement;
}

export class ReferencePanel {
  private readonly container: HTMLElement;
  private readonly client: ServiceClient;
  private readonly options: ReferencePanelOptions;
  private entries: ReferenceEntry[] = [];

  constructor(
    container: HTMLElement,
    client: ServiceClient,
    _state: ViewState,
    options: ReferencePanelOptions,
  ) {
    this.container = container;
    this.client = client;
    this.options = options;
  }

  get current(): readonly ReferenceEntry[] {
    return this.entries;
  }

  async refresh(): Promise<void> {
    this.entries = await this.client.getReferences(this.options.workspaceId);
    this.render();
  }

  private render(): void {
    const doc = this.container.ownerDocument;
    this.container.textContent = "";
    const list = doc.createElement("ol");
    list.className = "tl-reference-list";
    for (const entry of this.entries) {
      list.appendChild(this.renderEntry(doc, entry));
    }
    this.container.appendChild(list);
  }

  private renderEntry(doc: Document, entry: ReferenceEntry): HTMLElement {
    const item = doc.createElement("li");
    item.className = "tl-reference";
    item.dataset.paperId = entry.paper_id;

    const title = doc.createElement("span");
    title.className = "tl-reference-title";
    title.textContent = entry.paper?.title ?? entry.paper_id;
    this.options.tooltips?.attachPaper(title, entry.paper_id);
    item.appendChild(title);

    const cards = doc.createElement("span");
    cards.className = "tl-context-cards";
    for (const contextId of entry.context_ids) {
      cards.appendChild(this.renderCard(doc, entry, contextId));
    }
    item.appendChild(cards);
    return item;
  }

  private renderCard(
    doc: Document,
    entry: ReferenceEntry,
    contextId: string,
  ): HTMLElement {
    const card = doc.createElement("span");
    card.className = "tl-context-card";
    card.dataset.contextId = contextId;
    card.dataset.paperId = entry.paper_id;

    card.addEventListener("mouseenter", () => {
      const context = this.options.resolveContext?.(contextId) ?? null;
      if (context !== null) {
        this.options.tooltips?.showContext(card, context, entry.paper_id);
      }
      this.setEditorHighlight(contextId, entry.paper_id, true);
    });
    card.addEventListener("mouseleave", () => {
      this.options.tooltips?.hide();
      this.setEditorHighlight(contextId, entry.paper_id, false);
    });
    return card;
  }

  /** Toggle the yellow marker highlight on the editor's rendered context. */
  private setEditorHighlight(
    contextId: string,
    paperId: string,
    on: boolean,
  ): void {
    const root = this.options.highlightRoot;
    if (!root) return;
    // Prefer markers inside the exact context; fall back to every marker
    // for the paper if that context is not on screen.
    let markers = root.querySelectorAll(
      `[data-context-id="${contextId}"] .tl-marker[data-paper-id="${paperId}"]`,
    );
    if (markers.length === 0) {
      markers = root.querySelectorAll(`.tl-marker[data-paper-id="${paperId}"]`);
    }
    markers.forEach((marker) => {
      marker.classList.toggle("tl-marker-highlight", on);
    });
  }
}
