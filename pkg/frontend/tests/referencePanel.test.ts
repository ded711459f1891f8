import { beforeEach, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { ReferencePanel } from "../src/referencePanel.js";
import { ViewState } from "../src/state.js";
import { TooltipController } from "../src/tooltip.js";
import type { ContextInfo } from "../src/types.js";
import { MockService, makeContext, makePaper } from "./mockService.js";

let container: HTMLElement;
let highlightRoot: HTMLElement;

beforeEach(() => {
  document.body.textContent = "";
  container = document.createElement("div");
  highlightRoot = document.createElement("div");
  document.body.appendChild(container);
  document.body.appendChild(highlightRoot);
});

function seededPanelMock(): {
  mock: MockService;
  contexts: Map<string, ContextInfo>;
} {
  const mock = new MockService();
  const cited = makeContext({
    context_id: "pA#c000",
    source_paper_id: "pA",
    text: "Alpha wins [1] over [2].",
    cited_ids: ["pX", "pY"],
  });
  const citedAgain = makeContext({
    context_id: "pA#c001",
    source_paper_id: "pA",
    text: "Alpha extends [1].",
    cited_ids: ["pX"],
  });
  const uncited = makeContext({
    context_id: "pB#c000",
    source_paper_id: "pB",
    text: "No inline markers here.",
    cited_ids: [],
  });
  mock.seedOutline(
    [
      {
        node_id: "n1",
        kind: "thread",
        provenance: null,
        label: "Thread",
        children: [
          { node_id: "n2", kind: "context", provenance: "pA#c000", context: cited },
          {
            node_id: "n3",
            kind: "context",
            provenance: "pA#c001",
            context: citedAgain,
          },
          {
            node_id: "n4",
            kind: "context",
            provenance: "pB#c000",
            context: uncited,
          },
        ],
      },
    ],
    5,
  );
  mock.papers.set("pX", makePaper({ paper_id: "pX", title: "Xylem Networks" }));
  const contexts = new Map<string, ContextInfo>([
    ["pA#c000", cited],
    ["pA#c001", citedAgain],
    ["pB#c000", uncited],
  ]);
  return { mock, contexts };
}

function buildPanel(
  mock: MockService,
  contexts: Map<string, ContextInfo>,
): ReferencePanel {
  const client = new ServiceClient("http://svc", { fetchFn: mock.fetch });
  const state = new ViewState();
  const tooltips = new TooltipController(document, client, state);
  return new ReferencePanel(container, client, state, {
    workspaceId: mock.workspaceId,
    tooltips,
    resolveContext: (contextId) => contexts.get(contextId) ?? null,
    highlightRoot,
  });
}

describe("ReferencePanel", () => {
  it("ranks papers by citation count with one square card per context", async () => {
    const { mock, contexts } = seededPanelMock();
    const panel = buildPanel(mock, contexts);
    await panel.refresh();

    const rows = container.querySelectorAll(".tl-reference");
    // pX cited by two contexts, pB (fallback to source) and pY by one each
    expect(
      [...rows].map((row) => (row as HTMLElement).dataset.paperId),
    ).toEqual(["pX", "pB", "pY"]);

    const cardCounts = [...rows].map(
      (row) => row.querySelectorAll(".tl-context-card").length,
    );
    expect(cardCounts).toEqual([2, 1, 1]);
    expect(panel.current.map((entry) => entry.context_count)).toEqual([
      2, 1, 1,
    ]);
    expect(panel.current[0].context_ids).toEqual(["pA#c000", "pA#c001"]);
  });

  it("falls back to the source paper for contexts without inline citations", async () => {
    const { mock, contexts } = seededPanelMock();
    const panel = buildPanel(mock, contexts);
    await panel.refresh();
    const fallbackRow = container.querySelector(
      '.tl-reference[data-paper-id="pB"]',
    ) as HTMLElement;
    expect(fallbackRow).not.toBeNull();
    const card = fallbackRow.querySelector(".tl-context-card") as HTMLElement;
    expect(card.dataset.contextId).toBe("pB#c000");
  });

  it("uses the paper title when known and the id otherwise", async () => {
    const { mock, contexts } = seededPanelMock();
    const panel = buildPanel(mock, contexts);
    await panel.refresh();
    const titles = [...container.querySelectorAll(".tl-reference-title")].map(
      (el) => el.textContent,
    );
    expect(titles).toEqual(["Xylem Networks", "pB", "pY"]);
  });

  it("shows the context tooltip and highlights editor markers on hover", async () => {
    const { mock, contexts } = seededPanelMock();

    // a rendered editor context containing markers for pX and pY
    const contextEl = document.createElement("div");
    contextEl.dataset.contextId = "pA#c000";
    const markerX = document.createElement("span");
    markerX.className = "tl-marker";
    markerX.dataset.paperId = "pX";
    const markerY = document.createElement("span");
    markerY.className = "tl-marker";
    markerY.dataset.paperId = "pY";
    contextEl.appendChild(markerX);
    contextEl.appendChild(markerY);
    highlightRoot.appendChild(contextEl);

    const panel = buildPanel(mock, contexts);
    await panel.refresh();

    const card = container.querySelector(
      '.tl-context-card[data-context-id="pA#c000"][data-paper-id="pX"]',
    ) as HTMLElement;
    card.dispatchEvent(new Event("mouseenter"));

    const tooltip = document.querySelector(".tl-tooltip-context");
    expect(tooltip).not.toBeNull();
    expect(
      tooltip?.querySelector('[data-field="context-text"]')?.textContent,
    ).toBe("Alpha wins [1] over [2].");
    // inside the tooltip, only the pX marker is highlighted
    const tooltipMarkers = tooltip?.querySelectorAll(".tl-marker") ?? [];
    expect(tooltipMarkers[0].classList.contains("tl-marker-highlight")).toBe(
      true,
    );
    expect(tooltipMarkers[1].classList.contains("tl-marker-highlight")).toBe(
      false,
    );
    // in the editor, the matching marker lights up; the other does not
    expect(markerX.classList.contains("tl-marker-highlight")).toBe(true);
    expect(markerY.classList.contains("tl-marker-highlight")).toBe(false);

    card.dispatchEvent(new Event("mouseleave"));
    expect(document.querySelector(".tl-tooltip-context")).toBeNull();
    expect(markerX.classList.contains("tl-marker-highlight")).toBe(false);
  });

  it("renders an empty list for an empty outline", async () => {
    const mock = new MockService();
    const panel = buildPanel(mock, new Map());
    await panel.refresh();
    expect(container.querySelector(".tl-reference-list")).not.toBeNull();
    expect(container.querySelectorAll(".tl-reference")).toHaveLength(0);
    expect(panel.current).toHaveLength(0);
  });
});
