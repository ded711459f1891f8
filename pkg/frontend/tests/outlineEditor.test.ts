import { beforeEach, describe, expect, it } from "vitest";

import { ServiceClient, ServiceError, type FetchLike } from "../src/api.js";
import { OutlineEditor } from "../src/outlineEditor.js";
import { ViewState } from "../src/state.js";
import { flush, gatedPut } from "./helpers.js";
import { MockService, makeContext, sampleResult } from "./mockService.js";

interface Fixture {
  mock: MockService;
  state: ViewState;
  container: HTMLElement;
  editor: OutlineEditor;
  rejected: ServiceError[];
  notices: string[];
  changed: () => number;
}

function buildFixture(
  mock: MockService,
  overrides: {
    fetchFn?: FetchLike;
    promptLabel?: (current: string) => string | null;
  } = {},
): Fixture {
  const client = new ServiceClient("http://svc", {
    fetchFn: overrides.fetchFn ?? mock.fetch,
  });
  const state = new ViewState();
  const container = document.createElement("div");
  document.body.appendChild(container);
  const rejected: ServiceError[] = [];
  const notices: string[] = [];
  let changedCount = 0;
  const editor = new OutlineEditor(container, client, state, {
    workspaceId: mock.workspaceId,
    promptLabel: overrides.promptLabel,
    onChanged: () => {
      changedCount += 1;
    },
    onRejected: (error) => rejected.push(error),
    onNotice: (message) => notices.push(message),
  });
  return {
    mock,
    state,
    container,
    editor,
    rejected,
    notices,
    changed: () => changedCount,
  };
}

function seededMock(): MockService {
  const mock = new MockService();
  mock.seedOutline(
    [
      {
        node_id: "n1",
        kind: "thread",
        provenance: null,
        label: "Alpha",
        children: [
          {
            node_id: "n2",
            kind: "thread",
            provenance: null,
            label: "Beta",
            children: [],
          },
          {
            node_id: "n3",
            kind: "context",
            provenance: "pA#c000",
            context: makeContext({
              context_id: "pA#c000",
              source_paper_id: "pA",
              text: "Kernels win [1].",
              cited_ids: ["pX"],
            }),
          },
        ],
      },
      {
        node_id: "n4",
        kind: "thread",
        provenance: null,
        label: "Gamma",
        children: [],
      },
    ],
    5,
  );
  return mock;
}

function nodeEl(container: HTMLElement, nodeId: string): HTMLElement {
  const el = container.querySelector(`[data-node-id="${nodeId}"]`);
  if (el === null) throw new Error(`no rendered node ${nodeId}`);
  return el as HTMLElement;
}

function childIds(container: HTMLElement, nodeId: string): string[] {
  // the node's own children div is the first one in tree order
  const childrenDiv = nodeEl(container, nodeId).querySelector(
    ".tl-outline-children",
  );
  return Array.from(childrenDiv?.children ?? []).map(
    (child) => (child as HTMLElement).dataset.nodeId ?? "",
  );
}

function getOutlineCount(mock: MockService): number {
  return mock.log.filter(
    (req) => req.method === "GET" && req.path.endsWith("/outline"),
  ).length;
}

beforeEach(() => {
  document.body.textContent = "";
});

describe("OutlineEditor rendering", () => {
  it("renders the root with its fixed label and the server revision", async () => {
    const { editor, container, state } = buildFixture(new MockService());
    await editor.load();
    const root = nodeEl(container, "root");
    expect(root.classList.contains("tl-outline-root")).toBe(true);
    expect(root.querySelector(".tl-outline-label")?.textContent).toBe(
      "Your Outline",
    );
    expect(state.outlineRevision).toBe(0);
  });

  it("renders threads and contexts with markers and provenance", async () => {
    const { editor, container } = buildFixture(seededMock());
    await editor.load();
    expect(childIds(container, "root")).toEqual(["n1", "n4"]);
    expect(childIds(container, "n1")).toEqual(["n2", "n3"]);

    const context = nodeEl(container, "n3");
    expect(context.classList.contains("tl-outline-context")).toBe(true);
    expect(context.dataset.contextId).toBe("pA#c000");
    const marker = context.querySelector(".tl-marker") as HTMLElement;
    expect(marker.textContent).toBe("[1]");
    expect(marker.dataset.paperId).toBe("pX");
    expect(context.querySelector(".tl-provenance")?.textContent).toBe("pA");
  });
});

describe("drag and drop", () => {
  it("imports a dropped hierarchy node via a wire command", async () => {
    const mock = new MockService();
    mock.results.set("job1", sampleResult());
    const { editor, container, state, changed } = buildFixture(mock);
    await editor.load();

    state.beginDrag({
      kind: "hierarchy-node",
      nodeId: "g000",
      jobId: "job1",
      label: "efficient attention",
    });
    nodeEl(container, "root").dispatchEvent(
      new Event("drop", { bubbles: true, cancelable: true }),
    );
    await flush();

    const put = mock.log.find((req) => req.method === "PUT");
    expect(put?.body).toEqual({
      op: "import",
      target: "root",
      payload: { job_id: "job1", source_node_id: "g000" },
      revision: 0,
    });

    const labels = [...container.querySelectorAll(".tl-outline-label")].map(
      (el) => el.textContent,
    );
    expect(labels).toContain("efficient attention");
    expect(labels).toContain("sparse kernels");
    expect(container.querySelectorAll(".tl-outline-context")).toHaveLength(5);
    expect(state.outlineRevision).toBe(1);
    expect(mock.outline.revision).toBe(1);
    expect(changed()).toBe(1);
    expect(state.dragPayload).toBeNull();
  });

  it("shows an optimistic echo in flight and reconciles on ack", async () => {
    const mock = new MockService();
    mock.results.set("job1", sampleResult());
    const gate = gatedPut(mock.fetch);
    const { editor, container, state } = buildFixture(mock, {
      fetchFn: gate.fetch,
    });
    await editor.load();

    state.beginDrag({
      kind: "hierarchy-node",
      nodeId: "g001",
      jobId: "job1",
      label: "long documents",
    });
    const pending = editor.handleDrop("root");

    // before the ack: placeholder node and in-flight styling
    const echo = container.querySelector('[data-node-id="pending"]');
    expect(echo).not.toBeNull();
    expect(echo?.classList.contains("tl-pending")).toBe(true);
    expect(echo?.querySelector(".tl-outline-label")?.textContent).toBe(
      "long documents",
    );
    expect(container.classList.contains("tl-awaiting-ack")).toBe(true);

    gate.open();
    await pending;

    // after the ack: the echo is replaced by the server-assigned node
    expect(container.querySelector('[data-node-id="pending"]')).toBeNull();
    expect(container.classList.contains("tl-awaiting-ack")).toBe(false);
    const imported = nodeEl(container, "n1");
    expect(imported.querySelector(".tl-outline-label")?.textContent).toBe(
      "long documents",
    );
    expect(state.outlineRevision).toBe(1);
  });

  it("moves an outline node dropped onto another thread", async () => {
    const { mock, editor, container, state } = buildFixture(seededMock());
    await editor.load();

    nodeEl(container, "n2").dispatchEvent(
      new Event("dragstart", { bubbles: true }),
    );
    expect(state.dragPayload).toEqual({
      kind: "outline-node",
      nodeId: "n2",
      label: "Beta",
    });
    nodeEl(container, "n4").dispatchEvent(
      new Event("drop", { bubbles: true, cancelable: true }),
    );
    await flush();

    const put = mock.log.find((req) => req.method === "PUT");
    expect(put?.body).toEqual({
      op: "move",
      target: "n2",
      payload: { new_parent_id: "n4" },
      revision: 0,
    });
    expect(childIds(container, "n4")).toEqual(["n2"]);
    expect(childIds(container, "n1")).toEqual(["n3"]);
  });

  it("rejects drops onto context nodes client-side with a visual cue", async () => {
    const { mock, editor, container, state } = buildFixture(seededMock());
    await editor.load();

    state.beginDrag({ kind: "outline-node", nodeId: "n4" });
    const contextEl = nodeEl(container, "n3");
    contextEl.dispatchEvent(
      new Event("dragover", { bubbles: true, cancelable: true }),
    );
    expect(contextEl.classList.contains("tl-drop-reject")).toBe(true);

    contextEl.dispatchEvent(
      new Event("drop", { bubbles: true, cancelable: true }),
    );
    await flush();

    expect(mock.putCount()).toBe(0);
    expect(state.dragPayload).toBeNull();
    expect(contextEl.classList.contains("tl-drop-reject")).toBe(true);
    expect(childIds(container, "n1")).toEqual(["n2", "n3"]);
  });

  it("ignores a node dropped onto itself", async () => {
    const { mock, editor, container, state } = buildFixture(seededMock());
    await editor.load();
    state.beginDrag({ kind: "outline-node", nodeId: "n1" });
    await editor.handleDrop("n1");
    expect(mock.putCount()).toBe(0);
    expect(state.dragPayload).toBeNull();
    expect(childIds(container, "root")).toEqual(["n1", "n4"]);
  });

  it("marks thread targets as droppable while a drag is active", async () => {
    const { editor, container, state } = buildFixture(seededMock());
    await editor.load();
    const target = nodeEl(container, "n4");

    // without an active drag the hover is inert
    target.dispatchEvent(
      new Event("dragover", { bubbles: true, cancelable: true }),
    );
    expect(target.classList.contains("tl-drop-ok")).toBe(false);

    state.beginDrag({ kind: "outline-node", nodeId: "n2" });
    target.dispatchEvent(
      new Event("dragover", { bubbles: true, cancelable: true }),
    );
    expect(target.classList.contains("tl-drop-ok")).toBe(true);
    target.dispatchEvent(new Event("dragleave", { bubbles: true }));
    expect(target.classList.contains("tl-drop-ok")).toBe(false);
  });
});

describe("server rejections", () => {
  it("rolls back the optimistic update on an injected 409 and replays nothing", async () => {
    const mock = seededMock();
    mock.results.set("job1", sampleResult());
    const { editor, container, state, rejected } = buildFixture(mock);
    await editor.load();
    const before = container.innerHTML;
    const getsBefore = getOutlineCount(mock);

    mock.injectOutlineFailure(409, { detail: "stale revision", revision: 0 });
    state.beginDrag({
      kind: "hierarchy-node",
      nodeId: "g000",
      jobId: "job1",
      label: "efficient attention",
    });
    await editor.handleDrop("root");
    await flush();

    // exactly the pre-command render, no trace of the echo
    expect(container.innerHTML).toBe(before);
    expect(container.querySelector('[data-node-id="pending"]')).toBeNull();

    // one PUT, no replay; one refetch of the outline
    expect(mock.putCount()).toBe(1);
    expect(getOutlineCount(mock)).toBe(getsBefore + 1);
    const putIndex = mock.log.findIndex((req) => req.method === "PUT");
    const refetchAfter = mock.log
      .slice(putIndex + 1)
      .some((req) => req.method === "GET" && req.path.endsWith("/outline"));
    expect(refetchAfter).toBe(true);

    expect(rejected).toHaveLength(1);
    expect(rejected[0].status).toBe(409);
    expect(state.outlineRevision).toBe(mock.outline.revision);
  });

  it("refetches the latest outline after a real concurrent edit", async () => {
    const mock = seededMock();
    const { editor, container, state, rejected } = buildFixture(mock);
    await editor.load();
    expect(state.outlineRevision).toBe(0);

    // another client edits the outline behind this editor's back
    const other = new ServiceClient("http://svc", { fetchFn: mock.fetch });
    await other.applyOutline(mock.workspaceId, {
      op: "insert_child",
      target: "root",
      payload: { label: "Theirs" },
      revision: 0,
    });
    expect(mock.outline.revision).toBe(1);

    // this editor still holds revision 0; its next command is stale
    state.beginDrag({ kind: "outline-node", nodeId: "n2" });
    await editor.handleDrop("n4");
    await flush();

    expect(rejected).toHaveLength(1);
    expect(rejected[0].status).toBe(409);
    expect(rejected[0].revision).toBe(1);

    // refetched: the concurrent node is now visible, revision echoed
    expect(state.outlineRevision).toBe(1);
    const labels = [...container.querySelectorAll(".tl-outline-label")].map(
      (el) => el.textContent,
    );
    expect(labels).toContain("Theirs");
    // the stale move was not replayed: n2 is still under n1
    expect(childIds(container, "n1")).toEqual(["n2", "n3"]);
    const movePuts = mock.log.filter(
      (req) =>
        req.method === "PUT" &&
        (req.body as { op?: string } | undefined)?.op === "move",
    );
    expect(movePuts).toHaveLength(1);
  });

  it("restores the pre-command render on 422 without refetching", async () => {
    const { mock, editor, container, state, rejected } =
      buildFixture(seededMock());
    await editor.load();
    const before = container.innerHTML;
    const getsBefore = getOutlineCount(mock);

    state.beginDrag({
      kind: "hierarchy-node",
      nodeId: "gX",
      jobId: "jobGhost",
      label: "ghost",
    });
    await editor.handleDrop("root");
    await flush();

    expect(container.innerHTML).toBe(before);
    expect(getOutlineCount(mock)).toBe(getsBefore);
    expect(rejected).toHaveLength(1);
    expect(rejected[0].status).toBe(422);
    expect(rejected[0].detail).toBe("no finished hierarchy for job 'jobGhost'");
    expect(state.outlineRevision).toBe(0);
  });
});

describe("context menu actions", () => {
  function rightClick(el: HTMLElement): void {
    el.dispatchEvent(
      new MouseEvent("contextmenu", {
        bubbles: true,
        cancelable: true,
        clientX: 8,
        clientY: 9,
      }),
    );
  }

  function clickMenuItem(action: string): void {
    const item = document.querySelector(
      `.tl-menu [data-action="${action}"]`,
    ) as HTMLElement | null;
    if (item === null) throw new Error(`no menu item ${action}`);
    item.click();
  }

  it("opens the five-option menu for threads and the three-option menu for contexts", async () => {
    const { editor, container } = buildFixture(seededMock());
    await editor.load();

    rightClick(nodeEl(container, "n1"));
    expect(document.querySelectorAll(".tl-menu-item")).toHaveLength(5);

    rightClick(nodeEl(container, "n3"));
    expect(document.querySelectorAll(".tl-menu-item")).toHaveLength(3);
    clickMenuItem("cancel");
  });

  it("opens the menu of the clicked nested thread, not its ancestor", async () => {
    const { editor, container } = buildFixture(seededMock(), {
      promptLabel: () => "Child of Beta",
    });
    await editor.load();

    rightClick(nodeEl(container, "n2"));
    const menu = document.querySelector(".tl-menu");
    expect(menu).not.toBeNull();
    clickMenuItem("insert-child");
    await flush();
    expect(childIds(container, "n2")).toHaveLength(1);
  });

  it("has no menu on the outline root", async () => {
    const { editor, container } = buildFixture(seededMock());
    await editor.load();
    const root = nodeEl(container, "root");
    root.dispatchEvent(
      new MouseEvent("contextmenu", { bubbles: true, cancelable: true }),
    );
    expect(document.querySelector(".tl-menu")).toBeNull();
  });

  it("inserts a child thread with the prompted label", async () => {
    const prompts: string[] = [];
    const { mock, editor, container } = buildFixture(seededMock(), {
      promptLabel: (current) => {
        prompts.push(current);
        return "Delta";
      },
    });
    await editor.load();

    rightClick(nodeEl(container, "n1"));
    clickMenuItem("insert-child");
    await flush();

    expect(prompts).toEqual([""]);
    const put = mock.log.find((req) => req.method === "PUT");
    expect(put?.body).toMatchObject({
      op: "insert_child",
      target: "n1",
      payload: { label: "Delta" },
    });
    expect(childIds(container, "n1")).toEqual(["n2", "n3", "n5"]);
    expect(
      nodeEl(container, "n5").querySelector(".tl-outline-label")?.textContent,
    ).toBe("Delta");
  });

  it("does nothing when the label prompt is cancelled", async () => {
    const { mock, editor, container } = buildFixture(seededMock(), {
      promptLabel: () => null,
    });
    await editor.load();
    rightClick(nodeEl(container, "n1"));
    clickMenuItem("insert-child");
    await flush();
    expect(mock.putCount()).toBe(0);
  });

  it("removes a node and all its children", async () => {
    const { mock, editor, container } = buildFixture(seededMock());
    await editor.load();
    rightClick(nodeEl(container, "n1"));
    clickMenuItem("remove-subtree");
    await flush();

    expect(mock.log.find((req) => req.method === "PUT")?.body).toMatchObject({
      op: "remove_subtree",
      target: "n1",
    });
    expect(childIds(container, "root")).toEqual(["n4"]);
    expect(container.querySelector('[data-node-id="n2"]')).toBeNull();
  });

  it("removes a node while promoting its children one level up", async () => {
    const { mock, editor, container } = buildFixture(seededMock());
    await editor.load();
    rightClick(nodeEl(container, "n1"));
    clickMenuItem("remove-and-promote");
    await flush();

    expect(mock.log.find((req) => req.method === "PUT")?.body).toMatchObject({
      op: "remove_and_promote",
      target: "n1",
    });
    expect(childIds(container, "root")).toEqual(["n2", "n3", "n4"]);
  });

  it("edits a thread label through the prompt", async () => {
    const prompts: string[] = [];
    const { mock, editor, container } = buildFixture(seededMock(), {
      promptLabel: (current) => {
        prompts.push(current);
        return "Renamed";
      },
    });
    await editor.load();
    rightClick(nodeEl(container, "n4"));
    clickMenuItem("edit");
    await flush();

    expect(prompts).toEqual(["Gamma"]);
    expect(mock.log.find((req) => req.method === "PUT")?.body).toMatchObject({
      op: "edit_label",
      target: "n4",
      payload: { label: "Renamed" },
    });
    expect(
      nodeEl(container, "n4").querySelector(".tl-outline-label")?.textContent,
    ).toBe("Renamed");
  });

  it("treats context text as read-only and says so", async () => {
    const { mock, editor, container, notices } = buildFixture(seededMock());
    await editor.load();
    rightClick(nodeEl(container, "n3"));
    clickMenuItem("edit");
    await flush();

    expect(mock.putCount()).toBe(0);
    expect(notices).toHaveLength(1);
    expect(notices[0]).toMatch(/read-only/);
  });
});

describe("keyboard cut and paste", () => {
  function key(
    el: HTMLElement,
    keyName: string,
    modifiers: { ctrl?: boolean } = {},
  ): void {
    el.dispatchEvent(
      new KeyboardEvent("keydown", {
        key: keyName,
        ctrlKey: modifiers.ctrl ?? false,
        bubbles: true,
        cancelable: true,
      }),
    );
  }

  it("moves a cut node into the pasted-on thread", async () => {
    const { mock, editor, container } = buildFixture(seededMock());
    await editor.load();

    const gamma = nodeEl(container, "n4");
    key(gamma, "x", { ctrl: true });
    expect(gamma.classList.contains("tl-cut")).toBe(true);

    key(nodeEl(container, "n1"), "v", { ctrl: true });
    await flush();

    expect(mock.log.find((req) => req.method === "PUT")?.body).toEqual({
      op: "move",
      target: "n4",
      payload: { new_parent_id: "n1" },
      revision: 0,
    });
    expect(childIds(container, "n1")).toEqual(["n2", "n3", "n4"]);
    expect(childIds(container, "root")).toEqual(["n1"]);
  });

  it("cannot cut the outline root", async () => {
    const { mock, editor, container } = buildFixture(seededMock());
    await editor.load();
    key(nodeEl(container, "root"), "x", { ctrl: true });
    key(nodeEl(container, "n1"), "v", { ctrl: true });
    await flush();
    expect(mock.putCount()).toBe(0);
  });

  it("escape clears a pending cut", async () => {
    const { mock, editor, container } = buildFixture(seededMock());
    await editor.load();
    key(nodeEl(container, "n4"), "x", { ctrl: true });
    key(nodeEl(container, "n4"), "Escape");
    key(nodeEl(container, "n1"), "v", { ctrl: true });
    await flush();
    expect(mock.putCount()).toBe(0);
  });
});

describe("revision echoing", () => {
  it("always tracks the last server-acknowledged revision", async () => {
    const mock = seededMock();
    const { editor, state } = buildFixture(mock, { promptLabel: () => "L" });
    await editor.load();
    expect(state.outlineRevision).toBe(mock.outline.revision);

    await editor.send({
      op: "insert_child",
      target: "root",
      payload: { label: "One" },
      revision: state.outlineRevision,
    });
    expect(state.outlineRevision).toBe(1);
    expect(mock.outline.revision).toBe(1);

    await editor.send({
      op: "edit_label",
      target: "n4",
      payload: { label: "Two" },
      revision: state.outlineRevision,
    });
    expect(state.outlineRevision).toBe(2);

    await editor.send({
      op: "move",
      target: "n2",
      payload: { new_parent_id: "n4" },
      revision: state.outlineRevision,
    });
    expect(state.outlineRevision).toBe(3);
    expect(mock.outline.revision).toBe(3);
  });

  it("finds context payloads for the reference panel", async () => {
    const { editor } = buildFixture(seededMock());
    await editor.load();
    expect(editor.findContext("pA#c000")?.text).toBe("Kernels win [1].");
    expect(editor.findContext("missing")).toBeNull();
  });
});

describe("subtree import shapes", () => {
  it("imports a full hierarchy subtree with nested threads and contexts", async () => {
    const mock = new MockService();
    mock.results.set("job1", sampleResult());
    const { editor, container, state } = buildFixture(mock);
    await editor.load();

    state.beginDrag({
      kind: "hierarchy-node",
      nodeId: "g000",
      jobId: "job1",
      label: "efficient attention",
    });
    await editor.handleDrop("root");

    // group -> nested thread -> five contexts, all preserved in order
    const rootChildren = childIds(container, "root");
    expect(rootChildren).toHaveLength(1);
    const group = nodeEl(container, rootChildren[0]);
    expect(group.querySelector(".tl-outline-label")?.textContent).toBe(
      "efficient attention",
    );
    const contexts = [...group.querySelectorAll(".tl-outline-context")].map(
      (el) => (el as HTMLElement).dataset.contextId,
    );
    expect(contexts).toEqual([
      "pA#c000",
      "pA#c001",
      "pB#c000",
      "pB#c001",
      "pB#c002",
    ]);
  });

  it("imports a single dragged context as a leaf node", async () => {
    const mock = new MockService();
    mock.results.set("job1", sampleResult());
    const { editor, container, state } = buildFixture(mock);
    await editor.load();

    state.beginDrag({
      kind: "hierarchy-node",
      nodeId: "pC#c000",
      jobId: "job1",
      label: "Chunking scales reading",
    });
    await editor.handleDrop("root");

    const contexts = container.querySelectorAll(".tl-outline-context");
    expect(contexts).toHaveLength(1);
    expect((contexts[0] as HTMLElement).dataset.contextId).toBe("pC#c000");
  });

  it("appends a context dropped into a nested thread at the end", async () => {
    const mock = seededMock();
    mock.results.set("job1", sampleResult());
    const { editor, container, state } = buildFixture(mock);
    await editor.load();

    state.beginDrag({
      kind: "hierarchy-node",
      nodeId: "pC#c000",
      jobId: "job1",
      label: "Chunking scales reading",
    });
    await editor.handleDrop("n1");

    expect(childIds(container, "n1")).toEqual(["n2", "n3", "n5"]);
    const leaf = nodeEl(container, "n5");
    expect(leaf.classList.contains("tl-outline-context")).toBe(true);
    expect(leaf.dataset.contextId).toBe("pC#c000");
  });
});
