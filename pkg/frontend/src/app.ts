// Wires the four panes together: clips in, synthesis job out, hierarchy
// review, outline curation, reference panel. One ViewState instance and
// one ServiceClient are shared by everything.

import type { ServiceClient } from "./api.js";
import { ClipPanel } from "./clipPanel.js";
import { HierarchyView } from "./hierarchyView.js";
import { OutlineEditor } from "./outlineEditor.js";
import { JobPoller } from "./polling.js";
import { ReferencePanel } from "./referencePanel.js";
import { ViewState } from "./state.js";
import { TooltipController } from "./tooltip.js";
import type { JobInfo } from "./types.js";

export interface AppOptions {
  /** Reuse an existing workspace instead of creating one. */
  workspaceId?: string;
  promptLabel?: (current: string) => string | null;
}

export interface App {
  state: ViewState;
  workspaceId: string;
  clipPanel: ClipPanel;
  hierarchyView: HierarchyView;
  outlineEditor: OutlineEditor;
  referencePanel: ReferencePanel;
  poller: JobPoller;
  statusEl: HTMLElement;
  generate: () => Promise<void>;
}

export async function createApp(
  root: HTMLElement,
  client: ServiceClient,
  options: AppOptions = {},
): Promise<App> {
  const doc = root.ownerDocument;
  const state = new ViewState();
  const tooltips = new TooltipController(doc, client, state);

  const workspaceId = options.workspaceId ?? (await client.createWorkspace());

  root.textContent = "";
  root.className = "tl-app";
  const panes: Record<string, HTMLElement> = {};
  for (const name of ["clips", "hierarchy", "outline", "references"]) {
    const pane = doc.createElement("section");
    pane.className = `tl-pane tl-pane-${name}`;
    root.appendChild(pane);
    panes[name] = pane;
  }

  const statusEl = doc.createElement("p");
  statusEl.className = "tl-status";
  panes.hierarchy.appendChild(statusEl);

  const generateButton = doc.createElement("button");
  generateButton.type = "button";
  generateButton.className = "tl-generate";
  generateButton.textContent = "Generate threads";
  panes.hierarchy.appendChild(generateButton);

  const hierarchyHost = doc.createElement("div");
  hierarchyHost.className = "tl-hierarchy-host";
  panes.hierarchy.appendChild(hierarchyHost);

  const clipPanel = new ClipPanel(panes.clips, client, state, {
    workspaceId,
    onError: (message) => {
      statusEl.textContent = message;
    },
  });
  const hierarchyView = new HierarchyView(hierarchyHost, state, { tooltips });

  const referencePanelHost = panes.references;
  let referencePanel: ReferencePanel;
  const outlineEditor = new OutlineEditor(panes.outline, client, state, {
    workspaceId,
    tooltips,
    promptLabel: options.promptLabel,
    onChanged: () => void referencePanel.refresh(),
    onRejected: (error) => {
      statusEl.textContent =
        error.status === 409
          ? "Someone else changed the outline; reloaded the latest version."
          : `Edit rejected: ${error.detail}`;
    },
    onNotice: (message) => {
      statusEl.textContent = message;
    },
  });
  referencePanel = new ReferencePanel(referencePanelHost, client, state, {
    workspaceId,
    tooltips,
    resolveContext: (contextId) => outlineEditor.findContext(contextId),
    highlightRoot: panes.outline,
  });

  const poller = new JobPoller(client, workspaceId);

  const generate = async (): Promise<void> => {
    const clipIds = [...state.selectedClipIds].sort();
    if (clipIds.length === 0) {
      statusEl.textContent = "Select at least one clip first.";
      return;
    }
    statusEl.textContent = "Starting synthesis";
    const jobId = await client.startSynthesis(workspaceId, clipIds);
    poller.watch(jobId, {
      onUpdate: (job: JobInfo) => {
        statusEl.textContent = `Synthesis ${job.state}`;
      },
      onDone: (job: JobInfo) => {
        statusEl.textContent = job.empty
          ? "Synthesis finished with no matching contexts."
          : "Synthesis finished.";
        void client
          .getHierarchy(workspaceId, job.job_id)
          .then((result) => hierarchyView.render(result, job.job_id))
          .catch(() => {
            statusEl.textContent =
              "The hierarchy could not be fetched; generate again to refresh.";
          });
      },
      onFailed: (job: JobInfo) => {
        statusEl.textContent = `Synthesis failed: ${job.error ?? "unknown error"}`;
      },
    });
  };
  generateButton.addEventListener("click", () => void generate());

  await clipPanel.refresh();
  await outlineEditor.load();
  await referencePanel.refresh();

  return {
    state,
    workspaceId,
    clipPanel,
    hierarchyView,
    outlineEditor,
    referencePanel,
    poller,
    statusEl,
    generate,
  };
}
