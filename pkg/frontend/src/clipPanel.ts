// Clip input: paste a passage, name the seed papers it cites, and keep a
// recency-ordered dropdown of earlier clips for quick reuse. Saved clips
// get a grey bar and a checkbox for inclusion in the next synthesis.

import type { ServiceClient } from "./api.js";
import type { ViewState } from "./state.js";
import type { ClipInfo } from "./types.js";

export interface ClipPanelOptions {
  workspaceId: string;
  onError?: (message: string) => void;
}

export class ClipPanel {
  private readonly container: HTMLElement;
  private readonly client: ServiceClient;
  private readonly state: ViewState;
  private readonly options: ClipPanelOptions;
  private clips: ClipInfo[] = [];

  private textInput!: HTMLTextAreaElement;
  private seedsInput!: HTMLInputElement;
  private listEl!: HTMLElement;
  private recentEl!: HTMLSelectElement;

  constructor(
    container: HTMLElement,
    client: ServiceClient,
    state: ViewState,
    options: ClipPanelOptions,
  ) {
    this.container = container;
    this.client = client;
    this.state = state;
    this.options = options;
    this.build();
  }

  get current(): readonly ClipInfo[] {
    return this.clips;
  }

  private build(): void {
    const doc = this.container.ownerDocument;
    this.container.textContent = "";

    this.textInput = doc.createElement("textarea");
    this.textInput.className = "tl-clip-text";
    this.textInput.placeholder = "Paste a passage worth expanding on";
    this.container.appendChild(this.textInput);

    this.seedsInput = doc.createElement("input");
    this.seedsInput.className = "tl-clip-seeds";
    this.seedsInput.placeholder = "Seed paper ids, comma separated";
    this.container.appendChild(this.seedsInput);

    const add = doc.createElement("button");
    add.type = "button";
    add.className = "tl-clip-add";
    add.textContent = "Save clip";
    add.addEventListener("click", () => void this.submit());
    this.container.appendChild(add);

    this.recentEl = doc.createElement("select");
    this.recentEl.className = "tl-clip-recent";
    this.recentEl.addEventListener("change", () => {
      const clip = this.clips.find((c) => c.clip_id === this.recentEl.value);
      if (clip) {
        this.textInput.value = clip.text;
        this.seedsInput.value = clip.seed_reference_ids.join(", ");
      }
    });
    this.container.appendChild(this.recentEl);

    this.listEl = doc.createElement("div");
    this.listEl.className = "tl-clip-list";
    this.container.appendChild(this.listEl);
  }

  async refresh(): Promise<void> {
    this.clips = await this.client.listClips(this.options.workspaceId);
    this.renderList();
  }

  async submit(): Promise<void> {
    const text = this.textInput.value.trim();
    const seeds = this.seedsInput.value
      .split(",")
      .map((seed) => seed.trim())
      .filter((seed) => seed.length > 0);
    try {
      const clip = await this.client.addClip(
        this.options.workspaceId,
        text,
        seeds,
      );
      this.textInput.value = "";
      this.state.selectedClipIds.add(clip.clip_id);
      await this.refresh();
    } catch (error) {
      this.options.onError?.(
        error instanceof Error ? error.message : String(error),
      );
    }
  }

  private renderList(): void {
    const doc = this.container.ownerDocument;
    this.listEl.textContent = "";

    // clip ids are assigned in creation order; latest first is recency
    const recent = [...this.clips].reverse();
    this.recentEl.textContent = "";
    const placeholder = doc.createElement("option");
    placeholder.value = "";
    placeholder.textContent = "Try these clips";
    this.recentEl.appendChild(placeholder);
    for (const clip of recent) {
      const option = doc.createElement("option");
      option.value = clip.clip_id;
      option.textContent = clip.text.slice(0, 60);
      this.recentEl.appendChild(option);
    }

    for (const clip of this.clips) {
      const row = doc.createElement("label");
      row.className = "tl-clip";
      row.dataset.clipId = clip.clip_id;

      const bar = doc.createElement("span");
      bar.className = "tl-color-bar tl-color-bar-grey";
      row.appendChild(bar);

      const checkbox = doc.createElement("input");
      checkbox.type = "checkbox";
      checkbox.checked = this.state.selectedClipIds.has(clip.clip_id);
      checkbox.addEventListener("change", () =>
        this.state.toggleClip(clip.clip_id),
      );
      row.appendChild(checkbox);

      const text = doc.createElement("span");
      text.className = "tl-clip-snippet";
      text.textContent = clip.text;
      row.appendChild(text);

      this.listEl.appendChild(row);
    }
  }
}
