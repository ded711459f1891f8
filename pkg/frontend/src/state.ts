// Client-side view state. The outline revision here is an echo of the
// last server-acknowledged value, never a local guess; setRevision is
// called only from code paths holding a server response.

export interface DragPayload {
  kind: "hierarchy-node" | "outline-node";
  nodeId: string;
  /** Job the hierarchy node came from; absent for outline-internal moves. */
  jobId?: string;
  /** Display label for the optimistic echo while the server confirms. */
  label?: string;
}

export class ViewState {
  readonly selectedClipIds = new Set<string>();
  readonly expanded = new Set<string>();
  dragPayload: DragPayload | null = null;
  outlineRevision = 0;
  tooltipTarget: string | null = null;

  toggleClip(clipId: string): void {
    if (this.selectedClipIds.has(clipId)) {
      this.selectedClipIds.delete(clipId);
    } else {
      this.selectedClipIds.add(clipId);
    }
  }

  isExpanded(nodeId: string): boolean {
    return this.expanded.has(nodeId);
  }

  setExpanded(nodeId: string, expanded: boolean): void {
    if (expanded) {
      this.expanded.add(nodeId);
    } else {
      this.expanded.delete(nodeId);
    }
  }

  beginDrag(payload: DragPayload): void {
    this.dragPayload = payload;
  }

  endDrag(): void {
    this.dragPayload = null;
  }

  setRevision(revision: number): void {
    this.outlineRevision = revision;
  }
}
