// Wire types mirroring the service JSON contract. Field names match the
// server payloads exactly so responses can be used without mapping.

export interface PaperInfo {
  paper_id: string;
  title: string;
  abstract: string | null;
  year: number | null;
  venue: string | null;
  authors: string[];
  citation_count: number;
  reference_ids: string[];
  pdf_url: string | null;
}

export interface ContextInfo {
  context_id: string;
  source_paper_id: string;
  text: string;
  cited_ids: string[];
  section_header: string | null;
  page_number: number | null;
  // Present on pipeline output, absent on outline round-trips.
  mean_clip_similarity?: number;
}

export interface HierarchyNode {
  node_id: string;
  level: string; // "root" | "group" | "thread"
  label: string;
  color_index: number | null;
  degraded: boolean;
  children: HierarchyNode[];
  contexts: ContextInfo[];
}

export interface RankedPaper {
  paper_id: string;
  relevance: number;
  citation_count: number;
}

export interface SynthesisResult {
  empty: boolean;
  seed_ids: string[];
  ranked_papers: RankedPaper[];
  papers: Record<string, PaperInfo>;
  hierarchy: HierarchyNode | null;
  degradation: Record<string, unknown>;
}

export interface OutlineNode {
  node_id: string;
  kind: "thread" | "context";
  provenance: string | null;
  label?: string;
  children?: OutlineNode[];
  context?: ContextInfo;
}

export interface OutlineDoc {
  revision: number;
  next_id?: number;
  root: OutlineNode;
}

export interface OutlineCommand {
  op: string;
  target: string;
  payload: Record<string, unknown>;
  revision: number;
}

export interface OutlineEditResult {
  revision: number;
  node_id?: string;
  outline: OutlineDoc;
}

export interface JobInfo {
  job_id: string;
  clip_ids: string[];
  state: string; // "queued" | stage name | "done" | "failed"
  error: string | null;
  empty: boolean | null;
  degradation: Record<string, unknown>;
  timings: Record<string, number>;
  created_at: number;
}

export interface ReferenceEntry {
  paper_id: string;
  context_count: number;
  context_ids: string[];
  paper: PaperInfo | null;
}

export interface ClipInfo {
  clip_id: string;
  text: string;
  seed_reference_ids: string[];
}

// The server never promotes the outline root.
export const OUTLINE_ROOT_ID = "root";

// Color bars cycle through the same palette the pipeline assigns
// color_index against.
export const GROUP_PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
  "#86bcb6",
  "#d37295",
] as const;

export function paletteColor(colorIndex: number | null): string | null {
  if (colorIndex === null || colorIndex < 0) return null;
  return GROUP_PALETTE[colorIndex % GROUP_PALETTE.length];
}
