// Inline citation markers look like [4] or [1, 12]; the pipeline resolves
// them to paper ids in order of first appearance, deduplicated. The same
// walk here recovers which marker points at which cited paper.

export interface MarkerSegment {
  kind: "text" | "marker";
  text: string;
  keys: string[];
}

const MARKER_RE = /\[(\d+(?:\s*[,;]\s*\d+)*)\]/g;

function splitKeys(body: string): string[] {
  return body.split(/[,;]/).map((key) => key.trim());
}

/** Split context text into plain runs and bracketed marker runs. */
export function splitMarkers(text: string): MarkerSegment[] {
  const segments: MarkerSegment[] = [];
  let cursor = 0;
  MARKER_RE.lastIndex = 0;
  for (let match = MARKER_RE.exec(text); match; match = MARKER_RE.exec(text)) {
    if (match.index > cursor) {
      segments.push({ kind: "text", text: text.slice(cursor, match.index), keys: [] });
    }
    segments.push({ kind: "marker", text: match[0], keys: splitKeys(match[1]) });
    cursor = match.index + match[0].length;
  }
  if (cursor < text.length) {
    segments.push({ kind: "text", text: text.slice(cursor), keys: [] });
  }
  return segments;
}

/**
 * Map marker keys to cited paper ids positionally: the n-th distinct key in
 * appearance order pairs with the n-th entry of cited_ids. Surplus keys map
 * to nothing and get a degraded tooltip.
 */
export function markerPaperMap(
  text: string,
  citedIds: readonly string[],
): Map<string, string> {
  const map = new Map<string, string>();
  let next = 0;
  for (const segment of splitMarkers(text)) {
    for (const key of segment.keys) {
      if (map.has(key)) continue;
      if (next >= citedIds.length) return map;
      map.set(key, citedIds[next]);
      next += 1;
    }
  }
  return map;
}
