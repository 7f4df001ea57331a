/**
 * Split a document into plain and highlighted segments for display.
 *
 * Pure string work: the argument text itself is never altered, only wrapped.
 * Matching is case-insensitive; overlapping needles keep the earliest, and
 * longer needles win at the same start position.
 */

export interface Segment {
  text: string;
  mark: string | null; // null = plain text, otherwise the needle's label
}

export function segmentDocument(
  document: string,
  needles: { text: string; label: string }[],
): Segment[] {
  const lower = document.toLowerCase();
  const hits: { start: number; end: number; label: string }[] = [];
  for (const needle of needles) {
    const target = needle.text.toLowerCase().trim();
    if (!target) continue;
    let from = 0;
    while (from <= lower.length - target.length) {
      const at = lower.indexOf(target, from);
      if (at === -1) break;
      hits.push({ start: at, end: at + target.length, label: needle.label });
      from = at + target.length;
    }
  }
  hits.sort((a, b) => a.start - b.start || b.end - a.end);
  const chosen: typeof hits = [];
  let cursor = 0;
  for (const hit of hits) {
    if (hit.start >= cursor) {
      chosen.push(hit);
      cursor = hit.end;
    }
  }
  const segments: Segment[] = [];
  let position = 0;
  for (const hit of chosen) {
    if (hit.start > position) {
      segments.push({ text: document.slice(position, hit.start), mark: null });
    }
    segments.push({ text: document.slice(hit.start, hit.end), mark: hit.label });
    position = hit.end;
  }
  if (position < document.length) {
    segments.push({ text: document.slice(position), mark: null });
  }
  return segments;
}
