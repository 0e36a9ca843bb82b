/**
 * Scratch-section vertical placement.
 *
 * Each section wants its top edge at its anchor cell's bottom edge (START
 * anchors want the top of the pane). Sections are laid out in document
 * order; when the previous section would overlap, the next one is pushed
 * down, accepting misalignment.
 */

export interface SectionExtent {
  id: string;
  /** bottom edge of the anchor cell, in pane coordinates */
  desiredTop: number;
  height: number;
}

export interface PlacedSection {
  id: string;
  top: number;
  /** true when the section sits exactly where its anchor wants it */
  aligned: boolean;
}

export const SECTION_GAP = 8;

export function layoutSections(sections: SectionExtent[], gap: number = SECTION_GAP): PlacedSection[] {
  const placed: PlacedSection[] = [];
  let cursor = 0;
  for (const section of sections) {
    const top = Math.max(section.desiredTop, cursor);
    placed.push({ id: section.id, top, aligned: Math.abs(top - section.desiredTop) <= 2 });
    cursor = top + section.height + gap;
  }
  return placed;
}
