// Branch explorer layout. Each trace becomes a horizontal lane spanning
// its step range left to right; a branch starts at its fork step under
// its parent, with the intervention kind on the connecting edge.

import type { TraceJson } from "./types.js";

export interface LaneView {
  id: string;
  parent: string | null;
  start: number; // first step this trace owns (1 for roots)
  end: number; // last step
  edge: string | null; // intervention kind on the edge from the parent
  depth: number; // lane row, parents above children
}

export function forestLayout(traces: TraceJson[]): LaneView[] {
  const byParent = new Map<string | null, TraceJson[]>();
  for (const trace of traces) {
    const parent = trace["parent-id"];
    const siblings = byParent.get(parent) ?? [];
    siblings.push(trace);
    byParent.set(parent, siblings);
  }
  const lanes: LaneView[] = [];
  const place = (trace: TraceJson, depth: number) => {
    lanes.push({
      id: trace["trace-id"],
      parent: trace["parent-id"],
      start: trace["branch-point"] ?? 1,
      end: trace.steps.length,
      edge: trace.intervention?.kind ?? null,
      depth,
    });
    for (const child of byParent.get(trace["trace-id"]) ?? []) {
      place(child, depth + 1);
    }
  };
  for (const root of byParent.get(null) ?? []) place(root, 0);
  // Orphaned branches (parent not in the forest) still get lanes.
  const placed = new Set(lanes.map((l) => l.id));
  for (const trace of traces) {
    if (!placed.has(trace["trace-id"])) place(trace, 0);
  }
  return lanes;
}

export interface TreeHandlers {
  onSelect: (id: string) => void;
  onScrub: (id: string, stepIndex: number) => void;
}

export function renderTree(
  container: HTMLElement,
  traces: TraceJson[],
  selected: string | null,
  cursor: number,
  handlers: TreeHandlers,
): void {
  container.textContent = "";
  const maxEnd = Math.max(1, ...traces.map((t) => t.steps.length));
  for (const lane of forestLayout(traces)) {
    const row = document.createElement("div");
    row.className = lane.id === selected ? "lane selected" : "lane";
    row.style.paddingLeft = `${lane.depth * 12}px`;

    const label = document.createElement("button");
    label.className = "lane-label";
    label.textContent = lane.edge === null ? lane.id : `${lane.id} [${lane.edge} @ ${lane.start}]`;
    label.addEventListener("click", () => handlers.onSelect(lane.id));
    row.appendChild(label);

    const strip = document.createElement("div");
    strip.className = "lane-steps";
    for (let t = 1; t <= maxEnd; t++) {
      const cell = document.createElement("span");
      if (t < lane.start) {
        cell.className = "step inherited";
      } else if (t <= lane.end) {
        cell.className = t === lane.start && lane.edge !== null ? "step fork" : "step owned";
        const index = t - 1;
        cell.addEventListener("click", () => handlers.onScrub(lane.id, index));
      } else {
        cell.className = "step absent";
      }
      if (lane.id === selected && t === cursor + 1) cell.classList.add("cursor");
      cell.title = `step ${t}`;
      strip.appendChild(cell);
    }
    row.appendChild(strip);
    container.appendChild(row);
  }
}
