// Tile-accurate grid rendering. gridCells is the pure half: it merges the
// tile layer with entity overlays into plain cell descriptors the painter
// (and the tests) consume.

import type { TileKind, WorldJson } from "./types.js";
import { TILE_KINDS, TRACE_SCHEMA } from "./types.js";

export interface CellView {
  r: number;
  c: number;
  kind: TileKind;
  entities: string[];
}

export function tileKind(value: number): TileKind {
  return TILE_KINDS[value] ?? "oob";
}

export function gridCells(world: WorldJson): CellView[][] {
  const byCell = new Map<string, string[]>();
  for (const [name, pos] of Object.entries(world.entities)) {
    const key = `${pos[0]},${pos[1]}`;
    const names = byCell.get(key) ?? [];
    names.push(name);
    byCell.set(key, names);
  }
  return world.grid.map((row, r) =>
    row.map((value, c) => ({
      r,
      c,
      kind: tileKind(value),
      entities: (byCell.get(`${r},${c}`) ?? []).sort(),
    })),
  );
}

export function hoverText(cell: CellView): string {
  const base = `(${cell.r}, ${cell.c}) ${cell.kind}`;
  return cell.entities.length ? `${base} + ${cell.entities.join(", ")}` : base;
}

// null while the episode is live; otherwise the badge text.
export function terminalBadge(world: WorldJson): string | null {
  if (!world.terminated) return null;
  return world.aux["timeout"] !== undefined ? "terminated (timeout)" : "terminated";
}

export function inventoryLines(world: WorldJson): string[] {
  return Object.entries(world.inventory)
    .filter(([, items]) => items.length > 0)
    .map(([name, items]) => `${name} holds ${items.join(", ")}`)
    .sort();
}

// null when the trace speaks our wire format; otherwise the banner text.
export function schemaNotice(version: number): string | null {
  if (version === TRACE_SCHEMA) return null;
  return (
    `this page renders trace schema ${TRACE_SCHEMA} but the server sent ` +
    `schema ${version}; rebuild the bundle before trusting the grid`
  );
}

// ---- DOM painter ----------------------------------------------------------

export function renderGrid(container: HTMLElement, world: WorldJson): void {
  container.textContent = "";
  const badge = terminalBadge(world);
  if (badge !== null) {
    const tag = document.createElement("div");
    tag.className = "terminal-badge";
    tag.textContent = badge;
    container.appendChild(tag);
  }
  const table = document.createElement("div");
  table.className = "grid";
  for (const row of gridCells(world)) {
    const tr = document.createElement("div");
    tr.className = "grid-row";
    for (const cell of row) {
      const td = document.createElement("div");
      td.className = `tile tile-${cell.kind}`;
      td.title = hoverText(cell);
      for (const name of cell.entities) {
        const dot = document.createElement("span");
        dot.className = `entity entity-${name}`;
        dot.textContent = name[0]?.toUpperCase() ?? "?";
        td.appendChild(dot);
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);
  for (const line of inventoryLines(world)) {
    const note = document.createElement("div");
    note.className = "inventory-line";
    note.textContent = line;
    container.appendChild(note);
  }
}
