// Intervention drafts: the structured edits the branch explorer offers.
// A draft is form state; serializeDraft turns it into the exact JSON the
// intervene endpoint takes, and validateDraft runs the same checks the
// form shows inline, so nothing leaves the editor malformed.

import type { ActionLabel, InterventionJson } from "./types.js";
import { ACTIONS } from "./types.js";

export type Draft =
  | { kind: "move-entity"; t: number; entity: string; row: number; col: number }
  | { kind: "toggle-gate"; t: number; field: "open-gate" | "door-state"; value: string }
  | { kind: "swap-floor"; t: number; value: string }
  | { kind: "move-pill"; t: number; side: string }
  | { kind: "move-pill-cell"; t: number; row: number; col: number }
  | { kind: "reseed"; t: number; seed: number }
  | { kind: "force-action"; t: number; action: ActionLabel };

export type DraftKind = Draft["kind"];

// Which editors make sense per environment. move-entity, reseed, and
// force-action are universal; the rest route to env-declared edit fields.
const EDITORS: Record<string, DraftKind[]> = {
  "grass-sand": ["move-entity", "swap-floor", "move-pill", "reseed", "force-action"],
  "floor-memory": ["move-entity", "reseed", "force-action"],
  "pick-up": ["move-entity", "move-pill-cell", "reseed", "force-action"],
  "gated-room": ["move-entity", "toggle-gate", "reseed", "force-action"],
  mimic: ["move-entity", "reseed", "force-action"],
  "key-door": ["move-entity", "toggle-gate", "reseed", "force-action"],
};

export function editorsFor(envId: string): DraftKind[] {
  return EDITORS[envId] ?? ["move-entity", "reseed", "force-action"];
}

// The gate editor toggles a different field per environment.
export function gateField(envId: string): "open-gate" | "door-state" {
  return envId === "key-door" ? "door-state" : "open-gate";
}

export function gateValues(envId: string): string[] {
  return envId === "key-door" ? ["open", "closed"] : ["left", "right"];
}

export function freshDraft(kind: DraftKind, envId: string, t: number): Draft {
  switch (kind) {
    case "move-entity":
      return { kind, t, entity: envId === "mimic" ? "blue" : "agent", row: 0, col: 0 };
    case "toggle-gate":
      return { kind, t, field: gateField(envId), value: gateValues(envId)[0] ?? "left" };
    case "swap-floor":
      return { kind, t, value: "grass" };
    case "move-pill":
      return { kind, t, side: "left" };
    case "move-pill-cell":
      return { kind, t, row: 1, col: 1 };
    case "reseed":
      return { kind, t, seed: 0 };
    case "force-action":
      return { kind, t, action: "no-op" };
  }
}

export function serializeDraft(draft: Draft): InterventionJson {
  switch (draft.kind) {
    case "move-entity":
      return { kind: "world-edit", t: draft.t, path: ["entity", draft.entity], value: [draft.row, draft.col] };
    case "toggle-gate":
      return { kind: "world-edit", t: draft.t, path: [draft.field], value: draft.value };
    case "swap-floor":
      return { kind: "world-edit", t: draft.t, path: ["floor-kind"], value: draft.value };
    case "move-pill":
      return { kind: "world-edit", t: draft.t, path: ["pill-side"], value: draft.side };
    case "move-pill-cell":
      return { kind: "world-edit", t: draft.t, path: ["pill-cell"], value: [draft.row, draft.col] };
    case "reseed":
      return { kind: "reseed", t: draft.t, path: [], value: draft.seed };
    case "force-action":
      return { kind: "force-action", t: draft.t, path: [], value: draft.action };
  }
}

function isInt(n: unknown): n is number {
  return typeof n === "number" && Number.isInteger(n);
}

// Problems as user-facing strings; empty means submittable.
export function validateDraft(draft: Draft, traceLength: number): string[] {
  const problems: string[] = [];
  if (!isInt(draft.t) || draft.t < 1 || draft.t > traceLength) {
    problems.push(`step must be between 1 and ${traceLength}`);
  }
  switch (draft.kind) {
    case "move-entity":
      if (!draft.entity) problems.push("entity name is required");
      if (!isInt(draft.row) || !isInt(draft.col) || draft.row < 0 || draft.col < 0) {
        problems.push("destination must be a nonnegative (row, col)");
      }
      break;
    case "toggle-gate":
      if (!gateValuesForField(draft.field).includes(draft.value)) {
        problems.push(`${draft.field} must be one of ${gateValuesForField(draft.field).join(", ")}`);
      }
      break;
    case "swap-floor":
      if (draft.value !== "grass" && draft.value !== "sand") {
        problems.push("floor kind must be grass or sand");
      }
      break;
    case "move-pill":
      if (draft.side !== "left" && draft.side !== "right") {
        problems.push("pill side must be left or right");
      }
      break;
    case "move-pill-cell":
      if (!isInt(draft.row) || !isInt(draft.col) || draft.row < 1 || draft.col < 1) {
        problems.push("pill cell must be a positive (row, col)");
      }
      break;
    case "reseed":
      if (!isInt(draft.seed) || draft.seed < 0) problems.push("seed must be a nonnegative integer");
      break;
    case "force-action":
      if (!(ACTIONS as readonly string[]).includes(draft.action)) {
        problems.push(`action must be one of ${ACTIONS.join(", ")}`);
      }
      break;
  }
  return problems;
}

function gateValuesForField(field: "open-gate" | "door-state"): string[] {
  return field === "door-state" ? ["open", "closed"] : ["left", "right"];
}

export function describeDraft(draft: Draft): string {
  switch (draft.kind) {
    case "move-entity":
      return `move ${draft.entity} to (${draft.row}, ${draft.col}) at step ${draft.t}`;
    case "toggle-gate":
      return `set ${draft.field} to ${draft.value} at step ${draft.t}`;
    case "swap-floor":
      return `swap the floor to ${draft.value} at step ${draft.t}`;
    case "move-pill":
      return `move the pill to the ${draft.side} at step ${draft.t}`;
    case "move-pill-cell":
      return `move the pill to (${draft.row}, ${draft.col}) at step ${draft.t}`;
    case "reseed":
      return `fresh noise from step ${draft.t} (seed ${draft.seed})`;
    case "force-action":
      return `force ${draft.action} at step ${draft.t}`;
  }
}
