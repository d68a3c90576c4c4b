// View state and its pure transitions. The state never stores a number
// the server could be asked for; it holds ids, the cursor, the draft
// under construction, and the console history.

import type { Draft, DraftKind } from "./drafts.js";
import { freshDraft } from "./drafts.js";
import type { QueryJson, QueryResultJson, TraceJson } from "./types.js";

export interface HistoryEntry {
  modelId: string;
  query: QueryJson;
  result: QueryResultJson | null;
  error: string | null;
  // provenance the client already knows; display-only
  n: number | null;
}

export interface ViewState {
  sessionId: string | null;
  traces: TraceJson[];
  selected: string | null;
  cursor: number; // 0-based index into the selected trace's steps
  draft: Draft | null;
  draftError: string | null;
  history: HistoryEntry[];
}

export function emptyState(): ViewState {
  return {
    sessionId: null,
    traces: [],
    selected: null,
    cursor: 0,
    draft: null,
    draftError: null,
    history: [],
  };
}

export function traceById(state: ViewState, id: string | null): TraceJson | null {
  if (id === null) return null;
  return state.traces.find((t) => t["trace-id"] === id) ?? null;
}

function clampCursor(state: ViewState): ViewState {
  const trace = traceById(state, state.selected);
  const top = trace ? Math.max(trace.steps.length - 1, 0) : 0;
  const cursor = Math.min(Math.max(state.cursor, 0), top);
  return cursor === state.cursor ? state : { ...state, cursor };
}

export function withSession(state: ViewState, sessionId: string): ViewState {
  return { ...emptyState(), sessionId };
}

export function withForest(state: ViewState, traces: TraceJson[]): ViewState {
  const stillThere = traces.some((t) => t["trace-id"] === state.selected);
  const selected = stillThere ? state.selected : (traces[0]?.["trace-id"] ?? null);
  return clampCursor({ ...state, traces, selected });
}

export function selectTrace(state: ViewState, id: string): ViewState {
  if (!state.traces.some((t) => t["trace-id"] === id)) return state;
  return clampCursor({ ...state, selected: id, draft: null, draftError: null });
}

export function setCursor(state: ViewState, cursor: number): ViewState {
  return clampCursor({ ...state, cursor });
}

// "Intervene here": draft at the step the cursor points at, so the new
// branch keeps everything strictly before it.
export function openDraft(state: ViewState, kind: DraftKind): ViewState {
  const trace = traceById(state, state.selected);
  if (!trace) return state;
  const t = Math.min(state.cursor + 1, trace.steps.length);
  return { ...state, draft: freshDraft(kind, trace.env.env_id, t), draftError: null };
}

export function editDraft(state: ViewState, draft: Draft): ViewState {
  return { ...state, draft, draftError: null };
}

export function cancelDraft(state: ViewState): ViewState {
  return { ...state, draft: null, draftError: null };
}

export function draftRejected(state: ViewState, message: string): ViewState {
  return { ...state, draftError: message };
}

// A successful intervene returns the branch; select it at its fork.
export function branchAdded(state: ViewState, branch: TraceJson): ViewState {
  const traces = state.traces.some((t) => t["trace-id"] === branch["trace-id"])
    ? state.traces
    : [...state.traces, branch];
  const cursor = Math.max((branch["branch-point"] ?? 1) - 1, 0);
  return clampCursor({
    ...state,
    traces,
    selected: branch["trace-id"],
    cursor,
    draft: null,
    draftError: null,
  });
}

export function recordQuery(state: ViewState, entry: HistoryEntry): ViewState {
  return { ...state, history: [...state.history, entry] };
}
