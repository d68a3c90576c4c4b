import { describe, expect, it } from "vitest";

import {
  branchAdded,
  cancelDraft,
  draftRejected,
  emptyState,
  openDraft,
  selectTrace,
  setCursor,
  traceById,
  withForest,
} from "../src/state.js";
import type { TraceJson } from "../src/types.js";

function trace(id: string, steps: number, parent: string | null = null, branchPoint: number | null = null): TraceJson {
  return {
    schema: 1,
    "trace-id": id,
    env: { env_id: "floor-memory", params: {} },
    agent: { "agent-id": "floor-memory/b", params: {} },
    seed: { value: 1, path: [] },
    steps: Array.from({ length: steps }, (_, i) => ({
      t: i + 1,
      world: {
        grid: [[1]],
        entities: {},
        inventory: {},
        step_count: i + 1,
        terminated: i === steps - 1,
        env_id: "floor-memory",
        aux: {},
      },
      memory: {},
      observation: { window: [[1]], reward: 0, terminal: i === steps - 1, extras: {} },
      action: "no-op",
    })),
    reseeds: [],
    "parent-id": parent,
    "branch-point": branchPoint,
    intervention: parent === null ? null : { kind: "reseed", t: branchPoint ?? 1, path: [], value: 1 },
  };
}

describe("view state", () => {
  it("keeps the cursor inside the selected trace", () => {
    let state = withForest(emptyState(), [trace("t1", 10), trace("t2", 4)]);
    state = setCursor(selectTrace(state, "t1"), 9);
    expect(state.cursor).toBe(9);
    state = selectTrace(state, "t2");
    expect(state.cursor).toBe(3);
    state = setCursor(state, -5);
    expect(state.cursor).toBe(0);
    state = setCursor(state, 99);
    expect(state.cursor).toBe(3);
  });

  it("drops a vanished selection back to the first trace", () => {
    let state = withForest(emptyState(), [trace("t1", 5), trace("t2", 5)]);
    state = selectTrace(state, "t2");
    state = withForest(state, [trace("t1", 5)]);
    expect(state.selected).toBe("t1");
  });

  it("drafts at the cursor step and cancels without touching the forest", () => {
    let state = withForest(emptyState(), [trace("t1", 6)]);
    state = setCursor(state, 2);
    state = openDraft(state, "reseed");
    expect(state.draft).toMatchObject({ kind: "reseed", t: 3 });
    const before = state.traces;
    state = cancelDraft(state);
    expect(state.draft).toBeNull();
    expect(state.traces).toBe(before);
  });

  it("shows a rejection inline and clears it on the next edit", () => {
    let state = withForest(emptyState(), [trace("t1", 6)]);
    state = openDraft(state, "force-action");
    state = draftRejected(state, "illegal-intervention: cannot push into a wall");
    expect(state.draftError).toContain("illegal-intervention");
    state = openDraft(state, "force-action");
    expect(state.draftError).toBeNull();
  });

  it("selects a fresh branch at its fork", () => {
    let state = withForest(emptyState(), [trace("t1", 8)]);
    state = setCursor(state, 7);
    state = branchAdded(state, trace("t2", 8, "t1", 4));
    expect(state.selected).toBe("t2");
    expect(state.cursor).toBe(3);
    expect(state.traces.map((t) => t["trace-id"])).toEqual(["t1", "t2"]);
    expect(traceById(state, "t2")?.["parent-id"]).toBe("t1");
  });
});
