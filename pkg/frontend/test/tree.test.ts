import { describe, expect, it } from "vitest";

import { forestLayout } from "../src/tree.js";
import type { TraceJson } from "../src/types.js";

function stub(id: string, length: number, parent: string | null, branchPoint: number | null, kind: string | null): TraceJson {
  return {
    schema: 1,
    "trace-id": id,
    env: { env_id: "grass-sand", params: {} },
    agent: { "agent-id": "grass-sand/A", params: {} },
    seed: { value: 0, path: [] },
    steps: Array.from({ length }, (_, i) => ({
      t: i + 1,
      world: { grid: [[1]], entities: {}, inventory: {}, step_count: i + 1, terminated: false, env_id: "grass-sand", aux: {} },
      memory: {},
      observation: { window: [[1]], reward: 0, terminal: false, extras: {} },
      action: "no-op",
    })),
    reseeds: [],
    "parent-id": parent,
    "branch-point": branchPoint,
    intervention: kind === null ? null : { kind, t: branchPoint ?? 1, path: [], value: null },
  };
}

describe("forest layout", () => {
  it("lays the root out from step 1 with no edge", () => {
    const lanes = forestLayout([stub("t1", 9, null, null, null)]);
    expect(lanes).toEqual([{ id: "t1", parent: null, start: 1, end: 9, edge: null, depth: 0 }]);
  });

  it("starts a branch at its fork, one level deeper, with the edge kind", () => {
    const lanes = forestLayout([
      stub("t1", 9, null, null, null),
      stub("t2", 9, "t1", 4, "world-edit"),
      stub("t3", 7, "t2", 6, "reseed"),
    ]);
    expect(lanes.map((l) => l.id)).toEqual(["t1", "t2", "t3"]);
    expect(lanes[1]).toMatchObject({ start: 4, depth: 1, edge: "world-edit" });
    expect(lanes[2]).toMatchObject({ start: 6, depth: 2, edge: "reseed" });
  });

  it("keeps siblings under the same parent in arrival order", () => {
    const lanes = forestLayout([
      stub("t1", 6, null, null, null),
      stub("t2", 6, "t1", 2, "reseed"),
      stub("t3", 6, "t1", 5, "force-action"),
    ]);
    expect(lanes.map((l) => l.id)).toEqual(["t1", "t2", "t3"]);
    expect(lanes[1]?.depth).toBe(1);
    expect(lanes[2]?.depth).toBe(1);
  });

  it("still lays out a branch whose parent is missing", () => {
    const lanes = forestLayout([stub("t9", 5, "gone", 3, "world-edit")]);
    expect(lanes).toHaveLength(1);
    expect(lanes[0]).toMatchObject({ id: "t9", start: 3, depth: 0 });
  });
});
