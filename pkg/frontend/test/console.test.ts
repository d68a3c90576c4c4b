import { describe, expect, it } from "vitest";

import { buildQuery, fieldHints, formatResult, parseAssignments, PRESETS } from "../src/console.js";

describe("assignment parsing", () => {
  it("splits comma lists into pairs", () => {
    expect(parseAssignments("F=grass, R=left")).toEqual({ F: "grass", R: "left" });
    expect(parseAssignments("")).toEqual({});
    expect(parseAssignments("  T=left  ")).toEqual({ T: "left" });
  });

  it("rejects malformed pairs", () => {
    expect(() => parseAssignments("T")).toThrow(/VAR=value/);
    expect(() => parseAssignments("=left")).toThrow(/VAR=value/);
    expect(() => parseAssignments("T=")).toThrow(/VAR=value/);
  });
});

describe("query building", () => {
  it("builds the mimic hypothesis query from the preset", () => {
    const preset = PRESETS.find((p) => p.label.includes("mimic"));
    expect(preset).toBeDefined();
    expect(buildQuery(preset!.form)).toEqual({
      level: "hypothesis-posterior",
      target: { L: "blue" },
      evidence: { B: "right" },
      do: { R: "left" },
    });
  });

  it("builds the gated-room counterfactual from the preset", () => {
    const preset = PRESETS.find((p) => p.label.includes("chooser"));
    expect(buildQuery(preset!.form)).toEqual({
      level: "counterfactual",
      target: { R: "red" },
      evidence: { D: "left", R: "red" },
      do: { D: "right" },
    });
  });

  it("leaves empty sections out, giving a plain marginal", () => {
    expect(buildQuery({ level: "associational", target: "T=left", evidence: "", do: "", path: "" })).toEqual({
      level: "associational",
      target: { T: "left" },
    });
  });

  it("carries the mediator chain for path-response queries", () => {
    const query = buildQuery({ level: "path-response", target: "R=1", evidence: "", do: "D=open", path: "K" });
    expect(query.path).toEqual(["K"]);
  });

  it("rejects an unknown level and an empty target", () => {
    expect(() => buildQuery({ level: "wishful", target: "T=left", evidence: "", do: "", path: "" })).toThrow(/level/);
    expect(() => buildQuery({ level: "associational", target: "", evidence: "", do: "", path: "" })).toThrow(/target/);
  });
});

describe("error hints and formatting", () => {
  it("routes messages to the field they mention", () => {
    expect(fieldHints("unknown level 'wishful'")).toHaveProperty("level");
    expect(fieldHints("evidence names unknown variable Q")).toHaveProperty("evidence");
    expect(fieldHints("path must name mediators")).toHaveProperty("path");
  });

  it("falls back to the target field for unrecognized messages", () => {
    const hints = fieldHints("something odd happened");
    expect(Object.keys(hints)).toEqual(["target"]);
  });

  it("formats a result with the method tag and n", () => {
    const lines = formatResult(
      {
        query: { level: "interventional", target: { T: "left" }, do: { R: "left" } },
        probability: 0.5002,
        distribution: { left: 0.5002, right: 0.4998 },
      },
      900,
    );
    expect(lines[0]).toBe("p = 0.5002");
    expect(lines[1]).toBe("method: interventional, n = 900");
    expect(lines[2]).toContain("left: 0.5002");
  });
});
