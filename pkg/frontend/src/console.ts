// Query console logic: turn form text into Query JSON, map 422 messages
// back onto form fields, and format results. The probability shown always
// comes from the server's response.

import type { QueryJson, QueryResultJson } from "./types.js";
import { QUERY_LEVELS } from "./types.js";

export interface QueryForm {
  level: string;
  target: string; // "V=value" pairs, comma separated
  evidence: string;
  do: string;
  path: string; // mediator chain, comma separated variable names
}

export function parseAssignments(text: string): Record<string, string> {
  const out: Record<string, string> = {};
  for (const part of text.split(",")) {
    const piece = part.trim();
    if (!piece) continue;
    const eq = piece.indexOf("=");
    if (eq <= 0 || eq === piece.length - 1) {
      throw new Error(`expected VAR=value, got "${piece}"`);
    }
    out[piece.slice(0, eq).trim()] = piece.slice(eq + 1).trim();
  }
  return out;
}

export function buildQuery(form: QueryForm): QueryJson {
  if (!(QUERY_LEVELS as readonly string[]).includes(form.level)) {
    throw new Error(`level must be one of ${QUERY_LEVELS.join(", ")}`);
  }
  const target = parseAssignments(form.target);
  if (Object.keys(target).length === 0) {
    throw new Error("target needs at least one VAR=value pair");
  }
  const query: QueryJson = { level: form.level, target };
  const evidence = parseAssignments(form.evidence);
  if (Object.keys(evidence).length) query.evidence = evidence;
  const doPart = parseAssignments(form.do);
  if (Object.keys(doPart).length) query.do = doPart;
  const path = form.path
    .split(",")
    .map((p) => p.trim())
    .filter(Boolean);
  if (path.length) query.path = path;
  return query;
}

// Route a schema-violation message to the form field it talks about, so
// the hint lands next to the input that caused it.
export function fieldHints(message: string): Partial<Record<keyof QueryForm, string>> {
  const hints: Partial<Record<keyof QueryForm, string>> = {};
  const lower = message.toLowerCase();
  if (lower.includes("level")) hints.level = message;
  if (lower.includes("target")) hints.target = message;
  if (lower.includes("evidence")) hints.evidence = message;
  if (lower.includes("do")) hints.do = message;
  if (lower.includes("path") || lower.includes("mediator") || lower.includes("via")) {
    hints.path = message;
  }
  if (Object.keys(hints).length === 0) hints.target = message;
  return hints;
}

export function formatResult(result: QueryResultJson, n: number | null): string[] {
  const lines = [
    `p = ${result.probability.toFixed(4)}`,
    n === null ? `method: ${result.query.level}` : `method: ${result.query.level}, n = ${n}`,
  ];
  if (result.distribution) {
    const body = Object.entries(result.distribution)
      .map(([value, p]) => `${value}: ${p.toFixed(4)}`)
      .join("  ");
    lines.push(body);
  }
  return lines;
}

// Worked examples, fillable with one click.
export const PRESETS: { label: string; form: QueryForm }[] = [
  {
    label: "who leads the mimic pair",
    form: { level: "hypothesis-posterior", target: "L=blue", evidence: "B=right", do: "R=left", path: "" },
  },
  {
    label: "would the chooser still pick red",
    form: { level: "counterfactual", target: "R=red", evidence: "D=left, R=red", do: "D=right", path: "" },
  },
  {
    label: "marginal of the terminal side",
    form: { level: "associational", target: "T=left", evidence: "", do: "", path: "" },
  },
];
