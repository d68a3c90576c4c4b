// Wire types for the causalprobe HTTP API. Field names follow the JSON
// exactly, hyphens and all; nothing here is computed client-side.

export interface EnvJson {
  env_id: string;
  params: Record<string, string>;
}

export interface AgentJson {
  "agent-id": string;
  params: Record<string, string>;
}

export interface WorldJson {
  grid: number[][];
  entities: Record<string, number[]>;
  inventory: Record<string, string[]>;
  step_count: number;
  terminated: boolean;
  env_id: string;
  aux: Record<string, string>;
}

export interface StepJson {
  t: number;
  world: WorldJson;
  memory: Record<string, unknown>;
  observation: { window: number[][]; reward: number; terminal: boolean; extras: Record<string, string> };
  action: string;
}

export interface InterventionJson {
  kind: string;
  t: number;
  path: (string | number)[];
  value: unknown;
}

export interface TraceJson {
  schema: number;
  "trace-id": string;
  env: EnvJson;
  agent: AgentJson;
  seed: { value: number; path: number[] };
  steps: StepJson[];
  reseeds: [number, number][];
  "parent-id": string | null;
  "branch-point": number | null;
  intervention: InterventionJson | null;
}

export interface SessionJson {
  "session-id": string;
  env: EnvJson;
  agent: AgentJson;
  seed: number;
  "created-at": string;
  "trace-ids": string[];
  "model-ids": string[];
}

export interface RegimeJson {
  key: string;
  interventions: InterventionJson[];
  "env-params": Record<string, string>;
  sets: Record<string, string>;
}

export interface VariableJson {
  name: string;
  domain: string[];
  parents: string[];
  kind: string;
  params: Record<string, string>;
}

export interface RecipeJson {
  kind: string;
  [extra: string]: unknown;
}

export interface ExperimentJson {
  name: string;
  env: EnvJson;
  rollouts: number;
  variables: VariableJson[];
  columns: {
    label: string;
    jobs: { regime: RegimeJson; agent: AgentJson }[];
    recipe: RecipeJson;
  }[];
}

export interface QueryJson {
  level: string;
  target: Record<string, string>;
  evidence?: Record<string, string>;
  do?: Record<string, string>;
  path?: string[];
}

export interface QueryResultJson {
  query: QueryJson;
  probability: number;
  distribution?: Record<string, number>;
}

export interface JobJson {
  "job-id": string;
  "tree-id": string;
  status: "running" | "done" | "failed";
  error: string | null;
}

export interface TableRowJson {
  label: string;
  query: QueryJson | Record<string, unknown>;
  values: number[];
}

export interface TableJson {
  name: string;
  columns: string[];
  rows: TableRowJson[];
  meta: Record<string, unknown>;
}

export interface ErrorJson {
  code: string;
  message: string;
}

// Tile integers as the grid serializes them, in enum order.
// Trace wire-format version this bundle was written against; the server
// stamps each trace payload with the version it emits.
export const TRACE_SCHEMA = 1;

export const TILE_KINDS = [
  "wall",
  "floor",
  "grass",
  "sand",
  "gate-open",
  "gate-closed",
  "key",
  "pill",
  "pill-red",
  "pill-green",
  "terminal",
  "oob",
] as const;

export type TileKind = (typeof TILE_KINDS)[number];

export const ACTIONS = ["up", "down", "left", "right", "no-op"] as const;

export type ActionLabel = (typeof ACTIONS)[number];

export const QUERY_LEVELS = [
  "associational",
  "interventional",
  "counterfactual",
  "path-response",
  "hypothesis-posterior",
] as const;
