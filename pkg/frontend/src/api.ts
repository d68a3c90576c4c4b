// Thin typed client over the HTTP API. Every mutating call accepts an
// optional request key; sending the same key twice replays the stored
// response instead of repeating the work.

import type {
  ExperimentJson,
  InterventionJson,
  JobJson,
  QueryJson,
  QueryResultJson,
  SessionJson,
  TableJson,
  TraceJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export function requestKey(): string {
  if (typeof crypto !== "undefined" && crypto.randomUUID) {
    return crypto.randomUUID();
  }
  return `k${Date.now()}-${Math.floor(Math.random() * 1e9)}`;
}

export interface SessionRequest {
  env: { env_id: string; params: Record<string, string> };
  agent: { "agent-id": string; params: Record<string, string> };
  seed: number;
  steps?: number;
}

export interface CollectRequest {
  regimes: unknown[];
  n: number;
  extractors: unknown[];
  seed: number;
}

export interface ModelRequest {
  tree: string;
  recipe: unknown;
  regimes?: string[];
  alpha?: number;
}

export class Client {
  constructor(private readonly base: string = "") {}

  private async send<T>(method: string, path: string, body?: unknown, key?: string): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (key !== undefined) headers["Request-Key"] = key;
    const response = await fetch(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const code = typeof payload?.code === "string" ? payload.code : "error";
      const message = typeof payload?.message === "string" ? payload.message : response.statusText;
      throw new ApiError(response.status, code, message);
    }
    return payload as T;
  }

  createSession(req: SessionRequest, key?: string): Promise<SessionJson> {
    return this.send("POST", "/sessions", req, key);
  }

  session(sid: string): Promise<SessionJson> {
    return this.send("GET", `/sessions/${sid}`);
  }

  traces(sid: string): Promise<{ traces: TraceJson[] }> {
    return this.send("GET", `/sessions/${sid}/traces`);
  }

  extend(sid: string, tid: string, t?: number, key?: string): Promise<TraceJson> {
    return this.send("POST", `/sessions/${sid}/traces/${tid}/extend`, t === undefined ? {} : { t }, key);
  }

  intervene(sid: string, tid: string, spec: InterventionJson, key?: string): Promise<TraceJson> {
    return this.send("POST", `/sessions/${sid}/traces/${tid}/intervene`, spec, key);
  }

  collect(sid: string, req: CollectRequest, key?: string): Promise<{ "job-id": string; "tree-id": string }> {
    return this.send("POST", `/sessions/${sid}/collect`, req, key);
  }

  collectStatus(sid: string, jid: string): Promise<JobJson> {
    return this.send("GET", `/sessions/${sid}/collect/${jid}`);
  }

  createModel(sid: string, req: ModelRequest, key?: string): Promise<{ "model-id": string }> {
    return this.send("POST", `/sessions/${sid}/models`, req, key);
  }

  query(mid: string, q: QueryJson): Promise<QueryResultJson> {
    return this.send("POST", `/models/${mid}/query`, q);
  }

  experiments(): Promise<{ experiments: ExperimentJson[] }> {
    return this.send("GET", "/experiments");
  }

  runExperiment(name: string, req: { rollouts?: number; seed: number }, key?: string): Promise<TableJson> {
    return this.send("POST", `/experiments/${name}/run`, req, key);
  }
}
