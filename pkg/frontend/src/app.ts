// Single-page wiring. All truth lives on the server: every refresh
// rebuilds the view from GET endpoints plus the session id in the URL
// hash, and every number on screen was fetched.

import { ApiError, Client, requestKey } from "./api.js";
import { buildQuery, fieldHints, formatResult, PRESETS, type QueryForm } from "./console.js";
import {
  describeDraft,
  editorsFor,
  gateValues,
  serializeDraft,
  validateDraft,
  type Draft,
  type DraftKind,
} from "./drafts.js";
import { renderGrid, schemaNotice } from "./grid.js";
import {
  branchAdded,
  cancelDraft,
  draftRejected,
  editDraft,
  emptyState,
  openDraft,
  recordQuery,
  selectTrace,
  setCursor,
  traceById,
  withForest,
  type ViewState,
} from "./state.js";
import { renderTree } from "./tree.js";
import type { ExperimentJson } from "./types.js";
import { ACTIONS } from "./types.js";

const client = new Client();

let state: ViewState = emptyState();
let experiments: ExperimentJson[] = [];
// Display-only provenance for models this page created (id -> sample count).
const modelSamples = new Map<string, number>();
let modelIds: string[] = [];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string): void {
  el("status").textContent = text;
}

// ---- session lifecycle ----------------------------------------------------

function rosterFromExperiments(specs: ExperimentJson[]): Map<string, string[]> {
  const roster = new Map<string, Set<string>>();
  for (const spec of specs) {
    const agents = roster.get(spec.env.env_id) ?? new Set<string>();
    for (const column of spec.columns) {
      for (const job of column.jobs) agents.add(job.agent["agent-id"]);
    }
    roster.set(spec.env.env_id, agents);
  }
  return new Map([...roster].map(([env, agents]) => [env, [...agents].sort()]));
}

async function createSession(): Promise<void> {
  const envId = el<HTMLSelectElement>("env-pick").value;
  const agentId = el<HTMLSelectElement>("agent-pick").value;
  const seed = Number(el<HTMLInputElement>("seed-pick").value);
  const session = await client.createSession(
    {
      env: { env_id: envId, params: {} },
      agent: { "agent-id": agentId, params: {} },
      seed,
    },
    requestKey(),
  );
  location.hash = `#/${session["session-id"]}`;
  await loadSession(session["session-id"]);
}

async function loadSession(sid: string): Promise<void> {
  const session = await client.session(sid);
  state = { ...emptyState(), sessionId: sid };
  modelIds = session["model-ids"];
  el("session-name").textContent =
    `${sid}: ${session.env.env_id} / ${session.agent["agent-id"]} (seed ${session.seed})`;
  await refreshForest();
  renderModels();
  renderAll();
}

async function refreshForest(): Promise<void> {
  if (!state.sessionId) return;
  const forest = await client.traces(state.sessionId);
  state = withForest(state, forest.traces);
}

// ---- panels ---------------------------------------------------------------

function renderAll(): void {
  const trace = traceById(state, state.selected);
  renderTree(el("tree"), state.traces, state.selected, state.cursor, {
    onSelect: (id) => {
      state = selectTrace(state, id);
      renderAll();
    },
    onScrub: (id, stepIndex) => {
      state = setCursor(selectTrace(state, id), stepIndex);
      renderAll();
    },
  });
  const gridBox = el("grid-box");
  const stepInfo = el("step-info");
  const banner = el("schema-banner");
  const notice = trace ? schemaNotice(trace.schema) : null;
  banner.textContent = notice ?? "";
  banner.hidden = notice === null;
  if (trace && trace.steps.length > 0) {
    const step = trace.steps[state.cursor]!;
    renderGrid(gridBox, step.world);
    stepInfo.textContent =
      `step ${step.t}/${trace.steps.length}  action ${step.action}  reward ${step.observation.reward}`;
  } else {
    gridBox.textContent = "no trace selected";
    stepInfo.textContent = "";
  }
  renderDraftPanel();
}

function renderDraftPanel(): void {
  const box = el("draft-box");
  box.textContent = "";
  const trace = traceById(state, state.selected);
  if (!trace) return;

  const buttons = document.createElement("div");
  buttons.className = "draft-kinds";
  for (const kind of editorsFor(trace.env.env_id)) {
    const button = document.createElement("button");
    button.textContent = kind;
    button.addEventListener("click", () => {
      state = openDraft(state, kind);
      renderAll();
    });
    buttons.appendChild(button);
  }
  box.appendChild(buttons);

  const draft = state.draft;
  if (!draft) return;

  const form = document.createElement("div");
  form.className = "draft-form";
  const title = document.createElement("div");
  title.className = "draft-title";
  title.textContent = describeDraft(draft);
  form.appendChild(title);

  const patch = (next: Draft) => {
    state = editDraft(state, next);
    renderAll();
  };
  form.appendChild(numberField("step", draft.t, (t) => patch({ ...draft, t })));
  switch (draft.kind) {
    case "move-entity":
      form.appendChild(textField("entity", draft.entity, (entity) => patch({ ...draft, entity })));
      form.appendChild(numberField("row", draft.row, (row) => patch({ ...draft, row })));
      form.appendChild(numberField("col", draft.col, (col) => patch({ ...draft, col })));
      break;
    case "toggle-gate":
      form.appendChild(
        selectField("value", draft.value, gateValues(trace.env.env_id), (value) => patch({ ...draft, value })),
      );
      break;
    case "swap-floor":
      form.appendChild(selectField("floor", draft.value, ["grass", "sand"], (value) => patch({ ...draft, value })));
      break;
    case "move-pill":
      form.appendChild(selectField("side", draft.side, ["left", "right"], (side) => patch({ ...draft, side })));
      break;
    case "move-pill-cell":
      form.appendChild(numberField("row", draft.row, (row) => patch({ ...draft, row })));
      form.appendChild(numberField("col", draft.col, (col) => patch({ ...draft, col })));
      break;
    case "reseed":
      form.appendChild(numberField("seed", draft.seed, (seed) => patch({ ...draft, seed })));
      break;
    case "force-action":
      form.appendChild(
        selectField("action", draft.action, [...ACTIONS], (action) =>
          patch({ ...draft, action: action as (typeof ACTIONS)[number] }),
        ),
      );
      break;
  }

  const problems = validateDraft(draft, trace.steps.length);
  if (problems.length) {
    const warning = document.createElement("div");
    warning.className = "draft-problems";
    warning.textContent = problems.join("; ");
    form.appendChild(warning);
  }
  if (state.draftError) {
    const rejected = document.createElement("div");
    rejected.className = "draft-rejected";
    rejected.textContent = state.draftError;
    form.appendChild(rejected);
  }

  const apply = document.createElement("button");
  apply.textContent = "branch";
  apply.disabled = problems.length > 0;
  apply.addEventListener("click", () => void submitDraft());
  form.appendChild(apply);

  const cancel = document.createElement("button");
  cancel.textContent = "cancel";
  cancel.addEventListener("click", () => {
    state = cancelDraft(state);
    renderAll();
  });
  form.appendChild(cancel);

  box.appendChild(form);
}

async function submitDraft(): Promise<void> {
  const draft = state.draft;
  const trace = traceById(state, state.selected);
  if (!draft || !trace || !state.sessionId) return;
  try {
    const branch = await client.intervene(
      state.sessionId,
      trace["trace-id"],
      serializeDraft(draft),
      requestKey(),
    );
    state = branchAdded(state, branch);
    await refreshForest();
  } catch (error) {
    if (error instanceof ApiError) {
      state = draftRejected(state, `${error.code}: ${error.message}`);
    } else {
      state = draftRejected(state, String(error));
    }
  }
  renderAll();
}

// ---- small form helpers ---------------------------------------------------

function labeled(name: string, input: HTMLElement): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  const caption = document.createElement("span");
  caption.textContent = name;
  wrap.appendChild(caption);
  wrap.appendChild(input);
  return wrap;
}

function numberField(name: string, value: number, onChange: (v: number) => void): HTMLElement {
  const input = document.createElement("input");
  input.type = "number";
  input.value = String(value);
  input.addEventListener("change", () => onChange(Number(input.value)));
  return labeled(name, input);
}

function textField(name: string, value: string, onChange: (v: string) => void): HTMLElement {
  const input = document.createElement("input");
  input.type = "text";
  input.value = value;
  input.addEventListener("change", () => onChange(input.value));
  return labeled(name, input);
}

function selectField(
  name: string,
  value: string,
  options: string[],
  onChange: (v: string) => void,
): HTMLElement {
  const input = document.createElement("select");
  for (const option of options) {
    const node = document.createElement("option");
    node.value = option;
    node.textContent = option;
    input.appendChild(node);
  }
  input.value = value;
  input.addEventListener("change", () => onChange(input.value));
  return labeled(name, input);
}

// ---- models ---------------------------------------------------------------

function renderModels(): void {
  const pick = el<HTMLSelectElement>("model-pick");
  pick.textContent = "";
  for (const id of modelIds) {
    const option = document.createElement("option");
    option.value = id;
    const n = modelSamples.get(id);
    option.textContent = n === undefined ? id : `${id} (n=${n})`;
    pick.appendChild(option);
  }
}

async function buildModel(): Promise<void> {
  if (!state.sessionId) return;
  const spec = experiments.find((e) => e.name === el<HTMLSelectElement>("structure-pick").value);
  if (!spec) return;
  const column = spec.columns[0];
  if (!column) return;
  const n = Number(el<HTMLInputElement>("collect-n").value);
  const seed = Number(el<HTMLInputElement>("collect-seed").value);
  setStatus("collecting...");
  const job = await client.collect(
    state.sessionId,
    {
      regimes: column.jobs.map((j) => j.regime),
      n,
      extractors: spec.variables,
      seed,
    },
    requestKey(),
  );
  const sid = state.sessionId;
  const waitForTree = async (): Promise<void> => {
    const status = await client.collectStatus(sid, job["job-id"]);
    if (status.status === "running") {
      window.setTimeout(() => void waitForTree(), 500);
      return;
    }
    if (status.status === "failed") {
      setStatus(`collection failed: ${status.error ?? "unknown"}`);
      return;
    }
    const model = await client.createModel(
      sid,
      { tree: job["tree-id"], recipe: column.recipe },
      requestKey(),
    );
    modelSamples.set(model["model-id"], n * column.jobs.length);
    const session = await client.session(sid);
    modelIds = session["model-ids"];
    renderModels();
    setStatus(`model ${model["model-id"]} ready`);
  };
  await waitForTree();
}

// ---- query console --------------------------------------------------------

function consoleForm(): QueryForm {
  return {
    level: el<HTMLSelectElement>("q-level").value,
    target: el<HTMLInputElement>("q-target").value,
    evidence: el<HTMLInputElement>("q-evidence").value,
    do: el<HTMLInputElement>("q-do").value,
    path: el<HTMLInputElement>("q-path").value,
  };
}

function fillConsole(form: QueryForm): void {
  el<HTMLSelectElement>("q-level").value = form.level;
  el<HTMLInputElement>("q-target").value = form.target;
  el<HTMLInputElement>("q-evidence").value = form.evidence;
  el<HTMLInputElement>("q-do").value = form.do;
  el<HTMLInputElement>("q-path").value = form.path;
}

function showHints(hints: Partial<Record<keyof QueryForm, string>>): void {
  for (const field of ["level", "target", "evidence", "do", "path"] as const) {
    el(`hint-${field}`).textContent = hints[field] ?? "";
  }
}

async function submitQuery(): Promise<void> {
  const modelId = el<HTMLSelectElement>("model-pick").value;
  if (!modelId) {
    setStatus("build a model first");
    return;
  }
  showHints({});
  let query;
  try {
    query = buildQuery(consoleForm());
  } catch (error) {
    showHints(fieldHints(error instanceof Error ? error.message : String(error)));
    return;
  }
  try {
    const result = await client.query(modelId, query);
    state = recordQuery(state, {
      modelId,
      query,
      result,
      error: null,
      n: modelSamples.get(modelId) ?? null,
    });
  } catch (error) {
    if (error instanceof ApiError && error.status === 422) {
      showHints(fieldHints(error.message));
      return;
    }
    state = recordQuery(state, {
      modelId,
      query,
      result: null,
      error: String(error),
      n: null,
    });
  }
  renderHistory();
}

function renderHistory(): void {
  const box = el("history");
  box.textContent = "";
  for (const entry of [...state.history].reverse()) {
    const item = document.createElement("div");
    item.className = "history-entry";
    const head = document.createElement("div");
    head.className = "history-query";
    head.textContent = `${entry.modelId}: ${JSON.stringify(entry.query)}`;
    item.appendChild(head);
    const body = document.createElement("div");
    body.className = "history-result";
    body.textContent = entry.result
      ? formatResult(entry.result, entry.n).join("\n")
      : (entry.error ?? "");
    item.appendChild(body);
    box.appendChild(item);
  }
}

// ---- bootstrap ------------------------------------------------------------

async function main(): Promise<void> {
  experiments = (await client.experiments()).experiments;
  const roster = rosterFromExperiments(experiments);

  const envPick = el<HTMLSelectElement>("env-pick");
  for (const envId of roster.keys()) {
    const option = document.createElement("option");
    option.value = envId;
    option.textContent = envId;
    envPick.appendChild(option);
  }
  const syncAgents = () => {
    const agentPick = el<HTMLSelectElement>("agent-pick");
    agentPick.textContent = "";
    for (const agentId of roster.get(envPick.value) ?? []) {
      const option = document.createElement("option");
      option.value = agentId;
      option.textContent = agentId;
      agentPick.appendChild(option);
    }
  };
  envPick.addEventListener("change", syncAgents);
  syncAgents();

  const structurePick = el<HTMLSelectElement>("structure-pick");
  for (const spec of experiments) {
    const option = document.createElement("option");
    option.value = spec.name;
    option.textContent = spec.name;
    structurePick.appendChild(option);
  }

  for (const preset of PRESETS) {
    const button = document.createElement("button");
    button.textContent = preset.label;
    button.addEventListener("click", () => fillConsole(preset.form));
    el("presets").appendChild(button);
  }

  el("new-session").addEventListener("click", () => void createSession().catch(fail));
  el("build-model").addEventListener("click", () => void buildModel().catch(fail));
  el("run-query").addEventListener("click", () => void submitQuery().catch(fail));
  el("refresh").addEventListener("click", () => {
    void (async () => {
      await refreshForest();
      renderAll();
    })().catch(fail);
  });

  const fromHash = location.hash.replace(/^#\//, "");
  if (fromHash) await loadSession(fromHash);
}

function fail(error: unknown): void {
  setStatus(error instanceof ApiError ? `${error.code}: ${error.message}` : String(error));
}

void main().catch(fail);
