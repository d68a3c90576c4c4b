"""Deterministic perception-action rollouts and branch surgery.

A trace is the full record of one episode: world, memory, observation, and
action at every step. Branching replays a stored trace up to a chosen step,
applies one surgical change there, and regenerates the remainder. All
randomness flows through per-step named streams derived from the trace's
base seed, so an intervention at step t leaves the noise both before and
after t unchanged; only the consequences of the change itself differ.
Reseeding is itself one of the surgery kinds and swaps the streams from t
onward.

Stream layout: record t's world transition draws from child stream
(t, ROLE_ENV) and its action from (t, ROLE_AGENT); the initial world is
record 1's transition and the initial memory uses (0, ROLE_AGENT).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Any

from causalprobe.agents import AgentSpec, MemoryState, agent_act, agent_init
from causalprobe.envs import ACTION_LABELS, apply_edit, env_init, env_step, observe
from causalprobe.gridworld import (
    Action,
    EnvSpec,
    Observation,
    WorldState,
    canonical_dumps,
)
from causalprobe.seeds import Seed

ROLE_ENV = 0
ROLE_AGENT = 1

_LABEL_ACTIONS = {v: k for k, v in ACTION_LABELS.items()}

INTERVENTION_KINDS = ("world-edit", "agent-edit", "force-action", "reseed")

# Bump when the trace wire format changes shape. Serialized traces carry it
# so readers (file loaders, the browser UI) can refuse payloads they do not
# speak instead of misrendering them.
SCHEMA_VERSION = 1


class InvalidInterventionError(Exception):
    """Raised for malformed surgery requests (bad kind, step, or payload)."""


@dataclass(frozen=True)
class InterventionSpec:
    """One surgical change at step t of an existing trace.

    kind selects the surgery: ``world-edit`` applies a world edit at path
    before the agent observes; ``agent-edit`` writes one memory slot before
    the agent acts; ``force-action`` overrides the executed action;
    ``reseed`` swaps the random streams from t onward (value is the salt).
    """

    kind: str
    t: int
    path: tuple = ()
    value: Any = None

    @classmethod
    def of(cls, kind: str, t: int, path: tuple | list = (), value: Any = None) -> "InterventionSpec":
        if kind not in INTERVENTION_KINDS:
            raise InvalidInterventionError(f"unknown intervention kind {kind!r}")
        if isinstance(value, list):
            value = tuple(value)
        return cls(kind, int(t), tuple(path), value)

    def to_json(self) -> dict:
        value = list(self.value) if isinstance(self.value, tuple) else self.value
        return {"kind": self.kind, "t": self.t, "path": list(self.path), "value": value}

    @classmethod
    def from_json(cls, data: dict) -> "InterventionSpec":
        return cls.of(data["kind"], data["t"], data.get("path", ()), data.get("value"))


@dataclass(frozen=True)
class StepRecord:
    """State of the loop at one step: the world the agent saw, what it saw,
    what it remembered afterwards, and the action it executed."""

    t: int
    world: WorldState
    memory: MemoryState
    observation: Observation
    action: Action

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "world": self.world.to_json(),
            "memory": self.memory.to_json(),
            "observation": self.observation.to_json(),
            "action": ACTION_LABELS[Action(self.action)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepRecord":
        return cls(
            t=data["t"],
            world=WorldState.from_json(data["world"]),
            memory=MemoryState.from_json(data["memory"]),
            observation=Observation.from_json(data["observation"]),
            action=_LABEL_ACTIONS[data["action"]],
        )


@dataclass(frozen=True)
class Trace:
    trace_id: str
    env: EnvSpec
    agent: AgentSpec
    seed: Seed
    steps: tuple[StepRecord, ...]
    reseeds: tuple[tuple[int, int], ...] = ()
    parent_id: str | None = None
    branch_point: int | None = None
    intervention: InterventionSpec | None = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def final_world(self) -> WorldState:
        return self.steps[-1].world

    @property
    def complete(self) -> bool:
        return self.final_world.terminated

    @property
    def total_reward(self) -> float:
        return sum(s.observation.reward for s in self.steps)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "trace-id": self.trace_id,
            "env": self.env.to_json(),
            "agent": self.agent.to_json(),
            "seed": self.seed.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "reseeds": [list(r) for r in self.reseeds],
            "parent-id": self.parent_id,
            "branch-point": self.branch_point,
            "intervention": self.intervention.to_json() if self.intervention else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Trace":
        schema = data.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ValueError(f"trace schema {schema} not supported (this build speaks {SCHEMA_VERSION})")
        iv = data.get("intervention")
        return cls(
            trace_id=data["trace-id"],
            env=EnvSpec.from_json(data["env"]),
            agent=AgentSpec.from_json(data["agent"]),
            seed=Seed.from_json(data["seed"]),
            steps=tuple(StepRecord.from_json(s) for s in data["steps"]),
            reseeds=tuple((int(t), int(s)) for t, s in data.get("reseeds", [])),
            parent_id=data.get("parent-id"),
            branch_point=data.get("branch-point"),
            intervention=InterventionSpec.from_json(iv) if iv else None,
        )


# ---------------------------------------------------------------------------
# stream derivation and trace identity


def _stream(seed: Seed, reseeds: tuple[tuple[int, int], ...], t: int, role: int) -> Seed:
    salts = [salt for from_t, salt in reseeds if from_t <= t]
    return seed.child(*salts, t, role)


def _digest(payload: dict) -> str:
    return "t" + hashlib.sha256(canonical_dumps(payload).encode()).hexdigest()[:16]


def root_trace_id(env: EnvSpec, agent: AgentSpec, seed: Seed) -> str:
    return _digest({"env": env.to_json(), "agent": agent.to_json(), "seed": seed.to_json()})


def branch_trace_id(parent_id: str, iv: InterventionSpec) -> str:
    return _digest({"parent": parent_id, "intervention": iv.to_json()})


# ---------------------------------------------------------------------------
# rollout, branch, extend


def _continue(
    env: EnvSpec,
    agent: AgentSpec,
    seed: Seed,
    reseeds: tuple[tuple[int, int], ...],
    steps: list[StepRecord],
    world: WorldState,
    memory: MemoryState,
    t: int,
    max_steps: int | None,
) -> list[StepRecord]:
    """Run the standard loop from record t, appending to steps in place."""
    while True:
        obs = observe(world, env)
        memory, action = agent_act(agent, memory, obs, _stream(seed, reseeds, t, ROLE_AGENT))
        steps.append(StepRecord(t, world, memory, obs, action))
        if world.terminated or (max_steps is not None and t >= max_steps):
            return steps
        world, _ = env_step(world, action, _stream(seed, reseeds, t + 1, ROLE_ENV), env)
        t += 1


def rollout(env: EnvSpec, agent: AgentSpec, seed: Seed, max_steps: int | None = None) -> Trace:
    """One fresh episode from its own seeded initial state."""
    reseeds: tuple[tuple[int, int], ...] = ()
    world = env_init(env, _stream(seed, reseeds, 1, ROLE_ENV))
    memory = agent_init(agent, _stream(seed, reseeds, 0, ROLE_AGENT))
    steps = _continue(env, agent, seed, reseeds, [], world, memory, 1, max_steps)
    return Trace(
        trace_id=root_trace_id(env, agent, seed),
        env=env,
        agent=agent,
        seed=seed,
        steps=tuple(steps),
    )


def extend(trace: Trace, max_steps: int | None = None) -> Trace:
    """Continue a truncated trace along its original streams. A completed
    trace comes back unchanged; identity is preserved either way."""
    if trace.complete or (max_steps is not None and len(trace.steps) >= max_steps):
        return trace
    last = trace.steps[-1]
    world, _ = env_step(
        last.world, last.action, _stream(trace.seed, trace.reseeds, last.t + 1, ROLE_ENV), trace.env
    )
    steps = _continue(
        trace.env,
        trace.agent,
        trace.seed,
        trace.reseeds,
        list(trace.steps),
        world,
        last.memory,
        last.t + 1,
        max_steps,
    )
    return replace(trace, steps=tuple(steps))


def intervene(parent: Trace, iv: InterventionSpec, max_steps: int | None = None) -> Trace:
    """Branch a stored trace: keep everything before step t, apply the
    surgery at t, and regenerate the rest under shared noise."""
    t = iv.t
    if not 1 <= t <= len(parent.steps):
        raise InvalidInterventionError(
            f"step {t} outside the recorded range 1..{len(parent.steps)}"
        )
    prefix = list(parent.steps[: t - 1])
    rec = parent.steps[t - 1]
    memory_prev = parent.steps[t - 2].memory if t >= 2 else agent_init(
        parent.agent, _stream(parent.seed, parent.reseeds, 0, ROLE_AGENT)
    )
    reseeds = parent.reseeds

    if iv.kind == "world-edit":
        world = apply_edit(rec.world, iv.path, list(iv.value) if isinstance(iv.value, tuple) else iv.value)
        obs = observe(world, parent.env)
        memory, action = agent_act(
            parent.agent, memory_prev, obs, _stream(parent.seed, reseeds, t, ROLE_AGENT)
        )
        new_rec = StepRecord(t, world, memory, obs, action)
    elif iv.kind == "agent-edit":
        if len(iv.path) != 1:
            raise InvalidInterventionError(f"agent-edit path must name one slot, got {iv.path!r}")
        edited = memory_prev.with_slot(iv.path[0], iv.value)
        obs = observe(rec.world, parent.env)
        memory, action = agent_act(
            parent.agent, edited, obs, _stream(parent.seed, reseeds, t, ROLE_AGENT)
        )
        new_rec = StepRecord(t, rec.world, memory, obs, action)
    elif iv.kind == "force-action":
        if iv.value not in _LABEL_ACTIONS:
            raise InvalidInterventionError(f"force-action value must name an action, got {iv.value!r}")
        new_rec = replace(rec, action=_LABEL_ACTIONS[iv.value])
    elif iv.kind == "reseed":
        if not isinstance(iv.value, int) or iv.value < 0:
            raise InvalidInterventionError(f"reseed value must be a non-negative salt, got {iv.value!r}")
        reseeds = parent.reseeds + ((t, iv.value),)
        if t == 1:
            world = env_init(parent.env, _stream(parent.seed, reseeds, 1, ROLE_ENV))
        else:
            prev = parent.steps[t - 2]
            world, _ = env_step(
                prev.world, prev.action, _stream(parent.seed, reseeds, t, ROLE_ENV), parent.env
            )
        obs = observe(world, parent.env)
        memory, action = agent_act(
            parent.agent, memory_prev, obs, _stream(parent.seed, reseeds, t, ROLE_AGENT)
        )
        new_rec = StepRecord(t, world, memory, obs, action)
    else:
        raise InvalidInterventionError(f"unknown intervention kind {iv.kind!r}")

    steps = prefix + [new_rec]
    if not new_rec.world.terminated and (max_steps is None or t < max_steps):
        world, _ = env_step(
            new_rec.world,
            new_rec.action,
            _stream(parent.seed, reseeds, t + 1, ROLE_ENV),
            parent.env,
        )
        steps = _continue(
            parent.env,
            parent.agent,
            parent.seed,
            reseeds,
            steps,
            world,
            new_rec.memory,
            t + 1,
            max_steps,
        )
    return Trace(
        trace_id=branch_trace_id(parent.trace_id, iv),
        env=parent.env,
        agent=parent.agent,
        seed=parent.seed,
        steps=tuple(steps),
        reseeds=reseeds,
        parent_id=parent.trace_id,
        branch_point=t,
        intervention=iv,
    )


# ---------------------------------------------------------------------------
# storage


def dump_traces(path, traces) -> None:
    """Append traces to a JSONL file, one canonical line each."""
    with open(path, "a", encoding="utf-8") as fh:
        for trace in traces:
            fh.write(canonical_dumps(trace.to_json()) + "\n")


def load_traces(path) -> list[Trace]:
    traces = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                traces.append(Trace.from_json(json.loads(line)))
    return traces
