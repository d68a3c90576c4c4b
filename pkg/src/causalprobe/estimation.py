"""From rollout corpora to conditional probability tables.

The pipeline: declare discrete variables with extraction rules, collect
seeded rollouts under named data-gathering regimes (observational or with
scripted interventions), count the extracted joint assignments per regime,
and turn counts into smoothed tables. A regime records which variables its
interventions pin, so table assembly can keep a mechanism's estimate free
of data where that mechanism was overridden.

Smoothing is a flat Dirichlet prior with unit concentration: a row seen n
times with c hits estimates (c + 1) / (n + K) over a K-valued domain, and
a row never seen at all sits at the uniform prior mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from causalprobe.agents import AgentSpec
from causalprobe.gridworld import EnvSpec, Pos, Tile, WorldState
from causalprobe.seeds import Seed
from causalprobe.simulator import InterventionSpec, Trace, intervene, rollout

UNDEF = "undef"


class ExtractionError(Exception):
    """Raised when a variable's rule cannot be evaluated at all (as opposed
    to evaluating to an undefined value, which drops the sample)."""


@dataclass(frozen=True)
class VariableDef:
    """A named discrete variable: its domain, its parents in the posited
    graph, and the rule that reads its value off a trace.

    Rule kinds:
      reward        total collected reward, as "0" or "1"
      has-item      "yes"/"no" for an inventory item (param: item)
      pill-color    "red"/"green" from the collected pill kind
      agent-label   fixed value per agent identity (params: one entry per
                    agent id, mapping it to a domain value)
      tile-kind     "grass"/"sand" at a fixed cell (params: row, col, t)
      door          "open"/"closed" at a fixed cell (params: row, col, t)
      gate-side     which of two gate cells is open (params: left, right, t)
      pill-side     "left"/"right" of the pill tile (params: col, t)
      entity-side   "left"/"right" of an entity (params: entity, col, t)
      quadrant      room quadrant of the pill tile (param: t)
      move          "left"/"right" from an entity's displacement (params:
                    entity, t)

    A t parameter is a 1-based step or "end" for the final record.
    """

    name: str
    domain: tuple[str, ...]
    parents: tuple[str, ...] = ()
    kind: str = ""
    params: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, name, domain, parents=(), kind="", **params) -> "VariableDef":
        return cls(
            name,
            tuple(domain),
            tuple(parents),
            kind,
            tuple(sorted((k, str(v)) for k, v in params.items())),
        )

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "domain": list(self.domain),
            "parents": list(self.parents),
            "kind": self.kind,
            "params": dict(self.params),
        }

    @classmethod
    def from_json(cls, data: dict) -> "VariableDef":
        return cls.of(
            data["name"], data["domain"], data["parents"], data["kind"], **data["params"]
        )


# ---------------------------------------------------------------------------
# extraction


def _record_at(trace: Trace, spec: str | None):
    if spec is None or spec == "end":
        return trace.steps[-1]
    t = int(spec)
    if not 1 <= t <= len(trace.steps):
        return None
    return trace.steps[t - 1]


def _find_tile(world: WorldState, kinds: set[Tile]) -> Pos | None:
    for r in range(world.rows):
        for c in range(world.cols):
            if Tile(world.grid[r][c]) in kinds:
                return (r, c)
    return None


def extract_value(var: VariableDef, trace: Trace) -> str:
    """Evaluate one variable on one trace; UNDEF when the rule's referent
    does not exist there (no pill held, displacement of zero, and so on)."""
    kind = var.kind
    if kind == "reward":
        return "1" if trace.total_reward > 0 else "0"
    if kind == "has-item":
        item = var.get("item") or ""
        subject = _subject(trace)
        return "yes" if item in trace.final_world.items_held(subject) else "no"
    if kind == "pill-color":
        held = trace.final_world.items_held(_subject(trace))
        if "pill:red" in held:
            return "red"
        if "pill:green" in held:
            return "green"
        return UNDEF
    if kind == "agent-label":
        value = var.get(trace.agent.agent_id)
        if value is None:
            raise ExtractionError(
                f"variable {var.name} has no label for agent {trace.agent.agent_id!r}"
            )
        return value
    rec = _record_at(trace, var.get("t", "1"))
    if rec is None:
        return UNDEF
    world = rec.world
    if kind == "tile-kind":
        tile = Tile(world.grid[int(var.get("row"))][int(var.get("col"))])
        return {Tile.GRASS: "grass", Tile.SAND: "sand"}.get(tile, UNDEF)
    if kind == "door":
        tile = Tile(world.grid[int(var.get("row"))][int(var.get("col"))])
        return {Tile.GATE_OPEN: "open", Tile.GATE_CLOSED: "closed"}.get(tile, UNDEF)
    if kind == "gate-side":
        lr, lc = (int(x) for x in var.get("left").split(":"))
        if Tile(world.grid[lr][lc]) == Tile.GATE_OPEN:
            return "left"
        rr, rc = (int(x) for x in var.get("right").split(":"))
        if Tile(world.grid[rr][rc]) == Tile.GATE_OPEN:
            return "right"
        return UNDEF
    if kind == "pill-side":
        pos = _find_tile(world, {Tile.PILL, Tile.PILL_RED, Tile.PILL_GREEN})
        if pos is None:
            return UNDEF
        split = int(var.get("col"))
        return "left" if pos[1] < split else "right" if pos[1] > split else UNDEF
    if kind == "entity-side":
        col = world.entity_pos(var.get("entity", _subject(trace)))[1]
        split = int(var.get("col"))
        return "left" if col < split else "right" if col > split else UNDEF
    if kind == "quadrant":
        from causalprobe.envs import pickup_quadrant

        pos = _find_tile(world, {Tile.PILL})
        return pickup_quadrant(pos) if pos is not None else UNDEF
    if kind == "move":
        t = rec.t
        if t + 1 > len(trace.steps):
            return UNDEF
        entity = var.get("entity", _subject(trace))
        before = world.entity_pos(entity)[1]
        after = trace.steps[t].world.entity_pos(entity)[1]
        if after < before:
            return "left"
        if after > before:
            return "right"
        return UNDEF
    raise ExtractionError(f"variable {var.name} has unknown rule kind {kind!r}")


def _subject(trace: Trace) -> str:
    from causalprobe.envs import subject_name

    return subject_name(trace.env)


def extract_assignment(variables: tuple[VariableDef, ...], trace: Trace) -> tuple[str, ...] | None:
    """All variables on one trace, in declaration order; None when any of
    them is undefined there."""
    values = []
    for var in variables:
        value = extract_value(var, trace)
        if value == UNDEF:
            return None
        if value not in var.domain:
            raise ExtractionError(
                f"{var.name} extracted {value!r} outside its domain {var.domain}"
            )
        values.append(value)
    return tuple(values)


# ---------------------------------------------------------------------------
# regimes and collection


@dataclass(frozen=True)
class Regime:
    """One data-gathering condition: scripted interventions applied to every
    rollout, optional environment parameter overrides, and the variables the
    condition pins (with their pinned values)."""

    key: str
    interventions: tuple[InterventionSpec, ...] = ()
    env_params: tuple[tuple[str, str], ...] = ()
    sets: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, key, interventions=(), env_params=(), sets=()) -> "Regime":
        return cls(
            key,
            tuple(interventions),
            tuple(sorted((k, str(v)) for k, v in dict(env_params).items())),
            tuple(sorted(dict(sets).items())),
        )

    def pinned(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.sets)

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "interventions": [iv.to_json() for iv in self.interventions],
            "env-params": dict(self.env_params),
            "sets": dict(self.sets),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Regime":
        return cls.of(
            data["key"],
            [InterventionSpec.from_json(iv) for iv in data.get("interventions", ())],
            data.get("env-params", {}),
            data.get("sets", {}),
        )


OBSERVATIONAL = Regime.of("observational")


@dataclass
class _RegimeCounts:
    sets: tuple[tuple[str, str], ...] = ()
    n: int = 0
    dropped: int = 0
    counts: dict[tuple[str, ...], int] = field(default_factory=dict)


class RolloutTree:
    """Per-regime joint assignment counts over a fixed variable set.

    The tree is the bridge between raw traces and probability tables: each
    regime's samples stay in their own subtree so interventional data never
    contaminates an estimate it should not touch.
    """

    def __init__(self, variables: tuple[VariableDef, ...]):
        self.variables = tuple(variables)
        self.regimes: dict[str, _RegimeCounts] = {}

    def _bucket(self, regime: Regime) -> _RegimeCounts:
        bucket = self.regimes.get(regime.key)
        if bucket is None:
            bucket = self.regimes[regime.key] = _RegimeCounts(sets=regime.sets)
        elif bucket.sets != regime.sets:
            raise ValueError(f"regime {regime.key!r} redeclared with different pins")
        return bucket

    def add(self, regime: Regime, trace: Trace) -> None:
        bucket = self._bucket(regime)
        assignment = extract_assignment(self.variables, trace)
        if assignment is None:
            bucket.dropped += 1
            return
        bucket.n += 1
        bucket.counts[assignment] = bucket.counts.get(assignment, 0) + 1

    def merge(self, other: "RolloutTree") -> "RolloutTree":
        if self.variables != other.variables:
            raise ValueError("cannot merge trees over different variables")
        merged = RolloutTree(self.variables)
        for src in (self, other):
            for key, bucket in src.regimes.items():
                dst = merged.regimes.get(key)
                if dst is None:
                    dst = merged.regimes[key] = _RegimeCounts(sets=bucket.sets)
                elif dst.sets != bucket.sets:
                    raise ValueError(f"regime {key!r} pinned differently in the two trees")
                dst.n += bucket.n
                dst.dropped += bucket.dropped
                for assignment, count in bucket.counts.items():
                    dst.counts[assignment] = dst.counts.get(assignment, 0) + count
        return merged

    def samples(self, keys) -> int:
        return sum(self.regimes[k].n for k in keys if k in self.regimes)

    def to_json(self) -> dict:
        return {
            "variables": [v.to_json() for v in self.variables],
            "regimes": {
                key: {
                    "sets": dict(bucket.sets),
                    "n": bucket.n,
                    "dropped": bucket.dropped,
                    "counts": {",".join(a): c for a, c in sorted(bucket.counts.items())},
                }
                for key, bucket in sorted(self.regimes.items())
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "RolloutTree":
        tree = cls(tuple(VariableDef.from_json(v) for v in data["variables"]))
        for key, raw in data["regimes"].items():
            bucket = _RegimeCounts(sets=tuple(sorted(raw["sets"].items())))
            bucket.n = raw["n"]
            bucket.dropped = raw["dropped"]
            bucket.counts = {tuple(a.split(",")): c for a, c in raw["counts"].items()}
            tree.regimes[key] = bucket
        return tree


def run_regime(env: EnvSpec, agent: AgentSpec, regime: Regime, seed: Seed, index: int) -> Trace:
    """The single rollout numbered index under a regime: a fresh episode
    from the per-rollout seed, then the regime's scripted surgeries."""
    spec = EnvSpec.of(env.env_id, **{**dict(env.params), **dict(regime.env_params)})
    trace = rollout(spec, agent, seed.child(index))
    for iv in regime.interventions:
        trace = intervene(trace, iv)
    return trace


def collect(
    tree: RolloutTree,
    env: EnvSpec,
    agent: AgentSpec,
    regime: Regime,
    count: int,
    seed: Seed,
    start: int = 0,
) -> RolloutTree:
    """Run count seeded rollouts under one regime and count them into the
    tree in place. The per-rollout seed depends only on (seed, index), so
    any split of the index range merges back to the same tree."""
    for index in range(start, start + count):
        tree.add(regime, run_regime(env, agent, regime, seed, index))
    return tree


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class Cpt:
    """One variable's smoothed conditional table. Rows are keyed by parent
    values in parent declaration order; each row is a probability vector
    over the variable's domain."""

    name: str
    domain: tuple[str, ...]
    parents: tuple[str, ...]
    rows: tuple[tuple[tuple[str, ...], tuple[float, ...]], ...]

    def row(self, parent_values: tuple[str, ...]) -> tuple[float, ...]:
        for key, probs in self.rows:
            if key == parent_values:
                return probs
        raise KeyError(f"{self.name} has no row for {parent_values!r}")

    def p(self, value: str, parent_values: tuple[str, ...] = ()) -> float:
        return self.row(parent_values)[self.domain.index(value)]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "domain": list(self.domain),
            "parents": list(self.parents),
            "rows": {",".join(k) if k else "": list(v) for k, v in self.rows},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Cpt":
        rows = tuple(
            (tuple(k.split(",")) if k else (), tuple(data["rows"][k])) for k in sorted(data["rows"])
        )
        return cls(data["name"], tuple(data["domain"]), tuple(data["parents"]), rows)


def estimate_cpt(
    tree: RolloutTree,
    name: str,
    regime_keys,
    alpha: float = 1.0,
    parents: tuple[str, ...] | None = None,
) -> Cpt:
    """Estimate one variable's table from the named regimes' counts.

    Regimes whose interventions pin the variable itself are skipped even if
    named: data where a mechanism was overridden says nothing about that
    mechanism. Every parent-value row is materialized; unseen rows fall
    back to the prior mean. The parent set defaults to the tree's variable
    declaration and can be overridden, so one counted joint can serve
    several candidate structures.
    """
    index = {v.name: i for i, v in enumerate(tree.variables)}
    if name not in index:
        raise KeyError(f"unknown variable {name!r}")
    var = tree.variables[index[name]]
    if parents is not None:
        var = VariableDef.of(var.name, var.domain, parents, var.kind, **dict(var.params))
    parent_defs = [tree.variables[index[p]] for p in var.parents]
    parent_cols = [index[p] for p in var.parents]
    col = index[name]

    buckets = [
        bucket
        for key in regime_keys
        if (bucket := tree.regimes.get(key)) is not None
        and name not in {k for k, _ in bucket.sets}
    ]

    rows = []
    for combo in product(*(p.domain for p in parent_defs)) if parent_defs else [()]:
        tallies = {value: 0 for value in var.domain}
        for bucket in buckets:
            for assignment, count in bucket.counts.items():
                if all(assignment[c] == combo[i] for i, c in enumerate(parent_cols)):
                    tallies[assignment[col]] += count
        total = sum(tallies.values())
        denom = total + alpha * len(var.domain)
        rows.append((combo, tuple((tallies[v] + alpha) / denom for v in var.domain)))
    return Cpt(name, var.domain, var.parents, tuple(rows))


def estimate_all(
    tree: RolloutTree,
    bindings: dict[str, tuple[str, ...]],
    alpha: float = 1.0,
) -> dict[str, Cpt]:
    """One table per variable, each from its own declared regime list."""
    return {
        var.name: estimate_cpt(tree, var.name, bindings[var.name], alpha)
        for var in tree.variables
    }
