"""Packaged studies: collection plan, model recipe, and query list in one
document.

An experiment names an environment, a rollout budget, the variables to read
off each trace, and one table column per analysis subject. A column says
which (regime, agent) pairs to collect and how to assemble the resulting
counts into a model or a model family; the shared row list then asks every
column the same questions. Running an experiment yields a QueryTable whose
metadata pins the rollout count, the master seed, and a hash of the full
configuration, so two runs disagree only if something real changed.

Specs are plain data and serialize to JSON, which is how they travel over
the wire and how the configuration hash is computed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from itertools import product

from causalprobe.agents import AgentSpec
from causalprobe.engine import (
    ModelFamily,
    ModelStructureError,
    Query,
    ScmModel,
    answer,
    answer_family,
)
from causalprobe.estimation import (
    OBSERVATIONAL,
    Cpt,
    Regime,
    RolloutTree,
    VariableDef,
    collect,
    estimate_cpt,
)
from causalprobe.gridworld import EnvSpec
from causalprobe.seeds import Seed
from causalprobe.simulator import InterventionSpec
from causalprobe.tables import QueryTable, TableRow


class UnknownExperimentError(Exception):
    def __init__(self, name: str):
        super().__init__(f"unknown experiment {name!r}")


@dataclass(frozen=True)
class ModelRecipe:
    """How one column's counts become a model: the posited parent structure,
    which variables get estimated tables, and hand-written tables for the
    rest (latent variables the traces never show, or mechanisms the analyst
    supplies as background knowledge)."""

    structure: tuple[tuple[str, tuple[str, ...]], ...]
    estimated: tuple[str, ...] = ()
    fixed: tuple[Cpt, ...] = ()

    @classmethod
    def of(cls, structure, estimated=(), fixed=()) -> "ModelRecipe":
        structure = tuple((name, tuple(parents)) for name, parents in structure)
        estimated = tuple(estimated)
        fixed = tuple(fixed)
        names = [name for name, _ in structure]
        if len(set(names)) != len(names):
            raise ModelStructureError("recipe structure repeats a variable")
        covered = set(estimated) | {c.name for c in fixed}
        missing = [name for name in names if name not in covered]
        if missing:
            raise ModelStructureError(f"recipe gives no table source for {missing}")
        extra = covered - set(names)
        if extra:
            raise ModelStructureError(f"recipe binds tables for undeclared {sorted(extra)}")
        parents = dict(structure)
        for cpt in fixed:
            if cpt.parents != parents[cpt.name]:
                raise ModelStructureError(
                    f"fixed table for {cpt.name} disagrees with the structure"
                )
        return cls(structure, estimated, fixed)

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.structure)

    def to_json(self) -> dict:
        return {
            "kind": "model",
            "structure": [{"name": n, "parents": list(p)} for n, p in self.structure],
            "estimated": list(self.estimated),
            "fixed": [c.to_json() for c in self.fixed],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelRecipe":
        return cls.of(
            [(s["name"], s["parents"]) for s in data["structure"]],
            data.get("estimated", ()),
            [Cpt.from_json(c) for c in data.get("fixed", ())],
        )


@dataclass(frozen=True)
class FamilyRecipe:
    """Several candidate recipes under one label, each with a prior. The
    column's counts feed every member, so the candidates disagree only
    about structure, and queries against the column report the posterior
    over members."""

    label: str
    members: tuple[tuple[str, float, ModelRecipe], ...]

    @classmethod
    def of(cls, label: str, members) -> "FamilyRecipe":
        members = tuple((name, float(prior), recipe) for name, prior, recipe in members)
        if not members:
            raise ModelStructureError("a family recipe needs at least one member")
        return cls(label, members)

    def to_json(self) -> dict:
        return {
            "kind": "family",
            "label": self.label,
            "members": [
                {"name": n, "prior": p, "recipe": r.to_json()} for n, p, r in self.members
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FamilyRecipe":
        return cls.of(
            data["label"],
            [(m["name"], m["prior"], ModelRecipe.from_json(m["recipe"])) for m in data["members"]],
        )


def recipe_from_json(data: dict) -> "ModelRecipe | FamilyRecipe":
    kind = data.get("kind")
    if kind == "model":
        return ModelRecipe.from_json(data)
    if kind == "family":
        return FamilyRecipe.from_json(data)
    raise ModelStructureError(f"unknown recipe kind {kind!r}")


@dataclass(frozen=True)
class ColumnSpec:
    """One table column: the subject under study. jobs lists the (regime,
    agent) pairs whose rollouts feed the column; most columns pair every
    regime with a single agent, but a column may pool several agents into
    one population."""

    label: str
    jobs: tuple[tuple[Regime, AgentSpec], ...]
    recipe: ModelRecipe | FamilyRecipe

    @classmethod
    def of(cls, label, jobs, recipe) -> "ColumnSpec":
        jobs = tuple((regime, agent) for regime, agent in jobs)
        if not jobs:
            raise ValueError(f"column {label!r} collects nothing")
        return cls(label, jobs, recipe)

    def regime_keys(self) -> tuple[str, ...]:
        keys: list[str] = []
        for regime, _ in self.jobs:
            if regime.key not in keys:
                keys.append(regime.key)
        return tuple(keys)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "jobs": [
                {"regime": regime.to_json(), "agent": agent.to_json()}
                for regime, agent in self.jobs
            ],
            "recipe": self.recipe.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ColumnSpec":
        return cls.of(
            data["label"],
            [
                (Regime.from_json(j["regime"]), AgentSpec.from_json(j["agent"]))
                for j in data["jobs"]
            ],
            recipe_from_json(data["recipe"]),
        )


@dataclass(frozen=True)
class RowSpec:
    """One table row: either a query, or the difference of two earlier
    query rows (minuend label minus subtrahend label)."""

    label: str
    query: Query | None = None
    difference: tuple[str, str] | None = None

    @classmethod
    def of(cls, label, query=None, difference=None) -> "RowSpec":
        if (query is None) == (difference is None):
            raise ValueError(f"row {label!r} needs a query or a difference, not both")
        if difference is not None:
            difference = (str(difference[0]), str(difference[1]))
        return cls(label, query, difference)

    def to_json(self) -> dict:
        payload: dict = {"label": self.label}
        if self.query is not None:
            payload["query"] = self.query.to_json()
        else:
            payload["difference"] = list(self.difference)
        return payload

    @classmethod
    def from_json(cls, data: dict) -> "RowSpec":
        query = Query.from_json(data["query"]) if "query" in data else None
        difference = tuple(data["difference"]) if "difference" in data else None
        return cls.of(data["label"], query, difference)


@dataclass(frozen=True)
class ExperimentSpec:
    """The complete plan for one study."""

    name: str
    env: EnvSpec
    rollouts: int
    variables: tuple[VariableDef, ...]
    columns: tuple[ColumnSpec, ...]
    rows: tuple[RowSpec, ...]

    @classmethod
    def of(cls, name, env, variables, columns, rows, rollouts=1000) -> "ExperimentSpec":
        variables = tuple(variables)
        columns = tuple(columns)
        rows = tuple(rows)
        labels = [row.label for row in rows]
        if len(set(labels)) != len(labels):
            raise ValueError(f"experiment {name!r} repeats a row label")
        seen: set[str] = set()
        for row in rows:
            if row.difference is not None:
                for ref in row.difference:
                    if ref not in seen:
                        raise ValueError(
                            f"row {row.label!r} differences {ref!r} before it exists"
                        )
            seen.add(row.label)
        known = {v.name for v in variables}
        for column in columns:
            recipes = (
                [r for _, _, r in column.recipe.members]
                if isinstance(column.recipe, FamilyRecipe)
                else [column.recipe]
            )
            for recipe in recipes:
                for est in recipe.estimated:
                    if est not in known:
                        raise ValueError(
                            f"column {column.label!r} estimates {est!r}, "
                            "which no trace variable provides"
                        )
        return cls(name, env, int(rollouts), variables, columns, rows)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "env": self.env.to_json(),
            "rollouts": self.rollouts,
            "variables": [v.to_json() for v in self.variables],
            "columns": [c.to_json() for c in self.columns],
            "rows": [r.to_json() for r in self.rows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentSpec":
        return cls.of(
            data["name"],
            EnvSpec.from_json(data["env"]),
            [VariableDef.from_json(v) for v in data["variables"]],
            [ColumnSpec.from_json(c) for c in data["columns"]],
            [RowSpec.from_json(r) for r in data["rows"]],
            data.get("rollouts", 1000),
        )

    def config_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def assemble_model(
    tree: RolloutTree,
    recipe: ModelRecipe,
    regime_keys: tuple[str, ...],
    alpha: float = 1.0,
) -> ScmModel:
    """Build one model from a column's counts. Estimated variables read the
    named regimes (estimation itself skips any regime that pinned the
    variable); fixed tables pass through; variables absent from the tree
    (latents) take their declaration from the fixed table."""
    by_var = {v.name: v for v in tree.variables}
    fixed = {c.name: c for c in recipe.fixed}
    variables = []
    cpts: dict[str, Cpt] = {}
    for name, parents in recipe.structure:
        base = by_var.get(name)
        if name in fixed:
            cpt = fixed[name]
        elif base is not None:
            cpt = estimate_cpt(tree, name, regime_keys, alpha, parents=parents)
        else:
            raise ModelStructureError(f"nothing provides a table for {name}")
        domain = base.domain if base is not None else cpt.domain
        kind = base.kind if base is not None else ""
        params = dict(base.params) if base is not None else {}
        variables.append(VariableDef.of(name, domain, parents, kind, **params))
        cpts[name] = cpt
    return ScmModel.of(variables, cpts)


def assemble(
    tree: RolloutTree,
    recipe: ModelRecipe | FamilyRecipe,
    regime_keys: tuple[str, ...],
    alpha: float = 1.0,
) -> ScmModel | ModelFamily:
    if isinstance(recipe, FamilyRecipe):
        return ModelFamily.of(
            recipe.label,
            [
                (name, prior, assemble_model(tree, member, regime_keys, alpha))
                for name, prior, member in recipe.members
            ],
        )
    return assemble_model(tree, recipe, regime_keys, alpha)


def run_experiment(
    spec: ExperimentSpec,
    seed: Seed,
    rollouts: int | None = None,
    alpha: float = 1.0,
) -> QueryTable:
    """Collect every column's rollouts, assemble its model, and answer the
    row list. rollouts overrides the spec's budget (zero is legal and
    yields tables of prior means)."""
    n = spec.rollouts if rollouts is None else int(rollouts)
    resources = []
    for ci, column in enumerate(spec.columns):
        tree = RolloutTree(spec.variables)
        for ji, (regime, agent) in enumerate(column.jobs):
            collect(tree, spec.env, agent, regime, n, seed.child(ci, ji))
        resources.append(assemble(tree, column.recipe, column.regime_keys(), alpha))
    rows = []
    answered: list[dict[str, float]] = [{} for _ in resources]
    for row in spec.rows:
        values = []
        for ci, resource in enumerate(resources):
            if row.query is not None:
                if isinstance(resource, ModelFamily):
                    value = answer_family(resource, row.query).probability
                else:
                    value = answer(resource, row.query).probability
            else:
                minuend, subtrahend = row.difference
                value = answered[ci][minuend] - answered[ci][subtrahend]
            answered[ci][row.label] = value
            values.append(value)
        rows.append(TableRow(row.label, tuple(values), row.query))
    meta = {
        "n": str(n),
        "seed": str(seed.value),
        "config": spec.config_hash(),
    }
    return QueryTable.of(spec.name, [c.label for c in spec.columns], rows, meta)


# ---------------------------------------------------------------------------
# the stock studies


def _point_rows(domain, parent_domains, pick):
    """Deterministic table rows: pick maps each parent combination to the
    value that gets all the mass."""
    combos = list(product(*parent_domains)) if parent_domains else [()]
    rows = []
    for combo in combos:
        probs = tuple(1.0 if v == pick(combo) else 0.0 for v in domain)
        rows.append((combo, probs))
    return tuple(rows)


def _uniform_root(name, domain) -> Cpt:
    share = 1.0 / len(domain)
    return Cpt(name, tuple(domain), (), (((), tuple(share for _ in domain)),))


def _edit_regime(key, t, path, value, sets) -> Regime:
    return Regime.of(key, [InterventionSpec.of("world-edit", t, (path,), value)], sets=sets)


def _q(level, target, evidence=(), do=(), path=()) -> RowSpec:
    """Row whose label spells the query in standard notation."""
    parts = [",".join(f"{k}={v}" for k, v in sorted(dict(target).items()))]
    given = []
    if do:
        given.append("do(" + ",".join(f"{k}={v}" for k, v in sorted(dict(do).items())) + ")")
    if evidence:
        given.append(",".join(f"{k}={v}" for k, v in sorted(dict(evidence).items())))
    label = "P(" + parts[0] + (" | " + ", ".join(given) if given else "") + ")"
    if path:
        (do_key, do_value), = dict(do).items()
        label = f"f({do_key}={do_value})"
    return RowSpec.of(label, Query.of(level, target, evidence, do, path))


def grass_sand() -> ExperimentSpec:
    """Two runners, same habit of ending on the pill's side. Runner A reads
    the floor and only correlates with the pill; runner B chases the pill
    and only correlates with the floor. Interventions that cut the common
    cause tell them apart where observation cannot."""
    variables = (
        VariableDef.of("F", ("grass", "sand"), kind="tile-kind", row=5, col=4, t=1),
        VariableDef.of("R", ("left", "right"), kind="pill-side", col=4, t=1),
        VariableDef.of("T", ("left", "right"), kind="entity-side", col=4, t="end"),
    )
    regimes = (
        OBSERVATIONAL,
        _edit_regime("do-pill-left", 1, "pill-side", "left", {"R": "left"}),
        _edit_regime("do-pill-right", 1, "pill-side", "right", {"R": "right"}),
        _edit_regime("do-floor-grass", 1, "floor-kind", "grass", {"F": "grass"}),
        _edit_regime("do-floor-sand", 1, "floor-kind", "sand", {"F": "sand"}),
    )
    recipe = ModelRecipe.of(
        (("C", ()), ("F", ("C",)), ("R", ("C",)), ("T", ("F", "R"))),
        estimated=("T",),
        fixed=(
            _uniform_root("C", ("grass", "sand")),
            Cpt(
                "F",
                ("grass", "sand"),
                ("C",),
                _point_rows(("grass", "sand"), (("grass", "sand"),), lambda c: c[0]),
            ),
            Cpt(
                "R",
                ("left", "right"),
                ("C",),
                _point_rows(
                    ("left", "right"),
                    (("grass", "sand"),),
                    lambda c: "left" if c[0] == "grass" else "right",
                ),
            ),
        ),
    )
    columns = tuple(
        ColumnSpec.of(label, [(r, AgentSpec.of(agent)) for r in regimes], recipe)
        for label, agent in (("A", "grass-sand/A"), ("B", "grass-sand/B"))
    )
    rows = (
        _q("associational", {"T": "left"}, evidence={"R": "left"}),
        _q("associational", {"T": "right"}, evidence={"R": "right"}),
        _q("interventional", {"T": "left"}, do={"R": "left"}),
        _q("interventional", {"T": "right"}, do={"R": "right"}),
        _q("interventional", {"T": "left"}, do={"F": "grass"}),
        _q("interventional", {"T": "right"}, do={"F": "sand"}),
    )
    return ExperimentSpec.of("grass-sand", EnvSpec.of("grass-sand"), variables, columns, rows)


def floor_memory() -> ExperimentSpec:
    """Two maze runners that both end on the correct side. Pushing the
    agent across the midline partway through shows which one carries the
    cue in memory and which one re-reads the walls."""
    variables = (
        VariableDef.of("F", ("grass", "sand"), kind="tile-kind", row=7, col=4, t=1),
        VariableDef.of("P", ("left", "right"), kind="entity-side", col=4, t=4),
        VariableDef.of("T", ("left", "right"), kind="entity-side", col=4, t="end"),
    )
    regimes = (
        OBSERVATIONAL,
        _edit_regime("do-push-left", 4, "agent-side", "left", {"P": "left"}),
        _edit_regime("do-push-right", 4, "agent-side", "right", {"P": "right"}),
    )
    recipe = ModelRecipe.of(
        (("F", ()), ("P", ("F",)), ("T", ("F", "P"))),
        estimated=("F", "P", "T"),
    )
    columns = tuple(
        ColumnSpec.of(label, [(r, AgentSpec.of(agent)) for r in regimes], recipe)
        for label, agent in (("a", "floor-memory/a"), ("b", "floor-memory/b"))
    )
    rows = (
        _q("associational", {"T": "left"}, evidence={"F": "grass"}),
        _q("associational", {"T": "right"}, evidence={"F": "sand"}),
        _q("associational", {"P": "left"}, evidence={"F": "grass"}),
        _q("associational", {"P": "right"}, evidence={"F": "sand"}),
        _q("interventional", {"T": "left"}, evidence={"F": "grass"}, do={"P": "right"}),
        _q("interventional", {"T": "right"}, evidence={"F": "sand"}, do={"P": "left"}),
    )
    return ExperimentSpec.of(
        "floor-memory", EnvSpec.of("floor-memory"), variables, columns, rows
    )


def pick_up() -> ExperimentSpec:
    """Two collectors. A fetches the pill wherever it spawns; B has a
    preferred corner. Moving the pill by regime shows whose success
    actually depends on where it is."""
    variables = (
        VariableDef.of("G", ("n", "e", "w", "s"), kind="quadrant", t=1),
        VariableDef.of("R", ("0", "1"), kind="reward"),
    )
    regimes = [OBSERVATIONAL]
    for q in ("n", "e", "w", "s"):
        regimes.append(
            Regime.of(f"do-goal-{q}", env_params={"reward-quadrant": q}, sets={"G": q})
        )
    recipe = ModelRecipe.of((("G", ()), ("R", ("G",))), estimated=("G", "R"))
    columns = tuple(
        ColumnSpec.of(label, [(r, AgentSpec.of(agent)) for r in regimes], recipe)
        for label, agent in (("A", "pick-up/A"), ("B", "pick-up/B"))
    )
    rows = (
        _q("associational", {"R": "1"}),
        _q("interventional", {"R": "1"}, do={"G": "n"}),
        _q("interventional", {"R": "1"}, do={"G": "e"}),
        _q("interventional", {"R": "1"}, do={"G": "w"}),
        _q("interventional", {"R": "1"}, do={"G": "s"}),
    )
    return ExperimentSpec.of(
        "pick-up",
        EnvSpec.of("pick-up", **{"reward-quadrant": "any"}),
        variables,
        columns,
        rows,
    )


def gated_room() -> ExperimentSpec:
    """A population of two pill tastes behind a random gate. The gate
    decides which pill is reachable, the taste decides which pill the agent
    wants, and the counterfactual asks what a picky agent would have eaten
    had the other gate been open."""
    variables = (
        VariableDef.of(
            "A",
            ("red", "green"),
            kind="agent-label",
            **{"gated-room/red-lover": "red", "gated-room/green-lover": "green"},
        ),
        VariableDef.of("D", ("left", "right"), kind="gate-side", left="2:4", right="2:6", t=1),
        VariableDef.of("R", ("red", "green"), kind="pill-color"),
    )
    recipe = ModelRecipe.of(
        (("A", ()), ("D", ()), ("R", ("A", "D"))),
        estimated=("D", "R"),
        fixed=(_uniform_root("A", ("red", "green")),),
    )
    column = ColumnSpec.of(
        "population",
        [
            (Regime.of("observational-red"), AgentSpec.of("gated-room/red-lover")),
            (Regime.of("observational-green"), AgentSpec.of("gated-room/green-lover")),
        ],
        recipe,
    )
    rows = (
        _q("associational", {"R": "red"}),
        _q("associational", {"A": "red"}, evidence={"R": "red"}),
        _q("associational", {"A": "red"}, evidence={"D": "left", "R": "red"}),
        RowSpec.of(
            "P(R[D=right]=red | D=left, R=red)",
            Query.of(
                "counterfactual",
                {"R": "red"},
                evidence={"D": "left", "R": "red"},
                do={"D": "right"},
            ),
        ),
        RowSpec.of(
            "P(R[D=right]=green | D=left, R=green)",
            Query.of(
                "counterfactual",
                {"R": "green"},
                evidence={"D": "left", "R": "green"},
                do={"D": "right"},
            ),
        ),
    )
    return ExperimentSpec.of(
        "gated-room", EnvSpec.of("gated-room"), variables, (column,), rows
    )


def mimic() -> ExperimentSpec:
    """Two movers that nearly always match. Either could be the leader;
    observation cannot split the two stories, but forcing one mover's step
    shifts the posterior to whoever still predicts the other."""
    variables = (
        VariableDef.of("B", ("left", "right"), kind="move", entity="blue", t=1),
        VariableDef.of("R", ("left", "right"), kind="move", entity="red", t=1),
    )
    blue_leads = ModelRecipe.of(
        (("B", ()), ("R", ("B",))), estimated=("B", "R")
    )
    red_leads = ModelRecipe.of(
        (("R", ()), ("B", ("R",))), estimated=("B", "R")
    )
    column = ColumnSpec.of(
        "imitator",
        [(OBSERVATIONAL, AgentSpec.of("mimic/imitator"))],
        FamilyRecipe.of("L", [("blue", 0.5, blue_leads), ("red", 0.5, red_leads)]),
    )
    rows = (
        _q("hypothesis-posterior", {"L": "blue"}),
        _q("hypothesis-posterior", {"L": "blue"}, evidence={"R": "left", "B": "left"}),
        _q("hypothesis-posterior", {"L": "blue"}, evidence={"R": "left", "B": "right"}),
        _q("hypothesis-posterior", {"L": "blue"}, evidence={"B": "left"}, do={"R": "left"}),
        _q("hypothesis-posterior", {"L": "blue"}, evidence={"B": "right"}, do={"R": "left"}),
    )
    return ExperimentSpec.of(
        "mimic",
        EnvSpec.of("mimic", **{"subject-role": "imitator"}),
        variables,
        (column,),
        rows,
    )


def key_door() -> ExperimentSpec:
    """Two reward seekers in a room where a door hides the prize and a key
    sits off the path. A grabs the key when the side trip is short, so the
    key reads as a whim; B always grabs it, so the key reads as policy.
    The path rows isolate how much of the door's effect on success flows
    through holding the key."""
    variables = (
        VariableDef.of("D", ("open", "closed"), kind="door", row=3, col=6, t=1),
        VariableDef.of("K", ("yes", "no"), kind="has-item", item="key"),
        VariableDef.of("R", ("0", "1"), kind="reward"),
    )
    regimes = (
        OBSERVATIONAL,
        _edit_regime("do-key-yes", 1, "key-held", "yes", {"K": "yes"}),
        _edit_regime("do-key-no", 1, "key-held", "no", {"K": "no"}),
        _edit_regime("do-door-open", 1, "door-state", "open", {"D": "open"}),
        _edit_regime("do-door-closed", 1, "door-state", "closed", {"D": "closed"}),
    )
    recipe = ModelRecipe.of(
        (("D", ()), ("K", ("D",)), ("R", ("K", "D"))),
        estimated=("D", "K", "R"),
    )
    columns = tuple(
        ColumnSpec.of(label, [(r, AgentSpec.of(agent)) for r in regimes], recipe)
        for label, agent in (("A", "key-door/A"), ("B", "key-door/B"))
    )
    rows = (
        _q("associational", {"R": "1"}),
        _q("associational", {"R": "1"}, evidence={"K": "yes"}),
        _q("associational", {"R": "1"}, evidence={"K": "no"}),
        _q("interventional", {"R": "1"}, do={"K": "yes"}),
        _q("interventional", {"R": "1"}, do={"K": "no"}),
        _q("interventional", {"K": "yes"}, do={"D": "closed"}),
        _q("interventional", {"K": "yes"}, do={"D": "open"}),
        _q("associational", {"R": "1"}, evidence={"D": "closed"}),
        _q("associational", {"R": "1"}, evidence={"D": "open"}),
        _q("path-response", {"R": "1"}, do={"D": "closed"}, path=("K",)),
        _q("path-response", {"R": "1"}, do={"D": "open"}, path=("K",)),
        RowSpec.of("f(D=closed) - f(D=open)", difference=("f(D=closed)", "f(D=open)")),
    )
    return ExperimentSpec.of("key-door", EnvSpec.of("key-door"), variables, columns, rows)


EXPERIMENTS = {
    "grass-sand": grass_sand,
    "floor-memory": floor_memory,
    "pick-up": pick_up,
    "gated-room": gated_room,
    "mimic": mimic,
    "key-door": key_door,
}


def experiment_names() -> tuple[str, ...]:
    return tuple(EXPERIMENTS)


def experiment(name: str) -> ExperimentSpec:
    try:
        return EXPERIMENTS[name]()
    except KeyError:
        raise UnknownExperimentError(name) from None


def run_named(name: str, seed: int, rollouts: int | None = None, alpha: float = 1.0) -> QueryTable:
    """Run a registered study, keying its seed stream off one master value
    by the study's registry position so every study gets its own stream."""
    spec = experiment(name)
    index = experiment_names().index(name)
    return run_experiment(spec, Seed(seed).child(index), rollouts, alpha)
