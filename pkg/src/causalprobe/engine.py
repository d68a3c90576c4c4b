"""Exact query answering over estimated discrete models.

A model is a DAG of discrete variables with one table per variable. The
noise convention behind every query level: each variable owns one uniform
draw per parent-value row, thresholded through the row's cumulative
probabilities in domain order. Association and intervention never need the
noise explicitly; counterfactuals do, and the convention induces the twin
coupling implemented here, where a mechanism fed the same parent values in
both worlds repeats its factual outcome and one fed different rows draws
fresh.

Four query levels work on a single model: association (conditioning),
intervention (table surgery then conditioning), counterfactual (coupled
twin worlds), and path response (a nested composition of interventions).
Hypothesis scoring weighs a family of candidate models by the likelihood
they give the observed evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

from causalprobe.estimation import Cpt, VariableDef


class ModelStructureError(Exception):
    """Raised when variables, parents, and tables do not line up."""


class ZeroEvidenceError(Exception):
    """Raised when conditioning on an event the model gives no mass."""


class InvalidQueryError(Exception):
    """Raised for query payloads that name the wrong fields for their level."""


@dataclass(frozen=True)
class ScmModel:
    """Discrete model in topological order, one table per variable."""

    variables: tuple[VariableDef, ...]
    cpts: tuple[Cpt, ...]

    @classmethod
    def of(cls, variables, cpts: Mapping[str, Cpt]) -> "ScmModel":
        variables = tuple(variables)
        names = {v.name for v in variables}
        for var in variables:
            missing = set(var.parents) - names
            if missing:
                raise ModelStructureError(f"{var.name} has unknown parents {sorted(missing)}")
        ordered: list[VariableDef] = []
        pending = list(variables)
        while pending:
            for i, var in enumerate(pending):
                if all(p in {v.name for v in ordered} for p in var.parents):
                    ordered.append(pending.pop(i))
                    break
            else:
                raise ModelStructureError("parent graph has a cycle")
        aligned = []
        for var in ordered:
            cpt = cpts.get(var.name)
            if cpt is None:
                raise ModelStructureError(f"no table for {var.name}")
            if cpt.domain != var.domain or cpt.parents != var.parents:
                raise ModelStructureError(f"table for {var.name} disagrees with its declaration")
            combos = set(product(*(_domain_of(variables, p) for p in var.parents))) if var.parents else {()}
            have = {key for key, _ in cpt.rows}
            if combos != have:
                raise ModelStructureError(f"table for {var.name} is missing rows")
            for _, probs in cpt.rows:
                if abs(sum(probs) - 1.0) > 1e-9:
                    raise ModelStructureError(f"a row of {var.name} does not normalize")
            aligned.append(cpt)
        return cls(tuple(ordered), tuple(aligned))

    def var(self, name: str) -> VariableDef:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(f"unknown variable {name!r}")

    def cpt(self, name: str) -> Cpt:
        for v, c in zip(self.variables, self.cpts):
            if v.name == name:
                return c
        raise KeyError(f"unknown variable {name!r}")

    def mutilate(self, do: Mapping[str, str]) -> "ScmModel":
        """Replace each intervened variable by a parentless point mass."""
        variables = []
        cpts = {}
        for var, cpt in zip(self.variables, self.cpts):
            if var.name in do:
                value = do[var.name]
                if value not in var.domain:
                    raise InvalidQueryError(f"{value!r} is not in the domain of {var.name}")
                var = VariableDef.of(var.name, var.domain, (), var.kind, **dict(var.params))
                cpt = Cpt(
                    var.name,
                    var.domain,
                    (),
                    (((), tuple(1.0 if v == value else 0.0 for v in var.domain)),),
                )
            variables.append(var)
            cpts[var.name] = cpt
        return ScmModel.of(variables, cpts)

    def assignments(self):
        """All full assignments with their probabilities, topologically."""
        names = [v.name for v in self.variables]
        for values in product(*(v.domain for v in self.variables)):
            assignment = dict(zip(names, values))
            prob = 1.0
            for var, cpt in zip(self.variables, self.cpts):
                row = tuple(assignment[p] for p in var.parents)
                prob *= cpt.p(assignment[var.name], row)
                if prob == 0.0:
                    break
            yield assignment, prob

    def to_json(self) -> dict:
        return {
            "variables": [v.to_json() for v in self.variables],
            "tables": {c.name: c.to_json() for c in self.cpts},
        }

    @classmethod
    def from_json(cls, data: dict) -> "ScmModel":
        variables = [VariableDef.from_json(v) for v in data["variables"]]
        cpts = {name: Cpt.from_json(raw) for name, raw in data["tables"].items()}
        return cls.of(variables, cpts)


def _domain_of(variables, name):
    for v in variables:
        if v.name == name:
            return v.domain
    raise ModelStructureError(f"unknown parent {name!r}")


def _check_names(model: ScmModel, mapping: Mapping[str, str], label: str) -> None:
    for name, value in mapping.items():
        var = model.var(name)
        if value not in var.domain:
            raise InvalidQueryError(f"{label} value {value!r} not in the domain of {name}")


# ---------------------------------------------------------------------------
# the four query levels


def query_assoc(model: ScmModel, target: str, evidence: Mapping[str, str] | None = None) -> dict[str, float]:
    """P(target | evidence) by exact enumeration of the joint."""
    evidence = dict(evidence or {})
    _check_names(model, evidence, "evidence")
    domain = model.var(target).domain
    mass = {value: 0.0 for value in domain}
    total = 0.0
    for assignment, prob in model.assignments():
        if all(assignment[k] == v for k, v in evidence.items()):
            mass[assignment[target]] += prob
            total += prob
    if total == 0.0:
        raise ZeroEvidenceError(f"evidence {evidence} has zero probability")
    return {value: m / total for value, m in mass.items()}


def query_do(
    model: ScmModel,
    target: str,
    do: Mapping[str, str],
    evidence: Mapping[str, str] | None = None,
) -> dict[str, float]:
    """P(target | do(...), evidence) in the surgically altered model. An
    empty do() is the identity surgery, so the query collapses to the plain
    conditional."""
    _check_names(model, dict(do), "do")
    return query_assoc(model.mutilate(do) if do else model, target, evidence)


def _twin_pairs(model: ScmModel, evidence: Mapping[str, str], do: Mapping[str, str]):
    """Yield ((factual, twin), weight) over coupled twin worlds.

    Weight of a pair: per variable, the factual draw uses its factual row;
    an intervened twin variable is clamped; otherwise a twin fed the same
    parent row repeats the factual value and one fed a different row draws
    independently from that row.
    """
    names = [v.name for v in model.variables]
    domains = [v.domain for v in model.variables]
    for fact_values in product(*domains):
        fact = dict(zip(names, fact_values))
        if not all(fact[k] == v for k, v in evidence.items()):
            continue
        fact_prob = 1.0
        fact_rows = {}
        for var, cpt in zip(model.variables, model.cpts):
            row = tuple(fact[p] for p in var.parents)
            fact_rows[var.name] = row
            fact_prob *= cpt.p(fact[var.name], row)
            if fact_prob == 0.0:
                break
        if fact_prob == 0.0:
            continue
        for twin_values in product(*domains):
            twin = dict(zip(names, twin_values))
            weight = fact_prob
            for var, cpt in zip(model.variables, model.cpts):
                name = var.name
                if name in do:
                    if twin[name] != do[name]:
                        weight = 0.0
                        break
                    continue
                twin_row = tuple(twin[p] for p in var.parents)
                if twin_row == fact_rows[name]:
                    if twin[name] != fact[name]:
                        weight = 0.0
                        break
                else:
                    weight *= cpt.p(twin[name], twin_row)
                    if weight == 0.0:
                        break
            if weight > 0.0:
                yield (fact, twin), weight


def query_counterfactual(
    model: ScmModel,
    target: str,
    evidence: Mapping[str, str],
    do: Mapping[str, str],
) -> dict[str, float]:
    """P(target had do(...) held | evidence), by coupled twin enumeration."""
    evidence = dict(evidence or {})
    do = dict(do)
    if not do:
        raise InvalidQueryError("a counterfactual query needs at least one do() assignment")
    _check_names(model, evidence, "evidence")
    _check_names(model, do, "do")
    mass = {value: 0.0 for value in model.var(target).domain}
    total = 0.0
    for (_, twin), weight in _twin_pairs(model, evidence, do):
        mass[twin[target]] += weight
        total += weight
    if total == 0.0:
        raise ZeroEvidenceError(f"evidence {evidence} has zero probability")
    return {value: m / total for value, m in mass.items()}


def query_path(model: ScmModel, target: str, chain, do: Mapping[str, str]) -> dict[str, float]:
    """Nested response of target to do(...) routed through a mediator chain:
    the setting moves the first mediator, each mediator value is imposed on
    the next in isolation, and the last is imposed on the target. An empty
    chain degenerates to a plain intervention."""
    chain = (chain,) if isinstance(chain, str) else tuple(chain)
    if not do:
        raise InvalidQueryError("a path query needs at least one do() assignment")
    if len(set(chain)) != len(chain):
        raise InvalidQueryError("mediator chain repeats a variable")
    for via in chain:
        if via in do:
            raise InvalidQueryError(f"mediator {via} cannot also be intervened")
    if not chain:
        return query_do(model, target, do)
    via, rest = chain[0], chain[1:]
    outer = query_do(model, via, do)
    result = {value: 0.0 for value in model.var(target).domain}
    for m, weight in outer.items():
        if weight == 0.0:
            continue
        inner = query_path(model, target, rest, {via: m})
        for value in result:
            result[value] += inner[value] * weight
    return result


def hypothesis_posterior(
    space: Mapping[str, tuple[float, ScmModel]],
    evidence: Mapping[str, str],
    do: Mapping[str, str] | None = None,
) -> dict[str, float]:
    """Posterior over candidate models: prior times the likelihood each
    model gives the evidence, optionally after the same surgery in all of
    them."""
    evidence = dict(evidence)
    weights = {}
    for name, (prior, model) in space.items():
        working = model.mutilate(do) if do else model
        likelihood = 0.0
        for assignment, prob in working.assignments():
            if all(assignment[k] == v for k, v in evidence.items()):
                likelihood += prob
        weights[name] = prior * likelihood
    total = sum(weights.values())
    if total == 0.0:
        raise ZeroEvidenceError("evidence has zero probability under every hypothesis")
    return {name: w / total for name, w in weights.items()}


# ---------------------------------------------------------------------------
# query and result payloads


QUERY_LEVELS = (
    "associational",
    "interventional",
    "counterfactual",
    "path-response",
    "hypothesis-posterior",
)


@dataclass(frozen=True)
class Query:
    """One question in portable form: the level, the target assignment whose
    probability is wanted, optional evidence and do assignments, and for
    path-response queries the ordered mediator chain."""

    level: str
    target: tuple[tuple[str, str], ...]
    evidence: tuple[tuple[str, str], ...] = ()
    do: tuple[tuple[str, str], ...] = ()
    path: tuple[str, ...] = ()

    @classmethod
    def of(cls, level, target, evidence=(), do=(), path=()) -> "Query":
        if level not in QUERY_LEVELS:
            raise InvalidQueryError(f"unknown query level {level!r}")
        target = tuple(sorted(dict(target).items()))
        if not target:
            raise InvalidQueryError("a query needs a target assignment")
        if isinstance(path, str):
            path = (path,)
        return cls(
            level,
            target,
            tuple(sorted(dict(evidence).items())),
            tuple(sorted(dict(do).items())),
            tuple(path),
        )

    def to_json(self) -> dict:
        payload = {
            "level": self.level,
            "target": dict(self.target),
            "evidence": dict(self.evidence),
            "do": dict(self.do),
        }
        if self.path:
            payload["path"] = list(self.path)
        return payload

    @classmethod
    def from_json(cls, data: dict) -> "Query":
        return cls.of(
            data["level"],
            data["target"],
            data.get("evidence", {}),
            data.get("do", {}),
            data.get("path", ()),
        )


@dataclass(frozen=True)
class QueryResult:
    """The probability of the query's target assignment, with the full
    distribution over the target variable's domain when the target names a
    single variable (hypothesis queries report the posterior over members)."""

    query: Query
    probability: float
    distribution: tuple[tuple[str, float], ...] = ()

    def p(self, value: str) -> float:
        for v, prob in self.distribution:
            if v == value:
                return prob
        raise KeyError(f"{value!r} not in the result distribution")

    def to_json(self) -> dict:
        payload = {"query": self.query.to_json(), "probability": self.probability}
        if self.distribution:
            payload["distribution"] = dict(self.distribution)
        return payload

    @classmethod
    def from_json(cls, data: dict) -> "QueryResult":
        return cls(
            Query.from_json(data["query"]),
            float(data["probability"]),
            tuple((k, float(v)) for k, v in data.get("distribution", {}).items()),
        )


def answer(model: ScmModel, query: Query) -> QueryResult:
    """Evaluate one query against one model. Multi-variable targets are
    answered for associational, interventional, and counterfactual levels by
    enumerating the same worlds; path-response takes a single-pair target."""
    evidence, do, target = dict(query.evidence), dict(query.do), dict(query.target)
    if query.level == "hypothesis-posterior":
        raise InvalidQueryError("a hypothesis query runs against a model family")
    if query.level == "path-response":
        if evidence:
            raise InvalidQueryError("a path query takes no evidence")
        if len(target) != 1:
            raise InvalidQueryError("a path query targets a single variable")
        ((name, value),) = query.target
        dist = query_path(model, name, query.path, do)
        return QueryResult(query, dist[value], tuple((v, dist[v]) for v in model.var(name).domain))
    if query.path:
        raise InvalidQueryError("only a path query names mediators")
    if query.level == "associational":
        if do:
            raise InvalidQueryError("an associational query takes evidence only")
        per_var = {name: query_assoc(model, name, evidence) for name in target}
    elif query.level == "interventional":
        per_var = {name: query_do(model, name, do, evidence) for name in target}
    elif query.level == "counterfactual":
        per_var = {name: query_counterfactual(model, name, evidence, do) for name in target}
    else:
        raise InvalidQueryError(f"unknown query level {query.level!r}")
    if len(target) == 1:
        ((name, value),) = query.target
        dist = per_var[name]
        return QueryResult(query, dist[value], tuple((v, dist[v]) for v in model.var(name).domain))
    return QueryResult(query, _multi_target_probability(model, query))


def _multi_target_probability(model: ScmModel, query: Query) -> float:
    """Joint probability of a multi-pair target, by folding the target into
    the evidence of the matching single-world or twin-world enumeration."""
    evidence, do, target = dict(query.evidence), dict(query.do), dict(query.target)
    if query.level == "counterfactual":
        total = 0.0
        matched = 0.0
        for (_, twin), weight in _twin_pairs(model, evidence, do):
            total += weight
            if all(twin[k] == v for k, v in target.items()):
                matched += weight
        if total == 0.0:
            raise ZeroEvidenceError(f"evidence {evidence} has zero probability")
        return matched / total
    working = model.mutilate(do) if do else model
    mass = 0.0
    total = 0.0
    for assignment, prob in working.assignments():
        if not all(assignment[k] == v for k, v in evidence.items()):
            continue
        total += prob
        if all(assignment[k] == v for k, v in target.items()):
            mass += prob
    if total == 0.0:
        raise ZeroEvidenceError(f"evidence {evidence} has zero probability")
    return mass / total


# ---------------------------------------------------------------------------
# model families for hypothesis comparison


@dataclass(frozen=True)
class ModelFamily:
    """Named candidate models with priors, compared through the likelihood
    they give shared evidence. The label is the pseudo-variable under which
    the posterior is reported."""

    label: str
    members: tuple[tuple[str, float, ScmModel], ...]

    @classmethod
    def of(cls, label: str, members) -> "ModelFamily":
        members = tuple((name, float(prior), model) for name, prior, model in members)
        if not members:
            raise ModelStructureError("a model family needs at least one member")
        names = [name for name, _, _ in members]
        if len(set(names)) != len(names):
            raise ModelStructureError("family member names collide")
        total = sum(prior for _, prior, _ in members)
        if abs(total - 1.0) > 1e-9:
            raise ModelStructureError("family priors do not sum to one")
        if any(prior < 0.0 for _, prior, _ in members):
            raise ModelStructureError("family priors must be nonnegative")
        return cls(label, members)

    def space(self) -> dict[str, tuple[float, ScmModel]]:
        return {name: (prior, model) for name, prior, model in self.members}

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "members": [
                {"name": name, "prior": prior, "model": model.to_json()}
                for name, prior, model in self.members
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelFamily":
        return cls.of(
            data["label"],
            [
                (m["name"], m["prior"], ScmModel.from_json(m["model"]))
                for m in data["members"]
            ],
        )


def answer_family(family: ModelFamily, query: Query) -> QueryResult:
    """Evaluate a hypothesis-posterior query against a model family. The
    target names the family label and the member whose posterior is wanted."""
    if query.level != "hypothesis-posterior":
        raise InvalidQueryError("a model family answers hypothesis queries only")
    if query.path:
        raise InvalidQueryError("a hypothesis query has no mediator chain")
    if len(query.target) != 1:
        raise InvalidQueryError("a hypothesis query targets a single member")
    ((label, member),) = query.target
    if label != family.label:
        raise InvalidQueryError(f"target names {label!r}, not the family label {family.label!r}")
    if member not in {name for name, _, _ in family.members}:
        raise InvalidQueryError(f"{member!r} is not a member of the family")
    posterior = hypothesis_posterior(family.space(), dict(query.evidence), dict(query.do))
    ordered = tuple((name, posterior[name]) for name, _, _ in family.members)
    return QueryResult(query, posterior[member], ordered)
