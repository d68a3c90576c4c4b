"""Independent brute-force reference for probabilistic queries.

Everything here works from plain JSON model payloads and shares no
enumeration code with the package: joints are built by explicit recursion
over the factorization, interventions by dictionary surgery on the
payload, and counterfactuals by enumerating coupled pairs of worlds.
Slow and obvious on purpose; the package's engine must agree with it.
"""

from itertools import product


def model_payload(variables, tables):
    """Assemble the payload shape used by these reference routines.

    variables: list of (name, domain, parents); tables: {name: {parent
    values tuple: probability vector over the domain}}.
    """
    return {
        "variables": [
            {"name": n, "domain": list(d), "parents": list(p)} for n, d, p in variables
        ],
        "tables": {
            name: {",".join(k): list(v) for k, v in rows.items()}
            for name, rows in tables.items()
        },
    }


def _row(payload, name, parent_values):
    key = ",".join(parent_values)
    return payload["tables"][name][key]


def _ordered(payload):
    """Topological order by repeated scanning, first-declared-first."""
    placed = []
    pending = list(payload["variables"])
    while pending:
        for i, var in enumerate(pending):
            if all(p in {v["name"] for v in placed} for p in var["parents"]):
                placed.append(pending.pop(i))
                break
        else:
            raise ValueError("cycle in reference model")
    return placed

def joint(payload):
    """All (assignment dict, probability) pairs, by explicit recursion."""
    order = _ordered(payload)

    def rec(i, partial, prob):
        if i == len(order):
            yield dict(partial), prob
            return
        var = order[i]
        parent_values = tuple(partial[p] for p in var["parents"])
        row = _row(payload, var["name"], parent_values)
        for value, p in zip(var["domain"], row):
            partial[var["name"]] = value
            yield from rec(i + 1, partial, prob * p)
            del partial[var["name"]]

    yield from rec(0, {}, 1.0)


def _matches(assignment, evidence):
    return all(assignment[k] == v for k, v in evidence.items())


def oracle_assoc(payload, target, evidence):
    domain = next(v["domain"] for v in payload["variables"] if v["name"] == target)
    mass = {value: 0.0 for value in domain}
    total = 0.0
    for assignment, prob in joint(payload):
        if _matches(assignment, evidence):
            mass[assignment[target]] += prob
            total += prob
    if total == 0.0:
        raise ZeroDivisionError("evidence has zero mass")
    return {value: m / total for value, m in mass.items()}


def mutilated(payload, do):
    """Payload surgery: each intervened variable becomes a parentless point
    mass on its forced value."""
    out = {
        "variables": [
            dict(v, parents=[] if v["name"] in do else v["parents"])
            for v in payload["variables"]
        ],
        "tables": dict(payload["tables"]),
    }
    for v in payload["variables"]:
        name = v["name"]
        if name in do:
            out["tables"][name] = {
                "": [1.0 if value == do[name] else 0.0 for value in v["domain"]]
            }
    return out


def oracle_do(payload, target, do, evidence=None):
    return oracle_assoc(mutilated(payload, do), target, evidence or {})


def oracle_counterfactual(payload, target, evidence, do):
    """Coupled twin-world enumeration: a variable whose parent row is the
    same in both worlds repeats its factual value; a variable whose rows
    differ draws independently in each world."""
    order = _ordered(payload)
    domains = [v["domain"] for v in order]
    names = [v["name"] for v in order]
    target_domain = next(v["domain"] for v in payload["variables"] if v["name"] == target)
    mass = {value: 0.0 for value in target_domain}
    total = 0.0
    for fact_values in product(*domains):
        fact = dict(zip(names, fact_values))
        if not _matches(fact, evidence):
            continue
        for twin_values in product(*domains):
            twin = dict(zip(names, twin_values))
            weight = 1.0
            for var in order:
                name = var["name"]
                fact_row = tuple(fact[p] for p in var["parents"])
                if name in do:
                    if twin[name] != do[name]:
                        weight = 0.0
                        break
                    weight *= _row(payload, name, fact_row)[var["domain"].index(fact[name])]
                    continue
                twin_row = tuple(twin[p] for p in var["parents"])
                p_fact = _row(payload, name, fact_row)[var["domain"].index(fact[name])]
                if fact_row == twin_row:
                    weight *= p_fact if twin[name] == fact[name] else 0.0
                else:
                    weight *= p_fact * _row(payload, name, twin_row)[var["domain"].index(twin[name])]
                if weight == 0.0:
                    break
            if weight > 0.0:
                mass[twin[target]] += weight
                total += weight
    if total == 0.0:
        raise ZeroDivisionError("evidence has zero mass")
    return {value: m / total for value, m in mass.items()}


def oracle_path(payload, target, via, do):
    """Nested response: the outer intervention sets the mediator's input,
    the inner one replays each mediator value into the target."""
    via_domain = next(v["domain"] for v in payload["variables"] if v["name"] == via)
    target_domain = next(v["domain"] for v in payload["variables"] if v["name"] == target)
    outer = oracle_do(payload, via, do)
    result = {value: 0.0 for value in target_domain}
    for m in via_domain:
        inner = oracle_do(payload, target, {via: m})
        for value in target_domain:
            result[value] += inner[value] * outer[m]
    return result


def oracle_posterior(spaces, evidence, do=None):
    """spaces: {hypothesis: (prior, payload)}. Posterior over hypotheses."""
    weights = {}
    for name, (prior, payload) in spaces.items():
        working = mutilated(payload, do) if do else payload
        likelihood = 0.0
        for assignment, prob in joint(working):
            if _matches(assignment, evidence):
                likelihood += prob
        weights[name] = prior * likelihood
    total = sum(weights.values())
    if total == 0.0:
        raise ZeroDivisionError("evidence has zero mass under every hypothesis")
    return {name: w / total for name, w in weights.items()}


def random_payload(rng, n_vars=4, max_domain=3, edge_prob=0.6):
    """A random small model: DAG by construction (parents precede), flat
    Dirichlet rows."""
    variables = []
    tables = {}
    for i in range(n_vars):
        name = f"V{i}"
        size = int(rng.integers(2, max_domain + 1))
        domain = [f"v{i}{j}" for j in range(size)]
        parents = [f"V{j}" for j in range(i) if rng.random() < edge_prob]
        variables.append((name, domain, parents))
        rows = {}
        parent_domains = [variables[int(p[1:])][1] for p in parents]
        for combo in product(*parent_domains) if parent_domains else [()]:
            rows[tuple(combo)] = [float(x) for x in rng.dirichlet([1.0] * size)]
        tables[name] = rows
    return model_payload(variables, tables)
