import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalprobe.engine import (
    InvalidQueryError,
    ModelFamily,
    ModelStructureError,
    Query,
    QueryResult,
    ScmModel,
    ZeroEvidenceError,
    answer,
    answer_family,
    hypothesis_posterior,
    query_assoc,
    query_counterfactual,
    query_do,
    query_path,
)
from causalprobe.estimation import Cpt, VariableDef

from oracle import (
    oracle_assoc,
    oracle_counterfactual,
    oracle_do,
    oracle_path,
    oracle_posterior,
    random_payload,
)


def model_from_payload(payload):
    variables = [
        VariableDef.of(v["name"], v["domain"], v["parents"]) for v in payload["variables"]
    ]
    cpts = {}
    for v in payload["variables"]:
        rows = tuple(
            (tuple(key.split(",")) if key else (), tuple(probs))
            for key, probs in payload["tables"][v["name"]].items()
        )
        cpts[v["name"]] = Cpt(v["name"], tuple(v["domain"]), tuple(v["parents"]), rows)
    return ScmModel.of(variables, cpts)


def chain_model(p_y_given_x=(0.9, 0.1)):
    x = VariableDef.of("X", ("a", "b"))
    y = VariableDef.of("Y", ("0", "1"), parents=("X",))
    cx = Cpt("X", ("a", "b"), (), (((), (0.6, 0.4)),))
    cy = Cpt(
        "Y",
        ("0", "1"),
        ("X",),
        (
            (("a",), (1 - p_y_given_x[0], p_y_given_x[0])),
            (("b",), (1 - p_y_given_x[1], p_y_given_x[1])),
        ),
    )
    return ScmModel.of([x, y], {"X": cx, "Y": cy})


# ---- agreement with the independent reference -----------------------------


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_engine_matches_reference_on_random_models(seed):
    rng = np.random.default_rng(seed)
    payload = random_payload(rng)
    model = model_from_payload(payload)
    names = [v["name"] for v in payload["variables"]]
    doms = {v["name"]: v["domain"] for v in payload["variables"]}
    target = names[-1]
    evidence = {names[0]: doms[names[0]][0]}
    do = {names[1]: doms[names[1]][-1]}

    got = query_assoc(model, target, evidence)
    want = oracle_assoc(payload, target, evidence)
    assert got == pytest.approx(want, abs=1e-12)

    got = query_do(model, target, do, evidence)
    want = oracle_do(payload, target, do, evidence)
    assert got == pytest.approx(want, abs=1e-12)

    got = query_counterfactual(model, target, evidence, do)
    want = oracle_counterfactual(payload, target, evidence, do)
    assert got == pytest.approx(want, abs=1e-12)

    got = query_path(model, target, names[1], {names[0]: doms[names[0]][-1]})
    want = oracle_path(payload, target, names[1], {names[0]: doms[names[0]][-1]})
    assert got == pytest.approx(want, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_posterior_matches_reference(seed):
    rng = np.random.default_rng(seed)
    payloads = {f"h{i}": random_payload(rng, n_vars=3) for i in range(3)}
    priors = rng.dirichlet([1.0] * 3)
    # candidate models share the variable layout so evidence names line up
    shared = payloads["h0"]["variables"]
    for p in payloads.values():
        if [v["name"] for v in p["variables"]] != [v["name"] for v in shared]:
            return
    evidence = {shared[0]["name"]: shared[0]["domain"][0]}
    space = {
        name: (float(priors[i]), model_from_payload(payload))
        for i, (name, payload) in enumerate(payloads.items())
    }
    reference = {
        name: (float(priors[i]), payload)
        for i, (name, payload) in enumerate(payloads.items())
    }
    try:
        got = hypothesis_posterior(space, evidence)
    except ZeroEvidenceError:
        return
    want = oracle_posterior(reference, evidence)
    assert got == pytest.approx(want, abs=1e-12)


# ---- identities -----------------------------------------------------------


def confounded_model():
    """P influences F; T reads only F; R reads P and T."""
    p = VariableDef.of("P", ("l", "r"))
    f = VariableDef.of("F", ("g", "s"), parents=("P",))
    t = VariableDef.of("T", ("l", "r"), parents=("F",))
    r = VariableDef.of("R", ("0", "1"), parents=("P", "T"))
    cp = Cpt("P", ("l", "r"), (), (((), (0.5, 0.5)),))
    cf = Cpt("F", ("g", "s"), ("P",), ((("l",), (0.97, 0.03)), (("r",), (0.02, 0.98))))
    ct = Cpt("T", ("l", "r"), ("F",), ((("g",), (0.99, 0.01)), (("s",), (0.015, 0.985))))
    cr = Cpt(
        "R",
        ("0", "1"),
        ("P", "T"),
        (
            (("l", "l"), (0.01, 0.99)),
            (("l", "r"), (0.98, 0.02)),
            (("r", "l"), (0.97, 0.03)),
            (("r", "r"), (0.02, 0.98)),
        ),
    )
    return ScmModel.of([p, f, t, r], {"P": cp, "F": cf, "T": ct, "R": cr})


def test_do_equals_backdoor_adjustment():
    model = confounded_model()
    direct = query_do(model, "R", {"T": "l"})["1"]
    # adjust over the confounding ancestor P
    adjusted = sum(
        query_assoc(model, "R", {"T": "l", "P": p_val})["1"] * query_assoc(model, "P")[p_val]
        for p_val in ("l", "r")
    )
    assert direct == pytest.approx(adjusted, abs=1e-12)
    # conditioning alone disagrees, which is the point of adjusting
    assert query_assoc(model, "R", {"T": "l"})["1"] != pytest.approx(direct, abs=1e-3)


def test_consistency_axiom():
    model = confounded_model()
    evidence = {"F": "g", "T": "l"}
    cf = query_counterfactual(model, "R", evidence, {"T": "l"})
    plain = query_assoc(model, "R", evidence)
    assert cf == pytest.approx(plain, abs=1e-12)


def test_unconfounded_levels_collapse():
    model = chain_model()
    assert query_do(model, "Y", {"X": "a"}) == pytest.approx(
        query_assoc(model, "Y", {"X": "a"}), abs=1e-12
    )
    assert query_counterfactual(model, "Y", {}, {"X": "a"}) == pytest.approx(
        query_do(model, "Y", {"X": "a"}), abs=1e-12
    )


def test_counterfactual_with_shared_row_repeats_outcome():
    model = chain_model()
    # the twin keeps X=a, so Y's row is unchanged and must repeat
    cf = query_counterfactual(model, "Y", {"X": "a", "Y": "1"}, {"X": "a"})
    assert cf["1"] == pytest.approx(1.0, abs=1e-12)


def test_counterfactual_with_changed_row_draws_fresh():
    model = chain_model((0.9, 0.1))
    cf = query_counterfactual(model, "Y", {"X": "a", "Y": "1"}, {"X": "b"})
    assert cf["1"] == pytest.approx(0.1, abs=1e-12)


def test_deterministic_mechanism_makes_counterfactual_exact():
    g = VariableDef.of("G", ("left", "right"))
    c = VariableDef.of("C", ("red", "green"), parents=("G",))
    cg = Cpt("G", ("left", "right"), (), (((), (0.5, 0.5)),))
    cc = Cpt(
        "C",
        ("red", "green"),
        ("G",),
        ((("left",), (1.0, 0.0)), (("right",), (1.0, 0.0))),
    )
    model = ScmModel.of([g, c], {"G": cg, "C": cc})
    cf = query_counterfactual(model, "C", {"G": "left", "C": "red"}, {"G": "right"})
    assert cf["red"] == 1.0


def test_path_response_composes_interventions():
    model = confounded_model()
    f = query_path(model, "R", "T", {"F": "g"})
    by_hand = sum(
        query_do(model, "R", {"T": t_val})["1"] * query_do(model, "T", {"F": "g"})[t_val]
        for t_val in ("l", "r")
    )
    assert f["1"] == pytest.approx(by_hand, abs=1e-12)


def test_path_response_chains_nest():
    model = confounded_model()
    chained = query_path(model, "R", ("F", "T"), {"P": "l"})
    by_hand = {v: 0.0 for v in ("0", "1")}
    outer = query_do(model, "F", {"P": "l"})
    for f_val, w_outer in outer.items():
        inner = query_path(model, "R", ("T",), {"F": f_val})
        for v in by_hand:
            by_hand[v] += inner[v] * w_outer
    assert chained == pytest.approx(by_hand, abs=1e-12)


def test_path_response_empty_chain_is_plain_intervention():
    model = confounded_model()
    assert query_path(model, "R", (), {"T": "l"}) == pytest.approx(
        query_do(model, "R", {"T": "l"}), abs=1e-15
    )


def test_posterior_two_coin_hand_case():
    fair = chain_model((0.5, 0.5))
    biased = chain_model((0.9, 0.9))
    space = {"fair": (0.5, fair), "biased": (0.5, biased)}
    post = hypothesis_posterior(space, {"Y": "1"})
    assert post["biased"] == pytest.approx(0.9 / 1.4, abs=1e-12)
    assert post["fair"] == pytest.approx(0.5 / 1.4, abs=1e-12)


# ---- validation and errors ------------------------------------------------


def test_zero_evidence_raises():
    model = chain_model((1.0, 1.0))
    with pytest.raises(ZeroEvidenceError):
        query_assoc(model, "X", {"Y": "0"})
    with pytest.raises(ZeroEvidenceError):
        query_counterfactual(model, "X", {"Y": "0"}, {"X": "a"})
    with pytest.raises(ZeroEvidenceError):
        hypothesis_posterior({"only": (1.0, model)}, {"Y": "0"})


def test_bad_names_and_values_raise():
    model = chain_model()
    with pytest.raises(KeyError):
        query_assoc(model, "Z")
    with pytest.raises(InvalidQueryError):
        query_assoc(model, "Y", {"X": "zebra"})
    with pytest.raises(InvalidQueryError):
        query_path(model, "Y", "X", {"X": "a"})
    with pytest.raises(InvalidQueryError):
        query_path(model, "Y", ("X", "X"), {"W": "a"})
    with pytest.raises(InvalidQueryError):
        query_counterfactual(model, "Y", {}, {})


def test_empty_do_collapses_to_association():
    model = chain_model()
    assert query_do(model, "Y", {}, {"X": "a"}) == pytest.approx(
        query_assoc(model, "Y", {"X": "a"}), abs=1e-15
    )


def test_mutilation_leaves_other_mechanisms_untouched():
    model = confounded_model()
    cut = model.mutilate({"T": "l"})
    for var, cpt in zip(model.variables, model.cpts):
        if var.name == "T":
            continue
        assert cut.cpt(var.name) == cpt
        assert cut.var(var.name) == var


def test_model_validation():
    x = VariableDef.of("X", ("a", "b"), parents=("Y",))
    y = VariableDef.of("Y", ("0", "1"), parents=("X",))
    with pytest.raises(ModelStructureError):
        ScmModel.of([x, y], {})
    lone = VariableDef.of("X", ("a", "b"))
    with pytest.raises(ModelStructureError):
        ScmModel.of([lone], {})
    bad_row = Cpt("X", ("a", "b"), (), (((), (0.7, 0.7)),))
    with pytest.raises(ModelStructureError):
        ScmModel.of([lone], {"X": bad_row})
    orphan = VariableDef.of("X", ("a", "b"), parents=("GHOST",))
    with pytest.raises(ModelStructureError):
        ScmModel.of([orphan], {"X": bad_row})


def test_model_json_round_trip():
    model = confounded_model()
    again = ScmModel.from_json(model.to_json())
    assert again == model


def test_query_payloads_and_answer():
    model = confounded_model()
    q = Query.of("interventional", {"R": "1"}, do={"T": "l"})
    assert Query.from_json(q.to_json()) == q
    result = answer(model, q)
    assert result.probability == pytest.approx(query_do(model, "R", {"T": "l"})["1"])
    assert result.p("0") == pytest.approx(1.0 - result.probability)
    assert QueryResult.from_json(result.to_json()) == result
    with pytest.raises(InvalidQueryError):
        answer(model, Query.of("associational", {"R": "1"}, do={"T": "l"}))
    with pytest.raises(InvalidQueryError):
        answer(model, Query.of("interventional", {"R": "1"}, do={"T": "l"}, path="T"))
    with pytest.raises(InvalidQueryError):
        Query.of("magic", {"R": "1"})
    with pytest.raises(InvalidQueryError):
        Query.of("associational", {})


def test_path_response_payload():
    model = confounded_model()
    q = Query.of("path-response", {"R": "1"}, do={"F": "g"}, path="T")
    assert Query.from_json(q.to_json()) == q
    result = answer(model, q)
    assert result.probability == pytest.approx(query_path(model, "R", ("T",), {"F": "g"})["1"])
    with pytest.raises(InvalidQueryError):
        answer(model, Query.of("path-response", {"R": "1", "T": "l"}, do={"F": "g"}, path="T"))


def test_multi_variable_target_probability():
    model = confounded_model()
    q = Query.of("associational", {"T": "l", "F": "g"})
    got = answer(model, q).probability
    want = query_assoc(model, "F")["g"] * query_assoc(model, "T", {"F": "g"})["l"]
    assert got == pytest.approx(want, abs=1e-12)
    assert answer(model, q).distribution == ()
    joint_do = answer(model, Query.of("interventional", {"R": "1", "T": "l"}, do={"F": "g"}))
    split = query_do(model, "T", {"F": "g"})["l"]
    split *= query_assoc(model.mutilate({"F": "g"}), "R", {"T": "l"})["1"]
    assert joint_do.probability == pytest.approx(split, abs=1e-12)


def test_counterfactual_consistency_through_payload():
    model = confounded_model()
    q = Query.of("counterfactual", {"R": "1"}, evidence={"T": "l", "R": "1"}, do={"T": "l"})
    assert answer(model, q).probability == pytest.approx(1.0, abs=1e-12)


def test_model_family_round_trip_and_answer():
    fair = chain_model((0.5, 0.5))
    biased = chain_model((0.9, 0.9))
    family = ModelFamily.of("H", [("fair", 0.5, fair), ("biased", 0.5, biased)])
    assert ModelFamily.from_json(family.to_json()) == family
    q = Query.of("hypothesis-posterior", {"H": "biased"}, evidence={"Y": "1"})
    result = answer_family(family, q)
    assert result.probability == pytest.approx(0.9 / 1.4, abs=1e-12)
    assert dict(result.distribution)["fair"] == pytest.approx(0.5 / 1.4, abs=1e-12)
    with pytest.raises(InvalidQueryError):
        answer_family(family, Query.of("associational", {"H": "fair"}))
    with pytest.raises(InvalidQueryError):
        answer_family(family, Query.of("hypothesis-posterior", {"L": "fair"}))
    with pytest.raises(InvalidQueryError):
        answer_family(family, Query.of("hypothesis-posterior", {"H": "ghost"}))
    with pytest.raises(InvalidQueryError):
        answer(fair, q)


def test_model_family_validation():
    model = chain_model()
    with pytest.raises(ModelStructureError):
        ModelFamily.of("H", [])
    with pytest.raises(ModelStructureError):
        ModelFamily.of("H", [("a", 0.6, model), ("a", 0.4, model)])
    with pytest.raises(ModelStructureError):
        ModelFamily.of("H", [("a", 0.9, model), ("b", 0.4, model)])
