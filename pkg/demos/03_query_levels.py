"""The five query levels, on a model small enough to check by hand.

A confounded pair: a hidden coin C drives both a cue X and an outcome Y.
Conditioning on the cue picks up the confounding; cutting the cue's
parents with do() removes it; the counterfactual couples both worlds
through shared noise; the path response routes an intervention through a
chosen mediator; the posterior level compares whole rival models.
"""

from causalprobe.engine import ModelFamily, Query, ScmModel, answer, answer_family
from causalprobe.estimation import Cpt, VariableDef

def table(name, domain, parents, rows):
    return Cpt(name, domain, parents, tuple(rows.items()))

variables = (
    VariableDef.of("C", ("h", "t")),
    VariableDef.of("X", ("0", "1"), parents=("C",)),
    VariableDef.of("Y", ("0", "1"), parents=("C", "X")),
)
cpts = {
    "C": table("C", ("h", "t"), (), {(): (0.5, 0.5)}),
    "X": table("X", ("0", "1"), ("C",), {("h",): (0.9, 0.1), ("t",): (0.1, 0.9)}),
    "Y": table("Y", ("0", "1"), ("C", "X"), {
        ("h", "0"): (0.8, 0.2), ("h", "1"): (0.6, 0.4),
        ("t", "0"): (0.4, 0.6), ("t", "1"): (0.2, 0.8),
    }),
}
model = ScmModel.of(variables, cpts)

# Seeing X=1 mostly tells us the coin came up tails.
seen = answer(model, Query.of("associational", {"Y": "1"}, evidence={"X": "1"}))
print("P(Y=1 | X=1)      =", round(seen.probability, 4))

# Setting X=1 leaves the coin alone, so the effect is much smaller.
forced = answer(model, Query.of("interventional", {"Y": "1"}, do={"X": "1"}))
print("P(Y=1 | do(X=1))  =", round(forced.probability, 4))

# Given that we saw X=0 and Y=0, would Y have been 1 had X been 1?
had = answer(model, Query.of("counterfactual", {"Y": "1"}, evidence={"X": "0", "Y": "0"}, do={"X": "1"}))
print("P(Y[X=1]=1 | X=0, Y=0) =", round(had.probability, 4))

# Response of Y to do(C=t) carried only through X: the direct C -> Y edge
# keeps its observational behavior while the mediator reacts.
via_x = answer(model, Query.of("path-response", {"Y": "1"}, do={"C": "t"}, path=("X",)))
print("f_X(C=t)          =", round(via_x.probability, 4))

# Rival stories about who listens to whom, judged by shared evidence.
rival_cpts = {
    "C": cpts["C"],
    "X": table("X", ("0", "1"), (), {(): (0.5, 0.5)}),
    "Y": cpts["Y"],
}
rival = ScmModel.of(
    (variables[0], VariableDef.of("X", ("0", "1")), variables[2]), rival_cpts
)
family = ModelFamily.of("H", [("listens", 0.5, model), ("ignores", 0.5, rival)])
verdict = answer_family(
    family, Query.of("hypothesis-posterior", {"H": "listens"}, evidence={"X": "1"}, do={"C": "t"})
)
print("P(H=listens | do(C=t), X=1) =", round(verdict.probability, 4))
print("posterior over the family   =", {k: round(v, 4) for k, v in verdict.distribution})
