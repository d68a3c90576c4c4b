"""From rollouts to conditional probability tables.

A rollout tree is a pile of counted feature assignments, bucketed by the
regime that produced them. Estimation smooths each count vector with a
flat prior, pools the regimes that left the variable free, and skips the
regimes that pinned it.
"""

from causalprobe.agents import AgentSpec
from causalprobe.estimation import OBSERVATIONAL, Regime, RolloutTree, VariableDef, collect, estimate_cpt
from causalprobe.gridworld import EnvSpec
from causalprobe.seeds import Seed
from causalprobe.simulator import InterventionSpec

variables = (
    VariableDef.of("F", ("grass", "sand"), kind="tile-kind", row=5, col=4, t=1),
    VariableDef.of("R", ("left", "right"), kind="pill-side", col=4, t=1),
    VariableDef.of("T", ("left", "right"), parents=("F", "R"), kind="entity-side", col=4, t="end"),
)

# Two regimes: plain episodes, and episodes where the pill is forced to
# the left wall at the start. The forced regime pins R, so R's own table
# must not learn from it; T stays free and pools both.
forced = Regime.of(
    "do-pill-left",
    [InterventionSpec.of("world-edit", 1, ("pill-side",), "left")],
    sets={"R": "left"},
)

tree = RolloutTree(variables)
env = EnvSpec.of("grass-sand")
agent = AgentSpec.of("grass-sand/A")
collect(tree, env, agent, OBSERVATIONAL, 200, Seed(5).child(0))
collect(tree, env, agent, forced, 200, Seed(5).child(1))

for key, bucket in sorted(tree.regimes.items()):
    print(f"{key}: n={bucket.n} assignments={len(bucket.counts)}")

# The floor reader ends wherever the floor says, whatever the pill does.
cpt_t = estimate_cpt(tree, "T", ("observational", "do-pill-left"))
for parents, probs in cpt_t.rows:
    print(f"P(T | F={parents[0]}, R={parents[1]}) = {probs}")

# R pools only the observational bucket; the pinned regime is excluded.
cpt_r = estimate_cpt(tree, "R", ("observational", "do-pill-left"))
print("P(R) from free regimes only:", cpt_r.row(()))

# Estimation never invents certainty: a parent row that was never seen
# falls back to the prior mean.
empty = RolloutTree(variables)
print("unseen rows sit at the prior mean:", estimate_cpt(empty, "T", ("observational",)).row(("grass", "left")))
