"""A tour of the trace machinery: roll an episode, rewind it, branch it.

Everything downstream of a seed is reproducible, so a trace is less a
recording than an address: any prefix can be revisited, edited, and run
forward again under the same noise.
"""

from causalprobe.agents import AgentSpec
from causalprobe.gridworld import EnvSpec, canonical_dumps
from causalprobe.seeds import Seed
from causalprobe.simulator import InterventionSpec, extend, intervene, rollout

env = EnvSpec.of("floor-memory")
agent = AgentSpec.of("floor-memory/b")
seed = Seed(11)

# One full episode. The agent reads the cue tile at the start, walks the
# corridor, and commits to a side at the junction.
trace = rollout(env, agent, seed)
print(f"episode ran {len(trace)} steps, reward {trace.total_reward}")
print("agent path:", [s.world.entity_pos("agent") for s in trace.steps])

# A truncated rollout plus extend() lands on byte-identical steps: the
# random streams are keyed by step index, not by call order.
stub = rollout(env, agent, seed, max_steps=3)
resumed = extend(stub)
assert canonical_dumps(resumed.to_json()) == canonical_dumps(trace.to_json())
print("rewind and replay reproduced the episode exactly")

# Branch mid-flight: push the agent to the opposite wall at step 4 and
# let the episode continue under the same noise.
col = trace.steps[3].world.entity_pos("agent")[1]
push_to = "right" if col < 4 else "left"
push = InterventionSpec.of("world-edit", 4, ("agent-side",), push_to)
branch = intervene(trace, push)
print(f"pushed {push_to} at t=4 -> branch {branch.trace_id}")
print("  parent:", branch.parent_id, "branch point:", branch.branch_point)
print("  shared prefix:", branch.steps[:3] == trace.steps[:3])
print("  branch path:", [s.world.entity_pos("agent") for s in branch.steps])

# This agent re-derives its heading from the walls every step, so the push
# sends it to the wrong terminal; the memory-carrying sibling walks back.
print("  branch terminal:", branch.steps[-1].world.entity_pos("agent"))

# Fresh noise from a step onward is itself an intervention.
reshuffled = intervene(trace, InterventionSpec.of("reseed", 1, value=99))
print("reseed at t=1 gives a sibling episode of", len(reshuffled), "steps")
