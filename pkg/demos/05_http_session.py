"""Drive the HTTP service the way an interactive client would.

The same session flow works over a real socket via the ``serve``
subcommand; the in-process test client keeps this demo self-contained.
"""

from fastapi.testclient import TestClient

from causalprobe.estimation import OBSERVATIONAL, Regime
from causalprobe.experiments import experiment
from causalprobe.service import build_app
from causalprobe.simulator import InterventionSpec

app = build_app("causalprobe-data")
client = TestClient(app)

# A session owns an environment, an agent, and a forest of traces.
created = client.post("/sessions", json={
    "env": {"env_id": "grass-sand", "params": {}},
    "agent": {"agent-id": "grass-sand/A", "params": {}},
    "seed": 8,
}).json()
sid = created["session-id"]
root = created["trace-ids"][0]
print("session", sid, "root trace", root)

# Branch the root: move the pill to the other wall before the run starts.
swap = {"kind": "world-edit", "t": 1, "path": ["pill-side"], "value": "right"}
branch = client.post(f"/sessions/{sid}/traces/{root}/intervene", json=swap).json()
print("branched at t=1 ->", branch["trace-id"], "steps:", len(branch["steps"]))

forest = client.get(f"/sessions/{sid}/traces").json()["traces"]
print("forest now holds", len(forest), "traces")

# Collection runs in the background; model assembly waits for the tree.
# The two forced regimes matter: observational episodes never show the
# pill and the floor disagreeing, so those table rows only get data when
# the pill is moved by hand.
spec = experiment("grass-sand")
regimes = [OBSERVATIONAL.to_json()]
for side in ("left", "right"):
    regimes.append(Regime.of(
        f"do-pill-{side}",
        [InterventionSpec.of("world-edit", 1, ("pill-side",), side)],
        sets={"R": side},
    ).to_json())
job = client.post(f"/sessions/{sid}/collect", json={
    "regimes": regimes,
    "n": 150,
    "extractors": [v.to_json() for v in spec.variables],
    "seed": 3,
}).json()
print("collection job", job["job-id"], "-> tree", job["tree-id"])

model = client.post(f"/sessions/{sid}/models", json={
    "tree": job["tree-id"],
    "recipe": spec.columns[0].recipe.to_json(),
}).json()
print("assembled model", model["model-id"])
print("job status:", client.get(f"/sessions/{sid}/collect/{job['job-id']}").json()["status"])

# This agent reads the floor. Forcing the pill does nothing; forcing the
# floor carries the full effect.
for query, label in (
    ({"level": "interventional", "target": {"T": "left"}, "do": {"R": "left"}}, "P(T=left | do(R=left))"),
    ({"level": "interventional", "target": {"T": "left"}, "do": {"F": "grass"}}, "P(T=left | do(F=grass))"),
):
    result = client.post(f"/models/{model['model-id']}/query", json=query).json()
    print(f"{label} = {result['probability']:.3f}")

# Whole studies run server-side too, straight to a table.
table = client.post("/experiments/mimic/run", json={"rollouts": 100, "seed": 1}).json()
print("mimic over HTTP:", [round(r["values"][0], 3) for r in table["rows"]])
