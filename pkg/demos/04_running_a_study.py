"""Run a packaged study end to end and check it against the closed form.

A study bundles the collection plan (which regimes, which agents), the
model recipe, and the query list. Running one returns a table whose
columns are the agents under study and whose rows are the queries.
"""

import json
from pathlib import Path

from causalprobe.experiments import experiment, run_named
from causalprobe.tables import QueryTable, diff_tables

spec = experiment("grass-sand")
print(f"{spec.name}: {len(spec.columns)} columns, {len(spec.rows)} rows,")
print(f"  {len(spec.columns[0].jobs)} regimes per column, default budget {spec.rollouts}")

# A light budget is enough to see the pattern; the shipped references
# were checked at the full one.
table = run_named("grass-sand", seed=2026, rollouts=300)
print()
print(table.render())
print()

# The observational rows agree across the agents; the interventional rows
# split them: the floor reader ignores a forced pill, the pill chaser
# ignores a forced floor.
a_pill = table.value("P(T=left | do(R=left))", "A")
b_pill = table.value("P(T=left | do(R=left))", "B")
print(f"forced pill, ends left: A={a_pill:.3f} (coin flip), B={b_pill:.3f} (follows)")

# Compare against the analytic limits shipped with the repository.
references = Path(__file__).resolve().parent.parent / "references"
analytic = json.loads((references / "analytic.json").read_text())
tolerances = json.loads((references / "tolerances_analytic.json").read_text())
reference = next(QueryTable.from_json(t) for t in analytic["tables"] if t["name"] == "grass-sand")
report = diff_tables(table, reference, tolerances["grass-sand"])
print()
print(report.render())
