"""causalprobe: a black-box causal analysis workbench for agent behavior.

The package is organized as a library. `seeds`, `gridworld`, `envs`, and `agents`
provide the deterministic simulation substrate; `simulator` adds branching traces
and interventions; `estimation` turns rollouts into smoothed CPTs; `engine`
answers associational, interventional, counterfactual, path-response, and
hypothesis-posterior queries; `experiments` packages the shipped analyses; `cli`
and `service` expose the command line and HTTP surfaces.
"""

from causalprobe.seeds import Seed

__version__ = "0.1.0"

__all__ = ["Seed", "__version__"]
