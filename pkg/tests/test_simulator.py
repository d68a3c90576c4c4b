import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalprobe.agents import AgentSpec
from causalprobe.envs import step_budget
from causalprobe.gridworld import EnvSpec, Tile, canonical_dumps
from causalprobe.seeds import Seed
from causalprobe.simulator import (
    SCHEMA_VERSION,
    InterventionSpec,
    InvalidInterventionError,
    Trace,
    dump_traces,
    extend,
    intervene,
    load_traces,
    rollout,
)

GS = EnvSpec.of("grass-sand")
FM = EnvSpec.of("floor-memory")
MIMIC = EnvSpec.of("mimic")


def gs_rollout(value, agent="grass-sand/A", **params):
    return rollout(GS, AgentSpec.of(agent, **params), Seed(value))


def test_rollout_deterministic_and_bit_stable():
    a = gs_rollout(5)
    b = gs_rollout(5)
    assert a == b
    assert canonical_dumps(a.to_json()) == canonical_dumps(b.to_json())


def test_trace_ids_unique_across_seeds():
    ids = {gs_rollout(v).trace_id for v in range(100)}
    assert len(ids) == 100


def test_records_are_contiguous_and_end_terminated():
    tr = gs_rollout(9)
    assert [s.t for s in tr.steps] == list(range(1, len(tr.steps) + 1))
    assert tr.complete
    assert not tr.steps[-2].world.terminated


def test_branch_shares_prefix_and_metadata():
    parent = gs_rollout(3)
    iv = InterventionSpec.of("world-edit", 2, ("floor-kind",), "sand")
    child = intervene(parent, iv)
    assert child.steps[:1] == parent.steps[:1]
    assert child.parent_id == parent.trace_id
    assert child.branch_point == 2
    assert child.intervention == iv
    assert child.seed == parent.seed
    assert child.trace_id != parent.trace_id
    assert intervene(parent, iv) == child


def test_identity_edit_reproduces_parent_suffix():
    parent = gs_rollout(4)
    kind = "grass" if Tile(parent.steps[0].world.grid[5][4]) == Tile.GRASS else "sand"
    child = intervene(parent, InterventionSpec.of("world-edit", 2, ("floor-kind",), kind))
    assert child.steps == parent.steps


def test_floor_edit_redirects_reactive_agent():
    for v in range(10):
        parent = gs_rollout(v)
        if Tile(parent.steps[0].world.grid[5][4]) != Tile.GRASS:
            continue
        child = intervene(parent, InterventionSpec.of("world-edit", 1, ("floor-kind",), "sand"))
        assert parent.final_world.entity_pos("agent") == (1, 1)
        assert child.final_world.entity_pos("agent") == (1, 7)
        assert child.total_reward == 0.0


def test_memory_edit_overrides_stored_cue():
    for v in range(20):
        parent = rollout(FM, AgentSpec.of("floor-memory/a", slip=0), Seed(v))
        if Tile(parent.steps[0].world.grid[7][4]) != Tile.GRASS:
            continue
        child = intervene(parent, InterventionSpec.of("agent-edit", 3, ("cue",), "right"))
        assert parent.final_world.entity_pos("agent") == (1, 1)
        assert child.final_world.entity_pos("agent") == (1, 7)
        assert child.steps[2].memory.get("cue") == "right"


def test_agent_side_push_through_branch_api():
    for v in range(20):
        parent = rollout(FM, AgentSpec.of("floor-memory/b", slip=0), Seed(v))
        if Tile(parent.steps[0].world.grid[7][4]) != Tile.GRASS:
            continue
        child = intervene(parent, InterventionSpec.of("world-edit", 4, ("agent-side",), "right"))
        assert child.final_world.entity_pos("agent") == (1, 7)
        assert child.total_reward == 0.0


def test_force_action_keeps_memory_and_replaces_action():
    parent = gs_rollout(6)
    child = intervene(parent, InterventionSpec.of("force-action", 1, value="no-op"))
    assert child.steps[0].action.name == "NOOP"
    assert child.steps[0].memory == parent.steps[0].memory
    assert child.steps[1].world.entity_pos("agent") == parent.steps[0].world.entity_pos("agent")


def test_reseed_preserves_prefix_and_changes_future():
    parent = rollout(MIMIC, AgentSpec.of("mimic/leader"), Seed(1))
    diverged = 0
    for salt in range(8):
        child = intervene(parent, InterventionSpec.of("reseed", 5, value=salt))
        assert child.steps[:4] == parent.steps[:4]
        diverged += child.steps[4:] != parent.steps[4:]
    assert diverged >= 6  # fresh coin flips from step 5 on


def test_reseed_at_step_one_resamples_the_initial_state():
    parent = gs_rollout(2)
    grids = {intervene(parent, InterventionSpec.of("reseed", 1, value=s)).steps[0].world.grid for s in range(16)}
    assert len(grids) > 1


def test_intervene_rejects_bad_requests():
    parent = gs_rollout(0)
    with pytest.raises(InvalidInterventionError):
        intervene(parent, InterventionSpec.of("world-edit", 0, ("floor-kind",), "sand"))
    with pytest.raises(InvalidInterventionError):
        intervene(parent, InterventionSpec.of("world-edit", len(parent.steps) + 1, ("floor-kind",), "sand"))
    with pytest.raises(InvalidInterventionError):
        InterventionSpec.of("teleport", 1)
    with pytest.raises(InvalidInterventionError):
        intervene(parent, InterventionSpec.of("force-action", 1, value="sideways"))
    with pytest.raises(InvalidInterventionError):
        intervene(parent, InterventionSpec.of("reseed", 1, value="abc"))
    with pytest.raises(InvalidInterventionError):
        intervene(parent, InterventionSpec.of("agent-edit", 1, ("a", "b"), "x"))


def test_extend_matches_uncapped_rollout():
    capped = rollout(GS, AgentSpec.of("grass-sand/A"), Seed(7), max_steps=3)
    assert not capped.complete
    assert len(capped.steps) == 3
    full = rollout(GS, AgentSpec.of("grass-sand/A"), Seed(7))
    grown = extend(capped)
    assert grown == full
    assert grown.trace_id == capped.trace_id
    assert extend(full) == full


def test_extend_in_two_hops():
    capped = rollout(GS, AgentSpec.of("grass-sand/A"), Seed(8), max_steps=2)
    middle = extend(capped, max_steps=4)
    assert len(middle.steps) == 4
    assert extend(middle) == rollout(GS, AgentSpec.of("grass-sand/A"), Seed(8))


def test_jsonl_round_trip(tmp_path):
    parent = gs_rollout(11)
    child = intervene(parent, InterventionSpec.of("world-edit", 2, ("pill-side",), "right"))
    path = tmp_path / "traces.jsonl"
    dump_traces(path, [parent, child])
    loaded = load_traces(path)
    assert loaded == [parent, child]
    assert [canonical_dumps(t.to_json()) for t in loaded] == [
        canonical_dumps(t.to_json()) for t in (parent, child)
    ]


def test_trace_json_round_trip_with_intervention():
    parent = rollout(MIMIC, AgentSpec.of("mimic/leader"), Seed(3), max_steps=6)
    child = intervene(parent, InterventionSpec.of("force-action", 4, value="left"), max_steps=6)
    assert Trace.from_json(child.to_json()) == child


def test_trace_json_is_versioned():
    tr = gs_rollout(5)
    payload = tr.to_json()
    assert payload["schema"] == SCHEMA_VERSION
    payload["schema"] = SCHEMA_VERSION + 1
    with pytest.raises(ValueError, match="schema"):
        Trace.from_json(payload)


@settings(max_examples=30, deadline=None)
@given(
    env_id=st.sampled_from(["grass-sand", "floor-memory", "pick-up", "gated-room", "key-door"]),
    value=st.integers(min_value=0, max_value=2**32),
)
def test_rollouts_always_terminate_within_budget(env_id, value):
    agent = {"grass-sand": "grass-sand/A", "floor-memory": "floor-memory/a",
             "pick-up": "pick-up/B", "gated-room": "gated-room/red-lover",
             "key-door": "key-door/A"}[env_id]
    tr = rollout(EnvSpec.of(env_id), AgentSpec.of(agent), Seed(value))
    assert tr.complete
    assert len(tr.steps) <= step_budget(tr.final_world) + 1
