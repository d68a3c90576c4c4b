from collections import deque

import pytest

from causalprobe.envs import (
    ENV_IDS,
    GATED_LEFT_GATE,
    GATED_RIGHT_GATE,
    KEY_DOOR_DOOR,
    KEY_DOOR_PILL,
    apply_edit,
    env_init,
    env_step,
    observe,
    pickup_quadrant,
    quadrant_cells,
    step_budget,
)
from causalprobe.gridworld import (
    Action,
    EnvSpec,
    IllegalEditError,
    Observation,
    TerminatedWorldError,
    Tile,
    WorldState,
    canonical_dumps,
    locate_in_window,
)
from causalprobe.seeds import Seed


def init(env_id, value=0, **params):
    return env_init(EnvSpec.of(env_id, **params), Seed(value).child(1, 0))


# ---- determinism and serialization ----------------------------------------


@pytest.mark.parametrize("env_id", ENV_IDS)
def test_init_deterministic(env_id):
    assert init(env_id, 7) == init(env_id, 7)


@pytest.mark.parametrize("env_id", ENV_IDS)
def test_world_json_round_trip(env_id):
    w = init(env_id, 3)
    again = WorldState.from_json(w.to_json())
    assert again == w
    assert canonical_dumps(again.to_json()) == canonical_dumps(w.to_json())


def test_observation_json_round_trip():
    w = init("floor-memory", 5)
    o = observe(w)
    assert Observation.from_json(o.to_json()) == o


# ---- grass-sand -----------------------------------------------------------


def pill_cells(w):
    return [
        (r, c)
        for r in range(w.rows)
        for c in range(w.cols)
        if Tile(w.grid[r][c]) in (Tile.PILL, Tile.PILL_RED, Tile.PILL_GREEN)
    ]


def test_grass_sand_floor_and_pill_perfectly_correlated():
    # grass pairs with a left pill and sand with a right pill, for every seed
    for v in range(200):
        w = init("grass-sand", v)
        start = w.entity_pos("agent")
        floor = Tile(w.grid[start[0]][start[1]])
        (pr, pc), = pill_cells(w)
        side = "left" if pc < 4 else "right"
        assert (floor, side) in ((Tile.GRASS, "left"), (Tile.SAND, "right"))


def test_grass_sand_both_configs_occur():
    floors = {Tile(init("grass-sand", v).grid[5][4]) for v in range(32)}
    assert floors == {Tile.GRASS, Tile.SAND}


def test_grass_sand_edits():
    w = init("grass-sand", 1)
    w2 = apply_edit(w, ("floor-kind",), "grass")
    assert Tile(w2.grid[5][4]) == Tile.GRASS
    w3 = apply_edit(w2, ("pill-side",), "right")
    assert pill_cells(w3) == [(1, 7)]
    assert Tile(w3.grid[1][1]) == Tile.TERMINAL
    # writing the value already present is a no-op edit
    assert apply_edit(w3, ("pill-side",), "right") == w3


# ---- movement, pickup, termination ----------------------------------------


def test_walls_block():
    w = init("grass-sand", 0)
    w2, _ = env_step(w, Action.LEFT, Seed(0).child(2, 2))  # wall to the left of the stem
    assert w2.entity_pos("agent") == w.entity_pos("agent")
    assert w2.step_count == 1


def test_pill_pickup_terminates_with_reward():
    w = init("pick-up", 11)
    # walk the agent onto the pill along a straight line by editing it adjacent
    (pr, pc), = pill_cells(w)
    target = (pr - 1, pc) if pr > 1 else (pr + 1, pc)
    w = apply_edit(w, ("entity", "agent"), list(target))
    action = Action.DOWN if target[0] < pr else Action.UP
    w2, obs = env_step(w, action, Seed(1).child(2, 2))
    assert w2.terminated
    assert obs.reward == 1.0
    assert obs.terminal
    assert "pill" in w2.items_held("agent")
    assert pill_cells(w2) == []


def test_step_on_terminated_world_raises():
    w = init("pick-up", 11)
    (pr, pc), = pill_cells(w)
    target = (pr - 1, pc) if pr > 1 else (pr + 1, pc)
    w = apply_edit(w, ("entity", "agent"), list(target))
    action = Action.DOWN if target[0] < pr else Action.UP
    w2, _ = env_step(w, action, Seed(1).child(2, 2))
    with pytest.raises(TerminatedWorldError):
        env_step(w2, Action.NOOP, Seed(1).child(3, 2))


def test_timeout_terminal_within_budget():
    w = init("grass-sand", 0)
    budget = step_budget(w)
    t = 2
    while not w.terminated:
        assert w.step_count < budget
        w, _ = env_step(w, Action.NOOP, Seed(0).child(t, 2))
        t += 1
    assert w.step_count == budget
    assert w.aux_get("timeout") == "1"


# ---- gated-room and key-door ----------------------------------------------


def test_gated_room_exactly_one_gate_open():
    seen = set()
    for v in range(40):
        w = init("gated-room", v)
        states = (Tile(w.grid[2][4]), Tile(w.grid[2][6]))
        assert sorted(s.name for s in states) == ["GATE_CLOSED", "GATE_OPEN"]
        seen.add(states[0])
    assert seen == {Tile.GATE_OPEN, Tile.GATE_CLOSED}


def test_closed_gate_blocks_without_key():
    w = init("gated-room", 0)
    closed = GATED_LEFT_GATE if Tile(w.grid[2][4]) == Tile.GATE_CLOSED else GATED_RIGHT_GATE
    step_toward = Action.LEFT if closed == GATED_LEFT_GATE else Action.RIGHT
    w2, _ = env_step(w, step_toward, Seed(0).child(2, 2))
    assert w2.entity_pos("agent") == w.entity_pos("agent")


def test_key_opens_door_in_key_door():
    w = init("key-door", 0)
    w = apply_edit(w, ("door-state",), "closed")
    w = apply_edit(w, ("key-held",), "yes")
    w = apply_edit(w, ("entity", "agent"), [3, 5])
    w2, _ = env_step(w, Action.RIGHT, Seed(0).child(2, 2))
    assert w2.entity_pos("agent") == KEY_DOOR_DOOR
    assert Tile(w2.grid[KEY_DOOR_DOOR[0]][KEY_DOOR_DOOR[1]]) == Tile.GATE_OPEN
    assert "key" in w2.items_held("agent")


def test_key_pickup_goes_to_inventory():
    w = init("key-door", 2)
    key_cells = [
        (r, c) for r in range(w.rows) for c in range(w.cols) if Tile(w.grid[r][c]) == Tile.KEY
    ]
    assert len(key_cells) == 1
    (kr, kc) = key_cells[0]
    neighbor = (kr, kc - 1) if kc > 1 else (kr, kc + 1)
    w = apply_edit(w, ("entity", "agent"), list(neighbor))
    action = Action.RIGHT if neighbor[1] < kc else Action.LEFT
    w2, obs = env_step(w, action, Seed(2).child(2, 2))
    assert "key" in w2.items_held("agent")
    assert not w2.terminated
    assert obs.reward == 0.0


def bfs_reachable(w, start, passable):
    seen = {start}
    q = deque([start])
    while q:
        r, c = q.popleft()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nxt = (r + dr, c + dc)
            if nxt in seen or not (0 <= nxt[0] < w.rows and 0 <= nxt[1] < w.cols):
                continue
            if Tile(w.grid[nxt[0]][nxt[1]]) in passable:
                seen.add(nxt)
                q.append(nxt)
    return seen


def test_key_door_layout_reachability():
    # independent layout oracle: the key is always reachable, and the reward
    # annex is reachable without the key exactly when the door starts open
    open_tiles = {Tile.FLOOR, Tile.GRASS, Tile.SAND, Tile.GATE_OPEN, Tile.KEY, Tile.PILL}
    for v in range(60):
        w = init("key-door", v)
        reach = bfs_reachable(w, w.entity_pos("agent"), open_tiles)
        door_open = Tile(w.grid[KEY_DOOR_DOOR[0]][KEY_DOOR_DOOR[1]]) == Tile.GATE_OPEN
        key_cell = next(
            (r, c) for r in range(w.rows) for c in range(w.cols) if Tile(w.grid[r][c]) == Tile.KEY
        )
        assert key_cell in reach
        assert (KEY_DOOR_PILL in reach) == door_open


# ---- pick-up quadrants ----------------------------------------------------


def test_quadrant_cells_partition_off_diagonal_cells():
    all_cells = [quadrant_cells(q) for q in "nsew"]
    flat = [p for cells in all_cells for p in cells]
    assert len(flat) == len(set(flat)) == 16
    assert all(len(cells) == 4 for cells in all_cells)
    for q, cells in zip("nsew", all_cells):
        assert all(pickup_quadrant(p) == q for p in cells)


def test_quadrant_total_over_interior():
    for r in range(1, 6):
        for c in range(1, 6):
            assert pickup_quadrant((r, c)) in "nsew"


def test_pick_up_init_respects_quadrant_param():
    for v in range(30):
        w = init("pick-up", v, **{"reward-quadrant": "n"})
        (cell,) = pill_cells(w)
        assert cell in quadrant_cells("n")
    for v in range(30):
        w = init("pick-up", v)
        (cell,) = pill_cells(w)
        assert cell in quadrant_cells("s")


# ---- observations ---------------------------------------------------------


def test_floor_memory_radius_one_window():
    w = init("floor-memory", 0)
    o = observe(w)
    assert len(o.window) == 3 and len(o.window[0]) == 3
    # the cue sits under the agent at the start
    assert Tile(o.window[1][1]) in (Tile.GRASS, Tile.SAND)


def test_full_visibility_window_contains_grid_and_localizes():
    for env_id in ("grass-sand", "pick-up", "key-door", "gated-room", "mimic"):
        w = init(env_id, 9)
        o = observe(w)
        pos, radius = locate_in_window(o.window)
        assert pos == w.entity_pos("agent" if env_id != "mimic" else "blue")
        assert len(o.window) == 2 * radius + 1
        non_oob = sum(1 for row in o.window for t in row if t != int(Tile.OOB))
        assert non_oob == w.rows * w.cols


def test_oob_padding_at_edges():
    w = init("pick-up", 1)
    w = apply_edit(w, ("entity", "agent"), [1, 1]) if w.entity_pos("agent") != (1, 1) and (1, 1) not in pill_cells(w) else w
    o = observe(w)
    assert int(Tile.OOB) in {t for row in o.window for t in row}


# ---- mimic ----------------------------------------------------------------


def test_mimic_entities_may_share_a_tile():
    w = init("mimic", 0)
    w = apply_edit(w, ("entity", "red"), [1, 4])
    w = apply_edit(w, ("entity", "blue"), [1, 3])
    w2, _ = env_step(w, Action.RIGHT, Seed(0).child(2, 2), EnvSpec.of("mimic"))
    # whichever way the npc went, a shared tile is legal
    assert w2.entity_pos("blue") == (1, 4)
    assert w2.entity_pos("red") in ((1, 3), (1, 5))


def test_mimic_forced_npc_move_is_consumed():
    w = init("mimic", 0)
    w = apply_edit(w, ("npc-move",), "left")
    w2, _ = env_step(w, Action.RIGHT, Seed(0).child(2, 2), EnvSpec.of("mimic"))
    assert w2.entity_pos("red") == (1, 4)
    assert w2.aux_get("npc-move") is None


def test_mimic_imitator_subject_sees_committed_leader_move():
    spec = EnvSpec.of("mimic", **{"subject-role": "imitator"})
    w = env_init(spec, Seed(4).child(1, 0))
    assert w.aux_get("npc-move") in ("left", "right")
    o = observe(w, spec)
    assert o.extras_get("leader-move") == w.aux_get("npc-move")
    w2, o2 = env_step(w, Action.LEFT, Seed(4).child(2, 2), spec)
    # a fresh move is committed for the next transition
    assert w2.aux_get("npc-move") in ("left", "right")
    assert o2.extras_get("leader-move") == w2.aux_get("npc-move")


# ---- edits ----------------------------------------------------------------


def test_illegal_edits_raise():
    w = init("grass-sand", 0)
    with pytest.raises(IllegalEditError):
        apply_edit(w, ("door-state",), "open")  # not a grass-sand field
    with pytest.raises(IllegalEditError):
        apply_edit(w, ("entity", "ghost"), [1, 1])
    with pytest.raises(IllegalEditError):
        apply_edit(w, ("entity", "agent"), [0, 0])  # wall cell
    with pytest.raises(IllegalEditError):
        apply_edit(w, ("tile", 0, 0), 99)
    with pytest.raises(IllegalEditError):
        apply_edit(w, ("floor-kind",), "lava")
    with pytest.raises(IllegalEditError):
        apply_edit(w, (), None)


def test_tile_edit_cannot_wall_over_entity():
    w = init("grass-sand", 0)
    r, c = w.entity_pos("agent")
    with pytest.raises(IllegalEditError):
        apply_edit(w, ("tile", r, c), int(Tile.WALL))


def test_inventory_edit():
    w = init("key-door", 0)
    w2 = apply_edit(w, ("inventory", "agent"), ["key"])
    assert w2.items_held("agent") == ("key",)
