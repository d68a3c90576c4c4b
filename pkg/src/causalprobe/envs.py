"""The six shipped environments and the stepping engine.

Each environment declares its layout, seeded initial-state distribution,
visibility radius, and the set of editable fields interventions may touch.
`env_init`, `env_step`, `observe`, and `apply_edit` are the only entry points
the rest of the package uses.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable

import numpy as np

from causalprobe.gridworld import (
    DELTAS,
    FLOOR_KINDS,
    ITEM_NAMES,
    PILL_KINDS,
    Action,
    EnvSpec,
    Grid,
    IllegalEditError,
    Observation,
    Pos,
    TerminatedWorldError,
    Tile,
    UnknownEnvError,
    WorldState,
    window_at,
)
from causalprobe.seeds import Seed

_CHARS = {
    "#": Tile.WALL,
    ".": Tile.FLOOR,
    "O": Tile.GATE_OPEN,
    "C": Tile.GATE_CLOSED,
}

_OPPOSITE = {
    Action.UP: Action.DOWN,
    Action.DOWN: Action.UP,
    Action.LEFT: Action.RIGHT,
    Action.RIGHT: Action.LEFT,
    Action.NOOP: Action.NOOP,
}


def _parse_map(ascii_map: str) -> list[list[int]]:
    lines = [ln for ln in ascii_map.strip().splitlines()]
    return [[int(_CHARS[ch]) for ch in ln] for ln in lines]


def _freeze(rows: list[list[int]]) -> Grid:
    return tuple(tuple(row) for row in rows)


def _world(env_id: str, rows: list[list[int]], entities: dict[str, Pos], aux: dict[str, str] | None = None) -> WorldState:
    return WorldState(
        grid=_freeze(rows),
        entities=tuple(sorted(entities.items())),
        inventory=tuple(sorted((n, ()) for n in entities)),
        step_count=0,
        terminated=False,
        env_id=env_id,
        aux=tuple(sorted((aux or {}).items())),
    )


# ---------------------------------------------------------------------------
# grass-sand: T-maze with a latent coin correlating floor kind and pill side


_GRASS_SAND_MAP = """
#########
#.......#
####.####
####.####
####.####
####.####
#########
"""

GRASS_SAND_LEFT_END = (1, 1)
GRASS_SAND_RIGHT_END = (1, 7)
GRASS_SAND_START = (5, 4)


def _grass_sand_init(spec: EnvSpec, rng: np.random.Generator) -> WorldState:
    rows = _parse_map(_GRASS_SAND_MAP)
    coin = int(rng.integers(2))
    # coin 0: grass floor, pill in the left arm; coin 1: sand floor, pill right.
    # Floor kind and pill side are perfectly correlated by construction.
    kind = Tile.GRASS if coin == 0 else Tile.SAND
    for r, row in enumerate(rows):
        for c, t in enumerate(row):
            if t == int(Tile.FLOOR):
                rows[r][c] = int(kind)
    pill, empty = (GRASS_SAND_LEFT_END, GRASS_SAND_RIGHT_END) if coin == 0 else (GRASS_SAND_RIGHT_END, GRASS_SAND_LEFT_END)
    rows[pill[0]][pill[1]] = int(Tile.PILL)
    rows[empty[0]][empty[1]] = int(Tile.TERMINAL)
    return _world("grass-sand", rows, {"agent": GRASS_SAND_START})


def _grass_sand_floor_kind(world: WorldState, value: Any) -> WorldState:
    kind = {"grass": Tile.GRASS, "sand": Tile.SAND}.get(value)
    if kind is None:
        raise IllegalEditError(f"floor-kind must be grass or sand, got {value!r}")
    edits = [
        (r, c, kind)
        for r in range(world.rows)
        for c in range(world.cols)
        if world.grid[r][c] in (int(Tile.GRASS), int(Tile.SAND))
    ]
    return world.with_tiles(edits)


def _grass_sand_pill_side(world: WorldState, value: Any) -> WorldState:
    if value not in ("left", "right"):
        raise IllegalEditError(f"pill-side must be left or right, got {value!r}")
    pill, empty = (GRASS_SAND_LEFT_END, GRASS_SAND_RIGHT_END) if value == "left" else (GRASS_SAND_RIGHT_END, GRASS_SAND_LEFT_END)
    return world.with_tiles([(pill[0], pill[1], Tile.PILL), (empty[0], empty[1], Tile.TERMINAL)])


# ---------------------------------------------------------------------------
# floor-memory: wide corridor, cue on the start tile, radius-1 visibility


_FLOOR_MEMORY_MAP = """
#########
#.......#
###...###
###...###
###...###
###...###
###...###
###...###
#########
"""

FLOOR_MEMORY_LEFT_END = (1, 1)
FLOOR_MEMORY_RIGHT_END = (1, 7)
FLOOR_MEMORY_START = (7, 4)
FLOOR_MEMORY_LEFT_COL = 3
FLOOR_MEMORY_RIGHT_COL = 5


def _floor_memory_init(spec: EnvSpec, rng: np.random.Generator) -> WorldState:
    rows = _parse_map(_FLOOR_MEMORY_MAP)
    coin = int(rng.integers(2))
    # grass cue: reward at the left end; sand cue: reward at the right end
    cue = Tile.GRASS if coin == 0 else Tile.SAND
    pill, empty = (FLOOR_MEMORY_LEFT_END, FLOOR_MEMORY_RIGHT_END) if coin == 0 else (FLOOR_MEMORY_RIGHT_END, FLOOR_MEMORY_LEFT_END)
    rows[FLOOR_MEMORY_START[0]][FLOOR_MEMORY_START[1]] = int(cue)
    rows[pill[0]][pill[1]] = int(Tile.PILL)
    rows[empty[0]][empty[1]] = int(Tile.TERMINAL)
    return _world("floor-memory", rows, {"agent": FLOOR_MEMORY_START})


def _floor_memory_agent_side(world: WorldState, value: Any) -> WorldState:
    col = {"left": FLOOR_MEMORY_LEFT_COL, "right": FLOOR_MEMORY_RIGHT_COL}.get(value)
    if col is None:
        raise IllegalEditError(f"agent-side must be left or right, got {value!r}")
    r, _ = world.entity_pos("agent")
    if world.grid[r][col] == int(Tile.WALL):
        raise IllegalEditError(f"cannot push agent into a wall at {(r, col)}")
    return world.with_entity("agent", (r, col))


# ---------------------------------------------------------------------------
# pick-up: open room, pill quadrant is the variable of interest


_PICK_UP_MAP = """
#######
#.....#
#.....#
#.....#
#.....#
#.....#
#######
"""

PICK_UP_SIZE = 5  # interior side length; grid coords are interior + 1


def pickup_quadrant(pos: Pos) -> str:
    """Triangular quadrant of an interior cell, grid coordinates.

    The diagonals of the room split it into north, south, east, and west
    triangles. Cells exactly on a diagonal resolve south, then north, then
    west/east; the center resolves south but is excluded from sampling.
    """
    ir, ic = pos[0] - 1, pos[1] - 1
    d1 = ir - ic
    d2 = ir + ic - (PICK_UP_SIZE - 1)
    if d1 >= 0 and d2 >= 0:
        return "s"
    if d1 <= 0 and d2 <= 0:
        return "n"
    return "w" if d1 > 0 else "e"


def quadrant_cells(quadrant: str) -> list[Pos]:
    """Interior cells strictly inside a triangular quadrant (no diagonal cells)."""
    cells = []
    for r in range(1, PICK_UP_SIZE + 1):
        for c in range(1, PICK_UP_SIZE + 1):
            ir, ic = r - 1, c - 1
            d1 = ir - ic
            d2 = ir + ic - (PICK_UP_SIZE - 1)
            if d1 == 0 or d2 == 0:
                continue
            if {"s": d1 > 0 and d2 > 0, "n": d1 < 0 and d2 < 0, "w": d1 > 0 > d2, "e": d1 < 0 < d2}[quadrant]:
                cells.append((r, c))
    return cells


def _interior_cells() -> list[Pos]:
    return [(r, c) for r in range(1, PICK_UP_SIZE + 1) for c in range(1, PICK_UP_SIZE + 1)]


PICK_UP_CENTER = (PICK_UP_SIZE // 2 + 1, PICK_UP_SIZE // 2 + 1)


def _pick_up_init(spec: EnvSpec, rng: np.random.Generator) -> WorldState:
    rows = _parse_map(_PICK_UP_MAP)
    quadrant = spec.get("reward-quadrant", "s")
    if quadrant == "any":
        candidates = [p for p in _interior_cells() if p != PICK_UP_CENTER]
    else:
        candidates = quadrant_cells(quadrant)
        if not candidates:
            raise ValueError(f"unknown reward-quadrant {quadrant!r}")
    pill = candidates[int(rng.integers(len(candidates)))]
    rows[pill[0]][pill[1]] = int(Tile.PILL)
    starts = [p for p in _interior_cells() if p != pill]
    agent = starts[int(rng.integers(len(starts)))]
    return _world("pick-up", rows, {"agent": agent})


def _pick_up_pill_cell(world: WorldState, value: Any) -> WorldState:
    try:
        r, c = int(value[0]), int(value[1])
    except (TypeError, ValueError, IndexError):
        raise IllegalEditError(f"pill-cell expects [row, col], got {value!r}")
    if not (1 <= r <= PICK_UP_SIZE and 1 <= c <= PICK_UP_SIZE):
        raise IllegalEditError(f"pill-cell {(r, c)} outside the room")
    if (r, c) == world.entity_pos("agent"):
        raise IllegalEditError("cannot place the pill under the agent")
    edits = [
        (pr, pc, Tile.FLOOR)
        for pr in range(world.rows)
        for pc in range(world.cols)
        if world.grid[pr][pc] == int(Tile.PILL)
    ]
    edits.append((r, c, Tile.PILL))
    return world.with_tiles(edits)


# ---------------------------------------------------------------------------
# gated-room: two pill rooms behind two gates, one gate open per episode


_GATED_ROOM_MAP = """
###########
#...#.#...#
#...O.C...#
#...#.#...#
###########
"""

GATED_LEFT_GATE = (2, 4)
GATED_RIGHT_GATE = (2, 6)
GATED_START = (2, 5)
# (red, green) pill cells per room
GATED_LEFT_PILLS = ((1, 1), (3, 3))
GATED_RIGHT_PILLS = ((1, 9), (3, 7))


def _gated_room_init(spec: EnvSpec, rng: np.random.Generator) -> WorldState:
    rows = _parse_map(_GATED_ROOM_MAP)
    coin = int(rng.integers(2))  # 0: left gate open, 1: right gate open
    open_gate, closed_gate = (GATED_LEFT_GATE, GATED_RIGHT_GATE) if coin == 0 else (GATED_RIGHT_GATE, GATED_LEFT_GATE)
    rows[open_gate[0]][open_gate[1]] = int(Tile.GATE_OPEN)
    rows[closed_gate[0]][closed_gate[1]] = int(Tile.GATE_CLOSED)
    for (rr, rc), (gr, gc) in (GATED_LEFT_PILLS, GATED_RIGHT_PILLS):
        rows[rr][rc] = int(Tile.PILL_RED)
        rows[gr][gc] = int(Tile.PILL_GREEN)
    return _world("gated-room", rows, {"agent": GATED_START})


def _gated_room_open_gate(world: WorldState, value: Any) -> WorldState:
    if value not in ("left", "right"):
        raise IllegalEditError(f"open-gate must be left or right, got {value!r}")
    open_gate, closed_gate = (GATED_LEFT_GATE, GATED_RIGHT_GATE) if value == "left" else (GATED_RIGHT_GATE, GATED_LEFT_GATE)
    return world.with_tiles(
        [
            (open_gate[0], open_gate[1], Tile.GATE_OPEN),
            (closed_gate[0], closed_gate[1], Tile.GATE_CLOSED),
        ]
    )


# ---------------------------------------------------------------------------
# mimic: two entities in a corridor moving simultaneously each step


_MIMIC_MAP = """
#########
#.......#
#########
"""

MIMIC_BLUE_START = (1, 3)
MIMIC_RED_START = (1, 5)


def _mimic_init(spec: EnvSpec, rng: np.random.Generator) -> WorldState:
    rows = _parse_map(_MIMIC_MAP)
    aux: dict[str, str] = {}
    if spec.get("subject-role", "leader") == "imitator":
        # the env-internal npc is the leader; pre-commit its first move so the
        # imitator can read it before both moves are applied
        aux["npc-move"] = "left" if int(rng.integers(2)) == 0 else "right"
    return _world("mimic", rows, {"blue": MIMIC_BLUE_START, "red": MIMIC_RED_START}, aux)


def _mimic_npc_move(world: WorldState, value: Any) -> WorldState:
    if value not in ("up", "down", "left", "right", "no-op"):
        raise IllegalEditError(f"npc-move must name an action, got {value!r}")
    return world.with_aux("npc-move", value)


# ---------------------------------------------------------------------------
# key-door: room with a key, a door in the east wall, reward in an annex


_KEY_DOOR_MAP = """
##########
#.....####
#.....####
#.....C..#
#.....####
#.....####
##########
"""

KEY_DOOR_DOOR = (3, 6)
KEY_DOOR_PILL = (3, 8)
KEY_DOOR_ROOM = [(r, c) for r in range(1, 6) for c in range(1, 6)]


def _key_door_init(spec: EnvSpec, rng: np.random.Generator) -> WorldState:
    rows = _parse_map(_KEY_DOOR_MAP)
    coin = int(rng.integers(2))  # 0: door open, 1: door closed
    rows[KEY_DOOR_DOOR[0]][KEY_DOOR_DOOR[1]] = int(Tile.GATE_OPEN if coin == 0 else Tile.GATE_CLOSED)
    rows[KEY_DOOR_PILL[0]][KEY_DOOR_PILL[1]] = int(Tile.PILL)
    key = KEY_DOOR_ROOM[int(rng.integers(len(KEY_DOOR_ROOM)))]
    rows[key[0]][key[1]] = int(Tile.KEY)
    starts = [p for p in KEY_DOOR_ROOM if p != key]
    agent = starts[int(rng.integers(len(starts)))]
    return _world("key-door", rows, {"agent": agent})


def _key_door_door_state(world: WorldState, value: Any) -> WorldState:
    kind = {"open": Tile.GATE_OPEN, "closed": Tile.GATE_CLOSED}.get(value)
    if kind is None:
        raise IllegalEditError(f"door-state must be open or closed, got {value!r}")
    return world.with_tile(KEY_DOOR_DOOR[0], KEY_DOOR_DOOR[1], kind)


def _key_door_key_held(world: WorldState, value: Any) -> WorldState:
    if value not in ("yes", "no"):
        raise IllegalEditError(f"key-held must be yes or no, got {value!r}")
    w = world
    key_cells = [
        (r, c) for r in range(w.rows) for c in range(w.cols) if w.grid[r][c] == int(Tile.KEY)
    ]
    if key_cells:
        w = w.with_tiles([(r, c, Tile.FLOOR) for r, c in key_cells])
    items = [i for i in w.items_held("agent") if i != "key"]
    if value == "yes":
        items.append("key")
    return w.with_items("agent", tuple(items))


# ---------------------------------------------------------------------------
# registry and engine


@dataclass(frozen=True)
class EnvDef:
    env_id: str
    init: Callable[[EnvSpec, np.random.Generator], WorldState]
    visibility_radius: int | None  # None: full-grid visibility
    edits: dict[str, Callable[[WorldState, Any], WorldState]]
    key_opens_gates: bool = False
    subject: str = "agent"


ENVS: dict[str, EnvDef] = {
    d.env_id: d
    for d in (
        EnvDef(
            "grass-sand",
            _grass_sand_init,
            None,
            {"floor-kind": _grass_sand_floor_kind, "pill-side": _grass_sand_pill_side},
        ),
        EnvDef(
            "floor-memory",
            _floor_memory_init,
            1,
            {"agent-side": _floor_memory_agent_side},
        ),
        EnvDef("pick-up", _pick_up_init, None, {"pill-cell": _pick_up_pill_cell}),
        EnvDef("gated-room", _gated_room_init, None, {"open-gate": _gated_room_open_gate}),
        EnvDef("mimic", _mimic_init, None, {"npc-move": _mimic_npc_move}, subject="blue"),
        EnvDef(
            "key-door",
            _key_door_init,
            None,
            {"door-state": _key_door_door_state, "key-held": _key_door_key_held},
            key_opens_gates=True,
        ),
    )
}

ENV_IDS = tuple(ENVS)


def env_def(env_id: str) -> EnvDef:
    try:
        return ENVS[env_id]
    except KeyError:
        raise UnknownEnvError(env_id) from None


def subject_name(world_or_spec: WorldState | EnvSpec) -> str:
    return env_def(world_or_spec.env_id).subject


def step_budget(world: WorldState) -> int:
    """Hard episode cap: four times the grid area, enforced by a timeout
    terminal so every rollout ends within a known bound."""
    return 4 * world.rows * world.cols


def env_init(spec: EnvSpec, seed: Seed) -> WorldState:
    d = env_def(spec.env_id)
    return d.init(spec, seed.generator())


def observe(world: WorldState, spec: EnvSpec | None = None, entity: str | None = None) -> Observation:
    d = env_def(world.env_id)
    entity = entity or d.subject
    radius = d.visibility_radius
    if radius is None:
        radius = max(world.rows, world.cols) - 1
    window = window_at(world, world.entity_pos(entity), radius)
    extras: tuple[tuple[str, str], ...] = ()
    if world.env_id == "mimic" and spec is not None and spec.get("subject-role", "leader") == "imitator":
        committed = world.aux_get("npc-move")
        if committed is not None:
            extras = (("leader-move", committed),)
    reward = float(world.aux_get("last-reward") or 0.0)
    return Observation(window=window, reward=reward, terminal=world.terminated, extras=extras)


def _try_move(world: WorldState, name: str, action: Action, key_opens: bool) -> WorldState:
    r, c = world.entity_pos(name)
    dr, dc = DELTAS[action]
    nr, nc = r + dr, c + dc
    if not (0 <= nr < world.rows and 0 <= nc < world.cols):
        return world
    tile = Tile(world.grid[nr][nc])
    if tile == Tile.WALL:
        return world
    if tile == Tile.GATE_CLOSED:
        if key_opens and "key" in world.items_held(name):
            world = world.with_tile(nr, nc, Tile.GATE_OPEN)
        else:
            return world
    return world.with_entity(name, (nr, nc))


def env_step(world: WorldState, action: Action, seed: Seed, spec: EnvSpec | None = None) -> tuple[WorldState, Observation]:
    """Advance one transition. Raises TerminatedWorldError on ended worlds."""
    if world.terminated:
        raise TerminatedWorldError("cannot step a terminated world")
    d = env_def(world.env_id)
    action = Action(action)
    w = world.with_aux("last-reward", None)
    subject = d.subject

    if world.env_id == "mimic":
        w = _mimic_transition(w, action, seed, spec)
    else:
        w = _try_move(w, subject, action, d.key_opens_gates)

    # arrival effects on the subject's new tile
    r, c = w.entity_pos(subject)
    tile = Tile(w.grid[r][c])
    terminated = w.terminated
    if tile in PILL_KINDS:
        w = w.with_tile(r, c, Tile.FLOOR)
        w = w.with_items(subject, w.items_held(subject) + (ITEM_NAMES[tile],))
        w = w.with_aux("last-reward", "1")
        terminated = True
    elif tile == Tile.KEY:
        w = w.with_tile(r, c, Tile.FLOOR)
        w = w.with_items(subject, w.items_held(subject) + ("key",))
    elif tile == Tile.TERMINAL:
        terminated = True

    w = replace(w, step_count=w.step_count + 1, terminated=terminated)
    if not w.terminated and w.step_count >= step_budget(w):
        w = replace(w, terminated=True)
        w = w.with_aux("timeout", "1")
    return w, observe(w, spec)


def _mimic_transition(w: WorldState, action: Action, seed: Seed, spec: EnvSpec | None) -> WorldState:
    """Move both corridor entities simultaneously.

    The npc's move comes from the committed/forced value in aux when present;
    otherwise (npc is the imitator) it copies the subject's action with the
    match probability and takes the opposite move on the residual.
    """
    role = (spec.get("subject-role", "leader") if spec else "leader")
    match_rate = float(spec.get("match-rate", "0.9")) if spec else 0.9
    rng = None
    committed = w.aux_get("npc-move")
    if committed is not None:
        npc_action = _ACTION_NAMES[committed]
        w = w.with_aux("npc-move", None)
    else:
        rng = seed.generator()
        u = float(rng.random())
        npc_action = action if u < match_rate else _OPPOSITE[action]
    w = _try_move(w, "blue", action, False)
    w = _try_move(w, "red", npc_action, False)
    if role == "imitator":
        # pre-commit the env-leader's next move for the channel
        rng = rng or seed.generator()
        w = w.with_aux("npc-move", "left" if int(rng.integers(2)) == 0 else "right")
    return w


_ACTION_NAMES = {
    "up": Action.UP,
    "down": Action.DOWN,
    "left": Action.LEFT,
    "right": Action.RIGHT,
    "no-op": Action.NOOP,
}

ACTION_LABELS = {v: k for k, v in _ACTION_NAMES.items()}


def apply_edit(world: WorldState, path: tuple, value: Any) -> WorldState:
    """Apply a declared world edit. Anything else raises IllegalEditError."""
    if not path:
        raise IllegalEditError("empty edit path")
    d = env_def(world.env_id)
    head = path[0]
    if head == "tile":
        try:
            r, c = int(path[1]), int(path[2])
        except (IndexError, ValueError):
            raise IllegalEditError(f"tile path needs row and col, got {path!r}")
        if not (0 <= r < world.rows and 0 <= c < world.cols):
            raise IllegalEditError(f"tile {(r, c)} outside the grid")
        try:
            kind = Tile(int(value))
        except ValueError:
            raise IllegalEditError(f"bad tile value {value!r}")
        if kind == Tile.OOB:
            raise IllegalEditError("cannot place the out-of-bounds marker")
        if kind == Tile.WALL and any(p == (r, c) for _, p in world.entities):
            raise IllegalEditError(f"cannot wall over an entity at {(r, c)}")
        return world.with_tile(r, c, kind)
    if head == "entity":
        try:
            name = path[1]
            world.entity_pos(name)
        except (IndexError, KeyError):
            raise IllegalEditError(f"unknown entity in path {path!r}")
        try:
            r, c = int(value[0]), int(value[1])
        except (TypeError, ValueError, IndexError):
            raise IllegalEditError(f"entity edit expects [row, col], got {value!r}")
        if not (0 <= r < world.rows and 0 <= c < world.cols):
            raise IllegalEditError(f"position {(r, c)} outside the grid")
        if Tile(world.grid[r][c]) not in FLOOR_KINDS + (Tile.GATE_OPEN,):
            raise IllegalEditError(f"cannot place an entity on {Tile(world.grid[r][c]).name}")
        return world.with_entity(name, (r, c))
    if head == "inventory":
        try:
            name = path[1]
            world.entity_pos(name)
        except (IndexError, KeyError):
            raise IllegalEditError(f"unknown entity in path {path!r}")
        if not isinstance(value, (list, tuple)) or not all(isinstance(i, str) for i in value):
            raise IllegalEditError(f"inventory edit expects a list of item names, got {value!r}")
        return world.with_items(name, tuple(value))
    applier = d.edits.get(head)
    if applier is None:
        raise IllegalEditError(f"{world.env_id} has no editable field {head!r}")
    return applier(world, value)
