"""Scripted stock agents, one family per environment.

Every agent is a pure function of (spec, memory, observation, seed). The
policies are deliberately simple rule sets; what matters for the analysis
workbench is that their behavioral signatures differ in ways the causal
queries can pick apart, not that they are competent in any deeper sense.

A small execution-noise rate applies to all of them: with probability
``slip`` the intended action is replaced by a uniformly random move. This
keeps estimated tables away from hard zeros and ones.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterable

import numpy as np

from causalprobe.envs import KEY_DOOR_DOOR
from causalprobe.gridworld import (
    DELTAS,
    FLOOR_KINDS,
    MOVES,
    PILL_KINDS,
    Action,
    Grid,
    Observation,
    Pos,
    Tile,
    locate_in_window,
)
from causalprobe.seeds import Seed


class UnknownAgentError(KeyError):
    pass


@dataclass(frozen=True)
class MemoryState:
    """The agent's internal state: a small set of named string slots."""

    slots: tuple[tuple[str, str], ...] = ()

    @classmethod
    def empty(cls) -> "MemoryState":
        return cls()

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.slots:
            if k == key:
                return v
        return default

    def with_slot(self, key: str, value: str | None) -> "MemoryState":
        kept = [(k, v) for k, v in self.slots if k != key]
        if value is not None:
            kept.append((key, value))
        return MemoryState(tuple(sorted(kept)))

    def to_json(self) -> dict:
        return {"slots": dict(self.slots)}

    @classmethod
    def from_json(cls, data: dict) -> "MemoryState":
        return cls(tuple(sorted((str(k), str(v)) for k, v in data["slots"].items())))


@dataclass(frozen=True)
class AgentSpec:
    """Names a stock agent plus its behavior parameters.

    params is a sorted tuple of (key, value) string pairs. Common keys:
    ``slip`` (execution-noise rate), ``match-rate`` (imitator copy
    probability), ``opportunism`` (side-trip probability for key-door/A).
    """

    agent_id: str
    params: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, agent_id: str, **params: Any) -> "AgentSpec":
        return cls(agent_id, tuple(sorted((k, str(v)) for k, v in params.items())))

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def to_json(self) -> dict:
        return {"agent-id": self.agent_id, "params": dict(self.params)}

    @classmethod
    def from_json(cls, data: dict) -> "AgentSpec":
        return cls(data["agent-id"], tuple(sorted((str(k), str(v)) for k, v in data["params"].items())))


Policy = Callable[[AgentSpec, MemoryState, Observation, np.random.Generator], tuple[MemoryState, Action]]


# ---------------------------------------------------------------------------
# view reconstruction and path finding


def absolute_view(obs: Observation) -> tuple[Grid, Pos]:
    """Recover the absolute grid and the observer's position from a
    full-visibility window. Only valid when the whole grid fits in view."""
    pos, radius = locate_in_window(obs.window)
    top, left = radius - pos[0], radius - pos[1]
    inner = [row[left:] for row in obs.window[top:]]
    n_cols = 0
    for t in inner[0]:
        if t == int(Tile.OOB):
            break
        n_cols += 1
    rows = []
    for row in inner:
        if row[0] == int(Tile.OOB):
            break
        rows.append(row[:n_cols])
    return tuple(rows), pos


def find_tiles(grid: Grid, kinds: Iterable[Tile]) -> list[Pos]:
    wanted = {int(k) for k in kinds}
    return [
        (r, c)
        for r in range(len(grid))
        for c in range(len(grid[0]))
        if grid[r][c] in wanted
    ]


_SEEK_FLOORS = frozenset(int(t) for t in FLOOR_KINDS) | {int(Tile.GATE_OPEN)}


def bfs_first_action(grid: Grid, start: Pos, goals: set[Pos], passable: frozenset[int]) -> Action | None:
    """First move of a shortest path from start to the nearest goal.

    Goal cells are enterable even when their tile kind is not passable.
    Ties resolve by breadth-first discovery order, which scans moves in the
    canonical action order, so the result is deterministic. Returns None
    when no goal is reachable and NOOP when already standing on one.
    """
    if start in goals:
        return Action.NOOP
    first: dict[Pos, Action | None] = {start: None}
    queue: deque[Pos] = deque([start])
    while queue:
        cur = queue.popleft()
        for a in MOVES:
            dr, dc = DELTAS[a]
            nxt = (cur[0] + dr, cur[1] + dc)
            if nxt in first:
                continue
            if not (0 <= nxt[0] < len(grid) and 0 <= nxt[1] < len(grid[0])):
                continue
            if grid[nxt[0]][nxt[1]] not in passable and nxt not in goals:
                continue
            first[nxt] = a if first[cur] is None else first[cur]
            if nxt in goals:
                return first[nxt]
            queue.append(nxt)
    return None


def bfs_dist(grid: Grid, start: Pos, goals: set[Pos], passable: frozenset[int]) -> int | None:
    if start in goals:
        return 0
    dist: dict[Pos, int] = {start: 0}
    queue: deque[Pos] = deque([start])
    while queue:
        cur = queue.popleft()
        for a in MOVES:
            dr, dc = DELTAS[a]
            nxt = (cur[0] + dr, cur[1] + dc)
            if nxt in dist:
                continue
            if not (0 <= nxt[0] < len(grid) and 0 <= nxt[1] < len(grid[0])):
                continue
            if grid[nxt[0]][nxt[1]] not in passable and nxt not in goals:
                continue
            dist[nxt] = dist[cur] + 1
            if nxt in goals:
                return dist[nxt]
            queue.append(nxt)
    return None


def _or_noop(action: Action | None) -> Action:
    return action if action is not None else Action.NOOP


# ---------------------------------------------------------------------------
# grass-sand


def _grass_sand_reactive(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Walks up the stem, then turns by the floor kind it currently sees:
    grass means left, sand means right. Never looks at the reward."""
    grid, (r, c) = absolute_view(obs)
    if Tile(grid[r - 1][c]) != Tile.WALL:
        return memory, Action.UP
    kinds = {t for row in grid for t in row}
    return memory, (Action.LEFT if int(Tile.GRASS) in kinds else Action.RIGHT)


def _pill_seeker(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Shortest path to the reward, ignoring everything else."""
    grid, pos = absolute_view(obs)
    pills = find_tiles(grid, PILL_KINDS)
    if not pills:
        return memory, Action.NOOP
    return memory, _or_noop(bfs_first_action(grid, pos, {pills[0]}, _SEEK_FLOORS))


# ---------------------------------------------------------------------------
# floor-memory (visibility radius 1; policies work on the raw 3x3 window)


def _junction_turn(window) -> Action:
    """Turn direction at the top of the corridor, read from the local wall
    pattern: a wall diagonally below on one side means the corridor ascended
    along that side."""
    if window[2][0] == int(Tile.WALL):
        return Action.LEFT
    if window[2][2] == int(Tile.WALL):
        return Action.RIGHT
    return Action.LEFT


def _floor_memory_memory(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Stores the cue under its feet once, then replays it at the junction."""
    w = obs.window
    center = Tile(w[1][1])
    if center in (Tile.GRASS, Tile.SAND) and memory.get("cue") is None:
        side = "left" if center == Tile.GRASS else "right"
        return memory.with_slot("cue", side), (Action.LEFT if side == "left" else Action.RIGHT)
    if w[0][1] != int(Tile.WALL):
        return memory, Action.UP
    cue = memory.get("cue")
    if cue is None:
        return memory, _junction_turn(w)
    return memory, (Action.LEFT if cue == "left" else Action.RIGHT)


def _floor_memory_stimulus(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Same trajectory as the memory agent on undisturbed episodes, but every
    decision is a function of the current window alone."""
    w = obs.window
    center = Tile(w[1][1])
    if center in (Tile.GRASS, Tile.SAND):
        return memory, (Action.LEFT if center == Tile.GRASS else Action.RIGHT)
    if w[0][1] != int(Tile.WALL):
        return memory, Action.UP
    return memory, _junction_turn(w)


# ---------------------------------------------------------------------------
# pick-up


PICK_UP_REGION = frozenset((r, c) for r in range(3, 6) for c in range(1, 6))
PICK_UP_HAUNT = (5, 3)

_WALK_FLOORS = frozenset(int(t) for t in FLOOR_KINDS)


def _pick_up_habitual(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Searches only its habitual southern patch of the room. Rewards inside
    the patch are fetched directly; rewards outside it are never pursued."""
    grid, pos = absolute_view(obs)
    pills = find_tiles(grid, PILL_KINDS)
    if pills and pills[0] in PICK_UP_REGION:
        return memory, _or_noop(bfs_first_action(grid, pos, {pills[0]}, _SEEK_FLOORS))
    if pos not in PICK_UP_REGION:
        return memory, _or_noop(bfs_first_action(grid, pos, {PICK_UP_HAUNT}, _WALK_FLOORS))
    options = []
    for a in MOVES:
        dr, dc = DELTAS[a]
        nxt = (pos[0] + dr, pos[1] + dc)
        if nxt in PICK_UP_REGION and grid[nxt[0]][nxt[1]] in _WALK_FLOORS:
            options.append(a)
    if not options:
        return memory, Action.NOOP
    return memory, options[int(rng.integers(len(options)))]


# ---------------------------------------------------------------------------
# gated-room


def _pill_lover(kind: Tile) -> Policy:
    def policy(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
        grid, pos = absolute_view(obs)
        goals = set(find_tiles(grid, (kind,)))
        if not goals:
            return memory, Action.NOOP
        return memory, _or_noop(bfs_first_action(grid, pos, goals, _SEEK_FLOORS))

    return policy


# ---------------------------------------------------------------------------
# mimic


def _mimic_leader(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    return memory, (Action.LEFT if int(rng.integers(2)) == 0 else Action.RIGHT)


def _mimic_imitator(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Copies the leader's committed move with the match probability and
    takes the opposite move on the residual."""
    leader = obs.extras_get("leader-move")
    if leader is None:
        return memory, (Action.LEFT if int(rng.integers(2)) == 0 else Action.RIGHT)
    intended = Action.LEFT if leader == "left" else Action.RIGHT
    if float(rng.random()) >= float(spec.get("match-rate", "0.9")):
        intended = Action.RIGHT if intended == Action.LEFT else Action.LEFT
    return memory, intended


# ---------------------------------------------------------------------------
# key-door


def _key_door_policy(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator, habitual: bool) -> tuple[MemoryState, Action]:
    grid, pos = absolute_view(obs)
    keys = find_tiles(grid, (Tile.KEY,))
    key = keys[0] if keys else None
    pills = find_tiles(grid, PILL_KINDS)
    plan = memory.get("plan")
    if plan is None:
        plan = _key_door_plan(spec, grid, pos, key, rng, habitual)
        memory = memory.with_slot("plan", plan)
    if plan == "via-key" and key is not None:
        return memory, _or_noop(bfs_first_action(grid, pos, {key}, _SEEK_FLOORS))
    if not pills:
        return memory, Action.NOOP
    passable = _SEEK_FLOORS
    if key is None:
        # no key tile left in the world means it is in hand; a held key
        # opens the door on contact, so treat the closed door as passable
        passable = passable | {int(Tile.GATE_CLOSED)}
    return memory, _or_noop(bfs_first_action(grid, pos, {pills[0]}, passable))


def _key_door_plan(spec: AgentSpec, grid: Grid, pos: Pos, key: Pos | None, rng: np.random.Generator, habitual: bool) -> str:
    if habitual or key is None:
        return "via-key"
    if Tile(grid[KEY_DOOR_DOOR[0]][KEY_DOOR_DOOR[1]]) == Tile.GATE_CLOSED:
        return "via-key"
    # the door is open: fetch the key only when it costs little. Distances
    # treat the door as passable; the question is purely geometric.
    wide = _SEEK_FLOORS | {int(Tile.GATE_CLOSED), int(Tile.KEY)}
    door = {KEY_DOOR_DOOR}
    through = bfs_dist(grid, pos, {key}, wide) + bfs_dist(grid, key, door, wide)
    straight = bfs_dist(grid, pos, door, wide)
    detour = through - straight
    if detour == 0:
        return "via-key"
    if detour <= 4 and float(rng.random()) < float(spec.get("opportunism", "0.5")):
        return "via-key"
    return "direct"


def _key_door_opportunist(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Heads for the reward, picking the key up only when the door is closed
    or the side trip is cheap. The commitment is made once and kept."""
    return _key_door_policy(spec, memory, obs, rng, habitual=False)


def _key_door_habitual(spec: AgentSpec, memory: MemoryState, obs: Observation, rng: np.random.Generator) -> tuple[MemoryState, Action]:
    """Always fetches the key first, whatever the door is doing."""
    return _key_door_policy(spec, memory, obs, rng, habitual=True)


# ---------------------------------------------------------------------------
# registry and entry points


_POLICIES: dict[str, Policy] = {
    "grass-sand/A": _grass_sand_reactive,
    "grass-sand/B": _pill_seeker,
    "floor-memory/a": _floor_memory_memory,
    "floor-memory/b": _floor_memory_stimulus,
    "pick-up/A": _pill_seeker,
    "pick-up/B": _pick_up_habitual,
    "gated-room/red-lover": _pill_lover(Tile.PILL_RED),
    "gated-room/green-lover": _pill_lover(Tile.PILL_GREEN),
    "mimic/leader": _mimic_leader,
    "mimic/imitator": _mimic_imitator,
    "key-door/A": _key_door_opportunist,
    "key-door/B": _key_door_habitual,
}

AGENT_IDS = tuple(_POLICIES)


def agent_policy(agent_id: str) -> Policy:
    try:
        return _POLICIES[agent_id]
    except KeyError:
        raise UnknownAgentError(agent_id) from None


def agent_init(spec: AgentSpec, seed: Seed) -> MemoryState:
    """Initial internal state. Nothing in the stock roster starts with
    content, but the hook is part of the loop contract."""
    agent_policy(spec.agent_id)
    return MemoryState.empty()


def agent_act(spec: AgentSpec, memory: MemoryState, obs: Observation, seed: Seed) -> tuple[MemoryState, Action]:
    """One decision: returns the successor memory and the executed action.

    The policy draws first, then the slip coin, so a given (inputs, seed)
    pair always produces the same outcome.
    """
    if obs.terminal:
        return memory, Action.NOOP
    policy = agent_policy(spec.agent_id)
    rng = seed.generator()
    memory, intended = policy(spec, memory, obs, rng)
    slip = float(spec.get("slip", "0.005") or 0.0)
    if slip > 0.0 and float(rng.random()) < slip:
        intended = MOVES[int(rng.integers(len(MOVES)))]
    return memory, intended
