"""Grid world core types: tiles, actions, world snapshots, observations.

World snapshots are immutable and hash/compare by value, which is what the
branching simulator leans on for its bitwise prefix guarantees. Everything
serializes to canonical JSON (sorted keys, compact separators) so equal
states produce equal bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Any, Iterable, Mapping


class Tile(IntEnum):
    WALL = 0
    FLOOR = 1
    GRASS = 2
    SAND = 3
    GATE_OPEN = 4
    GATE_CLOSED = 5
    KEY = 6
    PILL = 7
    PILL_RED = 8
    PILL_GREEN = 9
    TERMINAL = 10
    OOB = 11  # observation padding outside the grid, never stored in a world


FLOOR_KINDS = (Tile.FLOOR, Tile.GRASS, Tile.SAND)
PILL_KINDS = (Tile.PILL, Tile.PILL_RED, Tile.PILL_GREEN)

# inventory item names for pickup tiles
ITEM_NAMES = {
    Tile.KEY: "key",
    Tile.PILL: "pill",
    Tile.PILL_RED: "pill:red",
    Tile.PILL_GREEN: "pill:green",
}


class Action(IntEnum):
    """Movement alphabet. The integer order is the canonical total order used
    for deterministic tie-breaking everywhere."""

    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    NOOP = 4


DELTAS = {
    Action.UP: (-1, 0),
    Action.DOWN: (1, 0),
    Action.LEFT: (0, -1),
    Action.RIGHT: (0, 1),
    Action.NOOP: (0, 0),
}

MOVES = (Action.UP, Action.DOWN, Action.LEFT, Action.RIGHT)


class TerminatedWorldError(Exception):
    """Raised when stepping a world whose episode already ended."""


class IllegalEditError(Exception):
    """Raised for world edits outside the declared editable fields."""


class UnknownEnvError(KeyError):
    pass


def canonical_dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, no whitespace. Equal values, equal bytes."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


Pos = tuple[int, int]
Grid = tuple[tuple[int, ...], ...]


def _freeze_pairs(m: Mapping[str, Any] | Iterable[tuple[str, Any]]) -> tuple:
    items = m.items() if isinstance(m, Mapping) else m
    return tuple(sorted((str(k), v) for k, v in items))


@dataclass(frozen=True)
class WorldState:
    grid: Grid
    entities: tuple[tuple[str, Pos], ...]  # sorted by entity name
    inventory: tuple[tuple[str, tuple[str, ...]], ...]  # entity -> held items
    step_count: int
    terminated: bool
    env_id: str
    aux: tuple[tuple[str, str], ...] = ()  # env-specific annotations

    @property
    def rows(self) -> int:
        return len(self.grid)

    @property
    def cols(self) -> int:
        return len(self.grid[0])

    def tile(self, r: int, c: int) -> Tile:
        return Tile(self.grid[r][c])

    def entity_pos(self, name: str) -> Pos:
        for n, pos in self.entities:
            if n == name:
                return pos
        raise KeyError(name)

    def items_held(self, name: str) -> tuple[str, ...]:
        for n, items in self.inventory:
            if n == name:
                return items
        return ()

    def aux_get(self, key: str) -> str | None:
        for k, v in self.aux:
            if k == key:
                return v
        return None

    # ---- functional updates ----------------------------------------------

    def with_tile(self, r: int, c: int, kind: Tile) -> "WorldState":
        row = self.grid[r][:c] + (int(kind),) + self.grid[r][c + 1 :]
        return replace(self, grid=self.grid[:r] + (row,) + self.grid[r + 1 :])

    def with_tiles(self, edits: Iterable[tuple[int, int, Tile]]) -> "WorldState":
        rows = [list(row) for row in self.grid]
        for r, c, kind in edits:
            rows[r][c] = int(kind)
        return replace(self, grid=tuple(tuple(row) for row in rows))

    def with_entity(self, name: str, pos: Pos) -> "WorldState":
        ents = tuple((n, pos if n == name else p) for n, p in self.entities)
        if name not in dict(ents):
            ents = tuple(sorted(ents + ((name, pos),)))
        return replace(self, entities=ents)

    def with_items(self, name: str, items: tuple[str, ...]) -> "WorldState":
        inv = dict(self.inventory)
        inv[name] = tuple(items)
        return replace(self, inventory=_freeze_pairs(inv))

    def with_aux(self, key: str, value: str | None) -> "WorldState":
        aux = dict(self.aux)
        if value is None:
            aux.pop(key, None)
        else:
            aux[key] = value
        return replace(self, aux=_freeze_pairs(aux))

    # ---- serialization ----------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "grid": [list(row) for row in self.grid],
            "entities": {n: list(p) for n, p in self.entities},
            "inventory": {n: list(items) for n, items in self.inventory},
            "step_count": self.step_count,
            "terminated": self.terminated,
            "env_id": self.env_id,
            "aux": dict(self.aux),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "WorldState":
        return cls(
            grid=tuple(tuple(int(t) for t in row) for row in data["grid"]),
            entities=tuple(sorted((n, (int(p[0]), int(p[1]))) for n, p in data["entities"].items())),
            inventory=tuple(sorted((n, tuple(items)) for n, items in data["inventory"].items())),
            step_count=int(data["step_count"]),
            terminated=bool(data["terminated"]),
            env_id=data["env_id"],
            aux=tuple(sorted((k, v) for k, v in data["aux"].items())),
        )


@dataclass(frozen=True)
class Observation:
    """Egocentric tile window plus the scalar feedback channel.

    The window is (2r+1) x (2r+1), centered on the observing entity; cells
    outside the grid carry Tile.OOB. `extras` is an environment-mediated side
    channel (only mimic uses it, to expose the leader's committed move).
    """

    window: Grid
    reward: float
    terminal: bool
    extras: tuple[tuple[str, str], ...] = ()

    @property
    def radius(self) -> int:
        return (len(self.window) - 1) // 2

    def extras_get(self, key: str) -> str | None:
        for k, v in self.extras:
            if k == key:
                return v
        return None

    def to_json(self) -> dict[str, Any]:
        return {
            "window": [list(row) for row in self.window],
            "reward": self.reward,
            "terminal": self.terminal,
            "extras": dict(self.extras),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Observation":
        return cls(
            window=tuple(tuple(int(t) for t in row) for row in data["window"]),
            reward=float(data["reward"]),
            terminal=bool(data["terminal"]),
            extras=tuple(sorted((k, v) for k, v in data["extras"].items())),
        )


@dataclass(frozen=True)
class EnvSpec:
    """Names an environment plus its layout parameters.

    params is a sorted tuple of (key, value) string pairs; unknown keys are
    rejected by the environment definitions at init time.
    """

    env_id: str
    params: tuple[tuple[str, str], ...] = ()

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def to_json(self) -> dict[str, Any]:
        return {"env_id": self.env_id, "params": dict(self.params)}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "EnvSpec":
        return cls(data["env_id"], _freeze_pairs(data.get("params", {})))

    @classmethod
    def of(cls, env_id: str, **params: str) -> "EnvSpec":
        return cls(env_id, _freeze_pairs(params))


def window_at(world: WorldState, center: Pos, radius: int) -> Grid:
    """Cut the egocentric window, padding out-of-grid cells with OOB."""
    r0, c0 = center
    size = 2 * radius + 1
    oob = int(Tile.OOB)
    oob_row = (oob,) * size
    lo, hi = c0 - radius, c0 + radius + 1
    lpad = (oob,) * max(0, -lo)
    rpad = (oob,) * max(0, hi - world.cols)
    rows = []
    for r in range(r0 - radius, r0 + radius + 1):
        if 0 <= r < world.rows:
            rows.append(lpad + world.grid[r][max(0, lo) : min(world.cols, hi)] + rpad)
        else:
            rows.append(oob_row)
    return tuple(rows)


def locate_in_window(window: Grid) -> tuple[Pos, int]:
    """Recover the observer's absolute position from the OOB padding.

    Returns ((row, col), radius). Only valid for full-visibility windows,
    where the padding unambiguously reveals the grid offset.
    """
    radius = (len(window) - 1) // 2
    pad_top = 0
    for row in window:
        if any(t != int(Tile.OOB) for t in row):
            break
        pad_top += 1
    pad_left = 0
    for c in range(len(window)):
        if any(window[r][c] != int(Tile.OOB) for r in range(len(window))):
            break
        pad_left += 1
    return (radius - pad_top, radius - pad_left), radius
