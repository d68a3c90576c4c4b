"""Closed-form reference values for the scripted roster.

Everything here is derived from the declared layouts and the declared agent
rules with plain arithmetic, deliberately without importing the package:
these numbers are what the estimators must converge to, so they cannot be
computed by the code under test. Running the module rewrites analytic.json
next to it.

Conventions shared with the shipped studies:
  * Estimated tables pool every collection regime that did not pin the
    variable, with equal budgets per regime, so a mechanism whose sample
    distribution differs across regimes converges to the pooled mixture.
  * Smoothing vanishes in the limit except where a row never receives data
    at all; those rows sit at the uniform prior mean by symmetry.
"""

import json
from fractions import Fraction
from pathlib import Path

HERE = Path(__file__).resolve().parent


# ---------------------------------------------------------------------------
# pick-up: a 5 by 5 room, reward cell uniform, quadrants cut by the diagonals

SIZE = 5
INTERIOR = [(r, c) for r in range(SIZE) for c in range(SIZE)]  # 0-based here
CENTER = (SIZE // 2, SIZE // 2)
# the habitual agent's patch: the southern three grid rows (0-based rows 2..4)
PATCH_ROWS = range(2, SIZE)


def tie_quadrant(cell):
    """Quadrant of any cell, diagonal ties resolved south, north, then side."""
    r, c = cell
    d1 = r - c
    d2 = r + c - (SIZE - 1)
    if d1 >= 0 and d2 >= 0:
        return "s"
    if d1 <= 0 and d2 <= 0:
        return "n"
    return "w" if d1 > 0 else "e"


def strict_quadrant_cells(quadrant):
    """Cells strictly inside a triangle; regimes place the reward here."""
    picked = []
    for r, c in INTERIOR:
        d1 = r - c
        d2 = r + c - (SIZE - 1)
        inside = {
            "s": d1 > 0 and d2 > 0,
            "n": d1 < 0 and d2 < 0,
            "w": d1 > 0 > d2,
            "e": d1 < 0 < d2,
        }[quadrant]
        if inside:
            picked.append((r, c))
    return picked


def pick_up_values():
    """The fetcher succeeds everywhere. The habitual agent succeeds exactly
    when the reward lands in its patch, so each quadrant's table row is the
    pooled mixture of the observational cells mapped there by the tie rule
    and the strict-triangle cells used by the placement regime."""
    observational = [cell for cell in INTERIOR if cell != CENTER]
    rows_b = {}
    for q in ("n", "e", "w", "s"):
        tie_cells = [cell for cell in observational if tie_quadrant(cell) == q]
        strict_cells = strict_quadrant_cells(q)
        p_obs_q = Fraction(len(tie_cells), len(observational))
        p_obs_q_hit = Fraction(
            sum(1 for r, _ in tie_cells if r in PATCH_ROWS), len(observational)
        )
        p_do_hit = Fraction(
            sum(1 for r, _ in strict_cells if r in PATCH_ROWS), len(strict_cells)
        )
        rows_b[q] = (p_obs_q_hit + p_do_hit) / (p_obs_q + 1)
    marginal_b = sum(
        Fraction(sum(1 for cell in observational if tie_quadrant(cell) == q), len(observational))
        * rows_b[q]
        for q in rows_b
    )
    labels = {
        "P(R=1)": (1, marginal_b),
        "P(R=1 | do(G=n))": (1, rows_b["n"]),
        "P(R=1 | do(G=e))": (1, rows_b["e"]),
        "P(R=1 | do(G=w))": (1, rows_b["w"]),
        "P(R=1 | do(G=s))": (1, rows_b["s"]),
    }
    return {label: {"A": a, "B": b} for label, (a, b) in labels.items()}


# ---------------------------------------------------------------------------
# key-door: a 5 by 5 room, door in the east wall, reward behind it

DOOR = (3, 6)  # grid coordinates, matching the shipped layout
ROOM = [(r, c) for r in range(1, 6) for c in range(1, 6)]
SIDE_TRIP_LIMIT = 4
SIDE_TRIP_COIN = Fraction(1, 2)


def _manhattan(a, b):
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def key_chance_when_open():
    """Probability the opportunist picks the key up when the door is open:
    the room is obstacle-free, so walking distances are Manhattan, and the
    side trip is taken always when free, by coin when short, never when
    long."""
    taken = Fraction(0)
    pairs = 0
    for key in ROOM:
        for agent in ROOM:
            if agent == key:
                continue
            pairs += 1
            detour = _manhattan(agent, key) + _manhattan(key, DOOR) - _manhattan(agent, DOOR)
            if detour == 0:
                taken += 1
            elif detour <= SIDE_TRIP_LIMIT:
                taken += SIDE_TRIP_COIN
    return taken / pairs


def key_door_values():
    p_key = key_chance_when_open()
    half = Fraction(1, 2)
    f_open = half + half * p_key  # keyless mass fails at a closed annex only when forced
    values = {
        "P(R=1)": (1, 1),
        "P(R=1 | K=yes)": (1, 1),
        # the always-key agent never shows K=no, so both door rows keep
        # symmetric smoothing tails and the conditional sits at one half
        "P(R=1 | K=no)": (1, half),
        "P(R=1 | do(K=yes))": (1, 1),
        "P(R=1 | do(K=no))": (half, half),
        "P(K=yes | do(D=closed))": (1, 1),
        "P(K=yes | do(D=open))": (p_key, 1),
        "P(R=1 | D=closed)": (1, 1),
        "P(R=1 | D=open)": (1, 1),
        "f(D=closed)": (1, 1),
        "f(D=open)": (f_open, 1),
        "f(D=closed) - f(D=open)": (1 - f_open, 0),
    }
    return {label: {"A": a, "B": b} for label, (a, b) in values.items()}


# ---------------------------------------------------------------------------
# mimic: the copier matches the committed move with the stock match rate

MATCH_RATE = Fraction(9, 10)


def mimic_values():
    half = Fraction(1, 2)
    # forcing the copier's partner leaves the copier-leads member predicting
    # by its marginal (one half) while the partner-leads member predicts by
    # the match rate, so Bayes weighs one half against the match rate
    matched = half * half / (half * half + half * MATCH_RATE)
    mismatched = half * half / (half * half + half * (1 - MATCH_RATE))
    return {
        "P(L=blue)": {"imitator": half},
        "P(L=blue | B=left,R=left)": {"imitator": half},
        "P(L=blue | B=right,R=left)": {"imitator": half},
        "P(L=blue | do(R=left), B=left)": {"imitator": matched},
        "P(L=blue | do(R=left), B=right)": {"imitator": mismatched},
    }


# ---------------------------------------------------------------------------
# the remaining studies are deterministic aside from fair coin flips


def grass_sand_values():
    half = Fraction(1, 2)
    values = {
        "P(T=left | R=left)": (1, 1),
        "P(T=right | R=right)": (1, 1),
        "P(T=left | do(R=left))": (half, 1),
        "P(T=right | do(R=right))": (half, 1),
        "P(T=left | do(F=grass))": (1, half),
        "P(T=right | do(F=sand))": (1, half),
    }
    return {label: {"A": a, "B": b} for label, (a, b) in values.items()}


def floor_memory_values():
    values = {
        "P(T=left | F=grass)": (1, 1),
        "P(T=right | F=sand)": (1, 1),
        "P(P=left | F=grass)": (1, 1),
        "P(P=right | F=sand)": (1, 1),
        "P(T=left | do(P=right), F=grass)": (1, 0),
        "P(T=right | do(P=left), F=sand)": (1, 0),
    }
    return {label: {"a": a, "b": b} for label, (a, b) in values.items()}


def gated_room_values():
    return {
        "P(R=red)": {"population": Fraction(1, 2)},
        "P(A=red | R=red)": {"population": 1},
        "P(A=red | D=left,R=red)": {"population": 1},
        "P(R[D=right]=red | D=left, R=red)": {"population": 1},
        "P(R[D=right]=green | D=left, R=green)": {"population": 1},
    }


COLUMNS = {
    "grass-sand": ("A", "B"),
    "floor-memory": ("a", "b"),
    "pick-up": ("A", "B"),
    "gated-room": ("population",),
    "mimic": ("imitator",),
    "key-door": ("A", "B"),
}

VALUES = {
    "grass-sand": grass_sand_values,
    "floor-memory": floor_memory_values,
    "pick-up": pick_up_values,
    "gated-room": gated_room_values,
    "mimic": mimic_values,
    "key-door": key_door_values,
}


def tables() -> dict:
    """All reference tables in the interchange shape."""
    out = []
    for name, columns in COLUMNS.items():
        values = VALUES[name]()
        rows = []
        for label, per_column in values.items():
            rows.append(
                {
                    "label": label,
                    "values": [round(float(per_column[c]), 10) for c in columns],
                }
            )
        out.append(
            {
                "name": name,
                "columns": list(columns),
                "rows": rows,
                "meta": {"source": "analytic"},
            }
        )
    return {"tables": out}


if __name__ == "__main__":
    path = HERE / "analytic.json"
    path.write_text(json.dumps(tables(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
