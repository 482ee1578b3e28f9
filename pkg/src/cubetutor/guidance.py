"""Human-facing instruction over the cross solver.

Walkthroughs wrap optimal solutions in step records with rendered
explanations and a forward/rewind cursor.  Hints surface the first
optimal move.  Explanations come from deterministic templates keyed on
what the move does to the cross edges, judged with tiny per-edge
distance tables (24 placements each) so the text can say whether an
edge is locked in, brought closer, or repositioned as setup.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional

from .cube import (
    EDGE_SLOTS,
    MOVE_PERMS,
    CubeState,
    Metric,
    Move,
    apply_move,
    moves_for_metric,
    scramble_with_rng,
    state_from_string,
    state_to_string,
)
from .patterns import MaskedPattern, matches, pattern_from_string, pattern_to_string, white_cross_pattern
from .solver import CROSS_EDGE_COLORS, PatternDatabase, cross_edge_placements, solve_optimal
from .subgoals import SubgoalGraph
from .symmetry import canonicalize, group_by_name

EDGE_NAMES = tuple(f"white-{c.name.lower()}" for c in CROSS_EDGE_COLORS)

_DIRECTIONS = {1: "clockwise", 2: "twice", 3: "counterclockwise"}

GOAL_REACHED_TEXT = "Goal reached: the white cross is complete."

CATALOG_FILE_HEADER = "cross-scenarios v1"

_SCENARIO_TITLES = (
    "One turn: the final lock",
    "One turn: a twisted start",
    "One turn: spot the edge",
    "Two turns: fetch and place",
    "Two turns: around the corner",
    "Two turns: double duty",
    "Three turns: the long way home",
    "Three turns: untangle the cross",
    "Three turns: full rebuild",
)


@dataclass(frozen=True)
class WalkthroughStep:
    index: int
    move: Move
    pre_state: CubeState
    post_state: CubeState
    explanation: str
    subgoal_id: Optional[int] = None


@dataclass(frozen=True)
class Walkthrough:
    steps: tuple[WalkthroughStep, ...]
    cursor: int = 0


@dataclass(frozen=True)
class Scenario:
    id: int
    title: str
    start_state: CubeState
    goal: MaskedPattern
    max_moves: int


@lru_cache(maxsize=1)
def _slot_actions() -> dict[Move, tuple[tuple[int, ...], tuple[int, ...]]]:
    """Per move: where each edge slot's occupant goes, and flip toggles."""
    facelet_slot: dict[int, tuple[int, int]] = {}
    for s, (p, q) in enumerate(EDGE_SLOTS):
        facelet_slot[p] = (s, 0)
        facelet_slot[q] = (s, 1)
    actions: dict[Move, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for move, perm in MOVE_PERMS.items():
        dest = [0] * 54
        for i, src in enumerate(perm):
            dest[src] = i
        slot_dest = []
        slot_flip = []
        for p, q in EDGE_SLOTS:
            s2, landed = facelet_slot[dest[p]]
            slot_dest.append(s2)
            slot_flip.append(landed)
        actions[move] = (tuple(slot_dest), tuple(slot_flip))
    return actions


@lru_cache(maxsize=4)
def _edge_distance_tables(metric: Metric) -> tuple[tuple[int, ...], ...]:
    """tables[home_slot][slot * 2 + flip] = moves to bring a lone edge home."""
    actions = [_slot_actions()[m] for m in moves_for_metric(metric)]
    tables = []
    for home in range(4):
        dist: list[int | None] = [None] * 24
        dist[home * 2] = 0
        frontier = [home * 2]
        depth = 0
        while frontier:
            nxt = []
            for code in frontier:
                slot, flip = divmod(code, 2)
                for slot_dest, slot_flip in actions:
                    code2 = slot_dest[slot] * 2 + (flip ^ slot_flip[slot])
                    if dist[code2] is None:
                        dist[code2] = depth + 1
                        nxt.append(code2)
            frontier = nxt
            depth += 1
        assert all(d is not None for d in dist)
        tables.append(tuple(dist))
    return tuple(tables)


def _explain_move(pre: CubeState, move: Move, metric: Metric) -> str:
    tables = _edge_distance_tables(metric)
    before = cross_edge_placements(pre)
    after = cross_edge_placements(apply_move(pre, move))
    turn = f"Turn the {move.face.name.capitalize()} face {_DIRECTIONS[move.turns]}"
    locked = []
    improved = []
    moved = []
    for i in range(4):
        d_before = tables[i][before[i][0] * 2 + before[i][1]]
        d_after = tables[i][after[i][0] * 2 + after[i][1]]
        if before[i] != after[i]:
            moved.append((d_after, i))
        if d_after == 0 and d_before > 0:
            locked.append(i)
        elif d_after < d_before:
            improved.append((d_before - d_after, i))
    if locked:
        name = EDGE_NAMES[locked[0]]
        return f"{turn} to lock the {name} edge into the cross."
    if improved:
        improved.sort(key=lambda pair: (-pair[0], pair[1]))
        name = EDGE_NAMES[improved[0][1]]
        return f"{turn} to bring the {name} edge closer to its home."
    if moved:
        moved.sort()
        name = EDGE_NAMES[moved[0][1]]
        return f"{turn} to move the {name} edge into position for the next step."
    return f"{turn} to set up the next step without disturbing the cross edges."


def plan_walkthrough(state: CubeState, goal: MaskedPattern,
                     pdb: PatternDatabase,
                     graph: SubgoalGraph | None = None) -> Walkthrough:
    """Optimal solution wrapped in explained steps, cursor at 0.

    With a graph, each step is annotated with the subgoal node reached
    at the earliest step from here on (the node the step works toward).
    """
    solution = solve_optimal(state, goal, pdb)
    records = []
    current = state
    for index, move in enumerate(solution.seq.moves):
        nxt = apply_move(current, move)
        records.append((index, move, current, nxt,
                        _explain_move(current, move, pdb.metric)))
        current = nxt
    subgoal_ids: list[Optional[int]] = [None] * len(records)
    if graph is not None and records:
        group = group_by_name(graph.group_name)
        reached: list[Optional[int]] = []
        for _, _, _, post, _ in records:
            nodes = graph.matching_nodes(canonicalize(post, group))
            if nodes:
                best = min(nodes, key=lambda n: (n.depth_bound, n.id))
                reached.append(best.id)
            else:
                reached.append(None)
        ahead: Optional[int] = None
        for k in range(len(records) - 1, -1, -1):
            if reached[k] is not None:
                ahead = reached[k]
            subgoal_ids[k] = ahead
    steps = tuple(
        WalkthroughStep(index, move, pre, post, text, subgoal_ids[index])
        for index, move, pre, post, text in records)
    return Walkthrough(steps, 0)


def step_forward(w: Walkthrough) -> Walkthrough:
    if w.cursor >= len(w.steps):
        raise ValueError("cursor at boundary")
    return Walkthrough(w.steps, w.cursor + 1)


def step_rewind(w: Walkthrough) -> Walkthrough:
    if w.cursor <= 0:
        raise ValueError("cursor at boundary")
    return Walkthrough(w.steps, w.cursor - 1)


def walkthrough_state(w: Walkthrough) -> Optional[CubeState]:
    """The cube state at the cursor; None for an empty walkthrough."""
    if not w.steps:
        return None
    if w.cursor == 0:
        return w.steps[0].pre_state
    return w.steps[w.cursor - 1].post_state


def hint(state: CubeState, goal: MaskedPattern,
         pdb: PatternDatabase) -> tuple[Optional[Move], str]:
    """First optimal move with its explanation; no move at the goal."""
    if matches(state, goal):
        return (None, GOAL_REACHED_TEXT)
    solution = solve_optimal(state, goal, pdb)
    move = solution.seq.moves[0]
    return (move, _explain_move(state, move, pdb.metric))


def scenario_catalog(seed: int) -> list[Scenario]:
    """Nine practice scenarios: three each at scramble depths 1, 2, 3.

    Deterministic in the seed; draws are retried until the scramble
    actually breaks the cross, so no scenario starts at its goal.
    """
    rng = random.Random(seed)
    goal = white_cross_pattern()
    scenarios = []
    for i in range(9):
        depth = 1 + i // 3
        while True:
            state, _ = scramble_with_rng(rng, depth, Metric.QTM)
            if not matches(state, goal):
                break
        scenarios.append(Scenario(i + 1, _SCENARIO_TITLES[i], state, goal, depth))
    return scenarios


def save_catalog(scenarios: Iterable[Scenario], path: str | Path) -> None:
    lines = [CATALOG_FILE_HEADER]
    for s in scenarios:
        lines.append("\t".join([
            str(s.id), s.title, state_to_string(s.start_state),
            pattern_to_string(s.goal), str(s.max_moves),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_catalog(path: str | Path) -> list[Scenario]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CATALOG_FILE_HEADER:
        raise ValueError("not a scenario catalog file")
    scenarios = []
    for line in lines[1:]:
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise ValueError(f"malformed scenario record: {line!r}")
        scenario_id, title, state_text, goal_text, max_moves = fields
        scenarios.append(Scenario(
            int(scenario_id), title, state_from_string(state_text),
            pattern_from_string(goal_text), int(max_moves)))
    ids = [s.id for s in scenarios]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate scenario ids")
    return scenarios
