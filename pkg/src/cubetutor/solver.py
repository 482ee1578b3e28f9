"""Exact solving over the white-cross subspace.

Only the four white edges matter for the cross.  Each occupies one of
12 edge slots in one of 2 orientations, the four slots distinct, so the
abstraction has 12*11*10*9 * 2**4 = 190,080 states.  A state packs into
a coordinate as slot_rank * 16 + flip_bits: slot_rank is the
lexicographic rank of the (red, green, orange, blue) partner edges'
slot tuple, and flip bit i is set when edge i's white sticker sits on
its slot's secondary facelet.

Orientation bookkeeping rides on the slot tables' primary/secondary
split.  Worked example: a Front quarter turn sends the UF slot's Up
facelet (7) onto the FR slot's Right facelet (30), primary onto
secondary, so Front and Back quarter turns toggle flip bits; Up, Down,
Left and Right quarter turns map primaries onto primaries and preserve
them.

Distance tables are exact over the whole coordinate space, so the
pattern-database heuristic equals the true distance and IDA* walks the
optimal path directly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from pathlib import Path

import numpy as np

from .cube import (
    CENTERS,
    EDGE_SLOTS,
    FACE_COLORS,
    MOVE_PERMS,
    Color,
    CubeState,
    Face,
    Metric,
    Move,
    MoveSequence,
    moves_for_metric,
)
from .patterns import GREY, MaskedPattern, pattern_from_string, pattern_to_string

# Cross edges indexed by partner color; home slots are UR, UF, UL, UB.
CROSS_EDGE_COLORS = (Color.RED, Color.GREEN, Color.ORANGE, Color.BLUE)
_PARTNER_INDEX = {c: i for i, c in enumerate(CROSS_EDGE_COLORS)}

N_SLOT_RANKS = 12 * 11 * 10 * 9
SPACE_SIZE = N_SLOT_RANKS * 16

_CENTER_COLORS = {i: FACE_COLORS[Face(i // 9)] for i in CENTERS}

_FACELET_SLOT: dict[int, tuple[int, int]] = {}
for _s, (_p, _q) in enumerate(EDGE_SLOTS):
    _FACELET_SLOT[_p] = (_s, 0)
    _FACELET_SLOT[_q] = (_s, 1)

PDB_MAGIC = b"XPDB"
PDB_VERSION = 1
_METRIC_CODES = {Metric.QTM: 1, Metric.HTM: 2}
_CODE_METRICS = {v: k for k, v in _METRIC_CODES.items()}

_INF = 1 << 30


def _rank_slots(slots: list[int] | tuple[int, ...]) -> int:
    rank = 0
    for i, s in enumerate(slots):
        d = s - sum(1 for t in slots[:i] if t < s)
        rank = rank * (12 - i) + d
    return rank


def _rank_rows(rows: np.ndarray) -> np.ndarray:
    a0 = rows[:, 0].astype(np.int64)
    a1 = rows[:, 1].astype(np.int64)
    a2 = rows[:, 2].astype(np.int64)
    a3 = rows[:, 3].astype(np.int64)
    d1 = a1 - (a0 < a1)
    d2 = a2 - (a0 < a2) - (a1 < a2)
    d3 = a3 - (a0 < a3) - (a1 < a3) - (a2 < a3)
    return ((a0 * 11 + d1) * 10 + d2) * 9 + d3


@lru_cache(maxsize=1)
def _unrank_table() -> np.ndarray:
    """Row r is the slot tuple whose lexicographic rank is r."""
    table = np.array(list(permutations(range(12), 4)), dtype=np.uint8)
    assert table.shape == (N_SLOT_RANKS, 4)
    return table


@lru_cache(maxsize=1)
def _move_tables() -> dict[Move, tuple[np.ndarray, np.ndarray]]:
    """Per move: slot-rank transition P and 4-bit flip-toggle mask T.

    Applying move m to coordinate c gives P[c >> 4] * 16 + ((c & 15) ^
    T[c >> 4]); the toggle depends only on which slots are occupied,
    never on the current flips.
    """
    unrank = _unrank_table().astype(np.int64)
    tables: dict[Move, tuple[np.ndarray, np.ndarray]] = {}
    for move, perm in MOVE_PERMS.items():
        dest = [0] * 54
        for i, src in enumerate(perm):
            dest[src] = i
        slot_dest = np.empty(12, np.int64)
        slot_flip = np.empty(12, np.int64)
        for s, (p, q) in enumerate(EDGE_SLOTS):
            s2, landed = _FACELET_SLOT[dest[p]]
            assert _FACELET_SLOT[dest[q]] == (s2, 1 - landed)
            slot_dest[s] = s2
            slot_flip[s] = landed
        new_rows = slot_dest[unrank]
        flips = slot_flip[unrank]
        P = _rank_rows(new_rows).astype(np.uint16)
        T = (flips[:, 0] | flips[:, 1] << 1 | flips[:, 2] << 2
             | flips[:, 3] << 3).astype(np.uint8)
        tables[move] = (P, T)
    return tables


@lru_cache(maxsize=1)
def _placement_codes() -> np.ndarray:
    """codes[i][c] = slot * 2 + flip of cross edge i at coordinate c."""
    unrank = _unrank_table().astype(np.int64)
    coords = np.arange(SPACE_SIZE, dtype=np.int64)
    slots = unrank[coords >> 4]
    codes = np.empty((4, SPACE_SIZE), np.uint8)
    for i in range(4):
        codes[i] = slots[:, i] * 2 + ((coords >> i) & 1)
    return codes


def coordinate(state: CubeState) -> int:
    """Pack the four white edges' slots and flips into one integer."""
    slots = [-1, -1, -1, -1]
    flips = [0, 0, 0, 0]
    for s, (p, q) in enumerate(EDGE_SLOTS):
        a, b = state.facelets[p], state.facelets[q]
        if a == Color.WHITE:
            i = _PARTNER_INDEX.get(b)
            flip = 0
        elif b == Color.WHITE:
            i = _PARTNER_INDEX.get(a)
            flip = 1
        else:
            continue
        if i is None or slots[i] >= 0:
            raise ValueError("state does not contain the four white cross edges")
        slots[i] = s
        flips[i] = flip
    if min(slots) < 0:
        raise ValueError("state does not contain the four white cross edges")
    bits = flips[0] | flips[1] << 1 | flips[2] << 2 | flips[3] << 3
    return _rank_slots(slots) * 16 + bits


def cross_edge_placements(state: CubeState) -> tuple[tuple[int, int], ...]:
    """(slot, flip) of the red, green, orange and blue white edges."""
    coord = coordinate(state)
    slots = _unrank_table()[coord >> 4]
    return tuple((int(slots[i]), (coord >> i) & 1) for i in range(4))


def match_vector(pattern: MaskedPattern) -> np.ndarray:
    """Boolean table over all coordinates of which satisfy the mask.

    A mask is inside the abstraction when every constraint is visible
    to it: centers at their scheme colors, white stickers on edge
    facelets, and non-white edge stickers only when the same slot's
    other facelet is constrained white (the pair then pins one specific
    cross edge).  Anything else raises.
    """
    cells = pattern.cells
    leftover = {i for i, c in enumerate(cells) if c != GREY}
    for i in CENTERS:
        if cells[i] != GREY:
            if cells[i] != _CENTER_COLORS[i]:
                raise ValueError("goal outside cross abstraction: recolored center")
            leftover.discard(i)
    anchored: list[tuple[int, int]] = []
    loose: list[int] = []
    for s, (p, q) in enumerate(EDGE_SLOTS):
        cp, cq = cells[p], cells[q]
        if cp == GREY and cq == GREY:
            continue
        if cp == Color.WHITE and cq == GREY:
            loose.append(s * 2)
        elif cq == Color.WHITE and cp == GREY:
            loose.append(s * 2 + 1)
        elif cp == Color.WHITE and cq in _PARTNER_INDEX:
            anchored.append((_PARTNER_INDEX[cq], s * 2))
        elif cq == Color.WHITE and cp in _PARTNER_INDEX:
            anchored.append((_PARTNER_INDEX[cp], s * 2 + 1))
        else:
            raise ValueError(
                "goal outside cross abstraction: edge sticker without a white anchor")
        leftover.discard(p)
        leftover.discard(q)
    if leftover:
        raise ValueError("goal outside cross abstraction: constrains non-cross cells")
    codes = _placement_codes()
    ok = np.ones(SPACE_SIZE, dtype=bool)
    for edge, code in anchored:
        ok &= codes[edge] == code
    for code in loose:
        ok &= ((codes[0] == code) | (codes[1] == code)
               | (codes[2] == code) | (codes[3] == code))
    return ok


@lru_cache(maxsize=128)
def _distance_table(pattern_text: str, metric: Metric) -> np.ndarray:
    pattern = pattern_from_string(pattern_text)
    goal = match_vector(pattern)
    if not goal.any():
        raise ValueError("goal outside cross abstraction: empty match set")
    tabs = _move_tables()
    moves = moves_for_metric(metric)
    dist = np.full(SPACE_SIZE, 0xFF, np.uint8)
    frontier = np.flatnonzero(goal)
    dist[frontier] = 0
    depth = 0
    while frontier.size:
        rank = frontier >> 4
        bits = frontier & 15
        nxt = []
        for m in moves:
            P, T = tabs[m]
            nxt.append(P[rank].astype(np.int64) * 16 + (bits ^ T[rank]))
        cand = np.unique(np.concatenate(nxt))
        cand = cand[dist[cand] == 0xFF]
        dist[cand] = depth + 1
        frontier = cand
        depth += 1
    if (dist == 0xFF).any():
        raise RuntimeError("cross subspace unexpectedly disconnected")
    dist.setflags(write=False)
    return dist


def goal_distance_table(pattern: MaskedPattern, metric: Metric) -> np.ndarray:
    """Exact distance from every coordinate into the mask's match set.

    Level-synchronous breadth-first expansion from all matching
    coordinates; the move set is closed under inversion, so expanding
    forward from the goal set yields distances to it.  Cached per
    (pattern, metric); the returned array is read-only.
    """
    return _distance_table(pattern_to_string(pattern), metric)


@dataclass(frozen=True, eq=False)
class PatternDatabase:
    metric: Metric
    table: np.ndarray
    max_depth: int

    def save(self, path: str | Path) -> None:
        header = struct.pack("<4sIII", PDB_MAGIC, PDB_VERSION,
                             _METRIC_CODES[self.metric], self.max_depth)
        Path(path).write_bytes(header + self.table.tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "PatternDatabase":
        blob = Path(path).read_bytes()
        if len(blob) != 16 + SPACE_SIZE:
            raise ValueError(
                f"pattern database file is {len(blob)} bytes, expected {16 + SPACE_SIZE}")
        magic, version, metric_code, max_depth = struct.unpack_from("<4sIII", blob)
        if magic != PDB_MAGIC:
            raise ValueError("not a pattern database file")
        if version != PDB_VERSION:
            raise ValueError(f"unsupported pattern database version {version}")
        if metric_code not in _CODE_METRICS:
            raise ValueError(f"unknown metric code {metric_code}")
        table = np.frombuffer(blob, dtype=np.uint8, offset=16).copy()
        table.setflags(write=False)
        return cls(_CODE_METRICS[metric_code], table, max_depth)


def build_pdb(goal: MaskedPattern, metric: Metric = Metric.QTM) -> PatternDatabase:
    """Exact distance table into the goal's match set over all 190,080 coordinates."""
    table = goal_distance_table(goal, metric)
    return PatternDatabase(metric, table, int(table.max()))


def heuristic(state: CubeState, pdb: PatternDatabase) -> int:
    return int(pdb.table[coordinate(state)])


@dataclass(frozen=True)
class Solution:
    seq: MoveSequence
    nodes_expanded: int
    optimal: bool

    def __len__(self) -> int:
        return len(self.seq.moves)


def _ida(start: int, match: np.ndarray, h: np.ndarray,
         metric: Metric) -> tuple[list[Move], int]:
    """Iterative-deepening A* in coordinate space.

    Children are tried in the fixed move order, so the returned
    solution is the lexicographically first among minimal ones.
    Pruning: never follow a move with the inverse of the previous move
    (the pair would cancel); in the half-turn metric any second turn of
    the same face composes into one move, so the whole face is skipped.
    """
    moves = moves_for_metric(metric)
    tabs = _move_tables()
    steps = [tabs[m] for m in moves]
    nodes = 0
    path: list[Move] = []

    def dfs(c: int, g: int, bound: int, prev: Move | None) -> int:
        nonlocal nodes
        f = g + int(h[c])
        if f > bound:
            return f
        if match[c]:
            return -1
        nodes += 1
        rank = c >> 4
        bits = c & 15
        nxt_bound = _INF
        for mv, (P, T) in zip(moves, steps):
            if prev is not None and mv.face == prev.face:
                if metric is Metric.HTM or mv.turns != prev.turns:
                    continue
            c2 = int(P[rank]) * 16 + (bits ^ int(T[rank]))
            t = dfs(c2, g + 1, bound, mv)
            if t < 0:
                path.append(mv)
                return -1
            nxt_bound = min(nxt_bound, t)
        return nxt_bound

    bound = int(h[start])
    while True:
        path.clear()
        t = dfs(start, 0, bound, None)
        if t < 0:
            path.reverse()
            return path, nodes
        if t >= _INF:
            raise RuntimeError("search exhausted without reaching the goal")
        bound = t


def solve_optimal(state: CubeState, goal: MaskedPattern,
                  pdb: PatternDatabase) -> Solution:
    """Minimal move sequence from state into the goal's match set."""
    match = match_vector(goal)
    path, nodes = _ida(coordinate(state), match, pdb.table, pdb.metric)
    return Solution(MoveSequence(tuple(path), pdb.metric), nodes, True)


def solve_to_node(state: CubeState, node: MaskedPattern,
                  pdb: PatternDatabase) -> Solution:
    """Minimal move sequence into an intermediate mask's match set.

    Uses the node's own exact distance table (cached), so the result is
    optimal regardless of which goal the supplied database was built
    for; the database only fixes the metric.
    """
    table = goal_distance_table(node, pdb.metric)
    path, nodes = _ida(coordinate(state), table == 0, table, pdb.metric)
    return Solution(MoveSequence(tuple(path), pdb.metric), nodes, True)
