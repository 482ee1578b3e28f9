"""Learned subgoal graphs over the cross abstraction.

The synthesis loop: seed a graph with the goal mask, sample scrambled
states, cluster the not-yet-covered ones by their optimal solutions,
and turn the cluster closest to the goal into a new masked node via
positive/negative example separation.  Each new node gets one edge
toward the cheapest existing node, so every covered state has a chain
of bounded solver hops ending at the goal.

States are always reduced to their symmetry-canonical representative
before clustering, matching or policy execution; solutions found for
the canonical image are conjugated back to the original frame.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .cube import (
    CENTERS,
    EDGE_SLOTS,
    Color,
    CubeState,
    Metric,
    Move,
    MoveSequence,
    apply_sequence,
    parse_sequence,
    scramble_with_rng,
    sequence_to_notation,
)
from .patterns import GREY, MaskedPattern, matches, pattern_from_string, pattern_to_string
from .solver import (
    PatternDatabase,
    coordinate,
    cross_edge_placements,
    goal_distance_table,
    match_vector,
    solve_optimal,
    solve_to_node,
)
from .symmetry import (
    UD4,
    SymmetryGroup,
    canonicalize,
    canonicalize_with_transform,
    group_by_name,
    pull_back_sequence,
)

GRAPH_FILE_HEADER = "cross-subgoal-graph v1"

# Scramble lengths drawn when build_graph samples its own states.
_SAMPLE_LENGTHS = (1, 8)


@dataclass(frozen=True)
class PathCluster:
    """States sharing one optimal solution, after symmetry reduction."""

    key: tuple[int, str]
    members: frozenset[CubeState]

    @property
    def distance(self) -> int:
        return self.key[0]

    @property
    def signature(self) -> str:
        return self.key[1]


@dataclass(frozen=True)
class SubgoalNode:
    id: int
    pattern: MaskedPattern
    depth_bound: int


@dataclass(frozen=True)
class SubgoalEdge:
    source: int
    target: int
    bound: int
    exemplar: MoveSequence


@dataclass(frozen=True)
class SubgoalGraph:
    nodes: tuple[SubgoalNode, ...]
    edges: tuple[SubgoalEdge, ...]
    goal_id: int
    group_name: str
    metric: Metric
    sample_size: int
    coverage: float

    def out_edge(self, node_id: int) -> SubgoalEdge | None:
        for edge in self.edges:
            if edge.source == node_id:
                return edge
        return None

    def matching_nodes(self, canon: CubeState) -> list[SubgoalNode]:
        return [n for n in self.nodes if matches(canon, n.pattern)]


def cluster_by_paths(states: Iterable[CubeState], goal: MaskedPattern,
                     pdb: PatternDatabase,
                     group: SymmetryGroup = UD4) -> list[PathCluster]:
    """Group states by (optimal length, canonical solution notation).

    Each state is canonicalized first; the deterministic solver then
    gives every member of an orbit the same signature.  Clusters come
    back sorted by ascending distance, then signature.
    """
    sol_cache: dict[int, tuple[int, str]] = {}
    buckets: dict[tuple[int, str], set[CubeState]] = {}
    for state in states:
        canon = canonicalize(state, group)
        coord = coordinate(canon)
        if coord not in sol_cache:
            sol = solve_optimal(canon, goal, pdb)
            sol_cache[coord] = (len(sol), sequence_to_notation(sol.seq))
        buckets.setdefault(sol_cache[coord], set()).add(canon)
    return [PathCluster(key, frozenset(members))
            for key, members in sorted(buckets.items())]


def learn_mask(positives: Iterable[CubeState], negatives: Iterable[CubeState],
               *, candidate_cells: Iterable[int] | None = None) -> MaskedPattern:
    """Induce a mask matching every positive and no negative.

    Without negatives the mask is the cellwise intersection of the
    positives (cells they all agree on stay concrete).  With negatives
    the mask starts fully grey and greedily un-greys the agreed cell
    that eliminates the most still-matching negatives, lowest facelet
    index on ties, stopping as soon as no negative matches; the result
    is grey-maximal under that order.  candidate_cells restricts which
    cells may be un-greyed.
    """
    pos = list(dict.fromkeys(positives))
    neg = list(dict.fromkeys(negatives))
    if not pos:
        raise ValueError("positives must be nonempty")
    if set(pos) & set(neg):
        raise ValueError("inseparable examples")
    agreed = [i for i in range(54)
              if all(p.facelets[i] == pos[0].facelets[i] for p in pos)]
    if candidate_cells is not None:
        allowed = set(candidate_cells)
        agreed = [i for i in agreed if i in allowed]
    if not neg:
        cells = [pos[0].facelets[i] if i in set(agreed) else GREY
                 for i in range(54)]
        return MaskedPattern(tuple(cells))
    cells = [GREY] * 54
    remaining = list(neg)
    available = list(agreed)
    while remaining:
        best_cell = None
        best_kill = 0
        for i in available:
            want = pos[0].facelets[i]
            kill = sum(1 for n in remaining if n.facelets[i] != want)
            if kill > best_kill:
                best_cell, best_kill = i, kill
        if best_cell is None:
            raise ValueError("inseparable examples")
        want = pos[0].facelets[best_cell]
        cells[best_cell] = want
        available.remove(best_cell)
        remaining = [n for n in remaining if n.facelets[best_cell] == want]
    return MaskedPattern(tuple(cells))


def _complete_anchors(mask: MaskedPattern, exemplar: CubeState) -> MaskedPattern:
    """Pair every lone non-white edge sticker with its white mate.

    The greedy learner may pin a partner-color cell alone; the solver's
    abstraction needs the white sticker on the same slot to know which
    cross edge is meant.  The mate is agreed among positives (they
    share the slot's edge), so adding it never breaks separation.
    """
    cells = list(mask.cells)
    changed = False
    for p, q in EDGE_SLOTS:
        for a, b in ((p, q), (q, p)):
            if cells[a] not in (GREY, Color.WHITE) and cells[b] == GREY:
                assert exemplar.facelets[b] == Color.WHITE
                cells[b] = Color.WHITE
                changed = True
    if not changed:
        return mask
    return MaskedPattern(tuple(cells))


def build_graph_from_states(goal: MaskedPattern, states: Iterable[CubeState],
                            pdb: PatternDatabase, group: SymmetryGroup = UD4,
                            *, iteration_cap: int = 64) -> SubgoalGraph:
    """Synthesize a subgoal graph covering the given sample."""
    sample = list(states)
    if not sample:
        raise ValueError("sample must be nonempty")
    weights: dict[CubeState, int] = {}
    for state in sample:
        canon = canonicalize(state, group)
        weights[canon] = weights.get(canon, 0) + 1
    canon_states = list(weights)
    coords = np.array([coordinate(c) for c in canon_states], dtype=np.int64)
    counts = np.array([weights[c] for c in canon_states], dtype=np.int64)

    sol_cache: dict[int, tuple[int, str]] = {}
    for canon, coord in zip(canon_states, coords):
        coord = int(coord)
        if coord not in sol_cache:
            sol = solve_optimal(canon, goal, pdb)
            sol_cache[coord] = (len(sol), sequence_to_notation(sol.seq))

    goal_table = goal_distance_table(goal, pdb.metric)
    goal_vec = match_vector(goal)
    nodes = [SubgoalNode(0, goal, int(goal_table[goal_vec].max()))]
    edges: list[SubgoalEdge] = []
    covered = goal_vec.copy()

    for _ in range(iteration_cap):
        open_idx = np.flatnonzero(~covered[coords])
        if open_idx.size == 0:
            break
        buckets: dict[tuple[int, str], set[CubeState]] = {}
        for i in open_idx:
            canon = canon_states[int(i)]
            buckets.setdefault(sol_cache[int(coords[i])], set()).add(canon)
        key = min(buckets)
        positives = buckets[key]
        negatives: set[CubeState] = set()
        for other, members in buckets.items():
            if other != key:
                negatives |= members
        member = min(positives, key=lambda s: s.facelets)
        candidates = set(CENTERS)
        for slot, _ in cross_edge_placements(member):
            candidates.update(EDGE_SLOTS[slot])
        mask = learn_mask(positives, negatives, candidate_cells=candidates)
        mask = _complete_anchors(mask, member)
        assert all(matches(p, mask) for p in positives)
        assert not any(matches(n, mask) for n in negatives)
        vec = match_vector(mask)
        node = SubgoalNode(len(nodes), mask, int(goal_table[vec].max()))
        best_bound, best_target = None, None
        for target in nodes:
            table = goal_distance_table(target.pattern, pdb.metric)
            bound = int(table[vec].max())
            if best_bound is None or bound < best_bound:
                best_bound, best_target = bound, target.id
        exemplar = solve_to_node(member, nodes[best_target].pattern, pdb).seq
        nodes.append(node)
        edges.append(SubgoalEdge(node.id, best_target, best_bound, exemplar))
        covered |= vec

    coverage = float(counts[covered[coords]].sum() / len(sample))
    return SubgoalGraph(tuple(nodes), tuple(edges), 0, group.name,
                        pdb.metric, len(sample), coverage)


def build_graph(goal: MaskedPattern, sample_seed: int, sample_size: int,
                pdb: PatternDatabase, group: SymmetryGroup = UD4,
                *, iteration_cap: int = 64) -> SubgoalGraph:
    """Sample seeded scrambles, then synthesize a graph covering them."""
    if sample_size < 1:
        raise ValueError("sample_size must be at least 1")
    rng = random.Random(sample_seed)
    lo, hi = _SAMPLE_LENGTHS
    states = [scramble_with_rng(rng, rng.randint(lo, hi), pdb.metric)[0]
              for _ in range(sample_size)]
    return build_graph_from_states(goal, states, pdb, group,
                                   iteration_cap=iteration_cap)


def execute_policy(state: CubeState, graph: SubgoalGraph,
                   pdb: PatternDatabase) -> MoveSequence:
    """Walk the graph's edge chain from the state's node to the goal.

    The state is canonicalized first; the chain solution is conjugated
    back so the returned moves apply to the state as given.
    """
    group = group_by_name(graph.group_name)
    canon, transform = canonicalize_with_transform(state, group)
    matching = graph.matching_nodes(canon)
    if not matching:
        raise ValueError("uncovered state")
    node = min(matching, key=lambda n: (n.depth_bound, n.id))
    moves: list[Move] = []
    current = canon
    while node.id != graph.goal_id:
        edge = graph.out_edge(node.id)
        assert edge is not None
        target = graph.nodes[edge.target]
        sol = solve_to_node(current, target.pattern, pdb)
        moves.extend(sol.seq.moves)
        current = apply_sequence(current, sol.seq)
        node = target
    seq = MoveSequence(tuple(moves), pdb.metric)
    return pull_back_sequence(group, transform, seq)


def save_graph(graph: SubgoalGraph, path: str | Path) -> None:
    lines = [
        GRAPH_FILE_HEADER,
        f"group {graph.group_name}",
        f"metric {graph.metric.value}",
        f"goal {graph.goal_id}",
        f"coverage {graph.sample_size} {graph.coverage!r}",
    ]
    for node in graph.nodes:
        lines.append(
            f"node {node.id} {pattern_to_string(node.pattern)} {node.depth_bound}")
    for edge in graph.edges:
        notation = sequence_to_notation(edge.exemplar)
        lines.append(f"edge {edge.source} {edge.target} {edge.bound} {notation}".rstrip())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_graph(path: str | Path) -> SubgoalGraph:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != GRAPH_FILE_HEADER:
        raise ValueError("not a subgoal graph file")
    group_name = ""
    metric = Metric.QTM
    goal_id = 0
    sample_size = 0
    coverage = 0.0
    nodes: list[SubgoalNode] = []
    edges: list[SubgoalEdge] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        kind, _, rest = line.partition(" ")
        if kind == "group":
            group_name = rest.strip()
        elif kind == "metric":
            metric = Metric(rest.strip())
        elif kind == "goal":
            goal_id = int(rest)
        elif kind == "coverage":
            size_text, fraction_text = rest.split()
            sample_size = int(size_text)
            coverage = float(fraction_text)
        elif kind == "node":
            node_id, pattern_text, bound = rest.split()
            nodes.append(SubgoalNode(int(node_id),
                                     pattern_from_string(pattern_text),
                                     int(bound)))
        elif kind == "edge":
            parts = rest.split(maxsplit=3)
            source, target, bound = int(parts[0]), int(parts[1]), int(parts[2])
            notation = parts[3] if len(parts) == 4 else ""
            exemplar = parse_sequence(notation, metric)
            edges.append(SubgoalEdge(source, target, bound, exemplar))
        else:
            raise ValueError(f"unknown graph record {kind!r}")
    group_by_name(group_name)
    nodes.sort(key=lambda n: n.id)
    if [n.id for n in nodes] != list(range(len(nodes))):
        raise ValueError("node ids must be consecutive from zero")
    if not 0 <= goal_id < len(nodes):
        raise ValueError("goal id out of range")
    return SubgoalGraph(tuple(nodes), tuple(edges), goal_id, group_name,
                        metric, sample_size, coverage)
