"""Shared fixtures: pattern databases and the independent BFS oracle.

The oracle never touches the solver's coordinate arithmetic.  It walks
the cube with raw facelet permutations, identifies states by a
projection that keeps only the white edges' stickers, and records the
breadth-first distance from the solved cross.  The solver's coordinate
function is used purely as an array index, and a collision assertion
inside the walk doubles as a bijectivity proof for it.
"""

import numpy as np
import pytest

from cubetutor.cube import (
    EDGE_SLOTS, MOVE_PERMS, SOLVED, Color, CubeState, Metric,
    moves_for_metric,
)
from cubetutor.patterns import white_cross_pattern
from cubetutor import solver

UNSEEN = 0xFF


def _projection_key(cells: tuple[int, ...]) -> int:
    # Slots not holding a white edge collapse to one code, so two states
    # share a key exactly when their white-edge arrangements agree.
    key = 0
    for p, q in EDGE_SLOTS:
        a, b = cells[p], cells[q]
        code = a * 6 + b if Color.WHITE in (a, b) else 36
        key = key * 37 + code
    return key


def build_cross_oracle(metric: Metric) -> np.ndarray:
    perms = [tuple(MOVE_PERMS[m]) for m in moves_for_metric(metric)]
    table = np.full(solver.SPACE_SIZE, UNSEEN, np.uint8)
    start = tuple(SOLVED.facelets)
    seen = {_projection_key(start)}
    table[solver.coordinate(SOLVED)] = 0
    frontier = [start]
    depth = 0
    while frontier:
        nxt = []
        for cells in frontier:
            for perm in perms:
                new = tuple(cells[p] for p in perm)
                key = _projection_key(new)
                if key in seen:
                    continue
                seen.add(key)
                coord = solver.coordinate(CubeState(new))
                assert table[coord] == UNSEEN, "coordinate collision"
                table[coord] = depth + 1
                nxt.append(new)
        frontier = nxt
        depth += 1
    assert not (table == UNSEEN).any(), "projection space not exhausted"
    return table


@pytest.fixture(scope="session")
def oracle_qtm() -> np.ndarray:
    return build_cross_oracle(Metric.QTM)


@pytest.fixture(scope="session")
def oracle_htm() -> np.ndarray:
    return build_cross_oracle(Metric.HTM)


@pytest.fixture(scope="session")
def pdb_qtm() -> solver.PatternDatabase:
    return solver.build_pdb(white_cross_pattern(), Metric.QTM)


@pytest.fixture(scope="session")
def pdb_htm() -> solver.PatternDatabase:
    return solver.build_pdb(white_cross_pattern(), Metric.HTM)
