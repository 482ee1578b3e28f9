"""Facelet-level model of the 3x3x3 cube.

The cube is a flat array of 54 sticker colors, six 9-cell blocks in the
fixed order Up, Left, Front, Right, Back, Down.  Each block is row-major
as seen looking straight at that face; Up is viewed with the Back face
away from the observer, Down with the Front face nearest.  Unfolded:

                |  0  1  2 |
                |  3  4  5 |
                |  6  7  8 |
    | 9 10 11 | 18 19 20 | 27 28 29 | 36 37 38 |
    |12 13 14 | 21 22 23 | 30 31 32 | 39 40 41 |
    |15 16 17 | 24 25 26 | 33 34 35 | 42 43 44 |
                | 45 46 47 |
                | 48 49 50 |
                | 51 52 53 |

Index 4 of each block is the face center and never moves.  Color scheme:
Up=white, Down=yellow, Front=green, Back=blue, Left=orange, Right=red.

Moves are sticker permutations.  A quarter turn is clockwise as seen
looking at the turned face; suffix ' is counterclockwise and suffix 2 a
half turn.  The quarter-turn metric (qtm) admits only single turns, the
half-turn metric (htm) also admits half turns.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum, IntEnum

__all__ = [
    "Color", "Face", "Metric", "Move", "MoveSequence", "CubeState",
    "SOLVED", "MOVES", "MOVE_ORDER", "CENTERS", "EDGE_SLOTS", "CORNER_SLOTS",
    "FACE_COLORS", "apply_move", "apply_sequence", "invert", "scramble",
    "parse_move", "parse_sequence", "sequence_to_notation",
    "state_to_string", "state_from_string", "validate_state",
    "InvalidStateError",
]


class Color(IntEnum):
    WHITE = 0
    YELLOW = 1
    GREEN = 2
    BLUE = 3
    ORANGE = 4
    RED = 5


COLOR_CHARS = "WYGBOR"
CHAR_COLORS = {c: Color(i) for i, c in enumerate(COLOR_CHARS)}


class Face(IntEnum):
    # Order matches the facelet block order.
    UP = 0
    LEFT = 1
    FRONT = 2
    RIGHT = 3
    BACK = 4
    DOWN = 5

    @property
    def letter(self) -> str:
        return "ULFRBD"[self]


FACE_COLORS = {
    Face.UP: Color.WHITE,
    Face.LEFT: Color.ORANGE,
    Face.FRONT: Color.GREEN,
    Face.RIGHT: Color.RED,
    Face.BACK: Color.BLUE,
    Face.DOWN: Color.YELLOW,
}

CENTERS = (4, 13, 22, 31, 40, 49)

# Edge slots as (primary, secondary) facelet pairs.  Primary is the U/D
# facelet for top/bottom-layer slots and the F/B facelet for the middle
# slots; that choice makes exactly F and B quarter turns toggle edge
# orientation, the convention the solver's coordinate relies on.
EDGE_SLOT_NAMES = ("UR", "UF", "UL", "UB", "DR", "DF", "DL", "DB",
                   "FR", "FL", "BL", "BR")
EDGE_SLOTS = (
    (5, 28), (7, 19), (3, 10), (1, 37),
    (50, 34), (46, 25), (48, 16), (52, 43),
    (23, 30), (21, 14), (41, 12), (39, 32),
)

# Corner slots as (U/D facelet, then clockwise around the corner).
CORNER_SLOT_NAMES = ("URF", "UFL", "ULB", "UBR", "DFR", "DLF", "DBL", "DRB")
CORNER_SLOTS = (
    (8, 27, 20), (6, 18, 11), (0, 9, 38), (2, 36, 29),
    (47, 26, 33), (45, 17, 24), (51, 44, 15), (53, 35, 42),
)


class Metric(str, Enum):
    QTM = "qtm"
    HTM = "htm"

    @property
    def turn_choices(self) -> tuple[int, ...]:
        return (1, 3) if self is Metric.QTM else (1, 2, 3)


@dataclass(frozen=True, slots=True)
class Move:
    """One face turn; turns counts quarter turns clockwise (1, 2 or 3)."""

    face: Face
    turns: int

    def __post_init__(self) -> None:
        if self.turns not in (1, 2, 3):
            raise ValueError(f"turns must be 1, 2 or 3, got {self.turns!r}")

    @property
    def notation(self) -> str:
        return self.face.letter + {1: "", 2: "2", 3: "'"}[self.turns]

    def inverse(self) -> "Move":
        return Move(self.face, (4 - self.turns) % 4 or 2)

    def __str__(self) -> str:
        return self.notation


def _cycled(cycles: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    # Cycle (a, b, c, d) means the sticker at a moves to b, b to c, etc.,
    # so new[b] = old[a]: perm[dest] = src.
    perm = list(range(54))
    for cyc in cycles:
        for i, src in enumerate(cyc):
            perm[cyc[(i + 1) % len(cyc)]] = src
    return tuple(perm)


def _compose(first: tuple[int, ...], second: tuple[int, ...]) -> tuple[int, ...]:
    # Permutation of "apply first, then second".
    return tuple(first[second[i]] for i in range(54))


# Clockwise quarter-turn cycles per face: face rotation plus side strips.
_BASE_CYCLES = {
    Face.UP: ((0, 2, 8, 6), (1, 5, 7, 3),
              (18, 9, 36, 27), (19, 10, 37, 28), (20, 11, 38, 29)),
    Face.DOWN: ((45, 47, 53, 51), (46, 50, 52, 48),
                (24, 33, 42, 15), (25, 34, 43, 16), (26, 35, 44, 17)),
    Face.FRONT: ((18, 20, 26, 24), (19, 23, 25, 21),
                 (6, 27, 47, 17), (7, 30, 46, 14), (8, 33, 45, 11)),
    Face.BACK: ((36, 38, 44, 42), (37, 41, 43, 39),
                (2, 9, 51, 35), (1, 12, 52, 32), (0, 15, 53, 29)),
    Face.LEFT: ((9, 11, 17, 15), (10, 14, 16, 12),
                (0, 18, 45, 44), (3, 21, 48, 41), (6, 24, 51, 38)),
    Face.RIGHT: ((27, 29, 35, 33), (28, 32, 34, 30),
                 (8, 36, 53, 26), (5, 39, 50, 23), (2, 42, 47, 20)),
}


def _build_move_perms() -> dict[Move, tuple[int, ...]]:
    perms = {}
    for face, cycles in _BASE_CYCLES.items():
        base = _cycled(cycles)
        perms[Move(face, 1)] = base
        perms[Move(face, 2)] = _compose(base, base)
        perms[Move(face, 3)] = _compose(_compose(base, base), base)
    return perms


MOVE_PERMS = _build_move_perms()

# Deterministic enumeration order used for tie-breaking everywhere a
# search tries moves: faces U, D, F, B, L, R, each with turns 1, 2, 3.
MOVE_ORDER = tuple(
    Move(face, turns)
    for face in (Face.UP, Face.DOWN, Face.FRONT, Face.BACK, Face.LEFT, Face.RIGHT)
    for turns in (1, 2, 3)
)
MOVES = MOVE_ORDER


def moves_for_metric(metric: Metric) -> tuple[Move, ...]:
    if metric is Metric.QTM:
        return tuple(m for m in MOVE_ORDER if m.turns != 2)
    return MOVE_ORDER


@dataclass(frozen=True, slots=True)
class CubeState:
    """Immutable sticker array; construct via SOLVED, moves or parsing."""

    facelets: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.facelets) != 54:
            raise ValueError(f"expected 54 facelets, got {len(self.facelets)}")

    def to_string(self) -> str:
        return state_to_string(self)

    def face(self, face: Face) -> tuple[int, ...]:
        return self.facelets[face * 9:face * 9 + 9]

    def __str__(self) -> str:
        return self.to_string()


SOLVED = CubeState(tuple(FACE_COLORS[f] for f in Face for _ in range(9)))


@dataclass(frozen=True, slots=True)
class MoveSequence:
    """A notation-ordered run of moves tagged with its move metric."""

    moves: tuple[Move, ...]
    metric: Metric = Metric.HTM

    def __post_init__(self) -> None:
        if self.metric is Metric.QTM and any(m.turns == 2 for m in self.moves):
            raise ValueError("half turns are not qtm moves")

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    @property
    def notation(self) -> str:
        return sequence_to_notation(self)

    def __str__(self) -> str:
        return self.notation


def apply_move(state: CubeState, move: Move) -> CubeState:
    perm = MOVE_PERMS[move]
    cells = state.facelets
    return CubeState(tuple(cells[perm[i]] for i in range(54)))


def apply_sequence(state: CubeState, seq: MoveSequence) -> CubeState:
    for move in seq.moves:
        state = apply_move(state, move)
    return state


def invert(seq: MoveSequence) -> MoveSequence:
    return MoveSequence(tuple(m.inverse() for m in reversed(seq.moves)), seq.metric)


def scramble(seed: int, length: int, metric: Metric = Metric.QTM) -> tuple[CubeState, MoveSequence]:
    """Seeded random scramble from solved; never repeats a face twice in a row."""
    if length < 1:
        raise ValueError("empty scramble")
    rng = random.Random(seed)
    return scramble_with_rng(rng, length, metric)


def scramble_with_rng(rng: random.Random, length: int,
                      metric: Metric = Metric.QTM) -> tuple[CubeState, MoveSequence]:
    if length < 1:
        raise ValueError("empty scramble")
    faces = list(Face)
    turn_choices = metric.turn_choices
    moves = []
    prev = None
    for _ in range(length):
        face = rng.choice([f for f in faces if f is not prev])
        moves.append(Move(face, rng.choice(turn_choices)))
        prev = face
    seq = MoveSequence(tuple(moves), metric)
    return apply_sequence(SOLVED, seq), seq


_TOKEN_FACES = {f.letter: f for f in Face}


def parse_move(token: str) -> Move:
    if not token or token[0] not in _TOKEN_FACES:
        raise ValueError(f"unparseable move {token!r}")
    face = _TOKEN_FACES[token[0]]
    suffix = token[1:]
    if suffix == "":
        return Move(face, 1)
    if suffix == "'":
        return Move(face, 3)
    if suffix == "2":
        return Move(face, 2)
    raise ValueError(f"unparseable move {token!r}")


def parse_sequence(text: str, metric: Metric | None = None) -> MoveSequence:
    moves = tuple(parse_move(tok) for tok in text.split())
    if metric is None:
        metric = Metric.HTM
    return MoveSequence(moves, metric)


def sequence_to_notation(seq: MoveSequence) -> str:
    return " ".join(m.notation for m in seq.moves)


def state_to_string(state: CubeState) -> str:
    return "".join(COLOR_CHARS[c] for c in state.facelets)


class InvalidStateError(ValueError):
    pass


def state_from_string(text: str) -> CubeState:
    """Parse a 54-char state string and reject unreachable positions."""
    if len(text) != 54:
        raise InvalidStateError(f"expected 54 characters, got {len(text)}")
    try:
        cells = tuple(CHAR_COLORS[c] for c in text)
    except KeyError as exc:
        raise InvalidStateError(f"unknown color character {exc.args[0]!r}") from None
    state = CubeState(cells)
    problems = validate_state(state)
    if problems:
        raise InvalidStateError("; ".join(problems))
    return state


_EDGE_CUBIES = None
_CORNER_CUBIES = None


def _solved_cubies():
    global _EDGE_CUBIES, _CORNER_CUBIES
    if _EDGE_CUBIES is None:
        sol = SOLVED.facelets
        _EDGE_CUBIES = [tuple(sol[i] for i in slot) for slot in EDGE_SLOTS]
        _CORNER_CUBIES = [tuple(sol[i] for i in slot) for slot in CORNER_SLOTS]
    return _EDGE_CUBIES, _CORNER_CUBIES


def _perm_parity(perm: list[int]) -> int:
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, size = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            size += 1
        parity ^= (size - 1) & 1
    return parity


def validate_state(state: CubeState) -> list[str]:
    """Return human-readable problems; empty list means reachable from solved."""
    problems = []
    counts = [0] * 6
    for c in state.facelets:
        counts[c] += 1
    if counts != [9] * 6:
        problems.append(f"color counts {counts} are not nine of each")
        return problems
    centers = [state.facelets[i] for i in CENTERS]
    if sorted(centers) != sorted(range(6)):
        problems.append("face centers are not six distinct colors")
        return problems
    if centers != [FACE_COLORS[f] for f in Face]:
        problems.append("centers do not follow the fixed color scheme")
        return problems

    edge_cubies, corner_cubies = _solved_cubies()
    edge_perm, edge_flip = [], 0
    for slot in EDGE_SLOTS:
        pair = tuple(state.facelets[i] for i in slot)
        if pair in edge_cubies:
            edge_perm.append(edge_cubies.index(pair))
            continue
        flipped = (pair[1], pair[0])
        if flipped in edge_cubies:
            edge_perm.append(edge_cubies.index(flipped))
            edge_flip ^= 1
            continue
        problems.append(f"facelets {slot} do not form a valid edge piece")
        return problems
    if sorted(edge_perm) != list(range(12)):
        problems.append("duplicate edge pieces")
        return problems
    if edge_flip:
        problems.append("edge orientation parity is odd (one edge flipped)")

    corner_perm, corner_twist = [], 0
    for slot in CORNER_SLOTS:
        triple = tuple(state.facelets[i] for i in slot)
        found = None
        for ori in range(3):
            rotated = tuple(triple[(k + ori) % 3] for k in range(3))
            if rotated in corner_cubies:
                found = (corner_cubies.index(rotated), ori)
                break
        if found is None:
            problems.append(f"facelets {slot} do not form a valid corner piece")
            return problems
        corner_perm.append(found[0])
        corner_twist += found[1]
    if sorted(corner_perm) != list(range(8)):
        problems.append("duplicate corner pieces")
        return problems
    if corner_twist % 3:
        problems.append("corner orientation sum is not a multiple of three")
    if not problems and _perm_parity(edge_perm) != _perm_parity(corner_perm):
        problems.append("edge and corner permutation parities disagree")
    return problems
