"""Whole-cube symmetries that leave the white cross goal invariant.

The default group has the four rotations about the Up-Down axis, each
paired with the side-color relabeling that maps solved back to solved.
The order-8 variant adds the left-right mirror (with orange and red
swapped).  Canonicalization picks the lexicographically least facelet
array over the group's images, so states in one orbit collapse to a
single representative.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cube import CubeState, Face, MOVE_ORDER, MOVE_PERMS, Move, MoveSequence

__all__ = ["SymmetryTransform", "SymmetryGroup", "group_by_name", "UD4", "UD8",
           "canonicalize", "canonicalize_with_transform"]


@dataclass(frozen=True)
class SymmetryTransform:
    """A facelet permutation plus color relabeling, applied together."""

    perm: tuple[int, ...]          # new[i] = old[perm[i]]
    recolor: tuple[int, ...]       # color -> color

    def apply(self, state: CubeState) -> CubeState:
        cells = state.facelets
        return CubeState(tuple(self.recolor[cells[self.perm[i]]] for i in range(54)))

    def compose(self, then: "SymmetryTransform") -> "SymmetryTransform":
        perm = tuple(self.perm[then.perm[i]] for i in range(54))
        recolor = tuple(then.recolor[self.recolor[c]] for c in range(6))
        return SymmetryTransform(perm, recolor)

    def conjugate_move(self, move: Move) -> Move:
        """The move m' with apply(T(s), m') == T(apply(s, m)) for all s."""
        inv = [0] * 54
        for j, p in enumerate(self.perm):
            inv[p] = j
        pm = MOVE_PERMS[move]
        target = tuple(inv[pm[self.perm[i]]] for i in range(54))
        for cand in MOVE_ORDER:
            if MOVE_PERMS[cand] == target:
                return cand
        raise AssertionError("conjugated move is not a face turn")


_IDENTITY = SymmetryTransform(tuple(range(54)), tuple(range(6)))


def _cycled_perm(cycles) -> list[int]:
    perm = list(range(54))
    for cyc in cycles:
        for i, src in enumerate(cyc):
            perm[cyc[(i + 1) % len(cyc)]] = src
    return perm


def _rotation_y() -> SymmetryTransform:
    # Whole-cube quarter rotation about the Up-Down axis taking the Front
    # face to Left.  Up spins clockwise (seen from above), Down the other
    # way, and the four side faces shift block to block.
    perm = _cycled_perm(((0, 2, 8, 6), (1, 5, 7, 3),
                         (45, 51, 53, 47), (46, 48, 52, 50)))
    for j in range(9):
        perm[9 + j] = 18 + j    # Left shows what Front showed
        perm[36 + j] = 9 + j    # Back shows Left
        perm[27 + j] = 36 + j   # Right shows Back
        perm[18 + j] = 27 + j   # Front shows Right
    # Green lands on the Left face, so relabel green as orange, etc.
    recolor = [0, 1, 4, 5, 3, 2]  # G->O, O->B, B->R, R->G
    return SymmetryTransform(tuple(perm), tuple(recolor))


def _mirror_lr() -> SymmetryTransform:
    # Reflection through the plane spanned by the Up-Down and Front-Back
    # axes: every face row reverses and Left/Right swap blocks.
    perm = list(range(54))
    for base in (0, 18, 36, 45):            # U, F, B, D reverse rows in place
        for r in range(3):
            for c in range(3):
                perm[base + 3 * r + c] = base + 3 * r + (2 - c)
    for r in range(3):
        for c in range(3):
            perm[9 + 3 * r + c] = 27 + 3 * r + (2 - c)   # Left shows Right
            perm[27 + 3 * r + c] = 9 + 3 * r + (2 - c)   # Right shows Left
    recolor = [0, 1, 2, 3, 5, 4]  # orange <-> red
    return SymmetryTransform(tuple(perm), tuple(recolor))


@dataclass(frozen=True)
class SymmetryGroup:
    name: str
    transforms: tuple[SymmetryTransform, ...]

    def __len__(self) -> int:
        return len(self.transforms)

    def images(self, state: CubeState):
        return (t.apply(state) for t in self.transforms)


def _close(generators: list[SymmetryTransform]) -> tuple[SymmetryTransform, ...]:
    elements = [_IDENTITY]
    frontier = [_IDENTITY]
    while frontier:
        nxt = []
        for elem in frontier:
            for gen in generators:
                cand = elem.compose(gen)
                if cand not in elements:
                    elements.append(cand)
                    nxt.append(cand)
        frontier = nxt
    return tuple(elements)


UD4 = SymmetryGroup("ud4", _close([_rotation_y()]))
UD8 = SymmetryGroup("ud8", _close([_rotation_y(), _mirror_lr()]))

assert len(UD4) == 4 and len(UD8) == 8

_GROUPS = {g.name: g for g in (UD4, UD8)}


def group_by_name(name: str) -> SymmetryGroup:
    try:
        return _GROUPS[name]
    except KeyError:
        raise ValueError(f"unknown symmetry group {name!r}") from None


def canonicalize(state: CubeState, group: SymmetryGroup = UD4) -> CubeState:
    """Lexicographically least facelet array over the group's images."""
    return min(group.images(state), key=lambda s: s.facelets)


def canonicalize_with_transform(
    state: CubeState, group: SymmetryGroup = UD4
) -> tuple[CubeState, SymmetryTransform]:
    best, best_t = state, group.transforms[0]
    for t in group.transforms:
        img = t.apply(state)
        if img.facelets < best.facelets:
            best, best_t = img, t
    return best, best_t


def inverse_transform(group: SymmetryGroup, t: SymmetryTransform) -> SymmetryTransform:
    for cand in group.transforms:
        composed = t.compose(cand)
        if composed == _IDENTITY:
            return cand
    raise ValueError("transform not in group")


def pull_back_sequence(group: SymmetryGroup, t: SymmetryTransform,
                       seq: MoveSequence) -> MoveSequence:
    """Map a solution for T(state) to the equivalent solution for state."""
    inv = inverse_transform(group, t)
    return MoveSequence(tuple(inv.conjugate_move(m) for m in seq.moves), seq.metric)
