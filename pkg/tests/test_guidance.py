"""Walkthrough, hint, and scenario catalog behaviour."""

import pytest

from cubetutor.cube import (
    SOLVED,
    Face,
    Metric,
    Move,
    apply_move,
    apply_sequence,
    scramble,
)
from cubetutor.guidance import (
    GOAL_REACHED_TEXT,
    Scenario,
    Walkthrough,
    hint,
    load_catalog,
    plan_walkthrough,
    save_catalog,
    scenario_catalog,
    step_forward,
    step_rewind,
    walkthrough_state,
)
from cubetutor.patterns import matches, white_cross_pattern
from cubetutor.solver import heuristic, solve_optimal
from cubetutor.subgoals import build_graph_from_states
from cubetutor.symmetry import canonicalize, group_by_name

CROSS = white_cross_pattern()

FACE_WORDS = ("Up", "Down", "Front", "Back", "Left", "Right")


def test_walkthrough_of_matching_state_is_empty(pdb_qtm):
    w = plan_walkthrough(SOLVED, CROSS, pdb_qtm)
    assert w.steps == ()
    assert w.cursor == 0
    assert walkthrough_state(w) is None
    with pytest.raises(ValueError, match="cursor at boundary"):
        step_forward(w)
    with pytest.raises(ValueError, match="cursor at boundary"):
        step_rewind(w)


def test_walkthrough_steps_replay_to_goal(pdb_qtm):
    for seed in range(50):
        start, _ = scramble(seed, 1 + seed % 6, Metric.QTM)
        w = plan_walkthrough(start, CROSS, pdb_qtm)
        assert len(w.steps) == heuristic(start, pdb_qtm)
        if not w.steps:
            continue
        assert w.steps[0].pre_state == start
        for k, step in enumerate(w.steps):
            assert step.index == k
            assert step.post_state == apply_move(step.pre_state, step.move)
            if k:
                assert step.pre_state == w.steps[k - 1].post_state
        assert matches(w.steps[-1].post_state, CROSS)


def test_walkthrough_explanations_name_face_and_direction(pdb_qtm):
    for seed in range(100, 140):
        start, _ = scramble(seed, 1 + seed % 5, Metric.QTM)
        w = plan_walkthrough(start, CROSS, pdb_qtm)
        for step in w.steps:
            face_word = step.move.face.name.capitalize()
            assert face_word in FACE_WORDS
            assert step.explanation.startswith(f"Turn the {face_word} face ")
            assert "white-" in step.explanation
            assert step.explanation.endswith(".")


def test_walkthrough_is_deterministic(pdb_qtm):
    start, _ = scramble(7, 6, Metric.QTM)
    first = plan_walkthrough(start, CROSS, pdb_qtm)
    second = plan_walkthrough(start, CROSS, pdb_qtm)
    assert first == second


def test_cursor_forward_and_rewind(pdb_qtm):
    start, _ = scramble(3, 5, Metric.QTM)
    w = plan_walkthrough(start, CROSS, pdb_qtm)
    n = len(w.steps)
    assert n >= 2
    assert walkthrough_state(w) == start
    positions = [w]
    for _ in range(n):
        positions.append(step_forward(positions[-1]))
    assert positions[-1].cursor == n
    assert walkthrough_state(positions[-1]) == w.steps[-1].post_state
    with pytest.raises(ValueError, match="cursor at boundary"):
        step_forward(positions[-1])
    back = positions[-1]
    for _ in range(n):
        back = step_rewind(back)
    assert back == w
    with pytest.raises(ValueError, match="cursor at boundary"):
        step_rewind(back)
    for k in range(1, n):
        assert walkthrough_state(positions[k]) == w.steps[k - 1].post_state
    assert all(p.steps == w.steps for p in positions)


def test_hint_at_goal_is_distinguished(pdb_qtm):
    move, text = hint(SOLVED, CROSS, pdb_qtm)
    assert move is None
    assert "goal reached" in text.lower()
    assert text == GOAL_REACHED_TEXT


def test_hint_one_move_out(pdb_qtm):
    state = apply_move(SOLVED, Move(Face.FRONT, 1))
    move, text = hint(state, CROSS, pdb_qtm)
    assert move == Move(Face.FRONT, 3)
    assert text == ("Turn the Front face counterclockwise "
                    "to lock the white-green edge into the cross.")


def test_hint_half_turn_wording(pdb_htm):
    state = apply_move(SOLVED, Move(Face.FRONT, 2))
    move, text = hint(state, CROSS, pdb_htm)
    assert move == Move(Face.FRONT, 2)
    assert "twice" in text
    assert "white-green" in text


def test_hint_iteration_descends_to_goal(pdb_qtm):
    for seed in range(30):
        state, _ = scramble(seed, 1 + seed % 7, Metric.QTM)
        taken = 0
        expected = heuristic(state, pdb_qtm)
        while True:
            h_before = heuristic(state, pdb_qtm)
            move, text = hint(state, CROSS, pdb_qtm)
            if move is None:
                assert h_before == 0
                assert text == GOAL_REACHED_TEXT
                break
            assert text
            state = apply_move(state, move)
            taken += 1
            assert heuristic(state, pdb_qtm) == h_before - 1
        assert taken == expected
        assert matches(state, CROSS)


def test_scenario_catalog_shape():
    scenarios = scenario_catalog(11)
    assert [s.id for s in scenarios] == list(range(1, 10))
    assert [s.max_moves for s in scenarios] == [1, 1, 1, 2, 2, 2, 3, 3, 3]
    for s in scenarios:
        assert s.title
        assert s.goal == CROSS
        assert not matches(s.start_state, s.goal)


def test_scenarios_solvable_within_max_moves(pdb_qtm):
    for s in scenario_catalog(11):
        solution = solve_optimal(s.start_state, s.goal, pdb_qtm)
        assert 1 <= len(solution) <= s.max_moves


def test_scenario_catalog_deterministic():
    assert scenario_catalog(5) == scenario_catalog(5)
    assert scenario_catalog(5) != scenario_catalog(6)


def test_catalog_file_round_trip(tmp_path):
    scenarios = scenario_catalog(11)
    path = tmp_path / "scenarios.txt"
    save_catalog(scenarios, path)
    assert load_catalog(path) == scenarios


def test_catalog_file_rejects_bad_header(tmp_path):
    path = tmp_path / "bogus.txt"
    path.write_text("something else\n1\tx\n", encoding="utf-8")
    with pytest.raises(ValueError, match="scenario catalog"):
        load_catalog(path)


def test_walkthrough_subgoal_annotations(pdb_qtm):
    states = [scramble(seed, 1 + seed % 4, Metric.QTM)[0] for seed in range(120)]
    graph = build_graph_from_states(CROSS, states, pdb_qtm)
    group = group_by_name(graph.group_name)
    annotated = 0
    for seed in (2, 5, 9, 13):
        start, _ = scramble(seed, 4, Metric.QTM)
        w = plan_walkthrough(start, CROSS, pdb_qtm, graph)
        if not w.steps:
            continue
        valid_ids = {n.id for n in graph.nodes}
        # The final state matches the goal node, so every step sees a
        # subgoal somewhere ahead of it.
        for step in w.steps:
            assert step.subgoal_id in valid_ids
        last = w.steps[-1]
        node = graph.nodes[last.subgoal_id]
        assert matches(canonicalize(last.post_state, group), node.pattern)
        annotated += 1
    assert annotated >= 3


def test_walkthrough_without_graph_has_no_annotations(pdb_qtm):
    start, _ = scramble(4, 4, Metric.QTM)
    w = plan_walkthrough(start, CROSS, pdb_qtm)
    assert all(step.subgoal_id is None for step in w.steps)
