"""Feature matrix, clustering, gains, Bayesian summaries, simulator."""

import warnings

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from cubetutor.analytics import (
    CLUSTER_NAMES,
    CLUSTER_PROFILES,
    FeatureMatrix,
    LogValidationError,
    cluster_cohort,
    design_matrix,
    elbow_curve,
    kmeans,
    match_profiles,
    normalized_gain,
    posterior_contrast,
    reference_zscores,
    regression_posterior,
    run_pipeline,
    save_scores,
    select_k_elbow,
    simulate_cohort,
    standardize,
    synthesize_log,
    _verdict,
)
from cubetutor.telemetry import aggregate_cohort, validate_log, write_log


def column_matrix(values, column=0):
    rows = np.zeros((len(values), 8))
    rows[:, column] = values
    return FeatureMatrix(rows, tuple(f"s{i:03d}" for i in range(len(values))))


# ---------------------------------------------------------------- features

def test_standardize_simple_column():
    m = column_matrix([1.0, 2.0, 3.0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        z = standardize(m)
    assert np.allclose(z.values[:, 0], [-1.0, 0.0, 1.0])


def test_standardize_constant_column_warns_and_zeroes():
    m = column_matrix([1.0, 2.0, 3.0])
    with pytest.warns(UserWarning, match="zero-variance column"):
        z = standardize(m)
    assert np.all(z.values[:, 1:] == 0.0)


def test_standardize_is_idempotent():
    rng = np.random.default_rng(3)
    m = FeatureMatrix(rng.normal(size=(12, 8)), tuple(f"s{i}" for i in range(12)))
    z = standardize(m)
    z2 = standardize(z)
    assert np.abs(z2.values - z.values).max() < 1e-12


def test_standardize_needs_two_rows():
    m = FeatureMatrix(np.zeros((1, 8)), ("s1",))
    with pytest.raises(ValueError, match="insufficient rows"):
        standardize(m)


def test_feature_matrix_round_trip(tmp_path):
    matrix, _, _ = simulate_cohort(3, 0.2, seed=1)
    path = tmp_path / "features.csv"
    matrix.save(path)
    loaded = FeatureMatrix.load(path)
    assert loaded.student_ids == matrix.student_ids
    assert np.array_equal(loaded.values, matrix.values)


def test_feature_matrix_rejects_bad_shape_and_nan():
    with pytest.raises(ValueError, match="n x 8"):
        FeatureMatrix(np.zeros((2, 3)), ("a", "b"))
    bad = np.zeros((2, 8))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError, match="missing values"):
        FeatureMatrix(bad, ("a", "b"))


# ---------------------------------------------------------------- clustering

def test_kmeans_two_obvious_clusters():
    m = column_matrix([0.0, 0.1, 10.0, 10.1])
    result = kmeans(m, 2, seed=0)
    centers = sorted(result.centers[:, 0])
    assert np.allclose(centers, [0.05, 10.05])
    assert abs(result.wss - 0.01) < 1e-12
    assert len(set(result.assignments)) == 2


def test_kmeans_k_equals_rows_is_exact():
    m = column_matrix([0.0, 1.0, 2.0, 5.0])
    result = kmeans(m, 4, seed=0)
    assert result.wss == 0.0


def test_kmeans_rejects_bad_k():
    m = column_matrix([0.0, 1.0])
    with pytest.raises(ValueError, match="exceeds"):
        kmeans(m, 3)
    with pytest.raises(ValueError, match="at least 1"):
        kmeans(m, 0)


def test_kmeans_recovers_planted_gaussians():
    rng = np.random.default_rng(8)
    rows = np.concatenate([
        rng.normal(0.0, 0.5, (20, 8)),
        rng.normal(5.0, 0.5, (20, 8)),
        rng.normal(-5.0, 0.5, (20, 8)),
    ])
    labels = np.repeat([0, 1, 2], 20)
    m = FeatureMatrix(rows, tuple(f"s{i}" for i in range(60)))
    result = kmeans(m, 3, seed=4)
    assert adjusted_rand_score(labels, result.assignments) >= 0.9


def test_kmeans_deterministic_and_wss_consistent():
    m, _, _ = simulate_cohort(10, 0.4, seed=5)
    a = kmeans(m, 3, seed=9)
    b = kmeans(m, 3, seed=9)
    assert a.assignments == b.assignments
    assert a.wss == b.wss
    recomputed = sum(
        float(((m.values[i] - a.centers[c]) ** 2).sum())
        for i, c in enumerate(a.assignments))
    assert abs(recomputed - a.wss) < 1e-8


def test_elbow_worked_example():
    assert select_k_elbow((100.0, 20.0, 18.0, 17.0)) == 2


def test_elbow_linear_curve_breaks_ties_low():
    assert select_k_elbow((50.0, 40.0, 30.0, 20.0, 10.0)) == 2


def test_elbow_scale_invariance():
    rng = np.random.default_rng(12)
    base = (220.0, 90.0, 35.0, 30.0, 26.0, 23.0)
    k = select_k_elbow(base)
    for _ in range(100):
        c = float(rng.uniform(0.01, 1000.0))
        assert select_k_elbow(tuple(c * w for w in base)) == k


def test_elbow_rejects_bad_curves():
    with pytest.raises(ValueError, match="curve too short"):
        select_k_elbow((10.0, 5.0))
    with pytest.raises(ValueError, match="non-increasing"):
        select_k_elbow((10.0, 12.0, 5.0))


def test_elbow_finds_planted_k3():
    matrix, labels, _ = simulate_cohort(20, 0.3, seed=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        z = standardize(matrix)
    result = cluster_cohort(z, kmax=8, seed=0)
    assert result.k == 3
    assert len(result.wss_curve) == 8
    assert all(b <= a + 1e-9 for a, b in zip(result.wss_curve, result.wss_curve[1:]))
    assert adjusted_rand_score(labels, result.assignments) >= 0.9


# ---------------------------------------------------------------- gains

def test_gain_examples():
    assert normalized_gain(0.5, 0.75).gain == pytest.approx(0.5)
    assert normalized_gain(0.5, 0.4).gain == pytest.approx(-0.2)
    for x in (0.1, 0.5, 1.0):
        assert normalized_gain(x, x).gain == 0.0
    assert normalized_gain(0.0, 0.0).gain == 0.0


def test_gain_range_and_sign():
    for pre in np.linspace(0.0, 1.0, 21):
        for post in np.linspace(0.0, 1.0, 21):
            record = normalized_gain(float(pre), float(post))
            assert -1.0 <= record.gain <= 1.0
            assert np.sign(record.gain) == np.sign(post - pre)


def test_gain_rejects_out_of_range():
    with pytest.raises(ValueError, match="outside"):
        normalized_gain(-0.1, 0.5)
    with pytest.raises(ValueError, match="outside"):
        normalized_gain(0.5, 1.2)


# ---------------------------------------------------------------- contrasts

def test_contrast_identical_data_is_even_odds():
    values = list(np.arange(8.0)) * 2
    labels = ["x"] * 8 + ["y"] * 8
    result = posterior_contrast(values, labels, draws=10_000, seed=1)[0]
    assert abs(result.prob_gt_zero - 0.5) <= 0.02
    assert result.mean_diff == 0.0
    assert result.verdict == "inconclusive"


def test_contrast_zero_variance_groups_are_exactly_even():
    values = [2.0] * 4 + [2.0] * 4
    labels = ["x"] * 4 + ["y"] * 4
    result = posterior_contrast(values, labels, draws=5_000, seed=0)[0]
    assert result.prob_gt_zero == 0.5


def test_contrast_separated_groups():
    values = [0.0, 0.01, -0.01, 0.0] + [100.0, 100.01, 99.99, 100.0]
    labels = ["low"] * 4 + ["high"] * 4
    result = posterior_contrast(values, labels, draws=10_000, seed=2)[0]
    # groups sort alphabetically: high first
    assert result.group_a == "high"
    assert result.prob_gt_zero > 0.999
    assert result.verdict == "likely"


def test_contrast_matches_long_run_oracle():
    # Frozen: data from default_rng(424242); a 1e6-draw run of the same
    # Student-t posterior family gave prob 0.269085.
    gen = np.random.default_rng(424242)
    a = gen.normal(0.0, 1.0, 10)
    b = gen.normal(0.7, 1.0, 11)
    values = np.concatenate([a, b])
    labels = ["alpha"] * 10 + ["beta"] * 11
    result = posterior_contrast(values, labels, draws=10_000, seed=3)[0]
    assert abs(result.prob_gt_zero - 0.269085) <= 0.02


def test_contrast_swap_is_exact():
    matrix, labels, _ = simulate_cohort(5, 0.5, seed=2)
    values = matrix.values[:, 4]
    names = [CLUSTER_NAMES[c] for c in labels]
    for result in posterior_contrast(values, names, draws=2_000, seed=4):
        mirrored = result.swapped()
        assert mirrored.prob_gt_zero == 1.0 - result.prob_gt_zero
        assert mirrored.mean_diff == -result.mean_diff
        assert mirrored.verdict == result.verdict
        assert (mirrored.group_a, mirrored.group_b) == (result.group_b, result.group_a)


def test_contrast_covers_all_pairs():
    values = list(range(12))
    labels = ["a"] * 4 + ["b"] * 4 + ["c"] * 4
    results = posterior_contrast(values, labels, draws=500, seed=0)
    assert [(r.group_a, r.group_b) for r in results] == [("a", "b"), ("a", "c"), ("b", "c")]


def test_contrast_errors():
    with pytest.raises(ValueError, match="group 'y' has fewer than 2"):
        posterior_contrast([1.0, 2.0, 3.0], ["x", "x", "y"], draws=100)
    with pytest.raises(ValueError, match="at least 2 groups"):
        posterior_contrast([1.0, 2.0], ["x", "x"], draws=100)


def test_verdict_thresholds():
    assert _verdict(0.95) == "likely"
    assert _verdict(0.05) == "likely"
    assert _verdict(0.85) == "suggestive"
    assert _verdict(0.12) == "suggestive"
    assert _verdict(0.849) == "inconclusive"
    assert _verdict(0.5) == "inconclusive"


# ---------------------------------------------------------------- regression

def test_regression_noiseless_recovery():
    rng = np.random.default_rng(5)
    pre = rng.uniform(0.0, 1.0, 40)
    labels = ["a"] * 20 + ["b"] * 20
    dummy = np.array([0.0] * 20 + [1.0] * 20)
    post = 0.2 + 0.3 * dummy + 0.5 * pre
    design, names = design_matrix(labels, covariate=pre)
    posterior = regression_posterior(post, design, names, draws=2_000, seed=0)
    assert names == ("intercept", "cluster[b]", "pre_score")
    assert np.allclose(posterior.means, (0.2, 0.3, 0.5), atol=1e-6)
    for mean, (lo, hi) in zip(posterior.means, posterior.intervals):
        assert lo <= mean <= hi


def test_regression_intercept_only():
    design = np.ones((3, 1))
    posterior = regression_posterior([1.0, 2.0, 3.0], design, ["intercept"],
                                     draws=20_000, seed=2)
    assert posterior.means == (2.0,)
    lo, hi = posterior.intervals[0]
    assert lo < 2.0 < hi
    assert abs((hi - 2.0) - (2.0 - lo)) < 0.5


def test_regression_rank_deficiency_names_columns():
    design = np.column_stack([np.ones(10), np.arange(10.0), np.arange(10.0) * 2])
    with pytest.raises(ValueError, match="collinear columns: x, x2"):
        regression_posterior(np.arange(10.0), design, ["intercept", "x", "x2"],
                             draws=100, seed=0)


def test_regression_needs_enough_rows():
    design = np.column_stack([np.ones(3), np.arange(3.0)])
    with pytest.raises(ValueError, match="at least 4 rows"):
        regression_posterior([1.0, 2.0, 3.0], design, ["intercept", "x"], draws=100)


def test_regression_interval_coverage_and_determinism():
    rng = np.random.default_rng(77)
    x = rng.normal(size=(30, 2))
    design = np.column_stack([np.ones(30), x])
    y = 1.0 + x @ np.array([0.5, -0.25]) + rng.normal(0, 0.3, 30)
    names = ["intercept", "x1", "x2"]
    a = regression_posterior(y, design, names, draws=4_000, seed=11)
    b = regression_posterior(y, design, names, draws=4_000, seed=11)
    assert a.means == b.means and a.intervals == b.intervals
    for mean, (lo, hi) in zip(a.means, a.intervals):
        assert lo <= mean <= hi


def test_single_dummy_regression_matches_contrast_mean():
    gen = np.random.default_rng(424242)
    values = np.concatenate([gen.normal(0.0, 1.0, 10), gen.normal(0.7, 1.0, 11)])
    labels = ["alpha"] * 10 + ["beta"] * 11
    contrast = posterior_contrast(values, labels, draws=10_000, seed=3)[0]
    design, names = design_matrix(labels)
    posterior = regression_posterior(values, design, names, draws=10_000, seed=7)
    assert posterior.means[1] == pytest.approx(-contrast.mean_diff, abs=1e-12)


# ---------------------------------------------------------------- simulator

def test_simulate_noiseless_rows_sit_on_profiles():
    matrix, labels, _ = simulate_cohort(4, 0.0, seed=9)
    z = reference_zscores(matrix)
    for i, c in enumerate(labels):
        assert np.allclose(z[i], CLUSTER_PROFILES[c], atol=1e-12)


def test_simulate_label_counts_and_validation():
    matrix, labels, gains = simulate_cohort(7, 0.3, seed=1)
    assert matrix.n_rows == 21
    assert [int((labels == c).sum()) for c in range(3)] == [7, 7, 7]
    assert len(gains) == 21
    with pytest.raises(ValueError, match="at least 2"):
        simulate_cohort(1, 0.3)


def test_simulate_gain_structure():
    _, labels, gains = simulate_cohort(40, 0.3, seed=3)
    values = np.array([g.gain for g in gains])
    assert values[labels == 0].mean() > 0.3
    for c in (1, 2):
        assert abs(values[labels == c].mean()) < 0.1
    for g in gains:
        assert g.gain == pytest.approx(normalized_gain(g.pre, g.post).gain)


def test_synthesized_log_round_trips_counts():
    matrix, labels, _ = simulate_cohort(20, 0.3, seed=0)
    events = synthesize_log(matrix)
    assert validate_log(events) == []
    cohort = aggregate_cohort(events)
    assert tuple(cohort) == matrix.student_ids
    for sid, row in zip(matrix.student_ids, matrix.values):
        vec = cohort[sid]
        assert vec.practice_tasks == max(round(row[0]), 0)
        assert vec.challenge_started == max(round(row[1]), 0)
        assert vec.challenge_completed == min(max(round(row[2]), 0),
                                              vec.challenge_started)
        assert vec.cube_resets == max(round(row[3]), 0)
        assert vec.cube_moves == max(round(row[4]), 0)
        if vec.cube_moves:
            assert abs(vec.pct_non_ai_moves + vec.pct_practice_moves
                       + vec.pct_challenge_moves - 1.0) <= 1e-9


def test_synthesized_cohort_recovers_profile_zscores():
    matrix, labels, _ = simulate_cohort(20, 0.3, seed=0)
    events = synthesize_log(matrix)
    recovered = FeatureMatrix.from_cohort(aggregate_cohort(events))
    z = reference_zscores(recovered)
    for c in range(3):
        errors = np.abs(z[labels == c].mean(axis=0) - CLUSTER_PROFILES[c])
        assert errors.max() <= 0.25


def test_challenge_moves_without_started_tasks_fall_back_to_free():
    rows = np.zeros((2, 8))
    rows[0] = (0, 0, 0, 0, 4, 0.0, 0.0, 1.0)
    rows[1] = (0, 0, 0, 2, 4, 0.0, 1.0, 0.0)
    matrix = FeatureMatrix(rows, ("s001", "s002"))
    cohort = aggregate_cohort(synthesize_log(matrix))
    # No challenge task may exist, so those moves are counted as free.
    assert cohort["s001"].challenge_started == 0
    assert cohort["s001"].pct_non_ai_moves == 1.0
    # Practice moves ride in a started-but-never-completed practice task.
    assert cohort["s002"].practice_tasks == 0
    assert cohort["s002"].pct_practice_moves == 1.0
    assert cohort["s002"].cube_resets == 2


def test_match_profiles_labels_all_three():
    assert match_profiles(CLUSTER_PROFILES) == CLUSTER_NAMES
    shuffled = CLUSTER_PROFILES[[2, 0, 1]]
    assert match_profiles(shuffled) == (CLUSTER_NAMES[2], CLUSTER_NAMES[0],
                                        CLUSTER_NAMES[1])


# ---------------------------------------------------------------- pipeline

@pytest.fixture(scope="module")
def cohort_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cohort")
    matrix, labels, gains = simulate_cohort(15, 0.3, seed=0)
    events = synthesize_log(matrix)
    log = root / "cohort.log"
    scores = root / "scores.csv"
    write_log(events, log)
    save_scores(matrix.student_ids, gains, scores)
    return log, scores


def test_pipeline_reports_three_labeled_profiles(cohort_files, tmp_path):
    log, scores = cohort_files
    out = tmp_path / "report"
    summary = run_pipeline(log, out, scores, kmax=8, seed=0, draws=2_000)
    assert summary["k"] == 3
    assert set(summary["cluster_names"]) == set(CLUSTER_NAMES)
    for name in ("descriptives.txt", "clusters.txt", "contrasts.txt",
                 "gains.txt", "regression.txt"):
        assert (out / name).exists()
    regression = (out / "regression.txt").read_text(encoding="utf-8")
    assert "pre_score" in regression
    gains_text = (out / "gains.txt").read_text(encoding="utf-8")
    challengers = [line for line in gains_text.splitlines()
                   if line.startswith("Challengers")]
    assert len(challengers) == 1
    assert float(challengers[0].split("\t")[2]) > 0.2


def test_pipeline_is_byte_deterministic(cohort_files, tmp_path):
    log, scores = cohort_files
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_pipeline(log, out_a, scores, kmax=8, seed=0, draws=1_000)
    run_pipeline(log, out_b, scores, kmax=8, seed=0, draws=1_000)
    for name in ("descriptives.txt", "clusters.txt", "contrasts.txt",
                 "gains.txt", "regression.txt"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_pipeline_rejects_empty_and_invalid_logs(tmp_path):
    empty = tmp_path / "empty.log"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(LogValidationError, match="log is empty"):
        run_pipeline(empty, tmp_path / "out")
    bad = tmp_path / "bad.log"
    bad.write_text("5\ts1\tcube_move\t-\t-\tU\tfree\n", encoding="utf-8")
    with pytest.raises(LogValidationError, match="before session_start"):
        run_pipeline(bad, tmp_path / "out2")


def test_pipeline_requires_scores_for_all_students(cohort_files, tmp_path):
    log, _ = cohort_files
    partial = tmp_path / "partial.csv"
    partial.write_text("student_id,pre,post\ns001,0.5,0.6\n", encoding="utf-8")
    with pytest.raises(ValueError, match="scores missing"):
        run_pipeline(log, tmp_path / "out", partial, draws=500)
