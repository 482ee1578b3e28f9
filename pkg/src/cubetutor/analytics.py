"""Cohort analysis pipeline over aggregated session features.

Stages: feature matrix assembly, z-scoring, k-means with elbow-based k
selection, normalized learning gains, Bayesian group contrasts and a
Bayesian linear regression (flat priors, closed-form Student-t
posteriors summarized by Monte Carlo), plus a seeded cohort simulator
and event-log synthesizer so the whole chain can run end to end
without human data.  All randomness flows through numpy Generators
seeded per purpose, so identical inputs give identical outputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .telemetry import (
    FEATURE_NAMES,
    FeatureVector,
    SessionEvent,
    aggregate_cohort,
    read_log,
    validate_log,
)

N_FEATURES = len(FEATURE_NAMES)

# Cohort-level raw feature location/scale used by the simulator's
# affine map between z-space profiles and raw activity counts.
RAW_FEATURE_MEANS = np.array([1.45, 1.94, 1.06, 8.23, 119.65, 0.87, 0.02, 0.11])
RAW_FEATURE_SDS = np.array([2.31, 2.48, 1.18, 7.94, 72.50, 0.20, 0.04, 0.19])

# Archetype z-score profiles the simulator plants and the reporter
# uses to label a 3-cluster solution.
CLUSTER_NAMES = ("Challengers", "Explorers", "Emerging Strategists")
CLUSTER_PROFILES = np.array([
    [0.02, 1.10, 0.93, 0.12, 0.60, -1.74, -0.16, 1.84],
    [1.16, 0.63, 1.00, -0.60, -0.16, -0.01, 1.17, -0.22],
    [-0.55, -0.69, -0.80, 0.24, -0.14, 0.62, -0.49, -0.54],
])

_MOVE_TOKENS = ("U", "R", "F", "D", "L", "B")


class LogValidationError(ValueError):
    def __init__(self, violations: Sequence[str]):
        super().__init__("log failed validation: " + "; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    student_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape[1] != N_FEATURES:
            raise ValueError(f"feature matrix must be n x {N_FEATURES}")
        if len(self.student_ids) != self.values.shape[0]:
            raise ValueError("one student id per row required")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature matrix contains missing values")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_cohort(cls, cohort: Mapping[str, FeatureVector]) -> "FeatureMatrix":
        ids = tuple(cohort)
        rows = np.array([cohort[sid].as_tuple() for sid in ids], dtype=float)
        return cls(rows, ids)

    def save(self, path: str | Path) -> None:
        lines = ["student_id," + ",".join(FEATURE_NAMES)]
        for sid, row in zip(self.student_ids, self.values):
            lines.append(sid + "," + ",".join(repr(float(v)) for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureMatrix":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        expected = "student_id," + ",".join(FEATURE_NAMES)
        if not lines or lines[0] != expected:
            raise ValueError("feature matrix file has a wrong header")
        ids = []
        rows = []
        for line in lines[1:]:
            if not line.strip():
                continue
            fields = line.split(",")
            if len(fields) != N_FEATURES + 1:
                raise ValueError(f"malformed feature row: {line!r}")
            ids.append(fields[0])
            rows.append([float(v) for v in fields[1:]])
        return cls(np.array(rows, dtype=float), tuple(ids))


def standardize(m: FeatureMatrix) -> FeatureMatrix:
    """Column z-scores with the n-1 denominator; constant columns
    become zeros and raise a warning instead of dividing by zero."""
    if m.n_rows < 2:
        raise ValueError("insufficient rows: standardization needs at least 2")
    means = m.values.mean(axis=0)
    sds = m.values.std(axis=0, ddof=1)
    z = np.zeros_like(m.values)
    for j in range(N_FEATURES):
        if sds[j] == 0:
            warnings.warn(f"zero-variance column: {FEATURE_NAMES[j]}", stacklevel=2)
        else:
            z[:, j] = (m.values[:, j] - means[j]) / sds[j]
    return FeatureMatrix(z, m.student_ids)


def reference_zscores(m: FeatureMatrix) -> np.ndarray:
    """z-scores against the fixed cohort reference scales (the inverse
    of the simulator's affine map), not the sample's own moments."""
    return (m.values - RAW_FEATURE_MEANS) / RAW_FEATURE_SDS


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    k: int
    assignments: tuple[int, ...]
    centers: np.ndarray
    wss: float
    wss_curve: tuple[float, ...]
    seed: int


def _kmeans_once(x: np.ndarray, k: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, float]:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[j] = x[idx]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))

    assign = np.full(n, -1)
    prev_wss = np.inf
    for _ in range(500):
        dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = dist.argmin(axis=1)
        wss = float(dist[np.arange(n), new_assign].sum())
        assert wss <= prev_wss + 1e-9, "Lloyd iteration increased wss"
        prev_wss = wss
        reseeded = False
        for j in range(k):
            members = x[new_assign == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:
                # Empty cluster: reseed at the point farthest from its
                # current center; nobody was assigned here, so the
                # objective cannot increase.
                centers[j] = x[dist[np.arange(n), new_assign].argmax()]
                reseeded = True
        if not reseeded and np.array_equal(new_assign, assign):
            break
        assign = new_assign
    dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    assign = dist.argmin(axis=1)
    wss = float(dist[np.arange(n), assign].sum())
    return assign, centers, wss


def kmeans(m: FeatureMatrix, k: int, seed: int = 0, restarts: int = 25) -> ClusteringResult:
    """Best of `restarts` k-means++ starts, Lloyd-refined."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > m.n_rows:
        raise ValueError(f"k={k} exceeds the {m.n_rows} rows available")
    best: tuple[np.ndarray, np.ndarray, float] | None = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        candidate = _kmeans_once(m.values, k, rng)
        if best is None or candidate[2] < best[2]:
            best = candidate
    assign, centers, wss = best
    return ClusteringResult(k, tuple(int(a) for a in assign), centers, wss, (), seed)


def elbow_curve(m: FeatureMatrix, kmax: int = 8, seed: int = 0,
                restarts: int = 25) -> tuple[float, ...]:
    kmax = min(kmax, m.n_rows)
    return tuple(kmeans(m, k, seed, restarts).wss for k in range(1, kmax + 1))


def select_k_elbow(wss_curve: Sequence[float]) -> int:
    """k in [2, kmax-1] with the largest second difference of wss;
    ties break toward the smallest k."""
    if len(wss_curve) < 3:
        raise ValueError("curve too short: need wss for at least k=1..3")
    for a, b in zip(wss_curve, wss_curve[1:]):
        if b > a + 1e-9:
            raise ValueError("wss curve must be non-increasing")
    best_k = None
    best_d2 = None
    for k in range(2, len(wss_curve)):
        d2 = wss_curve[k - 2] - 2 * wss_curve[k - 1] + wss_curve[k]
        if best_d2 is None or d2 > best_d2:
            best_k, best_d2 = k, d2
    return best_k


def cluster_cohort(m: FeatureMatrix, kmax: int = 8, seed: int = 0,
                   restarts: int = 25) -> ClusteringResult:
    """Elbow-selected k, then k-means at that k, curve attached."""
    curve = elbow_curve(m, kmax, seed, restarts)
    k = select_k_elbow(curve)
    result = kmeans(m, k, seed, restarts)
    return ClusteringResult(result.k, result.assignments, result.centers,
                            result.wss, curve, seed)


@dataclass(frozen=True)
class GainRecord:
    pre: float
    post: float
    gain: float


def normalized_gain(pre: float, post: float) -> GainRecord:
    """Gain relative to available headroom (improvement) or to the
    starting level (decline); 0 at no change, including pre=post=0."""
    if not (0.0 <= pre <= 1.0 and 0.0 <= post <= 1.0):
        raise ValueError(f"scores outside [0,1]: pre={pre}, post={post}")
    if post > pre:
        gain = (post - pre) / (1.0 - pre)
    elif post == pre:
        gain = 0.0
    else:
        gain = (post - pre) / pre
    return GainRecord(pre, post, gain)


@dataclass(frozen=True)
class ContrastResult:
    group_a: str
    group_b: str
    mean_diff: float
    prob_gt_zero: float
    verdict: str

    def swapped(self) -> "ContrastResult":
        return ContrastResult(self.group_b, self.group_a, -self.mean_diff,
                              1.0 - self.prob_gt_zero, self.verdict)


def _verdict(prob: float) -> str:
    tail = max(prob, 1.0 - prob)
    if tail >= 0.95:
        return "likely"
    if tail >= 0.85:
        return "suggestive"
    return "inconclusive"


def posterior_contrast(values: Sequence[float], group_labels: Sequence[str],
                       draws: int = 10_000, seed: int = 0) -> list[ContrastResult]:
    """All pairwise mean contrasts under a normal model with a
    noninformative prior: each group mean's posterior is its sample
    mean plus a scaled Student-t on n-1 degrees of freedom."""
    values = np.asarray(values, dtype=float)
    labels = [str(g) for g in group_labels]
    if len(values) != len(labels):
        raise ValueError("values and group labels differ in length")
    groups = sorted(set(labels))
    if len(groups) < 2:
        raise ValueError("needs at least 2 groups")
    posteriors = {}
    means = {}
    for i, g in enumerate(groups):
        sample = values[np.array([lab == g for lab in labels])]
        if len(sample) < 2:
            raise ValueError(f"group {g!r} has fewer than 2 observations")
        n = len(sample)
        mean = float(sample.mean())
        sd = float(sample.std(ddof=1))
        rng = np.random.default_rng([seed, i])
        t = rng.standard_t(n - 1, draws)
        posteriors[g] = mean + sd / np.sqrt(n) * t
        means[g] = mean
    results = []
    for a_idx in range(len(groups)):
        for b_idx in range(a_idx + 1, len(groups)):
            a, b = groups[a_idx], groups[b_idx]
            diff = posteriors[a] - posteriors[b]
            prob = float(((diff > 0).sum() + 0.5 * (diff == 0).sum()) / draws)
            results.append(ContrastResult(a, b, means[a] - means[b], prob, _verdict(prob)))
    return results


@dataclass(frozen=True, eq=False)
class RegressionPosterior:
    names: tuple[str, ...]
    means: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]
    draws: int
    seed: int


def design_matrix(labels: Sequence[str],
                  covariate: Sequence[float] | None = None) -> tuple[np.ndarray, tuple[str, ...]]:
    """Intercept + dummy columns for all but the first sorted label,
    plus an optional trailing covariate column."""
    labels = [str(g) for g in labels]
    groups = sorted(set(labels))
    columns = [np.ones(len(labels))]
    names = ["intercept"]
    for g in groups[1:]:
        columns.append(np.array([1.0 if lab == g else 0.0 for lab in labels]))
        names.append(f"cluster[{g}]")
    if covariate is not None:
        columns.append(np.asarray(covariate, dtype=float))
        names.append("pre_score")
    return np.column_stack(columns), tuple(names)


def regression_posterior(outcome: Sequence[float], design: np.ndarray,
                         names: Sequence[str], draws: int = 10_000,
                         seed: int = 0) -> RegressionPosterior:
    """Bayesian linear regression with a flat coefficient prior and
    reference variance prior; coefficient posterior is multivariate
    Student-t around the least-squares fit, summarized by Monte Carlo."""
    y = np.asarray(outcome, dtype=float)
    x = np.asarray(design, dtype=float)
    n, p = x.shape
    if len(names) != p:
        raise ValueError("one name per design column required")
    if n < p + 2:
        raise ValueError(f"needs at least {p + 2} rows for {p} coefficients")
    rank = np.linalg.matrix_rank(x)
    if rank < p:
        collinear = [names[j] for j in range(p)
                     if np.linalg.matrix_rank(np.delete(x, j, axis=1)) == rank]
        raise ValueError("rank-deficient design; collinear columns: "
                         + ", ".join(collinear))
    beta_hat, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta_hat
    rss = max(float(resid @ resid), 0.0)
    df = n - p
    sigma2 = rss / np.random.default_rng([seed, 0]).chisquare(df, draws)
    z = np.random.default_rng([seed, 1]).standard_normal((draws, p))
    scale = np.linalg.cholesky(np.linalg.inv(x.T @ x))
    betas = beta_hat + np.sqrt(sigma2)[:, None] * (z @ scale.T)
    lo = np.percentile(betas, 2.5, axis=0)
    hi = np.percentile(betas, 97.5, axis=0)
    return RegressionPosterior(
        tuple(names),
        tuple(float(b) for b in beta_hat),
        tuple((float(a), float(b)) for a, b in zip(lo, hi)),
        draws, seed)


def simulate_cohort(n_per_cluster: int, noise_sd: float,
                    seed: int = 0) -> tuple[FeatureMatrix, np.ndarray, list[GainRecord]]:
    """Synthetic cohort: three archetype clusters in z-space mapped to
    raw activity features, plus pre/post scores where only the first
    archetype improves on average."""
    if n_per_cluster < 2:
        raise ValueError("n_per_cluster must be at least 2")
    n = 3 * n_per_cluster
    labels = np.repeat(np.arange(3), n_per_cluster)
    z = CLUSTER_PROFILES[labels]
    z = z + np.random.default_rng([seed, 0]).normal(0.0, noise_sd, (n, N_FEATURES))
    raw = RAW_FEATURE_MEANS + z * RAW_FEATURE_SDS
    raw[:, :5] = np.clip(raw[:, :5], 0.0, None)
    raw[:, 5:] = np.clip(raw[:, 5:], 0.0, 1.0)
    ids = tuple(f"s{i + 1:03d}" for i in range(n))
    matrix = FeatureMatrix(raw, ids)

    pre = np.random.default_rng([seed, 1]).uniform(0.25, 0.85, n)
    g_rng = np.random.default_rng([seed, 2])
    g = np.where(labels == 0,
                 np.clip(g_rng.normal(0.5, 0.15, n), 0.05, 0.95),
                 np.clip(g_rng.normal(0.0, 0.08, n), -0.95, 0.95))
    post = np.where(g > 0, pre + g * (1.0 - pre), pre + g * pre)
    gains = [normalized_gain(float(a), float(b)) for a, b in zip(pre, post)]
    return matrix, labels, gains


def _apportion(total: int, weights: Sequence[float]) -> list[int]:
    """Largest-remainder split of `total` into integer parts."""
    if total <= 0:
        return [0] * len(weights)
    w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
    if w.sum() <= 0:
        out = [0] * len(weights)
        out[0] = total
        return out
    shares = w / w.sum() * total
    base = np.floor(shares).astype(int)
    remainder = total - int(base.sum())
    order = sorted(range(len(weights)), key=lambda j: (-(shares[j] - base[j]), j))
    for j in order[:remainder]:
        base[j] += 1
    return [int(v) for v in base]


def synthesize_log(matrix: FeatureMatrix,
                   base_ts: int = 1_600_000_000_000) -> list[SessionEvent]:
    """One synthetic session per row whose aggregation round-trips the
    row up to count rounding.  Context moves live inside started tasks;
    when a row has challenge-context moves but no started challenge
    task, those moves fall back to free context (the smaller
    distortion).  Resets are emitted inside a challenge task when one
    exists so both reset readings coincide."""
    events: list[SessionEvent] = []
    for i, (sid, row) in enumerate(zip(matrix.student_ids, matrix.values)):
        practice = max(int(round(row[0])), 0)
        started = max(int(round(row[1])), 0)
        completed = min(max(int(round(row[2])), 0), started)
        resets = max(int(round(row[3])), 0)
        moves = max(int(round(row[4])), 0)
        free_m, practice_m, challenge_m = _apportion(moves, row[5:8])
        if started == 0 and challenge_m:
            free_m += challenge_m
            challenge_m = 0
        phantom_practice = practice == 0 and practice_m > 0
        practice_slots = practice if practice else (1 if phantom_practice else 0)

        ts = base_ts + i * 10_000_000
        token = 0

        def emit(kind: str, task_kind: str | None = None, task_id: str | None = None,
                 move: str | None = None, context: str = "free") -> None:
            nonlocal ts
            events.append(SessionEvent(sid, ts, kind, task_kind, task_id, move, context))
            ts += 1000

        def emit_moves(count: int, task_kind: str | None, task_id: str | None,
                       context: str) -> None:
            nonlocal token
            for _ in range(count):
                emit("cube_move", task_kind, task_id, _MOVE_TOKENS[token % 6], context)
                token += 1

        emit("session_start")
        per_task = _apportion(practice_m, [1.0] * practice_slots) if practice_slots else []
        for t in range(practice_slots):
            tid = f"p{t + 1}"
            emit("task_start", "practice", tid, context="practice")
            emit_moves(per_task[t], "practice", tid, "practice")
            if not (phantom_practice and t == practice_slots - 1):
                emit("task_complete", "practice", tid, context="practice")
        per_task = _apportion(challenge_m, [1.0] * started) if started else []
        for t in range(started):
            tid = f"c{t + 1}"
            emit("task_start", "challenge", tid, context="challenge")
            emit_moves(per_task[t], "challenge", tid, "challenge")
            if t == 0:
                for _ in range(resets):
                    emit("cube_reset", "challenge", tid, context="challenge")
            if t < completed:
                emit("task_complete", "challenge", tid, context="challenge")
        if started == 0 and resets:
            for _ in range(resets):
                emit("cube_reset")
        emit_moves(free_m, None, None, "free")
        emit("session_end")
    return events


def save_scores(ids: Sequence[str], gains: Sequence[GainRecord], path: str | Path) -> None:
    lines = ["student_id,pre,post"]
    for sid, record in zip(ids, gains):
        lines.append(f"{sid},{record.pre!r},{record.post!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_scores(path: str | Path) -> dict[str, tuple[float, float]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "student_id,pre,post":
        raise ValueError("scores file has a wrong header")
    scores = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        sid, pre, post = line.split(",")
        scores[sid] = (float(pre), float(post))
    return scores


def _fmt(v: float) -> str:
    return f"{v + 0.0:.4f}"


def match_profiles(centers: np.ndarray) -> tuple[str, ...]:
    """Name 3 cluster centers by the archetype assignment with the
    least total squared distance."""
    best = None
    for perm in permutations(range(3)):
        cost = sum(float(((centers[i] - CLUSTER_PROFILES[perm[i]]) ** 2).sum())
                   for i in range(3))
        if best is None or cost < best[0]:
            best = (cost, perm)
    return tuple(CLUSTER_NAMES[best[1][i]] for i in range(3))


def write_descriptives(m: FeatureMatrix, path: str | Path) -> None:
    lines = [f"feature descriptives (n={m.n_rows})", "feature\tmean\tsd"]
    means = m.values.mean(axis=0)
    sds = m.values.std(axis=0, ddof=1)
    for j, name in enumerate(FEATURE_NAMES):
        lines.append(f"{name}\t{_fmt(means[j])}\t{_fmt(sds[j])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_clusters(result: ClusteringResult, cluster_names: Sequence[str],
                   path: str | Path) -> None:
    lines = [f"cluster profiles (k={result.k}, z-space)"]
    lines.append("wss_curve\t" + "\t".join(_fmt(w) for w in result.wss_curve))
    lines.append("cluster\tn\t" + "\t".join(FEATURE_NAMES))
    assign = np.asarray(result.assignments)
    for c in range(result.k):
        size = int((assign == c).sum())
        center = "\t".join(_fmt(v) for v in result.centers[c])
        lines.append(f"{cluster_names[c]}\t{size}\t{center}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_contrasts(rows: Sequence[tuple[str, ContrastResult | str]], path: str | Path) -> None:
    lines = ["pairwise cluster contrasts",
             "feature\tgroup_a\tgroup_b\tmean_diff\tprob_gt_zero\tverdict"]
    for feature, entry in rows:
        if isinstance(entry, str):
            lines.append(f"{feature}\tskipped: {entry}")
        else:
            lines.append("\t".join([
                feature, entry.group_a, entry.group_b,
                _fmt(entry.mean_diff), _fmt(entry.prob_gt_zero), entry.verdict]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_gains(cluster_names: Sequence[str], assignments: Sequence[int],
                gains: Sequence[GainRecord], path: str | Path) -> None:
    lines = ["normalized gains by cluster", "cluster\tn\tmean_gain\tsd_gain"]
    values = np.array([g.gain for g in gains])
    assign = np.asarray(assignments)
    for c, name in enumerate(cluster_names):
        member = values[assign == c]
        sd = member.std(ddof=1) if len(member) > 1 else 0.0
        mean = member.mean() if len(member) else 0.0
        lines.append(f"{name}\t{len(member)}\t{_fmt(mean)}\t{_fmt(sd)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_regression(posterior: RegressionPosterior, path: str | Path) -> None:
    lines = [f"posterior estimates ({posterior.draws} draws)",
             "coefficient\tmean\tci_low\tci_high"]
    for name, mean, (lo, hi) in zip(posterior.names, posterior.means,
                                    posterior.intervals):
        lines.append(f"{name}\t{_fmt(mean)}\t{_fmt(lo)}\t{_fmt(hi)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_pipeline(log_path: str | Path, out_dir: str | Path,
                 scores_path: str | Path | None = None, *,
                 kmax: int = 8, seed: int = 0, draws: int = 10_000,
                 restarts: int = 25) -> dict:
    """Aggregate a cohort log, cluster it, contrast the clusters, and
    (with scores) report gains and the post-score regression.  Writes
    deterministic report files and returns a small summary."""
    events = read_log(log_path)
    violations = validate_log(events)
    if not events:
        violations = ["log is empty"] + violations
    if violations:
        raise LogValidationError(violations)
    cohort = aggregate_cohort(events)
    matrix = FeatureMatrix.from_cohort(cohort)
    if matrix.n_rows < 4:
        raise ValueError("too few students for clustering: need at least 4")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        z = standardize(matrix)
    result = cluster_cohort(z, kmax=kmax, seed=seed, restarts=restarts)
    if result.k == 3:
        cluster_names = match_profiles(result.centers)
    else:
        cluster_names = tuple(f"Cluster {c + 1}" for c in range(result.k))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_descriptives(matrix, out / "descriptives.txt")
    write_clusters(result, cluster_names, out / "clusters.txt")

    assign = np.asarray(result.assignments)
    labels = [cluster_names[a] for a in assign]
    contrast_rows: list[tuple[str, ContrastResult | str]] = []
    for j, feature in enumerate(FEATURE_NAMES):
        try:
            for contrast in posterior_contrast(z.values[:, j], labels,
                                               draws=draws, seed=seed * 1000 + j):
                contrast_rows.append((feature, contrast))
        except ValueError as exc:
            contrast_rows.append((feature, str(exc)))
    write_contrasts(contrast_rows, out / "contrasts.txt")

    files = ["descriptives.txt", "clusters.txt", "contrasts.txt"]
    if scores_path is not None:
        scores = load_scores(scores_path)
        missing = [sid for sid in matrix.student_ids if sid not in scores]
        if missing:
            raise ValueError("scores missing for students: " + ", ".join(missing))
        gains = [normalized_gain(*scores[sid]) for sid in matrix.student_ids]
        write_gains(cluster_names, assign, gains, out / "gains.txt")
        pre = [scores[sid][0] for sid in matrix.student_ids]
        post = [scores[sid][1] for sid in matrix.student_ids]
        design, names = design_matrix(labels, covariate=pre)
        posterior = regression_posterior(post, design, names, draws=draws, seed=seed)
        write_regression(posterior, out / "regression.txt")
        files += ["gains.txt", "regression.txt"]
    return {"k": result.k, "cluster_names": cluster_names,
            "n_students": matrix.n_rows, "files": files}
