"""Exact Shapley attributions for tree ensembles, and SHAP-guided feature
elimination.

The per-tree computation is the polynomial-time path-conditioning
algorithm: it walks every root-leaf path once, maintaining for each subset
size the proportion of feature subsets that would let the sample reach the
current node, with absent-feature branching weighted by training covers.
Summing each feature's weighted (one_fraction - zero_fraction) leaf
contributions yields exactly the Shapley values of the cover-weighted
conditional-expectation game.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ensemble import CvReport, EnsembleConfig, TrainedEnsemble, cross_validate, fit_ensemble
from .errors import SchemaMismatch
from .seeding import derive_seed
from .trees import RegressionTree


# ---------------------------------------------------------------------------
# path-conditioning algorithm
# ---------------------------------------------------------------------------
# Each path element is [feature, zero_fraction, one_fraction, pweight]:
# the feature split on, the proportion of paths flowing through when the
# feature is absent (cover ratio), 1/0 for present-feature match, and the
# permutation weight mass for the subset size at this path position.


def _extend(path: list[list[float]], pz: float, po: float, pi: int) -> None:
    length = len(path)
    path.append([pi, pz, po, 1.0 if length == 0 else 0.0])
    for i in range(length - 1, -1, -1):
        path[i + 1][3] += po * path[i][3] * (i + 1) / (length + 1)
        path[i][3] = pz * path[i][3] * (length - i) / (length + 1)


def _unwind(path: list[list[float]], index: int) -> None:
    depth = len(path) - 1
    one = path[index][2]
    zero = path[index][1]
    carried = path[depth][3]
    for i in range(depth - 1, -1, -1):
        if one != 0.0:
            kept = path[i][3]
            path[i][3] = carried * (depth + 1) / ((i + 1) * one)
            carried = kept - path[i][3] * zero * (depth - i) / (depth + 1)
        else:
            path[i][3] = path[i][3] * (depth + 1) / (zero * (depth - i))
    for i in range(index, depth):
        path[i][0] = path[i + 1][0]
        path[i][1] = path[i + 1][1]
        path[i][2] = path[i + 1][2]
    path.pop()


def _unwound_sum(path: list[list[float]], index: int) -> float:
    depth = len(path) - 1
    one = path[index][2]
    zero = path[index][1]
    carried = path[depth][3]
    total = 0.0
    for i in range(depth - 1, -1, -1):
        if one != 0.0:
            share = carried * (depth + 1) / ((i + 1) * one)
            total += share
            carried = path[i][3] - share * zero * (depth - i) / (depth + 1)
        else:
            total += path[i][3] / zero / ((depth - i) / (depth + 1))
    return total


def _tree_shap_recurse(
    tree: RegressionTree,
    x: np.ndarray,
    phi: np.ndarray,
    node: int,
    parent_path: list[list[float]],
    pz: float,
    po: float,
    pf: int,
) -> None:
    path = [el[:] for el in parent_path]
    _extend(path, pz, po, pf)
    if tree.is_leaf(node):
        leaf_value = tree.value[node]
        for i in range(1, len(path)):
            w = _unwound_sum(path, i)
            feat, zero, one, _ = path[i]
            phi[int(feat)] += w * (one - zero) * leaf_value
        return
    feat = tree.feature[node]
    if x[feat] <= tree.threshold[node]:
        hot, cold = tree.left[node], tree.right[node]
    else:
        hot, cold = tree.right[node], tree.left[node]
    cover = tree.cover[node]
    hot_zero = tree.cover[hot] / cover
    cold_zero = tree.cover[cold] / cover
    incoming_zero = 1.0
    incoming_one = 1.0
    for i, el in enumerate(path):
        if el[0] == feat:
            incoming_zero, incoming_one = el[1], el[2]
            _unwind(path, i)
            break
    _tree_shap_recurse(tree, x, phi, hot, path, hot_zero * incoming_zero, incoming_one, feat)
    _tree_shap_recurse(tree, x, phi, cold, path, cold_zero * incoming_zero, 0.0, feat)


def tree_shap_single(tree: RegressionTree, x: np.ndarray) -> np.ndarray:
    """Shapley values of one tree at one sample (length n_features)."""
    phi = np.zeros(tree.n_features)
    if tree.n_nodes == 1:
        return phi
    _tree_shap_recurse(tree, np.asarray(x, dtype=float), phi, 0, [], 1.0, 1.0, -1)
    return phi


@dataclass
class ShapMatrix:
    """Per-sample, per-feature attributions in target units."""

    values: np.ndarray  # (n_samples, n_features), original column order
    base_value: float
    feature_names: tuple[str, ...]
    order: tuple[int, ...] = field(default_factory=tuple)  # mean |SHAP| descending

    def __post_init__(self):
        if not self.order:
            means = np.abs(self.values).mean(axis=0)
            # descending by mean |SHAP|, ties by column position
            self.order = tuple(
                int(i) for i in sorted(range(len(means)), key=lambda i: (-means[i], i))
            )

    @property
    def mean_abs(self) -> np.ndarray:
        return np.abs(self.values).mean(axis=0)

    def ordered_names(self) -> tuple[str, ...]:
        return tuple(self.feature_names[i] for i in self.order)

    def ordered_values(self) -> np.ndarray:
        return self.values[:, list(self.order)]

    def predictions(self) -> np.ndarray:
        return self.base_value + self.values.sum(axis=1)


def tree_shap(
    ensemble: TrainedEnsemble,
    X: np.ndarray,
    feature_names: Sequence[str] | None = None,
) -> ShapMatrix:
    """Exact attributions for every row of X.

    Additivity holds by construction: base_value plus a row's attributions
    equals the model prediction for that row.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != ensemble.n_features:
        raise SchemaMismatch(
            f"model has {ensemble.n_features} features, data has {X.shape[1]}"
        )
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(ensemble.n_features))
    if len(feature_names) != ensemble.n_features:
        raise SchemaMismatch("feature_names length does not match the model")
    n, p = X.shape
    values = np.zeros((n, p))
    for row in range(n):
        acc = np.zeros(p)
        for tree in ensemble.trees:
            acc += tree_shap_single(tree, X[row])
        if ensemble.aggregate == "mean":
            if ensemble.trees:
                acc /= len(ensemble.trees)
        else:
            acc *= ensemble.learning_rate
        values[row] = acc
    return ShapMatrix(
        values=values,
        base_value=ensemble.expected_value(),
        feature_names=tuple(feature_names),
    )


# ---------------------------------------------------------------------------
# SHAP-guided feature elimination
# ---------------------------------------------------------------------------


@dataclass
class EliminationStep:
    feature: str
    mean_abs_shap: float
    r_before: float
    r_shuffled: tuple[float, ...]
    r_shuffled_agg: float
    dropped: bool
    r_after: float

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "mean_abs_shap": self.mean_abs_shap,
            "r_before": self.r_before,
            "r_shuffled": list(self.r_shuffled),
            "r_shuffled_agg": self.r_shuffled_agg,
            "dropped": self.dropped,
            "r_after": self.r_after,
        }


@dataclass
class EliminationResult:
    selected: tuple[str, ...]
    trace: list[EliminationStep]
    initial_order: tuple[str, ...]  # ascending mean |SHAP|
    final_report: CvReport
    seed: int
    delta: float

    def to_dict(self) -> dict:
        return {
            "selected": list(self.selected),
            "initial_order": list(self.initial_order),
            "delta": self.delta,
            "seed": self.seed,
            "trace": [s.to_dict() for s in self.trace],
        }


def shap_feature_elimination(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: Sequence[str],
    grid: Sequence[EnsembleConfig],
    k: int = 4,
    seed: int = 0,
    delta: float = 0.01,
    n_shuffles: int = 1,
) -> EliminationResult:
    """Shuffle-and-test elimination, weakest SHAP contributor first.

    A model grid-selected on all features fixes the testing order
    (ascending mean |SHAP|). Each feature's column is shuffled (seeded)
    and the cross-validation rerun: if the pooled correlation magnitude
    drops by no more than ``delta``, the feature is discarded for good and
    the baseline refit on the survivors. With n_shuffles > 1 the median
    shuffled correlation is compared instead of a single draw.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    names = list(feature_names)
    if X.shape[1] != len(names):
        raise SchemaMismatch("feature_names length does not match X")

    baseline = cross_validate(X, y, grid, k=k, seed=seed)
    model = fit_ensemble(
        X, y, baseline.chosen.config, seed=derive_seed(seed, "explain_fit")
    )
    shap = tree_shap(model, X, names)
    ascending = [names[i] for i in reversed(shap.order)]
    mean_abs = {names[i]: float(shap.mean_abs[i]) for i in range(len(names))}

    current = list(names)
    trace: list[EliminationStep] = []
    report = baseline
    for feat in ascending:
        cols = [names.index(c) for c in current]
        X_cur = X[:, cols]
        j = current.index(feat)
        shuffled_rs = []
        for rep in range(n_shuffles):
            rng = np.random.default_rng(derive_seed(seed, f"shuffle:{feat}:{rep}"))
            X_shuf = X_cur.copy()
            X_shuf[:, j] = X_shuf[rng.permutation(len(X_shuf)), j]
            rep_report = cross_validate(X_shuf, y, grid, k=k, seed=seed)
            shuffled_rs.append(rep_report.chosen.pearson_r)
        agg = float(np.median(shuffled_rs))
        r_before = report.chosen.pearson_r
        drop = abs(r_before) - abs(agg)
        if drop <= delta:
            current.remove(feat)
            if current:
                report = cross_validate(X[:, [names.index(c) for c in current]], y, grid, k=k, seed=seed)
            dropped = True
        else:
            dropped = False
        trace.append(
            EliminationStep(
                feature=feat,
                mean_abs_shap=mean_abs[feat],
                r_before=r_before,
                r_shuffled=tuple(shuffled_rs),
                r_shuffled_agg=agg,
                dropped=dropped,
                r_after=report.chosen.pearson_r,
            )
        )
        if not current:
            break
    return EliminationResult(
        selected=tuple(current),
        trace=trace,
        initial_order=tuple(ascending),
        final_report=report,
        seed=seed,
        delta=delta,
    )


# ---------------------------------------------------------------------------
# plot-data bundles
# ---------------------------------------------------------------------------


def export_plots(
    shap: ShapMatrix, X_scaled: np.ndarray
) -> dict[str, object]:
    """Numeric inputs for the three standard SHAP figures.

    beeswarm: one point per (sample, feature) with the scaled feature
    value; bar: mean |SHAP| per feature; heatmap: sample-by-feature grid
    with samples ordered by model output. Features everywhere appear in
    mean-|SHAP|-descending order.
    """
    X_scaled = np.atleast_2d(np.asarray(X_scaled, dtype=float))
    if X_scaled.shape != shap.values.shape:
        raise SchemaMismatch("scaled matrix shape does not match the SHAP matrix")
    names = shap.ordered_names()
    ordered = shap.ordered_values()
    scaled = X_scaled[:, list(shap.order)]
    beeswarm = [
        {
            "feature": names[j],
            "value": float(scaled[i, j]),
            "shap": float(ordered[i, j]),
        }
        for j in range(ordered.shape[1])
        for i in range(ordered.shape[0])
    ]
    bar = [
        {"feature": names[j], "mean_abs_shap": float(np.abs(ordered[:, j]).mean())}
        for j in range(ordered.shape[1])
    ]
    preds = shap.predictions()
    sample_order = [int(i) for i in np.argsort(-preds, kind="stable")]
    heatmap = {
        "features": list(names),
        "sample_order": sample_order,
        "predictions": [float(preds[i]) for i in sample_order],
        "base_value": shap.base_value,
        "grid": [[float(v) for v in ordered[i]] for i in sample_order],
    }
    return {"beeswarm": beeswarm, "bar": bar, "heatmap": heatmap}
