"""Random-forest and gradient-boosted tree regressors with grid-searched
4-fold cross-validation, Pearson/MAE scoring, and target-permutation
baselines.

Model selection is lexicographic: among configurations whose pooled
out-of-fold correlation is significant (p < 0.05), the largest |r| wins
and ties fall to the lower MAE; if nothing reaches significance the same
ordering runs without the significance filter and the report says so.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .seeding import derive_seed
from .trees import RegressionTree, fit_tree

GBM_GRID_DEFAULT: dict[str, list] = {
    "n_estimators": [5, 10, 25, 50, 100, 150],
    "learning_rate": [0.1, 0.2, 0.3, 0.5, 0.7],
    "max_depth": [2, 3, 5, 7, 9, 12, None],
    "max_features": ["log2", "sqrt", None],
    "subsample": [0.5, 0.75, 1.0],
    "loss": ["squared", "absolute"],
}

RFR_GRID_DEFAULT: dict[str, list] = {
    "n_estimators": [5, 10, 25, 50, 100, 150],
    "max_depth": [2, 3, 5, 7, 9, 12, None],
    "max_features": ["log2", "sqrt", None],
    "max_leaf_nodes": [100, 150, None],
    "criterion": ["squared_error", "friedman_mse"],
}

_GBM_PARAM_ORDER = ("n_estimators", "learning_rate", "max_depth", "max_features", "subsample", "loss")
_RFR_PARAM_ORDER = ("n_estimators", "max_depth", "max_features", "max_leaf_nodes", "criterion")


@dataclass(frozen=True)
class EnsembleConfig:
    kind: str  # "rfr" | "gbm"
    n_estimators: int = 100
    learning_rate: float = 0.1  # gbm only
    max_depth: int | None = None
    max_features: object = None  # None | "log2" | "sqrt"
    subsample: float = 1.0  # gbm only
    loss: str = "squared"  # gbm only: "squared" | "absolute"
    max_leaf_nodes: int | None = None  # rfr only
    criterion: str = "squared_error"  # rfr only

    def __post_init__(self):
        if self.kind not in ("rfr", "gbm"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "gbm" and self.loss not in ("squared", "absolute"):
            raise ValueError(f"unknown gbm loss {self.loss!r}")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


def expand_grid(kind: str, grid: Mapping[str, Sequence] | None = None) -> list[EnsembleConfig]:
    """All configurations of a parameter grid, in deterministic order."""
    if grid is None:
        grid = GBM_GRID_DEFAULT if kind == "gbm" else RFR_GRID_DEFAULT
    order = _GBM_PARAM_ORDER if kind == "gbm" else _RFR_PARAM_ORDER
    keys = [k for k in order if k in grid]
    extras = set(grid) - set(keys)
    if extras:
        raise ValueError(f"grid parameters not understood for {kind}: {sorted(extras)}")
    configs = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        configs.append(EnsembleConfig(kind=kind, **dict(zip(keys, combo))))
    return configs


@dataclass
class TrainedEnsemble:
    config: EnsembleConfig
    trees: list[RegressionTree]
    base_value: float
    learning_rate: float  # 1.0 for forests
    aggregate: str  # "mean" | "sum"
    n_features: int
    seed: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"model expects {self.n_features} features, got {X.shape[1]}"
            )
        out = np.full(len(X), self.base_value, dtype=float)
        if not self.trees:
            return out
        contrib = np.zeros(len(X))
        for tree in self.trees:
            contrib += tree.predict(X)
        if self.aggregate == "mean":
            contrib /= len(self.trees)
        else:
            contrib *= self.learning_rate
        return out + contrib

    def expected_value(self) -> float:
        """Cover-weighted a-priori prediction (the explanation base value)."""
        if not self.trees:
            return self.base_value
        ev = [t.expected_value() for t in self.trees]
        if self.aggregate == "mean":
            return self.base_value + float(np.mean(ev))
        return self.base_value + self.learning_rate * float(np.sum(ev))

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "config": self.config.to_dict(),
            "base_value": self.base_value,
            "learning_rate": self.learning_rate,
            "aggregate": self.aggregate,
            "n_features": self.n_features,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainedEnsemble":
        return cls(
            config=EnsembleConfig(**doc["config"]),
            trees=[RegressionTree.from_dict(t) for t in doc["trees"]],
            base_value=doc["base_value"],
            learning_rate=doc["learning_rate"],
            aggregate=doc["aggregate"],
            n_features=doc["n_features"],
            seed=doc["seed"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TrainedEnsemble":
        return cls.from_dict(json.loads(text))


def fit_rfr(X: np.ndarray, y: np.ndarray, cfg: EnsembleConfig, seed: int = 0) -> TrainedEnsemble:
    """Bootstrap-aggregated trees; prediction is the mean over trees."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(X)
    trees = []
    for t in range(cfg.n_estimators):
        boot_rng = np.random.default_rng(derive_seed(seed, f"bootstrap:{t}"))
        idx = boot_rng.integers(0, n, size=n)
        trees.append(
            fit_tree(
                X[idx],
                y[idx],
                max_depth=cfg.max_depth,
                max_features=cfg.max_features,
                max_leaf_nodes=cfg.max_leaf_nodes,
                criterion=cfg.criterion,
                seed=derive_seed(seed, f"tree:{t}"),
            )
        )
    return TrainedEnsemble(
        config=cfg,
        trees=trees,
        base_value=0.0,
        learning_rate=1.0,
        aggregate="mean",
        n_features=X.shape[1],
        seed=seed,
    )


def fit_gbm(X: np.ndarray, y: np.ndarray, cfg: EnsembleConfig, seed: int = 0) -> TrainedEnsemble:
    """Stagewise boosting on the loss gradient.

    Squared loss fits each stage to the residuals (leaf values are mean
    residuals); absolute loss fits to sign residuals and re-estimates each
    leaf as the median residual of its training rows. Stages see a fresh
    without-replacement row sample when subsample < 1.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(X)
    if cfg.loss == "squared":
        base = float(y.mean())
    else:
        base = float(np.median(y))
    current = np.full(n, base)
    trees = []
    for t in range(cfg.n_estimators):
        if cfg.subsample < 1.0:
            sub_rng = np.random.default_rng(derive_seed(seed, f"subsample:{t}"))
            n_sub = max(1, int(round(cfg.subsample * n)))
            rows = np.sort(sub_rng.choice(n, size=n_sub, replace=False))
        else:
            rows = np.arange(n)
        residual = y[rows] - current[rows]
        if cfg.loss == "squared":
            target = residual
        else:
            target = np.sign(residual)
        tree = fit_tree(
            X[rows],
            target,
            max_depth=cfg.max_depth,
            max_features=cfg.max_features,
            seed=derive_seed(seed, f"tree:{t}"),
        )
        if cfg.loss == "absolute":
            leaves = tree.leaf_indices(X[rows])
            medians = {
                int(leaf): float(np.median(residual[leaves == leaf]))
                for leaf in np.unique(leaves)
            }
            tree.set_leaf_values(medians)
        trees.append(tree)
        current += cfg.learning_rate * tree.predict(X)
    return TrainedEnsemble(
        config=cfg,
        trees=trees,
        base_value=base,
        learning_rate=cfg.learning_rate,
        aggregate="sum",
        n_features=X.shape[1],
        seed=seed,
    )


def fit_ensemble(X: np.ndarray, y: np.ndarray, cfg: EnsembleConfig, seed: int = 0) -> TrainedEnsemble:
    if cfg.kind == "rfr":
        return fit_rfr(X, y, cfg, seed=seed)
    return fit_gbm(X, y, cfg, seed=seed)


def pearson_p(r: float, n: int) -> float:
    """Two-sided p-value for Pearson r via the exact t transform."""
    if n < 3:
        return 1.0
    denom = 1.0 - r * r
    if denom <= 0.0:
        return float(np.finfo(float).tiny)
    t = abs(r) * np.sqrt((n - 2) / denom)
    p = 2.0 * float(stats.t.sf(t, df=n - 2))
    return max(min(p, 1.0), float(np.finfo(float).tiny))


def fold_assignments(n: int, k: int, seed: int) -> np.ndarray:
    """Seeded shuffle then contiguous blocks; returns fold id per row."""
    if n < 2 * k:
        raise ValueError(f"{n} rows cannot support {k}-fold validation")
    rng = np.random.default_rng(derive_seed(seed, "folds"))
    perm = rng.permutation(n)
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    folds = np.empty(n, dtype=int)
    start = 0
    for f, size in enumerate(sizes):
        folds[perm[start : start + size]] = f
        start += size
    return folds


@dataclass(frozen=True)
class ConfigScore:
    config: EnsembleConfig
    pearson_r: float
    p_value: float
    mae: float


@dataclass
class CvReport:
    chosen: ConfigScore
    predictions: np.ndarray  # pooled out-of-fold, original row order
    folds: np.ndarray
    all_scores: list[ConfigScore]
    selection_rule: str  # "significant" | "fallback"
    k: int
    seed: int
    subset: str = ""

    def to_dict(self) -> dict:
        return {
            "chosen": {
                "config": self.chosen.config.to_dict(),
                "pearson_r": self.chosen.pearson_r,
                "p_value": self.chosen.p_value,
                "mae": self.chosen.mae,
            },
            "selection_rule": self.selection_rule,
            "k": self.k,
            "seed": self.seed,
            "subset": self.subset,
            "folds": self.folds.tolist(),
            "predictions": self.predictions.tolist(),
            "all_scores": [
                {
                    "config": s.config.to_dict(),
                    "pearson_r": s.pearson_r,
                    "p_value": s.p_value,
                    "mae": s.mae,
                }
                for s in self.all_scores
            ],
        }


def _oof_predictions(
    X: np.ndarray, y: np.ndarray, cfg: EnsembleConfig, folds: np.ndarray, seed: int
) -> np.ndarray:
    preds = np.empty(len(y))
    for f in sorted(set(int(v) for v in folds)):
        test = folds == f
        train = ~test
        model = fit_ensemble(X[train], y[train], cfg, seed=derive_seed(seed, f"fold:{f}"))
        preds[test] = model.predict(X[test])
    return preds


def _score(y: np.ndarray, preds: np.ndarray, cfg: EnsembleConfig) -> ConfigScore:
    yc = y - y.mean()
    pc = preds - preds.mean()
    denom = np.sqrt((yc**2).sum() * (pc**2).sum())
    r = float((yc * pc).sum() / denom) if denom > 0 else 0.0
    return ConfigScore(
        config=cfg,
        pearson_r=r,
        p_value=pearson_p(r, len(y)),
        mae=float(np.abs(y - preds).mean()),
    )


def cross_validate(
    X: np.ndarray,
    y: np.ndarray,
    grid: Sequence[EnsembleConfig],
    k: int = 4,
    seed: int = 0,
    subset: str = "",
) -> CvReport:
    """Grid-searched k-fold CV scored on pooled out-of-fold predictions."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not grid:
        raise ValueError("empty configuration grid")
    folds = fold_assignments(len(y), k, seed)
    scores: list[ConfigScore] = []
    pooled: list[np.ndarray] = []
    for ci, cfg in enumerate(grid):
        preds = _oof_predictions(X, y, cfg, folds, derive_seed(seed, f"cfg:{ci}"))
        pooled.append(preds)
        scores.append(_score(y, preds, cfg))

    def rank(indices: Iterable[int]) -> int:
        return min(
            indices,
            key=lambda i: (-abs(scores[i].pearson_r), scores[i].mae, i),
        )

    significant = [i for i, s in enumerate(scores) if s.p_value < 0.05]
    if significant:
        best = rank(significant)
        rule = "significant"
    else:
        best = rank(range(len(scores)))
        rule = "fallback"
    return CvReport(
        chosen=scores[best],
        predictions=pooled[best],
        folds=folds,
        all_scores=scores,
        selection_rule=rule,
        k=k,
        seed=seed,
        subset=subset,
    )


def permutation_baseline(
    X: np.ndarray,
    y: np.ndarray,
    grid: Sequence[EnsembleConfig],
    k: int = 4,
    seed: int = 0,
    n_perm: int = 1,
) -> list[CvReport]:
    """Re-run the CV after shuffling the targets, n_perm times.

    The cross-validation seed (folds, per-config training seeds) is the
    baseline's, so a permutation that happens to be the identity
    reproduces the baseline run exactly.
    """
    if n_perm < 1:
        raise ValueError("n_perm must be >= 1")
    y = np.asarray(y, dtype=float)
    reports = []
    for j in range(n_perm):
        perm_rng = np.random.default_rng(derive_seed(seed, f"permutation:{j}"))
        y_shuffled = y[perm_rng.permutation(len(y))]
        reports.append(
            cross_validate(X, y_shuffled, grid, k=k, seed=seed, subset=f"permuted:{j}")
        )
    return reports
