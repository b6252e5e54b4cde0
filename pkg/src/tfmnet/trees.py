"""Regression trees: greedy CART with deterministic tie-breaking.

Split candidates are midpoints between consecutive distinct sorted values.
Two impurity criteria are supported: plain variance reduction
("squared_error") and the Friedman improvement score ("friedman_mse"),
i.e. (n_L n_R / (n_L + n_R)) (mean_L - mean_R)^2. Equal-gain ties resolve
to the lowest feature index, then the lowest threshold. Trees grow
depth-first, or best-first (largest gain first) when max_leaf_nodes is
set. Every node records its training-row count ("cover"), which downstream
explanation code uses as conditional-expectation weights.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LEAF = -1

_CRITERIA = ("squared_error", "friedman_mse")


def resolve_max_features(max_features: object, n_features: int) -> int:
    """Number of columns examined per split."""
    if max_features is None or max_features == "all":
        return n_features
    if max_features == "log2":
        return max(1, int(math.log2(n_features))) if n_features > 1 else 1
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    if isinstance(max_features, int) and max_features >= 1:
        return min(max_features, n_features)
    raise ValueError(f"bad max_features {max_features!r}")


@dataclass
class RegressionTree:
    """Flat node-array tree; node 0 is the root, children index the arrays."""

    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)
    cover: list[float] = field(default_factory=list)
    n_features: int = 0
    criterion: str = "squared_error"

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, i: int) -> bool:
        return self.feature[i] == LEAF

    def _new_node(self, value: float, cover: float) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        self.cover.append(cover)
        return len(self.feature) - 1

    def leaf_index(self, x: np.ndarray) -> int:
        i = 0
        while not self.is_leaf(i):
            i = self.left[i] if x[self.feature[i]] <= self.threshold[i] else self.right[i]
        return i

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.value[self.leaf_index(row)] for row in X])

    def leaf_indices(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.leaf_index(row) for row in X], dtype=int)

    def set_leaf_values(self, new_values: dict[int, float]) -> None:
        for node, v in new_values.items():
            if not self.is_leaf(node):
                raise ValueError(f"node {node} is not a leaf")
            self.value[node] = float(v)

    def depth(self) -> int:
        best = 0
        stack = [(0, 0)]
        while stack:
            i, d = stack.pop()
            if self.is_leaf(i):
                best = max(best, d)
            else:
                stack.append((self.left[i], d + 1))
                stack.append((self.right[i], d + 1))
        return best

    def n_leaves(self) -> int:
        return sum(1 for f in self.feature if f == LEAF)

    def expected_value(self) -> float:
        """Cover-weighted mean of leaf values (the tree's a-priori output)."""
        total = 0.0
        weight = 0.0
        for i in range(self.n_nodes):
            if self.is_leaf(i):
                total += self.value[i] * self.cover[i]
                weight += self.cover[i]
        return total / weight

    def used_features(self) -> set[int]:
        return {f for f in self.feature if f != LEAF}

    def to_dict(self) -> dict:
        def node(i: int) -> dict:
            if self.is_leaf(i):
                return {"value": self.value[i], "cover": self.cover[i]}
            return {
                "feature": self.feature[i],
                "threshold": self.threshold[i],
                "value": self.value[i],
                "cover": self.cover[i],
                "left": node(self.left[i]),
                "right": node(self.right[i]),
            }

        return {
            "n_features": self.n_features,
            "criterion": self.criterion,
            "root": node(0),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RegressionTree":
        tree = cls(n_features=doc["n_features"], criterion=doc.get("criterion", "squared_error"))

        def build(node: dict) -> int:
            idx = tree._new_node(node["value"], node["cover"])
            if "feature" in node:
                tree.feature[idx] = node["feature"]
                tree.threshold[idx] = node["threshold"]
                tree.left[idx] = build(node["left"])
                tree.right[idx] = build(node["right"])
            return idx

        build(doc["root"])
        return tree


@dataclass(frozen=True)
class _Split:
    gain: float
    feature: int
    threshold: float
    left_idx: np.ndarray
    right_idx: np.ndarray


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    features: Sequence[int],
    criterion: str,
    min_samples_leaf: int,
) -> _Split | None:
    """Best (gain, feature, threshold) over the candidate features, or None."""
    n = len(idx)
    ys = y[idx]
    sse = float(((ys - ys.mean()) ** 2).sum())
    if sse <= 1e-14 or n < 2 * min_samples_leaf:
        return None
    best: _Split | None = None
    total = float(ys.sum())
    for f in features:
        xs = X[idx, f]
        order = np.argsort(xs, kind="stable")
        xo = xs[order]
        yo = ys[order]
        csum = np.cumsum(yo)
        cut = np.arange(min_samples_leaf, n - min_samples_leaf + 1)
        cut = cut[xo[cut] > xo[cut - 1]]
        if len(cut) == 0:
            continue
        n_l = cut.astype(float)
        n_r = n - n_l
        s_l = csum[cut - 1]
        s_r = total - s_l
        if criterion == "squared_error":
            gains = s_l * s_l / n_l + s_r * s_r / n_r - total * total / n
        else:  # friedman_mse
            diff = s_l / n_l - s_r / n_r
            gains = (n_l * n_r / (n_l + n_r)) * diff * diff
        j = int(np.argmax(gains))  # first maximum -> lowest threshold on ties
        if best is None or float(gains[j]) > best.gain + 1e-15:
            i = int(cut[j])
            ordered = idx[order]
            best = _Split(
                gain=float(gains[j]),
                feature=f,
                threshold=float((xo[i - 1] + xo[i]) / 2.0),
                left_idx=ordered[:i],
                right_idx=ordered[i:],
            )
    return best


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    max_features: object = None,
    max_leaf_nodes: int | None = None,
    criterion: str = "squared_error",
    seed: int = 0,
) -> RegressionTree:
    """Grow one CART regression tree.

    Constant targets (or any unsplittable node) produce a leaf. When
    max_features selects fewer columns than exist, each split examines a
    fresh seeded sample of columns. Leaf values are training means; callers
    needing a different leaf estimate can rewrite them via set_leaf_values.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be (n, p) aligned with y")
    if len(X) < 1:
        raise ValueError("cannot fit a tree on zero rows")
    if criterion not in _CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}")
    if max_leaf_nodes is not None and max_leaf_nodes < 2:
        raise ValueError("max_leaf_nodes must be at least 2")
    n, p = X.shape
    k = resolve_max_features(max_features, p)
    rng = np.random.default_rng(seed)
    tree = RegressionTree(n_features=p, criterion=criterion)

    def sample_features() -> list[int]:
        if k >= p:
            return list(range(p))
        return sorted(int(i) for i in rng.choice(p, size=k, replace=False))

    def node_split(idx: np.ndarray, depth: int) -> _Split | None:
        if max_depth is not None and depth >= max_depth:
            return None
        return _best_split(X, y, idx, sample_features(), criterion, min_samples_leaf)

    if max_leaf_nodes is None:
        def grow(idx: np.ndarray, depth: int) -> int:
            node = tree._new_node(float(y[idx].mean()), float(len(idx)))
            split = node_split(idx, depth)
            if split is None:
                return node
            tree.feature[node] = split.feature
            tree.threshold[node] = split.threshold
            tree.left[node] = grow(split.left_idx, depth + 1)
            tree.right[node] = grow(split.right_idx, depth + 1)
            return node

        grow(np.arange(n), 0)
        return tree

    # best-first growth: expand the highest-gain frontier leaf until the
    # leaf budget is reached
    counter = 0
    heap: list[tuple[float, int, int, int, np.ndarray, _Split]] = []

    def push(node: int, idx: np.ndarray, depth: int) -> None:
        nonlocal counter
        split = node_split(idx, depth)
        if split is not None:
            heapq.heappush(heap, (-split.gain, counter, node, depth, idx, split))
            counter += 1

    root = tree._new_node(float(y.mean()), float(n))
    push(root, np.arange(n), 0)
    n_leaves = 1
    while heap and n_leaves < max_leaf_nodes:
        _, _, node, depth, idx, split = heapq.heappop(heap)
        tree.feature[node] = split.feature
        tree.threshold[node] = split.threshold
        left = tree._new_node(float(y[split.left_idx].mean()), float(len(split.left_idx)))
        right = tree._new_node(float(y[split.right_idx].mean()), float(len(split.right_idx)))
        tree.left[node] = left
        tree.right[node] = right
        n_leaves += 1
        push(left, split.left_idx, depth + 1)
        push(right, split.right_idx, depth + 1)
    return tree
