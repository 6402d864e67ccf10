"""Random forest binary classifier over the four-dimensional feature space.

Implemented directly on numpy so trained models serialize to plain JSON and
predictions are bit-reproducible for a given seed across platforms.  Trees
are stored as flat arrays (feature, threshold, left, right, leaf value) and
evaluated by vectorized routing, which keeps per-point ranking fast even
with thousands of candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateData

DEFAULT_TREES = 100
DEFAULT_MAX_DEPTH = 12
DEFAULT_MAX_FEATURES = 2

_LEAF = -1


@dataclass
class _Tree:
    feature: np.ndarray  # int, _LEAF marks a leaf
    threshold: np.ndarray  # float
    left: np.ndarray  # int child indices
    right: np.ndarray
    value: np.ndarray  # float, positive-class fraction at each node

    def predict(self, X: np.ndarray) -> np.ndarray:
        idx = np.zeros(len(X), dtype=np.int64)
        active = self.feature[idx] != _LEAF
        while active.any():
            rows = np.nonzero(active)[0]
            node = idx[rows]
            go_left = X[rows, self.feature[node]] <= self.threshold[node]
            idx[rows] = np.where(go_left, self.left[node], self.right[node])
            active = self.feature[idx] != _LEAF
        return self.value[idx]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "_Tree":
        return cls(
            feature=np.asarray(payload["feature"], dtype=np.int64),
            threshold=np.asarray(payload["threshold"], dtype=float),
            left=np.asarray(payload["left"], dtype=np.int64),
            right=np.asarray(payload["right"], dtype=np.int64),
            value=np.asarray(payload["value"], dtype=float),
        )


class _TreeBuilder:
    """Grow one tree on a bootstrap sample with per-node feature subsets."""

    def __init__(self, max_depth: int, max_features: int, rng: np.random.Generator):
        self.max_depth = max_depth
        self.max_features = max_features
        self.rng = rng
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def build(self, X: np.ndarray, y: np.ndarray) -> _Tree:
        self._grow(X, y, depth=0)
        return _Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=float),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=float),
        )

    def _new_node(self) -> int:
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        self.value.append(0.0)
        return len(self.feature) - 1

    def _grow(self, X: np.ndarray, y: np.ndarray, depth: int) -> int:
        node = self._new_node()
        positives = float(y.sum())
        self.value[node] = positives / len(y)
        if depth >= self.max_depth or positives in (0.0, float(len(y))) or len(y) < 2:
            return node
        split = self._best_split(X, y)
        if split is None:
            return node
        f, t = split
        mask = X[:, f] <= t
        self.feature[node] = f
        self.threshold[node] = t
        left = self._grow(X[mask], y[mask], depth + 1)
        right = self._grow(X[~mask], y[~mask], depth + 1)
        self.left[node] = left
        self.right[node] = right
        return node

    def _best_split(self, X: np.ndarray, y: np.ndarray):
        n, n_features = X.shape
        k = min(self.max_features, n_features)
        features = self.rng.choice(n_features, size=k, replace=False)
        best = None
        best_impurity = np.inf
        for f in np.sort(features):
            order = np.argsort(X[:, f], kind="stable")
            xs = X[order, f]
            ys = y[order]
            # Split positions sit between distinct adjacent values.
            boundaries = np.nonzero(xs[1:] > xs[:-1])[0]
            if boundaries.size == 0:
                continue
            left_pos = np.cumsum(ys)[boundaries]
            left_n = boundaries + 1.0
            right_n = n - left_n
            total_pos = float(ys.sum())
            right_pos = total_pos - left_pos
            p_l = left_pos / left_n
            p_r = right_pos / right_n
            gini = left_n * 2 * p_l * (1 - p_l) + right_n * 2 * p_r * (1 - p_r)
            i = int(np.argmin(gini))
            if gini[i] < best_impurity - 1e-12:
                best_impurity = float(gini[i])
                cut = boundaries[i]
                thr = float((xs[cut] + xs[cut + 1]) / 2.0)
                # The midpoint of two near-equal floats can round up to the
                # larger one, which would send every sample left; fall back
                # to the exact lower value (the mask is <=).
                if thr >= xs[cut + 1]:
                    thr = float(xs[cut])
                best = (int(f), thr)
        return best


class RandomForest:
    """Bagged Gini trees; predicted score is the mean leaf positive rate."""

    def __init__(
        self,
        n_trees: int = DEFAULT_TREES,
        max_depth: int = DEFAULT_MAX_DEPTH,
        max_features: int = DEFAULT_MAX_FEATURES,
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.max_features = max_features
        self.seed = seed
        self.trees: list[_Tree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float).ravel()
        if X.ndim != 2 or len(X) != len(y):
            raise ValueError("X must be 2-D with one label per row")
        if len(np.unique(y)) < 2:
            raise DegenerateData("training labels contain a single class")
        self.trees = []
        n = len(X)
        for t in range(self.n_trees):
            rng = np.random.default_rng(self.seed * 1_000_003 + t)
            sample = rng.integers(0, n, size=n)
            builder = _TreeBuilder(self.max_depth, self.max_features, rng)
            self.trees.append(builder.build(X[sample], y[sample]))
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if not self.trees:
            raise ValueError("forest is not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        total = np.zeros(len(X), dtype=float)
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "max_features": self.max_features,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RandomForest":
        forest = cls(
            n_trees=int(payload["n_trees"]),
            max_depth=int(payload["max_depth"]),
            max_features=int(payload["max_features"]),
            seed=int(payload["seed"]),
        )
        forest.trees = [_Tree.from_dict(t) for t in payload["trees"]]
        return forest
