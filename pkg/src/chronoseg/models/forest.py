"""Random forest of CART trees: bootstrap rows, subsample features per split."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .tree import CartTree, build_cart


@dataclass
class RandomForest:
    trees: list[CartTree]
    n_features: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        scores = np.zeros(np.asarray(X).shape[0], dtype=np.float64)
        for tree in self.trees:
            scores += tree.predict_proba(X)
        return scores / len(self.trees)

    def feature_gains(self) -> np.ndarray:
        gains = np.zeros(self.n_features, dtype=np.float64)
        for tree in self.trees:
            gains += tree.feature_gains()
        return gains


def build_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int = 100,
    max_features: int | str | None = "sqrt",
    bootstrap: bool = True,
    min_samples_split: int = 2,
    seed: int = 0,
) -> RandomForest:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, p = X.shape
    if max_features == "sqrt":
        max_features = ceil(sqrt(p))
    # one independent stream per tree so tree i is stable under n_trees changes
    streams = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        if bootstrap:
            idx = rng.integers(0, n, size=n)
            Xb, yb = X[idx], y[idx]
        else:
            Xb, yb = X, y
        trees.append(
            build_cart(Xb, yb, min_samples_split=min_samples_split, max_features=max_features, rng=rng)
        )
    return RandomForest(trees=trees, n_features=p)
