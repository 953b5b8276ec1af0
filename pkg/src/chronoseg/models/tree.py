"""CART binary classification tree with Gini impurity.

Splits maximize the total Gini decrease n*imp(parent) - nL*imp(L) - nR*imp(R).
Ties break deterministically on lowest feature index, then lowest threshold.
The same builder backs the standalone decision_tree family and the random
forest (which adds bootstrap and per-split feature subsampling).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TreeNode:
    n: int
    value: float  # fraction of positive samples at the node
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    gain: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def to_dict(self) -> dict:
        d = {"n": self.n, "value": self.value}
        if not self.is_leaf:
            d.update(
                feature=self.feature,
                threshold=self.threshold,
                gain=self.gain,
                left=self.left.to_dict(),
                right=self.right.to_dict(),
            )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        node = cls(n=d["n"], value=d["value"])
        if "feature" in d:
            node.feature = d["feature"]
            node.threshold = d["threshold"]
            node.gain = d["gain"]
            node.left = cls.from_dict(d["left"])
            node.right = cls.from_dict(d["right"])
        return node


def _gini_total(n: int, n_pos: int) -> float:
    """n * gini impurity, i.e. the unnormalized split criterion."""
    if n == 0:
        return 0.0
    p = n_pos / n
    return n * 2.0 * p * (1.0 - p)


def _best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray):
    """Best (gain, feature, threshold) over the candidate features, or None.

    Candidate thresholds are midpoints between consecutive distinct values;
    rows with value <= threshold go left.
    """
    n = y.size
    n_pos = int(y.sum())
    parent = _gini_total(n, n_pos)
    best = None  # (gain, feature, threshold)
    for f in features:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        ys = y[order]
        boundaries = np.flatnonzero(xs[:-1] < xs[1:])  # split after index i
        if boundaries.size == 0:
            continue
        pos_prefix = np.cumsum(ys)
        nl = boundaries + 1
        pl = pos_prefix[boundaries]
        nr = n - nl
        pr = n_pos - pl
        with np.errstate(divide="ignore", invalid="ignore"):
            imp_l = np.where(nl > 0, 2.0 * pl * (nl - pl) / nl, 0.0)
            imp_r = np.where(nr > 0, 2.0 * pr * (nr - pr) / nr, 0.0)
        gains = parent - imp_l - imp_r
        i = int(np.argmax(gains))  # first max -> lowest threshold among ties
        gain = float(gains[i])
        if best is None or gain > best[0]:
            b = boundaries[i]
            threshold = float((xs[b] + xs[b + 1]) / 2.0)
            best = (gain, int(f), threshold)
    return best


@dataclass
class CartTree:
    root: TreeNode
    n_features: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.float64)
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if node.is_leaf:
                out[idx] = node.value
                continue
            go_left = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out

    def feature_gains(self) -> np.ndarray:
        gains = np.zeros(self.n_features, dtype=np.float64)
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                gains[node.feature] += node.gain
                stack.append(node.left)
                stack.append(node.right)
        return gains


def build_cart(
    X: np.ndarray,
    y: np.ndarray,
    min_samples_split: int = 2,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
) -> CartTree:
    """Grow a CART tree to purity (no depth cap).

    max_features enables per-split feature subsampling (random forest mode);
    sampled feature ids are sorted so the lowest-index tie-break is preserved
    within the sample.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    p = X.shape[1]
    all_features = np.arange(p)

    root = TreeNode(n=y.size, value=float(y.mean()))
    stack = [(root, np.arange(y.size))]
    while stack:
        node, idx = stack.pop()
        sub_y = y[idx]
        n_pos = int(sub_y.sum())
        if idx.size < min_samples_split or n_pos == 0 or n_pos == idx.size:
            continue
        if max_features is not None and max_features < p:
            features = np.sort(rng.choice(p, size=max_features, replace=False))
        else:
            features = all_features
        found = _best_split(X[idx], sub_y, features)
        if found is None or found[0] <= 1e-12:
            continue
        gain, feature, threshold = found
        go_left = X[idx, feature] <= threshold
        left_idx = idx[go_left]
        right_idx = idx[~go_left]
        node.feature = feature
        node.threshold = threshold
        node.gain = gain
        node.left = TreeNode(n=left_idx.size, value=float(y[left_idx].mean()))
        node.right = TreeNode(n=right_idx.size, value=float(y[right_idx].mean()))
        stack.append((node.left, left_idx))
        stack.append((node.right, right_idx))
    return CartTree(root=root, n_features=p)
