"""Histogram-based gradient boosted trees with logistic loss.

One engine, two growth strategies: "lgbm" grows leaf-wise up to num_leaves,
"xgb" grows level-wise up to max_depth. Features are pre-binned (at most 255
bins per feature); split search scans cumulative gradient/hessian histograms
for all features at once. Leaf values are Newton steps -G/(H+lambda) with the
learning rate folded in.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-15, 1 - 1e-15)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


@dataclass
class BoostNode:
    value: float = 0.0  # leaf output (already shrunk)
    feature: int = -1
    bin: int = -1  # rows with bin index <= this go left
    gain: float = 0.0
    left: "BoostNode | None" = None
    right: "BoostNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {
            "feature": self.feature,
            "bin": self.bin,
            "gain": self.gain,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoostNode":
        if "feature" not in d:
            return cls(value=d["value"])
        return cls(
            feature=d["feature"],
            bin=d["bin"],
            gain=d["gain"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


@dataclass
class Binner:
    """Per-feature bin boundaries; bin(x) = searchsorted(boundaries, x, 'right')."""

    boundaries: list[np.ndarray]

    @property
    def n_bins(self) -> np.ndarray:
        return np.array([b.size + 1 for b in self.boundaries])

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape, dtype=np.int64)
        for f, bounds in enumerate(self.boundaries):
            out[:, f] = np.searchsorted(bounds, X[:, f], side="right")
        return out


def fit_binner(X: np.ndarray, max_bins: int = 255) -> Binner:
    """Boundaries at midpoints of distinct values, or at quantiles when a
    feature has more than max_bins distinct values."""
    X = np.asarray(X, dtype=np.float64)
    boundaries = []
    for f in range(X.shape[1]):
        uniq = np.unique(X[:, f])
        if uniq.size <= max_bins:
            bounds = (uniq[:-1] + uniq[1:]) / 2.0
        else:
            qs = np.quantile(uniq, np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
            bounds = np.unique(qs)
        boundaries.append(bounds)
    return Binner(boundaries=boundaries)


def _node_histograms(codes_off: np.ndarray, idx: np.ndarray, g: np.ndarray, h: np.ndarray, p: int, width: int):
    # codes_off has per-feature offsets baked in so one bincount covers all features
    flat = codes_off[idx].ravel()
    size = p * width
    hist_g = np.bincount(flat, weights=np.repeat(g[idx], p), minlength=size).reshape(p, width)
    hist_h = np.bincount(flat, weights=np.repeat(h[idx], p), minlength=size).reshape(p, width)
    hist_c = np.bincount(flat, minlength=size).reshape(p, width)
    return hist_g, hist_h, hist_c


def _best_split(hist_g, hist_h, hist_c, n_bins, reg_lambda, min_child):
    """Best (gain, feature, bin) over cumulative histograms, or None.

    Ties break on lowest feature index then lowest bin (np.argmax order).
    """
    G = hist_g.sum(axis=1, keepdims=True)
    H = hist_h.sum(axis=1, keepdims=True)
    C = hist_c.sum(axis=1, keepdims=True)
    GL = np.cumsum(hist_g, axis=1)
    HL = np.cumsum(hist_h, axis=1)
    CL = np.cumsum(hist_c, axis=1)
    GR = G - GL
    HR = H - HL
    CR = C - CL

    parent = (G**2) / (H + reg_lambda)
    with np.errstate(divide="ignore", invalid="ignore"):
        gains = 0.5 * (GL**2 / (HL + reg_lambda) + GR**2 / (HR + reg_lambda) - parent)

    p, width = hist_g.shape
    valid = (CL >= min_child) & (CR >= min_child)
    valid &= np.arange(width)[None, :] < (n_bins - 1)[:, None]
    gains = np.where(valid, gains, -np.inf)

    flat_best = int(np.argmax(gains))
    feature, bin_ = divmod(flat_best, width)
    gain = float(gains[feature, bin_])
    if not np.isfinite(gain) or gain <= 1e-12:
        return None
    return gain, feature, bin_


@dataclass
class _Leaf:
    node: BoostNode
    idx: np.ndarray
    depth: int
    split: tuple | None  # (gain, feature, bin)


class _TreeGrower:
    def __init__(self, codes, codes_off, g, h, n_bins, params):
        self.codes = codes
        self.codes_off = codes_off
        self.g = g
        self.h = h
        self.n_bins = n_bins
        self.p, self.width = int(n_bins.size), int(n_bins.max())
        self.params = params

    def _make_leaf(self, idx: np.ndarray, depth: int) -> _Leaf:
        pr = self.params
        g_sum = float(self.g[idx].sum())
        h_sum = float(self.h[idx].sum())
        node = BoostNode(value=-pr["learning_rate"] * g_sum / (h_sum + pr["reg_lambda"]))
        split = None
        if idx.size >= 2 * pr["min_child_samples"]:
            hist = _node_histograms(self.codes_off, idx, self.g, self.h, self.p, self.width)
            split = _best_split(*hist, self.n_bins, pr["reg_lambda"], pr["min_child_samples"])
        return _Leaf(node=node, idx=idx, depth=depth, split=split)

    def _apply_split(self, leaf: _Leaf) -> tuple[_Leaf, _Leaf]:
        gain, feature, bin_ = leaf.split
        node = leaf.node
        go_left = self.codes[leaf.idx, feature] <= bin_
        left = self._make_leaf(leaf.idx[go_left], leaf.depth + 1)
        right = self._make_leaf(leaf.idx[~go_left], leaf.depth + 1)
        node.value = 0.0
        node.feature = feature
        node.bin = bin_
        node.gain = gain
        node.left = left.node
        node.right = right.node
        return left, right

    def grow_leafwise(self, num_leaves: int) -> BoostNode:
        root = self._make_leaf(np.arange(self.g.size), 0)
        heap: list[tuple[float, int, _Leaf]] = []
        counter = 0  # heap tie-break: earlier-created leaf first
        if root.split:
            heapq.heappush(heap, (-root.split[0], counter, root))
        leaves = 1
        while heap and leaves < num_leaves:
            _, _, leaf = heapq.heappop(heap)
            left, right = self._apply_split(leaf)
            leaves += 1
            for child in (left, right):
                if child.split:
                    counter += 1
                    heapq.heappush(heap, (-child.split[0], counter, child))
        return root.node

    def grow_levelwise(self, max_depth: int) -> BoostNode:
        root = self._make_leaf(np.arange(self.g.size), 0)
        level = [root]
        while level:
            next_level = []
            for leaf in level:
                if leaf.split and leaf.depth < max_depth:
                    next_level.extend(self._apply_split(leaf))
            level = next_level
        return root.node


def _predict_tree(node: BoostNode, codes: np.ndarray) -> np.ndarray:
    out = np.empty(codes.shape[0], dtype=np.float64)
    stack = [(node, np.arange(codes.shape[0]))]
    while stack:
        nd, idx = stack.pop()
        if idx.size == 0:
            continue
        if nd.is_leaf:
            out[idx] = nd.value
            continue
        go_left = codes[idx, nd.feature] <= nd.bin
        stack.append((nd.left, idx[go_left]))
        stack.append((nd.right, idx[~go_left]))
    return out


DEFAULT_PARAMS = {
    "n_rounds": 100,
    "learning_rate": 0.1,
    "max_bins": 255,
    "min_child_samples": 20,
    "reg_lambda": 1.0,
    "num_leaves": 31,  # leaf-wise preset
    "max_depth": 6,  # level-wise preset
}


@dataclass
class GradientBoosting:
    preset: str  # "lgbm" | "xgb"
    base_score: float
    binner: Binner
    trees: list[BoostNode]
    n_features: int
    train_losses: list[float] = field(default_factory=list)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        codes = self.binner.transform(X)
        raw = np.full(codes.shape[0], self.base_score, dtype=np.float64)
        for tree in self.trees:
            raw += _predict_tree(tree, codes)
        return raw

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def feature_gains(self) -> np.ndarray:
        gains = np.zeros(self.n_features, dtype=np.float64)
        stack = list(self.trees)
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                gains[node.feature] += node.gain
                stack.append(node.left)
                stack.append(node.right)
        return gains


def train_gbdt(X: np.ndarray, y: np.ndarray, preset: str = "lgbm", **overrides) -> GradientBoosting:
    if preset not in ("lgbm", "xgb"):
        raise DataError(f"unknown gbdt preset {preset!r}")
    params = dict(DEFAULT_PARAMS)
    params.update(overrides)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape

    binner = fit_binner(X, max_bins=params["max_bins"])
    codes = binner.transform(X)
    n_bins = binner.n_bins
    codes_off = codes + np.arange(p) * int(n_bins.max())

    prior = float(np.clip(y.mean(), 1e-6, 1 - 1e-6))
    base = float(np.log(prior / (1 - prior)))
    raw = np.full(n, base, dtype=np.float64)

    trees: list[BoostNode] = []
    losses = [log_loss(y, sigmoid(raw))]
    for _ in range(params["n_rounds"]):
        prob = sigmoid(raw)
        g = prob - y
        h = prob * (1 - prob)
        grower = _TreeGrower(codes, codes_off, g, h, n_bins, params)
        if preset == "lgbm":
            tree = grower.grow_leafwise(params["num_leaves"])
        else:
            tree = grower.grow_levelwise(params["max_depth"])
        trees.append(tree)
        raw += _predict_tree(tree, codes)
        losses.append(log_loss(y, sigmoid(raw)))

    return GradientBoosting(
        preset=preset, base_score=base, binner=binner, trees=trees, n_features=p, train_losses=losses
    )
