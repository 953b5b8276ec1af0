"""Stratified cross-validation, ranking metrics, and the experiment matrix.

AUC-ROC is the Mann-Whitney pair statistic computed from tie-averaged ranks
(ties count half), identical to the trapezoidal area under the ROC curve. F1
uses a fixed 0.5 probability threshold. Per-fold metrics are averaged, not
pooled. Every cell of the scheme x model matrix reuses the same seed so
differences reflect scheme and model only.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .features import FeatureTable, featurize_corpus
from .ingest import Corpus
from .models import ModelSpec, TrainedModel, predict_proba, train
from .segmentation import SegmentationScheme

logger = logging.getLogger(__name__)

CV_MODES = ("row_stratified", "subject_grouped")


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray  # row index -> fold id
    mode: str
    seed: int

    def split(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        test = np.flatnonzero(self.assignments == fold)
        train_ = np.flatnonzero(self.assignments != fold)
        return train_, test


def stratified_kfold(
    labels: np.ndarray,
    k: int,
    seed: int = 0,
    mode: str = "row_stratified",
    groups=None,
) -> FoldPlan:
    """Deterministic fold assignment.

    row_stratified deals each class round-robin after a seeded shuffle, so
    per-fold class counts are within 1 of proportional. subject_grouped keeps
    all rows of a subject together, greedily balancing per-class row counts
    across folds.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.size
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if mode not in CV_MODES:
        raise ConfigError(f"unknown cv mode {mode!r}; choose from {CV_MODES}")
    rng = np.random.default_rng(seed)
    assignments = np.full(n, -1, dtype=np.int64)

    if mode == "row_stratified":
        offset = 0  # carried across classes so fold sizes stay balanced
        for cls in (0, 1):
            idx = np.flatnonzero(labels == cls)
            # k == n is leave-one-out: one row per fold, always admissible
            if idx.size < k and k != n:
                raise DataError(f"class {cls} has only {idx.size} rows, need at least k={k}")
            idx = rng.permutation(idx)
            assignments[idx] = (offset + np.arange(idx.size)) % k
            offset = (offset + idx.size) % k
    else:
        if groups is None:
            raise ConfigError("subject_grouped mode requires group ids")
        groups = np.asarray(groups)
        if groups.size != n:
            raise ConfigError("group ids length does not match labels")
        unique = sorted(set(groups.tolist()))
        if len(unique) < k:
            raise DataError(f"only {len(unique)} subjects, cannot make {k} grouped folds")
        subj_label = {g: int(labels[groups == g][0]) for g in unique}
        for cls in (0, 1):
            members = [g for g in unique if subj_label[g] == cls]
            order = rng.permutation(len(members))
            members = [members[i] for i in order]
            members.sort(key=lambda g: -int(np.sum(groups == g)))  # stable: big subjects first
            fold_rows = np.zeros(k, dtype=np.int64)
            for g in members:
                fold = int(np.argmin(fold_rows))
                mask = groups == g
                assignments[mask] = fold
                fold_rows[fold] += int(mask.sum())
    return FoldPlan(k=k, assignments=assignments, mode=mode, seed=seed)


def _tie_averaged_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    s = values[order]
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    ends = np.r_[starts[1:], s.size]
    avg = (starts + ends - 1) / 2.0 + 1.0  # average 1-based rank per tie group
    ranks = np.empty(values.size, dtype=np.float64)
    ranks[order] = np.repeat(avg, ends - starts)
    return ranks


def auc_roc(scores: np.ndarray, labels: np.ndarray) -> float:
    """P(score of random positive > random negative), ties counting half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both classes present")
    ranks = _tie_averaged_ranks(scores)
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def f1(scores: np.ndarray, labels: np.ndarray, threshold: float = 0.5) -> float:
    """F1 for the positive class (patients); 0 when there are no true positives."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    predicted = scores >= threshold
    tp = int(np.sum(predicted & (labels == 1)))
    fp = int(np.sum(predicted & (labels == 0)))
    fn = int(np.sum(~predicted & (labels == 1)))
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def roc_points(scores: np.ndarray, labels: np.ndarray) -> list[tuple[float, float]]:
    """Stepwise ROC curve points from (0,0) to (1,1), tie groups merged."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs both classes present")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < y.size:
        j = i
        while j < y.size and s[j] == s[i]:
            j += 1
        tp += int(y[i:j].sum())
        fp += (j - i) - int(y[i:j].sum())
        points.append((fp / n_neg, tp / n_pos))
        i = j
    return points


def config_digest(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


@dataclass
class CVReport:
    scheme: str
    model: str
    fold_aucs: list  # float | None per fold (None: single-class test fold)
    fold_f1s: list[float]
    auc_mean: float
    auc_std: float
    f1_mean: float
    f1_std: float
    seed: int
    digest: str
    fold_curves: list = field(default_factory=list)  # per fold (labels, scores)


def cross_validate(table: FeatureTable, spec: ModelSpec, plan: FoldPlan) -> CVReport:
    """Fit/score each fold; scaler and model see training rows only."""
    if plan.assignments.size != table.n_rows:
        raise ConfigError("fold plan does not match table rows")
    X, y = table.X, table.labels
    fold_aucs: list[float | None] = []
    fold_f1s: list[float] = []
    curves = []
    for fold in range(plan.k):
        train_idx, test_idx = plan.split(fold)
        model = train(spec, X[train_idx], y[train_idx], feature_names=table.columns)
        scores = predict_proba(model, X[test_idx])
        y_test = y[test_idx]
        if y_test.min() == y_test.max():
            logger.warning(
                "fold %d of %s/%s has a single test class; AUC excluded from mean",
                fold, table.scheme, spec.name,
            )
            fold_aucs.append(None)
        else:
            fold_aucs.append(auc_roc(scores, y_test))
        fold_f1s.append(f1(scores, y_test))
        curves.append((y_test.tolist(), scores.tolist()))

    present = [a for a in fold_aucs if a is not None]
    if not present:
        raise DataError("every fold had a single test class; cannot report AUC")
    digest = config_digest(
        {
            "scheme": table.scheme,
            "model": spec.name,
            "family": spec.family,
            "params": spec.params,
            "model_seed": spec.seed,
            "k": plan.k,
            "mode": plan.mode,
            "cv_seed": plan.seed,
        }
    )
    return CVReport(
        scheme=table.scheme,
        model=spec.name,
        fold_aucs=fold_aucs,
        fold_f1s=fold_f1s,
        auc_mean=float(np.mean(present)),
        auc_std=float(np.std(present)),
        f1_mean=float(np.mean(fold_f1s)),
        f1_std=float(np.std(fold_f1s)),
        seed=plan.seed,
        digest=digest,
        fold_curves=curves,
    )


def _run_cell(args) -> CVReport:
    table, spec, k, seed, mode = args
    groups = table.group_ids if mode == "subject_grouped" else None
    plan = stratified_kfold(table.labels, k=k, seed=seed, mode=mode, groups=groups)
    return cross_validate(table, spec, plan)


def run_matrix(
    corpus: Corpus,
    schemes: list[SegmentationScheme],
    specs: dict[str, ModelSpec],
    k: int = 10,
    seed: int = 0,
    mode: str = "row_stratified",
    workers: int = 1,
) -> tuple[list[CVReport], str]:
    """One CVReport per (scheme, model) cell plus a rendered results grid.

    Cells are independent jobs; with workers > 1 they run in a process pool
    and are still collected in submission order, so output is deterministic.
    """
    if not schemes or not specs:
        raise ConfigError("need at least one scheme and one model")
    tables = [featurize_corpus(corpus, scheme) for scheme in schemes]
    jobs = [(table, spec, k, seed, mode) for table in tables for spec in specs.values()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_cell, jobs))
    else:
        reports = [_run_cell(job) for job in jobs]
    return reports, render_grid(reports)


def render_grid(reports: list[CVReport]) -> str:
    """Text grid: one row per (scheme, model) with metrics at 2 decimals."""
    lines = [f"{'scheme':<12} {'model':<20} {'auc':>6} {'f1':>6}"]
    for r in reports:
        lines.append(f"{r.scheme:<12} {r.model:<20} {r.auc_mean:>6.2f} {r.f1_mean:>6.2f}")
    return "\n".join(lines) + "\n"


def write_report_csv(reports: list[CVReport], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("scheme,model,auc_mean,auc_std,f1_mean,f1_std,seed,config_digest\n")
        for r in reports:
            fh.write(
                f"{r.scheme},{r.model},{r.auc_mean:.17g},{r.auc_std:.17g},"
                f"{r.f1_mean:.17g},{r.f1_std:.17g},{r.seed},{r.digest}\n"
            )


def write_fold_csv(reports: list[CVReport], path) -> None:
    """Long-format per-fold metrics; missing AUC rendered as empty field."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("scheme,model,fold,auc,f1\n")
        for r in reports:
            for fold, (auc, f1_val) in enumerate(zip(r.fold_aucs, r.fold_f1s)):
                auc_txt = "" if auc is None else f"{auc:.17g}"
                fh.write(f"{r.scheme},{r.model},{fold},{auc_txt},{f1_val:.17g}\n")


def write_roc_csv(reports: list[CVReport], path) -> None:
    """ROC points per fold for external plotting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("scheme,model,fold,fpr,tpr\n")
        for r in reports:
            for fold, (labels, scores) in enumerate(r.fold_curves):
                labels = np.asarray(labels)
                if labels.min() == labels.max():
                    continue
                for fpr, tpr in roc_points(np.asarray(scores), labels):
                    fh.write(f"{r.scheme},{r.model},{fold},{fpr:.17g},{tpr:.17g}\n")
