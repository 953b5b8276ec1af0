"""Per-segment statistical features and feature-table assembly.

Sixteen features are computed for every segment of every day (or of a
subject's whole concatenated record for the all_days scheme). Degenerate
inputs (zero variance, zero mean) map to 0 rather than NaN so tables stay
rectangular. The minimum is deliberately not a feature: it separates the
classes poorly and is dropped from the set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .ingest import Corpus
from .segmentation import SegmentationScheme, segment_day, validate_scheme
from .errors import ConfigError

FEATURE_NAMES = (
    "mean",
    "median",
    "std_dev",
    "prop_zeros",
    "skewness",
    "kurtosis",
    "max",
    "mad",
    "iqr",
    "cv",
    "entropy",
    "autocorr_lag1",
    "n_peaks",
    "n_troughs",
    "semivariance",
    "rms",
)

MAX_ENTROPY_BINS = 16


def extract_features(values: np.ndarray) -> dict[str, float]:
    """Compute the sixteen statistics of one segment's values.

    Conventions: population moments throughout; skewness/kurtosis/cv/
    autocorrelation are 0 for degenerate inputs; entropy is over at most 16
    equal-width histogram bins spanning [0, max]; peaks/troughs are strict
    interior local extrema.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise DataError("cannot extract features from an empty vector")
    n = x.size
    mean = float(x.mean())
    median = float(np.median(x))
    centered = x - mean
    m2 = float(np.mean(centered**2))
    std = float(np.sqrt(m2))

    if m2 > 0:
        skewness = float(np.mean(centered**3)) / m2**1.5
        kurtosis = float(np.mean(centered**4)) / m2**2 - 3.0
    else:
        skewness = 0.0
        kurtosis = 0.0

    prop_zeros = float(np.count_nonzero(x == 0)) / n
    maximum = float(x.max())
    mad = float(np.median(np.abs(x - median)))
    q1, q3 = np.quantile(x, [0.25, 0.75])  # linear interpolation at h=(n-1)p
    iqr = float(q3 - q1)
    cv = std / mean if mean != 0 else 0.0

    distinct = np.unique(x).size
    if distinct <= 1:
        entropy = 0.0
    else:
        # equal-width bins over [0, max], left-closed, last bin closed
        bins = min(MAX_ENTROPY_BINS, distinct)
        idx = np.minimum((x * bins / maximum).astype(np.int64), bins - 1)
        counts = np.bincount(idx, minlength=bins)
        p = counts[counts > 0] / n
        entropy = float(-(p * np.log(p)).sum())

    denom = float(np.sum(centered**2))
    if denom > 0 and n > 1:
        autocorr = float(np.sum(centered[:-1] * centered[1:])) / denom
    else:
        autocorr = 0.0

    if n >= 3:
        inner = x[1:-1]
        n_peaks = int(np.count_nonzero((x[:-2] < inner) & (inner > x[2:])))
        n_troughs = int(np.count_nonzero((x[:-2] > inner) & (inner < x[2:])))
    else:
        n_peaks = 0
        n_troughs = 0

    below = centered[centered < 0]
    semivariance = float(np.sum(below**2)) / n
    rms = float(np.sqrt(np.mean(x**2)))

    return {
        "mean": mean,
        "median": median,
        "std_dev": std,
        "prop_zeros": prop_zeros,
        "skewness": skewness,
        "kurtosis": kurtosis,
        "max": maximum,
        "mad": mad,
        "iqr": iqr,
        "cv": cv,
        "entropy": entropy,
        "autocorr_lag1": autocorr,
        "n_peaks": float(n_peaks),
        "n_troughs": float(n_troughs),
        "semivariance": semivariance,
        "rms": rms,
    }


@dataclass(frozen=True)
class FeatureTable:
    """Rectangular feature matrix with row identity and labels.

    Rows are (subject_id, date) for per-day schemes or (subject_id, "all")
    for the all_days scheme. group_id equals subject_id and is what
    subject-grouped cross-validation folds on.
    """

    scheme: str
    unit: str  # "per_day" | "per_subject"
    columns: tuple[str, ...]
    subject_ids: tuple[str, ...]
    dates: tuple[str, ...]
    labels: np.ndarray  # shape (n,), int
    X: np.ndarray  # shape (n, len(columns)), float64

    def __post_init__(self):
        if self.X.shape != (len(self.subject_ids), len(self.columns)):
            raise DataError(f"feature matrix shape {self.X.shape} inconsistent with row/column names")
        if not np.isfinite(self.X).all():
            raise DataError("non-finite feature values in table")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def group_ids(self) -> tuple[str, ...]:
        return self.subject_ids


def featurize_corpus(corpus: Corpus, scheme: SegmentationScheme) -> FeatureTable:
    """Build the feature table for one corpus under one scheme.

    Per-day schemes yield one row per complete (subject, date); the all_days
    scheme yields one row per subject over its days concatenated in date
    order. Column order is segments in scheme order x features in canonical
    order; rows sorted by (subject_id, date).
    """
    if not corpus.days:
        raise DataError("cannot featurize an empty corpus")
    violations = validate_scheme(scheme)
    if violations:
        raise ConfigError(f"scheme {scheme.name!r} invalid: {violations[0].detail}")

    columns = tuple(f"{seg}_{feat}" for seg in scheme.segment_names() for feat in FEATURE_NAMES)

    subject_ids: list[str] = []
    dates: list[str] = []
    labels: list[int] = []
    rows: list[list[float]] = []

    if scheme.per_subject:
        for subject_id in sorted(corpus.subjects):
            days = sorted(corpus.days_of(subject_id), key=lambda d: d.date)
            concatenated = np.concatenate([d.values for d in days])
            feats = extract_features(concatenated)
            subject_ids.append(subject_id)
            dates.append("all")
            labels.append(days[0].label)
            rows.append([feats[f] for f in FEATURE_NAMES])
    else:
        for day in sorted(corpus.days, key=lambda d: (d.subject_id, d.date)):
            row: list[float] = []
            for segment in segment_day(day, scheme):
                feats = extract_features(segment.values)
                row.extend(feats[f] for f in FEATURE_NAMES)
            subject_ids.append(day.subject_id)
            dates.append(day.date.isoformat())
            labels.append(day.label)
            rows.append(row)

    return FeatureTable(
        scheme=scheme.name,
        unit="per_subject" if scheme.per_subject else "per_day",
        columns=columns,
        subject_ids=tuple(subject_ids),
        dates=tuple(dates),
        labels=np.asarray(labels, dtype=np.int64),
        X=np.asarray(rows, dtype=np.float64),
    )


def write_feature_table(table: FeatureTable, path: str | Path) -> None:
    """Serialize with 17 significant digits for lossless float round-trip."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["subject_id", "date", "label", *table.columns])
        for i in range(table.n_rows):
            writer.writerow(
                [table.subject_ids[i], table.dates[i], int(table.labels[i])]
                + [format(v, ".17g") for v in table.X[i]]
            )


def read_feature_table(path: str | Path, scheme: str = "") -> FeatureTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:3] != ["subject_id", "date", "label"]:
            raise DataError(f"feature table {path} missing subject_id,date,label header")
        columns = tuple(header[3:])
        subject_ids, dates, labels, rows = [], [], [], []
        for row in reader:
            subject_ids.append(row[0])
            dates.append(row[1])
            labels.append(int(row[2]))
            rows.append([float(v) for v in row[3:]])
    if not rows:
        raise DataError(f"feature table {path} has no rows")
    unit = "per_subject" if all(d == "all" for d in dates) else "per_day"
    return FeatureTable(
        scheme=scheme or Path(path).stem.removeprefix("features_"),
        unit=unit,
        columns=columns,
        subject_ids=tuple(subject_ids),
        dates=tuple(dates),
        labels=np.asarray(labels, dtype=np.int64),
        X=np.asarray(rows, dtype=np.float64),
    )
