"""Per-column standardization used by the distance/margin/gradient models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class StandardScaler:
    mean: np.ndarray
    scale: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale


def fit_scaler(X: np.ndarray) -> StandardScaler:
    """Column means and population standard deviations; zero-variance columns
    get scale 1 so they pass through as constant zeros."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError(f"need at least 2 rows to fit a scaler, got shape {X.shape}")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0, 1.0, scale)
    return StandardScaler(mean=mean, scale=scale)
