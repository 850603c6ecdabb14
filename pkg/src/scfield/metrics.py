"""Completion-quality score and tolerance-matched edge precision/recall."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import Field3D


class Normalization(str, enum.Enum):
    RAW = "raw"
    COSINE = "cosine"


@dataclass(frozen=True)
class ScoreReport:
    score: float
    normalization: Normalization

    def record(self) -> str:
        return f"score={self.score:.6g} normalization={self.normalization.value}"


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    match_tolerance: int

    def record(self) -> str:
        return f"precision={self.precision:.6g} recall={self.recall:.6g} f1={self.f1:.6g}"


def completion_score(c: Field3D, missing: np.ndarray,
                     normalization: Normalization | str = Normalization.RAW) -> ScoreReport:
    """Dot product of the theta-collapsed field (max over theta) with a missing-pixel map."""
    normalization = Normalization(normalization)
    collapsed = c.max_over_theta()
    missing = np.asarray(missing, dtype=bool)
    if missing.shape != collapsed.shape:
        raise ValueError(f"missing map {missing.shape} does not match field {collapsed.shape}")
    raw = float(collapsed[missing].sum())
    if normalization is Normalization.RAW or raw == 0.0:
        return ScoreReport(raw, normalization)
    denom = float(np.linalg.norm(collapsed)) * float(np.sqrt(missing.sum()))
    return ScoreReport(raw / denom, normalization)


def _near(target: np.ndarray, tolerance: int) -> np.ndarray:
    """Pixels within Chebyshev distance ``tolerance`` of an on pixel of ``target``."""
    if tolerance == 0:
        return target
    return ndimage.binary_dilation(target, structure=np.ones((3, 3), bool), iterations=tolerance)


def prf(predicted: np.ndarray, truth: np.ndarray, tolerance: int = 2) -> PRF:
    """Set-distance precision/recall: no one-to-one matching is enforced.

    Empty prediction gives precision 0; empty truth gives recall 0; when both
    are empty the maps are identical and everything is 1.
    """
    pred = np.asarray(predicted, dtype=bool)
    true = np.asarray(truth, dtype=bool)
    if pred.shape != true.shape:
        raise ValueError(f"map sizes differ: {pred.shape} vs {true.shape}")
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    n_pred, n_true = int(pred.sum()), int(true.sum())
    if n_pred == 0 and n_true == 0:
        return PRF(1.0, 1.0, 1.0, tolerance)
    p = float((pred & _near(true, tolerance)).sum()) / n_pred if n_pred else 0.0
    r = float((true & _near(pred, tolerance)).sum()) / n_true if n_true else 0.0
    f1 = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
    return PRF(p, r, f1, tolerance)
