"""Componentwise-monotone combiners of edge values.

All four are symmetric in their arguments and nondecreasing in each one on
the nonnegative orthant.  RATIO and GATED_SUM use the 0-on-0 convention.
"""

from __future__ import annotations

import enum

import numpy as np

ZERO_TOL = 1e-9


class Combiner(enum.Enum):
    SUM = "sum"
    PRODUCT = "product"
    RATIO = "ratio"
    GATED_SUM = "gated_sum"


class Variant(enum.Enum):
    RATIO = "ratio"
    PRODUCT = "product"


def as_variant(v) -> Variant:
    if isinstance(v, Variant):
        return v
    return Variant(str(v).strip().lower())


def delta(values, tol: float = ZERO_TOL) -> int:
    """1 when every value exceeds ``tol``, else 0."""
    values = np.asarray(values, dtype=float)
    return int(bool(np.all(values > tol)))


def generic_combiner(values, f_kind) -> float:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("combiner needs a nonempty 1-d list of values")
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError("combiner values must be finite and nonnegative")
    kind = f_kind if isinstance(f_kind, Combiner) else Combiner(str(f_kind).strip().lower())
    total = float(values.sum())
    if kind is Combiner.SUM:
        return total
    if kind is Combiner.PRODUCT:
        return float(np.prod(values))
    if kind is Combiner.RATIO:
        return float(np.prod(values)) / total if total > 0 else 0.0
    return delta(values) * total


def batch_ratio(edges: np.ndarray) -> np.ndarray:
    total = edges.sum(axis=1)
    prod = edges.prod(axis=1)
    return np.where(total > 0, prod / np.where(total > 0, total, 1.0), 0.0)


def batch_gated_sum(edges: np.ndarray, tol: float = ZERO_TOL) -> np.ndarray:
    return np.where(np.all(edges > tol, axis=1), edges.sum(axis=1), 0.0)
