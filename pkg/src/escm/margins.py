"""Rank-based transformation of each margin to a standard alpha-Pareto scale."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.stats import rankdata

DEFAULT_ALPHA = 2.0


class DegenerateColumnWarning(UserWarning):
    pass


def pareto_transform(x, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Map every column to ``(1 - F(x)) ** (-1 / alpha)``.

    ``F`` is the empirical CDF with the ``rank / (n + 1)`` convention and
    average ranks for ties, so the sample maximum stays finite at
    ``(n + 1) ** (1 / alpha)``. Accepts a 1-d column or an ``n x d`` matrix.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    x = np.asarray(x, dtype=float)
    column = x.ndim == 1
    x2 = x.reshape(-1, 1) if column else x
    if x2.ndim != 2:
        raise ValueError("expected a column or a 2-d sample matrix")
    n = x2.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if not np.all(np.isfinite(x2)):
        raise ValueError("sample contains non-finite values")

    for j in range(x2.shape[1]):
        if np.all(x2[:, j] == x2[0, j]):
            warnings.warn(f"column {j + 1} is constant; all transformed values are equal",
                          DegenerateColumnWarning, stacklevel=2)
    ranks = rankdata(x2, method="average", axis=0)
    out = ((n + 1) / (n + 1 - ranks)) ** (1.0 / alpha)
    return out[:, 0] if column else out


def orientations(pair) -> list[np.ndarray]:
    """The four sign flips ``(x1, x2), (-x1, x2), (x1, -x2), (-x1, -x2)``."""
    pair = np.asarray(pair, dtype=float)
    if pair.ndim != 2 or pair.shape[1] != 2:
        raise ValueError(f"expected an n x 2 pair, got shape {pair.shape}")
    return [pair * np.array(signs) for signs in ORIENTATION_SIGNS]


ORIENTATION_SIGNS = ((1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0))
ORIENTATION_LABELS = ("(x1,x2)", "(-x1,x2)", "(x1,-x2)", "(-x1,-x2)")
