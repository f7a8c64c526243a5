"""One-dimensional distributions under the 2-Wasserstein metric.

Distributions are stored as quantile functions sampled on a uniform
probability grid over [0, 1].  In quantile coordinates the 2-Wasserstein
metric is the L2 metric, geodesics (McCann interpolants) are linear
interpolations, and the embedding is the quantile function itself; the image
set is the convex cone of nondecreasing grid vectors, optionally restricted
to a compact support interval.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import isotonic_regression

from ..errors import InvariantViolation, InverseInfeasible
from .base import HilbertSpace, MetricObject

__all__ = ["Wasserstein1D"]


class Wasserstein1D(HilbertSpace):
    """Quantile functions on a uniform grid of [0, 1].

    Parameters
    ----------
    n_grid : number of probability grid points (default 100).
    support : compact interval the distributions live on, or ``None`` for
        unbounded support.
    """

    tag = "wasserstein_1d"

    def __init__(self, n_grid: int = 100, support: tuple[float, float] | None = None):
        if n_grid < 2:
            raise ValueError("n_grid must be >= 2")
        self._n = int(n_grid)
        if support is not None:
            lo, hi = float(support[0]), float(support[1])
            if not hi > lo:
                raise ValueError("support must be a nondegenerate interval")
            support = (lo, hi)
        self._support = support
        self.grid = np.linspace(0.0, 1.0, self._n)
        step = 1.0 / (self._n - 1)
        w = np.full(self._n, step)
        w[0] = w[-1] = step / 2.0
        self._hilbert_weights = w

    @property
    def shape(self) -> tuple[int, ...]:
        return (self._n,)

    @property
    def support(self) -> tuple[float, float] | None:
        return self._support

    def _key(self):
        return (self._n, self._support)

    def _validate(self, arr):
        scale = max(1.0, float(np.abs(arr).max()))
        diffs = np.diff(arr)
        if diffs.min(initial=0.0) < -1e-10 * scale:
            raise InvariantViolation(
                f"quantile function must be nondecreasing; worst step {diffs.min()!r}"
            )
        if self._support is not None:
            lo, hi = self._support
            if arr.min() < lo - 1e-10 * scale or arr.max() > hi + 1e-10 * scale:
                raise InvariantViolation(
                    f"quantile values must stay within the support [{lo}, {hi}]"
                )
        out = np.maximum.accumulate(arr)  # canonicalize tiny inversions
        if self._support is not None:
            out = np.clip(out, *self._support)
        return out

    def _embed(self, arr):
        return arr.copy()

    def _inverse(self, v):
        proj = self.project_embedding(v)
        gap = np.abs(proj - v).max()
        if gap > 1e-8 * max(1.0, float(np.abs(v).max())):
            raise InverseInfeasible(
                f"vector is not a feasible quantile function (projection moves it "
                f"by {gap!r}); pass project=True to project first"
            )
        return proj

    def project_embedding(self, v):
        """Weighted isotonic projection (pool-adjacent-violators) onto the
        nondecreasing cone, then clamping into the support interval."""
        v = np.asarray(v, dtype=float).ravel()
        if np.all(np.diff(v) >= 0.0):
            out = v.copy()
        else:
            out = isotonic_regression(v, weights=self._hilbert_weights).x.copy()
        if self._support is not None:
            out = np.clip(out, *self._support)
        return out

    def quantiles(self, a: MetricObject) -> np.ndarray:
        self._check_member(a)
        return a.data.copy()
