"""Observed regression-discontinuity samples."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import numpy as np

from .errors import (
    InvariantViolation,
    MixedSpaces,
    NonFinitePayload,
)
from .spaces import HilbertSpace, MetricObject, Space

__all__ = ["RddSample", "MIN_SIDE_OBS"]

#: observations required strictly below and at-or-above the cutoff before
#: the data-adaptive bandwidth rule applies
MIN_SIDE_OBS = 20


@dataclass(frozen=True, eq=False)
class RddSample:
    """Records (R_i, Y_i) with optional treatment T_i and assignment Z_i.

    Records are stored sorted by the running variable, so two samples with
    the same records in any order are bit-identical; an observation exactly
    at the cutoff belongs to the treated (right) side.  Data-adaptive
    bandwidth selection additionally requires :data:`MIN_SIDE_OBS`
    observations on each side.
    """

    r: np.ndarray
    ys: tuple[MetricObject, ...]
    cutoff: float
    t: np.ndarray | None = None
    z: np.ndarray | None = None

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or r.size == 0:
            raise InvariantViolation("running variable must be a nonempty vector")
        if not np.all(np.isfinite(r)):
            raise NonFinitePayload("running variable contains NaN or infinite values")
        if len(self.ys) != r.size:
            raise InvariantViolation("outcomes and running values must align")
        space = self.ys[0].space
        for y in self.ys:
            if y.space != space:
                raise MixedSpaces("all outcomes must share one space")

        order = np.argsort(r, kind="stable")
        object.__setattr__(self, "r", r[order])
        object.__setattr__(self, "ys", tuple(self.ys[i] for i in order))
        self.r.setflags(write=False)

        for name in ("t", "z"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (r.size,):
                raise InvariantViolation(f"{name} column must align with records")
            if not np.all(np.isin(arr, (0.0, 1.0))):
                raise InvariantViolation(f"{name} column must be 0/1")
            object.__setattr__(self, name, arr[order].astype(int))
            getattr(self, name).setflags(write=False)

        c = float(self.cutoff)
        object.__setattr__(self, "cutoff", c)
        if self.z is not None and np.any(self.z != (self.r >= c).astype(int)):
            raise InvariantViolation(
                "assignment column must equal the cutoff indicator 1{R >= c}"
            )

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def space(self) -> Space:
        return self.ys[0].space

    @property
    def n_left(self) -> int:
        return int((self.r < self.cutoff).sum())

    @property
    def n_right(self) -> int:
        return int((self.r >= self.cutoff).sum())

    @cached_property
    def embeddings(self) -> np.ndarray:
        """Stacked embedded outcomes, (n, D); requires an embeddable space."""
        space = self.space
        if not isinstance(space, HilbertSpace):
            from .errors import EmbeddingUnavailable

            raise EmbeddingUnavailable(
                f"{type(space).__name__} has no isometric embedding"
            )
        return space.embed_many(self.ys)

    def subset(self, mask: np.ndarray) -> "RddSample":
        """Subsample by boolean mask, skipping the per-side minimum check.

        Strata used by fuzzy estimators are often small; the caller is
        responsible for degenerate-window handling downstream.
        """
        mask = np.asarray(mask, dtype=bool)
        sub = object.__new__(RddSample)
        object.__setattr__(sub, "r", self.r[mask])
        object.__setattr__(
            sub, "ys", tuple(y for y, keep in zip(self.ys, mask) if keep)
        )
        object.__setattr__(sub, "cutoff", self.cutoff)
        object.__setattr__(sub, "t", None if self.t is None else self.t[mask])
        object.__setattr__(sub, "z", None if self.z is None else self.z[mask])
        return sub

    def validate_sharp(self):
        """Check the sharp-design consistency T = 1{R >= c} when T is present."""
        if self.t is not None:
            expected = (self.r >= self.cutoff).astype(int)
            if np.any(self.t != expected):
                raise InvariantViolation(
                    "sharp design requires the treatment column to equal 1{R >= c}"
                )
