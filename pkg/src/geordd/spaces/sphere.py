"""Compositional outcomes on the positive orthant of the unit sphere.

Compositions (nonnegative shares summing to one) are stored through the
square-root map, which turns the simplex into the positive orthant of the
unit sphere with the arc-length metric d(z1, z2) = arccos(<z1, z2>).  This
space is positively curved and admits no isometric Hilbert embedding, but it
has globally defined Log/Exp charts away from antipodal pairs.
"""

from __future__ import annotations

import numpy as np

from ..errors import (
    AntipodalPoints,
    ExpOutOfDomain,
    InvariantViolation,
    TransportOutOfSpace,
)
from .base import MetricObject, Space

__all__ = ["CompositionalSphere"]

#: inner products at or below -1 + _ANTIPODAL_TOL are treated as antipodal
_ANTIPODAL_TOL = 1e-9


def _clip_dot(u, v) -> float:
    return float(np.clip(np.dot(u, v), -1.0, 1.0))


class CompositionalSphere(Space):
    """Positive orthant of the unit sphere in R^dim with arc-length metric."""

    tag = "compositional_sphere"

    def __init__(self, dim: int = 3):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self._dim = int(dim)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self._dim,)

    @property
    def logexp_available(self) -> bool:
        return True

    def _key(self):
        return (self._dim,)

    def _validate(self, arr):
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > 1e-10:
            raise InvariantViolation(f"point is not on the unit sphere: |z| = {norm!r}")
        if np.any(arr < -1e-10):
            raise InvariantViolation("coordinates must be nonnegative")
        out = np.clip(arr, 0.0, None)
        return out / np.linalg.norm(out)

    @classmethod
    def from_shares(cls, shares, floor: float = 1e-12) -> MetricObject:
        """Build a point from raw compositional shares (a simplex vector).

        Zero shares are floored at ``floor`` and the composition renormalized
        before taking square roots, so boundary compositions stay inside the
        open orthant where the geometry is well behaved.
        """
        y = np.asarray(shares, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise InvariantViolation("shares must be a vector of length >= 2")
        if np.any(y < -1e-12) or not np.all(np.isfinite(y)):
            raise InvariantViolation("shares must be finite and nonnegative")
        if abs(y.sum() - 1.0) > 1e-8:
            raise InvariantViolation(f"shares must sum to one, got {y.sum()!r}")
        y = np.maximum(y, floor)
        y = y / y.sum()
        return cls(y.size).point(np.sqrt(y))

    def to_shares(self, a: MetricObject) -> np.ndarray:
        self._check_member(a)
        return a.data**2

    # -- metric ------------------------------------------------------------------

    def distance(self, a, b) -> float:
        self._check_pair(a, b)
        # chord form of arccos(<a, b>): well-conditioned near zero distance
        chord = float(np.linalg.norm(a.data - b.data))
        return float(2.0 * np.arcsin(min(0.5 * chord, 1.0)))

    def _check_not_antipodal(self, dot: float):
        if dot <= -1.0 + _ANTIPODAL_TOL:
            raise AntipodalPoints("points are antipodal; the geodesic is not unique")

    def geodesic(self, a, b, t: float) -> MetricObject:
        self._check_pair(a, b)
        dot = _clip_dot(a.data, b.data)
        self._check_not_antipodal(dot)
        theta = np.arccos(dot)
        t = float(t)
        if theta < 1e-14:
            return self.point(a.data.copy())
        z = (np.sin((1.0 - t) * theta) * a.data + np.sin(t * theta) * b.data) / np.sin(theta)
        return self.point(z / np.linalg.norm(z))

    # -- Log / Exp charts ------------------------------------------------------------

    def log_map(self, base: MetricObject, a: MetricObject) -> np.ndarray:
        self._check_pair(base, a)
        dot = _clip_dot(base.data, a.data)
        self._check_not_antipodal(dot)
        theta = np.arccos(dot)
        if theta < 1e-14:
            return np.zeros(self._dim)
        u = a.data - dot * base.data
        return theta * u / np.linalg.norm(u)

    def exp_map(self, base: MetricObject, v) -> MetricObject:
        """Exponential chart at ``base``.

        Raises :class:`ExpOutOfDomain` when the tangent vector reaches the cut
        locus (norm >= pi) or the image leaves the positive orthant; callers
        that need a total map should catch it and apply
        :meth:`project_to_orthant`.
        """
        self._check_member(base)
        v = np.asarray(v, dtype=float)
        # keep v in the tangent space at base (guards float drift)
        v = v - float(np.dot(v, base.data)) * base.data
        norm = float(np.linalg.norm(v))
        if norm < 1e-14:
            return self.point(base.data.copy())
        if norm >= np.pi:
            raise ExpOutOfDomain(
                f"tangent vector norm {norm!r} is at or beyond the cut locus (pi)"
            )
        z = np.cos(norm) * base.data + np.sin(norm) * v / norm
        if np.any(z < -_ANTIPODAL_TOL):
            raise ExpOutOfDomain(
                f"exponential image leaves the positive orthant; min coordinate {z.min()!r}"
            )
        return self.point(self.project_to_orthant(z))

    def parallel_transport(
        self, base: MetricObject, target: MetricObject, v: np.ndarray
    ) -> np.ndarray:
        """Parallel-transport tangent vector ``v`` from ``base`` to ``target``
        along the connecting geodesic."""
        self._check_pair(base, target)
        dot = _clip_dot(base.data, target.data)
        self._check_not_antipodal(dot)
        theta = np.arccos(dot)
        if theta < 1e-14:
            return np.asarray(v, dtype=float).copy()
        u = target.data - dot * base.data
        u = u / np.linalg.norm(u)
        v = np.asarray(v, dtype=float)
        along = float(np.dot(v, u))
        perp = v - along * u
        return perp + along * (np.cos(theta) * u - np.sin(theta) * base.data)

    # -- transport map -------------------------------------------------------------

    def transport(self, a, b, w) -> MetricObject:
        self._check_pair(a, b)
        self._check_member(w, "transported point")
        v = self.log_map(a, b)
        if float(np.linalg.norm(v)) < 1e-14:
            return self.point(w.data.copy())
        moved = self.parallel_transport(a, w, v)
        base = w.data
        v_t = moved - float(np.dot(moved, base)) * base
        norm = float(np.linalg.norm(v_t))
        if norm < 1e-14:
            return self.point(base.copy())
        z = np.cos(norm) * base + np.sin(norm) * v_t / norm
        if np.any(z < -_ANTIPODAL_TOL):
            raise TransportOutOfSpace(
                "transported point leaves the positive orthant; "
                f"min coordinate {z.min()!r}"
            )
        return self.point(self.project_to_orthant(z))

    def project_to_orthant(self, z: np.ndarray) -> np.ndarray:
        """Clamp negative coordinates to zero and renormalize to the sphere."""
        out = np.clip(np.asarray(z, dtype=float), 0.0, None)
        norm = float(np.linalg.norm(out))
        if norm < 1e-14:
            raise InvariantViolation("cannot project the zero vector to the sphere")
        return out / norm
