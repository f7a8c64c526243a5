"""Core metric-space abstractions.

A :class:`Space` bundles a metric, its geodesics, a geodesic transport map,
and (where available) an isometric Hilbert embedding and Log/Exp charts.
Points are immutable :class:`MetricObject` values; an estimated treatment
effect is a :class:`GeodesicEffect`, an ordered pair of endpoints compared
through the quotient metric :func:`quotient_distance`.

All operations are pure functions of immutable values and are safe to call
concurrently.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import (
    EmbeddingUnavailable,
    LogExpUnavailable,
    NonFinitePayload,
    ShapeMismatch,
    SpaceMismatch,
)

__all__ = [
    "Space",
    "HilbertSpace",
    "MetricObject",
    "SpaceDescriptor",
    "GeodesicEffect",
    "quotient_distance",
]


def _as_float_array(data, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape != shape:
        raise ShapeMismatch(f"expected payload of shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinitePayload("payload contains NaN or infinite entries")
    return arr


@dataclass(frozen=True)
class SpaceDescriptor:
    """Static metadata describing a space: tag, variant, shape, capabilities.

    ``beta1`` and ``beta2`` are the curvature exponents governing the bias and
    stochastic convergence rates; all shipped spaces use the quadratic value 2.
    """

    tag: str
    variant: str | None
    shape: tuple[int, ...]
    beta1: float = 2.0
    beta2: float = 2.0
    embedding_available: bool = False
    logexp_available: bool = False

    def __post_init__(self):
        if not (self.beta1 > 1.0 and self.beta2 > 1.0):
            raise ValueError("curvature exponents must exceed 1")


@dataclass(frozen=True, eq=False)
class MetricObject:
    """A point in a geodesic metric space.

    Instances are produced by ``space.point(data)`` which validates the
    payload against the space invariants and freezes it.
    """

    space: "Space"
    data: np.ndarray

    def __post_init__(self):
        self.data.setflags(write=False)

    @property
    def payload(self) -> np.ndarray:
        """Flat copy of the payload (row-major for matrix spaces)."""
        return self.data.ravel().copy()

    def to_json(self) -> dict:
        return {
            "space": self.space.tag,
            "variant": self.space.variant,
            "shape": list(self.data.shape),
            "data": self.data.ravel().tolist(),
        }

    def __repr__(self):
        return f"MetricObject({self.space!r}, shape={self.data.shape})"


class Space(ABC):
    """A uniquely geodesic metric space.

    Subclasses implement the metric, geodesics and transport maps; spaces
    with an isometric Hilbert embedding derive from :class:`HilbertSpace`
    instead and only supply the embedding and its feasibility projection.
    """

    tag: str = "abstract"

    # -- identity ------------------------------------------------------------

    @property
    def variant(self) -> str | None:
        return None

    @property
    @abstractmethod
    def shape(self) -> tuple[int, ...]:
        """Shape of a single payload array."""

    @property
    def embedding_available(self) -> bool:
        return False

    @property
    def logexp_available(self) -> bool:
        return False

    def descriptor(self) -> SpaceDescriptor:
        return SpaceDescriptor(
            tag=self.tag,
            variant=self.variant,
            shape=self.shape,
            embedding_available=self.embedding_available,
            logexp_available=self.logexp_available,
        )

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self) -> tuple:
        return (self.shape,)

    def __repr__(self):
        var = f", variant={self.variant}" if self.variant else ""
        return f"{type(self).__name__}(shape={self.shape}{var})"

    # -- points ----------------------------------------------------------------

    def point(self, data) -> MetricObject:
        """Validate ``data`` against the space invariants and wrap it."""
        arr = _as_float_array(data, self.shape)
        arr = self._validate(arr)
        return MetricObject(self, arr)

    @abstractmethod
    def _validate(self, arr: np.ndarray) -> np.ndarray:
        """Check invariants, returning a canonicalized copy."""

    def _check_member(self, a: MetricObject, name: str = "argument"):
        if not isinstance(a, MetricObject):
            raise TypeError(f"{name} must be a MetricObject, got {type(a).__name__}")
        if a.space != self:
            raise SpaceMismatch(f"{name} belongs to {a.space!r}, expected {self!r}")

    def _check_pair(self, a: MetricObject, b: MetricObject):
        self._check_member(a, "first argument")
        self._check_member(b, "second argument")

    # -- metric structure --------------------------------------------------------

    @abstractmethod
    def distance(self, a: MetricObject, b: MetricObject) -> float:
        """Geodesic distance between two points."""

    @abstractmethod
    def geodesic(self, a: MetricObject, b: MetricObject, t: float) -> MetricObject:
        """Constant-speed geodesic from ``a`` (t=0) to ``b`` (t=1)."""

    @abstractmethod
    def transport(self, a: MetricObject, b: MetricObject, w: MetricObject) -> MetricObject:
        """Geodesic transport map sending ``a`` to ``b``, applied to ``w``."""

    # -- Hilbert embedding (optional) ----------------------------------------------

    def embed(self, a: MetricObject) -> np.ndarray:
        raise EmbeddingUnavailable(f"{type(self).__name__} has no isometric embedding")

    def embed_many(self, objs: Sequence[MetricObject]) -> np.ndarray:
        raise EmbeddingUnavailable(f"{type(self).__name__} has no isometric embedding")

    def inverse_embed(self, v: np.ndarray, *, project: bool = False) -> MetricObject:
        raise EmbeddingUnavailable(f"{type(self).__name__} has no isometric embedding")

    def project_embedding(self, v: np.ndarray) -> np.ndarray:
        raise EmbeddingUnavailable(f"{type(self).__name__} has no isometric embedding")

    def hilbert_inner(self, u: np.ndarray, v: np.ndarray) -> float:
        raise EmbeddingUnavailable(f"{type(self).__name__} has no isometric embedding")

    def hilbert_norm(self, u: np.ndarray) -> float:
        return float(np.sqrt(max(self.hilbert_inner(u, u), 0.0)))

    def hilbert_distance(self, u: np.ndarray, v: np.ndarray) -> float:
        return self.hilbert_norm(np.asarray(u, dtype=float) - np.asarray(v, dtype=float))

    # -- Log/Exp charts (optional) ----------------------------------------------------

    def log_map(self, base: MetricObject, a: MetricObject) -> np.ndarray:
        raise LogExpUnavailable(f"{type(self).__name__} has no Log/Exp charts")

    def exp_map(self, base: MetricObject, v: np.ndarray) -> MetricObject:
        raise LogExpUnavailable(f"{type(self).__name__} has no Log/Exp charts")


class HilbertSpace(Space):
    """Space isometric to a convex subset of a Hilbert space.

    The metric, geodesics and transport maps are all inherited from the flat
    geometry of the embedding: geodesics are segments, and transport adds the
    displacement of the embedded endpoints followed by the feasibility
    projection back onto the image set.
    """

    @property
    def embedding_available(self) -> bool:
        return True

    @property
    def embedding_dim(self) -> int:
        return int(np.prod(self.shape))

    # Inner-product weights on embedding coordinates; None means the plain
    # dot product (Frobenius for matrix payloads).
    _hilbert_weights: np.ndarray | None = None

    def hilbert_inner(self, u, v) -> float:
        u = np.asarray(u, dtype=float).ravel()
        v = np.asarray(v, dtype=float).ravel()
        if u.shape != v.shape or u.size != self.embedding_dim:
            raise ShapeMismatch(
                f"embedding vectors must have {self.embedding_dim} coordinates"
            )
        if self._hilbert_weights is None:
            return float(u @ v)
        return float((u * self._hilbert_weights) @ v)

    @abstractmethod
    def _embed(self, arr: np.ndarray) -> np.ndarray:
        """Map one payload array to a flat embedding vector."""

    @abstractmethod
    def _inverse(self, v: np.ndarray) -> np.ndarray:
        """Map a feasible flat embedding vector back to a payload array.

        Must raise :class:`InverseInfeasible` when ``v`` is outside the image
        set by more than numerical noise.
        """

    @abstractmethod
    def project_embedding(self, v: np.ndarray) -> np.ndarray:
        """Metric projection of ``v`` onto the image set (flat vector in/out)."""

    def embed(self, a: MetricObject) -> np.ndarray:
        self._check_member(a)
        return self._embed(a.data)

    def embed_many(self, objs: Sequence[MetricObject]) -> np.ndarray:
        if len(objs) == 0:
            return np.empty((0, self.embedding_dim))
        for o in objs:
            self._check_member(o)
        return np.stack([self._embed(o.data) for o in objs])

    def inverse_embed(self, v, *, project: bool = False) -> MetricObject:
        v = np.asarray(v, dtype=float).ravel()
        if v.size != self.embedding_dim:
            raise ShapeMismatch(
                f"embedding vector must have {self.embedding_dim} coordinates"
            )
        if not np.all(np.isfinite(v)):
            raise NonFinitePayload("embedding vector contains NaN or infinite entries")
        if project:
            v = self.project_embedding(v)
        return self.point(self._inverse(v))

    def distance(self, a, b) -> float:
        self._check_pair(a, b)
        return self.hilbert_distance(self._embed(a.data), self._embed(b.data))

    def geodesic(self, a, b, t: float) -> MetricObject:
        self._check_pair(a, b)
        t = float(t)
        v = (1.0 - t) * self._embed(a.data) + t * self._embed(b.data)
        return self.point(self._inverse(v))

    def transport(self, a, b, w) -> MetricObject:
        self._check_pair(a, b)
        self._check_member(w, "transported point")
        v = self._embed(w.data) + self._embed(b.data) - self._embed(a.data)
        return self.point(self._inverse(self.project_embedding(v)))


@dataclass(frozen=True, eq=False)
class GeodesicEffect:
    """A treatment effect: the geodesic from ``start`` to ``end``.

    ``length`` is the metric distance between the endpoints (the effect
    magnitude); ``reference`` is the anchor point used by the quotient
    metric when comparing effects.
    """

    start: MetricObject
    end: MetricObject
    length: float
    reference: MetricObject

    def __post_init__(self):
        space = self.start.space
        space._check_member(self.end, "end point")
        space._check_member(self.reference, "reference point")
        actual = space.distance(self.start, self.end)
        if abs(actual - self.length) > 1e-10 * (1.0 + abs(actual)):
            raise ValueError(
                f"declared length {self.length!r} does not match endpoint "
                f"distance {actual!r}"
            )

    @classmethod
    def between(
        cls, start: MetricObject, end: MetricObject, reference: MetricObject
    ) -> "GeodesicEffect":
        length = start.space.distance(start, end)
        return cls(start=start, end=end, length=length, reference=reference)

    @property
    def space(self) -> Space:
        return self.start.space

    def evaluate(self, t: float) -> MetricObject:
        return self.space.geodesic(self.start, self.end, t)

    def to_json(self) -> dict:
        return {
            "start": self.start.to_json(),
            "end": self.end.to_json(),
            "length": self.length,
            "reference": self.reference.to_json(),
        }


def quotient_distance(
    e1: GeodesicEffect, e2: GeodesicEffect, reference: MetricObject | None = None
) -> float:
    """Distance between two effects in the quotient space of geodesics.

    Two geodesics are equivalent when they induce the same transport map; the
    quotient metric moves a shared reference point with each effect's
    transport and measures the distance between the images.  In flat spaces
    this reduces to the norm of the difference of the two displacements and
    does not depend on the reference point.
    """
    space = e1.space
    if e2.space != space:
        raise SpaceMismatch("effects live in different spaces")
    omega = reference if reference is not None else e1.reference
    space._check_member(omega, "reference point")
    z1 = space.transport(e1.start, e1.end, omega)
    z2 = space.transport(e2.start, e2.end, omega)
    return space.distance(z1, z2)
