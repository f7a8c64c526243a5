"""Fuzzy-design estimators for imperfect compliance at the cutoff.

Four estimands are covered:

- ``EMBEDDING``: compliers' average effect as a Hilbert-space contrast, the
  jump of the embedded LFR limits divided by the compliance jump.
- ``GEODESIC_ONE_SIDED``: compliers' effect as a geodesic inside the space,
  identified under one-sided noncompliance via the always-taker (or
  never-taker) stratum mean.
- ``RIEMANNIAN_TANGENT``: same ratio contrast computed in the tangent space
  at a fixed reference point, for manifolds with Log/Exp charts (covers the
  compositional sphere, which has no isometric embedding).
- ``GEODESIC_RIEMANNIAN``: geodesic version of the tangent-space estimand
  under one-sided noncompliance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateWindow,
    EmptyStratum,
    ExpOutOfDomain,
    InverseInfeasible,
    LogExpUnavailable,
    MissingAssignment,
    MissingTreatment,
    WeakCompliance,
)
from .frechet import (
    FrechetSolveConfig,
    KernelKind,
    KernelSpec,
    Side,
    compute_weights,
    kernel_eval,
    weighted_frechet_mean,
)
from .rdd_sharp import lfr_at_cutoff, sample_frechet_mean
from .sample import RddSample
from .spaces import GeodesicEffect, HilbertSpace, MetricObject

__all__ = [
    "DELTA_COMPLY",
    "FuzzyVariant",
    "NoncomplianceSide",
    "ComplianceFit",
    "FuzzyEstimate",
    "estimate_compliance",
    "estimate_fuzzy_late",
    "estimate_geodesic_fuzzy",
    "estimate_riemannian_fuzzy",
    "estimate_geodesic_riemannian_fuzzy",
]

#: estimates are refused when |m1 - m0| does not exceed this share
DELTA_COMPLY = 0.05

#: a denominator within this tolerance of one is treated as full compliance,
#: where the stratum term cancels algebraically
_FULL_COMPLIANCE_TOL = 1e-8


class FuzzyVariant(enum.Enum):
    EMBEDDING = "embedding"
    GEODESIC_ONE_SIDED = "geodesic_one_sided"
    RIEMANNIAN_TANGENT = "riemannian_tangent"
    GEODESIC_RIEMANNIAN = "geodesic_riemannian"


class NoncomplianceSide(enum.Enum):
    """Which noncomplier stratum exists under one-sided noncompliance."""

    ALWAYS_TAKERS = "always_takers"
    NEVER_TAKERS = "never_takers"


@dataclass(frozen=True)
class ComplianceFit:
    """Local linear fits of the treatment indicator on each side of the cutoff."""

    m0: float
    m1: float
    slope0: float
    slope1: float
    h0: float
    h1: float

    @property
    def denominator(self) -> float:
        """Compliance jump with intercepts clamped into [0, 1]."""
        return float(np.clip(self.m1, 0.0, 1.0) - np.clip(self.m0, 0.0, 1.0))

    def to_json(self) -> dict:
        return {
            "m0": self.m0,
            "m1": self.m1,
            "slope0": self.slope0,
            "slope1": self.slope1,
            "bandwidths": {"h0": self.h0, "h1": self.h1},
            "denominator": self.denominator,
        }


@dataclass(frozen=True)
class FuzzyEstimate:
    """Result of a fuzzy RDD fit.

    ``tau`` is the effect contrast in embedding (or tangent) coordinates and
    ``magnitude`` its Hilbert (or Euclidean tangent) norm.  Geodesic variants
    also carry the complier endpoints and the effect geodesic.  ``warnings``
    lists feasibility projections applied along the way.
    """

    variant: FuzzyVariant
    tau: np.ndarray
    magnitude: float
    m0: float
    m1: float
    denominator: float
    compliance: ComplianceFit
    endpoints: tuple[MetricObject, MetricObject] | None = None
    effect: GeodesicEffect | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        self.tau.setflags(write=False)
        if not (0.0 <= self.m0 <= 1.0 and 0.0 <= self.m1 <= 1.0):
            raise ValueError("clamped compliance intercepts must lie in [0, 1]")
        if abs(self.denominator) <= DELTA_COMPLY:
            raise WeakCompliance(
                f"compliance jump {self.denominator!r} is within the refusal "
                f"threshold {DELTA_COMPLY}"
            )

    def to_json(self) -> dict:
        out = {
            "variant": self.variant.value,
            "tau": self.tau.tolist(),
            "magnitude": self.magnitude,
            "m0": self.m0,
            "m1": self.m1,
            "denominator": self.denominator,
            "compliance": self.compliance.to_json(),
            "warnings": list(self.warnings),
        }
        if self.endpoints is not None:
            out["endpoints"] = [p.to_json() for p in self.endpoints]
        if self.effect is not None:
            out["effect"] = self.effect.to_json()
        return out


def _require_t(sample: RddSample):
    if sample.t is None:
        raise MissingTreatment("fuzzy estimation needs a treatment column")


def _require_z(sample: RddSample):
    if sample.z is None:
        raise MissingAssignment(
            "geodesic fuzzy estimation needs the assignment column Z = 1{R >= c}"
        )


def _scalar_local_linear(
    r: np.ndarray,
    values: np.ndarray,
    center: float,
    h: float,
    spec: KernelSpec,
) -> tuple[float, float]:
    """Closed-form weighted least squares line fit; returns (intercept, slope)."""
    compute_weights(r, center, h, spec)  # raises DegenerateWindow when unfit
    d = r - center
    base = kernel_eval(spec, d / h) / h
    s0 = base.sum()
    s1 = (base * d).sum()
    s2 = (base * d * d).sum()
    x0 = (base * values).sum()
    x1 = (base * d * values).sum()
    det = s0 * s2 - s1 * s1
    return float((s2 * x0 - s1 * x1) / det), float((s0 * x1 - s1 * x0) / det)


def estimate_compliance(
    sample: RddSample,
    h0: float,
    h1: float,
    *,
    kernel: KernelKind = KernelKind.TRIANGULAR,
) -> ComplianceFit:
    """Local linear intercepts of T on R at the cutoff, one per side."""
    _require_t(sample)
    t = sample.t.astype(float)
    m0, b0 = _scalar_local_linear(
        sample.r, t, sample.cutoff, h0, KernelSpec(kernel, Side.LEFT)
    )
    m1, b1 = _scalar_local_linear(
        sample.r, t, sample.cutoff, h1, KernelSpec(kernel, Side.RIGHT)
    )
    return ComplianceFit(m0=m0, m1=m1, slope0=b0, slope1=b1, h0=float(h0), h1=float(h1))


def _checked_denominator(fit: ComplianceFit) -> tuple[float, float, float]:
    m0 = float(np.clip(fit.m0, 0.0, 1.0))
    m1 = float(np.clip(fit.m1, 0.0, 1.0))
    den = m1 - m0
    if abs(den) <= DELTA_COMPLY:
        raise WeakCompliance(
            f"compliance jump {den!r} is within the refusal threshold {DELTA_COMPLY}"
        )
    return m0, m1, den


def estimate_fuzzy_late(
    sample: RddSample,
    h0: float,
    h1: float,
    cfg: FrechetSolveConfig | None = None,
    *,
    kernel: KernelKind = KernelKind.TRIANGULAR,
) -> FuzzyEstimate:
    """Compliers' average effect via the Hilbert embedding.

    The estimate is the difference of the embedded one-sided LFR limits
    scaled by the reciprocal of the compliance jump.  For distributional
    outcomes the contrast is a quantile-function difference (a local average
    quantile treatment effect).
    """
    _require_t(sample)
    space = sample.space
    if not isinstance(space, HilbertSpace):
        from .errors import EmbeddingUnavailable

        raise EmbeddingUnavailable(
            f"{type(space).__name__} has no isometric embedding; use the "
            "tangent-space variant instead"
        )
    fit = estimate_compliance(sample, h0, h1, kernel=kernel)
    m0, m1, den = _checked_denominator(fit)
    nu0, _ = lfr_at_cutoff(sample, Side.LEFT, h0, cfg, kernel)
    nu1, _ = lfr_at_cutoff(sample, Side.RIGHT, h1, cfg, kernel)
    tau = (space.embed(nu1) - space.embed(nu0)) / den
    return FuzzyEstimate(
        variant=FuzzyVariant.EMBEDDING,
        tau=tau,
        magnitude=space.hilbert_norm(tau),
        m0=m0,
        m1=m1,
        denominator=den,
        compliance=fit,
    )


def _stratum_mask(sample: RddSample, side: NoncomplianceSide) -> np.ndarray:
    if side is NoncomplianceSide.ALWAYS_TAKERS:
        return (sample.t == 1) & (sample.z == 0)
    return (sample.t == 0) & (sample.z == 1)


def _stratum_kernel_side(side: NoncomplianceSide) -> Side:
    # always-takers are observed left of the cutoff, never-takers right of it
    return Side.LEFT if side is NoncomplianceSide.ALWAYS_TAKERS else Side.RIGHT


def estimate_geodesic_fuzzy(
    sample: RddSample,
    h0: float,
    h1: float,
    noncompliance_side: NoncomplianceSide,
    cfg: FrechetSolveConfig | None = None,
    *,
    kernel: KernelKind = KernelKind.TRIANGULAR,
) -> FuzzyEstimate:
    """Compliers' effect as a geodesic, under one-sided noncompliance.

    The noncomplier stratum mean at the cutoff is estimated by an LFR fit on
    the stratum subsample (always-takers with the left kernel and h0,
    never-takers with the right kernel and h1); the complier endpoints follow
    by shifting it in the embedding by the amplified jump.  When the fitted
    compliance jump is one, the stratum term cancels and the endpoints reduce
    to the sharp LFR limits.
    """
    _require_t(sample)
    _require_z(sample)
    space = sample.space
    if not isinstance(space, HilbertSpace):
        from .errors import EmbeddingUnavailable

        raise EmbeddingUnavailable(
            f"{type(space).__name__} has no isometric embedding; use the "
            "geodesic tangent-space variant instead"
        )
    fit = estimate_compliance(sample, h0, h1, kernel=kernel)
    m0, m1, den = _checked_denominator(fit)

    nu0, _ = lfr_at_cutoff(sample, Side.LEFT, h0, cfg, kernel)
    nu1, _ = lfr_at_cutoff(sample, Side.RIGHT, h1, cfg, kernel)
    psi0, psi1 = space.embed(nu0), space.embed(nu1)
    warnings: list[str] = []

    mask = _stratum_mask(sample, noncompliance_side)
    if not mask.any():
        if abs(den - 1.0) > _FULL_COMPLIANCE_TOL:
            raise EmptyStratum(
                f"the {noncompliance_side.value} stratum is empty but the fitted "
                f"compliance jump is {den!r}, not one"
            )
        mu0, mu1 = nu0, nu1
    else:
        side = _stratum_kernel_side(noncompliance_side)
        h = h0 if side is Side.LEFT else h1
        stratum = sample.subset(mask)
        try:
            profile = compute_weights(
                stratum.r, sample.cutoff, h, KernelSpec(kernel, side)
            )
        except DegenerateWindow as err:
            raise EmptyStratum(
                f"the {noncompliance_side.value} stratum is degenerate near the "
                f"cutoff: {err}"
            ) from None
        mu_plus = weighted_frechet_mean(stratum.ys, profile.weights, cfg)
        psi_plus = space.embed(mu_plus)

        endpoints = []
        for psi_z in (psi0, psi1):
            q = psi_plus + (psi_z - psi_plus) / den
            proj = space.project_embedding(q)
            try:
                endpoints.append(space.inverse_embed(q))
            except InverseInfeasible:
                warnings.append("projection_applied")
                endpoints.append(space.inverse_embed(proj))
        mu0, mu1 = endpoints

    omega = sample_frechet_mean(sample, cfg)
    effect = GeodesicEffect.between(mu0, mu1, omega)
    tau = (psi1 - psi0) / den
    return FuzzyEstimate(
        variant=FuzzyVariant.GEODESIC_ONE_SIDED,
        tau=tau,
        magnitude=effect.length,
        m0=m0,
        m1=m1,
        denominator=den,
        compliance=fit,
        endpoints=(mu0, mu1),
        effect=effect,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# tangent-space variants for Riemannian manifolds (Log/Exp charts)
# ---------------------------------------------------------------------------


def _log_coordinates(sample: RddSample, omega: MetricObject) -> np.ndarray:
    space = sample.space
    return np.stack([space.log_map(omega, y) for y in sample.ys])


def _tangent_lfr(
    r: np.ndarray,
    tangent: np.ndarray,
    center: float,
    h: float,
    spec: KernelSpec,
) -> np.ndarray:
    """Euclidean LFR fit (weighted average) in tangent coordinates."""
    profile = compute_weights(r, center, h, spec)
    w = profile.weights
    return (w @ tangent) / w.sum()


def _resolve_reference(
    sample: RddSample,
    reference: MetricObject | None,
    cfg: FrechetSolveConfig | None,
    warnings: list[str],
):
    if reference is not None:
        sample.space._check_member(reference, "reference point")
        return reference
    # Data-dependent reference: convenient default, but the tangent-space
    # rate guarantees assume a fixed reference.
    warnings.append("data_dependent_reference")
    return sample_frechet_mean(sample, cfg)


def estimate_riemannian_fuzzy(
    sample: RddSample,
    reference: MetricObject | None,
    h0: float,
    h1: float,
    cfg: FrechetSolveConfig | None = None,
    *,
    kernel: KernelKind = KernelKind.TRIANGULAR,
) -> FuzzyEstimate:
    """Compliers' average effect in the tangent space at ``reference``.

    Outcomes are mapped through the Log chart at the reference point, fitted
    by ordinary (Euclidean) LFR on each side, and the tangent jump is scaled
    by the reciprocal compliance jump.  In Euclidean space this coincides
    exactly with the embedding estimator.
    """
    _require_t(sample)
    space = sample.space
    if not space.logexp_available:
        raise LogExpUnavailable(
            f"{type(space).__name__} has no Log/Exp charts; use the embedding "
            "variant instead"
        )
    warnings: list[str] = []
    omega = _resolve_reference(sample, reference, cfg, warnings)
    fit = estimate_compliance(sample, h0, h1, kernel=kernel)
    m0, m1, den = _checked_denominator(fit)

    tangent = _log_coordinates(sample, omega)
    nu0 = _tangent_lfr(
        sample.r, tangent, sample.cutoff, h0, KernelSpec(kernel, Side.LEFT)
    )
    nu1 = _tangent_lfr(
        sample.r, tangent, sample.cutoff, h1, KernelSpec(kernel, Side.RIGHT)
    )
    tau = (nu1 - nu0) / den
    return FuzzyEstimate(
        variant=FuzzyVariant.RIEMANNIAN_TANGENT,
        tau=tau,
        magnitude=float(np.linalg.norm(tau)),
        m0=m0,
        m1=m1,
        denominator=den,
        compliance=fit,
        warnings=tuple(warnings),
    )


def estimate_geodesic_riemannian_fuzzy(
    sample: RddSample,
    reference: MetricObject | None,
    noncompliance_side: NoncomplianceSide,
    h0: float,
    h1: float,
    cfg: FrechetSolveConfig | None = None,
    *,
    kernel: KernelKind = KernelKind.TRIANGULAR,
) -> FuzzyEstimate:
    """Compliers' effect as a geodesic between Exp-mapped tangent endpoints.

    The stratum tangent mean is fitted on the noncomplier subsample, the
    complier tangent endpoints follow by the amplified shift, and both are
    mapped back through the Exp chart.  Arguments that leave the chart's
    domain (tangent norm at the cut locus, or image outside the feasible
    region) are projected back with an ``exp_out_of_domain`` warning.
    """
    _require_t(sample)
    _require_z(sample)
    space = sample.space
    if not space.logexp_available:
        raise LogExpUnavailable(
            f"{type(space).__name__} has no Log/Exp charts; use the geodesic "
            "embedding variant instead"
        )
    warnings: list[str] = []
    omega = _resolve_reference(sample, reference, cfg, warnings)
    fit = estimate_compliance(sample, h0, h1, kernel=kernel)
    m0, m1, den = _checked_denominator(fit)

    tangent = _log_coordinates(sample, omega)
    nu0 = _tangent_lfr(
        sample.r, tangent, sample.cutoff, h0, KernelSpec(kernel, Side.LEFT)
    )
    nu1 = _tangent_lfr(
        sample.r, tangent, sample.cutoff, h1, KernelSpec(kernel, Side.RIGHT)
    )

    mask = _stratum_mask(sample, noncompliance_side)
    if not mask.any():
        if abs(den - 1.0) > _FULL_COMPLIANCE_TOL:
            raise EmptyStratum(
                f"the {noncompliance_side.value} stratum is empty but the fitted "
                f"compliance jump is {den!r}, not one"
            )
        args = [nu0, nu1]
    else:
        side = _stratum_kernel_side(noncompliance_side)
        h = h0 if side is Side.LEFT else h1
        idx = np.flatnonzero(mask)
        try:
            nu_plus = _tangent_lfr(
                sample.r[idx],
                tangent[idx],
                sample.cutoff,
                h,
                KernelSpec(kernel, side),
            )
        except DegenerateWindow as err:
            raise EmptyStratum(
                f"the {noncompliance_side.value} stratum is degenerate near the "
                f"cutoff: {err}"
            ) from None
        args = [nu_plus + (nu_z - nu_plus) / den for nu_z in (nu0, nu1)]

    endpoints = []
    for v in args:
        try:
            endpoints.append(space.exp_map(omega, v))
        except ExpOutOfDomain:
            warnings.append("exp_out_of_domain")
            endpoints.append(_projected_exp(space, omega, v))
    mu0, mu1 = endpoints
    effect = GeodesicEffect.between(mu0, mu1, omega)
    tau = (nu1 - nu0) / den
    return FuzzyEstimate(
        variant=FuzzyVariant.GEODESIC_RIEMANNIAN,
        tau=tau,
        magnitude=effect.length,
        m0=m0,
        m1=m1,
        denominator=den,
        compliance=fit,
        endpoints=(mu0, mu1),
        effect=effect,
        warnings=tuple(warnings),
    )


def _projected_exp(space, omega: MetricObject, v: np.ndarray) -> MetricObject:
    """Total fallback for Exp arguments outside the chart domain."""
    from .spaces import CompositionalSphere

    if isinstance(space, CompositionalSphere):
        v = np.asarray(v, dtype=float)
        v = v - float(np.dot(v, omega.data)) * omega.data
        norm = float(np.linalg.norm(v))
        if norm >= np.pi:
            v = v * ((np.pi - 1e-9) / norm)
            norm = np.pi - 1e-9
        z = np.cos(norm) * omega.data + np.sin(norm) * v / norm
        return space.point(space.project_to_orthant(z))
    return space.exp_map(omega, v)
