"""Unit tests for the metric spaces: worked examples and error paths."""

import numpy as np
import pytest
from scipy.linalg import logm

from geordd import (
    CompositionalSphere,
    Euclidean,
    FunctionalL2,
    GeodesicEffect,
    NetworkLaplacian,
    SpdSpace,
    Wasserstein1D,
    quotient_distance,
)
from geordd.errors import (
    AntipodalPoints,
    EmbeddingUnavailable,
    InvariantViolation,
    InverseInfeasible,
    LogExpUnavailable,
    NonFinitePayload,
    ShapeMismatch,
    SpaceMismatch,
)
from geordd.io import object_from_json


class TestDistance:
    def test_sphere_identity(self):
        sp = CompositionalSphere(3)
        z = sp.point([1.0, 0.0, 0.0])
        assert sp.distance(z, z) == 0.0

    def test_sphere_orthogonal(self):
        sp = CompositionalSphere(3)
        z1 = sp.point([1.0, 0.0, 0.0])
        z2 = sp.point([0.0, 1.0, 0.0])
        assert sp.distance(z1, z2) == pytest.approx(np.pi / 2, abs=1e-12)

    def test_spd_log_euclidean_oracle(self):
        # direct matrix-logarithm oracle for d(I, e*I) on 2x2 matrices
        spd = SpdSpace(2, "log_euclidean")
        a, b = np.eye(2), np.e * np.eye(2)
        expected = np.linalg.norm(logm(a) - logm(b), "fro")
        assert expected == pytest.approx(np.sqrt(2), abs=1e-12)
        d = spd.distance(spd.point(a), spd.point(b))
        assert d == pytest.approx(expected, abs=1e-10)

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            Euclidean(2).distance(Euclidean(2).point([0, 0]), Euclidean(3).point([0, 0, 0]))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            Euclidean(2).point([1.0, 2.0, 3.0])

    def test_non_finite(self):
        with pytest.raises(NonFinitePayload):
            Euclidean(2).point([np.nan, 0.0])


class TestGeodesic:
    def test_endpoints(self, space_case):
        name, space, sampler = space_case
        rng = np.random.default_rng(0)
        a, b = sampler(space, rng), sampler(space, rng)
        assert space.distance(space.geodesic(a, b, 0.0), a) < 1e-8
        assert space.distance(space.geodesic(a, b, 1.0), b) < 1e-8

    def test_euclidean_midpoint(self):
        eu = Euclidean(1)
        mid = eu.geodesic(eu.point([0.0]), eu.point([2.0]), 0.5)
        assert mid.data[0] == pytest.approx(1.0, abs=1e-15)

    def test_mccann_interpolant(self):
        # the interpolant pushes mu_a forward through x + t(T(x) - x) with
        # T = Q_b o F_a; in quantile coordinates that is Q_a + t (Q_b - Q_a)
        w = Wasserstein1D(2)
        qa, qb = w.point([0.0, 1.0]), w.point([2.0, 3.0])
        mid = w.geodesic(qa, qb, 0.5)
        np.testing.assert_allclose(mid.data, [1.0, 2.0], atol=1e-12)
        # pushforward oracle on a finer grid
        w2 = Wasserstein1D(51)
        grid = np.linspace(0, 1, 51)
        q_a = grid * 2.0 - 1.0
        q_b = np.sqrt(grid) * 3.0
        t = 0.37
        oracle = q_a + t * (q_b - q_a)  # T(Q_a(u)) with T linear in quantiles
        fit = w2.geodesic(w2.point(q_a), w2.point(q_b), t)
        np.testing.assert_allclose(fit.data, oracle, atol=1e-10)

    def test_sphere_antipodal_rejected(self):
        # antipodal pairs cannot both sit in the positive orthant, so smuggle
        # one past validation to exercise the rejection
        sp = CompositionalSphere(3)
        z1 = sp.point([1.0, 0.0, 0.0])
        z2 = _antipode(sp, z1)
        with pytest.raises(AntipodalPoints):
            sp.geodesic(z1, z2, 0.5)
        with pytest.raises(AntipodalPoints):
            sp.log_map(z1, z2)


def _antipode(space, z):
    from geordd import MetricObject

    return MetricObject(space, -z.data.copy())


class TestTransport:
    def test_defining_property_random(self, space_case):
        name, space, sampler = space_case
        rng = np.random.default_rng(1)
        for _ in range(10):
            a, b, w = (sampler(space, rng) for _ in range(3))
            assert space.distance(space.transport(a, b, a), b) < 1e-8

    def test_flat_formula(self):
        eu = Euclidean(1)
        out = eu.transport(eu.point([1.0]), eu.point([3.0]), eu.point([0.0]))
        assert out.data[0] == pytest.approx(2.0, abs=1e-15)

    def test_sphere_zero_geodesic(self):
        sp = CompositionalSphere(3)
        rng = np.random.default_rng(2)
        a = sp.point(np.array([0.6, 0.64, np.sqrt(1 - 0.6**2 - 0.64**2)]))
        w = sp.point(np.array([0.2, 0.5, np.sqrt(1 - 0.04 - 0.25)]))
        assert sp.distance(sp.transport(a, a, w), w) < 1e-12


class TestQuotientDistance:
    def _effect(self, space, a, b, omega):
        return GeodesicEffect.between(a, b, omega)

    def test_identical_effects(self, space_case):
        name, space, sampler = space_case
        rng = np.random.default_rng(3)
        a, b, omega = (sampler(space, rng) for _ in range(3))
        e = self._effect(space, a, b, omega)
        assert quotient_distance(e, e) < 1e-12

    def test_equal_displacement(self):
        eu = Euclidean(1)
        omega = eu.point([7.0])
        e1 = GeodesicEffect.between(eu.point([0.0]), eu.point([1.0]), omega)
        e2 = GeodesicEffect.between(eu.point([5.0]), eu.point([6.0]), omega)
        assert quotient_distance(e1, e2) == pytest.approx(0.0, abs=1e-12)

    def test_displacement_difference(self):
        eu = Euclidean(1)
        omega = eu.point([-2.0])
        e1 = GeodesicEffect.between(eu.point([0.0]), eu.point([1.0]), omega)
        e2 = GeodesicEffect.between(eu.point([0.0]), eu.point([3.0]), omega)
        assert quotient_distance(e1, e2) == pytest.approx(2.0, abs=1e-12)

    def test_network_shift_equivalence(self):
        from geordd.spaces.network import laplacian_from_weights

        space = NetworkLaplacian(4)
        rng = np.random.default_rng(4)
        w1 = np.triu(rng.uniform(0.2, 1.0, (4, 4)), 1)
        w2 = np.triu(rng.uniform(0.2, 1.0, (4, 4)), 1)
        shift = np.triu(rng.uniform(0.0, 0.3, (4, 4)), 1)
        l1 = space.point(laplacian_from_weights(w1 + w1.T))
        l2 = space.point(laplacian_from_weights(w2 + w2.T))
        l1s = space.point(laplacian_from_weights((w1 + shift) + (w1 + shift).T))
        l2s = space.point(laplacian_from_weights((w2 + shift) + (w2 + shift).T))
        omega = space.point(laplacian_from_weights(shift + shift.T))
        e1 = GeodesicEffect.between(l1, l2, omega)
        e2 = GeodesicEffect.between(l1s, l2s, omega)
        assert quotient_distance(e1, e2) < 1e-10


class TestEmbedding:
    def test_euclidean_identity(self):
        eu = Euclidean(3)
        p = eu.point([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(eu.embed(p), [1.0, 2.0, 3.0])

    def test_spd_log_euclidean_diagonal(self):
        spd = SpdSpace(2, "log_euclidean")
        p = spd.point(np.diag([np.e, np.e**2]))
        emb = spd.embed(p).reshape(2, 2)
        np.testing.assert_allclose(emb, np.diag([1.0, 2.0]), atol=1e-12)

    def test_wasserstein_identity(self):
        w = Wasserstein1D(5)
        q = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
        np.testing.assert_array_equal(w.embed(w.point(q)), q)

    def test_sphere_unavailable(self):
        sp = CompositionalSphere(3)
        with pytest.raises(EmbeddingUnavailable):
            sp.embed(sp.point([1.0, 0.0, 0.0]))

    def test_inverse_infeasible_signals_projection(self):
        w = Wasserstein1D(4)
        with pytest.raises(InverseInfeasible):
            w.inverse_embed(np.array([1.0, 0.0, 2.0, 3.0]))
        out = w.inverse_embed(np.array([1.0, 0.0, 2.0, 3.0]), project=True)
        assert np.all(np.diff(out.data) >= 0)

        spd = SpdSpace(2, "frobenius")
        bad = np.array([[1.0, 0.0], [0.0, -1.0]]).ravel()
        with pytest.raises(InverseInfeasible):
            spd.inverse_embed(bad)
        fixed = spd.inverse_embed(bad, project=True)
        assert np.linalg.eigvalsh(fixed.data).min() >= spd.eps_pd - 1e-15

    def test_roundtrip_random(self, space_case):
        name, space, sampler = space_case
        if not space.embedding_available:
            pytest.skip("no embedding")
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = sampler(space, rng)
            back = space.inverse_embed(space.embed(p))
            assert space.distance(p, back) < 1e-8


class TestLogExp:
    def test_zero_vector(self):
        sp = CompositionalSphere(3)
        z = sp.point(np.array([0.5, 0.5, np.sqrt(0.5)]))
        np.testing.assert_allclose(sp.log_map(z, z), 0.0, atol=1e-12)

    def test_sphere_quarter_turn(self):
        sp = CompositionalSphere(3)
        omega = sp.point([1.0, 0.0, 0.0])
        a = sp.point([0.0, 1.0, 0.0])
        v = sp.log_map(omega, a)
        assert np.linalg.norm(v) == pytest.approx(np.pi / 2, abs=1e-12)
        np.testing.assert_allclose(v / np.linalg.norm(v), [0.0, 1.0, 0.0], atol=1e-12)

    def test_euclidean_shift(self):
        eu = Euclidean(2)
        omega, a = eu.point([1.0, 1.0]), eu.point([2.0, -1.0])
        v = eu.log_map(omega, a)
        np.testing.assert_array_equal(v, [1.0, -2.0])
        back = eu.exp_map(omega, v)
        assert eu.distance(back, a) == 0.0

    def test_unavailable(self):
        spd = SpdSpace(2, "log_euclidean")
        p = spd.point(np.eye(2))
        with pytest.raises(LogExpUnavailable):
            spd.log_map(p, p)
        w = Wasserstein1D(3)
        q = w.point([0.0, 1.0, 2.0])
        with pytest.raises(LogExpUnavailable):
            w.exp_map(q, np.zeros(3))


class TestValidation:
    def test_off_sphere(self):
        with pytest.raises(InvariantViolation):
            CompositionalSphere(3).point([1.0, 1.0, 0.0])

    def test_negative_sphere_coordinate(self):
        with pytest.raises(InvariantViolation):
            CompositionalSphere(2).point([np.sqrt(0.5), -np.sqrt(0.5)])

    def test_laplacian_asymmetric(self):
        with pytest.raises(InvariantViolation):
            NetworkLaplacian(2).point([[1.0, -1.0], [0.0, 1.0]])

    def test_laplacian_row_sums(self):
        with pytest.raises(InvariantViolation):
            NetworkLaplacian(2).point([[1.0, -0.5], [-0.5, 1.0]])

    def test_laplacian_weight_cap(self):
        space = NetworkLaplacian(2, max_weight=1.0)
        with pytest.raises(InvariantViolation):
            space.point([[2.0, -2.0], [-2.0, 2.0]])

    def test_spd_not_positive(self):
        with pytest.raises(InvariantViolation):
            SpdSpace(2).point([[1.0, 0.0], [0.0, 0.0]])

    def test_quantile_not_monotone(self):
        with pytest.raises(InvariantViolation):
            Wasserstein1D(3).point([0.0, 1.0, 0.5])

    def test_quantile_support(self):
        with pytest.raises(InvariantViolation):
            Wasserstein1D(3, support=(0.0, 1.0)).point([0.0, 0.5, 2.0])


class TestSerialization:
    def test_json_roundtrip(self, space_case):
        name, space, sampler = space_case
        rng = np.random.default_rng(6)
        p = sampler(space, rng)
        d = p.to_json()
        assert d["space"] == space.tag
        back = object_from_json(d, space)
        assert space.distance(p, back) < 1e-12

    def test_descriptor_capabilities(self):
        assert Euclidean(2).descriptor().embedding_available
        assert Euclidean(2).descriptor().logexp_available
        assert not CompositionalSphere(3).descriptor().embedding_available
        assert CompositionalSphere(3).descriptor().logexp_available
        assert SpdSpace(2, "log_cholesky").descriptor().embedding_available
        assert not SpdSpace(2, "log_cholesky").descriptor().logexp_available
        desc = FunctionalL2(24).descriptor()
        assert desc.beta1 == 2.0 and desc.beta2 == 2.0

    def test_effect_length_invariant(self):
        eu = Euclidean(1)
        with pytest.raises(ValueError):
            GeodesicEffect(
                start=eu.point([0.0]),
                end=eu.point([1.0]),
                length=5.0,
                reference=eu.point([0.0]),
            )
