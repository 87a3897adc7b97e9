"""Prox catalog against brute-force oracles and operator-theoretic laws."""

import numpy as np
import pytest

from conftest import (
    golden_prox_1d,
    golden_section,
    prox_objective,
    sample_catalog_fn,
    sample_quadratic_affine,
)
from proxsplit.errors import CapabilityError, InfeasibleConstraintError
from proxsplit.prox import (
    Box,
    ConjugateOf,
    IndicatorAffine,
    IndicatorZero,
    ProxQuery,
    PwlPenalty,
    Quadratic,
    QuadraticAffine,
    Separable,
    WeightedL1,
    Zero,
    diag_scale,
    dual_prox_d1,
    dual_quadratic,
    prox,
    prox_conjugate,
    proxfn_from_json,
    reflected_prox,
)


def anisotropic_quadratic(beta=4.0, sigma=1.0) -> Quadratic:
    """The two-dimensional extremal quadratic 0.5*(beta x1^2 + sigma x2^2)."""
    return Quadratic(np.diag([beta, sigma]))


class TestProxValues:
    def test_anisotropic_quadratic_closed_form(self, rng):
        f = anisotropic_quadratic()
        for _ in range(5):
            y = rng.normal(size=2)
            got = prox(f, ProxQuery(1.0, y))
            assert np.allclose(got, [y[0] / 5.0, y[1] / 2.0], atol=1e-14)

    def test_zero_is_identity(self, rng):
        z = rng.normal(size=4)
        assert np.array_equal(prox(Zero(), ProxQuery(3.7, z)), z)

    def test_indicator_zero_maps_to_origin(self, rng):
        z = rng.normal(size=4)
        assert np.array_equal(prox(IndicatorZero(), ProxQuery(0.2, z)),
                              np.zeros(4))

    def test_weighted_l1_soft_threshold(self):
        f = WeightedL1([1.0, 1.0])
        got = prox(f, ProxQuery(1.0, np.array([2.0, -0.5])))
        assert np.allclose(got, [1.0, 0.0], atol=1e-14)
        # grid-verified: the same point from the brute-force oracle
        for i, z in enumerate([2.0, -0.5]):
            assert golden_prox_1d(WeightedL1([1.0]), 1.0, z) == (
                pytest.approx(got[i], abs=1e-9))

    def test_pwl_penalty_band_edge(self):
        f = PwlPenalty(-1.0, 1.0, 10.0)
        got = prox(f, ProxQuery(0.1, np.array([1.5])))
        assert got[0] == pytest.approx(1.0, abs=1e-12)
        assert golden_prox_1d(f, 0.1, 1.5) == pytest.approx(1.0, abs=1e-9)

    def test_pwl_all_segments_against_oracle(self, rng):
        f = PwlPenalty(-1.0, 2.0, 3.0)
        for z in (-9.0, -1.5, -1.05, 0.3, 2.2, 2.95, 8.0):
            gamma = float(10.0 ** rng.uniform(-1.5, 0.5))
            got = prox(f, ProxQuery(gamma, np.array([z])))[0]
            assert got == pytest.approx(golden_prox_1d(f, gamma, z),
                                        abs=1e-8)

    def test_box_clips(self):
        f = Box([-1.0, 0.0], [1.0, 2.0])
        got = prox(f, ProxQuery(5.0, np.array([3.0, -1.0])))
        assert np.array_equal(got, [1.0, 0.0])

    def test_gamma_must_be_positive(self):
        with pytest.raises(ValueError):
            ProxQuery(0.0, np.zeros(2))
        with pytest.raises(ValueError):
            ProxQuery(-1.0, np.zeros(2))
        with pytest.raises(ValueError):
            Zero().prox(-0.5, np.zeros(2))

    def test_dimension_mismatch(self):
        with pytest.raises(Exception):
            prox(WeightedL1([1.0, 2.0]), ProxQuery(1.0, np.zeros(3)))


class TestReflected:
    def test_anisotropic_closed_form(self, rng):
        f = anisotropic_quadratic()
        y = rng.normal(size=2)
        got = reflected_prox(f, ProxQuery(1.0, y))
        assert np.allclose(got, [-0.6 * y[0], 0.0 * y[1]], atol=1e-14)

    def test_zero_reflects_to_identity(self, rng):
        z = rng.normal(size=3)
        assert np.allclose(reflected_prox(Zero(), ProxQuery(1.0, z)), z)

    def test_indicator_zero_reflects_to_negation(self, rng):
        z = rng.normal(size=3)
        got = reflected_prox(IndicatorZero(), ProxQuery(1.0, z))
        assert np.allclose(got, -z)


class TestConjugateProx:
    def test_indicator_zero_conjugate_is_zero_fn(self, rng):
        z = rng.normal(size=3)
        got = prox_conjugate(IndicatorZero(), ProxQuery(1.0, z))
        assert np.allclose(got, z, atol=1e-14)

    def test_zero_conjugate_is_origin_indicator(self, rng):
        z = rng.normal(size=3)
        got = prox_conjugate(Zero(), ProxQuery(1.0, z))
        assert np.allclose(got, np.zeros(3), atol=1e-14)

    def test_self_conjugate_squared_norm(self, rng):
        z = rng.normal(size=3)
        got = prox_conjugate(Quadratic(np.eye(3)), ProxQuery(1.0, z))
        assert np.allclose(got, z / 2.0, atol=1e-13)

    def test_moreau_identity_catalog(self, rng):
        for _ in range(300):
            dim = int(rng.integers(1, 6))
            f = sample_catalog_fn(rng, dim)
            gamma = float(rng.choice([0.01, 1.0, 100.0]))
            z = 3.0 * rng.normal(size=dim)
            lhs = f.prox(gamma, z) + gamma * f.conjugate_prox(
                1.0 / gamma, z / gamma)
            assert np.allclose(lhs, z, atol=1e-10)


class TestDualProx:
    def test_diagonal_instance(self, rng):
        f = Quadratic(np.diag([4.0, 1.0]))
        a = np.diag([1.0, 3.0])
        z = rng.normal(size=2)
        got = dual_prox_d1(f, a, np.zeros(2), ProxQuery(1.0, z))
        assert np.allclose(got, [z[0] / 1.25, z[1] / 10.0], atol=1e-13)

    def test_identity_instance(self, rng):
        f = Quadratic(np.eye(2))
        z = rng.normal(size=2)
        got = dual_prox_d1(f, np.eye(2), np.zeros(2), ProxQuery(1.0, z))
        assert np.allclose(got, z / 2.0, atol=1e-13)

    def test_linear_shift(self):
        f = Quadratic(np.eye(2))
        got = dual_prox_d1(f, np.eye(2), np.array([1.0, 0.0]),
                           ProxQuery(1.0, np.array([1.0, 0.0])))
        assert np.allclose(got, np.zeros(2), atol=1e-13)

    def test_requires_positive_definite(self):
        f = Quadratic(np.diag([1.0, 0.0]))
        with pytest.raises(CapabilityError):
            dual_quadratic(f, np.eye(2), None)

    def test_matches_generic_conjugate_composition(self, rng):
        # independent route: gamma*d1 prox via direct quadratic minimization
        n, p = 4, 3
        m = rng.normal(size=(n, n))
        f = Quadratic(m @ m.T + np.eye(n), rng.normal(size=n))
        a = rng.normal(size=(p, n))
        c = rng.normal(size=p)
        gamma = 0.7
        z = rng.normal(size=p)
        got = dual_prox_d1(f, a, c, ProxQuery(gamma, z))
        qinv = np.linalg.inv(f.Q)
        hess = a @ qinv @ a.T
        lin = a @ qinv @ f.q + c
        expect = np.linalg.solve(gamma * hess + np.eye(p), z - gamma * lin)
        assert np.allclose(got, expect, atol=1e-10)


class TestOperatorLaws:
    def test_prox_optimality_vs_oracle_1d(self, rng):
        fns = [
            Quadratic(np.array([[2.0]]), np.array([0.7])),
            WeightedL1([1.3]),
            PwlPenalty(-0.5, 0.5, 4.0),
            Zero(1),
        ]
        for f in fns:
            for gamma in (0.01, 1.0, 100.0):
                z = float(rng.normal() * 2)
                x = f.prox(gamma, np.array([z]))[0]
                obj = prox_objective(f, gamma, np.array([z]))
                oracle = golden_prox_1d(f, gamma, z,
                                        bracket=(z - 300.0, z + 300.0))
                assert obj(np.array([x])) <= obj(np.array([oracle])) + 1e-10

    def test_box_prox_vs_constrained_oracle(self, rng):
        f = Box([-1.0], [1.0])
        for _ in range(20):
            z = float(rng.normal() * 3)
            x = f.prox(1.0, np.array([z]))[0]
            oracle = golden_section(
                lambda t: 0.5 * (t - z) ** 2, -1.0, 1.0)
            assert x == pytest.approx(oracle, abs=1e-8)

    def test_nonexpansiveness_catalog(self, rng):
        for _ in range(400):
            dim = int(rng.integers(1, 6))
            f = sample_catalog_fn(rng, dim)
            gamma = float(10.0 ** rng.uniform(-2, 2))
            z1 = 3.0 * rng.normal(size=dim)
            z2 = 3.0 * rng.normal(size=dim)
            lhs = np.linalg.norm(f.prox(gamma, z1) - f.prox(gamma, z2))
            rhs = np.linalg.norm(z1 - z2)
            assert lhs <= rhs * (1 + 1e-10) + 1e-12

    def test_reflected_contraction_factor(self, rng):
        for gamma in (0.1, 0.5, 2.0, 10.0):
            beta, sigma = 4.0, 1.0
            f = anisotropic_quadratic(beta, sigma)
            delta = max((gamma * beta - 1) / (gamma * beta + 1),
                        (1 - gamma * sigma) / (gamma * sigma + 1))
            for _ in range(50):
                x, y = rng.normal(size=2), rng.normal(size=2)
                lhs = np.linalg.norm(f.reflect(gamma, x) - f.reflect(gamma, y))
                assert lhs <= delta * np.linalg.norm(x - y) + 1e-12
            # equality along the eigen-direction of the active branch
            axis = np.array([0.0, 1.0]) if gamma <= 0.5 else np.array(
                [1.0, 0.0])
            lhs = np.linalg.norm(f.reflect(gamma, axis)
                                 - f.reflect(gamma, -axis))
            assert lhs == pytest.approx(delta * 2.0, abs=1e-12)

    def test_cocoercive_part_is_nonexpansive(self, rng):
        gamma, beta, sigma = 0.8, 5.0, 0.5
        f = anisotropic_quadratic(beta, sigma)
        top = 1.0 / (1.0 + gamma * sigma)
        bot = 1.0 / (1.0 + gamma * beta)
        scale = 2.0 / (top - bot)

        def c_op(v):
            return scale * (f.prox(gamma, v) - bot * v) - v

        for _ in range(100):
            x, y = rng.normal(size=2), rng.normal(size=2)
            assert np.linalg.norm(c_op(x) - c_op(y)) <= np.linalg.norm(
                x - y) * (1 + 1e-12)

    def test_equal_curvature_prox_is_pure_scaling(self, rng):
        gamma, beta = 0.8, 3.0
        f = Quadratic(beta * np.eye(3))
        z = rng.normal(size=3)
        assert np.allclose(f.prox(gamma, z), z / (1 + gamma * beta),
                           atol=1e-13)


class TestAffineKinds:
    def test_projection_prox(self, rng):
        lm = rng.normal(size=(2, 5))
        x_feas = rng.normal(size=5)
        f = IndicatorAffine(lm, lm @ x_feas)
        z = rng.normal(size=5)
        x = f.prox(1.0, z)
        assert np.allclose(lm @ x, lm @ x_feas, atol=1e-10)
        # projection is gamma-independent and idempotent
        assert np.allclose(f.prox(7.0, z), x, atol=1e-12)
        assert np.allclose(f.prox(1.0, x), x, atol=1e-10)

    def test_infeasible_rejected(self):
        lm = np.array([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(InfeasibleConstraintError):
            IndicatorAffine(lm, np.array([0.0, 1.0]))

    def test_quadratic_affine_prox_oracle(self, rng):
        for _ in range(10):
            f = sample_quadratic_affine(rng, 5)
            gamma = float(10.0 ** rng.uniform(-1, 1))
            z = rng.normal(size=5)
            x = f.prox(gamma, z)
            assert np.allclose(f.L @ x, f.b, atol=1e-9)
            # oracle: full KKT system solved by a separate route
            n, p = 5, f.L.shape[0]
            kkt = np.block([[gamma * f.Q + np.eye(n), f.L.T],
                            [f.L, np.zeros((p, p))]])
            rhs = np.concatenate([z - gamma * f.q, f.b])
            expect = np.linalg.solve(kkt, rhs)[:n]
            assert np.allclose(x, expect, atol=1e-9)


class TestDiagScale:
    def test_substitution_identity(self, rng):
        # f(sign * t / d) minimized in t must equal the scaled prox
        for _ in range(60):
            dim = int(rng.integers(1, 5))
            f = sample_catalog_fn(rng, dim)
            d = rng.uniform(0.2, 3.0, size=dim)
            sign = int(rng.choice([1, -1]))
            scaled = diag_scale(f, d, sign)
            gamma = float(10.0 ** rng.uniform(-1, 1))
            t = rng.normal(size=dim)
            direct = gamma * scaled(scaled.prox(gamma, t)) + 0.5 * np.sum(
                (scaled.prox(gamma, t) - t) ** 2)
            # check against coarse sampling of the same objective
            for _ in range(30):
                cand = scaled.prox(gamma, t) + 0.1 * rng.normal(size=dim)
                val = gamma * scaled(cand) + 0.5 * np.sum((cand - t) ** 2)
                assert direct <= val + 1e-9

    def test_scaled_evaluation_matches_original(self, rng):
        f = WeightedL1([2.0, 0.5])
        d = np.array([2.0, 4.0])
        scaled = diag_scale(f, d, -1)
        t = rng.normal(size=2)
        assert scaled(t) == pytest.approx(f(-t / d), abs=1e-12)

    def test_box_scaling(self):
        f = Box([-1.0, 0.0], [2.0, 3.0])
        d = np.array([2.0, 0.5])
        up = diag_scale(f, d, 1)
        assert np.allclose(up.lo, [-2.0, 0.0])
        assert np.allclose(up.hi, [4.0, 1.5])
        down = diag_scale(f, d, -1)
        assert np.allclose(down.lo, [-4.0, -1.5])
        assert np.allclose(down.hi, [2.0, 0.0])


class TestSeparable:
    def test_prox_composes(self, rng):
        f = Separable([
            (0, 2, WeightedL1([1.0, 2.0])),
            (2, 3, Zero(1)),
            (3, 5, Box([-1.0, -1.0], [1.0, 1.0])),
        ])
        z = rng.normal(size=5) * 3
        got = f.prox(0.7, z)
        assert np.allclose(got[:2], WeightedL1([1.0, 2.0]).prox(0.7, z[:2]))
        assert np.allclose(got[2:3], z[2:3])
        assert np.allclose(got[3:], np.clip(z[3:], -1, 1))

    def test_ranges_must_tile(self):
        with pytest.raises(ValueError):
            Separable([(0, 2, Zero(2)), (3, 4, Zero(1))])
        with pytest.raises(ValueError):
            Separable([(0, 2, Zero(2)), (1, 4, Zero(3))])


class TestJsonRoundtrip:
    def test_all_kinds(self, rng):
        candidates = [
            Quadratic(np.array([[2.0, 0.5], [0.5, 1.0]]),
                      np.array([1.0, -1.0])),
            QuadraticAffine(np.eye(2), np.zeros(2),
                            np.array([[1.0, 1.0]]), np.array([1.0])),
            Zero(3),
            IndicatorZero(2),
            IndicatorAffine(np.array([[1.0, 0.0]]), np.array([2.0])),
            Box([-1.0], [1.0]),
            WeightedL1([0.5, 1.5]),
            PwlPenalty(-0.5, 0.5, 1e6, 4),
            Separable([(0, 2, WeightedL1([1.0, 1.0])), (2, 3, Zero(1))]),
        ]
        for f in candidates:
            back = proxfn_from_json(f.to_json())
            assert back.kind == f.kind
            dim = f.dim or 3
            z = rng.normal(size=dim)
            gamma = 0.9
            assert np.allclose(back.prox(gamma, z), f.prox(gamma, z),
                               atol=1e-12)

    def test_conjugate_wrapper_prox(self, rng):
        f = WeightedL1([1.0, 1.0])
        wrapped = ConjugateOf(f)
        z = rng.normal(size=2) * 3
        assert np.allclose(wrapped.prox(0.7, z), f.conjugate_prox(0.7, z))
