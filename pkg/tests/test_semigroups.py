import math

import numpy as np
import pytest

from phaseineq.fock_core import (
    StateFamily,
    TruncationError,
    displace,
    mean_photon,
    number_state,
    random_state,
    relative_entropy,
    thermal_state,
)
from phaseineq.semigroups import (
    Amplifier,
    AtomMixture,
    Attenuator,
    GaussianDensity,
    Heat,
    QOU,
    QuadratureError,
    SolverOptions,
    convolve,
    entropy_rate,
    evolve,
    liouvillian_apply,
    photon_trajectory,
    relent_decay_rate,
    standard_gaussian,
)

FORCED = SolverOptions(force_integrator=True)


class TestLiouvillian:
    def test_attenuator_kills_vacuum(self):
        out = liouvillian_apply(Attenuator(), number_state(0, 8))
        assert np.allclose(out, 0.0)

    def test_attenuator_on_two_photon_state(self):
        out = liouvillian_apply(Attenuator(), number_state(2, 8))
        expected = 2.0 * (number_state(1, 8).mat - number_state(2, 8).mat)
        assert np.allclose(out, expected)

    def test_heat_traceless_on_interior_state(self):
        rho = random_state(64, 4, StateFamily.FULL_RANK)
        assert abs(np.trace(liouvillian_apply(Heat(), rho)).real) <= 1e-10

    def test_qou_is_weighted_combination(self):
        rho = random_state(16, 9, StateFamily.FULL_RANK)
        combo = (2.0 * liouvillian_apply(Attenuator(), rho)
                 + 1.0 * liouvillian_apply(Amplifier(), rho))
        assert np.allclose(liouvillian_apply(QOU(math.sqrt(2), 1.0), rho), combo)

    def test_qou_parameter_validation(self):
        with pytest.raises(ValueError):
            QOU(1.0, 1.0)
        with pytest.raises(ValueError):
            QOU(1.0, 2.0)


class TestEvolve:
    def test_zero_time_is_identity(self):
        rho = thermal_state(1.0, 32)
        assert evolve(rho, Heat(), 0.0) is rho

    def test_attenuator_thermal_closed_form(self):
        out = evolve(thermal_state(1.0, 64), Attenuator(), 0.5, FORCED)
        target = thermal_state(math.exp(-0.5), 64)
        assert np.max(np.abs(out.mat - target.mat)) <= 1e-6

    def test_heat_thermal_closed_form(self):
        out = evolve(thermal_state(1.0, 64), Heat(), 0.1, FORCED)
        target = thermal_state(1.0 + 0.2 * math.pi, 64)
        assert np.max(np.abs(out.mat - target.mat)) <= 1e-5

    def test_amplifier_thermal_closed_form(self):
        out = evolve(thermal_state(1.0, 64), Amplifier(), 0.3, FORCED)
        target = thermal_state(math.exp(0.3) * 2.0 - 1.0, 64)
        assert np.max(np.abs(out.mat - target.mat)) <= 1e-6

    def test_qou_photon_number_vs_trajectory(self):
        mu, lam = math.sqrt(2.0), 1.0
        rho = random_state(64, 5, StateFamily.DIAGONAL)
        n0 = mean_photon(rho)
        for t in (0.2, 0.7):
            out = evolve(rho, QOU(mu, lam), t)
            assert mean_photon(out) == pytest.approx(
                photon_trajectory(n0, mu, lam, t), abs=1e-6)

    def test_semigroup_property(self):
        rho = random_state(48, 1, StateFamily.FULL_RANK)
        kind = Attenuator()
        once = evolve(rho, kind, 0.5)
        twice = evolve(evolve(rho, kind, 0.2), kind, 0.3)
        assert np.max(np.abs(once.mat - twice.mat)) <= 1e-6

    def test_fast_path_matches_integrator(self):
        rho = thermal_state(0.8, 64)
        fast = evolve(rho, Attenuator(), 0.4)
        slow = evolve(rho, Attenuator(), 0.4, FORCED)
        assert np.max(np.abs(fast.mat - slow.mat)) <= 1e-7

    def test_edge_mass_breach_raises(self):
        # Amplification out of a basis this small must be caught.
        rho = thermal_state(0.2, 12)
        with pytest.raises(TruncationError):
            evolve(rho, Amplifier(), 2.0, SolverOptions(force_integrator=True))

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            evolve(thermal_state(1.0, 32), Heat(), -0.1)


class TestConvolve:
    def test_identity_atom(self):
        rho = random_state(32, 8, StateFamily.FULL_RANK)
        f = AtomMixture(points=np.zeros((1, 2)), weights=np.ones(1))
        out = convolve(f, rho, 1.0)
        assert np.max(np.abs(out.mat - rho.mat)) <= 1e-12

    def test_gaussian_convolution_equals_heat_flow(self):
        rho = thermal_state(1.0, 128)
        out = convolve(standard_gaussian(), rho, 0.1)
        target = thermal_state(1.0 + 0.2 * math.pi, 128)
        assert np.max(np.abs(out.mat - target.mat)) <= 1e-6

    def test_atom_addition_law(self):
        rho = random_state(64, 2, StateFamily.FULL_RANK)
        x1 = np.array([[0.2, -0.1]])
        x2 = np.array([[-0.15, 0.25]])
        f1 = AtomMixture(points=x1, weights=np.ones(1))
        f2 = AtomMixture(points=x2, weights=np.ones(1))
        f12 = AtomMixture(points=x1 + x2, weights=np.ones(1))
        lhs = convolve(f1, convolve(f2, rho, 1.0), 1.0)
        rhs = convolve(f12, rho, 1.0)
        assert np.max(np.abs(lhs.mat - rhs.mat)) <= 1e-6

    def test_atom_scaling_law(self):
        rho = random_state(64, 6, StateFamily.FULL_RANK)
        t = 0.25
        pts = np.array([[0.4, -0.3], [-0.2, 0.1]])
        w = np.array([0.6, 0.4])
        f = AtomMixture(points=pts, weights=w)
        f_scaled = AtomMixture(points=math.sqrt(t) * pts, weights=w)
        lhs = convolve(f, rho, t)
        rhs = convolve(f_scaled, rho, 1.0)
        assert np.max(np.abs(lhs.mat - rhs.mat)) <= 1e-8

    def test_compatibility_with_heat_flow(self):
        # evolve(f * rho, Heat, xi) = (heat-widened f) * evolve(rho, Heat, mu)
        # for xi = mu + t*nu; heat flow for time nu at convolution scale t
        # widens the classical density by nu * I.
        rho = thermal_state(0.5, 128)
        t, mu_t, nu_t = 0.5, 0.02, 0.03
        f = GaussianDensity(mean=np.array([0.1, -0.05]), cov=np.eye(2))
        lhs = evolve(convolve(f, rho, t), Heat(), mu_t + t * nu_t, FORCED)
        f_wide = GaussianDensity(mean=f.mean, cov=f.cov + nu_t * np.eye(2))
        rhs = convolve(f_wide, evolve(rho, Heat(), mu_t, FORCED), t)
        assert np.max(np.abs(lhs.mat - rhs.mat)) <= 1e-5

    def test_covariance_with_displacement(self):
        rho = thermal_state(0.5, 128)
        t = 0.25
        theta = np.array([0.08, -0.04])
        f = GaussianDensity(mean=np.array([0.1, 0.2]), cov=np.eye(2))
        omega_q, omega_c = 1.0, 1.0
        omega = omega_q + math.sqrt(t) * omega_c
        lhs = displace(convolve(f, rho, t), omega * theta)
        f_shift = GaussianDensity(mean=f.mean + omega_c * theta, cov=f.cov)
        rhs = convolve(f_shift, displace(rho, omega_q * theta), t)
        assert np.max(np.abs(lhs.mat - rhs.mat)) <= 1e-5

    def test_quadrature_failure_raises(self):
        rho = thermal_state(1.0, 32)
        with pytest.raises((QuadratureError, TruncationError, ValueError)):
            convolve(standard_gaussian(), rho, 5.0, quad_order=8)

    def test_quad_order_minimum(self):
        with pytest.raises(ValueError):
            convolve(standard_gaussian(), thermal_state(1.0, 32), 0.1, quad_order=4)


class TestEntropyRates:
    def test_attenuator_rate_on_thermal(self):
        rate = entropy_rate(thermal_state(1.0, 128), Attenuator())
        assert rate == pytest.approx(-2 * math.log(2), abs=1e-3)

    def test_amplifier_rate_on_thermal(self):
        for n in (1.0, 2.0):
            rate = entropy_rate(thermal_state(n, 128), Amplifier())
            assert rate == pytest.approx(2 * (n + 1) * math.log(1 + 1 / n), abs=1e-3)

    def test_fisher_sum_identity(self):
        rho = random_state(128, 12, StateFamily.FULL_RANK)
        j_sum = 2 * math.pi * (entropy_rate(rho, Attenuator())
                               + entropy_rate(rho, Amplifier()))
        heat = entropy_rate(rho, Heat())
        assert heat == pytest.approx(j_sum, rel=1e-8)

    def test_fd_method_cross_validates_on_smooth_state(self):
        # On a well-conditioned state the integrated-flow stencil agrees
        # with the algebraic derivative.
        rho = thermal_state(1.0, 64)
        exact = entropy_rate(rho, Attenuator())
        fd = entropy_rate(rho, Attenuator(), h=1e-4, method="fd")
        assert fd == pytest.approx(exact, rel=1e-3)

    def test_rejects_rank_deficient(self):
        from phaseineq.fock_core import IllConditionedError
        with pytest.raises(IllConditionedError):
            entropy_rate(number_state(1, 16), Attenuator())


class TestRelentDecay:
    def test_fixed_point_rate_vanishes(self):
        mu, lam = math.sqrt(2.0), 1.0
        sigma = thermal_state(1.0, 64)
        rate, _ = relent_decay_rate(sigma, mu, lam)
        assert rate == pytest.approx(0.0, abs=1e-6)

    def test_identity_on_thermal(self):
        mu, lam = math.sqrt(2.0), 1.0
        rho = thermal_state(2.0, 64)
        rate, rhs = relent_decay_rate(rho, mu, lam)
        d = relative_entropy(rho, thermal_state(1.0, 64))
        assert rate == pytest.approx(-(d + rhs), rel=1e-3)

    def test_gaussian_rate_bound(self):
        mu, lam = math.sqrt(2.0), 1.0
        rho = thermal_state(3.0, 128)
        rate, _ = relent_decay_rate(rho, mu, lam)
        d = relative_entropy(rho, thermal_state(1.0, 128))
        assert rate <= -(mu**2 - lam**2) * d + 1e-6


class TestPhotonTrajectory:
    def test_initial_value(self):
        assert photon_trajectory(3.0, math.sqrt(2), 1.0, 0.0) == 3.0

    def test_limit_is_fixed_point(self):
        assert photon_trajectory(5.0, math.sqrt(2), 1.0, 50.0) == pytest.approx(1.0)

    def test_matches_evolution_oracle(self):
        rho = random_state(48, 3, StateFamily.DIAGONAL)
        n0 = mean_photon(rho)
        out = evolve(rho, QOU(math.sqrt(2), 1.0), 0.3)
        assert photon_trajectory(n0, math.sqrt(2), 1.0, 0.3) == pytest.approx(
            mean_photon(out), abs=1e-6)
