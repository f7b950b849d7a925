"""Tests for decay fits, Lyapunov checks, rate bounds and synchronisation measurements."""

import math

import numpy as np
import pytest

from src.core.errors import DiagnosticRefusal
from src.core.models import SystemConfig, Trajectory
from src.diagnostics import (
    basin_radius_from_counts,
    basin_radius_truncated,
    distributional_frequencies,
    drift_jacobian,
    drift_lipschitz,
    fit_decay_rate,
    fit_log_decay,
    frequency_sync_check,
    hyperplane_residual,
    lyapunov_check,
    order_parameter,
    phase_spread,
    splitting_check,
    sync_report,
    theorem_rate_bound,
    theta_infinity,
)
from src.graph import balance_partition, erdos_renyi_signed, is_connected
from src.integrator import integrate
from src.model import (
    antipodal,
    initial_phases,
    inverse_switching,
    kuramoto_drift,
    switched_config,
    switching_transform,
    system_config_from_mapping,
)
from src.noise import sample_driver


def make_config(**overrides):
    data = {"N": 10, "graph": {"kind": "complete"}, "sigma": 0.1, "hurst": 0.45, "T": 2.0, "dt": 1 / 256, "seed": 0}
    data.update(overrides)
    return system_config_from_mapping(data)


def trajectory_from(theta, times, varpi=None):
    theta = np.asarray(theta, dtype=float)
    return Trajectory(times=times, theta=theta, mean_phase=theta.mean(axis=1), varpi=varpi)


def run(cfg, spread=0.9, **kwargs):
    driver = sample_driver(cfg.fbm)
    return integrate(cfg, driver, initial_phases(cfg.n, spread, cfg.seed), **kwargs), driver


class TestDecayFit:
    """Tail fits of log norms."""

    def test_exact_exponential(self):
        """Verify 3 e^{-2t} gives rate 2, intercept log 3 and R^2 = 1."""
        t = np.linspace(0.0, 5.0, 501)
        fit = fit_log_decay(t, 3.0 * np.exp(-2.0 * t))
        assert fit.rate == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(math.log(3.0))
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.window == (pytest.approx(2.5), pytest.approx(5.0))
        assert fit.decaying

    def test_growth_is_not_decaying(self):
        """Verify a growing norm has a negative rate."""
        t = np.linspace(0.0, 1.0, 50)
        assert not fit_log_decay(t, np.exp(t)).decaying

    def test_floor_refusal(self):
        """Verify a norm under the floor leaves too few points."""
        t = np.linspace(0.0, 1.0, 50)
        with pytest.raises(DiagnosticRefusal):
            fit_log_decay(t, np.zeros(50))

    def test_bad_tail_fraction(self):
        """Verify the tail fraction must lie in (0, 1]."""
        t = np.linspace(0.0, 1.0, 50)
        with pytest.raises(DiagnosticRefusal):
            fit_log_decay(t, np.ones(50), tail_fraction=0.0)

    def test_deterministic_rate_on_complete_graph(self):
        """Verify the linearised rate K lambda_2 / N = 1 for N = 10 without noise."""
        cfg = make_config(sigma=0.0, T=20.0, dt=0.01)
        traj, _ = run(cfg, spread=0.25)
        fit = fit_decay_rate(traj)
        assert 0.9 <= fit.rate <= 1.1


class TestLyapunov:
    """Dissipation margin of the norm Lyapunov function."""

    @pytest.mark.parametrize("delta", [math.pi / 8, math.pi / 4])
    def test_no_violations_on_random_graphs(self, delta):
        """Verify <grad V, f> <= -d |x| on 10 random connected graphs."""
        rng = np.random.default_rng(7)
        found = 0
        seed = 0
        while found < 10:
            n = int(rng.integers(3, 9))
            g = erdos_renyi_signed(n, 0.6, 0.0, seed=seed)
            seed += 1
            if not is_connected(g):
                continue
            cfg = SystemConfig(K=1.0, graph=g, noise_graph=g, natural_freqs=np.zeros(n), horizon=1.0, dt=0.1, delta=delta)
            report = lyapunov_check(cfg, n_samples=10_000)
            assert report.violations == 0
            assert report.worst_margin <= 1e-10
            found += 1

    def test_margin_reported_with_constants(self):
        """Verify d and C_{2 delta} on the complete graph."""
        report = lyapunov_check(make_config(delta="pi/4"), n_samples=500)
        assert report.c_two_delta == pytest.approx(2 / math.pi)
        assert report.d == pytest.approx(2 / math.pi)
        assert report.lambda2 == pytest.approx(10.0)

    def test_refuses_signed_graph(self):
        """Verify signed coupling is refused."""
        with pytest.raises(DiagnosticRefusal):
            lyapunov_check(make_config(graph={"kind": "twoBlockSigned:5"}), n_samples=100)

    def test_refuses_disconnected_graph(self):
        """Verify disconnected coupling is refused."""
        with pytest.raises(DiagnosticRefusal):
            lyapunov_check(make_config(graph={"kind": "blockDiagonal:5,5"}), n_samples=100)

    def test_refuses_zero_delta(self):
        """Verify delta = 0 is refused."""
        with pytest.raises(DiagnosticRefusal):
            lyapunov_check(make_config(delta=0.0), n_samples=100)

    def test_drift_jacobian_matches_differences(self):
        """Verify the analytic drift Jacobian against central differences."""
        cfg = make_config(graph={"kind": "kNeighbor:2"})
        theta = np.random.default_rng(1).uniform(-1, 1, 10)
        jac = drift_jacobian(theta, cfg)
        h = 1e-6
        for l in range(10):
            e = np.zeros(10)
            e[l] = h
            fd = (kuramoto_drift(theta + e, cfg) - kuramoto_drift(theta - e, cfg)) / (2 * h)
            assert np.allclose(jac[:, l], fd, atol=1e-8)

    def test_drift_lipschitz_complete_graph(self):
        """Verify L_f is at least K (attained at consensus) and at most 2K."""
        lip = drift_lipschitz(make_config(), n_points=200)
        assert 1.0 - 1e-12 <= lip <= 2.0


class TestRateBound:
    """Assembled rate bound and the basin radius."""

    def test_noiseless_bound_is_dissipation(self):
        """Verify the bound equals d when sigma = 0."""
        cfg = make_config(sigma=0.0, delta="pi/4")
        report = theorem_rate_bound(cfg, en_estimate=3.0)
        assert report.c_g == 0.0
        assert report.bound == pytest.approx(report.d)
        assert report.positive

    def test_bound_formula(self):
        """Verify d - (2 + C_G) C_G - C_G E N with a supplied C_G."""
        report = theorem_rate_bound(make_config(), en_estimate=2.0, c_g=0.1)
        assert report.bound == pytest.approx(report.d - 2.1 * 0.1 - 0.2)

    def test_large_noise_bound_negative(self):
        """Verify a large C_G makes the bound negative."""
        assert not theorem_rate_bound(make_config(), en_estimate=1.0, c_g=5.0).positive

    def test_noiseless_basin_is_eps(self):
        """Verify the radius is eps with a note when C_G = 0."""
        cfg = make_config(sigma=0.0)
        report = basin_radius_truncated(cfg, sample_driver(cfg.fbm), eps=0.3, n_max=2, lam=0.5)
        assert report.radius == 0.3
        assert report.note

    def test_noisy_basin_below_eps(self):
        """Verify the radius shrinks below eps and records one count per unit interval."""
        cfg = make_config()
        report = basin_radius_truncated(cfg, sample_driver(cfg.fbm), eps=0.3, n_max=2, lam=0.5, c_g=0.2, l_f=1.0)
        assert len(report.counts) == 2
        assert all(c >= 1 for c in report.counts)
        assert 0.0 < report.radius < 0.3
        assert report.eta == pytest.approx(2 / math.pi - 1.0 * 2.5 * 0.5)

    def test_basin_refusals(self):
        """Verify eps, lambda and the driver length are checked."""
        cfg = make_config()
        driver = sample_driver(cfg.fbm)
        with pytest.raises(DiagnosticRefusal):
            basin_radius_truncated(cfg, driver, eps=1.0, n_max=1, lam=0.5)
        with pytest.raises(DiagnosticRefusal):
            basin_radius_truncated(cfg, driver, eps=0.3, n_max=1, lam=1.5)
        with pytest.raises(DiagnosticRefusal):
            basin_radius_truncated(cfg, driver, eps=0.3, n_max=5, lam=0.5)

    def test_radius_monotone_in_lambda_for_fixed_counts(self):
        """Verify larger lambda never enlarges the radius on a quiet driver."""
        counts = [1] * 8
        radii = [basin_radius_from_counts(counts, 0.3, 0.5, lam)[0] for lam in (0.1, 0.3, 0.6, 0.9)]
        assert all(a >= b for a, b in zip(radii, radii[1:]))

    def test_radius_needs_counts(self):
        """Verify an empty count list is refused."""
        with pytest.raises(DiagnosticRefusal):
            basin_radius_from_counts([], 0.3, 0.5, 0.5)


class TestSynchrony:
    """Measurements on trajectories."""

    def test_spread_and_residual(self):
        """Verify the phase spread and the mean phase residual on a hand-made run."""
        traj = trajectory_from([[0.0, 1.0], [0.2, 0.6], [0.5, 0.5]], np.array([0.0, 1.0, 2.0]))
        assert np.allclose(phase_spread(traj), [1.0, 0.4, 0.0])
        assert hyperplane_residual(traj) == pytest.approx(0.1)

    def test_order_parameter(self):
        """Verify r = 1 at consensus and r = 0 on two antipodal clusters."""
        times = np.array([0.0, 1.0])
        traj = trajectory_from([np.full(4, 0.3), antipodal(4)], times)
        op = order_parameter(traj)
        assert op.r[0] == pytest.approx(1.0)
        assert op.r[1] == pytest.approx(0.0, abs=1e-12)
        assert op.psi[0] == pytest.approx(0.3)

    def test_smoothed_frequencies_of_linear_phases(self):
        """Verify constant velocities are recovered by every window."""
        times = np.linspace(0.0, 1.0, 101)
        rates = np.array([0.5, -1.0, 2.0])
        traj = trajectory_from(times[:, None] * rates[None, :], times)
        freqs = distributional_frequencies(traj, windows=(0.01, 0.05, 0.2))
        assert freqs.raw.shape == (100, 3)
        for values in freqs.smoothed.values():
            assert np.allclose(values, rates[None, :])
        assert np.allclose(freqs.mean_raw, rates.mean())
        assert np.allclose(freqs.times, times[1:])

    def test_window_shorter_than_step(self):
        """Verify windows below the grid step are refused."""
        times = np.linspace(0.0, 1.0, 11)
        traj = trajectory_from(np.zeros((11, 2)), times)
        with pytest.raises(DiagnosticRefusal):
            distributional_frequencies(traj, windows=(0.01,))

    def test_theta_infinity_without_noise(self):
        """Verify Theta_inf = Theta(0) when sigma = 0."""
        cfg = make_config(sigma=0.0)
        traj, driver = run(cfg)
        report = theta_infinity(traj, driver)
        assert report.estimate == pytest.approx(report.theta0)
        assert report.terminal_mean == pytest.approx(report.theta0, abs=1e-12)
        assert report.increments == [0.0, 0.0]

    def test_theta_infinity_tracks_mean_under_diagonal_noise(self):
        """Verify the rough integral reproduces the moving mean phase under diagonal noise."""
        cfg = make_config(noiseKind="diagonalSine", sigma=0.3)
        traj, driver = run(cfg)
        report = theta_infinity(traj, driver)
        assert abs(traj.mean_phase[-1] - traj.mean_phase[0]) > 1e-6
        assert report.estimate == pytest.approx(traj.mean_phase[-1], abs=1e-10)
        assert sum(report.increments) == pytest.approx(report.estimate - report.theta0, abs=1e-10)

    def test_theta_infinity_grid_mismatch(self):
        """Verify a driver of another length is refused."""
        cfg = make_config()
        traj, _ = run(cfg)
        with pytest.raises(DiagnosticRefusal):
            theta_infinity(traj, sample_driver(cfg.fbm.model_copy(update={"steps": 10})))

    def test_splitting_on_switched_consensus(self):
        """Verify two antipodal camps of a balanced graph are a split state."""
        cfg = make_config(N=8, graph={"kind": "twoBlockSigned:4"})
        part = balance_partition(cfg.graph)
        theta = inverse_switching(np.full(8, 0.4), part)
        report = splitting_check(trajectory_from([theta, theta], np.array([0.0, 1.0])), part)
        assert report.verdict
        assert set(report.side_deviations) == {"side1", "side2"}

    def test_splitting_fails_for_consensus(self):
        """Verify plain consensus is not a split state of a signed graph."""
        cfg = make_config(N=8, graph={"kind": "twoBlockSigned:4"})
        part = balance_partition(cfg.graph)
        report = splitting_check(trajectory_from([np.zeros(8)] * 2, np.array([0.0, 1.0])), part)
        assert not report.verdict

    def test_switched_run_matches_direct_run(self):
        """Verify the signed run and the switched nonnegative run agree after the transform."""
        cfg = make_config(N=8, graph={"kind": "twoBlockSigned:4"}, sigma=0.05)
        part = balance_partition(cfg.graph)
        driver = sample_driver(cfg.fbm)
        theta0 = initial_phases(8, 0.9, 0)
        signed = integrate(cfg, driver, theta0)
        direct = integrate(switched_config(cfg, part), driver, switching_transform(theta0, part))
        assert np.max(np.abs(switching_transform(signed.theta, part) - direct.theta)) <= 1e-9

    def test_frequency_check_needs_frequencies(self):
        """Verify a run without the frequency system is refused."""
        cfg = make_config()
        traj, _ = run(cfg)
        with pytest.raises(DiagnosticRefusal):
            frequency_sync_check(traj)

    def test_frequency_check_spread_condition(self):
        """Verify phases spread beyond pi/2 fail the hypothesis and the verdict."""
        times = np.linspace(0.0, 1.0, 50)
        theta = np.tile([0.0, 2.0], (50, 1))
        traj = trajectory_from(theta, times, varpi=np.zeros((50, 2)))
        cfg = make_config(N=2)
        report = frequency_sync_check(traj, cfg)
        assert not report.hypothesis_holds
        assert report.rate_floor is None
        assert not report.verdict

    def test_sync_report_verdicts(self):
        """Verify a benign noisy run synchronises and keeps its mean phase."""
        cfg = make_config(T=10.0, dt=1 / 128)
        traj, driver = run(cfg)
        report = sync_report(traj, driver)
        assert report.verdicts["synchronized"]
        assert report.verdicts["mean_phase_conserved"]
        assert report.theta_infinity == pytest.approx(traj.mean_phase[0], abs=1e-10)

    def test_sync_report_without_driver(self):
        """Verify Theta_inf is skipped without a driver."""
        cfg = make_config(sigma=0.0)
        traj, _ = run(cfg)
        report = sync_report(traj)
        assert report.theta_infinity is None
        assert set(report.verdicts) == {"synchronized", "decaying", "mean_phase_conserved", "delta_below_half_pi"}


@pytest.mark.slow
class TestAcceptanceRuns:
    """Seed sweeps of the main scenarios."""

    SEEDS = range(20)

    def test_rough_synchronisation(self):
        """Verify at least 19 of 20 seeds synchronise and keep the mean phase within 1e-8."""
        synced = 0
        for seed in self.SEEDS:
            cfg = make_config(seed=seed, T=20.0, dt=2**-9)
            traj, driver = run(cfg)
            report = sync_report(traj, driver)
            assert report.conservation_residual <= 1e-8
            synced += report.terminal_deviation < 1e-2 and (report.fitted_rate or 0.0) > 0
        assert synced >= 19

    def test_balanced_splitting(self):
        """Verify at least 19 of 20 seeds split into the two camps."""
        split = 0
        for seed in self.SEEDS:
            cfg = make_config(N=8, graph={"kind": "twoBlockSigned:4"}, sigma=0.05, seed=seed, T=10.0, dt=1 / 128)
            traj, _ = run(cfg)
            split += splitting_check(traj, balance_partition(cfg.graph)).verdict
        assert split >= 19

    def test_frequency_synchronisation(self):
        """Verify the frequency decay rate reaches 0.9 K cos(Delta) lambda_2 / N on at least 18 of 20 seeds."""
        passed = 0
        for seed in self.SEEDS:
            cfg = make_config(sigma=0.05, seed=seed, T=20.0, dt=1 / 256)
            rng = np.random.default_rng(seed)
            varpi0 = rng.uniform(-0.5, 0.5, cfg.n)
            traj, _ = run(cfg, spread=0.125, with_frequencies=True, varpi0=varpi0)
            report = frequency_sync_check(traj, cfg)
            assert report.hypothesis_holds
            passed += report.verdict
        assert passed >= 18
