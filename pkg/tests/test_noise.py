"""Tests for fractional Brownian drivers, their lifts and moment scaling."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.errors import DiagnosticRefusal, RoughPathParameterError
from src.core.models import FbmSpec
from src.noise import (
    areas_from,
    chen_compose,
    dump_driver,
    fgn_autocovariance,
    interval_area,
    interval_increment,
    kolmogorov_check,
    lift_path,
    load_driver,
    restrict,
    sample_driver,
    sample_fbm,
    sample_fbm_batch,
)


@pytest.fixture
def driver():
    """Two-dimensional driver with H = 0.4 on 1024 steps of [0, 1]."""
    return sample_driver(FbmSpec(hurst=0.4, m=2, dt=1.0 / 1024, steps=1024, seed=3))


class TestFbmSampling:
    """Exact fBm samples on a grid."""

    def test_brownian_increments_uncorrelated(self):
        """Verify the autocovariance at H = 1/2 is the unit impulse."""
        acov = fgn_autocovariance(0.5, 6)
        assert acov[0] == pytest.approx(1.0)
        assert np.allclose(acov[1:], 0.0, atol=1e-12)

    def test_rough_increments_anticorrelated(self):
        """Verify neighbouring increments are negatively correlated for H < 1/2."""
        acov = fgn_autocovariance(0.4, 4)
        assert acov[1] < 0.0

    def test_shape_and_start(self):
        """Verify the path has (steps + 1, m) samples and starts at zero."""
        w = sample_fbm(FbmSpec(hurst=0.45, m=3, dt=0.01, steps=50, seed=1))
        assert w.shape == (51, 3)
        assert np.all(w[0] == 0.0)

    def test_seed_determinism(self):
        """Verify equal seeds give equal paths and different seeds differ."""
        spec = FbmSpec(hurst=0.4, m=2, dt=0.01, steps=100, seed=9)
        assert np.array_equal(sample_fbm(spec), sample_fbm(spec))
        assert not np.array_equal(sample_fbm(spec), sample_fbm(spec.model_copy(update={"seed": 10})))

    def test_identical_components(self):
        """Verify every column repeats the first when components are identical."""
        w = sample_fbm(FbmSpec(hurst=0.4, m=3, dt=0.01, steps=40, seed=2, identical_components=True))
        assert np.array_equal(w[:, 0], w[:, 1])
        assert np.array_equal(w[:, 0], w[:, 2])

    def test_independent_components(self):
        """Verify columns differ when drawn from separate streams."""
        w = sample_fbm(FbmSpec(hurst=0.4, m=2, dt=0.01, steps=40, seed=2))
        assert not np.array_equal(w[:, 0], w[:, 1])

    def test_hurst_range_enforced(self):
        """Verify H must lie in (1/3, 1/2]."""
        with pytest.raises(ValidationError):
            FbmSpec(hurst=0.3, dt=0.01, steps=10)
        with pytest.raises(ValidationError):
            FbmSpec(hurst=0.6, dt=0.01, steps=10)

    @pytest.mark.parametrize("hurst", [0.4, 0.5])
    def test_variance_scaling(self, hurst):
        """Verify Var(W_t) = t^(2H) within three standard errors at t = 1/4, 1/2, 1."""
        n = 10_000
        paths = sample_fbm_batch(hurst, 1.0 / 64, 64, n, seed=17)
        for k in (16, 32, 64):
            t = k / 64
            second = paths[:, k] ** 2
            target = t ** (2 * hurst)
            se = second.std(ddof=1) / np.sqrt(n)
            assert abs(second.mean() - target) < 3 * se


class TestLift:
    """Level-2 lift and Chen's relation."""

    def test_area_symmetric_part(self, driver):
        """Verify Sym(A_st) = 1/2 W_st (x) W_st on arbitrary intervals."""
        for i, j in [(0, 1), (3, 40), (100, 1024), (0, 1024)]:
            area = interval_area(driver, i, j)
            inc = interval_increment(driver, i, j)
            assert np.allclose(0.5 * (area + area.T), 0.5 * np.outer(inc, inc), atol=1e-12)

    def test_chen_on_dyadic_pairs(self, driver):
        """Verify A_st = A_su + A_ut + W_su (x) W_ut on dyadic splits."""
        for level in range(1, 6):
            width = driver.steps >> level
            for s in range(0, driver.steps, 2 * width):
                u, t = s + width, s + 2 * width
                composed = chen_compose(
                    interval_area(driver, s, u),
                    interval_area(driver, u, t),
                    interval_increment(driver, s, u),
                    interval_increment(driver, u, t),
                )
                assert np.allclose(composed, interval_area(driver, s, t), atol=1e-10)

    def test_areas_from_matches_interval_area(self, driver):
        """Verify the vectorised areas agree with the folded ones."""
        rows = areas_from(driver, 100)
        for j in (100, 101, 500, 1024):
            assert np.allclose(rows[j - 100], interval_area(driver, 100, j), atol=1e-10)

    def test_scalar_path_is_lifted_as_column(self):
        """Verify a one-dimensional path is lifted with m = 1."""
        d = lift_path(np.array([0.0, 1.0, 0.5]), 0.5)
        assert d.m == 1
        assert np.allclose(d.areas[:, 0, 0], [0.5, 0.125])

    def test_out_of_range_interval(self, driver):
        """Verify intervals outside the grid are refused."""
        with pytest.raises(RoughPathParameterError):
            interval_area(driver, 10, 2000)

    def test_restrict_keeps_levels(self, driver):
        """Verify the coarse driver carries the folded areas of the fine one."""
        coarse = restrict(driver, 4)
        assert coarse.steps == 256
        assert coarse.dt == pytest.approx(driver.dt * 4)
        for k in (0, 17, 255):
            assert np.allclose(coarse.areas[k], interval_area(driver, 4 * k, 4 * k + 4), atol=1e-12)

    def test_restrict_requires_divisor(self, driver):
        """Verify a factor that does not divide the steps is refused."""
        with pytest.raises(RoughPathParameterError):
            restrict(driver, 3)


class TestDriverFiles:
    """Binary driver dumps."""

    def test_dump_and_load(self, driver, tmp_path):
        """Verify a dumped driver loads back with identical levels and metadata."""
        loaded = load_driver(dump_driver(driver, tmp_path / "w.bin"))
        assert np.array_equal(loaded.w, driver.w)
        assert np.array_equal(loaded.areas, driver.areas)
        assert loaded.dt == driver.dt and loaded.hurst == driver.hurst

    def test_bad_magic(self, driver, tmp_path):
        """Verify a file with a foreign header is refused."""
        p = dump_driver(driver, tmp_path / "w.bin")
        data = bytearray(p.read_bytes())
        data[:4] = b"XXXX"
        p.write_bytes(bytes(data))
        with pytest.raises(RoughPathParameterError):
            load_driver(p)

    def test_truncated(self, driver, tmp_path):
        """Verify a truncated payload is refused."""
        p = dump_driver(driver, tmp_path / "w.bin")
        p.write_bytes(p.read_bytes()[:-8])
        with pytest.raises(RoughPathParameterError):
            load_driver(p)


class TestKolmogorov:
    """Moment scaling over dyadic blocks."""

    def test_slope_reaches_target(self):
        """Verify the fitted exponent is at least p H - 0.1."""
        spec = FbmSpec(hurst=0.4, m=2, dt=1.0 / 256, steps=256, seed=5)
        report = kolmogorov_check(spec, p=4.0, n_samples=1000)
        assert report.passed
        assert report.slope == pytest.approx(1.6, abs=0.1)
        assert len(report.scales) == 8

    def test_refuses_few_samples(self):
        """Verify fewer than 100 samples are refused."""
        spec = FbmSpec(hurst=0.4, dt=1.0 / 64, steps=64)
        with pytest.raises(DiagnosticRefusal):
            kolmogorov_check(spec, n_samples=50)

    def test_refuses_single_level(self):
        """Verify an odd number of steps leaves too few dyadic levels."""
        spec = FbmSpec(hurst=0.4, dt=0.01, steps=101)
        with pytest.raises(DiagnosticRefusal):
            kolmogorov_check(spec, n_samples=200)
