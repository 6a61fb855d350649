"""
Test log coefficients, covariance, precision, separation and exports.
"""
import numpy as np
import pytest

from library.exceptions import EnsembleTooSmall
from library.scattering import export, filters, statistics, transform
from library.scattering.transform import ScatteringCoeffs


@pytest.fixture(scope="module")
def bank():
    yield filters.build_filter_bank(4, 4, 32)


def _uniform_coeffs(bank, value):
    """Coefficients whose grids all hold ``value``."""
    grid = np.full((2, 2), value)
    return ScatteringCoeffs(
        grid,
        {path: grid for path in bank.order1_paths()},
        {path: grid for path in bank.order2_paths()},
    )


def test_log_coeffs_spot_values(bank):
    """Equal coefficients, the floor rule and the vector length."""
    vector = statistics.log_coeffs(_uniform_coeffs(bank, 2.5))
    assert vector.shape == (112, )
    np.testing.assert_allclose(vector, np.log(2.5))
    floored = statistics.log_coeffs(transform.scatter2d(np.ones((32, 32)), bank))
    np.testing.assert_allclose(floored, np.log(1e-12))


def _two_pass_covariance(vectors):
    mean = sum(vectors) / len(vectors)
    result = np.zeros((len(mean), len(mean)))
    for v in vectors:
        result += np.outer(v - mean, v - mean)
    return result / (len(vectors) - 1)


def test_covariance():
    """Identical, two-member and random ensembles."""
    rng = np.random.default_rng(0)
    identical = np.tile(rng.normal(size=5), (4, 1))
    np.testing.assert_allclose(statistics.covariance(identical), 0.0, atol=1e-14)
    pair = rng.normal(size=(2, 5))
    assert np.linalg.matrix_rank(statistics.covariance(pair), tol=1e-10) <= 1
    vectors = list(rng.normal(size=(20, 6)))
    np.testing.assert_allclose(
        statistics.covariance(vectors), _two_pass_covariance(vectors), atol=1e-10
    )
    eigvals = np.linalg.eigvalsh(statistics.covariance(vectors))
    assert eigvals.min() >= -1e-8 * eigvals.sum()
    with pytest.raises(EnsembleTooSmall):
        statistics.covariance(rng.normal(size=(1, 5)))


def test_precision():
    """Identical samples and a Monte-Carlo expectation."""
    rng = np.random.default_rng(1)
    assert statistics.precision(np.ones((5, 3))) == 0.0
    d, sigma = 40, 0.5
    mean = rng.normal(size=d)
    samples = mean + sigma * rng.normal(size=(4000, d))
    expected = d * sigma**2 / (d * sigma**2 + mean @ mean)
    assert statistics.precision(samples) == pytest.approx(expected, rel=0.05)
    with pytest.raises(EnsembleTooSmall):
        statistics.precision(np.ones((1, 3)))


def test_separation(subtests):
    """Identity, same-distribution and disjoint-cluster behavior."""
    rng = np.random.default_rng(2)
    with subtests.test(msg="identical deterministic"):
        samples = np.ones((10, 4))
        assert statistics.separation(samples, samples) == 0.0
    with subtests.test(msg="same distribution"):
        mean = rng.normal(size=30)
        first = mean + 0.3 * rng.normal(size=(20000, 30))
        second = mean + 0.3 * rng.normal(size=(20000, 30))
        expected = 2 * statistics.precision(first)
        assert statistics.separation(first, second) == pytest.approx(expected, rel=0.05)
    with subtests.test(msg="disjoint clusters"):
        first = 1.0 + 0.1 * rng.normal(size=(200, 10))
        second = -1.0 + 0.1 * rng.normal(size=(200, 10))
        bound = 2 * max(statistics.precision(first), statistics.precision(second))
        assert statistics.separation(first, second) > bound


def test_ensemble_moments():
    """Mean and unbiased standard deviation per path."""
    mean, std = statistics.ensemble_moments([[1.0, 2.0], [3.0, 2.0]])
    np.testing.assert_allclose(mean, [2.0, 2.0])
    np.testing.assert_allclose(std, [np.sqrt(2.0), 0.0])


def test_coefficient_and_rose_export(tmp_path, bank):
    """CSV dumps carry one row per path."""
    coeffs = transform.scatter2d(np.random.default_rng(3).normal(size=(32, 32)), bank)
    export.write_coefficients_csv(coeffs, bank, tmp_path / "coeffs.csv")
    lines = (tmp_path / "coeffs.csv").read_text().splitlines()
    assert lines[0] == "order,j1,r1,j2,r2,mean,log_mean"
    assert len(lines) == 113
    assert lines[1].startswith("1,0,0,-1,-1,")
    rows = export.rose_rows(coeffs, bank)
    assert rows.shape == (16, 3)
    np.testing.assert_allclose(np.unique(rows[:, 0]), [0.0, 45.0, 90.0, 135.0])
    export.write_rose_csv(coeffs, bank, tmp_path / "rose.csv")
    assert (tmp_path / "rose.csv").read_text().startswith("angle,scale,value")


def test_comparison_band(tmp_path, bank):
    """Entries within three standard deviations are flagged."""
    rng = np.random.default_rng(4)
    ensemble = rng.normal(size=(50, 112))
    synthesized = np.zeros(112)
    synthesized[:10] = 100.0
    fraction = export.write_comparison_csv(
        ensemble, synthesized, bank, tmp_path / "comparison.csv"
    )
    assert fraction == pytest.approx(102 / 112)


def test_comparison_band_uses_ensemble_moments(bank, mocker):
    """The band is built from the ensemble moments; one image has no spread."""
    spy = mocker.spy(statistics, "ensemble_moments")
    ensemble = np.random.default_rng(5).normal(size=(4, 112))
    rows = export.comparison_rows(ensemble, ensemble[0], bank)
    spy.assert_called_once()
    np.testing.assert_allclose(rows[:, 5], ensemble.mean(axis=0))
    np.testing.assert_allclose(rows[:, 6], ensemble.std(axis=0, ddof=1))

    single = export.comparison_rows(ensemble[:1], ensemble[0], bank)
    np.testing.assert_array_equal(single[:, 6], np.zeros(112))
    np.testing.assert_array_equal(single[:, 8], np.ones(112))
