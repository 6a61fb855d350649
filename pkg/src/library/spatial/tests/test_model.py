"""
Test fitting and sampling of the binned spatial model.
"""
import numpy as np
import pytest
from scipy import stats

from library.exceptions import ConfigError, NoPores
from library.processing.pore_metrics import PoreMetrics
from library.processing.statistics import ks_distance
from library.spatial import model
from library.surface.surface_map import SurfaceMap

GEOMETRY = model.PartGeometry((500.0, 500.0), 400.0, 2000.0)


def _metrics(x, y, volume=1000.0, anisotropy=0.3, theta_z=45.0):
    return PoreMetrics(
        volume_um3=volume,
        centroid=(x, y, 100.0),
        eigvals=(1.0, 2.0, 3.0),
        anisotropy=anisotropy,
        theta_z=theta_z,
        phi_xy=0.0,
        extent_um=20.0,
    )


def _disk_points(n, rng, gradient=0.0):
    """Points inside the nominal circle with areal density 1 + g r / R."""
    points = []
    while len(points) < n:
        x, y = rng.uniform(-1, 1, 2)
        r = np.hypot(x, y)
        if r <= 1 and rng.uniform(0, 1 + gradient) <= 1 + gradient * r:
            points.append((x, y))
    points = np.array(points)
    return GEOMETRY.center + GEOMETRY.radius * points


@pytest.fixture
def population():
    rng = np.random.default_rng(0)
    points = _disk_points(2000, rng)
    volumes = rng.lognormal(7.0, 0.5, len(points))
    return [
        _metrics(x, y, v, rng.uniform(0, 0.8), rng.uniform(0, 90))
        for (x, y), v in zip(points, volumes)
    ]


def test_fit_errors():
    with pytest.raises(NoPores):
        model.fit([], GEOMETRY)
    with pytest.raises(ConfigError):
        model.fit([_metrics(500, 500)], GEOMETRY, n_bins=0)


def test_rates_sum_to_count(population):
    fitted = model.fit(population, GEOMETRY, n_bins=7)
    assert np.sum(fitted.rates * GEOMETRY.length) == pytest.approx(len(population))
    for arrays in fitted.samples.values():
        assert all(np.all(np.diff(a) >= 0) for a in arrays)


def test_single_bin_reproduces_marginals(population):
    """With one bin, sampled properties follow the global distribution."""
    fitted = model.fit(population, GEOMETRY, n_bins=1)
    assert fitted.counts.tolist() == [len(population)]
    rng = np.random.default_rng(1)
    specs = [model.sample_spec(fitted, 0, rng) for _ in range(20000)]
    for k, name in enumerate(model.PROPERTY_NAMES):
        sampled = [s.features()[k] for s in specs]
        truth = [getattr(p, name) for p in population]
        assert ks_distance(sampled, truth) <= 0.05


def test_quadrant_population():
    """Pores in one quadrant leave all other bins empty."""
    rng = np.random.default_rng(2)
    pores = [_metrics(*xy, volume=v) for xy, v in zip(
        rng.uniform(550, 700, (50, 2)), rng.uniform(100, 200, 50)
    )]
    fitted = model.fit(pores, GEOMETRY, n_bins=2)
    assert fitted.counts.tolist() == [0, 0, 0, 50]
    np.testing.assert_array_equal(
        fitted.samples["volume_um3"][0], fitted.global_samples["volume_um3"]
    )
    counts = model.sample_counts(fitted, 1000.0, rng)
    assert counts[:3].tolist() == [0, 0, 0]


def test_radial_density_recovered():
    """Per-bin counts follow the generating density within Poisson error."""
    rng = np.random.default_rng(3)
    gradient = 2.0
    points = _disk_points(20000, rng, gradient)
    fitted = model.fit([_metrics(x, y) for x, y in points], GEOMETRY, n_bins=5)
    side = 1000
    coords = (np.arange(side) + 0.5) / side * 2 - 1
    x, y = np.meshgrid(coords, coords, indexing="ij")
    r = np.hypot(x, y)
    weights = np.where(r <= 1, 1 + gradient * r, 0.0)
    pixel_bins = model.bin_index(
        GEOMETRY.center[0] + GEOMETRY.radius * x,
        GEOMETRY.center[1] + GEOMETRY.radius * y,
        GEOMETRY,
        5,
    )
    expected = np.bincount(pixel_bins.ravel(), weights.ravel(), minlength=25)
    expected *= len(points) / expected.sum()
    reliable = expected > 50
    deviation = np.abs(fitted.counts - expected)[reliable]
    assert np.all(deviation <= 4.5 * np.sqrt(expected[reliable]) + 0.01 * expected[reliable])


def test_sample_counts_mean(population):
    fitted = model.fit(population, GEOMETRY, n_bins=5)
    rng = np.random.default_rng(4)
    dz = 300.0
    totals = np.array([model.sample_counts(fitted, dz, rng).sum() for _ in range(2000)])
    mean = fitted.rates.sum() * dz
    assert abs(totals.mean() - mean) <= 3 * np.sqrt(mean / 2000)
    assert np.all(model.sample_counts(fitted, dz, rng)[fitted.counts == 0] == 0)


def test_inverse_cdf():
    rng = np.random.default_rng(5)
    assert np.all(model.inverse_cdf(np.array([2.5]), rng.uniform(size=10)) == 2.5)
    uniform = model.inverse_cdf(np.array([0.0, 1.0]), rng.uniform(size=10000))
    assert stats.kstest(uniform, "uniform").statistic <= 0.05
    assert model.inverse_cdf(np.array([1.0, 2.0, 4.0]), 0.75) == pytest.approx(3.0)


def test_locations_stay_inside(population, subtests):
    fitted = model.fit(population, GEOMETRY, n_bins=10)
    rng = np.random.default_rng(6)
    with subtests.test(msg="partial bins"):
        for bin_id in range(100):
            if fitted.interior_fraction[bin_id] == 0:
                continue
            x, y, z = model.sample_location(fitted, bin_id, (10.0, 20.0), rng)
            low, high = fitted.bin_bounds(bin_id)
            assert GEOMETRY.contains(x, y)
            assert low[0] <= x <= high[0] and low[1] <= y <= high[1]
            assert 10.0 <= z <= 20.0
    with subtests.test(msg="fallback"):
        assert fitted.interior_fraction[0] == 0
        x, y, _ = model.sample_location(fitted, 0, (0.0, 1.0), rng)
        assert GEOMETRY.contains(x, y)


def test_interior_fraction():
    single = model.fit([_metrics(500, 500)], GEOMETRY, n_bins=1)
    assert single.interior_fraction[0] == pytest.approx(np.pi / 4, abs=0.02)
    fine = model.fit([_metrics(500, 500)], GEOMETRY, n_bins=10)
    area = np.sum(fine.interior_fraction) * fine.bin_width**2
    assert area == pytest.approx(np.pi * GEOMETRY.radius**2, rel=0.02)


def test_constant_bin_and_determinism():
    pores = [_metrics(500, 500, volume=321.0, anisotropy=0.5, theta_z=10.0)] * 3
    fitted = model.fit(pores, GEOMETRY, n_bins=1)
    spec = model.sample_spec(fitted, 0, np.random.default_rng(7), (5.0, 6.0))
    assert spec.features().tolist() == [321.0, 0.5, 10.0]
    assert 5.0 <= spec.location[2] <= 6.0
    first = model.sample_window(fitted, (0.0, 5000.0), np.random.default_rng(8))
    second = model.sample_window(fitted, (0.0, 5000.0), np.random.default_rng(8))
    assert [s.location for s in first] == [s.location for s in second]


def test_model_round_trip(tmp_path, population):
    fitted = model.fit(population, GEOMETRY, n_bins=6)
    model.save_model(fitted, tmp_path / "model.json")
    loaded = model.load_model(tmp_path / "model.json")
    assert loaded.geometry == fitted.geometry
    np.testing.assert_array_equal(loaded.counts, fitted.counts)
    for name in model.PROPERTY_NAMES:
        for a, b in zip(loaded.samples[name], fitted.samples[name]):
            np.testing.assert_array_equal(a, b)
    first = model.sample_spec(fitted, 14, np.random.default_rng(9))
    second = model.sample_spec(loaded, 14, np.random.default_rng(9))
    assert first.location == second.location
    assert first.features().tolist() == second.features().tolist()


def test_density_rasters(population):
    fitted = model.fit(population, GEOMETRY, n_bins=1)
    raster = model.rasterize_density(fitted, 50)
    inside = raster > 0
    assert np.allclose(raster[inside], raster[inside][0])
    assert raster[0, 0] == 0
    assert model.density_l1(raster, raster) == 0
    other = np.zeros_like(raster)
    other[0, 0] = 1.0
    assert model.density_l1(raster, other) == pytest.approx(2.0)


def test_geometry_from_surface():
    surface = SurfaceMap(np.zeros((10, 8)), 150.0, 4.0, np.full((10, 2), 200.0))
    geometry = model.PartGeometry.from_surface(surface)
    assert geometry == model.PartGeometry((200.0, 200.0), 150.0, 40.0)


def test_pool_populations(population):
    shifted = model.PartGeometry((600.0, 450.0), 420.0, 1000.0)
    moved = [
        _metrics(m.centroid[0] + 100.0, m.centroid[1] - 50.0, m.volume_um3)
        for m in population[:10]
    ]
    pooled, geometry = model.pool_populations([(population, GEOMETRY), (moved, shifted)])
    assert len(pooled) == len(population) + 10
    assert geometry == model.PartGeometry((500.0, 500.0), 410.0, 3000.0)
    for original, merged in zip(population[:10], pooled[len(population):]):
        np.testing.assert_allclose(merged.centroid, original.centroid)
    single = model.fit(population, GEOMETRY, n_bins=4)
    both = model.fit(*model.pool_populations([(population, GEOMETRY)] * 2), n_bins=4)
    np.testing.assert_allclose(both.rates, single.rates)
    with pytest.raises(NoPores):
        model.pool_populations([])
