"""
Test binarization, the plausibility filter and the pore bank.
"""
import types

import numpy as np
import pytest
from scipy import ndimage

from library.exceptions import AcceptanceTooLow
from library.gan import bank
from library.processing import pore_metrics
from library.voxels.volume import Pore
from typedef import Rejected


def _probability_cube(mask):
    """Two-channel cube with pore probability 0.9 inside ``mask``."""
    pore = np.where(mask, 0.9, 0.1)
    return np.stack([pore, 1.0 - pore])


def _ball(side, center, radius):
    grid = np.indices((side, ) * 3)
    return sum((grid[i] - center[i])**2 for i in range(3)) <= radius**2


def test_binarize_empty_cube():
    outcome = bank.binarize_pore(_probability_cube(np.zeros((8, 8, 8), bool)))
    assert isinstance(outcome, Rejected)
    assert outcome.reason == "empty"
    assert not outcome


def test_binarize_keeps_largest_component():
    """A 10-voxel blob wins over a 2-voxel satellite."""
    mask = np.zeros((12, 12, 12), bool)
    mask[3:5, 3:8, 4] = True
    mask[9, 9, 9:11] = True
    pore = bank.binarize_pore(_probability_cube(mask))
    assert isinstance(pore, Pore)
    assert pore.n_voxels == 10
    assert pore.bbox_origin == (3, 3, 4)


def test_binarize_rejects_small():
    mask = np.zeros((8, 8, 8), bool)
    mask[2, 2, 2:7] = True
    outcome = bank.binarize_pore(_probability_cube(mask))
    assert isinstance(outcome, Rejected)
    assert outcome.reason.startswith("too small")


def test_binarize_matches_flood_fill():
    """Random logits agree with thresholding and a 26-connected labeling."""
    rng = np.random.default_rng(0)
    probability = ndimage.uniform_filter(rng.uniform(size=(12, 12, 12)), 3)
    probability = (probability - probability.min()) / np.ptp(probability)
    cube = np.stack([probability, 1 - probability])
    labels, n = ndimage.label(probability > 0.5, structure=np.ones((3, 3, 3)))
    sizes = np.bincount(labels.ravel())[1:]
    expected = np.argwhere(labels == np.argmax(sizes) + 1)
    pore = bank.binarize_pore(cube)
    assert n >= 1
    np.testing.assert_array_equal(
        np.sort(pore.absolute_voxels(), axis=0), np.sort(expected, axis=0)
    )


@pytest.fixture
def population():
    """Measured spherical pores of varying size."""
    pores = []
    for radius in np.linspace(2.0, 4.0, 9):
        mask = _ball(12, (6, 6, 6), radius)
        pores.append(Pore(np.argwhere(mask), (0, 0, 0)))
    return pores


def test_bounds_follow_population_quantiles(population):
    metrics = [pore_metrics.metrics_for(p) for p in population]
    bounds = bank.PlausibilityBounds.from_population(metrics)
    for name in ("volume_um3", "anisotropy", "extent_um"):
        values = [getattr(m, name) for m in metrics]
        expected = tuple(np.quantile(values, [0.001, 0.999]))
        assert getattr(bounds, name) == pytest.approx(expected)


def test_rejection_reasons(population):
    metrics = [pore_metrics.metrics_for(p) for p in population]
    bounds = bank.PlausibilityBounds.from_population(metrics)
    wide = bank.PlausibilityBounds((0.0, 1e12), (0.0, 1.0), (0.0, 1e12))
    middle = population[4]
    inside = Pore(middle.voxels, (2, 2, 2))
    assert bank.rejection_reason(inside, wide, cube_side=16) is None
    assert bank.plausibility_filter(inside, wide, cube_side=16)
    touching = Pore(middle.voxels, (0, 2, 2))
    assert bank.rejection_reason(touching, wide, cube_side=16) == "touches cube face"
    assert not bank.plausibility_filter(touching, wide, cube_side=16)
    big = Pore(np.argwhere(_ball(14, (7, 7, 7), 6.0)), (1, 1, 1))
    assert bank.rejection_reason(big, bounds, cube_side=32).startswith("volume")
    assert bank.rejection_reason(big, None, cube_side=32) is None


def _fake_generate(generator, z):
    """Balls whose radius follows the first latent entry."""
    cubes = []
    for row in z:
        radius = 2.0 + abs(row[0])
        cubes.append(_probability_cube(_ball(16, (8, 8, 8), min(radius, 6.0))))
    return np.stack(cubes)


def test_build_bank(mocker):
    mocker.patch("library.gan.training.generate", side_effect=_fake_generate)
    generator = types.SimpleNamespace(latent=4)
    assert len(bank.build_bank(generator, n=0)) == 0
    first = bank.build_bank(generator, n=10, seed=3, batch_size=4)
    second = bank.build_bank(generator, n=10, seed=3, batch_size=4)
    assert len(first) == 10
    assert first.acceptance_rate == pytest.approx(10 / 12)
    assert [p.label for p in first.pores] == list(range(10))
    for a, b in zip(first.pores, second.pores):
        np.testing.assert_array_equal(a.voxels, b.voxels)
    np.testing.assert_allclose(first.features()[:, 0], [m.volume_um3 for m in first.metrics])


def test_build_bank_acceptance_too_low(mocker):
    mocker.patch(
        "library.gan.training.generate",
        side_effect=lambda generator, z: np.stack(
            [_probability_cube(np.zeros((8, 8, 8), bool)) for _ in z]
        ),
    )
    with pytest.raises(AcceptanceTooLow):
        bank.build_bank(types.SimpleNamespace(latent=4), n=2, batch_size=8)


def test_bank_round_trip(tmp_path, population):
    original = bank.bank_from_pores(population[:3])
    bank.save_bank(original, tmp_path / "bank")
    loaded = bank.load_bank(tmp_path / "bank")
    assert len(loaded) == 3
    assert loaded.provenance == "ground-truth"
    for a, b in zip(original.pores, loaded.pores):
        np.testing.assert_array_equal(np.sort(a.voxels, axis=0), np.sort(b.voxels, axis=0))
    np.testing.assert_allclose(loaded.features(), original.features(), rtol=1e-8)
