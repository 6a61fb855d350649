"""
Test the moving-window traversal and complete part assembly.
"""
import numpy as np
import pytest
from scipy import ndimage

from library import constants
from library.assembly import placement, window
from library.exceptions import WindowTooSmall
from library.gan.bank import bank_from_pores
from library.processing.pore_metrics import PoreMetrics
from library.spatial import model as spatial
from library.surface.surface_map import SurfaceMap, reroll
from library.voxels.volume import Pore

DIMS = (40, 40, 64)
GEOMETRY = spatial.PartGeometry((80.0, 80.0), 64.0, DIMS[2] * constants.VOXEL_SIZE)


def _box(*shape):
    return Pore(np.argwhere(np.ones(shape, bool)))


@pytest.fixture(scope="module")
def bank():
    return bank_from_pores([_box(2, 2, 3), _box(2, 3, 4), _box(3, 3, 2), _box(2, 2, 5)])


@pytest.fixture(scope="module")
def fitted(bank):
    rng = np.random.default_rng(0)
    population = []
    while len(population) < 60:
        x, y = rng.uniform(-1, 1, 2)
        if np.hypot(x, y) > 0.9:
            continue
        metrics = bank.metrics[rng.integers(len(bank))]
        population.append(
            PoreMetrics(
                volume_um3=metrics.volume_um3,
                centroid=(80 + 64 * x, 80 + 64 * y, 0.0),
                eigvals=metrics.eigvals,
                anisotropy=metrics.anisotropy,
                theta_z=metrics.theta_z,
                phi_xy=0.0,
                extent_um=metrics.extent_um,
            )
        )
    return spatial.fit(population, GEOMETRY, n_bins=4)


def _ledger(part):
    return [(e.bank_id, e.location, e.status, e.retries) for e in part.ledger]


def _count(data):
    return ndimage.label(data == constants.PORE, structure=np.ones((3, 3, 3)))[1]


def test_window_geometry():
    moving = window.MovingWindow(64.0, 256.0)
    assert moving.cell_length == 32.0
    assert moving.n_cells == 8
    assert moving.n_windows == 7
    moving.position = 2
    assert (moving.z_0, moving.z_f) == (64.0, 128.0)
    assert moving.cell_range(7) == (224.0, 256.0)
    assert not moving.is_last
    short = window.MovingWindow(512.0, 256.0)
    assert short.n_windows == 1 and short.is_last


def test_window_too_small(fitted, bank):
    with pytest.raises(WindowTooSmall):
        window.traverse(fitted, bank, DIMS, window_dz=3)


def test_windowed_equals_whole(fitted, bank):
    """Traversal order and draws do not depend on the window."""
    windowed = window.traverse(fitted, bank, DIMS, window_dz=16, seed=5)
    whole = window.traverse(fitted, bank, DIMS, window_dz=16, seed=5, windowed=False)
    assert len(windowed.ledger) > 10
    assert _ledger(windowed) == _ledger(whole)
    np.testing.assert_array_equal(windowed.data, whole.data)


def test_part_shorter_than_window(fitted, bank):
    single = window.traverse(fitted, bank, DIMS, window_dz=200, seed=2)
    whole = window.traverse(fitted, bank, DIMS, window_dz=200, seed=2, windowed=False)
    assert _ledger(single) == _ledger(whole)


def test_every_placed_pore_is_one_component(fitted, bank):
    part = window.traverse(fitted, bank, DIMS, window_dz=16, seed=1)
    placed = part.pores()
    assert _count(part.data) == len(placed)
    assert sum(len(e.voxels) for e in placed) == np.count_nonzero(part.data == constants.PORE)
    for entry in placed:
        assert np.all(part.data[tuple(entry.voxels.T)] == constants.PORE)


def test_seed_changes_ledger(fitted, bank):
    first = window.traverse(fitted, bank, DIMS, window_dz=16, seed=1)
    second = window.traverse(fitted, bank, DIMS, window_dz=16, seed=2)
    assert _ledger(first) != _ledger(second)


def test_retry_exhaustion_skips(fitted, bank, caplog):
    """A full part leaves nothing placed and every pore skipped."""
    crowded = window.traverse(fitted, bank, DIMS, window_dz=16, seed=3, retries=0)
    full = placement.PartRealization(np.full(DIMS, constants.PORE, dtype=np.uint8))
    part = window.traverse(fitted, bank, DIMS, window_dz=16, seed=3, retries=2, part=full)
    assert len(part.ledger) == len(crowded.ledger)
    assert all(entry.status == "skipped" for entry in part.ledger)
    assert all(entry.retries == 2 for entry in part.ledger)
    assert np.all(part.data == constants.PORE)
    assert "Skipped pore" in caplog.text


def test_grid_dims():
    surface = SurfaceMap(np.zeros((64, 32)), 56.0, 4.0, np.full((64, 2), 80.0))
    assert window.grid_dims(surface) == (36, 36, 64)


def test_assemble_part(fitted, bank):
    surface = SurfaceMap(np.zeros((64, 32)), 56.0, 4.0, np.full((64, 2), 80.0))
    part = window.assemble_part(fitted, bank, surface, window_dz=16, seed=4)
    mask = reroll(surface, part.dims, constants.VOXEL_SIZE).part_mask
    assert part.surface is surface
    assert np.all(part.data[~mask] == constants.EXTERIOR)
    assert not np.any(part.data[mask] == constants.EXTERIOR)
    assert _count(part.data) == len(part.pores())
    statuses = {entry.status for entry in part.ledger}
    assert statuses <= {"placed", "clipped", "dissolved", "removed", "skipped"}
