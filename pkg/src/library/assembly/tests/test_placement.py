"""
Test pore matching, overlap-safe placement and the ledger file.
"""
import numpy as np
import pytest
from scipy import ndimage

from library import constants
from library.assembly import placement
from library.exceptions import EmptyBank
from library.gan.bank import PoreBank, bank_from_pores
from library.spatial.model import PoreSpec
from library.voxels.volume import Pore
from typedef import Rejected


def _box(*shape):
    return Pore(np.argwhere(np.ones(shape, bool)))


def _location(origin, pore, voxel_size=constants.VOXEL_SIZE):
    """Centroid location that maps onto the bounding box ``origin``."""
    return tuple((np.asarray(origin) + 0.5 + pore.centroid_offset()) * voxel_size)


def _spec_of(metrics):
    return PoreSpec(metrics.volume_um3, metrics.anisotropy, metrics.theta_z, (0, 0, 0), 0)


@pytest.fixture
def bank():
    return bank_from_pores([_box(2, 2, 3), _box(2, 3, 4), _box(3, 3, 2), _box(2, 2, 6)])


def _count(data):
    return ndimage.label(data == constants.PORE, structure=np.ones((3, 3, 3)))[1]


def test_match_returns_identical_pore(bank):
    for bank_id, metrics in enumerate(bank.metrics):
        assert placement.match_pore(_spec_of(metrics), bank) == bank_id


def test_match_against_brute_force(bank):
    rng = np.random.default_rng(0)
    scale = np.array([30.0, 0.2, 20.0])
    for _ in range(50):
        spec = PoreSpec(rng.uniform(0, 2000), rng.uniform(0, 1), rng.uniform(0, 90), (0, 0, 0), 0)
        best, best_distance = -1, np.inf
        for bank_id, metrics in enumerate(bank.metrics):
            delta = np.array([
                metrics.volume_um3 - spec.volume_um3,
                metrics.anisotropy - spec.anisotropy,
                metrics.theta_z - spec.theta_z,
            ]) / scale
            distance = np.sqrt(np.sum(delta**2))
            if distance < best_distance:
                best, best_distance = bank_id, distance
        assert placement.match_pore(spec, bank, scale) == best


def test_match_edge_cases(bank):
    spec = _spec_of(bank.metrics[0])
    with pytest.raises(EmptyBank):
        placement.match_pore(spec, PoreBank())
    single = bank_from_pores([_box(4, 4, 4)])
    assert placement.match_pore(spec, single) == 0
    twins = bank_from_pores([_box(2, 2, 2), _box(2, 2, 2)])
    assert placement.match_pore(spec, twins) == 0


def test_place_in_empty_solid():
    part = placement.PartRealization.solid((20, 20, 20))
    pore = _box(3, 2, 4)
    outcome = placement.place_pore(part, pore, _location((5, 6, 7), pore))
    assert isinstance(outcome, placement.Placed)
    assert outcome.origin == (5, 6, 7)
    assert _count(part.data) == 1
    assert np.count_nonzero(part.data == constants.PORE) == pore.n_voxels
    np.testing.assert_array_equal(outcome.voxels, pore.voxels + [5, 6, 7])


def test_overlap_is_rejected_and_restored():
    part = placement.PartRealization.solid((20, 20, 20))
    pore = _box(3, 3, 3)
    assert placement.place_pore(part, pore, _location((5, 5, 5), pore))
    before = part.data.copy()
    for origin in ((5, 5, 5), (6, 6, 6), (8, 5, 5)):
        outcome = placement.place_pore(part, pore, _location(origin, pore))
        assert isinstance(outcome, Rejected)
        np.testing.assert_array_equal(part.data, before)


def test_one_voxel_gap_is_accepted():
    """Pores one voxel apart are not 26-connected."""
    part = placement.PartRealization.solid((20, 20, 20))
    pore = _box(2, 2, 2)
    assert placement.place_pore(part, pore, _location((5, 5, 5), pore))
    assert placement.place_pore(part, pore, _location((8, 8, 8), pore))
    assert placement.place_pore(part, pore, _location((5, 8, 5), pore))
    assert _count(part.data) == 3


def test_outside_grid():
    part = placement.PartRealization.solid((10, 10, 10))
    pore = _box(4, 4, 4)
    for origin in ((-1, 0, 0), (7, 0, 0), (0, 0, 8)):
        outcome = placement.place_pore(part, pore, _location(origin, pore))
        assert outcome == Rejected("outside grid")
    assert not np.any(part.data == constants.PORE)


def test_random_placements_follow_flood_fill():
    """Accepted placements add one component; rejected ones change nothing."""
    rng = np.random.default_rng(1)
    part = placement.PartRealization.solid((24, 24, 24))
    shapes = [_box(2, 2, 2), _box(1, 3, 2), Pore(np.argwhere(np.eye(3, dtype=bool)[:, :, None]))]
    accepted = 0
    for _ in range(150):
        pore = shapes[rng.integers(len(shapes))]
        before = part.data.copy()
        count = _count(before)
        outcome = placement.place_pore(part, pore, tuple(rng.uniform(0, 96, 3)))
        if outcome:
            accepted += 1
            assert _count(part.data) == count + 1
        else:
            np.testing.assert_array_equal(part.data, before)
    assert accepted == _count(part.data)
    assert accepted > 10


def test_ledger_csv(tmp_path, bank):
    part = placement.PartRealization.solid((4, 4, 4))
    spec = _spec_of(bank.metrics[0])
    part.ledger.append(placement.LedgerEntry(2, spec, (1.0, 2.5, 3.25), "placed", 3))
    part.ledger.append(placement.LedgerEntry(0, spec, (4.0, 5.0, 6.0), "skipped", 100))
    placement.write_ledger_csv(part, tmp_path / "ledger.csv")
    lines = (tmp_path / "ledger.csv").read_text().splitlines()
    assert lines[0] == "bank_id,x,y,z,status,retries"
    assert lines[1] == "2,1.0000,2.5000,3.2500,placed,3"
    columns = placement.read_ledger_csv(tmp_path / "ledger.csv")
    assert columns["status"].tolist() == ["placed", "skipped"]
    assert columns["retries"].tolist() == [3, 100]
