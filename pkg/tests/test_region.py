from fractions import Fraction

import numpy as np
import pytest

from fraclift.region import (Disk, Interval, RegionError, RegionSpec, boundary_samples, cantor_complement,
                             component_count, contains, contains_points, exact_components, region_from_dict)

from conftest import catalog, interval


def test_interval_membership():
    U = interval(0, 1)
    assert contains(U, 0.5)
    assert not contains(U, 0)
    assert not contains(U, 1)


def test_cantor_membership_is_exact():
    U = cantor_complement(2)
    assert contains(U, 0.5)
    assert contains(U, Fraction(1, 6))          # inside (1/9, 2/9)
    assert not contains(U, Fraction(1, 9))
    assert not contains(U, Fraction(1, 3))
    assert not contains(U, Fraction(1, 4))      # 1/4 is a Cantor point


def test_dimension_mismatch():
    with pytest.raises(RegionError):
        contains(interval(0, 1), (0.5, 0.5))
    with pytest.raises(RegionError):
        RegionSpec(1, (Disk((0, 0), 1),))


def test_boundary_samples_interval_and_cantor():
    assert boundary_samples(interval(0, 1), 0.3).points.ravel().tolist() == [0.0, 1.0]
    pts = boundary_samples(cantor_complement(1), 0.01).points.ravel()
    assert np.allclose(pts, [0, 1 / 3, 2 / 3, 1], atol=0, rtol=0) or np.array_equal(
        pts, np.array([0.0, float(Fraction(1, 3)), float(Fraction(2, 3)), 1.0]))


def test_disk_samples_form_a_net():
    pts = boundary_samples(RegionSpec(2, (Disk((0, 0), 1),)), 0.1).points
    assert len(pts) >= 63
    assert np.allclose(np.linalg.norm(pts, axis=1), 1)
    ang = np.sort(np.arctan2(pts[:, 1], pts[:, 0]))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    assert gaps.max() <= 0.1


@pytest.mark.parametrize("k,expected", [(1, 1), (2, 3), (5, 31)])
def test_cantor_component_count(k, expected):
    assert component_count(cantor_complement(k)) == expected == 2**k - 1


def test_cantor_depth_validation():
    with pytest.raises(RegionError):
        cantor_complement(0)


def test_touching_intervals_stay_separate():
    U = RegionSpec(1, (Interval(0, 1), Interval(1, 2)))
    assert component_count(U) == 2
    assert not contains(U, 1.0)


def test_overlapping_union_is_one_component():
    U = RegionSpec(2, (Disk((0, 0), 1), Disk((1.2, 0), 0.7)))
    assert component_count(U) == 1


@pytest.mark.parametrize("name,U", list(catalog().items()))
def test_boundary_samples_are_outside(name, U):
    pts = boundary_samples(U, 0.05).points
    assert not contains_points(U, pts).any()


def test_union_order_does_not_matter():
    a = RegionSpec(2, (Disk((0, 0), 1), Disk((1.2, 0), 0.7)))
    b = RegionSpec(2, (Disk((1.2, 0), 0.7), Disk((0, 0), 1)))
    pts = np.random.default_rng(1).uniform(-1.5, 2.5, size=(2000, 2))
    assert np.array_equal(contains_points(a, pts), contains_points(b, pts))


def test_region_from_dict_round_trip():
    U = region_from_dict({"dimension": 1, "primitives": [{"type": "cantor_complement", "depth": 3}]})
    assert len(exact_components(U)) == 7
    with pytest.raises(RegionError):
        region_from_dict({"dimension": 1, "primitives": [{"type": "blob"}]})


@pytest.mark.parametrize("name", ["disk", "annulus", "two_disks"])
def test_circle_samples_are_outside_exactly(name):
    U = catalog()[name]
    pts = boundary_samples(U, 0.05).points
    assert not any(contains(U, p) for p in pts)
    radii = np.linalg.norm(pts - np.array([0.0, 0.0]), axis=1)
    if name != "two_disks":
        assert np.all(np.isclose(radii, 1.0, atol=1e-12) | np.isclose(radii, 0.5, atol=1e-12))
