import math

import numpy as np
import pytest
from scipy.integrate import quad

from fraclift.distfield import Grid, GridError, distance_transform, regularized_distance
from fraclift.lift import (embed_t_zero, empty_interior_check, extract_lifted_boundary, hausdorff_distance,
                           lift_open_set, slice_t_zero)
from fraclift.region import boundary_samples, cantor_complement

from conftest import annulus, catalog, disk, interval


def _lift(U, res, **kw):
    g = Grid.for_region(U, res)
    d = distance_transform(g, U)
    return g, d, lift_open_set(U, d, **kw)


def test_rhombus_area():
    g, d, ind = _lift(interval(-1, 1), 256)
    # the lifted set is the square |x| + |t| < 1 of area 2
    assert ind.occupied_measure() == pytest.approx(2.0, abs=4 * g.h)


def test_rhombus_membership():
    U = interval(-1, 1)
    g = Grid((-2.0,), 4 / 256, 256)
    ind = lift_open_set(U, distance_transform(g, U))
    t = ind.t_values()
    i0 = 128
    assert ind.occupancy[i0, np.argmin(np.abs(t - 0.5))]
    assert ind.occupancy[i0, np.argmin(np.abs(t))]


def test_unit_interval_extremes_are_excluded():
    U = interval(0, 1)
    g = Grid((-0.5,), 2 / 256, 256)
    ind = lift_open_set(U, distance_transform(g, U), t_max=1.0, t_resolution=256)
    t = ind.t_values()
    i = int(np.argmin(np.abs(g.axis(0) - 0.5)))
    top = int(np.argmin(np.abs(t - 0.5)))
    assert t[top] == pytest.approx(0.5)
    assert not ind.occupancy[i, top]
    assert not ind.occupancy[i, 256 - top]
    assert ind.occupancy[i, top - 1]
    # the endpoints of U are never lifted
    for x in (0.0, 1.0):
        assert not ind.occupancy[int(np.argmin(np.abs(g.axis(0) - x)))].any()


def test_disk_volume_against_quadrature():
    vol, _ = quad(lambda r: 2 * (1 - r) * 2 * math.pi * r, 0, 1)
    _, _, ind = _lift(disk(), 256)
    assert ind.occupied_measure() == pytest.approx(vol, rel=0.05)


def test_disk_mesh_area_against_quadrature():
    area, _ = quad(lambda r: 2 * math.sqrt(2) * 2 * math.pi * r, 0, 1)
    _, d, _ = _lift(disk(), 256)
    mesh = extract_lifted_boundary(d, disk())
    assert mesh.total_measure() == pytest.approx(area, rel=0.05)


def test_rhombus_polyline_length():
    U = interval(0, 1)
    g = Grid((-0.5,), 2 / 256, 256)
    mesh = extract_lifted_boundary(distance_transform(g, U), U)
    assert mesh.total_measure() == pytest.approx(2 * math.sqrt(2), abs=1e-9)


@pytest.mark.parametrize("name", ["interval", "two_intervals", "cantor5", "disk", "annulus", "two_disks", "box"])
def test_t_zero_slice_is_the_boundary(name):
    U = catalog()[name]
    g = Grid.for_region(U, 256)
    mesh = extract_lifted_boundary(distance_transform(g, U), U)
    sl = slice_t_zero(mesh).points[:, :-1]
    E = boundary_samples(U, g.h / 16).points
    assert hausdorff_distance(sl, E) <= g.h


def test_embed_t_zero():
    p = embed_t_zero(np.array([[1.0, 2.0]]))
    assert p.tolist() == [[1.0, 2.0, 0.0]]


@pytest.mark.parametrize("U", [interval(-1, 1), disk()], ids=["rhombus", "disk"])
def test_empty_interior_fraction_halves(U):
    res = (128, 256) if U.dimension == 2 else (1024, 2048)
    f = [empty_interior_check(_lift(U, r)[2]) for r in res]
    assert f[1] / f[0] == pytest.approx(0.5, rel=0.3)


def test_t_range_must_cover_height():
    U = disk()
    g = Grid.for_region(U, 32)
    d = distance_transform(g, U)
    with pytest.raises(GridError):
        lift_open_set(U, d, 16, t_max=0.5)
    with pytest.raises(GridError):
        lift_open_set(U, d, 15, t_max=2.0)


def test_regularized_lift_stays_inside_comparability_band():
    U = cantor_complement(3)
    g = Grid.for_region(U, 2048)
    d = distance_transform(g, U)
    rho = regularized_distance(d, 0.2)
    a = lift_open_set(U, d, t_max=0.2, t_resolution=400).occupied_measure()
    b = lift_open_set(U, d, t_max=0.2, t_resolution=400, height=rho).occupied_measure()
    assert 0.8 * a - 1e-3 <= b <= 1.2 * a + 1e-3


def test_annulus_mesh_is_not_empty():
    _, d, _ = _lift(annulus(), 64)
    mesh = extract_lifted_boundary(d, annulus())
    assert len(mesh) > 0 and mesh.cells.shape[1] == 3
