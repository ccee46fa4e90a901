"""Acceptance criteria 1 to 13, one test each.

Every test prints a single ``PASS criterion N`` or ``FAIL criterion N`` line
with the measured numbers, and the same lines are repeated in the pytest
terminal summary.
"""

import math
import shutil

import numpy as np

from fraclift.distfield import (Grid, complement_distance_identity, distance_transform, lipschitz_constant,
                                regularized_distance)
from fraclift.lift import (empty_interior_check, extract_lifted_boundary, hausdorff_distance,
                           lift_open_set, slice_t_zero)
from fraclift.ops import (CircleSpec, SymbolSpec, cauchy_integral_surface, cauchy_projection_curve,
                          fourier_projection, fredholm_index, hardy_projection_surface, icosphere,
                          idempotence_defect, sample_closed_curve, surface_from_mesh, toeplitz_curve)
from fraclift.ops.quaternion import Quaternion
from fraclift.region import boundary_samples, cantor_complement, contains_points
from fraclift.scene import run_scene
from fraclift.topo import (box_counting_dimension, euler_characteristic, label_components,
                           lifted_component_bijection, mesh_component_count)

from conftest import SCENES_DIR, annulus, catalog, disk, interval, record_criterion

CATALOG = catalog()
CANTOR_RES = 4096  # h = 3/4096 resolves every depth-5 gap by at least 5 nodes


def _field(U, res):
    g = Grid.for_region(U, res)
    return g, distance_transform(g, U)


def _check(number, ok, detail):
    record_criterion(number, bool(ok), detail)
    assert ok, detail


def test_criterion_01_lipschitz():
    worst = {}
    for name, U in CATALOG.items():
        _, d = _field(U, 256 if U.dimension == 2 else CANTOR_RES)
        worst[name] = lipschitz_constant(d)
    name = max(worst, key=worst.get)
    _check(1, worst[name] <= 1 + 1e-9,
           f"max Lipschitz constant {worst[name]:.12f} ({name}) over {len(worst)} regions, bound 1 + 1e-9")


def test_criterion_02_distance_identities():
    ratios = {}
    for name, U in CATALOG.items():
        g, d = _field(U, 256)
        ratios[name] = complement_distance_identity(d, U, 200, seed=2) / g.h
    name = max(ratios, key=ratios.get)
    _check(2, ratios[name] <= 2, f"max deviation {ratios[name]:.3f} h ({name}) at resolution 256, bound 2 h")


def test_criterion_03_component_bijection():
    rows = []
    ok = True
    for k in range(1, 6):
        U = cantor_complement(k)
        g, d = _field(U, CANTOR_RES)
        inside = contains_points(U, g.nodes()).reshape(g.shape)
        ind = lift_open_set(U, d)
        lu, ll = label_components(inside), label_components(ind.occupancy)
        try:
            bij = len(lifted_component_bijection(lu, ll, ind)) == 2**k - 1
        except Exception:  # NonBijectiveError
            bij = False
        ok &= lu.component_count == ll.component_count == 2**k - 1 and bij
        rows.append(f"k={k}: {lu.component_count}/{ll.component_count}{'' if bij else ' (no bijection)'}")
    _check(3, ok, "components U/lifted " + ", ".join(rows))


def test_criterion_04_cantor_connectivity():
    counts = {}
    for k in range(1, 8):
        U = cantor_complement(k)
        _, d = _field(U, CANTOR_RES)
        counts[k] = mesh_component_count(extract_lifted_boundary(d, U))
    U2 = CATALOG["two_intervals"]
    _, d2 = _field(U2, 1024)
    control = mesh_component_count(extract_lifted_boundary(d2, U2))
    ok = all(c == 1 for c in counts.values()) and control == 2
    _check(4, ok, f"mesh components for depths 1..7: {list(counts.values())}, two-interval control: {control}")


def test_criterion_05_t_zero_slice():
    ratios = {}
    for name, U in CATALOG.items():
        g, d = _field(U, 256)
        sl = slice_t_zero(extract_lifted_boundary(d, U)).points[:, :-1]
        E = boundary_samples(U, g.h / 16).points
        ratios[name] = hausdorff_distance(sl, E) / g.h
    name = max(ratios, key=ratios.get)
    _check(5, ratios[name] <= 1, f"max Hausdorff(slice, E) {ratios[name]:.3f} h ({name}) at resolution 256, bound h")


def test_criterion_06_dimension_shift():
    U = cantor_complement(7)
    scales = [3.0**-k for k in range(1, 8)]
    fe = box_counting_dimension(boundary_samples(U, scales[-1] / 4), scales, origin=[0.0])
    _, d = _field(U, CANTOR_RES)
    fm = box_counting_dimension(extract_lifted_boundary(d, U), scales, origin=[0.0, 0.0])
    target = math.log(2) / math.log(3)
    ok = abs(fe.slope - target) <= 0.03 and abs(fm.slope - 1.0) <= 0.05
    _check(6, ok, f"slope(E) {fe.slope:.4f} (target {target:.4f} +/- 0.03), "
                  f"slope(lifted) {fm.slope:.4f} (target 1.00 +/- 0.05)")


def test_criterion_07_doubling_topology():
    chi = {}
    for name, U in (("disk", disk()), ("annulus", annulus())):
        for res in (64, 128):
            _, d = _field(U, res)
            chi[(name, res)] = euler_characteristic(extract_lifted_boundary(d, U))
    ok = chi[("disk", 64)] == chi[("disk", 128)] == 2 and chi[("annulus", 64)] == chi[("annulus", 128)] == 0
    _check(7, ok, "chi " + ", ".join(f"{n}@{r}={c}" for (n, r), c in chi.items()))


def test_criterion_08_regularization():
    worst = 0.0
    for U in CATALOG.values():
        _, d = _field(U, 256 if U.dimension == 2 else CANTOR_RES)
        for eps in (0.1, 0.2):
            rho = regularized_distance(d, eps).values
            lo = (1 - eps) * d.values - rho
            hi = rho - (1 + eps) * d.values
            worst = max(worst, float(lo.max()), float(hi.max()))
    _check(8, worst <= 1e-12, f"largest excursion outside [(1-eps)d, (1+eps)d] is {worst:.2e} "
                              f"for eps in (0.1, 0.2) over all regions")


def test_criterion_09_hardy_projection():
    c = sample_closed_curve(CircleSpec(), 256)
    P = cauchy_projection_curve(c).entries
    idem = float(np.linalg.norm(P @ P - P, 2))
    four = float(np.linalg.norm(P - fourier_projection(256), 2))
    defects = []
    for s in (2, 3):
        S = surface_from_mesh(icosphere(s))
        defects.append(idempotence_defect(hardy_projection_surface(S), S))
    ratio = defects[1] / defects[0]
    ok = idem <= 1e-6 and four <= 1e-6 and ratio <= 0.6
    _check(9, ok, f"circle |P^2-P| {idem:.1e}, |P-Fourier| {four:.1e}; sphere defect "
                  f"{defects[0]:.4f} -> {defects[1]:.4f} at 320 -> 1280 triangles (ratio {ratio:.3f}, bound 0.6)")


def test_criterion_10_toeplitz_index():
    c = sample_closed_curve(CircleSpec(), 256)
    parts, ok = [], True
    for k in (-2, -1, 0, 1, 2):
        r = fredholm_index(toeplitz_curve(c, SymbolSpec(winding_exponent=k)))
        ok &= r.index == -k and r.gap_ratio >= 10
        parts.append(f"k={k}: {r.index} (gap {r.gap_ratio:.1e})")
    U = interval(0, 1)
    _, d = _field(U, 512)
    mesh = extract_lifted_boundary(d, U, height=regularized_distance(d, 0.2))
    r = fredholm_index(toeplitz_curve(sample_closed_curve(mesh, 256), SymbolSpec(winding_exponent=2)), tol="auto")
    ok &= r.index == -2 and r.gap_ratio >= 10
    parts.append(f"lifted rhombus k=2: {r.index} (gap {r.gap_ratio:.1f})")
    _check(10, ok, "index " + ", ".join(parts))


def test_criterion_11_quaternionic_reproduction():
    S = surface_from_mesh(icosphere(4))
    q = cauchy_integral_surface(S, Quaternion(1), (0, 0, 0)).as_array()
    err = float(np.max(np.abs(q - [1, 0, 0, 0])))
    ext = cauchy_integral_surface(S, Quaternion(1), (10, 0, 0)).norm()
    ok = err <= 0.02 and ext <= 1e-2
    _check(11, ok, f"{S.n} triangles: origin value {np.round(q, 6).tolist()} (max error {err:.2e}, bound 0.02), "
                   f"exterior norm {ext:.1e} (bound 1e-2)")


def test_criterion_12_empty_interior():
    parts, ok = [], True
    for name, U, res in (("rhombus", interval(0, 1), (1024, 2048)), ("disk", disk(), (128, 256))):
        f = []
        for r in res:
            _, d = _field(U, r)
            f.append(empty_interior_check(lift_open_set(U, d)))
        ratio = f[1] / f[0]
        ok &= 0.35 <= ratio <= 0.65
        parts.append(f"{name} {f[0]:.5f} -> {f[1]:.5f} (ratio {ratio:.3f})")
    _check(12, ok, "boundary-node fraction " + "; ".join(parts) + "; allowed ratio 0.5 +/- 30%")


def test_criterion_13_determinism(tmp_path):
    scene = SCENES_DIR / "disk.yaml"
    codes = [run_scene(scene, str(tmp_path / o)) for o in ("a", "b")]
    same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
               for n in ("report.json", "manifest.json"))
    shutil.rmtree(tmp_path / "a")
    _check(13, same and codes == [0, 0], f"report.json and manifest.json byte-identical across two runs: {same}, "
                                         f"exit codes {codes}")
