from pathlib import Path

import pytest

from fraclift.region import Annulus, Box, Disk, Interval, RegionSpec, cantor_complement


def interval(a, b):
    return RegionSpec(1, (Interval(a, b),))


def disk(r=1.0, center=(0.0, 0.0)):
    return RegionSpec(2, (Disk(center, r),))


def annulus(r_in=0.5, r_out=1.0, center=(0.0, 0.0)):
    return RegionSpec(2, (Annulus(center, r_in, r_out),))


def two_disks():
    return RegionSpec(2, (Disk((0.0, 0.0), 1.0), Disk((2.5, 0.0), 1.0)))


def catalog():
    """Every region family exercised by the property tests."""
    regs = {
        "interval": interval(-1, 1),
        "two_intervals": RegionSpec(1, (Interval(0, 1), Interval(2, 3))),
        "touching_intervals": RegionSpec(1, (Interval(0, 1), Interval(1, 2))),
        "disk": disk(),
        "annulus": annulus(),
        "two_disks": two_disks(),
        "box": RegionSpec(2, (Box((0.0, 0.0), (1.0, 2.0)),)),
    }
    for k in range(1, 8):
        regs[f"cantor{k}"] = cantor_complement(k)
    return regs


@pytest.fixture
def regions():
    return catalog()


_CRITERIA: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Print one PASS/FAIL line and keep it for the end-of-run summary."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    _CRITERIA[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])


SCENES_DIR = Path(__file__).resolve().parents[1] / "scenes"
