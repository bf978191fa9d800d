import numpy as np
import pytest

from hlo_denoise import fixtures as fx
from hlo_denoise.metrics import NoiseSpec, add_noise


def rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


@pytest.fixture(scope="session")
def sphere():
    return fx.icosphere(3)


@pytest.fixture(scope="session")
def noisy_sphere(sphere):
    return add_noise(sphere, NoiseSpec(0.3, seed=11))


@pytest.fixture
def hexagon_apex():
    """Apex at (0, 0, 1) over six unit-circle neighbors, vertex 0 is the apex."""
    from hlo_denoise import build_mesh

    ang = np.arange(6) * np.pi / 3
    ring = np.stack([np.cos(ang), np.sin(ang), np.zeros(6)], 1)
    pos = np.vstack([[0.0, 0.0, 1.0], ring])
    faces = [[0, 1 + k, 1 + (k + 1) % 6] for k in range(6)]
    return build_mesh(pos, faces)


ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    def emit(number, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}")
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
