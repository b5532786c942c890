"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from horocover.cover import CoverPoint, ZdCover
from horocover.geometry import IsometryMatrix, octagon_group, sample_domain_frames
from horocover.twist import BaseBump, CoverObservable

SMALL_CONFIG = """\
# small run for tests
seed = 5
projection = d1
lengths = 100 1000
times = 6 8
points = 2
check_samples = 20
drift_steps = 50
sigma_samples = 1000
clt_samples = 400
clt_seeds = 2
ulam_cells = 16
ulam_samples = 32
omega_points = 5
jacobi_samplers = 20
tau_lengths = 0.5 1
tau_times = 0.5 1
twist_samples = 1
"""


@pytest.fixture
def group():
    """The shared regular-octagon surface group."""
    return octagon_group()


@pytest.fixture
def cover_d1(group):
    """Z-cover unwinding a1."""
    return ZdCover.from_preset("d1", group)


@pytest.fixture
def cover_d2(group):
    """Z²-cover unwinding a1 and a2."""
    return ZdCover.from_preset("d2", group)


@pytest.fixture
def rng():
    """Seeded generator; tests must not depend on global numpy state."""
    return np.random.default_rng(42)


@pytest.fixture
def domain_frames(rng, group):
    """Twenty volume-random frames in the fundamental domain."""
    return sample_domain_frames(rng, 20, group)


@pytest.fixture
def start_point(domain_frames):
    """A volume-random point of the base copy of the Z-cover."""
    return CoverPoint.at(IsometryMatrix.from_array(domain_frames[0]), 1)


@pytest.fixture
def bump():
    """Default bump at the domain center, constant along fibers."""
    return BaseBump(0j, 0.5)


@pytest.fixture
def observable(bump):
    """Bump on the base tile of the Z-cover."""
    return CoverObservable.single(bump, 1)


@pytest.fixture
def observable_d2(bump):
    """Two weighted copies on neighbouring tiles of the Z²-cover."""
    return CoverObservable(((0, 0), (1, 0)), (1.0, 0.5), bump)


@pytest.fixture
def config_text():
    """Config text with small sample counts."""
    return SMALL_CONFIG


@pytest.fixture
def config_file(tmp_path, config_text):
    """Config text written to a file, with outputs under tmp_path."""
    path = tmp_path / "test.conf"
    path.write_text(config_text + f"output = {tmp_path / 'results'}\n", encoding="utf-8")
    return path
