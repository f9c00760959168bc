"""Shared fixtures and signal factories for the test suite."""

import numpy as np
import pytest

import scatlab as sl


def band_signal(grid, lo, hi, seed=None, flat=True):
    """Unit-energy signal supported on lattice frequencies [lo, hi).

    flat=True gives a constant-phase indicator; otherwise seeded random
    phases (still unit energy).
    """
    kk = grid.freq_indices()
    mask = (kk >= lo) & (kk < hi)
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    if flat:
        coeffs[mask] = 1.0
    else:
        rng = np.random.default_rng(seed)
        coeffs[mask] = np.exp(2j * np.pi * rng.uniform(size=int(mask.sum())))
    coeffs /= np.linalg.norm(coeffs)
    return sl.inverse_fourier(sl.SpectralSignal(grid, coeffs))


def carrier_signal(grid, center, halfwidth, seed=0, side_scale=0.05):
    """Unit-energy band signal dominated by a single carrier frequency.

    The modulus spectrum of such a signal decays geometrically away from
    zero, which keeps every nonlinear stage effectively band-limited.
    """
    rng = np.random.default_rng(seed)
    kk = grid.freq_indices()
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    coeffs[kk == center] = 1.0
    side = (np.abs(kk - center) <= halfwidth) & (kk != center)
    m = int(side.sum())
    coeffs[side] = side_scale * (rng.normal(size=m) + 1j * rng.normal(size=m))
    coeffs /= np.linalg.norm(coeffs)
    return sl.inverse_fourier(sl.SpectralSignal(grid, coeffs))


def random_signal(grid, seed=0, real=False):
    rng = np.random.default_rng(seed)
    samples = rng.normal(size=grid.shape)
    if not real:
        samples = samples + 1j * rng.normal(size=grid.shape)
    samples = samples.astype(np.complex128)
    samples /= np.linalg.norm(samples)
    return sl.Signal(grid, samples)


@pytest.fixture(scope="session")
def grid_256():
    return sl.Grid(d=1, n=256, L=1.0)


@pytest.fixture(scope="session")
def grid_1024():
    return sl.Grid(d=1, n=1024, L=1.0)


@pytest.fixture(scope="session")
def grid_4096():
    return sl.Grid(d=1, n=4096, L=1.0)


@pytest.fixture(scope="session")
def shannon_1024(grid_1024):
    return sl.build_shannon_1d(grid_1024, 1, 9)


@pytest.fixture(scope="session")
def shannon_4096(grid_4096):
    return sl.build_shannon_1d(grid_4096, 1, 11)


@pytest.fixture(scope="session")
def meyer_1024(grid_1024):
    return sl.build_meyer_1d(grid_1024, 1, 7)


@pytest.fixture(scope="session")
def ufc_1024(grid_1024):
    window = sl.indicator_window(grid_1024, 16)
    return sl.build_ufc_bank(grid_1024, window, D_target=8.0)


@pytest.fixture(scope="session")
def directional_64():
    grid = sl.Grid(d=2, n=64, L=1.0)
    return sl.build_directional_2d(grid, a=2.0, n_rotations=8, J=0)
