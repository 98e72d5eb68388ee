import numpy as np
import pytest

from bolab import Field, SpectralGrid


@pytest.fixture
def grid():
    return SpectralGrid(4096, 128.0)


@pytest.fixture
def small_grid():
    return SpectralGrid(512, 32.0)


def random_band_limited(grid, rng, n_modes=200, zero_mean=True, scale=1.0):
    """Random real field with spectrum confined to the lowest n_modes.

    Keeps the Nyquist mode empty so odd-symbol identities hold exactly.
    """
    n_modes = min(n_modes, grid.n_points // 4)
    spec = np.zeros(grid.n_points, dtype=complex)
    j = np.arange(1, n_modes + 1)
    amp = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)
    amp *= np.exp(-5.0 * j / n_modes)
    spec[j] = amp
    spec[-j] = np.conj(amp)
    if not zero_mean:
        spec[0] = rng.standard_normal() * grid.n_points / 4
    values = np.fft.ifft(spec).real
    peak = np.max(np.abs(values))
    return Field(grid, scale * values / peak if peak > 0 else values)


def smooth_compact(grid, rng, width=25.0, n_waves=5, scale=0.4):
    """Random smooth datum under a Gaussian envelope, mean removed."""
    env = np.exp(-(grid.x**2) / width)
    vals = env * sum(
        a * np.cos(0.3 * (i + 1) * grid.x + p)
        for i, (a, p) in enumerate(
            zip(rng.standard_normal(n_waves), rng.uniform(0, 2 * np.pi, n_waves))
        )
    )
    peak = np.max(np.abs(vals))
    vals = scale * vals / peak
    return Field(grid, vals - vals.mean(), mean=0.0)


def rel_l2(a: Field, b: Field) -> float:
    num = np.sqrt(a.grid.dx * np.sum((a.values - b.values) ** 2))
    den = np.sqrt(a.grid.dx * np.sum(b.values**2))
    return float(num / den) if den > 0 else float(num)


def moment_free_bump(grid, width=8.0):
    """Even datum with exactly zero mass and (by symmetry) zero moment."""
    env = np.exp(-(grid.x**2) / width)
    center = (grid.dx * np.sum(grid.x**2 * env)) / (grid.dx * np.sum(env))
    vals = (grid.x**2 - center) * env
    vals = vals - vals.mean()
    return Field(grid, vals / np.max(np.abs(vals)))
