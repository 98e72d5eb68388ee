import numpy as np
import pytest

from bolab import Field, SpectralGrid, forward_transform, inverse_transform
from bolab.storage import load_field, save_field

from conftest import random_band_limited


def test_grid_validation():
    with pytest.raises(ValueError):
        SpectralGrid(6, 10.0)
    with pytest.raises(ValueError):
        SpectralGrid(100, 10.0)  # not a power of two
    with pytest.raises(ValueError):
        SpectralGrid(64, -1.0)


def test_wavenumber_lattice():
    g = SpectralGrid(16, 8.0)
    k = g.wavenumbers
    assert k[0] == 0.0
    assert np.isclose(k[1], np.pi / 8.0)
    # symmetric about zero except the unpaired Nyquist entry
    assert np.allclose(k[1 : 8], -k[-1 : -8 : -1])
    assert np.isclose(k[8], -np.pi * 8 / 8.0)
    assert g.dx == 1.0
    assert g.wavenumbers_odd[8] == 0.0


def test_field_validation(grid):
    with pytest.raises(ValueError):
        Field(grid, np.zeros(17))
    bad = np.zeros(grid.n_points)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        Field(grid, bad)
    with pytest.raises(ValueError):
        Field(grid, np.ones(grid.n_points), mean=0.5)


def test_field_mean_cache(grid):
    rng = np.random.default_rng(0)
    u = Field(grid, rng.standard_normal(grid.n_points))
    assert abs(u.mean - u.values.mean()) < 1e-12


def test_constant_field_transform(grid):
    sf = forward_transform(Field(grid, np.ones(grid.n_points)))
    c = sf.coefficients
    assert abs(c[0] - 2.0 * grid.half_length) < 1e-9
    assert np.max(np.abs(c[1:])) < 1e-9 * abs(c[0])


def test_single_mode_transform(grid):
    u = Field.from_function(grid, lambda x: np.cos(np.pi * x / grid.half_length))
    c = forward_transform(u).coefficients
    mags = np.abs(c)
    assert mags[1] > 1.0 and mags[-1] > 1.0
    mask = np.ones(grid.n_points, dtype=bool)
    mask[[1, -1]] = False
    assert np.max(mags[mask]) < 1e-10 * mags[1]


def test_round_trip_and_parseval(grid):
    rng = np.random.default_rng(1)
    u = Field(grid, rng.standard_normal(grid.n_points))
    sf = forward_transform(u)
    back = inverse_transform(sf)
    assert np.linalg.norm(back.values - u.values) < 1e-10 * np.linalg.norm(u.values)
    assert abs(sf.l2_norm() - u.l2_norm()) < 1e-10 * u.l2_norm()


def test_hermitian_symmetry(grid):
    rng = np.random.default_rng(2)
    sf = forward_transform(Field(grid, rng.standard_normal(grid.n_points)))
    assert sf.hermitian_defect() < 1e-12


def test_field_csv_round_trip(tmp_path, grid):
    rng = np.random.default_rng(3)
    u = random_band_limited(grid, rng)
    path = tmp_path / "field.csv"
    save_field(u, str(path))
    v = load_field(str(path))
    assert v.grid == u.grid
    assert np.array_equal(v.values, u.values)  # %.17g is lossless for float64
    header = path.read_text().splitlines()[0]
    assert header.startswith("# n=4096 L=")
