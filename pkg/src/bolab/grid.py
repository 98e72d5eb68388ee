"""Uniform periodic grid, real-space fields, and Fourier bookkeeping.

The whole laboratory lives on a grid of ``n`` (a power of two) points
covering ``[-L, L)``.  Wavenumbers are ``k_j = pi*j/L`` for
``j = -n/2, ..., n/2 - 1`` in FFT storage order.

Transform normalization: coefficients approximate the line integral
``fhat(k) = int f(x) exp(-i k x) dx`` (rectangle quadrature at the grid
points, including the phase for the ``x = -L`` origin of the FFT input).
With this convention the discrete L2 norm ``sqrt(dx * sum u**2)`` equals
the coefficient norm taken with measure ``dk / (2*pi)``, and
``xi``-derivatives of coefficients are transforms of ``(-i x) u``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralGrid",
    "Field",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic grid on [-L, L) with its wavenumber lattice.

    Immutable after construction; safe to share between threads and runs.
    """

    n_points: int
    half_length: float

    def __post_init__(self):
        if self.n_points < 8 or not _is_power_of_two(self.n_points):
            raise ValueError(f"n_points must be a power of two >= 8, got {self.n_points}")
        if not (self.half_length > 0):
            raise ValueError(f"half_length must be positive, got {self.half_length}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n_points

    @property
    def x(self) -> np.ndarray:
        n, L = self.n_points, self.half_length
        return -L + self.dx * np.arange(n)

    @property
    def wavenumbers(self) -> np.ndarray:
        """k_j = pi*j/L in FFT storage order; the j = -n/2 mode is unpaired."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @property
    def wavenumbers_odd(self) -> np.ndarray:
        """Wavenumbers with the Nyquist entry zeroed.

        Odd symbols (sgn k, odd powers of ik, the phase k|k|) are evaluated
        on this lattice: the unpaired Nyquist mode has no well-defined odd
        symbol, so odd operators annihilate (or freeze) it and outputs stay
        real.
        """
        k = self.wavenumbers.copy()
        k[self.n_points // 2] = 0.0
        return k

    @property
    def mode_index(self) -> np.ndarray:
        """Integer mode numbers j in FFT storage order."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points)

    def dealias_mask(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        """Boolean mask keeping |k| <= fraction * k_nyquist (a projection)."""
        if not (0.0 < fraction <= 1.0):
            raise ValueError(f"dealias fraction must lie in (0, 1], got {fraction}")
        k = self.wavenumbers
        k_max = np.pi * (self.n_points // 2) / self.half_length
        return np.abs(k) <= fraction * k_max + 1e-12 * k_max

    def __eq__(self, other):
        return (
            isinstance(other, SpectralGrid)
            and self.n_points == other.n_points
            and self.half_length == other.half_length
        )

    def __hash__(self):
        return hash((self.n_points, self.half_length))


@dataclass(frozen=True)
class Field:
    """Real-space sample vector bound to a grid; the discrete stand-in for u.

    The mean (the uhat(0) proxy) is cached at construction.  Constructors
    that know the algebraic mean exactly (e.g. the zero-mean projection)
    may pass it to avoid re-summation round-off; it must agree with the
    arithmetic average to 1e-12.
    """

    grid: SpectralGrid
    values: np.ndarray
    mean: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {values.shape} does not match grid ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must all be finite")
        object.__setattr__(self, "values", values)
        average = float(values.mean())
        if self.mean is None:
            object.__setattr__(self, "mean", average)
        elif abs(self.mean - average) > 1e-12:
            raise ValueError(
                f"declared mean {self.mean} is not the arithmetic average {average}"
            )

    @classmethod
    def from_function(cls, grid: SpectralGrid, fn) -> "Field":
        return cls(grid, np.asarray(fn(grid.x), dtype=float))

    @classmethod
    def zero(cls, grid: SpectralGrid) -> "Field":
        return cls(grid, np.zeros(grid.n_points))

    def l2_norm(self) -> float:
        """Discrete L2 norm sqrt(dx * sum u_i**2)."""
        return float(np.sqrt(self.grid.dx * np.sum(self.values**2)))

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a real field, in FFT storage order.

    Coefficients approximate fhat(k_j) = int f exp(-i k_j x) dx, so they are
    Hermitian-symmetric for real preimages.
    """

    grid: SpectralGrid
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex)
        if coeffs.shape != (self.grid.n_points,):
            raise ValueError("coefficient length must equal grid.n_points")
        object.__setattr__(self, "coefficients", coeffs)

    def hermitian_defect(self) -> float:
        """Max |c(-j) - conj(c(j))| over paired modes, relative to max |c|."""
        c = self.coefficients
        n = self.grid.n_points
        j = np.arange(1, n // 2)
        defect = np.max(np.abs(c[-j] - np.conj(c[j]))) if n > 2 else 0.0
        scale = np.max(np.abs(c))
        return float(defect / scale) if scale > 0 else 0.0

    def l2_norm(self) -> float:
        """Coefficient norm with measure dk/(2*pi); equals the field L2 norm."""
        return float(
            np.sqrt(np.sum(np.abs(self.coefficients) ** 2) / (2.0 * self.grid.half_length))
        )


def _origin_phase(grid: SpectralGrid) -> np.ndarray:
    # exp(i k_j L) = (-1)**j compensates the FFT's x=0 origin vs our x=-L.
    return (-1.0) ** grid.mode_index


def forward_transform(f: Field) -> SpectralField:
    """Discrete Fourier coefficients of a real field (continuum-normalized)."""
    ph = _origin_phase(f.grid)
    coeffs = f.grid.dx * ph * np.fft.fft(f.values)
    return SpectralField(f.grid, coeffs)


def inverse_transform(sf: SpectralField) -> Field:
    """Back to real space; the imaginary residue of round-off is dropped."""
    ph = _origin_phase(sf.grid)
    values = np.fft.ifft(sf.coefficients * ph) / sf.grid.dx
    return Field(sf.grid, values.real)
