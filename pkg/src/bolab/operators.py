"""Fourier multiplier operators: Hilbert transform, fractional and Bessel
derivatives, the free dispersive propagator, and commutators built from them.

Conventions (fixed across the package):

* Hilbert transform symbol is ``-i * sgn(k)`` with ``sgn(0) = 0``, so the
  mean is annihilated and ``H(const) = 0``.
* Odd symbols are evaluated with the Nyquist wavenumber zeroed (the
  unpaired mode has no well-defined odd symbol); outputs stay real.  For
  the propagator this freezes the Nyquist mode, which keeps the group law
  and unitarity exact on every field.
* ``D^s`` multiplies by ``|k|**s``; for ``s > 0`` it kills the mean, and
  ``D^0`` is the identity (mean untouched).

All operators are pure functions and linear in the field argument.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, SpectralGrid

__all__ = [
    "apply_multiplier",
    "hilbert_transform",
    "fractional_derivative",
    "bessel_potential",
    "spatial_derivative",
    "linear_propagator",
    "propagated_position",
    "hilbert_commutator",
    "half_derivative_commutator",
]


def apply_multiplier(f: Field, multiplier: np.ndarray) -> Field:
    """ifft(multiplier * fft(values)).real as a new field."""
    out = np.fft.ifft(multiplier * np.fft.fft(f.values)).real
    return Field(f.grid, out)


def hilbert_transform(f: Field) -> Field:
    """Singular-integral Hilbert transform as the multiplier -i*sgn(k)."""
    m = -1j * np.sign(f.grid.wavenumbers_odd)
    return apply_multiplier(f, m)


def fractional_derivative(f: Field, s: float) -> Field:
    """|k|**s multiplier; equals (H d/dx)**s on mean-free fields."""
    if s < 0:
        raise ValueError(f"fractional order must be >= 0, got {s}")
    if s == 0:
        return Field(f.grid, f.values.copy())
    k = np.abs(f.grid.wavenumbers)
    m = np.zeros_like(k)
    nz = k > 0
    m[nz] = k[nz] ** s
    return apply_multiplier(f, m)


def bessel_potential(f: Field, s: float) -> Field:
    """(1 + k**2)**(s/2) multiplier; J^s J^-s is the identity."""
    k = f.grid.wavenumbers
    return apply_multiplier(f, (1.0 + k**2) ** (s / 2.0))


def spatial_derivative(f: Field, order: int) -> Field:
    """(ik)**order multiplier; odd orders zero the Nyquist mode."""
    if order < 1 or int(order) != order:
        raise ValueError(f"derivative order must be a positive integer, got {order}")
    k = f.grid.wavenumbers_odd if order % 2 else f.grid.wavenumbers
    return apply_multiplier(f, (1j * k) ** order)


def linear_propagator(f: Field, t: float) -> Field:
    """Free dispersive flow: multiplies mode k by exp(-i t k |k|).

    Unitary, satisfies the group law exactly, and reduces to the identity at
    t = 0 (the frozen Nyquist mode keeps all three properties exact).
    """
    k = f.grid.wavenumbers_odd
    return apply_multiplier(f, np.exp(-1j * t * k * np.abs(k)))


def propagated_position(f: Field, t: float) -> Field:
    """Position operator conjugated through the free flow.

    Returns ``x*f - 2t * H(df/dx)`` with x the fundamental-domain
    coordinate; equals U(t) (x .) U(-t) up to domain-truncation error.
    """
    transported = hilbert_transform(spatial_derivative(f, 1))
    return Field(f.grid, f.grid.x * f.values - 2.0 * t * transported.values)


def _derivative_or_identity(f: Field, order: int) -> Field:
    return f if order == 0 else spatial_derivative(f, order)


def hilbert_commutator(a: Field, f: Field, l: int, m: int) -> Field:
    """d^l/dx^l of (a * H(d^m f) - H(a * d^m f)); an order-zero operator.

    The boundedness constant of the commutator is probed empirically by the
    property suite; it is not asserted against any closed form.
    """
    if l < 0 or m < 0 or l + m < 1:
        raise ValueError("need l, m >= 0 with l + m >= 1")
    if a.grid != f.grid:
        raise ValueError("fields must share a grid")
    df = _derivative_or_identity(f, m)
    inner = Field(f.grid, a.values * hilbert_transform(df).values)
    swapped = hilbert_transform(Field(f.grid, a.values * df.values))
    return _derivative_or_identity(Field(f.grid, inner.values - swapped.values), l)


def half_derivative_commutator(phi: Field, f: Field) -> Field:
    """[D^(1/2), phi] f = D^(1/2)(phi*f) - phi * D^(1/2) f."""
    if phi.grid != f.grid:
        raise ValueError("fields must share a grid")
    product = Field(f.grid, phi.values * f.values)
    return Field(
        f.grid,
        fractional_derivative(product, 0.5).values
        - phi.values * fractional_derivative(f, 0.5).values,
    )
