"""Conserved functionals and the first-moment growth law.

The first three conserved quantities of the flow,

    mass         int u dx
    momentum     int u^2 dx
    hamiltonian  int (|D^(1/2) u|^2 + u^3/3) dx,

are evaluated with the dx-sum quadrature (spectrally accurate for periodic
integrands).  The cubic sign pairs with the -i*sgn(k) Hilbert convention:
writing the equation as u_t = d/dx(-Du - u^2/2), the functional above has
gradient Du + u^2/2 and is conserved by pure antisymmetry of d/dx (sources
using the opposite Hilbert kernel sign carry -u^3/3; on traveling waves
both combinations are constant, which hides the distinction).

The first moment int x u dx uses the same rule but only means anything on
the fundamental domain; a boundary-contamination check guards it and
attaches a warning instead of failing.

For a solution of the standard equation the first moment grows linearly
with slope (1/2) * int u0^2 dx, so it is strictly increasing for any
non-null datum; ``fit_moment_slope`` estimates the slope by least squares
over the snapshots (robust to the O(dt^4) integrator ripple).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .grid import Field
from .operators import fractional_derivative

__all__ = [
    "NormTrace",
    "BoundaryContaminationWarning",
    "mass",
    "momentum",
    "hamiltonian",
    "first_moment",
    "invariant_traces",
    "fit_moment_slope",
]


class BoundaryContaminationWarning(UserWarning):
    """Mass is not concentrated away from the domain seam."""


@dataclass(frozen=True)
class NormTrace:
    """Time series of one named functional with run metadata."""

    name: str
    times: np.ndarray
    values: np.ndarray
    run_id: str = ""

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise ValueError("times and values must have equal length")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def mass(u: Field) -> float:
    """int u dx; conserved to round-off by the conservative scheme."""
    return float(u.grid.dx * np.sum(u.values))


def momentum(u: Field) -> float:
    """int u^2 dx, the squared L2 norm."""
    return float(u.grid.dx * np.sum(u.values**2))


def hamiltonian(u: Field) -> float:
    """int (|D^(1/2) u|^2 + u^3 / 3) dx, both terms on the same quadrature.

    See the module docstring for the cubic sign; this combination is the
    one conserved under the sign conventions used here.
    """
    half = fractional_derivative(u, 0.5)
    return float(u.grid.dx * np.sum(half.values**2 + u.values**3 / 3.0))


def first_moment(u: Field, boundary_tol: float = 1e-8) -> float:
    """int x u dx on the fundamental domain.

    Warns (BoundaryContaminationWarning) when <x>^2 |u| at the seam is not
    below ``boundary_tol * max|u|``; the value is still returned.
    """
    amp = float(np.max(np.abs(u.values)))
    if amp > 0:
        L = u.grid.half_length
        edge = max(abs(u.values[0]), abs(u.values[-1])) * (1.0 + L**2)
        if edge > boundary_tol * amp:
            warnings.warn(
                f"boundary contamination: <x>^2 |u| at the seam is {edge:.3e} "
                f"(> {boundary_tol:g} * max|u| = {boundary_tol * amp:.3e}); "
                "the first moment is only fundamental-domain meaningful",
                BoundaryContaminationWarning,
                stacklevel=2,
            )
    return float(u.grid.dx * np.sum(u.grid.x * u.values))


def invariant_traces(traj: Trajectory, run_id: str = "",
                     include_moment: bool = True) -> dict:
    """Conservation-law (and optionally moment) traces over a trajectory."""
    functionals = {"mass": mass, "momentum": momentum, "hamiltonian": hamiltonian}
    if include_moment:
        functionals["first_moment"] = first_moment
    out = {}
    for name, fn in functionals.items():
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", BoundaryContaminationWarning)
            values = np.array([fn(u) for u in traj.snapshots])
        flagged = sum(1 for w in caught
                      if issubclass(w.category, BoundaryContaminationWarning))
        if flagged:
            warnings.warn(
                f"{flagged}/{len(traj.snapshots)} snapshots failed the "
                f"boundary-concentration check for {name}",
                BoundaryContaminationWarning,
                stacklevel=2,
            )
        out[name] = NormTrace(name, traj.times.copy(), values, run_id)
    return out


def fit_moment_slope(trace: NormTrace) -> float:
    """Least-squares slope of a moment trace; needs >= 2 samples."""
    if len(trace.times) < 2:
        raise ValueError("need at least two snapshots to fit a slope")
    slope, _ = np.polyfit(trace.times, trace.values, 1)
    return float(slope)
