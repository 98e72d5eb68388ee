"""Square-function (Stein) derivatives by graded singular quadrature.

The fractional-smoothness square function

    D^b f(x) = ( int |f(x) - f(y)|^2 / |x - y|^(1 + 2b) dy )^(1/2)

is evaluated by a midpoint rule on dyadic shells graded toward y = x.  One
refinement step halves the innermost shell radius; for Lipschitz f the
shell sums converge geometrically, while a jump at x makes them grow by
a factor -> 2^(2b) per level (sqrt(2) per level in the value for b = 1/2),
which is exactly the obstruction this module is asked to detect.
Divergence is a first-class reported outcome, not an error.

Profile evaluation at many points shares one offset table, so the norm
census checks (Leibniz inequality, norm equivalence, the dispersive phase
bound) stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SteinEvaluation",
    "stein_derivative",
    "stein_profile",
    "LeibnizReport",
    "leibniz_check",
    "EquivalenceReport",
    "stein_norm_equivalence",
    "PhaseBoundReport",
    "phase_pointwise_bound",
    "dispersive_phase",
]

POINTS_PER_SHELL = 12


def _as_callable(f):
    if callable(f):
        return f
    # piecewise-linear read-out of a sampled field
    grid, values = f.grid, f.values
    return lambda y: np.interp(y, grid.x, values)


def _shell_offsets(cutoff: float, levels: int, m0: int = POINTS_PER_SHELL):
    """Midpoint offsets and widths for dyadic shells (cutoff*2^-k-1, cutoff*2^-k]."""
    k = np.arange(levels)
    hi = cutoff * 2.0 ** (-k)
    lo = 0.5 * hi
    frac = (np.arange(m0) + 0.5) / m0
    offs = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    widths = ((hi - lo) / m0)[:, None] * np.ones(m0)[None, :]
    return offs, widths


@dataclass(frozen=True)
class SteinEvaluation:
    """One pointwise D^b value with its refinement history."""

    value: float
    converged: bool
    refinements: np.ndarray  # value after each added dyadic level
    b: float
    x: float
    cutoff: float

    def growth_factors(self) -> np.ndarray:
        v = self.refinements
        with np.errstate(divide="ignore", invalid="ignore"):
            return v[1:] / v[:-1]

    def to_dict(self) -> dict:
        return {
            "operation": "stein_derivative",
            "b": self.b,
            "x": self.x,
            "cutoff": self.cutoff,
            "value": self.value,
            "converged": self.converged,
            "refinements": list(self.refinements),
        }


def stein_derivative(f, b: float, x: float, cutoff: float,
                     rtol: float = 1e-4, min_levels: int = 6,
                     max_levels: int = 48) -> SteinEvaluation:
    """D^b f(x) with dyadic refinement toward the singularity.

    Refinement stops once the value stabilizes to ``rtol`` relative; if it
    never does (e.g. f jumps at x) the evaluation is flagged unconverged
    and the per-level history documents the growth.
    """
    if not (0.0 < b < 1.0):
        raise ValueError("b must lie in (0, 1)")
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    fn = _as_callable(f)
    fx = fn(np.array([x]))[0] if np.ndim(fn(np.array([x]))) else fn(x)
    offs, widths = _shell_offsets(cutoff, max_levels)
    kernel = np.abs(offs) ** (-(1.0 + 2.0 * b))
    shell_sums = np.empty(max_levels)
    for side in (1.0, -1.0):
        y = x + side * offs
        diff2 = np.abs(fx - fn(y)) ** 2
        part = np.sum(diff2 * kernel * widths, axis=1)
        shell_sums = part if side > 0 else shell_sums + part
    # note: loop above initializes on the first pass (side=+1)
    partial = np.sqrt(np.cumsum(shell_sums))
    converged = False
    value = float(partial[-1])
    stop = max_levels
    for k in range(min_levels, max_levels):
        prev, cur = partial[k - 1], partial[k]
        if cur > 0 and abs(cur - prev) <= rtol * cur:
            converged = True
            value = float(cur)
            stop = k + 1
            break
        if cur == 0.0 and prev == 0.0:
            converged = True
            value = 0.0
            stop = k + 1
            break
    return SteinEvaluation(value, converged, partial[:stop], b, x, cutoff)


def stein_profile(f, b: float, xs: np.ndarray, cutoff: float,
                  levels: int = 42) -> np.ndarray:
    """D^b f at many points with a fixed graded mesh (vectorized)."""
    if not (0.0 < b < 1.0):
        raise ValueError("b must lie in (0, 1)")
    fn = _as_callable(f)
    xs = np.asarray(xs, dtype=float)
    offs, widths = _shell_offsets(cutoff, levels)
    flat = offs.ravel()
    wflat = (widths * np.abs(offs) ** (-(1.0 + 2.0 * b))).ravel()
    fx = fn(xs)
    total = np.zeros_like(xs)
    for side in (1.0, -1.0):
        y = xs[:, None] + side * flat[None, :]
        diff2 = np.abs(fx[:, None] - fn(y)) ** 2
        total += diff2 @ wflat
    return np.sqrt(total)


def _window_norm(values: np.ndarray, spacing: float) -> float:
    return float(np.sqrt(spacing * np.sum(values**2)))


@dataclass(frozen=True)
class LeibnizReport:
    lhs: float
    rhs_f_term: float
    rhs_g_term: float
    slack: float

    @property
    def rhs(self) -> float:
        return self.rhs_f_term + self.rhs_g_term

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.slack

    def to_dict(self) -> dict:
        return {
            "operation": "leibniz_check",
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "slack": self.slack,
        }


def leibniz_check(f, g, b: float, window: float, samples: int = 257,
                  cutoff: float | None = None,
                  slack: float = 1e-6) -> LeibnizReport:
    """Check ||D^b(fg)||_2 <= ||f D^b g||_2 + ||g D^b f||_2 by quadrature.

    Callables must accept arrays.  The norms live on a uniform window
    [-window, window]; the stated slack absorbs quadrature error.
    """
    fn, gn = _as_callable(f), _as_callable(g)
    cutoff = cutoff if cutoff is not None else 4.0 * window
    xs = np.linspace(-window, window, samples)
    h = xs[1] - xs[0]
    fg = lambda y: fn(y) * gn(y)
    d_fg = stein_profile(fg, b, xs, cutoff)
    d_f = stein_profile(fn, b, xs, cutoff)
    d_g = stein_profile(gn, b, xs, cutoff)
    lhs = _window_norm(d_fg, h)
    term_f = _window_norm(np.abs(fn(xs)) * d_g, h)
    term_g = _window_norm(np.abs(gn(xs)) * d_f, h)
    return LeibnizReport(lhs, term_f, term_g, slack)


@dataclass(frozen=True)
class EquivalenceReport:
    """||J^b f||_2 against ||f||_2 + ||D^b f||_2 for one function."""

    bessel_norm: float
    plain_norm: float
    stein_norm: float

    @property
    def ratio(self) -> float:
        rhs = self.plain_norm + self.stein_norm
        if self.bessel_norm == 0.0 and rhs == 0.0:
            return 1.0  # zero function: both sides vanish
        return self.bessel_norm / rhs

    def to_dict(self) -> dict:
        return {
            "operation": "stein_norm_equivalence",
            "bessel_norm": self.bessel_norm,
            "plain_norm": self.plain_norm,
            "stein_norm": self.stein_norm,
            "ratio": self.ratio,
        }


def stein_norm_equivalence(fn, b: float, grid, window: float,
                           samples: int = 257) -> EquivalenceReport:
    """Compare the Bessel norm with the Stein characterization norm.

    ``fn`` is sampled on the grid for the multiplier side; the square
    function is quadrature-evaluated on [-window, window].
    """
    from .grid import Field
    from .operators import bessel_potential

    field = Field(grid, fn(grid.x))
    lhs = bessel_potential(field, b).l2_norm()
    if np.max(np.abs(field.values)) == 0.0:
        return EquivalenceReport(lhs, 0.0, 0.0)
    xs = np.linspace(-window, window, samples)
    h = xs[1] - xs[0]
    prof = stein_profile(fn, b, xs, cutoff=2.0 * grid.half_length)
    return EquivalenceReport(lhs, field.l2_norm(), _window_norm(prof, h))


def dispersive_phase(t: float):
    """The oscillatory multiplier exp(-i t x |x|) as a callable."""
    return lambda x: np.exp(-1j * t * x * np.abs(x))


@dataclass(frozen=True)
class PhaseBoundReport:
    """Smallest c with D^b(phase) <= c (t^(b/2) + t^b |x|^b) on the samples."""

    t: float
    b: float
    x_samples: np.ndarray
    values: np.ndarray
    fitted_c: float

    def to_dict(self) -> dict:
        return {
            "operation": "phase_pointwise_bound",
            "t": self.t,
            "b": self.b,
            "x_samples": list(self.x_samples),
            "values": list(self.values),
            "fitted_c": self.fitted_c,
        }


def phase_pointwise_bound(t: float, b: float, x_samples,
                          cutoff: float = 600.0) -> PhaseBoundReport:
    """Evaluate D^b of the dispersive phase and fit the envelope constant."""
    if t <= 0:
        raise ValueError("t must be positive")
    xs = np.asarray(x_samples, dtype=float)
    values = stein_profile(dispersive_phase(t), b, xs, cutoff=cutoff)
    envelope = abs(t) ** (b / 2.0) + abs(t) ** b * np.abs(xs) ** b
    fitted_c = float(np.max(values / envelope))
    return PhaseBoundReport(t, b, xs, values, fitted_c)
