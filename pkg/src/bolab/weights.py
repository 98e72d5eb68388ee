"""Weight functions, weighted norms, and the A2 scanning machinery.

Three weight families are supported:

* ``bracket``    <x>^r with <x> = sqrt(1 + x^2)
* ``power``      |x|^alpha  (the A2 membership test family)
* ``truncated``  w_N^theta, where w_N equals <x> for |x| <= N, the constant
  2N for |x| >= 3N, and a fixed C^1 monotone transition in between

Truncated transition.  A plain quintic-smoothstep blend of the two branch
VALUES overshoots the slope bound (its derivative peaks near 1.16), so the
smoothstep shapes the DERIVATIVE instead: writing v = <x>, the transition
is w = eta(v) with eta'(tau) = (1 - s(tau))^q, s the quintic smoothstep,
and the exponent q = q(N) solved once so the transition lands exactly on
2N at |x| = 3N.  By the chain rule w' = eta'(tau) * d<x>/dx <= 1
everywhere, eta is monotone, and value and first derivative match both
branch ends exactly.

A2 scanning.  The p = 2 Muckenhoupt constant is the sup over intervals Q
of (avg_Q w)(avg_Q 1/w); the scan family is dyadic in length (2L * 2^-j,
j = 0..levels) with centers sliding on a stride of 1/8 length.  Interval
averages use Gauss-Legendre quadrature; intervals whose closure meets the
power-weight singularity at 0 are integrated on a dyadic mesh graded
toward 0 with the innermost sliver dropped, so the (possibly infinite)
singular mass is always approximated from below and divergence flags are
conservative.  The flag trips when the running sup exceeds 1e8.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .grid import Field
from .operators import bessel_potential, hilbert_transform

__all__ = [
    "WeightSpec",
    "evaluate_weight",
    "weighted_l2_norm",
    "weighted_sobolev_norm",
    "A2ScanResult",
    "a2_constant",
    "a2_uniformity_scan",
    "weighted_hilbert_ratio",
    "interpolation_ratio",
]

A2_DIVERGENCE_THRESHOLD = 1e8

_GL32 = np.polynomial.legendre.leggauss(32)
_GL64 = np.polynomial.legendre.leggauss(64)
_GL4 = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class WeightSpec:
    """Description of one weight function."""

    kind: str  # "bracket" | "power" | "truncated"
    exponent: float
    truncation: int | None = None

    def __post_init__(self):
        if self.kind not in ("bracket", "power", "truncated"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "truncated":
            if self.truncation is None or self.truncation < 1:
                raise ValueError("truncated weights need a positive integer truncation")
        elif self.truncation is not None:
            raise ValueError(f"{self.kind} weights take no truncation parameter")

    def label(self) -> str:
        if self.kind == "truncated":
            return f"wN{self.truncation}^{self.exponent:g}"
        if self.kind == "bracket":
            return f"<x>^{self.exponent:g}"
        return f"|x|^{self.exponent:g}"


def _smoothstep(tau):
    return tau**3 * (10.0 + tau * (-15.0 + 6.0 * tau))


@lru_cache(maxsize=None)
def _transition_exponent(n_trunc: int) -> float:
    """Solve for q with int_0^1 (1-s)^q dtau = (2N - <N>)/(<3N> - <N>)."""
    lo = float(np.hypot(1.0, n_trunc))
    hi = float(np.hypot(1.0, 3.0 * n_trunc))
    target = (2.0 * n_trunc - lo) / (hi - lo)
    nodes, wts = _GL64
    tau = 0.5 * (nodes + 1.0)
    base = 1.0 - _smoothstep(tau)

    def mean_profile(q):
        return 0.5 * np.sum(wts * base**q) - target

    return float(brentq(mean_profile, 1e-6, 256.0, xtol=1e-14, rtol=1e-15))


def _transition_integral(tau: np.ndarray, q: float) -> np.ndarray:
    """int_0^tau (1 - s)^q, Gauss-Legendre on each [0, tau_i]."""
    nodes, wts = _GL32
    half = 0.5 * tau[:, None]
    sigma = half * (nodes[None, :] + 1.0)
    return half[:, 0] * np.sum(wts[None, :] * (1.0 - _smoothstep(sigma)) ** q, axis=1)


def _truncated_base(x: np.ndarray, n_trunc: int) -> np.ndarray:
    ax = np.abs(x)
    out = np.empty_like(ax)
    inner = ax <= n_trunc
    outer = ax >= 3.0 * n_trunc
    mid = ~(inner | outer)
    out[inner] = np.hypot(1.0, ax[inner])
    out[outer] = 2.0 * n_trunc
    if np.any(mid):
        lo = float(np.hypot(1.0, n_trunc))
        hi = float(np.hypot(1.0, 3.0 * n_trunc))
        q = _transition_exponent(n_trunc)
        tau = (np.hypot(1.0, ax[mid]) - lo) / (hi - lo)
        out[mid] = lo + (hi - lo) * _transition_integral(tau, q)
    return out


def evaluate_weight(spec: WeightSpec, x) -> np.ndarray | float:
    """Weight values at x (scalar or array); |0|^alpha = inf for alpha < 0."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if spec.kind == "bracket":
        out = np.hypot(1.0, arr) ** spec.exponent
    elif spec.kind == "power":
        with np.errstate(divide="ignore"):
            out = np.abs(arr) ** spec.exponent
    else:
        out = _truncated_base(arr, spec.truncation) ** spec.exponent
    return out if np.ndim(x) else float(out[0])


def weighted_l2_norm(u: Field, spec: WeightSpec) -> float:
    """sqrt of the dx-quadrature of (w u)^2; zero iff u is the zero field."""
    w = evaluate_weight(spec, u.grid.x)
    return float(np.sqrt(u.grid.dx * np.sum((w * u.values) ** 2)))


def weighted_sobolev_norm(u: Field, s: float, r: float) -> float:
    """||J^s u||_2 + ||<x>^r u||_2, the natural norm of the weighted class."""
    if s < 0 or r < 0:
        raise ValueError("both indices must be nonnegative")
    smooth = bessel_potential(u, s).l2_norm()
    decay = weighted_l2_norm(u, WeightSpec("bracket", r))
    return smooth + decay


# ---------------------------------------------------------------------------
# A2 scan


def _graded_power_mass(beta: float, upper: float, levels: int = 400) -> float:
    """int_0^upper x^beta on a dyadic mesh graded toward 0, open at 0.

    The innermost sliver [0, upper * 2^-levels] is dropped, so integrable
    singularities are approximated from below and non-integrable ones show
    up as a geometrically growing partial sum.
    """
    if upper <= 0.0:
        return 0.0
    nodes, wts = _GL4
    k = np.arange(levels)
    hi = upper * 2.0 ** (-k)
    lo = 0.5 * hi
    mid = 0.5 * (hi + lo)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    pts = mid + half * nodes[None, :]
    with np.errstate(over="ignore"):
        shell = half[:, 0] * np.sum(wts[None, :] * pts**beta, axis=1)
        total = float(np.sum(shell))
    return total


def _power_interval_mean(beta: float, lo: float, hi: float) -> float:
    """Average of |x|^beta over [lo, hi], singularity-aware."""
    if lo >= hi:
        raise ValueError("empty interval")
    if lo <= 0.0 <= hi:
        mass = _graded_power_mass(beta, -lo) + _graded_power_mass(beta, hi)
        return mass / (hi - lo)
    nodes, wts = _GL32
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    pts = np.abs(mid + half * nodes)
    return float(half * np.sum(wts * pts**beta) / (hi - lo))


def _smooth_pair_means(spec: WeightSpec, centers: np.ndarray, length: float):
    """Vectorized (avg w, avg 1/w) over equal-length intervals."""
    nodes, wts = _GL32
    pts = centers[:, None] + 0.5 * length * nodes[None, :]
    w = evaluate_weight(spec, pts.ravel()).reshape(pts.shape)
    avg_w = 0.5 * np.sum(wts[None, :] * w, axis=1)
    avg_winv = 0.5 * np.sum(wts[None, :] / w, axis=1)
    return avg_w, avg_winv


@dataclass(frozen=True)
class A2ScanResult:
    """Outcome of one A2 constant scan."""

    constant: float
    diverged: bool
    per_length_sup: np.ndarray
    lengths: np.ndarray
    weight: WeightSpec

    def to_dict(self) -> dict:
        return {
            "operation": "a2_constant",
            "weight": self.weight.label(),
            "constant": self.constant,
            "diverged": self.diverged,
            "lengths": list(self.lengths),
            "per_length_sup": list(self.per_length_sup),
            "threshold": A2_DIVERGENCE_THRESHOLD,
        }


def a2_constant(spec: WeightSpec, half_length: float = 128.0,
                levels: int = 12, stride_fraction: float = 0.125) -> A2ScanResult:
    """Scan sup_Q (avg_Q w)(avg_Q 1/w) over the dyadic interval family.

    Divergence (running sup above 1e8, or an infinite average) is a
    reported outcome, not an error.
    """
    sups = []
    lengths = half_length * 2.0 * 2.0 ** (-np.arange(levels + 1))
    for length in lengths:
        step = stride_fraction * length
        n_centers = int(np.floor((2.0 * half_length - length) / step)) + 1
        centers = -half_length + 0.5 * length + step * np.arange(n_centers)
        if spec.kind == "power":
            lo = centers - 0.5 * length
            hi = centers + 0.5 * length
            straddle = (lo <= 0.0) & (hi >= 0.0)
            best = 0.0
            if np.any(~straddle):
                aw, awi = _smooth_pair_means(spec, centers[~straddle], length)
                best = float(np.max(aw * awi))
            for c_lo, c_hi in zip(lo[straddle], hi[straddle]):
                aw = _power_interval_mean(spec.exponent, c_lo, c_hi)
                awi = _power_interval_mean(-spec.exponent, c_lo, c_hi)
                with np.errstate(over="ignore", invalid="ignore"):
                    best = max(best, aw * awi)
        else:
            aw, awi = _smooth_pair_means(spec, centers, length)
            best = float(np.max(aw * awi))
        sups.append(best)
    constant = float(np.max(sups))
    diverged = bool(not np.isfinite(constant) or constant > A2_DIVERGENCE_THRESHOLD)
    return A2ScanResult(constant, diverged, np.array(sups), lengths, spec)


def a2_uniformity_scan(theta: float, n_list, half_length: float = 128.0,
                       levels: int = 12) -> np.ndarray:
    """A2 constants of w_N^theta per N; max/min is the uniformity report."""
    if not (-1.0 < theta < 1.0):
        raise ValueError("theta must lie in (-1, 1) for the A2 scan")
    return np.array([
        a2_constant(WeightSpec("truncated", theta, int(n)), half_length, levels).constant
        for n in n_list
    ])


def weighted_hilbert_ratio(f: Field, spec: WeightSpec) -> float:
    """||Hf||_{L2(w dx)} / ||f||_{L2(w dx)} on the grid.

    The weighted measure is realized as the pointwise multiplier sqrt(w);
    an equivalent formulation of the integral inequality.
    """
    w_half = np.sqrt(evaluate_weight(spec, f.grid.x))
    hf = hilbert_transform(f)
    num = np.sqrt(f.grid.dx * np.sum((w_half * hf.values) ** 2))
    den = np.sqrt(f.grid.dx * np.sum((w_half * f.values) ** 2))
    if den == 0.0:
        raise ValueError("cannot form the ratio for the zero field")
    return float(num / den)


def interpolation_ratio(f: Field, a: float, b: float, theta: float,
                        weight_kind: str = "bracket",
                        truncation: int | None = None) -> float:
    """LHS / RHS of the weighted interpolation inequality.

    LHS = ||J^(theta a) (rho^((1-theta) b) f)||_2 and
    RHS = ||rho^b f||_2^(1-theta) * ||J^a f||_2^theta, with rho either
    <x> or the truncated weight.  The ratio is invariant under f -> lam f.
    """
    if not (0.0 < theta < 1.0):
        raise ValueError("theta must lie in (0, 1)")
    if a <= 0 or b <= 0:
        raise ValueError("both smoothness and decay exponents must be positive")
    if weight_kind not in ("bracket", "truncated"):
        raise ValueError("weight_kind must be 'bracket' or 'truncated'")
    part = WeightSpec(weight_kind, (1.0 - theta) * b,
                      truncation if weight_kind == "truncated" else None)
    full = WeightSpec(weight_kind, b,
                      truncation if weight_kind == "truncated" else None)
    weighted = Field(f.grid, evaluate_weight(part, f.grid.x) * f.values)
    lhs = bessel_potential(weighted, theta * a).l2_norm()
    rhs = weighted_l2_norm(f, full) ** (1.0 - theta) * bessel_potential(f, a).l2_norm() ** theta
    if rhs == 0.0:
        raise ValueError("cannot form the ratio for the zero field")
    return float(lhs / rhs)
