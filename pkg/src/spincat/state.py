"""Truncated number-basis representation of the rescaled collective-spin
oscillator, and transforms to the x/p quadrature representations.

Conventions used throughout:

* momentum-basis matrix elements are real,
  phi_n(p) = pi**(-1/4) * (2**n n!)**(-1/2) * H_n(p) * exp(-p**2/2),
  evaluated with the normalized three-term recurrence (never via raw
  Hermite polynomials divided by factorials);
* the x representation is *defined* as the continuous Fourier transform
  of the p representation with kernel exp(i*x*p)/sqrt(2*pi), so applying
  the transform twice reflects a wavefunction through the origin;
* continuous integrals are midpoint Riemann sums on uniform grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    CapacityError,
    DegenerateStateError,
    DomainError,
    ResolutionError,
)

# Stability budget of the normalized recurrence in double precision.
HERMITE_N_BUDGET = 2000

# Relative amplitude below which a number-basis tail is treated as empty
# when sizing grids and resolution bounds.
_OCCUPANCY_CUTOFF = 1e-12

_TRUNCATION_CAP = 4096


class Basis(str, Enum):
    X = "x"
    P = "p"


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform grid of `count` points from `min` to `max` inclusive."""

    min: float
    max: float
    count: int

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise DomainError("grid endpoints must be finite")
        if not self.min < self.max:
            raise DomainError(f"grid requires min < max, got [{self.min}, {self.max}]")
        if self.count < 2:
            raise DomainError(f"grid requires count >= 2, got {self.count}")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.count - 1)

    def points(self) -> np.ndarray:
        # Built from integer offsets about the center so that symmetric
        # grids are bitwise antisymmetric: points[k] == -points[-1-k].
        center = 0.5 * (self.min + self.max)
        offsets = np.arange(self.count, dtype=float) - 0.5 * (self.count - 1)
        return center + offsets * self.spacing

    def is_symmetric(self, rel_tol: float = 1e-12) -> bool:
        return abs(self.min + self.max) <= rel_tol * (self.max - self.min)


@dataclass(frozen=True, eq=False)
class NumberState:
    """Complex amplitudes over the flip-number basis n = 0 .. n_max."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if amps.ndim != 1 or amps.size == 0:
            raise DomainError("amplitudes must be a non-empty 1-D vector")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1


@dataclass(frozen=True, eq=False)
class QuadratureWavefunction:
    """Complex amplitudes sampled on a uniform grid in x or p."""

    grid: QuadratureGrid
    values: np.ndarray
    basis: Basis

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.count,):
            raise DomainError(
                f"values length {vals.shape} does not match grid count {self.grid.count}"
            )
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "basis", Basis(self.basis))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


class RandomSource:
    """Seeded random stream. Identical seeds give identical outcome
    sequences; instances are not safe to share across threads."""

    def __init__(self, seed: int):
        self.seed = _check_seed(seed)
        self._rng = np.random.default_rng(self.seed)

    @classmethod
    def for_trajectory(cls, seed: int, index: int) -> "RandomSource":
        src = cls.__new__(cls)
        src.seed = _check_seed(seed)
        src._rng = np.random.default_rng([src.seed, int(index)])
        return src

    def normal(self, loc: float = 0.0, scale: float = 1.0) -> float:
        return float(self._rng.normal(loc, scale))

    def uniform(self) -> float:
        return float(self._rng.random())


# ---------------------------------------------------------------------------
# oscillator eigenfunctions


def hermite_osc_eigenfunction(n: int, u: float) -> float:
    """Normalized harmonic-oscillator eigenfunction phi_n(u).

    Uses the recurrence
        phi_{n+1} = u*sqrt(2/(n+1))*phi_n - sqrt(n/(n+1))*phi_{n-1}
    with the Gaussian weight folded into phi_0, which is stable to
    n ~ 2000 in double precision.
    """
    if n < 0 or n != int(n):
        raise DomainError(f"eigenfunction index must be a non-negative integer, got {n}")
    if n > HERMITE_N_BUDGET:
        raise DomainError(
            f"eigenfunction index {n} exceeds the recurrence stability budget "
            f"{HERMITE_N_BUDGET}"
        )
    if not np.isfinite(u):
        raise DomainError(f"evaluation point must be finite, got {u}")
    prev = np.pi ** -0.25 * np.exp(-u * u / 2.0)
    if n == 0:
        return float(prev)
    cur = np.sqrt(2.0) * u * prev
    for k in range(2, n + 1):
        prev, cur = cur, u * np.sqrt(2.0 / k) * cur - np.sqrt((k - 1) / k) * prev
    return float(cur)


def hermite_basis(n_max: int, u: np.ndarray) -> np.ndarray:
    """Matrix phi[n, k] = phi_n(u_k) for n = 0 .. n_max, same recurrence as
    `hermite_osc_eigenfunction` vectorized over the evaluation points."""
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max}")
    if n_max > HERMITE_N_BUDGET:
        raise DomainError(
            f"n_max {n_max} exceeds the recurrence stability budget {HERMITE_N_BUDGET}"
        )
    u = np.asarray(u, dtype=float)
    out = np.empty((n_max + 1, u.size))
    out[0] = np.pi ** -0.25 * np.exp(-u * u / 2.0)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for n in range(2, n_max + 1):
        out[n] = u * np.sqrt(2.0 / n) * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


# ---------------------------------------------------------------------------
# norms


def norm(state: NumberState) -> float:
    """sqrt(sum |a_n|^2)."""
    return float(np.linalg.norm(state.amplitudes))


def normalize(state: NumberState) -> NumberState:
    nrm = norm(state)
    if nrm == 0.0:
        raise DegenerateStateError("cannot normalize the all-zero state")
    return NumberState(state.amplitudes / nrm)


def riemann_norm(wf: QuadratureWavefunction) -> float:
    """Midpoint-Riemann L2 norm on the wavefunction's grid."""
    return float(np.sqrt(np.sum(np.abs(wf.values) ** 2) * wf.grid.spacing))


def riemann_normalize(wf: QuadratureWavefunction) -> QuadratureWavefunction:
    nrm = riemann_norm(wf)
    if nrm == 0.0:
        raise DegenerateStateError("cannot normalize an all-zero wavefunction")
    return QuadratureWavefunction(wf.grid, wf.values / nrm, wf.basis)


def quadrature_moment(wf: QuadratureWavefunction, order: int = 2, center: float = 0.0) -> float:
    """Riemann estimate of <(coord - center)^order> for the (normalized)
    probability density |values|^2."""
    pts = wf.grid.points()
    dens = wf.density()
    total = np.sum(dens)
    if total == 0.0:
        raise DegenerateStateError("moment of an all-zero wavefunction")
    return float(np.sum((pts - center) ** order * dens) / total)


def effective_max_index(state: NumberState, cutoff: float = _OCCUPANCY_CUTOFF) -> int:
    """Largest n whose amplitude exceeds `cutoff` relative to the peak."""
    mags = np.abs(state.amplitudes)
    peak = mags.max()
    if peak == 0.0:
        raise DegenerateStateError("all-zero state has no occupancy")
    occupied = np.nonzero(mags > cutoff * peak)[0]
    return int(occupied[-1])


def mean_occupation(state: NumberState) -> float:
    """<n> computed directly in the number basis."""
    w = np.abs(state.amplitudes) ** 2
    return float(np.sum(np.arange(w.size) * w) / np.sum(w))


def _fock_quadrature_second_moments(state: NumberState) -> tuple[float, float]:
    # In the real <p|n> convention used here, <p^2> = <n> + 1/2 + Re<a^2>
    # and <x^2> = <n> + 1/2 - Re<a^2> (positive squeezed coefficients are
    # narrow in x).  Used only to size grids; reported values always come
    # from quadrature sums.
    a = state.amplitudes / np.linalg.norm(state.amplitudes)
    n = np.arange(a.size)
    mean_n = float(np.sum(n * np.abs(a) ** 2))
    if a.size > 2:
        k = n[:-2]
        a2 = np.sum(np.conj(a[:-2]) * a[2:] * np.sqrt((k + 1.0) * (k + 2.0)))
    else:
        a2 = 0.0
    re_a2 = float(np.real(a2))
    return mean_n + 0.5 - re_a2, mean_n + 0.5 + re_a2


# ---------------------------------------------------------------------------
# grids


def _next_pow2(value: float) -> int:
    count = 2
    while count < value:
        count *= 2
    return count


def default_cat_grid(mu: float) -> QuadratureGrid:
    """Default symmetric grid for a cat state of mean flip number mu:
    range +-(sqrt(2 mu) + 8), smallest power-of-two point count giving at
    least 16 points per fringe period 2 pi / sqrt(2 mu)."""
    if mu <= 0:
        raise DomainError(f"cat grid needs mu > 0, got {mu}")
    half = np.sqrt(2.0 * mu) + 8.0
    period = 2.0 * np.pi / np.sqrt(2.0 * mu)
    count = _next_pow2(1.0 + 2.0 * half / (period / 16.0))
    return QuadratureGrid(-half, half, count)


def grid_for_state(state: NumberState, points_per_wave: int = 16, margin: float = 8.0) -> QuadratureGrid:
    """Symmetric grid wide enough for the classical turning point of the
    highest occupied level and fine enough for its fastest oscillation."""
    n_eff = effective_max_index(state)
    k_max = np.sqrt(2.0 * n_eff + 1.0)
    half = k_max + margin
    period = 2.0 * np.pi / k_max
    count = _next_pow2(1.0 + 2.0 * half / (period / points_per_wave))
    return QuadratureGrid(-half, half, max(count, 256))


# ---------------------------------------------------------------------------
# basis transforms


def _continuous_ft(values: np.ndarray, pts_in: np.ndarray, spacing: float,
                   pts_out: np.ndarray) -> np.ndarray:
    """Discretized continuous Fourier transform
    out[k] = spacing/sqrt(2 pi) * sum_j values[j] * exp(i * out_k * in_j),
    evaluated in row chunks to bound the kernel memory."""
    out = np.empty(pts_out.size, dtype=complex)
    scale = spacing / np.sqrt(2.0 * np.pi)
    chunk = max(1, int(4e6 // max(pts_in.size, 1)))
    for start in range(0, pts_out.size, chunk):
        block = pts_out[start:start + chunk]
        kernel = np.exp(1j * np.outer(block, pts_in))
        out[start:start + chunk] = kernel @ values * scale
    return out


def to_quadrature(state: NumberState, grid: QuadratureGrid, basis: Basis) -> QuadratureWavefunction:
    """Expand a number state on a quadrature grid.

    P basis: values[k] = sum_n a_n phi_n(p_k).  X basis: the continuous
    Fourier transform of the P representation, computed on an internal
    grid sized to the state's occupancy and evaluated at the requested
    points.  The output is *not* renormalized; for states fully covered
    by the grid the Riemann norm reproduces the number-basis norm.
    """
    basis = Basis(basis)
    if not np.any(state.amplitudes):
        raise DegenerateStateError("cannot transform the all-zero state")
    n_eff = effective_max_index(state)
    k_max = np.sqrt(2.0 * n_eff + 1.0)
    if grid.spacing > np.pi / k_max:
        raise ResolutionError(
            f"grid spacing {grid.spacing:.4g} exceeds the resolution bound "
            f"{np.pi / k_max:.4g} for occupancy n_eff={n_eff}"
        )
    if basis is Basis.P:
        values = _number_to_p(state.amplitudes, n_eff, grid.points())
        return QuadratureWavefunction(grid, values, Basis.P)

    # X basis: P representation on an internal grid, then Fourier.
    x_pts = grid.points()
    half_in = k_max + 8.0
    spacing_in = min(np.pi / (8.0 * k_max),
                     np.pi / (np.max(np.abs(x_pts)) + k_max))
    count_in = _next_pow2(1.0 + 2.0 * half_in / spacing_in)
    inner = QuadratureGrid(-half_in, half_in, count_in)
    p_pts = inner.points()
    p_values = _number_to_p(state.amplitudes, n_eff, p_pts)
    values = _continuous_ft(p_values, p_pts, inner.spacing, x_pts)
    return QuadratureWavefunction(grid, values, Basis.X)


def _number_to_p(amplitudes: np.ndarray, n_eff: int, pts: np.ndarray) -> np.ndarray:
    if n_eff > HERMITE_N_BUDGET:
        raise DomainError(
            f"state occupancy n_eff={n_eff} exceeds the recurrence budget "
            f"{HERMITE_N_BUDGET}"
        )
    # Running recurrence; only two basis rows live at a time.
    values = np.zeros(pts.size, dtype=complex)
    prev = np.pi ** -0.25 * np.exp(-pts * pts / 2.0)
    values += amplitudes[0] * prev
    if n_eff == 0:
        return values
    cur = np.sqrt(2.0) * pts * prev
    values += amplitudes[1] * cur
    for n in range(2, n_eff + 1):
        prev, cur = cur, pts * np.sqrt(2.0 / n) * cur - np.sqrt((n - 1) / n) * prev
        if amplitudes[n] != 0.0:
            values += amplitudes[n] * cur
    return values


def fourier_pair(wf: QuadratureWavefunction) -> QuadratureWavefunction:
    """Conjugate-basis wavefunction on the same (symmetric) grid.

    Both directions use the kernel exp(i*u*v)/sqrt(2 pi), so applying the
    transform twice returns the parity-reflected input.
    """
    if not wf.grid.is_symmetric():
        raise DomainError(
            f"fourier_pair requires a grid symmetric about 0, got "
            f"[{wf.grid.min}, {wf.grid.max}]"
        )
    pts = wf.grid.points()
    values = _continuous_ft(wf.values, pts, wf.grid.spacing, pts)
    flipped = Basis.X if wf.basis is Basis.P else Basis.P
    return QuadratureWavefunction(wf.grid, values, flipped)


# ---------------------------------------------------------------------------
# truncation policy


def choose_truncation(xi2: float, beta: float, mu_max: float, tail_tol: float,
                      cap: int = _TRUNCATION_CAP) -> int:
    """Smallest even n_max such that (a) the squeezed-state tail mass beyond
    n_max stays below tail_tol (geometric bound with ratio
    ((xi2-1)/(xi2+1))**2) and (b) n_max covers mu_max plus ten measurement
    widths 1/beta when a conditional mean is targeted.  Floor 2, cap `cap`.
    """
    if xi2 < 1.0:
        raise DomainError(f"squeezing degree must satisfy xi2 >= 1, got {xi2}")
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    if mu_max < 0.0:
        raise DomainError(f"mu_max must be non-negative, got {mu_max}")
    if not 0.0 < tail_tol <= 1e-4:
        raise DomainError(f"tail_tol must lie in (0, 1e-4], got {tail_tol}")

    q = ((xi2 - 1.0) / (xi2 + 1.0)) ** 2
    n_tail = 0
    if q > 0.0:
        m = max(0, int(np.ceil(np.log(tail_tol) / np.log(q))) - 1)
        while q ** (m + 1) >= tail_tol:
            m += 1
        n_tail = 2 * m
    n_cover = mu_max + 10.0 / beta if mu_max > 0.0 else 0.0
    required = max(2, n_tail, int(np.ceil(n_cover)))
    if required % 2:
        required += 1
    if required > cap:
        raise CapacityError(
            f"required truncation n_max={required} exceeds cap {cap}",
            required_n_max=required,
        )
    return required
