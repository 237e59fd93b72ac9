"""Analytic cat-state approximations and the metrics that witness a cat.

For a conditional mean flip number mu > 0 the p-space wavefunction is a
pair of Gaussians

    psi(p) ~ exp(-(p - s)**2 * beta**2 * mu) + exp(-(p + s)**2 * beta**2 * mu),
    s = sqrt(2 mu),

and its Fourier partner in x is a Gaussian envelope times a cosine,

    psi(x) ~ exp(-x**2 / (4 beta**2 mu)) * cos(x * sqrt(2 mu)).

Two distinct p peaks plus x fringes are the observable signature; the
detectors below measure both from sampled wavefunctions.  Widths are
reported in the amplitude-Gaussian convention (sigma of
exp(-(p-p0)**2/(2 sigma**2))), i.e. sqrt(2) times the local second
moment of the probability density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import (
    DegenerateStateError,
    DomainError,
    NoCatError,
    NoFringeError,
    ResolutionError,
)
from .state import (
    Basis,
    QuadratureGrid,
    QuadratureWavefunction,
    quadrature_moment,
    riemann_normalize,
)

# Peaks must rise above this fraction of the global density maximum.
PEAK_THRESHOLD = 0.05

# Envelope region for fringe analysis: outermost points whose amplitude
# reaches this fraction of the amplitude maximum.
_ENVELOPE_THRESHOLD = 0.01


@dataclass(frozen=True)
class CatApproxParams:
    mu: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0.0):
            raise DomainError(f"beta must be finite and positive, got {self.beta}")
        if not np.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu}")


@dataclass(frozen=True)
class CatMetrics:
    peak_positions: tuple[float, float] | None
    peak_std: float | None
    peak_separation: float | None
    fringe_period: float | None
    envelope_std: float | None
    visibility: float | None
    resolvable: bool
    reachable: bool


def approx_p_wavefunction(params: CatApproxParams, grid: QuadratureGrid) -> QuadratureWavefunction:
    """Two-Gaussian approximation in p, normalized on the grid; exactly
    even on symmetric grids by construction."""
    if params.mu <= 0.0:
        raise NoCatError(f"no cat for mu <= 0 (got mu={params.mu})")
    p = grid.points()
    s = np.sqrt(2.0 * params.mu)
    c = params.beta ** 2 * params.mu
    values = (np.exp(-(p - s) ** 2 * c) + np.exp(-(p + s) ** 2 * c)).astype(complex)
    return riemann_normalize(QuadratureWavefunction(grid, values, Basis.P))


def approx_x_wavefunction(params: CatApproxParams, grid: QuadratureGrid) -> QuadratureWavefunction:
    """Envelope-times-cosine approximation in x, normalized on the grid."""
    if params.mu <= 0.0:
        raise NoCatError(f"no cat for mu <= 0 (got mu={params.mu})")
    s = np.sqrt(2.0 * params.mu)
    period = 2.0 * np.pi / s
    if grid.spacing > period / 16.0:
        raise ResolutionError(
            f"grid spacing {grid.spacing:.4g} gives fewer than 16 points per "
            f"fringe period {period:.4g}"
        )
    x = grid.points()
    values = (np.exp(-x * x / (4.0 * params.beta ** 2 * params.mu)) * np.cos(x * s)).astype(complex)
    return riemann_normalize(QuadratureWavefunction(grid, values, Basis.X))


def _parabolic_refine(y: np.ndarray, i: int) -> tuple[float, float]:
    """Vertex (offset in index units, value) of the parabola through
    y[i-1], y[i], y[i+1]; falls back to the sample on flat tops."""
    if i <= 0 or i >= y.size - 1:
        return 0.0, float(y[i])
    dy = 0.5 * (y[i + 1] - y[i - 1])
    d2y = y[i + 1] - 2.0 * y[i] + y[i - 1]
    if d2y == 0.0:
        return 0.0, float(y[i])
    delta = -dy / d2y
    delta = float(np.clip(delta, -1.0, 1.0))
    return delta, float(y[i] + 0.5 * dy * delta)


def detect_peaks(wf: QuadratureWavefunction) -> tuple[list[float], list[float]]:
    """Local maxima of |psi|^2 above 5% of the global maximum, with a
    width estimate from the local second moment of the density between
    the surrounding valleys (sqrt(2)-scaled to the amplitude-sigma
    convention)."""
    if wf.basis is not Basis.P:
        raise DomainError("peak detection operates on p-basis wavefunctions")
    dens = wf.density()
    peak_height = dens.max()
    if peak_height == 0.0:
        raise DegenerateStateError("all-zero wavefunction has no peaks")
    idx, _ = find_peaks(dens, height=PEAK_THRESHOLD * peak_height)
    if idx.size == 0:
        raise DegenerateStateError(
            f"no interior density peak above {PEAK_THRESHOLD:.0%} of the maximum"
        )
    pts = wf.grid.points()
    # Watershed segment boundaries at the valleys between adjacent peaks.
    bounds = [0]
    for a, b in zip(idx[:-1], idx[1:]):
        bounds.append(a + int(np.argmin(dens[a:b + 1])))
    bounds.append(dens.size - 1)

    positions, widths = [], []
    for k, i in enumerate(idx):
        lo, hi = bounds[k], bounds[k + 1]
        seg_d = dens[lo:hi + 1]
        seg_p = pts[lo:hi + 1]
        total = seg_d.sum()
        centroid = float(np.sum(seg_p * seg_d) / total)
        var = float(np.sum((seg_p - centroid) ** 2 * seg_d) / total)
        delta, _ = _parabolic_refine(dens, i)
        positions.append(float(pts[i] + delta * wf.grid.spacing))
        widths.append(float(np.sqrt(2.0 * var)))
    return positions, widths


def fringe_metrics(wf: QuadratureWavefunction) -> tuple[float, float]:
    """(period, visibility) of the interference pattern in x.

    The period is twice the mean spacing of zero crossings of the real
    part inside the envelope; visibility is (max-min)/(max+min) of the
    density over the extrema adjacent to the central crest, with
    parabolic refinement of each extremum.
    """
    if wf.basis is not Basis.X:
        raise DomainError("fringe analysis operates on x-basis wavefunctions")
    dens = wf.density()
    peak_height = dens.max()
    if peak_height == 0.0:
        raise DegenerateStateError("all-zero wavefunction has no fringes")

    # Strip any global phase so the real part carries the oscillation.
    anchor = wf.values[int(np.argmax(dens))]
    re = (wf.values * np.exp(-1j * np.angle(anchor))).real

    magnitude = np.abs(wf.values)
    above = np.nonzero(magnitude >= _ENVELOPE_THRESHOLD * magnitude.max())[0]
    lo, hi = int(above[0]), int(above[-1])
    pts = wf.grid.points()

    seg_re = re[lo:hi + 1]
    seg_p = pts[lo:hi + 1]
    sign_flip = np.nonzero(seg_re[:-1] * seg_re[1:] < 0.0)[0]
    if sign_flip.size < 3:
        raise NoFringeError(
            f"only {sign_flip.size} zero crossings inside the envelope"
        )
    frac = seg_re[sign_flip] / (seg_re[sign_flip] - seg_re[sign_flip + 1])
    crossings = seg_p[sign_flip] + frac * wf.grid.spacing
    period = 2.0 * float(np.mean(np.diff(crossings)))

    seg_d = dens[lo:hi + 1]
    crest_rel, _ = find_peaks(seg_d)
    trough_rel, _ = find_peaks(-seg_d)
    if crest_rel.size == 0 or trough_rel.size == 0:
        raise NoFringeError("no alternating extrema inside the envelope")
    crest_i = crest_rel[int(np.argmin(np.abs(seg_p[crest_rel])))]
    _, crest_val = _parabolic_refine(seg_d, int(crest_i))
    adjacent = []
    left = trough_rel[trough_rel < crest_i]
    right = trough_rel[trough_rel > crest_i]
    if left.size:
        adjacent.append(int(left[-1]))
    if right.size:
        adjacent.append(int(right[0]))
    trough_val = min(
        max(0.0, _parabolic_refine(seg_d, i)[1]) for i in adjacent
    )
    visibility = (crest_val - trough_val) / (crest_val + trough_val)
    return period, float(np.clip(visibility, 0.0, 1.0))


def check_cat_conditions(mu: float, beta: float, xi2: float) -> tuple[bool, bool, bool]:
    """(resolvable, reachable, combined) observability conditions:
    mu >= 1/beta, mu <= xi2, beta*xi2 > 1."""
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    resolvable = mu >= 1.0 / beta
    reachable = mu <= xi2
    combined = beta * xi2 > 1.0
    return resolvable, reachable, combined


def overlap(wf_a: QuadratureWavefunction, wf_b: QuadratureWavefunction) -> float:
    """|Riemann inner product| of two wavefunctions on the same grid and
    basis; equals 1 for identical normalized states."""
    if wf_a.grid != wf_b.grid:
        raise DomainError("overlap requires identical grids")
    if wf_a.basis is not wf_b.basis:
        raise DomainError("overlap requires identical basis labels")
    inner = np.sum(np.conj(wf_a.values) * wf_b.values) * wf_a.grid.spacing
    return float(np.abs(inner))


def compute_cat_metrics(p_wf: QuadratureWavefunction, x_wf: QuadratureWavefunction,
                        mu: float, beta: float, xi2: float) -> CatMetrics:
    """Detector-driven metrics for a candidate cat state; peak and fringe
    fields degrade to None when the corresponding structure is absent."""
    resolvable, reachable, _ = check_cat_conditions(mu, beta, xi2)

    positions = std = separation = None
    try:
        found, widths = detect_peaks(p_wf)
        if len(found) == 2:
            positions = (found[0], found[1])
            std = 0.5 * (widths[0] + widths[1])
            separation = abs(found[1] - found[0])
    except DegenerateStateError:
        pass

    period = env_std = visibility = None
    try:
        period, visibility = fringe_metrics(x_wf)
    except (NoFringeError, DegenerateStateError):
        pass
    try:
        env_std = float(np.sqrt(2.0 * quadrature_moment(x_wf, order=2)))
    except DegenerateStateError:
        pass

    return CatMetrics(
        peak_positions=positions,
        peak_std=std,
        peak_separation=separation,
        fringe_period=period,
        envelope_std=env_std,
        visibility=visibility,
        resolvable=resolvable,
        reachable=reachable,
    )
