"""Synthetic biphoton joint distributions for validating the steering bounds.

Models the transverse position and momentum correlations of a
down-converted photon pair as a double Gaussian: independent Gaussian modes
in the rotated sum and difference coordinates. The momentum distribution is
the Fourier conjugate, anticorrelated (k_A close to -k_B) whenever the
positions are correlated. Because the full distribution is known in closed
form, the simulator supplies ground truth (exact window masses, exact
conditional entropies) for oracle tests of every bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np
from scipy.special import ndtr

from .entropy import JointDistribution

# Pixel masses come from slice quadrature: per pixel, 8 subintervals of
# 8-point Gauss-Legendre along one axis with the exact conditional normal
# CDF difference along the other (8x8 nodes per pixel).
_QUAD_SUBDIV = 8
_QUAD_POINTS = 8


@dataclass(frozen=True)
class BiphotonModel:
    """Double-Gaussian biphoton state on a square pixel grid.

    sigma_plus and sigma_minus are the standard deviations of the rotated
    position modes (x_A + x_B)/sqrt(2) and (x_A - x_B)/sqrt(2); equal widths
    give an unentangled product state, sigma_plus >> sigma_minus a strongly
    position-correlated pair. The position grid spans +-grid_extent with
    pixels_per_axis pixels per arm; the momentum grid defaults to the same
    relative coverage of its own marginal width.
    """

    sigma_plus: float = 10.0
    sigma_minus: float = 0.1
    grid_extent: float = 35.0
    pixels_per_axis: int = 64
    momentum_extent: float | None = None

    def __post_init__(self):
        if not self.sigma_minus > 0 or self.sigma_plus < self.sigma_minus:
            raise ValueError("need sigma_plus >= sigma_minus > 0")
        if not self.grid_extent > 0:
            raise ValueError("grid_extent must be positive")
        if int(self.pixels_per_axis) != self.pixels_per_axis or self.pixels_per_axis < 2:
            raise ValueError("pixels_per_axis must be an integer >= 2")
        if self.momentum_extent is not None and not self.momentum_extent > 0:
            raise ValueError("momentum_extent must be positive")


def position_mode_widths(m: BiphotonModel) -> tuple[float, float]:
    """(sum-mode width, difference-mode width) of the position distribution."""
    return m.sigma_plus, m.sigma_minus


def momentum_mode_widths(m: BiphotonModel) -> tuple[float, float]:
    """(sum-mode width, difference-mode width) of the momentum distribution.

    Fourier conjugation maps the position mode widths (s+, s-) to momentum
    mode widths (1/(2 s+), 1/(2 s-)): a wide position sum mode becomes a
    narrow momentum sum mode, which is the anticorrelation k_A ~ -k_B.
    """
    return 1.0 / (2.0 * m.sigma_plus), 1.0 / (2.0 * m.sigma_minus)


def position_marginal_std(m: BiphotonModel) -> float:
    s, d = position_mode_widths(m)
    return sqrt((s * s + d * d) / 2.0)


def momentum_marginal_std(m: BiphotonModel) -> float:
    s, d = momentum_mode_widths(m)
    return sqrt((s * s + d * d) / 2.0)


def _momentum_extent(m: BiphotonModel) -> float:
    if m.momentum_extent is not None:
        return m.momentum_extent
    return m.grid_extent * momentum_marginal_std(m) / position_marginal_std(m)


def _pixelize(sum_width: float, diff_width: float, extent: float,
              pixels: int) -> np.ndarray:
    """Pixel-integrated masses of exp(-(a+b)^2/(4 ss^2) - (a-b)^2/(4 sd^2)).

    The density is a centered bivariate normal; each cell mass is the
    integral of the conditional CDF difference along one axis against
    Gauss-Legendre nodes along the other. The upper triangle is mirrored,
    which is exact because the density is symmetric under exchanging the
    two arms.
    """
    edges = np.linspace(-extent, extent, pixels + 1)
    var_marginal = (sum_width**2 + diff_width**2) / 2.0
    rho = (sum_width**2 - diff_width**2) / (sum_width**2 + diff_width**2)
    cond_std = sqrt(var_marginal * max(1.0 - rho * rho, 0.0))
    if cond_std == 0.0:
        raise ValueError("degenerate grid: conditional width underflowed")

    nodes, weights = np.polynomial.legendre.leggauss(_QUAD_POINTS)
    sub = np.linspace(0.0, 1.0, _QUAD_SUBDIV + 1)
    offsets = (sub[:-1, None] + np.diff(sub)[:, None] * (nodes[None, :] + 1) / 2).ravel()
    wts = (np.diff(sub)[:, None] * weights[None, :] / 2).ravel()

    widths = np.diff(edges)
    xs = edges[:-1, None] + widths[:, None] * offsets[None, :]
    ws = widths[:, None] * wts[None, :]
    density = np.exp(-(xs**2) / (2.0 * var_marginal)) / sqrt(2.0 * pi * var_marginal)

    z = (edges[None, None, :] - rho * xs[:, :, None]) / cond_std
    conditional = np.diff(ndtr(z), axis=2)
    cells = np.einsum("ik,ik,ikj->ij", density, ws, conditional)

    upper = np.triu_indices(pixels, 1)
    cells[(upper[1], upper[0])] = cells[upper]
    return cells


def _build_joint(sum_width: float, diff_width: float, extent: float,
                 pixels: int, axis_a: str, axis_b: str) -> JointDistribution:
    cells = _pixelize(sum_width, diff_width, extent, pixels)
    coverage = float(cells.sum())
    if coverage <= 0:
        raise ValueError("grid captures no probability mass")
    width = 2.0 * extent / pixels
    return JointDistribution(cells / coverage, width, width,
                             mass=min(coverage, 1.0), axis_a=axis_a, axis_b=axis_b)


def joint_position_distribution(m: BiphotonModel) -> JointDistribution:
    """Pixel-integrated joint position distribution of the pair.

    The matrix is normalized over the grid; the ``mass`` field records how
    much of the all-space probability the grid captures.
    """
    return _build_joint(m.sigma_plus, m.sigma_minus, m.grid_extent,
                        m.pixels_per_axis, "x_A", "x_B")


def joint_momentum_distribution(m: BiphotonModel) -> JointDistribution:
    """Pixel-integrated joint momentum distribution (Fourier conjugate).

    Anticorrelated for sigma_plus > sigma_minus, so high agreement shows up
    on the reversed axis rather than the identity diagonal.
    """
    sum_w, diff_w = momentum_mode_widths(m)
    return _build_joint(sum_w, diff_w, _momentum_extent(m),
                        m.pixels_per_axis, "k_A", "k_B")


def truncate_to_window(full: JointDistribution, window_pixels: int,
                       ) -> tuple[JointDistribution, float]:
    """Restrict a joint to a centered window of window_pixels per arm.

    Returns the windowed, renormalized joint together with the exact
    probability mu_true that a pair lands inside both windows, measured
    against the full underlying distribution (the input's ``mass`` keeps
    that bookkeeping exact under repeated windowing).
    """
    if not full.is_normalized:
        raise ValueError("truncation requires a normalized joint")
    n_a, n_b = full.shape
    if n_a != n_b:
        raise ValueError("windowing requires a square joint")
    if not 1 <= window_pixels <= n_a:
        raise ValueError("window exceeds the grid")
    if (n_a - window_pixels) % 2 != 0:
        raise ValueError("window cannot be centered on this grid")
    lo = (n_a - window_pixels) // 2
    hi = lo + window_pixels
    block = full.matrix[lo:hi, lo:hi]
    inside = float(block.sum())
    if inside <= 0:
        raise ValueError("window captures no probability mass")
    mu_true = full.mass * inside
    windowed = JointDistribution(block / inside, full.bin_width_a,
                                 full.bin_width_b, mass=mu_true,
                                 axis_a=full.axis_a, axis_b=full.axis_b)
    return windowed, mu_true


def apply_dead_space(j: JointDistribution, fill_a: float, fill_b: float,
                     ) -> JointDistribution:
    """Scale the detected mass by the product of the two arms' fill factors.

    Dead space between pixels is modeled as uniform loss, so the output is
    an unnormalized joint whose total mass is fill_a * fill_b times the
    input's; renormalizing recovers the input distribution.
    """
    for name, fill in (("fill_a", fill_a), ("fill_b", fill_b)):
        if not 0 < fill <= 1:
            raise ValueError(f"{name} must lie in (0, 1]")
    if fill_a * fill_b == 1.0:
        return j
    return JointDistribution(j.matrix * (fill_a * fill_b), j.bin_width_a,
                             j.bin_width_b, mass=j.mass,
                             axis_a=j.axis_a, axis_b=j.axis_b)


@dataclass(frozen=True, eq=False)
class CountMatrix:
    """Multinomial coincidence counts drawn from a joint distribution."""

    counts: np.ndarray
    total: int
    seed: int

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 2 or np.any(c < 0):
            raise ValueError("counts must be a nonnegative 2-D matrix")
        if int(c.sum()) != self.total:
            raise ValueError("counts must sum to total")
        c = np.array(c, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)


def sample_counts(j: JointDistribution, total: int, seed: int) -> CountMatrix:
    """Draw a multinomial count matrix from a normalized joint.

    Deterministic for a fixed seed; the seed is recorded in the result so
    every downstream artifact can reproduce the draw.
    """
    if not j.is_normalized:
        raise ValueError("sampling requires a normalized joint")
    if total < 1:
        raise ValueError("total must be at least 1")
    rng = np.random.default_rng(seed)
    flat = rng.multinomial(total, j.matrix.ravel())
    return CountMatrix(counts=flat.reshape(j.shape), total=int(total), seed=int(seed))


def counts_to_joint(cm: CountMatrix, like: JointDistribution) -> JointDistribution:
    """Empirical joint from a count matrix, inheriting widths and labels."""
    return JointDistribution.from_counts(cm.counts, like.bin_width_a,
                                         like.bin_width_b, mass=like.mass,
                                         axis_a=like.axis_a, axis_b=like.axis_b)


def threshold_renormalize(j: JointDistribution, fraction: float = 0.1,
                          ) -> JointDistribution:
    """Zero all entries below fraction * max, then renormalize.

    The standard cleanup for reconstructed joints with a uniform noise
    floor. fraction = 0 leaves the input untouched.
    """
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1]")
    m = j.matrix
    peak = m.max()
    if peak <= 0:
        raise ValueError("thresholding requires a positive maximum")
    below = (m < fraction * peak) & (m > 0)
    if not below.any():
        return j
    kept = np.where(below, 0.0, m)
    remaining = kept.sum()
    if remaining <= 0:
        raise ValueError("thresholding removed all probability mass")
    return JointDistribution(kept / remaining, j.bin_width_a, j.bin_width_b,
                             mass=j.mass, axis_a=j.axis_a, axis_b=j.axis_b)
