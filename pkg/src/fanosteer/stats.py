"""Estimation layer: agreement and domain probabilities from measured joints.

Extracts the statistics the Fano steering bounds consume, fits Gaussians to
marginal histograms to estimate domain probabilities, propagates counting
uncertainty through the bound, and solves the hedging problem of how small
the domain probabilities may get before certification is lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit, linear_sum_assignment
from scipy.special import ndtr

from .bounds import CorrelationStats, DetectorGeometry, fano_steering_lhs, steering_rhs
from .entropy import JointDistribution, ProbabilityVector, binary_entropy

ORDERING_IDENTITY = "identity"
ORDERING_REVERSED = "reversed-axis"
ORDERING_GENERAL = "general permutation"

HEDGE_RESOLUTION = 1e-4

# Least-squares settings for the marginal Gaussian fits: histogram-moment
# initial guess, relative parameter tolerance 1e-10, iteration cap 200.
FIT_XTOL = 1e-10
FIT_MAX_EVALS = 200 * 4

# eta*mu products are clamped away from {0, 1} before evaluating the
# diverging h2 derivative in the delta method.
DERIVATIVE_CLAMP = 1e-9


@dataclass(frozen=True)
class GaussianFit:
    """Parameters of a 1-D Gaussian fitted to a binned marginal.

    mean and sigma are in bin-index units; residual is the sum of squared
    residuals of the fit.
    """

    amplitude: float
    mean: float
    sigma: float
    residual: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")


@dataclass(frozen=True, eq=False)
class Ordering:
    """A relabeling of B outcomes onto A outcomes.

    ``permutation[i]`` is the A outcome paired with B outcome i; kind
    classifies it as the identity, the reversed axis, or a general
    permutation.
    """

    kind: str
    permutation: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (ORDERING_IDENTITY, ORDERING_REVERSED, ORDERING_GENERAL):
            raise ValueError(f"unknown ordering kind: {self.kind!r}")
        if self.permutation is not None:
            perm = np.asarray(self.permutation, dtype=int)
            if sorted(perm.tolist()) != list(range(perm.size)):
                raise ValueError("permutation must be a bijection on outcome indices")
            perm.setflags(write=False)
            object.__setattr__(self, "permutation", perm)


@dataclass(frozen=True, eq=False)
class ContourGrid:
    """Violation of the Fano steering bound over a grid of agreement values."""

    eta_x_values: np.ndarray
    eta_k_values: np.ndarray
    violation: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        ex = np.asarray(self.eta_x_values, dtype=float)
        ek = np.asarray(self.eta_k_values, dtype=float)
        v = np.asarray(self.violation, dtype=float)
        if v.shape != (ex.size, ek.size):
            raise ValueError("violation grid shape must be |eta_x| x |eta_k|")
        if self.sigma is not None and np.asarray(self.sigma).shape != v.shape:
            raise ValueError("sigma grid shape must match violation grid")
        for name, arr in (("eta_x_values", ex), ("eta_k_values", ek)):
            if arr.size and np.any(np.diff(arr) <= 0):
                raise ValueError(f"{name} must be strictly ascending")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "violation", v)


def _square_matrix(j: JointDistribution) -> np.ndarray:
    if not j.is_normalized:
        raise ValueError("agreement extraction requires a normalized joint")
    m = j.matrix
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"agreement requires a square matrix, got {m.shape}")
    return m


def agreement_identity(j: JointDistribution) -> float:
    """Total probability on the diagonal, P(A = B).

    A lower bound on the true agreement probability: any unmeasured
    diagonal element could only increase it.
    """
    return float(np.trace(_square_matrix(j)))


def agreement_reversed(j: JointDistribution) -> float:
    """Agreement after reversing the B axis, P(A = N-1-B).

    The natural ordering for anticorrelated observables such as the two
    momenta of a down-converted photon pair.
    """
    return float(np.trace(np.fliplr(_square_matrix(j))))


def agreement_best_ordering(j: JointDistribution) -> tuple[float, Ordering]:
    """Largest diagonal sum over all relabelings of the B outcomes.

    Solved exactly as a linear assignment problem. The result is never
    smaller than the identity or reversed-axis agreement.
    """
    m = _square_matrix(j)
    n = m.shape[0]
    rows, cols = linear_sum_assignment(m, maximize=True)
    value = float(m[rows, cols].sum())
    perm = np.empty(n, dtype=int)
    perm[cols] = rows
    if np.array_equal(perm, np.arange(n)):
        kind = ORDERING_IDENTITY
    elif np.array_equal(perm, np.arange(n)[::-1]):
        kind = ORDERING_REVERSED
    else:
        kind = ORDERING_GENERAL
    return value, Ordering(kind=kind, permutation=perm)


def _gaussian(x, amplitude, mean, sigma):
    return amplitude * np.exp(-((x - mean) ** 2) / (2.0 * sigma**2))


def domain_probability_from_fit(marginal, window_bin_count: int,
                                ) -> tuple[float, GaussianFit]:
    """Estimate the domain probability of a viewing window from a marginal.

    Fits an unweighted least-squares Gaussian to the binned marginal and
    compares its integral across the centered ``window_bin_count``-bin span
    against its integral over the whole real line (a normal-CDF ratio).

    Args:
        marginal: binned marginal histogram (ProbabilityVector or array),
            needing at least 4 nonzero bins for the fit to be identifiable.
        window_bin_count: number of bins in the viewing window, at most the
            length of the marginal.

    Returns:
        (domain probability, GaussianFit in bin-index units)
    """
    if isinstance(marginal, ProbabilityVector):
        w = np.asarray(marginal.weights, dtype=float)
    else:
        w = np.asarray(marginal, dtype=float)
    if w.ndim != 1:
        raise ValueError("marginal must be one-dimensional")
    if np.count_nonzero(w > 0) < 4:
        raise ValueError("marginal needs at least 4 nonzero bins to fit")
    if not 1 <= window_bin_count <= w.size:
        raise ValueError("window_bin_count must lie within the marginal's extent")

    x = np.arange(w.size, dtype=float)
    total = w.sum()
    mean0 = float((x * w).sum() / total)
    var0 = float(((x - mean0) ** 2 * w).sum() / total)
    p0 = (float(w.max()), mean0, max(math.sqrt(var0), 0.5))
    try:
        popt, _ = curve_fit(_gaussian, x, w, p0=p0, xtol=FIT_XTOL,
                            maxfev=FIT_MAX_EVALS)
    except RuntimeError as err:
        raise RuntimeError(f"gaussian fit did not converge: {err}") from err
    amplitude, mean, sigma = popt
    sigma = abs(float(sigma))
    residual = float(((w - _gaussian(x, *popt)) ** 2).sum())
    fit = GaussianFit(amplitude=abs(float(amplitude)), mean=float(mean),
                      sigma=sigma, residual=residual)

    # window edges in bin-index coordinates, bin i spanning [i-1/2, i+1/2]
    lo = (w.size - window_bin_count) / 2.0 - 0.5
    hi = lo + window_bin_count
    mu = float(ndtr((hi - fit.mean) / fit.sigma) - ndtr((lo - fit.mean) / fit.sigma))
    return mu, fit


def effective_domain(mu: float, fill: float, efficiency: float) -> float:
    """Domain probability corrected for dead space and detection efficiency."""
    for name, v in (("mu", mu), ("fill", fill), ("efficiency", efficiency)):
        if not 0 < v <= 1:
            raise ValueError(f"{name} must lie in (0, 1]")
    return mu * fill * efficiency


def _lhs_partial(eta_bar: float, mu: float, n_bar: int) -> float:
    # d(lhs)/d(eta_bar) = mu * [log2((1-p)/p) - log2(n_bar - 1)], p = eta_bar*mu
    p = min(max(eta_bar * mu, DERIVATIVE_CLAMP), 1.0 - DERIVATIVE_CLAMP)
    return mu * (math.log2((1.0 - p) / p) - math.log2(n_bar - 1))


def lhs_std(s: CorrelationStats, n_bar: int) -> float:
    """Delta-method standard deviation of the Fano steering lhs, in bits.

    Treats each measured agreement probability as a binomial proportion with
    variance eta(1-eta)/n and combines the analytic partial derivatives in
    quadrature. Domain probabilities are treated as exact.
    """
    if s.n_coinc_x is None or s.n_coinc_k is None:
        raise ValueError("lhs_std requires coincidence counts in the stats")
    var = 0.0
    for eta, mu, n in ((s.eta_x_bar, s.mu_x, s.n_coinc_x),
                       (s.eta_k_bar, s.mu_k, s.n_coinc_k)):
        var += _lhs_partial(eta, mu, n_bar) ** 2 * eta * (1.0 - eta) / n
    return math.sqrt(var)


def _certifies(eta_x: float, eta_k: float, mu_x: float, mu_k: float,
               n_bar: int, rhs_bits: float) -> bool:
    stats = CorrelationStats(eta_x_bar=eta_x, eta_k_bar=eta_k, mu_x=mu_x, mu_k=mu_k)
    lhs, applicable = fano_steering_lhs(stats, n_bar)
    return applicable and (rhs_bits - lhs) > 0


def hedge_min_domain(eta_x_bar: float, eta_k_bar: float, n_bar: int,
                     rhs_bits: float, mode: str = "common",
                     fixed_mu: float = 1.0) -> float:
    """Smallest domain probability that still certifies steering.

    Scans mu downward from 1 at resolution 1e-4 and returns the last value
    at which the certificate still violates with the applicability condition
    intact, so the answer does not rely on the bound being monotone in mu.

    mode "common" lowers mu_x and mu_k together; modes "x" and "k" lower
    one axis while the other is held at ``fixed_mu``.
    """
    if mode not in ("common", "x", "k"):
        raise ValueError("mode must be one of 'common', 'x', 'k'")

    def mus(mu: float) -> tuple[float, float]:
        if mode == "common":
            return mu, mu
        if mode == "x":
            return mu, fixed_mu
        return fixed_mu, mu

    if rhs_bits <= 0:
        raise ValueError("no hedge possible: uncertainty bound is nonpositive")
    if not _certifies(eta_x_bar, eta_k_bar, *mus(1.0), n_bar, rhs_bits):
        raise ValueError("no hedge possible: no violation even at mu = 1")

    steps = int(round(1.0 / HEDGE_RESOLUTION))
    last = 1.0
    for k in range(steps, 0, -1):
        mu = k * HEDGE_RESOLUTION
        if _certifies(eta_x_bar, eta_k_bar, *mus(mu), n_bar, rhs_bits):
            last = mu
        else:
            break
    return last


def contour_grid(g: DetectorGeometry, mu_x: float, mu_k: float,
                 resolution: int, counts: tuple[int, int] | None = None,
                 ) -> ContourGrid:
    """Violation of the Fano steering bound over the applicable agreement region.

    Evaluates rhs - lhs on a regular grid of measured agreement
    probabilities covering the applicable region (both eta*mu products at
    least 1/2). The zero level set of the result is the certification
    threshold; with ``counts`` given, a matching grid of delta-method
    standard deviations is evaluated for sigma-offset contours. Evaluation
    is cell-independent, so the output does not depend on evaluation order.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    for name, mu in (("mu_x", mu_x), ("mu_k", mu_k)):
        if not 0 < mu <= 1:
            raise ValueError(f"{name} must lie in (0, 1]")
    lo_x = 0.5 / mu_x
    lo_k = 0.5 / mu_k
    if lo_x >= 1.0 or lo_k >= 1.0:
        raise ValueError("empty applicable region: domain probability below 1/2")

    eta_x = np.linspace(lo_x, 1.0, resolution)
    eta_k = np.linspace(lo_k, 1.0, resolution)
    rhs = steering_rhs(g)
    log_n = math.log2(g.n_bar - 1)
    geo = (binary_entropy(mu_x) / mu_x) + (binary_entropy(mu_k) / mu_k)

    px = eta_x * mu_x
    pk = eta_k * mu_k
    lhs = (binary_entropy(px)[:, None] + binary_entropy(pk)[None, :]
           + geo + (2.0 - px[:, None] - pk[None, :]) * log_n)
    violation = rhs - lhs

    sigma = None
    if counts is not None:
        n_x, n_k = counts
        dx = mu_x * (np.log2((1.0 - np.clip(px, DERIVATIVE_CLAMP, 1 - DERIVATIVE_CLAMP))
                             / np.clip(px, DERIVATIVE_CLAMP, 1 - DERIVATIVE_CLAMP)) - log_n)
        dk = mu_k * (np.log2((1.0 - np.clip(pk, DERIVATIVE_CLAMP, 1 - DERIVATIVE_CLAMP))
                             / np.clip(pk, DERIVATIVE_CLAMP, 1 - DERIVATIVE_CLAMP)) - log_n)
        var = (dx**2 * eta_x * (1.0 - eta_x) / n_x)[:, None] \
            + (dk**2 * eta_k * (1.0 - eta_k) / n_k)[None, :]
        sigma = np.sqrt(var)

    return ContourGrid(eta_x_values=eta_x, eta_k_values=eta_k,
                       violation=violation, sigma=sigma)
