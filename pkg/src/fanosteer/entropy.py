"""Shannon-entropy kernels for discretized continuous-variable measurement data.

All entropies are in bits (logarithms base 2). Distributions are classical
measurement probabilities; zero-probability outcomes contribute nothing to
any sum. Inputs are validated against a fixed normalization tolerance so
that measurement data (counts, normalized on ingest) is distinguished from
corrupt inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORMALIZATION_TOL = 1e-9


def _as_prob_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(arr < 0):
        raise ValueError(f"{name} contains negative entries")
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """A 1-D outcome distribution, either normalized or raw counts.

    Counts form is flagged with ``is_counts``; everything that computes an
    entropy requires the normalized form. ``bin_width`` is the physical
    width per bin for discretized continuous observables (dimensionless
    position or momentum units).
    """

    weights: np.ndarray
    bin_width: float | None = None
    is_counts: bool = False

    def __post_init__(self):
        w = _as_prob_array(self.weights, "weights").ravel()
        if w.size == 0:
            raise ValueError("empty distribution")
        total = w.sum()
        if self.is_counts:
            if total <= 0:
                raise ValueError("counts form requires positive total")
        else:
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise ValueError(
                    f"weights sum to {total!r}, outside normalization tolerance"
                )
            w = w / total
        if self.bin_width is not None and not self.bin_width > 0:
            raise ValueError("bin_width must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.size

    def normalized(self) -> "ProbabilityVector":
        """Return the normalized form (identity if already normalized)."""
        if not self.is_counts:
            return self
        return ProbabilityVector(self.weights / self.weights.sum(), self.bin_width)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """A joint outcome matrix P[a, b] with per-axis bin widths.

    The matrix is renormalized exactly when its sum is within tolerance of
    one; anything else is stored as-is and flagged unnormalized (raw counts
    or uniformly scaled data), in which case entropy operations reject it.

    ``mass`` records the fraction of the underlying distribution's total
    probability that this (renormalized) matrix accounts for, e.g. after
    windowing a wider distribution. ``total_counts`` preserves the number
    of coincidences behind an empirical matrix.
    """

    matrix: np.ndarray
    bin_width_a: float
    bin_width_b: float
    total_counts: int | None = None
    mass: float = 1.0
    axis_a: str = "A"
    axis_b: str = "B"

    def __post_init__(self):
        m = _as_prob_array(self.matrix, "matrix")
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError("matrix must be 2-D with at least one outcome per axis")
        total = m.sum()
        if abs(total - 1.0) <= NORMALIZATION_TOL and total > 0:
            m = m / total
        m = np.array(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if not (self.bin_width_a > 0 and self.bin_width_b > 0):
            raise ValueError("bin widths must be positive")
        if not 0 < self.mass <= 1 + NORMALIZATION_TOL:
            raise ValueError("mass must lie in (0, 1]")
        if self.total_counts is not None and self.total_counts < 0:
            raise ValueError("total_counts must be nonnegative")

    @classmethod
    def from_counts(cls, counts, bin_width_a: float, bin_width_b: float,
                    mass: float = 1.0, axis_a: str = "A", axis_b: str = "B",
                    ) -> "JointDistribution":
        c = _as_prob_array(counts, "counts")
        total = c.sum()
        if total <= 0:
            raise ValueError("counts must have positive total")
        return cls(c / total, bin_width_a, bin_width_b,
                   total_counts=int(round(total)), mass=mass,
                   axis_a=axis_a, axis_b=axis_b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def is_normalized(self) -> bool:
        return abs(self.matrix.sum() - 1.0) <= NORMALIZATION_TOL

    def normalized(self) -> "JointDistribution":
        if self.is_normalized:
            return self
        return JointDistribution(self.matrix / self.matrix.sum(),
                                 self.bin_width_a, self.bin_width_b,
                                 total_counts=self.total_counts, mass=self.mass,
                                 axis_a=self.axis_a, axis_b=self.axis_b)


def _require_normalized(j: JointDistribution):
    if not j.is_normalized:
        raise ValueError("operation requires a normalized joint distribution")


def marginal_a(j: JointDistribution) -> ProbabilityVector:
    _require_normalized(j)
    return ProbabilityVector(j.matrix.sum(axis=1), j.bin_width_a)


def marginal_b(j: JointDistribution) -> ProbabilityVector:
    _require_normalized(j)
    return ProbabilityVector(j.matrix.sum(axis=0), j.bin_width_b)


def _plogp_sum(p: np.ndarray) -> float:
    # 0 * log 0 handled by masking, keeping NaN out of the sum
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def binary_entropy(p):
    """Binary entropy h2(p) = -p log2 p - (1-p) log2(1-p), in bits.

    Accepts a scalar or an array; endpoints evaluate to exactly zero.
    """
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("binary_entropy requires probabilities in [0, 1]")
    interior = (arr > 0) & (arr < 1)
    out = np.zeros_like(arr)
    q = arr[interior]
    out[interior] = -q * np.log2(q) - (1 - q) * np.log2(1 - q)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def shannon_entropy(d) -> float:
    """Shannon entropy of a normalized distribution, in bits."""
    if isinstance(d, ProbabilityVector):
        if d.is_counts:
            raise ValueError("normalize counts before computing entropy")
        w = d.weights
    else:
        w = _as_prob_array(d, "distribution").ravel()
        if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError("distribution is not normalized")
    return _plogp_sum(w)


def joint_entropy(j: JointDistribution) -> float:
    _require_normalized(j)
    return _plogp_sum(j.matrix)


def conditional_entropy(j: JointDistribution) -> float:
    """H(B|A) = H(A,B) - H(A) from the joint matrix P[a, b], in bits.

    This is the brute-force conditional entropy that Fano-style bounds are
    checked against.
    """
    _require_normalized(j)
    return joint_entropy(j) - _plogp_sum(j.matrix.sum(axis=1))


def mutual_information(j: JointDistribution) -> float:
    """H(A) + H(B) - H(A,B) >= 0, in bits (tiny negative rounding clipped)."""
    _require_normalized(j)
    m = j.matrix
    value = _plogp_sum(m.sum(axis=1)) + _plogp_sum(m.sum(axis=0)) - _plogp_sum(m)
    return max(value, 0.0)


def differential_entropy_upper_estimate(h_discrete: float, bin_width: float) -> float:
    """Upper estimate h <= H + log2(bin width) for a binned density.

    The discrete entropy of a binned probability density is never less than
    the differential entropy of the density itself once the bin-width term
    is added, so this estimate bounds the underlying conditional or
    marginal differential entropy from above.
    """
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    return h_discrete + math.log2(bin_width)


def geometric_entropy_bound(mu: float) -> float:
    """Entropy h2(mu)/mu of a geometric distribution with success probability mu.

    This is the maximum entropy of a distribution over the nonnegative
    integers with P(0) = mu, provided its mean does not exceed the
    geometric's mean (1 - mu)/mu. It bounds the entropy of the window-index
    variable in the modified Fano inequality.
    """
    if not 0 < mu <= 1:
        raise ValueError("mu must lie in (0, 1]")
    if mu == 1.0:
        return 0.0
    return binary_entropy(mu) / mu


def gaussian_differential_entropy(sigma: float) -> float:
    """Differential entropy of a normal density with standard deviation sigma."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return 0.5 * math.log2(2.0 * math.pi * math.e * sigma * sigma)
