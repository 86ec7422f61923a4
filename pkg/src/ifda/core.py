"""Interval data model and its metric structure.

Observations are p-dimensional intervals stored as centre/range matrices.
Distances between them use the closed-form squared Mallows (L2-Wasserstein)
distance induced by a latent microdata variable on [-1, 1]: a centre term,
a range term weighted by second-moment coefficients, and (in the general
non-symmetric case) a centre-range cross term.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import norm

from .errors import (
    DimensionMismatchError,
    EmptySubsetError,
    MissingLabelsError,
    NegativeWidthError,
    ShapeMismatchError,
    UnknownDistributionError,
)

DELTA_MAX = 0.25


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class IntervalFrame:
    """n x p interval observations as centre and range matrices.

    ``labels`` is an optional length-n vector of class identifiers;
    ``variable_names`` defaults to x1..xp.
    """

    centres: np.ndarray
    ranges: np.ndarray
    labels: np.ndarray | None = None
    variable_names: tuple[str, ...] | None = None

    def __post_init__(self):
        centres = np.asarray(self.centres, dtype=float)
        ranges = np.asarray(self.ranges, dtype=float)
        if centres.ndim != 2 or ranges.ndim != 2:
            raise ShapeMismatchError("centres and ranges must be 2-D matrices")
        if centres.shape != ranges.shape:
            raise ShapeMismatchError(
                f"centres shape {centres.shape} != ranges shape {ranges.shape}"
            )
        if np.any(ranges < 0):
            raise NegativeWidthError("every range entry must be >= 0")
        object.__setattr__(self, "centres", _freeze(centres))
        object.__setattr__(self, "ranges", _freeze(ranges))
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (centres.shape[0],):
                raise ShapeMismatchError(
                    f"labels must have length {centres.shape[0]}, got {labels.shape}"
                )
            labels = labels.copy()
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)
        names = self.variable_names
        if names is None:
            names = tuple(f"x{i + 1}" for i in range(centres.shape[1]))
        else:
            names = tuple(str(v) for v in names)
            if len(names) != centres.shape[1]:
                raise ShapeMismatchError(
                    f"expected {centres.shape[1]} variable names, got {len(names)}"
                )
        object.__setattr__(self, "variable_names", names)

    @property
    def n(self) -> int:
        return self.centres.shape[0]

    @property
    def p(self) -> int:
        return self.centres.shape[1]

    def classes(self) -> np.ndarray:
        """Distinct class labels in sorted order."""
        if self.labels is None:
            raise MissingLabelsError("frame has no labels")
        return np.unique(self.labels)

    def subset(self, index) -> "IntervalFrame":
        index = np.asarray(index)
        labels = self.labels[index] if self.labels is not None else None
        return IntervalFrame(
            self.centres[index], self.ranges[index], labels, self.variable_names
        )

    def lower(self) -> np.ndarray:
        return self.centres - self.ranges / 2.0

    def upper(self) -> np.ndarray:
        return self.centres + self.ranges / 2.0


def from_bounds(lower, upper, labels=None, variable_names=None) -> IntervalFrame:
    """Build a frame from lower/upper bound matrices (c=(a+b)/2, r=b-a)."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.ndim != 2 or upper.ndim != 2 or lower.shape != upper.shape:
        raise ShapeMismatchError(
            f"bound shapes differ: {lower.shape} vs {upper.shape}"
        )
    if np.any(upper < lower):
        bad = np.argwhere(upper < lower)[0]
        raise NegativeWidthError(
            f"upper < lower at row {bad[0]}, column {bad[1]}"
        )
    return IntervalFrame((lower + upper) / 2.0, upper - lower, labels, variable_names)


class NamedDistribution(str, Enum):
    """Symmetric microdata distributions with known range coefficients."""

    TWO_POINT_UNIFORM = "two_point_uniform"
    INVERSE_TRIANGULAR = "inverse_triangular"
    CONTINUOUS_UNIFORM = "continuous_uniform"
    TRIANGULAR = "triangular"
    TRUNCATED_NORMAL_1_9 = "truncated_normal_1_9"
    DEGENERATE = "degenerate"


def _truncated_normal_delta() -> float:
    # Var[U]/4 for N(0, 1/9) truncated to [-1, 1]; evaluated, not hard-coded.
    return 1.0 / 36.0 - norm.pdf(3.0) / (6.0 * (2.0 * norm.cdf(3.0) - 1.0))


def delta_of(dist) -> float:
    """Range coefficient Var[U]/4 for a named symmetric microdata law."""
    try:
        dist = NamedDistribution(dist)
    except ValueError:
        raise UnknownDistributionError(f"unknown distribution {dist!r}") from None
    if dist is NamedDistribution.TWO_POINT_UNIFORM:
        return 1.0 / 4.0
    if dist is NamedDistribution.INVERSE_TRIANGULAR:
        return 1.0 / 8.0
    if dist is NamedDistribution.CONTINUOUS_UNIFORM:
        return 1.0 / 12.0
    if dist is NamedDistribution.TRIANGULAR:
        return 1.0 / 24.0
    if dist is NamedDistribution.TRUNCATED_NORMAL_1_9:
        return _truncated_normal_delta()
    return 0.0


@dataclass(frozen=True)
class LatentSpec:
    """Microdata assumption behind the Mallows distance.

    Either a single symmetric coefficient ``delta`` = Var[U]/4, or
    per-variable diagonals: ``range_weights`` = E[U_i^2]/4 in [0, 1/4] and
    ``cross_weights`` = E[U_i] in [-1, 1].
    """

    delta: float | None = None
    range_weights: np.ndarray | None = None
    cross_weights: np.ndarray | None = None

    def __post_init__(self):
        if self.delta is not None:
            if self.range_weights is not None or self.cross_weights is not None:
                raise ShapeMismatchError(
                    "symmetric spec takes delta only; general spec takes the two diagonals"
                )
            if not 0.0 <= self.delta <= DELTA_MAX:
                raise ShapeMismatchError(f"delta must lie in [0, 1/4], got {self.delta}")
            return
        if self.range_weights is None or self.cross_weights is None:
            raise ShapeMismatchError("general spec needs both moment diagonals")
        rw = np.asarray(self.range_weights, dtype=float)
        cw = np.asarray(self.cross_weights, dtype=float)
        if rw.ndim != 1 or rw.shape != cw.shape:
            raise ShapeMismatchError("moment diagonals must be 1-D and equally long")
        if np.any(rw < 0) or np.any(rw > DELTA_MAX):
            raise ShapeMismatchError("each E[U^2]/4 entry must lie in [0, 1/4]")
        if np.any(np.abs(cw) > 1.0):
            raise ShapeMismatchError("each E[U] entry must lie in [-1, 1]")
        # Var[U_i] >= 0  <=>  E[U_i]^2 <= E[U_i^2] = 4 * range_weight_i
        if np.any(cw**2 > 4.0 * rw + 1e-15):
            raise ShapeMismatchError("E[U]^2 must not exceed E[U^2]")
        object.__setattr__(self, "range_weights", _freeze(rw))
        object.__setattr__(self, "cross_weights", _freeze(cw))

    @property
    def is_symmetric(self) -> bool:
        return self.delta is not None

    @classmethod
    def symmetric(cls, delta: float) -> "LatentSpec":
        return cls(delta=float(delta))

    @classmethod
    def general(cls, range_weights, cross_weights) -> "LatentSpec":
        return cls(range_weights=range_weights, cross_weights=cross_weights)


def _as_spec(spec) -> LatentSpec:
    if isinstance(spec, LatentSpec):
        return spec
    return LatentSpec.symmetric(float(spec))


def mallows_sq(c1, r1, c2, r2, spec) -> float:
    """Squared Mallows distance between two interval vectors.

    ``spec`` is a LatentSpec or a bare symmetric delta. The general form is
    (c1-c2)'(c1-c2) + (r1-r2)' Delta (r1-r2) + (c1-c2)' Psi (r1-r2).
    """
    c1 = np.asarray(c1, dtype=float).ravel()
    r1 = np.asarray(r1, dtype=float).ravel()
    c2 = np.asarray(c2, dtype=float).ravel()
    r2 = np.asarray(r2, dtype=float).ravel()
    if not (c1.shape == r1.shape == c2.shape == r2.shape):
        raise DimensionMismatchError("interval vectors must share one length")
    dc = c1 - c2
    dr = r1 - r2
    spec = _as_spec(spec)
    if spec.is_symmetric:
        return float(dc @ dc + spec.delta * (dr @ dr))
    if spec.range_weights.shape[0] != c1.shape[0]:
        raise DimensionMismatchError(
            f"spec diagonals have length {spec.range_weights.shape[0]}, vectors {c1.shape[0]}"
        )
    return float(dc @ dc + dr @ (spec.range_weights * dr) + dc @ (spec.cross_weights * dr))


def barycentre(frame: IntervalFrame, subset=None) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise mean interval (minimizer of the summed squared distances)."""
    if subset is None:
        centres, ranges = frame.centres, frame.ranges
    else:
        subset = np.asarray(subset)
        if subset.size == 0:
            raise EmptySubsetError("barycentre of an empty subset")
        centres, ranges = frame.centres[subset], frame.ranges[subset]
    if centres.shape[0] == 0:
        raise EmptySubsetError("barycentre of an empty subset")
    return centres.mean(axis=0), ranges.mean(axis=0)


def moore_project(alpha, frame: IntervalFrame) -> tuple[np.ndarray, np.ndarray]:
    """Project every row onto alpha: centres alpha'c, ranges |alpha|'r."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.shape[0] != frame.p:
        raise DimensionMismatchError(
            f"alpha has length {alpha.shape[0]}, frame has p={frame.p}"
        )
    return frame.centres @ alpha, frame.ranges @ np.abs(alpha)


def inertia(frame: IntervalFrame, delta: float) -> tuple[float, float, float]:
    """Total / between / within inertia of a labelled frame (TI = BI + WI)."""
    if frame.labels is None:
        raise MissingLabelsError("inertia needs class labels")
    if not 0.0 <= delta <= DELTA_MAX:
        raise ShapeMismatchError(f"delta must lie in [0, 1/4], got {delta}")
    c_all, r_all = barycentre(frame)
    ti = 0.0
    for h in range(frame.n):
        ti += mallows_sq(frame.centres[h], frame.ranges[h], c_all, r_all, delta)
    bi = 0.0
    wi = 0.0
    for label in frame.classes():
        members = np.flatnonzero(frame.labels == label)
        c_j, r_j = barycentre(frame, members)
        bi += members.size * mallows_sq(c_j, r_j, c_all, r_all, delta)
        for h in members:
            wi += mallows_sq(frame.centres[h], frame.ranges[h], c_j, r_j, delta)
    return ti, bi, wi
