"""Scatter matrices, the interval Fisher ratio, and the discriminant basis.

The ratio to maximize is

    xi(a) = (a'Bc a + delta |a|'Br |a|) / (a'Wc a + delta |a|'Wr |a|)

subject to a'Ma = 1 and M-orthogonality to previously found directions,
where M is either the identity or the pooled centre scatter Wc/(n-g).
Directions are found sequentially with SLSQP using the analytic gradient
(sgn(0) := 1 for the absolute-value terms) and a seeded multistart.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from .core import DELTA_MAX, IntervalFrame, barycentre
from .errors import (
    DegenerateDenominatorError,
    DimensionMismatchError,
    MissingLabelsError,
    ShapeMismatchError,
    SingleClassError,
    SingularMatrixError,
    SolverFailureError,
)

_SYMMETRY_TOL = 1e-12
_ZERO_VECTOR_TOL = 1e-8


def _check_scatter_matrix(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"{name} must be square, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.T).max() > _SYMMETRY_TOL * scale:
        raise ShapeMismatchError(f"{name} is not symmetric")
    if np.linalg.eigvalsh(a).min() < -1e-9 * scale:
        raise ShapeMismatchError(f"{name} is not positive semidefinite")
    out = a.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ScatterSet:
    """Between/within scatter of centres and ranges, plus class sizes."""

    between_centres: np.ndarray
    between_ranges: np.ndarray
    within_centres: np.ndarray
    within_ranges: np.ndarray
    n_total: int
    class_sizes: np.ndarray

    def __post_init__(self):
        for name in ("between_centres", "between_ranges", "within_centres", "within_ranges"):
            object.__setattr__(self, name, _check_scatter_matrix(getattr(self, name), name))
        p = self.between_centres.shape[0]
        for name in ("between_ranges", "within_centres", "within_ranges"):
            if getattr(self, name).shape != (p, p):
                raise ShapeMismatchError("scatter matrices must share one shape")
        sizes = np.asarray(self.class_sizes, dtype=int)
        if sizes.ndim != 1 or np.any(sizes <= 0):
            raise ShapeMismatchError("class sizes must be positive")
        if int(sizes.sum()) != int(self.n_total):
            raise ShapeMismatchError(
                f"class sizes sum to {sizes.sum()}, expected n={self.n_total}"
            )
        sizes.setflags(write=False)
        object.__setattr__(self, "class_sizes", sizes)
        object.__setattr__(self, "n_total", int(self.n_total))

    @property
    def p(self) -> int:
        return self.between_centres.shape[0]

    @property
    def n_classes(self) -> int:
        return self.class_sizes.shape[0]


class OrthogonalityMode(str, Enum):
    USUAL = "usual"
    CENTRE_UNCORRELATED = "uncorrelated"


@dataclass(frozen=True)
class FisherConfig:
    """Inputs of the sequential solve.

    ``start_vector`` defaults to all ones; ``n_restarts`` extra random
    feasible starts (from ``restart_seed``) guard against local optima.
    """

    delta: float
    n_directions: int = 1
    mode: OrthogonalityMode = OrthogonalityMode.USUAL
    start_vector: np.ndarray | None = None
    max_iterations: int = 500
    constraint_tol: float = 1e-8
    stationarity_tol: float = 1e-10
    ridge: float = 0.0
    n_restarts: int = 8
    restart_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.delta <= DELTA_MAX:
            raise ShapeMismatchError(f"delta must lie in [0, 1/4], got {self.delta}")
        if self.n_directions < 1:
            raise ShapeMismatchError("n_directions must be >= 1")
        if self.constraint_tol <= 0 or self.stationarity_tol <= 0:
            raise ShapeMismatchError("tolerances must be positive")
        if self.ridge < 0:
            raise ShapeMismatchError("ridge must be >= 0")
        object.__setattr__(self, "mode", OrthogonalityMode(self.mode))


@dataclass(frozen=True)
class DiscriminantBasis:
    """Solved discriminant directions (columns) with their ratios."""

    vectors: np.ndarray
    ratios: np.ndarray
    mode: OrthogonalityMode
    norm_matrix: np.ndarray
    n_requested: int

    @property
    def s_effective(self) -> int:
        return self.vectors.shape[1]


def scatter(frame: IntervalFrame) -> ScatterSet:
    """Between/within scatter matrices of a labelled frame."""
    if frame.labels is None:
        raise MissingLabelsError("scatter needs class labels")
    labels = frame.classes()
    if labels.size < 2:
        raise SingleClassError("scatter needs at least two classes")
    c_all, r_all = barycentre(frame)
    p = frame.p
    b_c = np.zeros((p, p))
    b_r = np.zeros((p, p))
    w_c = np.zeros((p, p))
    w_r = np.zeros((p, p))
    sizes = []
    for label in labels:
        members = np.flatnonzero(frame.labels == label)
        sizes.append(members.size)
        c_j, r_j = barycentre(frame, members)
        b_c += members.size * np.outer(c_j - c_all, c_j - c_all)
        b_r += members.size * np.outer(r_j - r_all, r_j - r_all)
        dc = frame.centres[members] - c_j
        dr = frame.ranges[members] - r_j
        w_c += dc.T @ dc
        w_r += dr.T @ dr
    # enforce exact symmetry against accumulation round-off
    b_c = (b_c + b_c.T) / 2.0
    b_r = (b_r + b_r.T) / 2.0
    w_c = (w_c + w_c.T) / 2.0
    w_r = (w_r + w_r.T) / 2.0
    return ScatterSet(b_c, b_r, w_c, w_r, frame.n, np.asarray(sizes))


def orthogonality_matrix(
    mode: OrthogonalityMode,
    within_centres: np.ndarray,
    n_total: int,
    n_classes: int,
    ridge: float = 0.0,
) -> np.ndarray:
    """Constraint matrix M: identity, or Wc/(n-g) (+ ridge) which must be PD."""
    mode = OrthogonalityMode(mode)
    p = within_centres.shape[0]
    if mode is OrthogonalityMode.USUAL:
        return np.eye(p)
    if n_total <= n_classes:
        raise ShapeMismatchError("centre uncorrelation needs n > g")
    m = np.asarray(within_centres, dtype=float) / float(n_total - n_classes)
    m = (m + m.T) / 2.0 + ridge * np.eye(p)
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise SingularMatrixError(
            "centre scatter is rank deficient; supply a positive ridge"
        ) from None
    return m


def _signs(alpha: np.ndarray) -> np.ndarray:
    # sgn(0) := 1 (right derivative at kinks of |alpha|)
    return np.where(alpha >= 0.0, 1.0, -1.0)


def _ratio_parts(alpha: np.ndarray, s: ScatterSet, delta: float):
    a_abs = np.abs(alpha)
    gamma = float(alpha @ s.between_centres @ alpha + delta * (a_abs @ s.between_ranges @ a_abs))
    beta = float(alpha @ s.within_centres @ alpha + delta * (a_abs @ s.within_ranges @ a_abs))
    floor = 1e-14 * (np.trace(s.within_centres) + delta * np.trace(s.within_ranges)) * float(
        alpha @ alpha
    )
    if beta <= floor or beta <= 0.0:
        raise DegenerateDenominatorError("within-inertia vanished along this direction")
    return gamma, beta


def fisher_ratio(alpha, s: ScatterSet, delta: float) -> float:
    """Between/within inertia ratio of the projection onto alpha."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.shape[0] != s.p:
        raise DimensionMismatchError(f"alpha has length {alpha.shape[0]}, expected {s.p}")
    gamma, beta = _ratio_parts(alpha, s, delta)
    return gamma / beta


def fisher_ratio_gradient(alpha, s: ScatterSet, delta: float) -> np.ndarray:
    """Analytic gradient of the ratio, using sgn(0) = 1 at kinks."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.shape[0] != s.p:
        raise DimensionMismatchError(f"alpha has length {alpha.shape[0]}, expected {s.p}")
    gamma, beta = _ratio_parts(alpha, s, delta)
    xi = gamma / beta
    a_abs = np.abs(alpha)
    signs = _signs(alpha)
    centre_part = (s.between_centres - xi * s.within_centres) @ alpha
    range_part = signs * ((s.between_ranges - xi * s.within_ranges) @ a_abs)
    return (2.0 / beta) * (centre_part + delta * range_part)


def _deflate_normalize(
    vec: np.ndarray, m: np.ndarray, prior: list[np.ndarray]
) -> np.ndarray | None:
    """Remove M-components along prior directions, then scale to v'Mv = 1."""
    v = np.asarray(vec, dtype=float).copy()
    if not np.all(np.isfinite(v)):
        return None
    for u in prior:
        v -= float(u @ m @ v) * u
    q = float(v @ m @ v)
    if q <= 1e-24 or not np.isfinite(q):
        return None
    return v / np.sqrt(q)


def solve_basis(s: ScatterSet, cfg: FisherConfig) -> DiscriminantBasis:
    """Sequentially maximize the ratio under M-orthonormality constraints.

    Each direction is solved from the configured start plus ``n_restarts``
    random feasible starts; the best feasible candidate by ratio wins (the
    normalized start itself is a candidate, so the result never falls below
    it). Stops early when no usable direction remains.
    """
    if cfg.n_directions > s.p:
        raise ShapeMismatchError(f"requested {cfg.n_directions} directions with p={s.p}")
    m = orthogonality_matrix(cfg.mode, s.within_centres, s.n_total, s.n_classes, cfg.ridge)
    p = s.p
    if cfg.start_vector is None:
        base_start = np.ones(p)
    else:
        base_start = np.asarray(cfg.start_vector, dtype=float).ravel()
        if base_start.shape[0] != p:
            raise DimensionMismatchError("start vector length must equal p")
    rng = np.random.default_rng(cfg.restart_seed)
    raw_starts = [base_start] + [rng.standard_normal(p) for _ in range(cfg.n_restarts)]

    def safe_ratio(alpha: np.ndarray) -> float:
        try:
            return fisher_ratio(alpha, s, cfg.delta)
        except DegenerateDenominatorError:
            return -np.inf

    def objective(alpha: np.ndarray) -> float:
        try:
            return -fisher_ratio(alpha, s, cfg.delta)
        except DegenerateDenominatorError:
            return 1e12

    def objective_grad(alpha: np.ndarray) -> np.ndarray:
        try:
            return -fisher_ratio_gradient(alpha, s, cfg.delta)
        except DegenerateDenominatorError:
            return np.zeros_like(alpha)

    solved: list[np.ndarray] = []
    ratios: list[float] = []
    for _ in range(cfg.n_directions):
        constraints = [
            {"type": "eq", "fun": lambda a: float(a @ m @ a) - 1.0, "jac": lambda a: 2.0 * (m @ a)}
        ]
        for u in solved:
            mu = m @ u
            constraints.append(
                {"type": "eq", "fun": lambda a, mu=mu: float(mu @ a), "jac": lambda a, mu=mu: mu}
            )
        best_vec = None
        best_ratio = -np.inf
        for raw in raw_starts:
            x0 = _deflate_normalize(raw, m, solved)
            if x0 is None:
                continue
            r0 = safe_ratio(x0)
            if r0 > best_ratio:
                best_vec, best_ratio = x0, r0
            result = minimize(
                objective,
                x0,
                jac=objective_grad,
                method="SLSQP",
                constraints=constraints,
                options={"maxiter": cfg.max_iterations, "ftol": cfg.stationarity_tol},
            )
            if not np.all(np.isfinite(result.x)) or np.abs(result.x).max() < _ZERO_VECTOR_TOL:
                continue
            candidate = _deflate_normalize(result.x, m, solved)
            if candidate is None:
                continue
            r = safe_ratio(candidate)
            if r > best_ratio:
                best_vec, best_ratio = candidate, r
        if best_vec is None or not np.isfinite(best_ratio):
            if not solved:
                raise SolverFailureError("no feasible direction found")
            break
        # one refinement solve from the winner tightens stationarity
        result = minimize(
            objective,
            best_vec,
            jac=objective_grad,
            method="SLSQP",
            constraints=constraints,
            options={"maxiter": cfg.max_iterations, "ftol": cfg.stationarity_tol},
        )
        if np.all(np.isfinite(result.x)) and np.abs(result.x).max() >= _ZERO_VECTOR_TOL:
            refined = _deflate_normalize(result.x, m, solved)
            if refined is not None and safe_ratio(refined) > best_ratio:
                best_vec, best_ratio = refined, safe_ratio(refined)
        solved.append(best_vec)
        ratios.append(best_ratio)
    return DiscriminantBasis(
        vectors=np.column_stack(solved),
        ratios=np.asarray(ratios),
        mode=cfg.mode,
        norm_matrix=m,
        n_requested=cfg.n_directions,
    )
