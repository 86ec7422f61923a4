"""Two-class benchmark scenarios with uniform centre/range generation.

Class 1 draws centres from Unif[0.6*c_i, 1.4*c_i] and ranges from
Unif[0.6*r_i, 1.4*r_i] around fixed base values; class 2 inflates the
uniform supports by (1+a) for centres and (1+b) for ranges. Cases A-D fix
(a, b). Each replicate fits a one-direction classifier on a fresh training
sample and is scored on a shared-with-benchmark test sample, where the
benchmark classifier is built from the closed-form scatter of the uniforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classify import FittedModel, fit, model_from_barycentres, predict_frame
from .core import IntervalFrame
from .diagnostics import confusion, metrics
from .errors import ShapeMismatchError
from .fisher import FisherConfig, ScatterSet, solve_basis
from .parallel import thread_map

CASE_SHIFTS = {"A": (0.6, 0.6), "B": (0.2, 0.2), "C": (0.2, 0.05), "D": (0.05, 0.2)}
BASE_CENTRES = (20.0, 10.0, 5.0)
BASE_RANGES = (16.0, 12.0, 8.0)


@dataclass(frozen=True)
class ScenarioSpec:
    case: str
    n1: int = 125
    n2: int = 125
    test_multiplier: int = 5
    seed: int = 0
    delta: float = 1.0 / 12.0

    def __post_init__(self):
        if self.case not in CASE_SHIFTS:
            raise ShapeMismatchError(f"case must be one of A/B/C/D, got {self.case!r}")
        if self.n1 < 1 or self.n2 < 1 or self.test_multiplier < 1:
            raise ShapeMismatchError("sample sizes must be positive")

    @property
    def centre_shift(self) -> float:
        return CASE_SHIFTS[self.case][0]

    @property
    def range_shift(self) -> float:
        return CASE_SHIFTS[self.case][1]


def _draw_class(rng: np.random.Generator, n: int, centre_scale: float, range_scale: float):
    centres = np.column_stack(
        [rng.uniform(0.6 * c * centre_scale, 1.4 * c * centre_scale, size=n) for c in BASE_CENTRES]
    )
    ranges = np.column_stack(
        [rng.uniform(0.6 * r * range_scale, 1.4 * r * range_scale, size=n) for r in BASE_RANGES]
    )
    return centres, ranges


def _sample_frame(rng: np.random.Generator, n1: int, n2: int, a: float, b: float) -> IntervalFrame:
    c1, r1 = _draw_class(rng, n1, 1.0, 1.0)
    c2, r2 = _draw_class(rng, n2, 1.0 + a, 1.0 + b)
    labels = np.concatenate([np.ones(n1, dtype=int), np.full(n2, 2, dtype=int)])
    return IntervalFrame(np.vstack([c1, c2]), np.vstack([r1, r2]), labels)


def generate(spec: ScenarioSpec, rng: np.random.Generator | None = None):
    """Draw (train, test) frames; test is test_multiplier times larger."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    a, b = spec.centre_shift, spec.range_shift
    train = _sample_frame(rng, spec.n1, spec.n2, a, b)
    test = _sample_frame(
        rng, spec.test_multiplier * spec.n1, spec.test_multiplier * spec.n2, a, b
    )
    return train, test


def class_mean_vectors(spec: ScenarioSpec):
    """Expected centre/range vectors per class (the uniform midpoints)."""
    base_c = np.asarray(BASE_CENTRES)
    base_r = np.asarray(BASE_RANGES)
    centres = np.vstack([base_c, base_c * (1.0 + spec.centre_shift)])
    ranges = np.vstack([base_r, base_r * (1.0 + spec.range_shift)])
    return centres, ranges


def theoretical_scatter(spec: ScenarioSpec) -> ScatterSet:
    """Population counterpart of the sample scatter at the training sizes.

    Var(Unif[0.6*m, 1.4*m]) = (0.8*m)^2 / 12 per variable; within matrices
    are n_j-weighted diagonals, between matrices come from the class means.
    """
    sizes = np.asarray([spec.n1, spec.n2], dtype=float)
    mean_c, mean_r = class_mean_vectors(spec)
    var_c = (0.8 * mean_c) ** 2 / 12.0
    var_r = (0.8 * mean_r) ** 2 / 12.0
    w_c = np.diag(sizes @ var_c)
    w_r = np.diag(sizes @ var_r)
    overall_c = sizes @ mean_c / sizes.sum()
    overall_r = sizes @ mean_r / sizes.sum()
    b_c = sum(
        sizes[j] * np.outer(mean_c[j] - overall_c, mean_c[j] - overall_c) for j in range(2)
    )
    b_r = sum(
        sizes[j] * np.outer(mean_r[j] - overall_r, mean_r[j] - overall_r) for j in range(2)
    )
    return ScatterSet(b_c, b_r, w_c, w_r, int(sizes.sum()), sizes.astype(int))


def benchmark_model(spec: ScenarioSpec, cfg: FisherConfig) -> FittedModel:
    """Classifier built from the theoretical scatter and class mean vectors."""
    basis = solve_basis(theoretical_scatter(spec), cfg)
    mean_c, mean_r = class_mean_vectors(spec)
    sizes = np.asarray([spec.n1, spec.n2], dtype=float)
    return model_from_barycentres(
        basis, cfg.delta, np.asarray([1, 2]), sizes / sizes.sum(), mean_c, mean_r
    )


def one_minus_acv(estimates: np.ndarray, reference: np.ndarray) -> float:
    """1 minus the mean absolute cosine between estimates and the reference."""
    reference = np.asarray(reference, dtype=float).ravel()
    estimates = np.atleast_2d(np.asarray(estimates, dtype=float))
    cosines = np.abs(estimates @ reference) / (
        np.linalg.norm(estimates, axis=1) * np.linalg.norm(reference)
    )
    return float(1.0 - cosines.mean())


MEASURES = ("accuracy", "macro_f1", "g_mean")


@dataclass(frozen=True)
class StudyResult:
    spec: ScenarioSpec
    m: int
    method_scores: np.ndarray  # m x 3 (accuracy, macro F1, G-mean)
    benchmark_scores: np.ndarray
    abs_cosines: np.ndarray  # m
    mse: dict
    one_minus_acv: float


def _score(model: FittedModel, test: IntervalFrame) -> np.ndarray:
    predicted, _ = predict_frame(model, test)
    stats = metrics(confusion(test.labels, predicted, labels=model.class_labels))
    return np.asarray([stats.accuracy, stats.macro_f1, stats.g_mean])


def run_study(spec: ScenarioSpec, m: int, cfg: FisherConfig | None = None) -> StudyResult:
    """Replicate fit/score m times against the fixed theoretical benchmark."""
    if m < 1:
        raise ShapeMismatchError("need at least one replicate")
    if cfg is None:
        cfg = FisherConfig(delta=spec.delta, n_directions=1)
    benchmark = benchmark_model(spec, cfg)
    reference = benchmark.basis.vectors[:, 0]
    children = np.random.SeedSequence(spec.seed).spawn(m)

    def replicate(child) -> tuple[np.ndarray, np.ndarray, float]:
        rng = np.random.default_rng(child)
        train, test = generate(spec, rng)
        model = fit(train, cfg)
        estimate = model.basis.vectors[:, 0]
        cosine = abs(float(estimate @ reference)) / (
            np.linalg.norm(estimate) * np.linalg.norm(reference)
        )
        return _score(model, test), _score(benchmark, test), cosine

    rows = thread_map(replicate, children)
    method_scores = np.vstack([r[0] for r in rows])
    benchmark_scores = np.vstack([r[1] for r in rows])
    abs_cosines = np.asarray([r[2] for r in rows])
    mse = {
        name: float(np.mean((method_scores[:, k] - benchmark_scores[:, k]) ** 2))
        for k, name in enumerate(MEASURES)
    }
    return StudyResult(
        spec=spec,
        m=m,
        method_scores=method_scores,
        benchmark_scores=benchmark_scores,
        abs_cosines=abs_cosines,
        mse=mse,
        one_minus_acv=float(1.0 - abs_cosines.mean()),
    )
