"""Model fitting, minimum-distance prediction, and (delta, s) tuning.

A fitted model carries the discriminant basis and the class barycentres;
prediction assigns the class whose projected barycentre is nearest in the
squared Mallows distance of the projected space. Ties go to the smallest
class index (sorted label order).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import DELTA_MAX, IntervalFrame, barycentre
from .errors import (
    ClassTooSmallError,
    DimensionMismatchError,
    MissingLabelsError,
    ShapeMismatchError,
)
from .fisher import DiscriminantBasis, FisherConfig, scatter, solve_basis
from .parallel import thread_map


@dataclass(frozen=True)
class FittedModel:
    """Discriminant basis plus everything needed to classify new intervals."""

    basis: DiscriminantBasis
    delta: float
    class_labels: np.ndarray
    priors: np.ndarray
    class_centres: np.ndarray
    class_ranges: np.ndarray
    projected_centres: np.ndarray
    projected_ranges: np.ndarray

    @property
    def p(self) -> int:
        return self.class_centres.shape[1]

    @property
    def n_classes(self) -> int:
        return self.class_labels.shape[0]

    @property
    def s(self) -> int:
        return self.basis.s_effective


def _project_barycentres(
    basis: DiscriminantBasis, class_centres: np.ndarray, class_ranges: np.ndarray
):
    return class_centres @ basis.vectors, class_ranges @ np.abs(basis.vectors)


def model_from_barycentres(
    basis: DiscriminantBasis,
    delta: float,
    class_labels,
    priors,
    class_centres,
    class_ranges,
) -> FittedModel:
    """Assemble a model from explicit barycentres (used by the benchmark)."""
    class_labels = np.asarray(class_labels)
    priors = np.asarray(priors, dtype=float)
    class_centres = np.asarray(class_centres, dtype=float)
    class_ranges = np.asarray(class_ranges, dtype=float)
    if priors.shape != (class_labels.shape[0],):
        raise ShapeMismatchError("priors must align with class labels")
    if abs(priors.sum() - 1.0) > 1e-12 or np.any(priors < 0):
        raise ShapeMismatchError("priors must be nonnegative and sum to 1")
    proj_c, proj_r = _project_barycentres(basis, class_centres, class_ranges)
    return FittedModel(
        basis=basis,
        delta=float(delta),
        class_labels=class_labels,
        priors=priors,
        class_centres=class_centres,
        class_ranges=class_ranges,
        projected_centres=proj_c,
        projected_ranges=proj_r,
    )


def fit(frame: IntervalFrame, cfg: FisherConfig) -> FittedModel:
    """Solve the discriminant basis on a labelled frame and store barycentres."""
    s = scatter(frame)
    basis = solve_basis(s, cfg)
    labels = frame.classes()
    centres = []
    ranges = []
    sizes = []
    for label in labels:
        members = np.flatnonzero(frame.labels == label)
        c_j, r_j = barycentre(frame, members)
        centres.append(c_j)
        ranges.append(r_j)
        sizes.append(members.size)
    sizes = np.asarray(sizes, dtype=float)
    return model_from_barycentres(
        basis, cfg.delta, labels, sizes / sizes.sum(), np.vstack(centres), np.vstack(ranges)
    )


def projected_sq_distances(
    model: FittedModel, centres: np.ndarray, ranges: np.ndarray, n_vectors: int | None = None
) -> np.ndarray:
    """n x g squared Mallows distances to the projected class barycentres.

    ``n_vectors`` truncates the basis (used by tuning; the sequential solve
    makes leading columns independent of how many were requested).
    """
    vectors = model.basis.vectors
    proj_c_classes = model.projected_centres
    proj_r_classes = model.projected_ranges
    if n_vectors is not None:
        vectors = vectors[:, :n_vectors]
        proj_c_classes = proj_c_classes[:, :n_vectors]
        proj_r_classes = proj_r_classes[:, :n_vectors]
    centres = np.atleast_2d(np.asarray(centres, dtype=float))
    ranges = np.atleast_2d(np.asarray(ranges, dtype=float))
    if centres.shape[1] != model.p:
        raise DimensionMismatchError(
            f"observations have p={centres.shape[1]}, model expects {model.p}"
        )
    proj_c = centres @ vectors
    proj_r = ranges @ np.abs(vectors)
    d_c = ((proj_c[:, None, :] - proj_c_classes[None, :, :]) ** 2).sum(axis=2)
    d_r = ((proj_r[:, None, :] - proj_r_classes[None, :, :]) ** 2).sum(axis=2)
    return d_c + model.delta * d_r


def predict(model: FittedModel, centre, range_) -> tuple[object, np.ndarray]:
    """Classify one interval vector; returns (label, per-class distances)."""
    centre = np.asarray(centre, dtype=float).ravel()
    range_ = np.asarray(range_, dtype=float).ravel()
    if centre.shape[0] != model.p or range_.shape[0] != model.p:
        raise DimensionMismatchError(
            f"observation has p={centre.shape[0]}, model expects {model.p}"
        )
    distances = projected_sq_distances(model, centre[None, :], range_[None, :])[0]
    return model.class_labels[int(np.argmin(distances))], distances


def predict_frame(model: FittedModel, frame: IntervalFrame, n_vectors: int | None = None):
    """Classify every row of a frame; returns (labels, n x g distances)."""
    distances = projected_sq_distances(model, frame.centres, frame.ranges, n_vectors)
    return model.class_labels[np.argmin(distances, axis=1)], distances


def stratified_split(labels, fraction: float, seed: int):
    """Deterministic per-class split; returns (train indices, test indices)."""
    if not 0.0 < fraction < 1.0:
        raise ShapeMismatchError("fraction must lie strictly between 0 and 1")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train: list[np.ndarray] = []
    test: list[np.ndarray] = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        if members.size < 2:
            raise ClassTooSmallError(
                f"class {label!r} has {members.size} observation(s); need >= 2 to split"
            )
        k = int(np.floor(fraction * members.size + 0.5))
        k = min(max(k, 1), members.size - 1)
        order = rng.permutation(members.size)
        train.append(members[order[:k]])
        test.append(members[order[k:]])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


@dataclass(frozen=True)
class TuneConfig:
    """Grid-search protocol over (delta, s) with repeated stratified splits."""

    delta_grid: tuple[float, ...] | None = None
    s_grid: tuple[int, ...] | None = None
    n_splits: int = 30
    split_fraction: float = 0.5
    seed: int = 0


@dataclass(frozen=True)
class TuneResult:
    best_delta: float
    best_s: int
    table: np.ndarray  # rows (delta, s, mean heldout accuracy)
    model: FittedModel


def default_delta_grid() -> tuple[float, ...]:
    return tuple(round(0.01 * k, 2) for k in range(26))


def default_s_grid(p: int) -> tuple[int, ...]:
    if p < 2:
        return (1,)
    return tuple(range(2, min(9, p) + 1))


def tune(frame: IntervalFrame, tune_cfg: TuneConfig, base_cfg: FisherConfig) -> TuneResult:
    """Pick the (delta, s) pair with the best mean held-out accuracy.

    Ties resolve to the smaller delta, then the smaller s; the returned
    model is refit on the whole frame at the selected pair.
    """
    if frame.labels is None:
        raise MissingLabelsError("tuning needs class labels")
    deltas = tune_cfg.delta_grid if tune_cfg.delta_grid is not None else default_delta_grid()
    s_values = tune_cfg.s_grid if tune_cfg.s_grid is not None else default_s_grid(frame.p)
    deltas = sorted(set(float(d) for d in deltas))
    s_values = sorted(set(int(v) for v in s_values))
    if not deltas or not s_values:
        raise ShapeMismatchError("tuning grids must be non-empty")
    if s_values[0] < 1 or s_values[-1] > frame.p:
        raise ShapeMismatchError(f"s grid must stay within [1, p={frame.p}]")
    for d in deltas:
        if not 0.0 <= d <= DELTA_MAX:
            raise ShapeMismatchError(f"delta grid value {d} outside [0, 1/4]")
    s_max = s_values[-1]
    rng = np.random.default_rng(tune_cfg.seed)
    split_seeds = [int(v) for v in rng.integers(0, 2**63 - 1, size=tune_cfg.n_splits)]

    def run_split(split_seed: int) -> np.ndarray:
        train_idx, test_idx = stratified_split(
            frame.labels, tune_cfg.split_fraction, split_seed
        )
        train = frame.subset(train_idx)
        test = frame.subset(test_idx)
        acc = np.empty((len(deltas), len(s_values)))
        for i, d in enumerate(deltas):
            model = fit(train, replace(base_cfg, delta=d, n_directions=s_max))
            for j, s_val in enumerate(s_values):
                predicted, _ = predict_frame(
                    model, test, n_vectors=min(s_val, model.s)
                )
                acc[i, j] = float(np.mean(predicted == test.labels))
        return acc

    per_split = thread_map(run_split, split_seeds)
    mean_acc = np.mean(per_split, axis=0)

    best_i, best_j = 0, 0
    for i in range(len(deltas)):
        for j in range(len(s_values)):
            if mean_acc[i, j] > mean_acc[best_i, best_j]:
                best_i, best_j = i, j
    rows = [
        (deltas[i], float(s_values[j]), mean_acc[i, j])
        for i in range(len(deltas))
        for j in range(len(s_values))
    ]
    best_delta, best_s = deltas[best_i], s_values[best_j]
    final = fit(frame, replace(base_cfg, delta=best_delta, n_directions=best_s))
    return TuneResult(best_delta, best_s, np.asarray(rows), final)
