"""Classifier diagnostics: confusion matrices, performance metrics, farness
with global-outlier flagging, distance-to-alternative scores, and silhouettes.

Farness of observation h for class j is the estimated probability that a
within-class squared distance falls at or below h's, obtained by a robust
Yeo-Johnson normalization of the training distances (lambda fitted on the
central 90%, then median/MAD standardization). The alternative-class score
ldac is the logistic of d(h) - DAC(h) on raw (unsquared) distances, and the
silhouette is s = 1 - 2*ldac.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtr

from .classify import FittedModel, projected_sq_distances
from .core import IntervalFrame
from .errors import (
    ClassTooSmallError,
    EmptyMatrixError,
    LengthMismatchError,
    MissingLabelsError,
    ZeroScaleError,
)

_MAD_NORMAL_CONSISTENCY = 1.4826022185056018  # 1 / Phi^{-1}(3/4)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows = true classes; optional trailing global-outlier column."""

    counts: np.ndarray
    labels: tuple
    has_outlier_column: bool = False

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=int)
        g = len(self.labels)
        want_cols = g + 1 if self.has_outlier_column else g
        if counts.shape != (g, want_cols):
            raise LengthMismatchError(
                f"counts shape {counts.shape} does not match {g} classes"
            )
        if np.any(counts < 0):
            raise LengthMismatchError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def square_counts(self) -> np.ndarray:
        """g x g counts with any outlier column folded back into the diagonal."""
        g = self.n_classes
        square = np.array(self.counts[:, :g])
        if self.has_outlier_column:
            square[np.arange(g), np.arange(g)] += self.counts[:, g]
        return square


def confusion(true_labels, predicted_labels, outlier_flags=None, labels=None) -> ConfusionMatrix:
    """Tabulate predictions; flagged correct predictions move to an outlier column."""
    true_labels = np.asarray(true_labels)
    predicted_labels = np.asarray(predicted_labels)
    if true_labels.shape != predicted_labels.shape:
        raise LengthMismatchError("true and predicted labels differ in length")
    if labels is None:
        labels = np.unique(np.concatenate([true_labels, predicted_labels]))
    labels = np.asarray(labels)
    index = {label: k for k, label in enumerate(labels)}
    g = labels.shape[0]
    has_outliers = outlier_flags is not None
    counts = np.zeros((g, g + 1 if has_outliers else g), dtype=int)
    if has_outliers:
        outlier_flags = np.asarray(outlier_flags, dtype=bool)
        if outlier_flags.shape != true_labels.shape:
            raise LengthMismatchError("outlier flags differ in length")
    for h in range(true_labels.shape[0]):
        i = index[true_labels[h]]
        j = index[predicted_labels[h]]
        if has_outliers and outlier_flags[h] and i == j:
            counts[i, g] += 1
        else:
            counts[i, j] += 1
    return ConfusionMatrix(counts, tuple(labels.tolist()), has_outliers)


@dataclass(frozen=True)
class ClassMetrics:
    labels: tuple
    accuracy: float
    recall: np.ndarray
    precision: np.ndarray
    f1: np.ndarray
    macro_f1: float
    g_mean: float
    undefined_precision: np.ndarray  # classes never predicted (reported as 0)


def metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Accuracy, per-class recall/precision/F1, macro-F1, and G-mean.

    Outlier-column members count as correct (they were correctly classified
    before flagging), so the column is folded into the diagonal first.
    """
    counts = cm.square_counts()
    total = counts.sum()
    if total == 0:
        raise EmptyMatrixError("confusion matrix has no observations")
    g = cm.n_classes
    row = counts.sum(axis=1).astype(float)
    col = counts.sum(axis=0).astype(float)
    diag = np.diag(counts).astype(float)
    recall = np.divide(diag, row, out=np.zeros(g), where=row > 0)
    undefined = col == 0
    precision = np.divide(diag, col, out=np.zeros(g), where=col > 0)
    pr_sum = precision + recall
    f1 = np.divide(2.0 * precision * recall, pr_sum, out=np.zeros(g), where=pr_sum > 0)
    return ClassMetrics(
        labels=cm.labels,
        accuracy=float(diag.sum() / total),
        recall=recall,
        precision=precision,
        f1=f1,
        macro_f1=float(f1.mean()),
        g_mean=float(np.prod(recall) ** (1.0 / g)),
        undefined_precision=undefined,
    )


def _yeo_johnson(x: np.ndarray, lam: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    if abs(lam) > 1e-12:
        out[pos] = ((x[pos] + 1.0) ** lam - 1.0) / lam
    else:
        out[pos] = np.log1p(x[pos])
    neg = ~pos
    if np.any(neg):
        if abs(lam - 2.0) > 1e-12:
            out[neg] = -(((-x[neg] + 1.0) ** (2.0 - lam) - 1.0) / (2.0 - lam))
        else:
            out[neg] = -np.log1p(-x[neg])
    return out


def _fit_yj_lambda(x: np.ndarray) -> float:
    # profile normal log-likelihood of the transformed sample
    def neg_loglik(lam: float) -> float:
        y = _yeo_johnson(x, lam)
        var = y.var()
        if var <= 0 or not np.isfinite(var):
            return np.inf
        return 0.5 * x.size * np.log(var) - (lam - 1.0) * np.sum(
            np.sign(x) * np.log1p(np.abs(x))
        )

    result = minimize_scalar(neg_loglik, bounds=(-5.0, 5.0), method="bounded")
    return float(result.x)


@dataclass(frozen=True)
class FarnessParams:
    """Per-class transform of squared projected distances to ~N(0, 1)."""

    labels: tuple
    lambdas: np.ndarray
    locations: np.ndarray
    scales: np.ndarray


def fit_farness(model: FittedModel, frame: IntervalFrame, trim: float = 0.9) -> FarnessParams:
    """Fit each class's normalizing transform on its training distances."""
    if frame.labels is None:
        raise MissingLabelsError("farness fitting needs class labels")
    distances = projected_sq_distances(model, frame.centres, frame.ranges)
    lambdas = []
    locations = []
    scales = []
    half_tail = (1.0 - trim) / 2.0
    for k, label in enumerate(model.class_labels):
        members = np.flatnonzero(frame.labels == label)
        if members.size < 3:
            raise ClassTooSmallError(
                f"class {label!r} has {members.size} observation(s); need >= 3"
            )
        d = distances[members, k]
        lo, hi = np.quantile(d, [half_tail, 1.0 - half_tail])
        central = d[(d >= lo) & (d <= hi)]
        lam = _fit_yj_lambda(central)
        y = _yeo_johnson(d, lam)
        location = float(np.median(y))
        scale = float(np.median(np.abs(y - location))) * _MAD_NORMAL_CONSISTENCY
        if scale <= 0:
            raise ZeroScaleError(
                f"class {label!r} training distances have zero robust scale"
            )
        lambdas.append(lam)
        locations.append(location)
        scales.append(scale)
    return FarnessParams(
        labels=tuple(np.asarray(model.class_labels).tolist()),
        lambdas=np.asarray(lambdas),
        locations=np.asarray(locations),
        scales=np.asarray(scales),
    )


@dataclass(frozen=True)
class FarnessTable:
    """Per-observation farness toward every class, with optional labels."""

    values: np.ndarray  # n x g in [0, 1]
    labels: tuple
    true_labels: np.ndarray | None = None
    predicted_labels: np.ndarray | None = None

    @property
    def min_farness(self) -> np.ndarray:
        return self.values.min(axis=1)

    def true_class_farness(self) -> np.ndarray:
        if self.true_labels is None:
            raise MissingLabelsError("table was built without true labels")
        index = {label: k for k, label in enumerate(self.labels)}
        cols = np.asarray([index[t] for t in self.true_labels])
        return self.values[np.arange(self.values.shape[0]), cols]

    def outlier_flags(self, tau: float) -> np.ndarray:
        return self.min_farness > tau


def farness(params: FarnessParams, model: FittedModel, frame: IntervalFrame) -> FarnessTable:
    """Evaluate farness(h, j) = Phi(z_hj) for every observation and class."""
    distances = projected_sq_distances(model, frame.centres, frame.ranges)
    z = np.empty_like(distances)
    for k in range(len(params.labels)):
        y = _yeo_johnson(distances[:, k], params.lambdas[k])
        z[:, k] = (y - params.locations[k]) / params.scales[k]
    predicted = model.class_labels[np.argmin(distances, axis=1)]
    return FarnessTable(
        values=ndtr(z),
        labels=params.labels,
        true_labels=None if frame.labels is None else np.asarray(frame.labels),
        predicted_labels=predicted,
    )


def dac_ldac(model: FittedModel, frame: IntervalFrame):
    """Per-observation (true-class distance, best-alternative distance, ldac)."""
    if frame.labels is None:
        raise MissingLabelsError("ldac needs true labels")
    if model.n_classes < 2:
        raise ClassTooSmallError("ldac needs at least two classes")
    distances = np.sqrt(projected_sq_distances(model, frame.centres, frame.ranges))
    index = {label: k for k, label in enumerate(model.class_labels)}
    cols = np.asarray([index[t] for t in frame.labels])
    rows = np.arange(frame.n)
    d_true = distances[rows, cols]
    masked = distances.copy()
    masked[rows, cols] = np.inf
    dac = masked.min(axis=1)
    ldac = 1.0 / (1.0 + np.exp(-(d_true - dac)))
    return d_true, dac, ldac


@dataclass(frozen=True)
class SilhouetteReport:
    values: np.ndarray  # s(h) = 1 - 2*ldac(h)
    true_labels: np.ndarray
    labels: tuple
    class_means: np.ndarray
    overall_mean: float


def silhouette(ldac_values, true_labels) -> SilhouetteReport:
    """Silhouette scores s = 1 - 2*ldac with class and overall averages."""
    ldac_values = np.asarray(ldac_values, dtype=float)
    true_labels = np.asarray(true_labels)
    if ldac_values.shape != true_labels.shape:
        raise LengthMismatchError("ldac values and labels differ in length")
    values = 1.0 - 2.0 * ldac_values
    labels = np.unique(true_labels)
    class_means = np.asarray(
        [values[true_labels == label].mean() for label in labels]
    )
    return SilhouetteReport(
        values=values,
        true_labels=true_labels,
        labels=tuple(labels.tolist()),
        class_means=class_means,
        overall_mean=float(values.mean()),
    )


@dataclass(frozen=True)
class ClassMapRecord:
    """One observation's row in the class-map / farness displays."""

    index: int
    true_label: object
    predicted_label: object
    farness: float
    ldac: float
    flagged: bool


def class_map_records(
    table: FarnessTable, ldac_values, tau: float
) -> list[ClassMapRecord]:
    """Join farness, predictions, and ldac into per-observation records."""
    if table.true_labels is None or table.predicted_labels is None:
        raise MissingLabelsError("records need true and predicted labels")
    ldac_values = np.asarray(ldac_values, dtype=float)
    if ldac_values.shape[0] != table.values.shape[0]:
        raise LengthMismatchError("ldac values and farness table differ in length")
    farness_true = table.true_class_farness()
    flags = table.outlier_flags(tau)
    return [
        ClassMapRecord(
            index=h,
            true_label=table.true_labels[h],
            predicted_label=table.predicted_labels[h],
            farness=float(farness_true[h]),
            ldac=float(ldac_values[h]),
            flagged=bool(flags[h]),
        )
        for h in range(table.values.shape[0])
    ]
