"""Deterministic SVG renderings of the diagnostic displays.

Four plots: stacked mosaic of a confusion matrix, farness-by-observation,
per-class class map (ldac vs farness), and silhouette bars. Output is plain
SVG 1.1 text built with full-precision coordinates so geometry can be
asserted by parsing; identical inputs yield byte-identical documents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import ClassMapRecord, ConfusionMatrix, SilhouetteReport
from .errors import (
    EmptyClassError,
    EmptyReportError,
    PriorMismatchError,
    ShapeMismatchError,
)


@dataclass(frozen=True)
class PlotStyle:
    width: int = 640
    height: int = 480
    margin: int = 56
    palette: tuple[str, ...] = (
        "#e66101",  # orange
        "#33a02c",  # green
        "#2b83ba",  # blue
        "#b2182b",
        "#7b3294",
        "#80cdc1",
    )
    outlier_color: str = "#4d4d4d"  # dark grey
    guide_color: str = "#333333"
    guide_dash: str = "4,3"
    font_size: int = 12

    def color(self, class_index: int) -> str:
        return self.palette[class_index % len(self.palette)]

    @property
    def plot_width(self) -> float:
        return float(self.width - 2 * self.margin)

    @property
    def plot_height(self) -> float:
        return float(self.height - 2 * self.margin)


DEFAULT_STYLE = PlotStyle()


def _num(v) -> str:
    return repr(float(v))


class _Svg:
    def __init__(self, style: PlotStyle, title: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{style.width}" height="{style.height}" '
            f'viewBox="0 0 {style.width} {style.height}">\n',
            f"<title>{title}</title>\n",
            f'<rect x="0" y="0" width="{style.width}" height="{style.height}" fill="#ffffff"/>\n',
        ]
        self.style = style

    def rect(self, x, y, w, h, fill, extra=""):
        self.parts.append(
            f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(w)}" height="{_num(h)}" '
            f'fill="{fill}"{extra}/>\n'
        )

    def line(self, x1, y1, x2, y2, stroke, dash=None, extra=""):
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" '
            f'stroke="{stroke}"{dash_attr}{extra}/>\n'
        )

    def circle(self, cx, cy, r, fill, extra=""):
        self.parts.append(
            f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(r)}" fill="{fill}"{extra}/>\n'
        )

    def triangle(self, cx, cy, r, fill, extra=""):
        points = (
            f"{_num(cx)},{_num(cy - r)} {_num(cx - r)},{_num(cy + r)} {_num(cx + r)},{_num(cy + r)}"
        )
        self.parts.append(f'<polygon points="{points}" fill="{fill}"{extra}/>\n')

    def text(self, x, y, content, anchor="middle", extra=""):
        self.parts.append(
            f'<text x="{_num(x)}" y="{_num(y)}" font-size="{self.style.font_size}" '
            f'font-family="sans-serif" text-anchor="{anchor}"{extra}>{content}</text>\n'
        )

    def frame_box(self):
        m = self.style.margin
        self.parts.append(
            f'<rect x="{_num(m)}" y="{_num(m)}" width="{_num(self.style.plot_width)}" '
            f'height="{_num(self.style.plot_height)}" fill="none" stroke="#000000"/>\n'
        )

    def document(self) -> str:
        return "".join(self.parts) + "</svg>\n"


def _class_index(labels, label) -> int:
    for k, known in enumerate(labels):
        if known == label:
            return k
    raise ShapeMismatchError(f"label {label!r} not among {labels!r}")


def mosaic_svg(cm: ConfusionMatrix, priors, style: PlotStyle = DEFAULT_STYLE) -> str:
    """Stacked mosaic: section widths are priors, stripe heights are recalls.

    Bottom stripe of each section is the own-class (regular) recall; the
    misclassification stripes stack above it in ascending predicted-class
    order, with the global-outlier stripe (dark grey) on top.
    """
    priors = np.asarray(priors, dtype=float)
    g = cm.n_classes
    if priors.shape != (g,) or abs(priors.sum() - 1.0) > 1e-9 or np.any(priors < 0):
        raise PriorMismatchError("priors must be nonnegative and sum to 1 per class")
    svg = _Svg(style, "stacked mosaic plot")
    m = style.margin
    x = float(m)
    bottom = m + style.plot_height
    for j in range(g):
        width = priors[j] * style.plot_width
        row = cm.counts[j].astype(float)
        total = row.sum()
        stripes = []
        if total > 0:
            stripes.append((row[j] / total, style.color(j)))
            for jj in range(g):
                if jj != j and row[jj] > 0:
                    stripes.append((row[jj] / total, style.color(jj)))
            if cm.has_outlier_column and row[g] > 0:
                stripes.append((row[g] / total, style.outlier_color))
        y = bottom
        for height, color in stripes:
            h_px = height * style.plot_height
            y -= h_px
            svg.rect(x, y, width, h_px, color, extra=' class="mosaic-cell"')
        svg.text(x + width / 2.0, bottom + style.font_size + 4, str(cm.labels[j]))
        x += width
    svg.frame_box()
    return svg.document()


def farness_svg(table, tau: float, style: PlotStyle = DEFAULT_STYLE) -> str:
    """Farness per observation, ordered and separated by true class.

    Points take the predicted class's color; observations whose minimum
    farness exceeds tau render as triangles. A dashed horizontal line marks
    tau and dotted vertical lines separate the true-class index blocks.
    """
    if not 0.0 <= tau <= 1.0:
        raise ShapeMismatchError("tau must lie in [0, 1]")
    farness_true = table.true_class_farness()
    flags = table.outlier_flags(tau)
    labels = table.labels
    true_index = np.asarray([_class_index(labels, t) for t in table.true_labels])
    order = np.lexsort((np.arange(true_index.shape[0]), true_index))
    n = order.shape[0]
    svg = _Svg(style, "farness plot")
    m = style.margin

    def x_at(slot: int) -> float:
        return m + (slot + 0.5) / n * style.plot_width

    def y_at(value: float) -> float:
        return m + (1.0 - value) * style.plot_height

    svg.frame_box()
    svg.line(m, y_at(tau), m + style.plot_width, y_at(tau), style.guide_color, dash=style.guide_dash)
    boundaries = np.flatnonzero(np.diff(true_index[order])) + 1
    for boundary in boundaries:
        x = m + boundary / n * style.plot_width
        svg.line(x, m, x, m + style.plot_height, style.guide_color, dash="1,3")
    for slot, h in enumerate(order):
        color = style.color(_class_index(labels, table.predicted_labels[h]))
        if flags[h]:
            svg.triangle(x_at(slot), y_at(farness_true[h]), 5.0, color, extra=' class="outlier"')
        else:
            svg.circle(x_at(slot), y_at(farness_true[h]), 3.0, color)
    svg.text(m - 8, y_at(0.0) + 4, "0", anchor="end")
    svg.text(m - 8, y_at(1.0) + 4, "1", anchor="end")
    svg.text(m - 8, y_at(tau) + 4, f"{tau:g}", anchor="end")
    return svg.document()


def class_map_svg(
    records: list[ClassMapRecord],
    tau: float,
    style: PlotStyle = DEFAULT_STYLE,
    labels=None,
) -> str:
    """Class map for one true class: x = ldac, y = farness, guides at 0.5 and tau.

    ``labels`` fixes the class-to-color assignment (pass the model's class
    order to match the other plots); defaults to the labels seen in records.
    """
    if not records:
        raise EmptyClassError("class map needs at least one record")
    true_labels = {record.true_label for record in records}
    if len(true_labels) != 1:
        raise ShapeMismatchError("class map records must share one true class")
    if not 0.0 <= tau <= 1.0:
        raise ShapeMismatchError("tau must lie in [0, 1]")
    svg = _Svg(style, f"class map ({records[0].true_label})")
    m = style.margin

    def x_at(value: float) -> float:
        return m + value * style.plot_width

    def y_at(value: float) -> float:
        return m + (1.0 - value) * style.plot_height

    svg.frame_box()
    svg.line(x_at(0.5), m, x_at(0.5), m + style.plot_height, style.guide_color, dash=style.guide_dash)
    svg.line(m, y_at(tau), m + style.plot_width, y_at(tau), style.guide_color, dash=style.guide_dash)
    if labels is None:
        labels = sorted({record.predicted_label for record in records} | true_labels, key=str)
    palette_index = {label: k for k, label in enumerate(labels)}
    for record in records:
        color = style.color(palette_index[record.predicted_label])
        if record.flagged:
            svg.triangle(x_at(record.ldac), y_at(record.farness), 5.0, color, extra=' class="outlier"')
        else:
            svg.circle(x_at(record.ldac), y_at(record.farness), 3.0, color)
    svg.text(x_at(0.5), m + style.plot_height + style.font_size + 4, "ldac")
    svg.text(m - 8, y_at(tau) + 4, f"{tau:g}", anchor="end")
    return svg.document()


def silhouette_svg(report: SilhouetteReport, style: PlotStyle = DEFAULT_STYLE) -> str:
    """Horizontal silhouette bars grouped by class, widest first per class."""
    n = report.values.shape[0]
    if n == 0:
        raise EmptyReportError("silhouette report is empty")
    svg = _Svg(style, "silhouette plot")
    m = style.margin
    zero_x = m + 0.5 * style.plot_width

    def x_at(value: float) -> float:
        clamped = min(1.0, max(-1.0, value))
        return m + (clamped + 1.0) / 2.0 * style.plot_width

    bar_height = style.plot_height / n
    row = 0
    for k, label in enumerate(report.labels):
        members = np.flatnonzero(report.true_labels == label)
        values = np.sort(report.values[members])[::-1]
        for value in values:
            y = m + row * bar_height
            x0, x1 = sorted((zero_x, x_at(value)))
            svg.rect(x0, y, x1 - x0, bar_height, style.color(k), extra=' class="silhouette-bar"')
            row += 1
        mid = m + (row - members.size / 2.0) * bar_height
        svg.text(
            m + style.plot_width + 6,
            mid + style.font_size / 3.0,
            f"{label}: {report.class_means[k]:.2f}",
            anchor="start",
        )
    svg.line(zero_x, m, zero_x, m + style.plot_height, style.guide_color)
    svg.frame_box()
    svg.text(
        (2 * m + style.plot_width) / 2.0,
        m - 8,
        f"overall average: {report.overall_mean:.2f}",
    )
    return svg.document()
