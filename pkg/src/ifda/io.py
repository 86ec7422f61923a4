"""CSV ingestion/export and versioned JSON model persistence.

Interval CSVs pair columns per variable as either ``<var>_lo``/``<var>_hi``
or ``<var>_c``/``<var>_r`` (mixing conventions across variables is fine,
within one variable it is not), plus an optional ``label`` column. Model
files are sorted-key JSON so a save/load/save cycle is byte-identical.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile

import numpy as np

from .classify import FittedModel, model_from_barycentres
from .core import IntervalFrame
from .diagnostics import FarnessParams
from .errors import SchemaError
from .fisher import DiscriminantBasis, OrthogonalityMode

MODEL_SCHEMA_VERSION = 1

_SUFFIXES = {"lo": "bounds", "hi": "bounds", "c": "cr", "r": "cr"}
LABEL_COLUMN = "label"


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _split_header(header: list[str]):
    """Map each variable to its (convention, first-column order) pair."""
    seen: dict[str, dict[str, int]] = {}
    order: list[str] = []
    for pos, raw in enumerate(header):
        name = raw.strip()
        if name == LABEL_COLUMN:
            continue
        if "_" not in name:
            raise SchemaError(f"column {name!r} has no _lo/_hi/_c/_r suffix")
        var, suffix = name.rsplit("_", 1)
        if suffix not in _SUFFIXES or not var:
            raise SchemaError(f"column {name!r} has no _lo/_hi/_c/_r suffix")
        if var not in seen:
            seen[var] = {}
            order.append(var)
        if suffix in seen[var]:
            raise SchemaError(f"column {name!r} appears twice")
        seen[var][suffix] = pos
    variables = []
    for var in order:
        suffixes = set(seen[var])
        if suffixes == {"lo", "hi"}:
            variables.append((var, "bounds", seen[var]["lo"], seen[var]["hi"]))
        elif suffixes == {"c", "r"}:
            variables.append((var, "cr", seen[var]["c"], seen[var]["r"]))
        else:
            raise SchemaError(
                f"variable {var!r} has columns {sorted(suffixes)}; "
                "expected exactly _lo/_hi or _c/_r"
            )
    if not variables:
        raise SchemaError("no interval variable columns found")
    return variables


def read_interval_csv(path, require_labels: bool = False) -> IntervalFrame:
    """Parse an interval CSV into a frame; labels kept as strings."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        rows = [row for row in reader if row]
    variables = _split_header(header)
    header_stripped = [column.strip() for column in header]
    label_pos = header_stripped.index(LABEL_COLUMN) if LABEL_COLUMN in header_stripped else None
    if require_labels and label_pos is None:
        raise SchemaError(f"{path}: required column {LABEL_COLUMN!r} is missing")
    n, p = len(rows), len(variables)
    centres = np.empty((n, p))
    ranges = np.empty((n, p))
    labels = [] if label_pos is not None else None
    for h, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {h + 2} has {len(row)} fields, expected {len(header)}")
        for k, (var, convention, first, second) in enumerate(variables):
            try:
                a = float(row[first])
                b = float(row[second])
            except ValueError:
                raise SchemaError(
                    f"{path}: row {h + 2}, variable {var!r}: non-numeric value"
                ) from None
            if convention == "bounds":
                if b < a:
                    raise SchemaError(
                        f"{path}: row {h + 2}, variable {var!r}: upper {b} < lower {a}"
                    )
                centres[h, k] = (a + b) / 2.0
                ranges[h, k] = b - a
            else:
                if b < 0:
                    raise SchemaError(
                        f"{path}: row {h + 2}, variable {var!r}: negative range {b}"
                    )
                centres[h, k] = a
                ranges[h, k] = b
        if labels is not None:
            labels.append(row[label_pos].strip())
    return IntervalFrame(
        centres,
        ranges,
        None if labels is None else np.asarray(labels, dtype=object),
        tuple(var for var, _, _, _ in variables),
    )


def write_interval_csv(path, frame: IntervalFrame, pairing: str = "cr") -> None:
    """Export a frame; ``pairing`` picks centre/range or lower/upper columns."""
    if pairing not in ("cr", "bounds"):
        raise SchemaError(f"pairing must be 'cr' or 'bounds', got {pairing!r}")
    header = []
    for name in frame.variable_names:
        if pairing == "cr":
            header += [f"{name}_c", f"{name}_r"]
        else:
            header += [f"{name}_lo", f"{name}_hi"]
    if frame.labels is not None:
        header.append(LABEL_COLUMN)
    first = frame.lower()
    second = frame.upper()
    if pairing == "cr":
        first, second = frame.centres, frame.ranges
    lines = [",".join(header)]
    for h in range(frame.n):
        fields = []
        for k in range(frame.p):
            fields += [repr(float(first[h, k])), repr(float(second[h, k]))]
        if frame.labels is not None:
            fields.append(str(frame.labels[h]))
        lines.append(",".join(fields))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _listify(a) -> list:
    return np.asarray(a).tolist()


def model_to_dict(
    model: FittedModel, farness_params: FarnessParams | None = None, metadata: dict | None = None
) -> dict:
    payload = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "delta": float(model.delta),
        "mode": model.basis.mode.value,
        "s": int(model.basis.s_effective),
        "s_requested": int(model.basis.n_requested),
        "basis": _listify(model.basis.vectors),
        "ratios": _listify(model.basis.ratios),
        "norm_matrix": _listify(model.basis.norm_matrix),
        "class_labels": _listify(model.class_labels),
        "priors": _listify(model.priors),
        "class_barycentres": {
            "centres": _listify(model.class_centres),
            "ranges": _listify(model.class_ranges),
        },
        "farness": None,
        "metadata": metadata or {},
    }
    if farness_params is not None:
        payload["farness"] = {
            "labels": list(farness_params.labels),
            "lambdas": _listify(farness_params.lambdas),
            "locations": _listify(farness_params.locations),
            "scales": _listify(farness_params.scales),
        }
    return payload


def model_from_dict(payload: dict):
    """Rebuild (model, farness params or None, metadata) from a model dict."""
    version = payload.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported model schema version {version!r}; expected {MODEL_SCHEMA_VERSION}"
        )
    try:
        basis = DiscriminantBasis(
            vectors=np.asarray(payload["basis"], dtype=float),
            ratios=np.asarray(payload["ratios"], dtype=float),
            mode=OrthogonalityMode(payload["mode"]),
            norm_matrix=np.asarray(payload["norm_matrix"], dtype=float),
            n_requested=int(payload["s_requested"]),
        )
        model = model_from_barycentres(
            basis,
            float(payload["delta"]),
            np.asarray(payload["class_labels"], dtype=object),
            np.asarray(payload["priors"], dtype=float),
            np.asarray(payload["class_barycentres"]["centres"], dtype=float),
            np.asarray(payload["class_barycentres"]["ranges"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed model file: {exc}") from None
    params = None
    if payload.get("farness") is not None:
        block = payload["farness"]
        params = FarnessParams(
            labels=tuple(block["labels"]),
            lambdas=np.asarray(block["lambdas"], dtype=float),
            locations=np.asarray(block["locations"], dtype=float),
            scales=np.asarray(block["scales"], dtype=float),
        )
    return model, params, payload.get("metadata", {})


def save_model(path, model, farness_params=None, metadata=None) -> None:
    payload = model_to_dict(model, farness_params, metadata)
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(payload)
