"""Fisher discriminant analysis for interval-valued data.

Intervals are centre/range pairs with a latent microdata assumption; class
separation is measured with the closed-form squared Mallows distance, and
discriminant directions maximize the resulting between/within inertia ratio
under orthonormality constraints. Includes a minimum-distance classifier,
tuning, diagnostics (farness, ldac, silhouettes), simulation benchmarks,
and SVG plots.
"""

from .classify import (
    FittedModel,
    TuneConfig,
    TuneResult,
    fit,
    model_from_barycentres,
    predict,
    predict_frame,
    projected_sq_distances,
    stratified_split,
    tune,
)
from .core import (
    DELTA_MAX,
    IntervalFrame,
    LatentSpec,
    NamedDistribution,
    barycentre,
    delta_of,
    from_bounds,
    inertia,
    mallows_sq,
    moore_project,
)
from .diagnostics import (
    ClassMapRecord,
    ClassMetrics,
    ConfusionMatrix,
    FarnessParams,
    FarnessTable,
    SilhouetteReport,
    class_map_records,
    confusion,
    dac_ldac,
    farness,
    fit_farness,
    metrics,
    silhouette,
)
from .fisher import (
    DiscriminantBasis,
    FisherConfig,
    OrthogonalityMode,
    ScatterSet,
    fisher_ratio,
    fisher_ratio_gradient,
    orthogonality_matrix,
    scatter,
    solve_basis,
)
from .plots import PlotStyle, class_map_svg, farness_svg, mosaic_svg, silhouette_svg
from .simulate import (
    ScenarioSpec,
    StudyResult,
    benchmark_model,
    generate,
    one_minus_acv,
    run_study,
    theoretical_scatter,
)

__version__ = "0.1.0"

__all__ = [
    "DELTA_MAX",
    "ClassMapRecord",
    "ClassMetrics",
    "ConfusionMatrix",
    "DiscriminantBasis",
    "FarnessParams",
    "FarnessTable",
    "FisherConfig",
    "FittedModel",
    "IntervalFrame",
    "LatentSpec",
    "NamedDistribution",
    "OrthogonalityMode",
    "PlotStyle",
    "ScatterSet",
    "ScenarioSpec",
    "SilhouetteReport",
    "StudyResult",
    "TuneConfig",
    "TuneResult",
    "barycentre",
    "benchmark_model",
    "class_map_records",
    "class_map_svg",
    "confusion",
    "dac_ldac",
    "delta_of",
    "farness",
    "farness_svg",
    "fisher_ratio",
    "fisher_ratio_gradient",
    "fit",
    "fit_farness",
    "from_bounds",
    "generate",
    "inertia",
    "mallows_sq",
    "metrics",
    "model_from_barycentres",
    "moore_project",
    "mosaic_svg",
    "one_minus_acv",
    "orthogonality_matrix",
    "predict",
    "predict_frame",
    "projected_sq_distances",
    "run_study",
    "scatter",
    "silhouette",
    "silhouette_svg",
    "solve_basis",
    "stratified_split",
    "theoretical_scatter",
    "tune",
]
