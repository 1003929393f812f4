from .distance import (
    ConversionQuality,
    GaussianSummary,
    conversion_quality,
    fit_gaussian,
    frechet_distance,
    rmse,
    sample_frechet,
)
from .information import discretize, mutual_information
from .ranking import (
    ConfusionMetrics,
    CurvePoints,
    aurc,
    auroc,
    confusion_metrics,
    risk_coverage,
    roc_curve,
)
from .summary import result_metrics, summarize_strategies
from .uncertainty import (
    Containment,
    ConvergenceCurves,
    ensemble_containment,
    esc_convergence_curve,
    histogram,
    pca_uncertainty_curve,
    score_interval_sizes,
)

__all__ = [
    "ConfusionMetrics",
    "Containment",
    "ConversionQuality",
    "ConvergenceCurves",
    "CurvePoints",
    "GaussianSummary",
    "aurc",
    "auroc",
    "confusion_metrics",
    "conversion_quality",
    "discretize",
    "ensemble_containment",
    "esc_convergence_curve",
    "fit_gaussian",
    "frechet_distance",
    "histogram",
    "mutual_information",
    "pca_uncertainty_curve",
    "rmse",
    "risk_coverage",
    "roc_curve",
    "sample_frechet",
    "result_metrics",
    "score_interval_sizes",
    "summarize_strategies",
]
