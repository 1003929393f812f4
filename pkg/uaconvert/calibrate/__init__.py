from .audit import AuditResult, audit_guarantee, exact_pipeline, random_pipeline
from .scored import read_scores
from .selective import (
    FAILED,
    BoundPoint,
    CalibrationConfig,
    CalibrationOutcome,
    calibrate_lambda,
    confidence,
    empirical_selective_risk,
    hoeffding_radius,
    select_reliable,
)

__all__ = [
    "FAILED",
    "AuditResult",
    "BoundPoint",
    "CalibrationConfig",
    "CalibrationOutcome",
    "audit_guarantee",
    "calibrate_lambda",
    "confidence",
    "empirical_selective_risk",
    "exact_pipeline",
    "hoeffding_radius",
    "random_pipeline",
    "read_scores",
    "select_reliable",
]
