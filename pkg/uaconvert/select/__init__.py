from .representative import (
    FilteredEnsemble,
    KdeEstimate,
    Selection,
    SelectionStrategy,
    agreement_filter,
    best_strategy,
    expected_score_ecg,
    kde,
    minmax_score_ecg,
    most_likely_score_ecg,
    quality_table,
    select_representatives,
    selection_quality,
    silverman_bandwidth,
    stack_selections,
)

__all__ = [
    "FilteredEnsemble",
    "KdeEstimate",
    "Selection",
    "SelectionStrategy",
    "agreement_filter",
    "best_strategy",
    "expected_score_ecg",
    "kde",
    "minmax_score_ecg",
    "most_likely_score_ecg",
    "quality_table",
    "select_representatives",
    "selection_quality",
    "silverman_bandwidth",
    "stack_selections",
]
