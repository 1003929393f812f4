from .base import ClassifierModel, ExactGmmClassifier
from .batching import balanced_batches
from .esc import decide, decide_all, esc_score, ssc_mean_score, ssc_random_score
from .harness import (
    Strategy,
    StrategyResult,
    find_result,
    read_strategy_csv,
    strategy_harness,
    write_strategy_csv,
)
from .logistic import (
    LogisticClassifier,
    LogisticTrainConfig,
    bce_loss_and_grad,
    load_classifiers,
    save_classifiers,
    train_logistic,
)

__all__ = [
    "ClassifierModel",
    "ExactGmmClassifier",
    "LogisticClassifier",
    "LogisticTrainConfig",
    "Strategy",
    "StrategyResult",
    "balanced_batches",
    "bce_loss_and_grad",
    "decide",
    "decide_all",
    "esc_score",
    "find_result",
    "read_strategy_csv",
    "load_classifiers",
    "save_classifiers",
    "ssc_mean_score",
    "ssc_random_score",
    "strategy_harness",
    "train_logistic",
]
