"""Evolutionary undersampling boosting (EUSBoost) and reference ensembles for
imbalanced binary classification."""

from ._core import (
    ClassLabel,
    ConfusionMatrix,
    DataError,
    Dataset,
    DegenerateError,
    EusConfig,
    Model,
    ModelFormatError,
    UndefinedMetricError,
    WeakLearnerSpec,
    accuracy,
    auc_single_point,
    compare,
    confusion_matrix,
    eus_fitness,
    eus_select,
    exhaustive_best,
    f_measure,
    generate_synthetic,
    geometric_mean,
    imbalance_ratio,
    load_csv,
    loo_1nn_gm,
    make_dataset,
    partition_by_class,
    precision,
    sensitivity,
    specificity,
    train,
    wilcoxon_signed_rank,
)

METHODS = ("BGG", "BST", "UNB", "RBB", "OVB", "RUB", "EUB")

__all__ = [name for name in dir() if not name.startswith("_")]
