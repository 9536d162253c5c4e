"""Weighted kNN classification with a learned diagonal metric per training point.

Each training point carries its own non-negative weight vector lambda; the
distance from that point to anything else is the quadratic form
sum_l lambda_l^2 (x_l - x'_l)^2.  The weights are trained by stochastic
gradient descent on a softmax negative log-likelihood over inverse-distance
class supports, which makes the classifier locally adaptive and the learned
weights directly readable as per-decision feature relevances.
"""

from .data import (
    FoldPlan,
    generate_classification,
    generate_licorice,
    licorice_geometry,
    load_csv,
    make_stratified_folds,
    take,
    write_csv,
    zscore_apply,
    zscore_fit_transform,
)
from .evaluation import (
    ClassFingerprint,
    CvResult,
    cross_validate,
    export_distance_matrix,
    fingerprints,
    reclassify_by_matrix,
    write_distance_matrix,
)
from .inference import (
    ProbabilityVector,
    SupportVector,
    class_probabilities,
    explain,
    predict,
    support,
)
from .model import (
    DataFormatError,
    DegenerateMetricError,
    DiagonalMetric,
    DimensionError,
    Hyperparams,
    InsufficientPointsError,
    LabeledDataset,
    LannError,
    LannModel,
    RelevanceProfile,
    Scaler,
    identity_metric,
    normalize_metric,
)
from .neighbors import (
    Neighborhood,
    brute_force_neighbors,
    find_neighbors,
    local_distance,
)
from .training import (
    GradientCheckReport,
    GradientRecord,
    TrainReport,
    check_gradients,
    fit,
    sample_gradients,
    sample_loss,
)

__version__ = "0.1.0"

__all__ = [
    "ClassFingerprint",
    "CvResult",
    "DataFormatError",
    "DegenerateMetricError",
    "DiagonalMetric",
    "DimensionError",
    "FoldPlan",
    "GradientCheckReport",
    "GradientRecord",
    "Hyperparams",
    "InsufficientPointsError",
    "LabeledDataset",
    "LannError",
    "LannModel",
    "Neighborhood",
    "ProbabilityVector",
    "RelevanceProfile",
    "Scaler",
    "SupportVector",
    "TrainReport",
    "brute_force_neighbors",
    "check_gradients",
    "class_probabilities",
    "cross_validate",
    "explain",
    "export_distance_matrix",
    "find_neighbors",
    "fingerprints",
    "fit",
    "generate_classification",
    "generate_licorice",
    "identity_metric",
    "licorice_geometry",
    "load_csv",
    "local_distance",
    "make_stratified_folds",
    "normalize_metric",
    "predict",
    "reclassify_by_matrix",
    "sample_gradients",
    "sample_loss",
    "support",
    "take",
    "write_csv",
    "write_distance_matrix",
    "zscore_apply",
    "zscore_fit_transform",
]
