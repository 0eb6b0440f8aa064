from .cluster import Dendrogram, heatmap_order, kmeans
from .expr import ExprDomainError, ExprSyntaxError, custom_transform, evaluate, parse_expression
from .metrics import (
    Metrics,
    auc_score,
    average_precision,
    compute_metrics,
    delong_compare,
    delong_test,
    evaluate as evaluate_model,
    permutation_test_ap,
    roc_curve,
)
from .models import (
    DEFAULT_GRIDS,
    EnsembleModel,
    SingleClassError,
    TrainedModel,
    ensemble_predict,
    grid_search_cv,
    train_classifier,
)
from .scalers import FittedScaler, fit_scaler, scale
from .search import BudgetError, SearchBudget, SearchResult, hyperband_schedule, hyperparameter_search
from .selection import (
    SelectionError,
    rfe,
    run_selector,
    select_from_model,
    select_k_best,
    select_stable,
    variance_threshold,
)
from .table import FeatureTable, TableError, read_table, split_random, write_table
from .tsne import tsne_embed

__all__ = [
    "Dendrogram", "heatmap_order", "kmeans",
    "ExprDomainError", "ExprSyntaxError", "custom_transform", "evaluate", "parse_expression",
    "Metrics", "auc_score", "average_precision", "compute_metrics",
    "delong_compare", "delong_test", "evaluate_model", "permutation_test_ap", "roc_curve",
    "DEFAULT_GRIDS", "EnsembleModel", "SingleClassError", "TrainedModel",
    "ensemble_predict", "grid_search_cv", "train_classifier",
    "FittedScaler", "fit_scaler", "scale",
    "BudgetError", "SearchBudget", "SearchResult", "hyperband_schedule", "hyperparameter_search",
    "SelectionError", "rfe", "run_selector", "select_from_model", "select_k_best",
    "select_stable", "variance_threshold",
    "FeatureTable", "TableError", "read_table", "split_random", "write_table",
    "tsne_embed",
]
