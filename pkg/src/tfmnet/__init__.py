"""tfmnet: forma mentis networks from dependency-parsed transcripts,
graph/emotion features, explained tree-ensemble prediction."""

__version__ = "0.1.0"

from .conllu import Token, SentenceTree, Transcript, parse_conllu, parse_conllu_file
from .network import Tfmn, build_syntactic, distance_cdf, enrich_synonyms, tag_nodes
from .metrics import MetricVector, compute_metrics
from .emotions import EmotionProfile, count_emotions, null_model, profile_words, z_scores
from .features import FeatureTable, assemble, correlation_screen, minmax_scale
from .ensemble import (
    CvReport,
    EnsembleConfig,
    TrainedEnsemble,
    cross_validate,
    expand_grid,
    fit_gbm,
    fit_rfr,
    permutation_baseline,
)
from .explain import ShapMatrix, shap_feature_elimination, tree_shap
from .config import PipelineConfig, load_config
from .errors import TfmnetError

__all__ = [
    "Token", "SentenceTree", "Transcript", "parse_conllu", "parse_conllu_file",
    "Tfmn", "build_syntactic", "distance_cdf", "enrich_synonyms", "tag_nodes",
    "MetricVector", "compute_metrics",
    "EmotionProfile", "count_emotions", "null_model", "profile_words", "z_scores",
    "FeatureTable", "assemble", "correlation_screen", "minmax_scale",
    "CvReport", "EnsembleConfig", "TrainedEnsemble", "cross_validate",
    "expand_grid", "fit_gbm", "fit_rfr", "permutation_baseline",
    "ShapMatrix", "shap_feature_elimination", "tree_shap",
    "PipelineConfig", "load_config",
    "TfmnetError",
    "__version__",
]
