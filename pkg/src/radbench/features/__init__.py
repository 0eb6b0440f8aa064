from .extract import ExtractionSettings, FeatureVector, extract_feature_vector, intensity_features
from .firstorder import firstorder_features
from .shape import shape3d

__all__ = [
    "ExtractionSettings",
    "FeatureVector",
    "extract_feature_vector",
    "intensity_features",
    "firstorder_features",
    "shape3d",
]
