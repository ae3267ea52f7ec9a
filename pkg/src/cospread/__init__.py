"""Signed co-spreading graphs, per-edge structural features and edge-sign classifiers."""

__version__ = "0.1.0"
FEATURE_SCHEMA_VERSION = 1
