from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from cospread.analysis import ScalerParams

MODEL_FORMAT_VERSION = 1
FAMILIES: dict[str, type] = {}


def register(cls):
    FAMILIES[cls.family] = cls
    return cls


def as_signs(y) -> np.ndarray:
    y = np.asarray(y)
    if not np.isin(y, (-1, 1)).all():
        raise ValueError("targets must be -1 or +1")
    return y.astype(np.int64)


def check_two_classes(y: np.ndarray):
    if len(np.unique(y)) < 2:
        raise ValueError("training data contains a single class")


@register
class MajorityBaseline:
    """Predicts the most frequent training class (+1 on a tie)."""

    family = "majority"

    def __init__(self):
        self.label_ = 1

    def fit(self, X, y):
        y = as_signs(y)
        self.label_ = 1 if (y > 0).sum() >= (y < 0).sum() else -1
        return self

    def predict(self, X):
        return np.full(len(X), self.label_, dtype=np.int64)

    def get_params(self):
        return {}

    def to_dict(self):
        return {"label": self.label_}

    @classmethod
    def from_dict(cls, hp, d):
        m = cls()
        m.label_ = int(d["label"])
        return m


@dataclass
class TrainedModel:
    """A fitted estimator plus the scaler its inputs must go through."""

    family: str
    estimator: object
    scaler: ScalerParams | None = None
    metadata: dict = field(default_factory=dict)

    def _prep(self, X):
        X = np.asarray(X, dtype=np.float64)
        return self.scaler.transform(X) if self.scaler is not None else X

    def predict(self, X) -> np.ndarray:
        return self.estimator.predict(self._prep(X))

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "family": self.family,
            "hyperparameters": self.estimator.get_params(),
            "params": self.estimator.to_dict(),
            "scaler": self.scaler.to_dict() if self.scaler is not None else None,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedModel":
        if d.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {d.get('format_version')!r}")
        family = d["family"]
        if family not in FAMILIES:
            raise ValueError(f"unknown model family {family!r}")
        est = FAMILIES[family].from_dict(d["hyperparameters"], d["params"])
        scaler = ScalerParams.from_dict(d["scaler"]) if d.get("scaler") else None
        return cls(family, est, scaler, d.get("metadata", {}))

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        return cls.from_dict(json.loads(text))
