"""Gaussian and Bernoulli naive Bayes for two classes."""

from __future__ import annotations

import numpy as np

from cospread.models.base import as_signs, check_two_classes, register

CLASSES = np.array([-1, 1])


def _normalize(joint):
    top = joint.max(axis=1, keepdims=True)
    p = np.exp(joint - top)
    return p / p.sum(axis=1, keepdims=True)


class _NaiveBayes:
    def predict_proba(self, X):
        """Posterior over ``CLASSES`` (columns: -1, +1)."""
        return _normalize(self._joint_log_likelihood(np.asarray(X, dtype=np.float64)))

    def predict(self, X):
        jll = self._joint_log_likelihood(np.asarray(X, dtype=np.float64))
        # ties go to +1
        return np.where(jll[:, 1] >= jll[:, 0], 1, -1)


@register
class GaussianNB(_NaiveBayes):
    family = "gaussian_nb"

    def __init__(self, var_floor=1e-9):
        self.var_floor = var_floor

    def get_params(self):
        return {"var_floor": self.var_floor}

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = as_signs(y)
        check_two_classes(y)
        groups = [X[y == c] for c in CLASSES]
        if min(len(g) for g in groups) < 2:
            raise ValueError("each class needs at least two rows")
        self.log_prior_ = np.log([len(g) / len(X) for g in groups])
        self.theta_ = np.array([g.mean(axis=0) for g in groups])
        var = np.array([g.var(axis=0) for g in groups])
        floor = self.var_floor * var.max() if var.max() > 0 else self.var_floor
        self.var_ = np.maximum(var, floor)
        return self

    def _joint_log_likelihood(self, X):
        out = np.empty((len(X), 2))
        for k in range(2):
            ll = -0.5 * (np.log(2 * np.pi * self.var_[k]) + (X - self.theta_[k]) ** 2 / self.var_[k])
            out[:, k] = self.log_prior_[k] + ll.sum(axis=1)
        return out

    def to_dict(self):
        return {"log_prior": self.log_prior_.tolist(), "theta": self.theta_.tolist(), "var": self.var_.tolist()}

    @classmethod
    def from_dict(cls, hp, d):
        m = cls(**hp)
        m.log_prior_ = np.array(d["log_prior"])
        m.theta_ = np.array(d["theta"])
        m.var_ = np.array(d["var"])
        return m


@register
class BernoulliNB(_NaiveBayes):
    """Features are binarized at ``threshold`` (x > threshold -> 1)."""

    family = "bernoulli_nb"

    def __init__(self, threshold=0.5, alpha=1.0):
        self.threshold = threshold
        self.alpha = alpha

    def get_params(self):
        return {"threshold": self.threshold, "alpha": self.alpha}

    def fit(self, X, y):
        B = (np.asarray(X, dtype=np.float64) > self.threshold).astype(np.float64)
        y = as_signs(y)
        check_two_classes(y)
        counts = np.array([(y == c).sum() for c in CLASSES], dtype=np.float64)
        ones = np.array([B[y == c].sum(axis=0) for c in CLASSES])
        self.log_prior_ = np.log(counts / counts.sum())
        self.feature_prob_ = (ones + self.alpha) / (counts[:, None] + 2 * self.alpha)
        return self

    def _joint_log_likelihood(self, X):
        B = (X > self.threshold).astype(np.float64)
        lp, lq = np.log(self.feature_prob_), np.log1p(-self.feature_prob_)
        return B @ lp.T + (1 - B) @ lq.T + self.log_prior_

    def to_dict(self):
        return {"log_prior": self.log_prior_.tolist(), "feature_prob": self.feature_prob_.tolist()}

    @classmethod
    def from_dict(cls, hp, d):
        m = cls(**hp)
        m.log_prior_ = np.array(d["log_prior"])
        m.feature_prob_ = np.array(d["feature_prob"])
        return m
