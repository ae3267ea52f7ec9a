"""Discrete AdaBoost over decision stumps."""

from __future__ import annotations

import math

import numpy as np

from cospread.models.base import as_signs, check_two_classes, register

# vote weight used in place of +inf when a stump makes no weighted error
EPS_FLOOR = 1e-10


def stump_alpha(eps: float) -> float:
    """Vote weight ½·ln((1-ε)/ε); zero once ε reaches one half."""
    if eps >= 0.5:
        return 0.0
    eps = max(eps, EPS_FLOOR)
    return 0.5 * math.log((1.0 - eps) / eps)


def fit_stump(X, y, w, order):
    """Weighted-error-minimizing stump ``h(x) = s if x[f] > t else -s``.

    ``order`` holds the per-feature argsort of ``X``. Returns
    ``(error, feature, threshold, polarity)``; ``threshold=-inf`` is the
    constant stump.
    """
    pos_w = np.where(y > 0, w, 0.0)
    neg_w = w - pos_w
    total = w.sum()
    w_neg = neg_w.sum()
    # everything predicted +1, or everything -1
    best = (w_neg, 0, -np.inf, 1) if w_neg <= total - w_neg else (total - w_neg, 0, -np.inf, -1)
    for f in range(X.shape[1]):
        o = order[:, f]
        xs = X[o, f]
        lp = np.cumsum(pos_w[o])[:-1]
        ln = np.cumsum(neg_w[o])[:-1]
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        err_pos = lp + (w_neg - ln)
        err = np.where(valid, np.minimum(err_pos, total - err_pos), np.inf)
        i = int(np.argmin(err))
        if err[i] < best[0]:
            pol = 1 if err_pos[i] <= total - err_pos[i] else -1
            best = (float(err[i]), f, float((xs[i] + xs[i + 1]) / 2.0), pol)
    return best


def stump_predict(X, f, t, s):
    return np.where(X[:, f] > t, s, -s)


@register
class AdaBoost:
    family = "adaboost"

    def __init__(self, n_estimators=50):
        self.n_estimators = n_estimators

    def get_params(self):
        return {"n_estimators": self.n_estimators}

    def fit(self, X, y):
        """Boost up to ``n_estimators`` stumps.

        Stops early when the best stump's weighted error reaches 0.5 (that
        round is discarded) or hits 0 (kept with a finite, large vote).
        ``history_`` records per kept round the error, vote, ensemble
        training error and the running bound ∏ 2·sqrt(ε(1-ε)).
        """
        X = np.asarray(X, dtype=np.float64)
        y = as_signs(y)
        check_two_classes(y)
        n = len(X)
        order = np.argsort(X, axis=0, kind="stable")
        w = np.full(n, 1.0 / n)
        score = np.zeros(n)
        self.stumps_ = []
        self.history_ = []
        bound = 1.0
        for _ in range(self.n_estimators):
            eps, f, t, s = fit_stump(X, y, w, order)
            eps = eps / w.sum()
            if eps < EPS_FLOOR:
                eps = 0.0  # cumulative-sum rounding on a perfect stump
            if eps >= 0.5 - 1e-12:
                break
            alpha = stump_alpha(eps)
            h = stump_predict(X, f, t, s) if np.isfinite(t) else np.full(n, s)
            score += alpha * h
            self.stumps_.append((f, t, s, alpha))
            bound *= 2.0 * math.sqrt(max(eps, 0.0) * (1.0 - eps))
            err = float(np.mean(np.where(score >= 0, 1, -1) != y))
            self.history_.append({"eps": eps, "alpha": alpha, "train_error": err, "bound": bound})
            if eps <= 0.0:
                break
            w = w * np.exp(-alpha * y * h)
            w /= w.sum()
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=np.float64)
        score = np.zeros(len(X))
        for f, t, s, alpha in self.stumps_:
            h = stump_predict(X, f, t, s) if np.isfinite(t) else np.full(len(X), s)
            score += alpha * h
        return score

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, -1)

    def to_dict(self):
        return {
            "stumps": [[int(f), float(t) if np.isfinite(t) else None, int(s), float(a)]
                       for f, t, s, a in self.stumps_],
            "history": self.history_,
        }

    @classmethod
    def from_dict(cls, hp, d):
        m = cls(**hp)
        m.stumps_ = [(f, -np.inf if t is None else t, s, a) for f, t, s, a in d["stumps"]]
        m.history_ = d.get("history", [])
        return m
