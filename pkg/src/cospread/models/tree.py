"""Gini decision tree grown best-first under a budget of splits."""

from __future__ import annotations

import heapq

import numpy as np

from cospread.models.base import as_signs, register

MIN_GAIN = 1e-12


def gini(n_pos, n):
    if n == 0:
        return 0.0
    p = n_pos / n
    return 2.0 * p * (1.0 - p)


def best_split(X, pos, rows, n_total):
    """Best (gain, feature, threshold) for the node holding ``rows``.

    Gain is the impurity decrease weighted by the node's share of all
    training rows. Thresholds are midpoints between consecutive distinct
    values; ties go to the lowest feature, then the lowest threshold.
    """
    n = len(rows)
    n_pos = int(pos[rows].sum())
    parent = gini(n_pos, n)
    best = (0.0, -1, 0.0)
    if n < 2 or n_pos in (0, n):
        return best
    left_n = np.arange(1, n, dtype=np.float64)
    right_n = n - left_n
    for f in range(X.shape[1]):
        xs = X[rows, f]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        cpos = np.cumsum(pos[rows][order])[:-1].astype(np.float64)
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        pl = cpos / left_n
        pr = (n_pos - cpos) / right_n
        child = (left_n * 2 * pl * (1 - pl) + right_n * 2 * pr * (1 - pr)) / n
        gain = np.where(valid, (parent - child) * n / n_total, -np.inf)
        i = int(np.argmax(gain))
        if gain[i] > best[0]:
            best = (float(gain[i]), f, float((xs[i] + xs[i + 1]) / 2.0))
    return best


@register
class DecisionTree:
    """Binary Gini tree; ``max_splits`` caps internal nodes (None = no cap).

    Growth is best-first: every frontier leaf sits in one priority queue
    keyed on its best impurity decrease, so the budget goes to the most
    useful splits anywhere in the tree rather than level by level.
    """

    family = "tree"

    def __init__(self, max_splits=None):
        self.max_splits = max_splits

    def get_params(self):
        return {"max_splits": self.max_splits}

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = as_signs(y)
        if len(X) == 0:
            raise ValueError("cannot fit a tree on zero rows")
        pos = (y > 0).astype(np.int64)
        n_total, d = X.shape
        self.n_features_ = d
        feature, threshold, left, right, gain, counts = [], [], [], [], [], []

        def new_leaf(rows):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            gain.append(0.0)
            n_pos = int(pos[rows].sum())
            counts.append((len(rows) - n_pos, n_pos))
            return len(feature) - 1

        heap = []

        def push(node, rows):
            g, f, t = best_split(X, pos, rows, n_total)
            if g > MIN_GAIN:
                heapq.heappush(heap, (-g, node, f, t, rows))

        root_rows = np.arange(n_total)
        push(new_leaf(root_rows), root_rows)
        budget = np.inf if self.max_splits is None else self.max_splits
        splits = 0
        while heap and splits < budget:
            g, node, f, t, rows = heapq.heappop(heap)
            go_left = X[rows, f] <= t
            lrows, rrows = rows[go_left], rows[~go_left]
            feature[node], threshold[node], gain[node] = f, t, -g
            left[node] = new_leaf(lrows)
            right[node] = new_leaf(rrows)
            splits += 1
            push(left[node], lrows)
            push(right[node], rrows)

        self.feature_ = np.array(feature, dtype=np.int64)
        self.threshold_ = np.array(threshold)
        self.left_ = np.array(left, dtype=np.int64)
        self.right_ = np.array(right, dtype=np.int64)
        self.gain_ = np.array(gain)
        self.counts_ = np.array(counts, dtype=np.int64)
        return self

    @property
    def n_splits(self) -> int:
        return int((self.feature_ >= 0).sum())

    @property
    def leaf_sign_(self):
        return np.where(self.counts_[:, 1] >= self.counts_[:, 0], 1, -1)

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature_[node]
            inner = f >= 0
            if not inner.any():
                return node
            r, nd = rows[inner], node[inner]
            go_left = X[r, f[inner]] <= self.threshold_[nd]
            node[inner] = np.where(go_left, self.left_[nd], self.right_[nd])

    def predict(self, X):
        return self.leaf_sign_[self.apply(X)]

    def feature_importances(self) -> np.ndarray:
        imp = np.zeros(self.n_features_)
        inner = self.feature_ >= 0
        np.add.at(imp, self.feature_[inner], self.gain_[inner])
        total = imp.sum()
        return imp / total if total > 0 else imp

    def to_dict(self):
        return {
            "n_features": self.n_features_,
            "feature": self.feature_.tolist(),
            "threshold": self.threshold_.tolist(),
            "left": self.left_.tolist(),
            "right": self.right_.tolist(),
            "gain": self.gain_.tolist(),
            "counts": self.counts_.tolist(),
        }

    @classmethod
    def from_dict(cls, hp, d):
        m = cls(**hp)
        m.n_features_ = int(d["n_features"])
        m.feature_ = np.array(d["feature"], dtype=np.int64)
        m.threshold_ = np.array(d["threshold"], dtype=np.float64)
        m.left_ = np.array(d["left"], dtype=np.int64)
        m.right_ = np.array(d["right"], dtype=np.int64)
        m.gain_ = np.array(d["gain"], dtype=np.float64)
        m.counts_ = np.array(d["counts"], dtype=np.int64).reshape(-1, 2)
        return m
