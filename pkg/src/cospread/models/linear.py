"""Logistic regression and a primal hinge-loss linear SVM."""

from __future__ import annotations

import numpy as np

from cospread.models.base import as_signs, check_two_classes, register


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@register
class LogisticRegression:
    """Full-batch gradient descent on the mean log-loss (+ optional L2 on w)."""

    family = "logistic"

    def __init__(self, lr=1.0, epochs=3000, l2=0.0):
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        self.lr = lr
        self.epochs = epochs
        self.l2 = l2
        self.coef_ = None
        self.intercept_ = 0.0
        self.n_iter_ = 0

    def get_params(self):
        return {"lr": self.lr, "epochs": self.epochs, "l2": self.l2}

    def loss_and_grad(self, theta, X, y):
        """Loss and gradient at ``theta = [w..., b]`` for targets in {-1, +1}."""
        w, b = theta[:-1], theta[-1]
        z = X @ w + b
        t = (y > 0).astype(np.float64)
        # log(1 + e^z) - t z, written to stay finite for large |z|
        loss = np.mean(np.logaddexp(0.0, z) - t * z) + 0.5 * self.l2 * (w @ w)
        r = (sigmoid(z) - t) / len(X)
        grad = np.empty_like(theta)
        grad[:-1] = X.T @ r + self.l2 * w
        grad[-1] = r.sum()
        return loss, grad

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = as_signs(y)
        check_two_classes(y)
        theta = np.zeros(X.shape[1] + 1)
        with np.errstate(over="ignore", invalid="ignore"):
            for epoch in range(self.epochs):
                loss, grad = self.loss_and_grad(theta, X, y)
                if not np.isfinite(loss):
                    raise FloatingPointError(f"logistic loss became {loss} at epoch {epoch}")
                theta -= self.lr * grad
        self.coef_, self.intercept_ = theta[:-1], float(theta[-1])
        self.n_iter_ = self.epochs
        return self

    def decision_function(self, X):
        return np.asarray(X, dtype=np.float64) @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        return sigmoid(self.decision_function(X))

    def predict(self, X):
        return np.where(self.predict_proba(X) >= 0.5, 1, -1)

    def to_dict(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    @classmethod
    def from_dict(cls, hp, d):
        m = cls(**hp)
        m.coef_ = np.array(d["coef"], dtype=np.float64)
        m.intercept_ = float(d["intercept"])
        return m


@register
class LinearSVC:
    """Pegasos-style sub-gradient descent on ``lam/2 |w|^2 + mean hinge``.

    The bias is folded in as a constant input column. With ``batch_size``
    unset every step uses the full data, which makes the result independent
    of row order and duplication; otherwise mini-batches are drawn with
    ``seed``. Each epoch the running average of the iterates is scored and
    the best one so far is kept; ``objective_`` holds the kept objective per
    epoch, so it never increases.
    """

    family = "linear_svc"

    def __init__(self, lam=1e-4, epochs=2000, seed=0, batch_size=None):
        self.lam = lam
        self.epochs = epochs
        self.seed = seed
        self.batch_size = batch_size
        self.coef_ = None
        self.intercept_ = 0.0
        self.objective_ = []

    def get_params(self):
        return {"lam": self.lam, "epochs": self.epochs, "seed": self.seed, "batch_size": self.batch_size}

    def objective(self, X, y, w_aug):
        Xa = np.hstack([X, np.ones((len(X), 1))])
        margins = 1.0 - y * (Xa @ w_aug)
        return 0.5 * self.lam * (w_aug @ w_aug) + np.maximum(margins, 0.0).mean()

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = as_signs(y).astype(np.float64)
        check_two_classes(y)
        Xa = np.hstack([X, np.ones((len(X), 1))])
        n, d = Xa.shape
        rng = np.random.default_rng(self.seed)
        radius = 1.0 / np.sqrt(self.lam)
        w = np.zeros(d)
        avg = np.zeros(d)
        best, best_obj = avg.copy(), np.inf
        self.objective_ = []
        for t in range(1, self.epochs + 1):
            if self.batch_size is None or self.batch_size >= n:
                Xb, yb = Xa, y
            else:
                pick = rng.choice(n, size=self.batch_size, replace=False)
                Xb, yb = Xa[pick], y[pick]
            active = yb * (Xb @ w) < 1.0
            grad = self.lam * w - (yb[active] @ Xb[active]) / len(Xb)
            w = w - grad / (self.lam * t)
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
            avg += (w - avg) / t
            obj = float(self.objective(X, y, avg))
            if obj < best_obj:
                best, best_obj = avg.copy(), obj
            self.objective_.append(best_obj)
        self.coef_, self.intercept_ = best[:-1].copy(), float(best[-1])
        return self

    def decision_function(self, X):
        return np.asarray(X, dtype=np.float64) @ self.coef_ + self.intercept_

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, -1)

    def to_dict(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    @classmethod
    def from_dict(cls, hp, d):
        m = cls(**hp)
        m.coef_ = np.array(d["coef"], dtype=np.float64)
        m.intercept_ = float(d["intercept"])
        return m
