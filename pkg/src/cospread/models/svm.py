"""Kernel SVM trained by sequential minimal optimization."""

from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import asdict, dataclass

import numpy as np

from cospread.models.base import as_signs, check_two_classes, register

logger = logging.getLogger(__name__)

TAU = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None
    degree: int = 3
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "rbf", "poly"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")

    def resolve(self, X) -> "KernelSpec":
        """Fill in the default gamma, 1 / (n_features * var(X))."""
        if self.gamma is not None or self.kind == "linear":
            return self
        var = float(np.var(X))
        gamma = 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        return KernelSpec(self.kind, gamma, self.degree, self.coef0)

    def __call__(self, A, B):
        A = np.atleast_2d(A)
        B = np.atleast_2d(B)
        dot = A @ B.T
        if self.kind == "linear":
            return dot
        if self.kind == "poly":
            return (self.gamma * dot + self.coef0) ** self.degree
        sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * dot
        return np.exp(-self.gamma * np.maximum(sq, 0.0))

    def diag(self, X):
        if self.kind == "rbf":
            return np.ones(len(X))
        dot = (X * X).sum(axis=1)
        return dot if self.kind == "linear" else (self.gamma * dot + self.coef0) ** self.degree


class _RowCache:
    def __init__(self, kernel, X, max_bytes=256 << 20):
        self.kernel, self.X = kernel, X
        self.capacity = max(2, max_bytes // (8 * len(X)))
        self.rows = OrderedDict()

    def __getitem__(self, i):
        row = self.rows.get(i)
        if row is None:
            row = self.kernel(self.X[i], self.X)[0]
            self.rows[i] = row
            if len(self.rows) > self.capacity:
                self.rows.popitem(last=False)
        else:
            self.rows.move_to_end(i)
        return row


@register
class KernelSVM:
    """C-SVM solved in the dual, two multipliers per step.

    Working pairs come from the maximal-violation / second-order rule, so
    the loop ends exactly when the KKT conditions hold within ``tol``. If
    ``max_passes * n`` steps run out first, ``converged_`` is False and a
    warning is logged; the model is still usable.
    """

    family = "kernel_svm"

    def __init__(self, kernel: KernelSpec = KernelSpec(), C=1.0, tol=1e-3, max_passes=200):
        self.kernel = kernel if isinstance(kernel, KernelSpec) else KernelSpec(**kernel)
        self.C = C
        self.tol = tol
        self.max_passes = max_passes

    def get_params(self):
        return {"kernel": asdict(self.kernel), "C": self.C, "tol": self.tol, "max_passes": self.max_passes}

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = as_signs(y).astype(np.float64)
        check_two_classes(y)
        n = len(X)
        C = self.C
        self.kernel_ = self.kernel.resolve(X)
        K = _RowCache(self.kernel_, X)
        Kdiag = self.kernel_.diag(X)
        alpha = np.zeros(n)
        G = -np.ones(n)  # gradient of ½αᵀQα - eᵀα, Q = yyᵀ∘K
        self.converged_ = False
        steps = 0
        for steps in range(1, self.max_passes * n + 1):
            vals = -y * G
            up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
            low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
            i = int(np.argmax(np.where(up, vals, -np.inf)))
            m_up = vals[i]
            M_low = np.min(np.where(low, vals, np.inf))
            if m_up - M_low < self.tol:
                self.converged_ = True
                break
            Ki = K[i]
            b = m_up - vals
            a = Kdiag[i] + Kdiag - 2.0 * Ki
            a = np.where(a > 0, a, TAU)
            cand = low & (b > 0)
            j = int(np.argmin(np.where(cand, -(b * b) / a, np.inf)))
            Kj = K[j]
            step = b[j] / a[j]
            step = min(step, C - alpha[i] if y[i] > 0 else alpha[i])
            step = min(step, alpha[j] if y[j] > 0 else C - alpha[j])
            old_i, old_j = alpha[i], alpha[j]
            alpha[i] = min(max(old_i + y[i] * step, 0.0), C)
            alpha[j] = min(max(old_j - y[j] * step, 0.0), C)
            d_i, d_j = alpha[i] - old_i, alpha[j] - old_j
            G += y * (y[i] * d_i * Ki + y[j] * d_j * Kj)
        if not self.converged_:
            logger.warning("SMO stopped after %d steps without meeting tol=%g", steps, self.tol)
        self.n_steps_ = steps
        self.alpha_full_ = alpha
        self.grad_ = G
        self.intercept_ = self._intercept(alpha, y, G)
        sv = alpha > 0
        self.support_vectors_ = X[sv]
        self.dual_coef_ = (alpha * y)[sv]
        return self

    def _intercept(self, alpha, y, G):
        yG = y * G
        free = (alpha > 0) & (alpha < self.C)
        if free.any():
            rho = yG[free].mean()
        else:
            at_c = alpha >= self.C
            upper = (at_c & (y < 0)) | (~at_c & (y > 0))
            ub = yG[upper].min() if upper.any() else np.inf
            lb = yG[~upper].max() if (~upper).any() else -np.inf
            rho = (ub + lb) / 2.0 if np.isfinite(ub) and np.isfinite(lb) else (ub if np.isfinite(ub) else lb)
        return float(-rho)

    def decision_function(self, X, chunk=4096):
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(len(X))
        for lo in range(0, len(X), chunk):
            Kx = self.kernel_(X[lo:lo + chunk], self.support_vectors_)
            out[lo:lo + chunk] = Kx @ self.dual_coef_ + self.intercept_
        return out

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, -1)

    def to_dict(self):
        return {
            "kernel": asdict(self.kernel_),
            "support_vectors": self.support_vectors_.tolist(),
            "dual_coef": self.dual_coef_.tolist(),
            "intercept": self.intercept_,
            "converged": self.converged_,
            "n_steps": self.n_steps_,
        }

    @classmethod
    def from_dict(cls, hp, d):
        m = cls(**hp)
        m.kernel_ = KernelSpec(**d["kernel"])
        m.support_vectors_ = np.array(d["support_vectors"], dtype=np.float64).reshape(len(d["dual_coef"]), -1)
        m.dual_coef_ = np.array(d["dual_coef"], dtype=np.float64)
        m.intercept_ = float(d["intercept"])
        m.converged_ = bool(d["converged"])
        m.n_steps_ = int(d["n_steps"])
        return m
