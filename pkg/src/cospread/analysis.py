"""Min-max scaling, feature correlations and PCA."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cospread.features import FeatureMatrix


@dataclass(frozen=True)
class ScalerParams:
    x_min: np.ndarray
    x_max: np.ndarray
    n_rows: int

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != len(self.x_min):
            raise ValueError(f"scaler fitted on {len(self.x_min)} columns, got {X.shape[1]}")
        span = self.x_max - self.x_min
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (X - self.x_min) / safe, 0.0)

    def to_dict(self) -> dict:
        return {"x_min": self.x_min.tolist(), "x_max": self.x_max.tolist(), "n_rows": self.n_rows}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerParams":
        return cls(np.array(d["x_min"], dtype=np.float64), np.array(d["x_max"], dtype=np.float64), int(d["n_rows"]))


def fit_minmax(train: FeatureMatrix | np.ndarray) -> ScalerParams:
    X = train.X if isinstance(train, FeatureMatrix) else np.asarray(train, dtype=np.float64)
    if len(X) == 0:
        raise ValueError("cannot fit a scaler on zero rows")
    return ScalerParams(X.min(axis=0), X.max(axis=0), len(X))


def apply_minmax(params: ScalerParams, m: FeatureMatrix) -> FeatureMatrix:
    """Map each column through ``(x - min) / (max - min)``.

    Constant columns become 0. Test rows outside the fitted range are left
    outside [0, 1].
    """
    return FeatureMatrix(params.transform(m.X), m.y, m.columns)


def correlation_matrix(m: FeatureMatrix | np.ndarray) -> np.ndarray:
    X = m.X if isinstance(m, FeatureMatrix) else np.asarray(m, dtype=np.float64)
    if len(X) < 2:
        raise ValueError("correlation needs at least two rows")
    Z = X - X.mean(axis=0)
    sd = np.sqrt((Z * Z).sum(axis=0))
    live = sd > 0
    Z[:, live] /= sd[live]
    Z[:, ~live] = 0.0
    C = np.clip(Z.T @ Z, -1.0, 1.0)
    C = (C + C.T) / 2.0
    np.fill_diagonal(C, 1.0)
    return C


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    scale: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return ((np.asarray(X, dtype=np.float64) - self.mean) / self.scale) @ self.components.T

    def inverse_transform(self, Z: np.ndarray) -> np.ndarray:
        """Back to the (standardized, if fitted so) centred input space plus mean."""
        return (Z @ self.components) * self.scale + self.mean


def pca_fit(m: FeatureMatrix | np.ndarray, k: int = 2, standardize: bool = True) -> PcaModel:
    """Principal components from the covariance of the (z-scored) data.

    Each component's largest-magnitude entry is made positive so output is
    reproducible across platforms.
    """
    X = m.X if isinstance(m, FeatureMatrix) else np.asarray(m, dtype=np.float64)
    n, d = X.shape
    if not 1 <= k <= d:
        raise ValueError(f"k must be in [1, {d}], got {k}")
    if n <= d:
        raise ValueError(f"PCA needs more rows than columns ({n} <= {d})")
    mean = X.mean(axis=0)
    Z = X - mean
    if not np.any(Z):
        raise ValueError("degenerate data: all rows are identical")
    scale = np.ones(d)
    if standardize:
        sd = Z.std(axis=0, ddof=1)
        scale = np.where(sd > 0, sd, 1.0)
        Z = Z / scale
    cov = Z.T @ Z / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order].T
    flip = np.sign(evecs[np.arange(d), np.abs(evecs).argmax(axis=1)])
    evecs *= flip[:, None]
    ratio = evals / evals.sum()
    return PcaModel(mean, scale, evecs[:k], ratio[:k])


def pca_transform(model: PcaModel, m: FeatureMatrix | np.ndarray) -> np.ndarray:
    X = m.X if isinstance(m, FeatureMatrix) else m
    return model.transform(X)


def write_analysis(m: FeatureMatrix, outdir, standardize: bool = True) -> dict[str, Path]:
    """Write correlation, scree and 2-D projection CSVs into ``outdir``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {k: out / f"{k}.csv" for k in ("correlation", "scree", "projection")}

    C = correlation_matrix(m)
    with open(paths["correlation"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", *m.columns])
        for name, row in zip(m.columns, C):
            w.writerow([name] + [f"{v:.10g}" for v in row])

    full = pca_fit(m, k=len(m.columns), standardize=standardize)
    with open(paths["scree"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["component", "ratio", "cumulative"])
        for i, (r, c) in enumerate(zip(full.explained_variance_ratio, np.cumsum(full.explained_variance_ratio)), 1):
            w.writerow([i, f"{r:.10g}", f"{c:.10g}"])

    P = pca_transform(full, m)[:, :2]
    with open(paths["projection"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pc1", "pc2", "target"])
        for (p1, p2), t in zip(P, m.y):
            w.writerow([f"{p1:.10g}", f"{p2:.10g}", int(t)])
    return paths
