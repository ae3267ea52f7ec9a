"""Splits, confusion matrices and the experiment runner."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from cospread.analysis import apply_minmax, fit_minmax
from cospread.features import CentralityConfig, FeatureMatrix, featurize_all
from cospread.graph import build_graph, graph_stats
from cospread.models import (
    AdaBoost, BernoulliNB, DecisionTree, GaussianNB, KernelSpec, KernelSVM, LinearSVC,
    LogisticRegression, MajorityBaseline, TrainedModel,
)

logger = logging.getLogger(__name__)


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with +1 (real news) as the positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_predictions(cls, y_true, y_pred) -> "ConfusionMatrix":
        t, p = np.asarray(y_true) > 0, np.asarray(y_pred) > 0
        return cls(int((t & p).sum()), int((~t & ~p).sum()), int((~t & p).sum()), int((t & ~p).sum()))


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("accuracy of an empty confusion matrix")
    return (cm.tp + cm.tn) / cm.total


def stratified_split(targets, test_fraction: float = 0.2, seed: int = 0):
    """Per-class shuffled holdout; each class contributes round(frac * n_c) test rows."""
    y = np.asarray(targets)
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValueError("stratified split needs both classes")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in classes:
        idx = np.flatnonzero(y == c)
        idx = idx[rng.permutation(len(idx))]
        k = int(round(test_fraction * len(idx)))
        test.append(idx[:k])
        train.append(idx[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_subsample(targets, cap: int, seed: int) -> np.ndarray:
    y = np.asarray(targets)
    if len(y) <= cap:
        return np.arange(len(y))
    _, keep = stratified_split(y, cap / len(y), seed)
    return keep


# key -> (table row name, constructor, kwargs); order is the report's row order
MODEL_ROWS = {
    "logistic": ("Logistic Regression", LogisticRegression, {}),
    "gaussian_nb": ("Naive Bayes", GaussianNB, {}),
    "bernoulli_nb": ("Naive Bayes (Bernoulli)", BernoulliNB, {}),
    "adaboost": ("AdaBoost", AdaBoost, {}),
    "tree_coarse": ("Coarse Tree (4 max splits)", DecisionTree, {"max_splits": 4}),
    "tree_medium": ("Medium Tree (25 max splits)", DecisionTree, {"max_splits": 25}),
    "tree_fine": ("Fine Tree (100 max splits)", DecisionTree, {"max_splits": 100}),
    "tree_very_fine": ("Very Fine Tree (no split limit)", DecisionTree, {"max_splits": None}),
    "svm_linear": ("SVM linear kernel", KernelSVM, {"kind": "linear"}),
    "linear_svc": ("Linear SVC", LinearSVC, {}),
    "svm_rbf": ("SVM RBF kernel", KernelSVM, {"kind": "rbf"}),
    "svm_poly3": ("SVC polynomial (degree 3) kernel", KernelSVM, {"kind": "poly", "degree": 3}),
    "svm_poly5": ("SVC polynomial (degree 5) kernel", KernelSVM, {"kind": "poly", "degree": 5}),
    "svm_poly7": ("SVC polynomial (degree 7) kernel", KernelSVM, {"kind": "poly", "degree": 7}),
    "majority": ("Majority baseline", MajorityBaseline, {}),
}
KERNEL_KEYS = ("kind", "gamma", "degree", "coef0")


def make_estimator(key: str, overrides: dict | None = None):
    if key not in MODEL_ROWS:
        raise KeyError(f"unknown model {key!r}; choose from {sorted(MODEL_ROWS)}")
    _, ctor, kwargs = MODEL_ROWS[key]
    kwargs = {**kwargs, **(overrides or {})}
    if ctor is KernelSVM:
        kernel = KernelSpec(**{k: kwargs.pop(k) for k in KERNEL_KEYS if k in kwargs})
        return KernelSVM(kernel=kernel, **kwargs)
    return ctor(**kwargs)


@dataclass
class ExperimentConfig:
    models: list[str] = field(default_factory=lambda: list(MODEL_ROWS))
    hyperparams: dict[str, dict] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    test_fraction: float = 0.2
    svm_sample_cap: int | None = 10_000
    scaler: str = "minmax"
    rule: str = "tree"
    leakage: str = "paper"
    centrality: CentralityConfig = field(default_factory=CentralityConfig)
    threads: int = 1
    predictions_dir: str | None = None

    def __post_init__(self):
        for key in self.models:
            if key not in MODEL_ROWS:
                raise ValueError(f"unknown model {key!r}")
        for key in self.hyperparams:
            if key not in MODEL_ROWS:
                raise ValueError(f"hyperparameters given for unknown model {key!r}")
        if self.scaler not in ("minmax", "none"):
            raise ValueError(f"unknown scaler {self.scaler!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")


@dataclass
class ExperimentReport:
    dataset: str
    rule: str
    leakage_mode: str
    n_samples: int
    graph: dict
    split: dict
    models: dict = field(default_factory=dict)
    importances: list = field(default_factory=list)
    importances_model: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(**d)


def train_model(key: str, X, y, overrides=None, scaler=None, seed=None, svm_sample_cap=None) -> TrainedModel:
    est = make_estimator(key, overrides)
    meta = {"key": key, "train_rows": int(len(X))}
    if isinstance(est, KernelSVM) and svm_sample_cap and len(X) > svm_sample_cap:
        keep = stratified_subsample(y, svm_sample_cap, seed or 0)
        meta["subsampled_from"] = int(len(X))
        X, y = X[keep], y[keep]
        meta["train_rows"] = int(len(X))
    est.fit(X, y)
    if seed is not None:
        meta["seed"] = seed
    if isinstance(est, KernelSVM):
        meta["converged"] = bool(est.converged_)
        meta["n_steps"] = int(est.n_steps_)
    return TrainedModel(est.family, est, scaler, meta)


def evaluate_features(fm: FeatureMatrix, cfg: ExperimentConfig, dataset="features",
                      graph_info=None) -> ExperimentReport:
    """Split, scale on the training rows, fit every configured model, score on the test rows."""
    report = ExperimentReport(
        dataset=dataset, rule=cfg.rule, leakage_mode=cfg.leakage, n_samples=len(fm),
        graph=graph_info or {},
        split={"kind": "stratified_holdout", "test_fraction": cfg.test_fraction,
               "seeds": list(cfg.seeds), "scaler": cfg.scaler,
               "svm_sample_cap": cfg.svm_sample_cap},
    )
    keys = list(cfg.models)
    if "majority" not in keys:
        keys.append("majority")
    rows = {k: {"name": MODEL_ROWS[k][0], "accuracies": [], "confusions": []} for k in keys}

    for s_i, seed in enumerate(cfg.seeds):
        try:
            train, test = stratified_split(fm.y, cfg.test_fraction, seed)
            tr, te = fm.take(train), fm.take(test)
            scaler = None
            if cfg.scaler == "minmax":
                scaler = fit_minmax(tr)
                tr, te = apply_minmax(scaler, tr), apply_minmax(scaler, te)
        except Exception as exc:
            raise StageError("split", exc) from exc
        for key in keys:
            try:
                model = train_model(key, tr.X, tr.y, cfg.hyperparams.get(key), scaler, seed, cfg.svm_sample_cap)
                pred = model.estimator.predict(te.X)
            except Exception as exc:
                raise StageError(f"train:{key}", exc) from exc
            cm = ConfusionMatrix.from_predictions(te.y, pred)
            row = rows[key]
            row["accuracies"].append(accuracy(cm))
            row["confusions"].append(asdict(cm))
            if s_i == 0:
                row["family"] = model.family
                row["hyperparameters"] = model.estimator.get_params()
                row["metadata"] = model.metadata
                if key == "tree_fine" or (key.startswith("tree") and not report.importances):
                    imp = model.estimator.feature_importances()
                    top = np.argsort(-imp, kind="stable")[:10]
                    report.importances = [[fm.columns[i], float(imp[i])] for i in top]
                    report.importances_model = key
                if cfg.predictions_dir:
                    _dump_predictions(Path(cfg.predictions_dir) / f"{cfg.leakage}_{key}.csv", test, te.y, pred)
    for row in rows.values():
        acc = np.array(row["accuracies"])
        row["mean"] = float(acc.mean())
        row["std"] = float(acc.std())
        row["confusion"] = row["confusions"][0]
    report.models = rows
    return report


def _dump_predictions(path: Path, ids, y_true, y_pred):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "target", "prediction"])
        for i, t, p in zip(ids, y_true, y_pred):
            w.writerow([int(i), int(t), int(p)])


def build_features(dataset, cfg: ExperimentConfig):
    """Graph + feature matrix for ``dataset`` under ``cfg``; returns (matrix, graph stats)."""
    try:
        g = build_graph(dataset, cfg.rule)
    except Exception as exc:
        raise StageError("graph", exc) from exc
    try:
        fm = featurize_all(g, cfg.leakage, cfg.centrality, cfg.threads)
    except Exception as exc:
        raise StageError("features", exc) from exc
    return fm, graph_stats(g).to_json()


def run_experiment(dataset, cfg: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    fm, stats = build_features(dataset, cfg)
    t1 = time.perf_counter()
    report = evaluate_features(fm, cfg, dataset.name, stats)
    logger.info("%s/%s: features %.1fs, models %.1fs", dataset.name, cfg.leakage,
                t1 - t0, time.perf_counter() - t1)
    return report


def render_table(reports: list[ExperimentReport]) -> str:
    """Accuracy table, one column per report (e.g. one per leakage mode)."""
    keys = [k for k in MODEL_ROWS if any(k in r.models for r in reports)]
    heads = [f"{r.leakage_mode} ({r.rule})" for r in reports]
    width = max(len(MODEL_ROWS[k][0]) for k in keys)
    col = max(17, *(len(h) for h in heads))
    lines = [f"dataset: {reports[0].dataset}   samples: {reports[0].n_samples}   "
             f"seeds: {reports[0].split['seeds']}",
             f"{'Method / Accuracy':<{width}}  " + "  ".join(f"{h:>{col}}" for h in heads)]
    lines.append("-" * len(lines[-1]))
    for k in keys:
        cells = []
        for r in reports:
            row = r.models.get(k)
            cells.append(f"{row['mean']:.4f} ± {row['std']:.4f}" if row else "-")
        lines.append(f"{MODEL_ROWS[k][0]:<{width}}  " + "  ".join(f"{c:>{col}}" for c in cells))
    for r in reports:
        if r.importances:
            top = ", ".join(f"{n}={v:.3f}" for n, v in r.importances)
            lines.append(f"top features [{r.leakage_mode}, {r.importances_model}]: {top}")
    return "\n".join(lines) + "\n"
