"""Run configuration: a flat JSON document, overridable from the command line."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from cospread.evaluation import MODEL_ROWS, ExperimentConfig
from cospread.features import LEAKAGE_MODES, CentralityConfig
from cospread.graph import RULES
from cospread.ingest import FORMATS

OUTPUT_ENV = "COSPREAD_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, "cospread-out")


@dataclass
class RunConfig:
    dataset: str | None = None
    features: str | None = None
    format: str = "canonical"
    rule: str = "tree"
    leakage: str = "paper"
    centrality_tol: float = 1e-8
    centrality_max_iter: int = 1000
    scaler: str = "minmax"
    models: list[str] = field(default_factory=lambda: list(MODEL_ROWS))
    hyperparams: dict[str, dict] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    test_fraction: float = 0.2
    svm_sample_cap: int | None = 10_000
    output_dir: str = field(default_factory=default_output_dir)
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)
    dump_predictions: bool = False

    def validate(self) -> "RunConfig":
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.rule not in RULES:
            raise ConfigError(f"rule must be one of {RULES}")
        if self.leakage not in (*LEAKAGE_MODES, "both"):
            raise ConfigError(f"leakage must be one of {LEAKAGE_MODES + ('both',)}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        try:
            self.experiment(LEAKAGE_MODES[0])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    @property
    def leakage_modes(self) -> list[str]:
        return list(LEAKAGE_MODES) if self.leakage == "both" else [self.leakage]

    def experiment(self, leakage: str) -> ExperimentConfig:
        return ExperimentConfig(
            models=list(self.models),
            hyperparams=dict(self.hyperparams),
            seeds=[int(s) for s in self.seeds],
            test_fraction=self.test_fraction,
            svm_sample_cap=self.svm_sample_cap,
            scaler=self.scaler,
            rule=self.rule,
            leakage=leakage,
            centrality=CentralityConfig(self.centrality_tol, self.centrality_max_iter),
            threads=self.threads,
            predictions_dir=str(Path(self.output_dir) / "predictions") if self.dump_predictions else None,
        )


KNOWN_KEYS = {f.name for f in fields(RunConfig)}


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Read ``path`` (JSON object), apply non-None ``overrides``, validate."""
    values = {}
    if path is not None:
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError("config must be a JSON object")
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        cfg = RunConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()
