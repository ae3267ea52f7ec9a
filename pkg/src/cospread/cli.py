"""``cospread`` command line.

Exit codes: 0 success, 1 runtime or data failure, 2 configuration or usage
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from cospread import FEATURE_SCHEMA_VERSION, __version__
from cospread.analysis import apply_minmax, fit_minmax, write_analysis
from cospread.config import ConfigError, default_output_dir, load_config
from cospread.evaluation import (
    MODEL_ROWS, ConfusionMatrix, StageError, accuracy, build_features, evaluate_features,
    render_table, stratified_split, train_model,
)
from cospread.features import LEAKAGE_MODES, CentralityConfig, FeatureMatrix, featurize_all
from cospread.graph import RULES, build_graph, graph_stats
from cospread.ingest import FORMATS, SynthParams, generate_synthetic, load_dataset, write_dataset
from cospread.models import TrainedModel

logger = logging.getLogger("cospread")


def _load(args):
    return load_dataset(args.dataset, args.format)


def cmd_stats(args):
    ds = _load(args)
    rules = RULES if args.rule == "all" else (args.rule,)
    out = {}
    for rule in rules:
        g = build_graph(ds, rule)
        out[rule] = graph_stats(g).to_json()
        if args.edges_csv and len(rules) == 1:
            g.to_csv(args.edges_csv)
    print(json.dumps(out if args.rule == "all" else out[args.rule], indent=2))
    return 0


def cmd_featurize(args):
    ds = _load(args)
    g = build_graph(ds, args.rule)
    logger.info("graph: %s", graph_stats(g).to_json())
    cfg = CentralityConfig(args.tol, args.max_iter)
    fm = featurize_all(g, args.leakage, cfg, args.threads)
    fm.to_csv(args.out)
    logger.info("wrote %d rows to %s", len(fm), args.out)
    return 0


def cmd_analyze(args):
    fm = FeatureMatrix.from_csv(args.features)
    paths = write_analysis(fm, args.outdir or default_output_dir(), standardize=not args.no_standardize)
    for p in paths.values():
        print(p)
    return 0


def _run_config(args):
    overrides = {
        "dataset": getattr(args, "dataset", None),
        "features": getattr(args, "features", None),
        "format": getattr(args, "format", None),
        "rule": getattr(args, "rule", None),
        "leakage": getattr(args, "leakage", None),
        "models": args.models.split(",") if getattr(args, "models", None) else None,
        "seeds": [int(s) for s in args.seeds.split(",")] if getattr(args, "seeds", None) else None,
        "svm_sample_cap": getattr(args, "svm_sample_cap", None),
        "output_dir": getattr(args, "out", None),
        "threads": getattr(args, "threads", None),
        "dump_predictions": True if getattr(args, "dump_predictions", False) else None,
    }
    cfg = load_config(args.config, overrides)
    if (cfg.dataset is None) == (cfg.features is None):
        raise ConfigError("give exactly one of dataset or features")
    if cfg.features is not None and cfg.leakage != "paper":
        raise ConfigError("a precomputed feature CSV fixes the leakage mode; use a dataset to switch it")
    return cfg


def _matrices(cfg):
    """Yield (leakage mode, feature matrix, graph stats, dataset name)."""
    if cfg.features is not None:
        yield cfg.leakage, FeatureMatrix.from_csv(cfg.features), {}, Path(cfg.features).stem
        return
    ds = load_dataset(cfg.dataset, cfg.format)
    for mode in cfg.leakage_modes:
        fm, stats = build_features(ds, cfg.experiment(mode))
        yield mode, fm, stats, ds.name


def cmd_report(args):
    cfg = _run_config(args)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for mode, fm, stats, name in _matrices(cfg):
        logger.info("evaluating %d samples (%s)", len(fm), mode)
        reports.append(evaluate_features(fm, cfg.experiment(mode), name, stats))
    payload = {"version": __version__, "reports": [r.to_dict() for r in reports]}
    (out / "report.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    table = render_table(reports)
    (out / "report.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    return 0


def cmd_train(args):
    cfg = _run_config(args)
    out = Path(cfg.output_dir) / "models"
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for mode, fm, _, _ in _matrices(cfg):
        exp = cfg.experiment(mode)
        seed = exp.seeds[0]
        train, test = stratified_split(fm.y, exp.test_fraction, seed)
        tr, te = fm.take(train), fm.take(test)
        scaler = fit_minmax(tr) if exp.scaler == "minmax" else None
        if scaler is not None:
            tr = apply_minmax(scaler, tr)
        for key in exp.models:
            try:
                model = train_model(key, tr.X, tr.y, exp.hyperparams.get(key), scaler, seed, exp.svm_sample_cap)
            except Exception as exc:
                raise StageError(f"train:{key}", exc) from exc
            model.metadata["leakage"] = mode
            path = out / f"{mode}_{key}.json"
            path.write_text(model.to_json() + "\n", encoding="utf-8")
            acc = accuracy(ConfusionMatrix.from_predictions(te.y, model.predict(te.X)))
            summary[f"{mode}/{key}"] = {"path": str(path), "test_accuracy": acc}
    print(json.dumps(summary, indent=2))
    return 0


def cmd_predict(args):
    model = TrainedModel.from_json(Path(args.model).read_text(encoding="utf-8"))
    fm = FeatureMatrix.from_csv(args.features)
    pred = model.predict(fm.X)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("sample_id,target,prediction\n")
        for i, (t, p) in enumerate(zip(fm.y, pred)):
            fh.write(f"{i},{int(t)},{int(p)}\n")
    print(json.dumps({"accuracy": accuracy(ConfusionMatrix.from_predictions(fm.y, pred))}))
    return 0


def cmd_synth(args):
    try:
        params = SynthParams(args.n_users, args.n_news, (args.min_spreaders, args.max_spreaders),
                             args.homophily, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ds = generate_synthetic(params)
    write_dataset(ds, args.outdir)
    print(json.dumps(ds.summary()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cospread", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"cospread {__version__} (feature schema v{FEATURE_SCHEMA_VERSION})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def dataset_args(sp, positional=True):
        if positional:
            sp.add_argument("dataset", help="dataset directory")
        sp.add_argument("--format", choices=FORMATS, default="canonical" if positional else None)

    s = sub.add_parser("stats", help="network statistics per construction rule")
    dataset_args(s)
    s.add_argument("--rule", choices=(*RULES, "all"), default="tree")
    s.add_argument("--edges-csv", help="also export the edge list (single rule only)")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("featurize", help="write the per-edge feature matrix as CSV")
    dataset_args(s)
    s.add_argument("out")
    s.add_argument("--rule", choices=RULES, default="tree")
    s.add_argument("--leakage", choices=LEAKAGE_MODES, default="paper")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=1000)
    s.set_defaults(func=cmd_featurize)

    s = sub.add_parser("analyze", help="correlation, scree and PCA projection CSVs")
    s.add_argument("features")
    s.add_argument("outdir", nargs="?")
    s.add_argument("--no-standardize", action="store_true")
    s.set_defaults(func=cmd_analyze)

    for name, func, helptext in (("train", cmd_train, "fit and serialize models"),
                                 ("report", cmd_report, "run the full accuracy experiment")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config")
        s.add_argument("--dataset")
        s.add_argument("--features")
        dataset_args(s, positional=False)
        s.add_argument("--rule", choices=RULES)
        s.add_argument("--leakage", choices=(*LEAKAGE_MODES, "both"))
        s.add_argument("--models", help=f"comma list from: {','.join(MODEL_ROWS)}")
        s.add_argument("--seeds", help="comma list of split seeds")
        s.add_argument("--svm-sample-cap", type=int)
        s.add_argument("--threads", type=int)
        s.add_argument("--out", help="output directory")
        s.add_argument("--dump-predictions", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("predict", help="apply a serialized model to a feature CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--features", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("synth", help="write a synthetic dataset in the canonical layout")
    s.add_argument("outdir")
    s.add_argument("--n-users", type=int, default=2000)
    s.add_argument("--n-news", type=int, default=400)
    s.add_argument("--min-spreaders", type=int, default=5)
    s.add_argument("--max-spreaders", type=int, default=30)
    s.add_argument("--homophily", type=float, default=0.9)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose or args.command == "featurize" else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    np.seterr(over="ignore", under="ignore")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"cospread: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"cospread: {args.command} failed: {exc}", file=sys.stderr)
        if args.verbose:
            raise
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
