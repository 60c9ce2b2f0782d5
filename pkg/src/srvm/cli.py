"""``srvm`` command-line interface.

Tabular results go to ``--out`` as CSV, with a JSON sidecar (same path,
``.json`` suffix) that repeats the summary scalars. Every CSV opens with
``#`` provenance lines. Data rows depend only on the configuration, so
re-runs are byte-identical; wall-clock columns are added only with
``--timing``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .consensus import agreement_accuracy_bins, agreements, overlap_pairwise, overlap_vote
from .data.archive import archive_meta, load_model, save_model
from .data.dataset import Dataset
from .data.registry import REGISTRY, fetch_dataset, load_dataset, load_file
from .errors import ConfigurationError, DataError, SRVMError
from .evaluation import confusion, cop, metrics_report, roc_auc, roc_sweep
from .kernels import FAMILIES, RADIAL_FAMILIES, KernelSpec
from .numeric import pca_project
from .pipeline.diagnostics import regression_diagnostics
from .pipeline.experiments import error_scaling_study, mse_ge_curve, scan_anchor_points, stability_study
from .pipeline.preprocess import SCALING_MODES
from .pipeline.tuning import METHODS, recursive_tune
from .pipeline.validation import ModelConfig, cross_validate, derive_seed, evaluate_split, fit_model
from .replica import VotingRule, layered_scores, threshold, validate_weights

log = logging.getLogger("srvm")

COMMANDS = (
    "cv", "scan", "stability", "tune", "error-scaling", "regress", "mse-ge",
    "metrics", "roc", "pca", "fetch", "train", "predict",
)


# --- argument parsing -----------------------------------------------------------


def _int_grid(text: str) -> list[int]:
    """``10,20,40`` or ``start:stop:step`` (stop inclusive)."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            return list(range(parts[0], parts[1] + 1, parts[2]))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer grid {text!r}") from None


def _model_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("model")
    g.add_argument("--kernel", default="gaussian", choices=FAMILIES)
    g.add_argument("--sigma", type=float, default=None,
                   help="kernel width (sigma, xi, gamma, a or q); gaussian defaults to sqrt(d)")
    g.add_argument("--degrees", default=None, help="multinomial orders, e.g. 11,11 (one value applies to every feature)")
    g.add_argument("--inner", default="gaussian", choices=RADIAL_FAMILIES, help="inner kernel of per_feature")
    g.add_argument("--anchors", "-v", type=int, default=50, dest="v")
    g.add_argument("--replicas", "-R", type=int, default=31, dest="R")
    g.add_argument("--voting", default="sign", help="sign, identity, logistic, tanh:K or gaussian_pair:S")
    g.add_argument("--layered", default=None, help="family[=width]:weight,... e.g. gaussian:0.5,erfc=2:0.5")
    g.add_argument("--task", default="binary", choices=("binary", "multiclass", "regression"))
    g.add_argument("--workers", type=int, default=1, help="threads used to fit replicas")


def _data_flags(p: argparse.ArgumentParser, required=True):
    g = p.add_argument_group("data")
    g.add_argument("--dataset", required=required, help="registry name or path to a LIBSVM/CSV file")
    g.add_argument("--format", choices=("libsvm", "csv"), default=None, help="format of a dataset path")
    g.add_argument("--label-column", type=int, default=-1)
    g.add_argument("--scale", default="sym11", choices=SCALING_MODES)
    g.add_argument("--scale-on-all", action="store_true", help="fit scaling on the whole dataset before splitting")
    g.add_argument("--folds", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--test-file", default=None, help="evaluate on this file (or registry name) instead of CV")
    g.add_argument("--cache-dir", default=None, help="dataset cache (default: $SRVM_CACHE or ~/.cache/srvm)")


def _out_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", default=None, help="CSV output path; a .json summary is written next to it")
    p.add_argument("--timing", action="store_true", help="add wall-clock runtime and COP to the outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srvm", description="Stochastic replica voting machines")
    parser.add_argument("--version", action="version", version=f"srvm {__version__}")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cv", help="k-fold cross-validation (or a fixed test file)")
    _data_flags(p); _model_flags(p); _out_flags(p)
    p.add_argument("--predictions", default=None, help="also write per-point predictions to this CSV")

    p = sub.add_parser("scan", help="accuracy and overlap versus the number of anchors")
    _data_flags(p); _model_flags(p); _out_flags(p)
    p.add_argument("--v-grid", type=_int_grid, required=True)
    p.add_argument("--runs", type=int, default=1, help="CV repetitions per grid point")

    p = sub.add_parser("stability", help="accuracy spread versus the number of replicas")
    _data_flags(p); _model_flags(p); _out_flags(p)
    p.add_argument("--R-grid", type=_int_grid, required=True)
    p.add_argument("--repeats", type=int, default=20)

    p = sub.add_parser("tune", help="suggest v from a scan by recursive regression")
    _data_flags(p, required=False); _model_flags(p); _out_flags(p)
    p.add_argument("--scan-file", default=None, help="CSV written by `srvm scan`")
    p.add_argument("--v-grid", type=_int_grid, default=None, help="run a scan first on this grid")
    p.add_argument("--signal", choices=("overlap", "accuracy"), default="overlap")
    p.add_argument("--method", choices=METHODS, default="spline")

    p = sub.add_parser("error-scaling", help="fit error^2 against 1/R")
    _data_flags(p); _model_flags(p); _out_flags(p)
    p.add_argument("--R-grid", type=_int_grid, default=[1, 3, 5, 9, 15, 31])
    p.add_argument("--runs", type=int, default=3)

    p = sub.add_parser("regress", help="replica-averaged regression with residual diagnostics")
    _data_flags(p); _model_flags(p); _out_flags(p)

    p = sub.add_parser("mse-ge", help="training MSE and held-out error versus v")
    _data_flags(p); _model_flags(p); _out_flags(p)
    p.add_argument("--v-grid", type=_int_grid, required=True)

    p = sub.add_parser("metrics", help="confusion table and metrics from prediction files")
    p.add_argument("--from", dest="from_file", default=None, help="CSV with target and prediction columns")
    p.add_argument("--labels", default=None, help="file of true +/-1 labels")
    p.add_argument("--predictions", default=None, help="file of predicted +/-1 labels")
    _out_flags(p)

    p = sub.add_parser("roc", help="ROC sweep over scores")
    p.add_argument("--from", dest="from_file", default=None, help="CSV with target and score columns")
    p.add_argument("--labels", default=None)
    p.add_argument("--scores", default=None)
    _out_flags(p)

    p = sub.add_parser("pca", help="two-component projection coloured by CV correctness")
    _data_flags(p); _model_flags(p); _out_flags(p)

    p = sub.add_parser("fetch", help="download (or import) a benchmark into the cache")
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--file", default=None, help="import a local copy instead of downloading")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--list", action="store_true", help="list registry entries")
    p.add_argument("--timeout", type=float, default=30.0)

    p = sub.add_parser("train", help="fit on a whole dataset and write a model archive")
    _data_flags(p); _model_flags(p)
    p.add_argument("--model", required=True, help="archive output path")

    p = sub.add_parser("predict", help="score a dataset with a saved model")
    _data_flags(p, required=True)
    p.add_argument("--model", required=True)
    _out_flags(p)
    return parser


# --- configuration -------------------------------------------------------------


def _kernel(args) -> KernelSpec:
    if args.kernel == "multinomial":
        if not args.degrees:
            raise ConfigurationError("--kernel multinomial needs --degrees")
        try:
            degrees = [int(d) for d in args.degrees.split(",")]
        except ValueError:
            raise ConfigurationError(f"bad --degrees {args.degrees!r}") from None
        return KernelSpec.multinomial(degrees)
    if args.kernel == "per_feature":
        return KernelSpec.per_feature(KernelSpec(args.inner, args.sigma if args.sigma is not None else None))
    if args.sigma is None:
        return KernelSpec(args.kernel, None)
    return KernelSpec(args.kernel, args.sigma)


def parse_layers(text: str):
    layers = []
    for item in text.split(","):
        head, sep, weight = item.strip().rpartition(":")
        if not sep:
            raise ConfigurationError(f"layer {item!r} lacks a weight (family:weight)")
        family, _, width = head.partition("=")
        try:
            spec = KernelSpec(family.strip(), float(width) if width else None)
            layers.append((spec, float(weight)))
        except ValueError as exc:
            raise ConfigurationError(f"bad layer {item!r}: {exc}") from None
    validate_weights([w for _, w in layers])
    return tuple(layers)


def model_config(args) -> ModelConfig:
    try:
        voting = VotingRule.parse(args.voting)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    layers = parse_layers(args.layered) if args.layered else None
    try:
        kernel = _kernel(args)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    task = "regression" if args.command in ("regress", "mse-ge") else args.task
    if args.folds < 2:
        raise ConfigurationError("--folds must be at least 2")
    return ModelConfig(kernel, args.v, args.R, voting, args.scale, args.scale_on_all, layers, task, args.workers)


_NOT_CONFIG = {"out", "timing", "workers", "verbose", "predictions", "cache_dir", "model"}


def run_config(args) -> dict:
    """Everything that determines the data rows, in a JSON-stable form."""
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}
    cfg["version"] = __version__
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()[:16]


# --- output --------------------------------------------------------------------


def _fmt(x):
    if x is None:
        return "NA"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


class Output:
    def __init__(self, args, command: str):
        self.args = args
        self.cfg = run_config(args)
        self.hash = config_hash(self.cfg)
        self.command = command

    def header(self) -> str:
        lines = [
            f"# srvm {__version__} command={self.command} seed={self.cfg.get('seed', 'NA')} config_sha256={self.hash}",
            "# config=" + json.dumps(self.cfg, sort_keys=True, default=str),
        ]
        return "\n".join(lines) + "\n"

    def write_csv(self, path, columns, rows):
        buf = io.StringIO()
        buf.write(self.header())
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(buf.getvalue())

    def finish(self, columns, rows, summary: dict):
        out = self.args.out if hasattr(self.args, "out") else None
        doc = {
            "provenance": {"version": __version__, "command": self.command, "config_sha256": self.hash, "config": self.cfg},
            "summary": summary,
        }
        text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default)
        if out:
            self.write_csv(out, columns, rows)
            Path(out).with_suffix(".json").write_text(text + "\n")
        print(json.dumps(summary, indent=2, sort_keys=True, default=_json_default))


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialize {type(x).__name__}")


# --- data resolution ------------------------------------------------------------


def resolve_dataset(ref: str, args) -> Dataset:
    if ref in REGISTRY:
        return load_dataset(ref, args.cache_dir)
    path = Path(ref)
    if not path.exists():
        raise DataError(f"{ref!r} is neither a registry name nor an existing file")
    return load_file(path, args.format, args.label_column)


def _read_numbers(path) -> np.ndarray:
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0]
        for tok in line.replace(",", " ").split():
            try:
                vals.append(float(tok))
            except ValueError:
                raise DataError(f"{path}: non-numeric value {tok!r}") from None
    return np.array(vals)


def _read_columns(path, names) -> list[np.ndarray]:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise DataError(f"{path} has no data")
    rows = list(csv.reader(lines))
    header = rows[0]
    out = []
    for name in names:
        if name not in header:
            raise DataError(f"{path} has no {name!r} column")
        j = header.index(name)
        try:
            out.append(np.array([float(r[j]) for r in rows[1:]]))
        except (ValueError, IndexError):
            raise DataError(f"{path}: bad value in column {name!r}") from None
    return out


# --- commands -------------------------------------------------------------------


def _timing(summary, args, accuracy, runtime):
    if args.timing:
        summary["runtime_seconds"] = runtime
        if accuracy is not None and runtime > 0:
            summary["cop"] = cop(accuracy, runtime)


def cmd_cv(args):
    cfg = model_config(args)
    ds = resolve_dataset(args.dataset, args)
    if args.test_file:
        rep = evaluate_split(ds, resolve_dataset(args.test_file, args), cfg, args.seed)
    else:
        rep = cross_validate(ds, cfg, args.folds, args.seed)
    columns = ["fold", "n_test", "accuracy"]
    rows = []
    binary = cfg.task == "binary"
    if binary:
        columns += ["tp", "fp", "fn", "tn", "sensitivity", "specificity", "precision", "kappa", "f1", "matthews"]
    columns += ["train_energy", "test_mse"]
    for f in rep.folds:
        row = [f.index, len(f.test_index), f.accuracy]
        if binary:
            c, m = f.confusion, f.metrics
            row += [c.tp, c.fp, c.fn, c.tn, m.sensitivity, m.specificity, m.precision, m.kappa, m.f1, m.matthews]
        row += [f.train_energy, f.test_mse]
        rows.append(row)
    summary = {"mean_accuracy": rep.mean_accuracy, "folds": len(rep.folds), "n": int(sum(len(f.test_index) for f in rep.folds))}
    if binary:
        table = rep.table
        summary["pooled_metrics"] = metrics_report(rep.pooled_confusion()).as_dict()
        summary["normalized_overlap_vote"] = overlap_vote(table)[1]
        if table.R > 1:
            summary["normalized_overlap_pairwise"] = overlap_pairwise(table)[1]
        summary["mean_agreement"] = float(agreements(table).mean())
        summary["agreement_bins"] = [
            {"lower": b.lower, "upper": b.upper, "count": b.count, "accuracy": None if b.count == 0 else b.accuracy}
            for b in agreement_accuracy_bins(table, np.concatenate([f.targets for f in rep.folds]))
        ]
    _timing(summary, args, rep.mean_accuracy, rep.runtime_seconds)
    if args.predictions:
        prow = []
        for f in rep.folds:
            agree = agreements(f.table) if f.table is not None else [None] * len(f.test_index)
            for i, t, s, p, a in zip(f.test_index, f.targets, f.scores, f.predictions, agree):
                prow.append([int(i), f.index, t, s, p, a])
        prow.sort(key=lambda r: r[0])
        Output(args, "cv").write_csv(args.predictions, ["index", "fold", "target", "score", "prediction", "agreement"], prow)
    Output(args, "cv").finish(columns, rows, summary)


def cmd_scan(args):
    cfg = model_config(args)
    ds = resolve_dataset(args.dataset, args)
    seeds = [args.seed] if args.runs == 1 else [derive_seed(args.seed, 3, r) for r in range(args.runs)]
    recs = scan_anchor_points(ds, args.v_grid, cfg, seeds, args.folds)
    columns = ["v", "R", "mean_accuracy", "normalized_overlap", "mean_energy", "mean_agreement"]
    rows = [[r.v, r.R, r.mean_accuracy, r.normalized_overlap, r.mean_energy, r.mean_agreement] for r in recs]
    if args.timing:
        columns.append("runtime_seconds")
        for row, r in zip(rows, recs):
            row.append(r.runtime_seconds)
    best = max(recs, key=lambda r: r.mean_accuracy)
    best_o = max(recs, key=lambda r: r.normalized_overlap)
    summary = {"points": len(recs), "best_accuracy_v": best.v, "best_accuracy": best.mean_accuracy, "best_overlap_v": best_o.v}
    Output(args, "scan").finish(columns, rows, summary)


def cmd_stability(args):
    cfg = model_config(args)
    if cfg.voting.transform == "sign" and any(R % 2 == 0 for R in args.R_grid):
        raise ConfigurationError("sign voting needs odd replica counts in --R-grid")
    ds = resolve_dataset(args.dataset, args)
    recs = stability_study(ds, cfg, args.R_grid, args.repeats, args.folds, args.seed)
    rows = [[r.R, r.mean_accuracy, r.std_accuracy] for r in recs]
    summary = {"R": [r.R for r in recs], "std_accuracy": [r.std_accuracy for r in recs]}
    Output(args, "stability").finish(["R", "mean_accuracy", "std_accuracy"], rows, summary)


def cmd_tune(args):
    cfg = model_config(args)
    column = "normalized_overlap" if args.signal == "overlap" else "mean_accuracy"
    if args.scan_file:
        v, s = _read_columns(args.scan_file, ["v", column])
        scan = list(zip(v, s))
    elif args.v_grid and args.dataset:
        ds = resolve_dataset(args.dataset, args)
        recs = scan_anchor_points(ds, args.v_grid, cfg, [args.seed], args.folds)
        scan = [(r.v, getattr(r, column)) for r in recs]
    else:
        raise ConfigurationError("tune needs --scan-file, or --dataset with --v-grid")
    res = recursive_tune(scan, args.method, seed=args.seed)
    rows = [[int(g), c] for g, c in zip(res.grid, res.curve)]
    summary = {"suggested_v": res.v, "method": res.method, "signal": args.signal}
    Output(args, "tune").finish(["v", "fitted_signal"], rows, summary)


def cmd_error_scaling(args):
    cfg = model_config(args)
    if cfg.voting.transform == "sign" and not cfg.layers and any(R % 2 == 0 for R in args.R_grid):
        raise ConfigurationError("sign voting needs odd replica counts in --R-grid")
    ds = resolve_dataset(args.dataset, args)
    seeds = [derive_seed(args.seed, 5, r) for r in range(args.runs)]
    points, fit = error_scaling_study(ds, cfg, args.R_grid, seeds, args.folds)
    summary = {"intercept": fit.intercept, "slope": fit.slope, "negative_intercept": fit.negative_intercept}
    Output(args, "error-scaling").finish(["R", "error_rate"], [list(p) for p in points], summary)


def cmd_regress(args):
    cfg = model_config(args)
    ds = resolve_dataset(args.dataset, args)
    rep = cross_validate(ds, cfg, args.folds, args.seed)
    idx = np.concatenate([f.test_index for f in rep.folds])
    target = np.concatenate([f.targets for f in rep.folds])
    pred = np.concatenate([f.scores for f in rep.folds])
    order = np.argsort(idx)
    idx, target, pred = idx[order], target[order], pred[order]
    resid = target - pred
    diag = regression_diagnostics(resid)
    rows = [[int(i), t, p, r] for i, t, p, r in zip(idx, target, pred, resid)]
    summary = diag.summary()
    summary["mse"] = float(np.mean(resid ** 2))
    summary["normal_quantile_pairs"] = [[float(a), float(b)] for a, b in zip(diag.normal_quantiles, diag.sorted_residuals)]
    Output(args, "regress").finish(["index", "target", "prediction", "residual"], rows, summary)


def cmd_mse_ge(args):
    cfg = model_config(args)
    ds = resolve_dataset(args.dataset, args)
    recs = mse_ge_curve(ds, args.v_grid, cfg, args.folds, args.seed)
    rows = [[r.v, r.training_mse, r.generalization_error] for r in recs]
    best = min(recs, key=lambda r: r.generalization_error)
    Output(args, "mse-ge").finish(["v", "training_mse", "generalization_error"], rows, {"best_ge_v": best.v})


def cmd_metrics(args):
    if args.from_file:
        t, p = _read_columns(args.from_file, ["target", "prediction"])
    elif args.labels and args.predictions:
        t, p = _read_numbers(args.labels), _read_numbers(args.predictions)
    else:
        raise ConfigurationError("metrics needs --from, or both --labels and --predictions")
    c = confusion(t, p)
    report = metrics_report(c)
    summary = {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn, **report.as_dict()}
    Output(args, "metrics").finish(list(summary), [list(summary.values())], summary)


def cmd_roc(args):
    if args.from_file:
        t, s = _read_columns(args.from_file, ["target", "score"])
    elif args.labels and args.scores:
        t, s = _read_numbers(args.labels), _read_numbers(args.scores)
    else:
        raise ConfigurationError("roc needs --from, or both --labels and --scores")
    pts = roc_sweep(s, t)
    summary = {"auc": roc_auc(pts), "points": len(pts)}
    Output(args, "roc").finish(["threshold", "fpr", "tpr"], [list(p) for p in pts], summary)


def cmd_pca(args):
    cfg = model_config(args)
    ds = resolve_dataset(args.dataset, args)
    rep = cross_validate(ds, cfg, args.folds, args.seed)
    n = ds.n
    pred = np.zeros(n)
    target = np.zeros(n)
    for f in rep.folds:
        pred[f.test_index] = f.predictions
        target[f.test_index] = f.targets
    from .pipeline.preprocess import fit_scaling

    Z = fit_scaling(ds.X, cfg.scale).apply(ds.X)
    scores, var, _ = pca_project(Z, 2)
    rows = [[i, scores[i, 0], scores[i, 1], target[i], pred[i], int(pred[i] == target[i])] for i in range(n)]
    summary = {"explained_variance": var.tolist(), "accuracy": rep.mean_accuracy}
    Output(args, "pca").finish(["index", "pc1", "pc2", "target", "prediction", "correct"], rows, summary)


def cmd_fetch(args):
    if args.list:
        for name, info in sorted(REGISTRY.items()):
            print(f"{name}\t{info.instances}x{info.features}\t{info.url}")
        return
    if not args.name:
        raise ConfigurationError("fetch needs a dataset name or URL")
    path = fetch_dataset(args.name, args.cache_dir, args.timeout, args.file)
    print(path)


def cmd_train(args):
    cfg = model_config(args)
    ds = resolve_dataset(args.dataset, args)
    model, scaling = fit_model(ds, cfg, args.seed)
    meta = {"config": run_config(args), "classes": ds.class_values.tolist(), "task": cfg.task}
    Path(args.model).write_bytes(save_model(model, scaling, meta))
    print(args.model)


def cmd_predict(args):
    data = Path(args.model).read_bytes()
    ens, scaling = load_model(data)
    regression = archive_meta(data).get("task") == "regression"
    ds = resolve_dataset(args.dataset, args)
    X = scaling.apply(ds.X) if scaling is not None else ds.X
    if ens.groups:
        scores = layered_scores(ens, X)
    elif regression:
        scores = ens.raw_outputs(X).mean(axis=0)
    else:
        scores = ens.vote_scores(X)
    pred = scores if regression else np.asarray(threshold(scores))
    rows = [[i, s, p] for i, (s, p) in enumerate(zip(scores, pred))]
    summary = {"n": ds.n}
    if not regression:
        try:
            summary["accuracy"] = float(np.mean(pred == ds.binary_targets()))
        except SRVMError:
            pass
    Output(args, "predict").finish(["index", "score", "prediction"], rows, summary)


HANDLERS = {
    "cv": cmd_cv, "scan": cmd_scan, "stability": cmd_stability, "tune": cmd_tune,
    "error-scaling": cmd_error_scaling, "regress": cmd_regress, "mse-ge": cmd_mse_ge,
    "metrics": cmd_metrics, "roc": cmd_roc, "pca": cmd_pca, "fetch": cmd_fetch,
    "train": cmd_train, "predict": cmd_predict,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        HANDLERS[args.command](args)
    except SRVMError as exc:
        print(f"srvm: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"srvm: error: {exc}", file=sys.stderr)
        return DataError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
