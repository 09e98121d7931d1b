"""Command-line entry point wiring all modules.

Subcommands: filterbank check, synth gen, features extract, gp fit|eval,
svgp fit|eval, metrics report, bo run, pipeline run.  Every subcommand
exits 0 on success, 1 on usage/input errors and 2 on numerical failures;
errors print structured context to stderr.  All randomness derives from
the single --seed through named substreams, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
import zlib
from pathlib import Path

import numpy as np

from . import bayesopt, datasets, gp, metrics
from .errors import FrameBoundError, InvalidConfigError, ScatGPError
from .features import fit_standardizer, pca_fit
from .filterbank import FilterBankConfig, build_filterbank, littlewood_paley_report
from .kernels import make_spec
from .modelio import (load_model, predictions_from_json, predictions_to_json,
                      save_model)
from .scattering import (VARIANT_GLOBAL, VARIANT_ROTINV, VARIANT_WINDOWED,
                         ScatteringConfig, scatter_batch, stack_features)

VARIANT_FLAGS = {"windowed": VARIANT_WINDOWED, "global": VARIANT_GLOBAL,
                 "rotinv": VARIANT_ROTINV}


def derive_rng(seed, *tokens):
    """Named substream of the experiment seed (crc32-hashed tokens)."""
    words = [int(seed)]
    for tok in tokens:
        words.append(tok if isinstance(tok, int) else zlib.crc32(str(tok).encode()))
    return np.random.default_rng(np.random.SeedSequence(words))


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _parse_kernel(text, dim):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise InvalidConfigError("empty kernel specification")
    family, flags = parts[0], parts[1:]
    ard = "ard" in flags
    unknown = [f for f in flags if f != "ard"]
    if unknown:
        raise InvalidConfigError(f"unknown kernel flags: {unknown}")
    return make_spec(family, dim=dim, ard=ard)


def _load_features_targets(cache_path, manifest_path, split=None):
    features, _ = datasets.read_cache(cache_path)
    records = datasets.read_manifest(manifest_path)
    if features.shape[0] != len(records):
        raise InvalidConfigError(
            f"cache has {features.shape[0]} rows but manifest has {len(records)}")
    if split is None:
        rows = np.arange(len(records))
    else:
        rows = np.array([i for i, r in enumerate(records) if r.split == split],
                        dtype=int)
        if rows.size == 0:
            raise InvalidConfigError(f"manifest has no rows with split={split!r}")
    targets = np.array([records[i].target for i in rows])
    return features[rows], targets


# ---------------------------------------------------------------------------
# subcommands


def cmd_filterbank_check(args):
    bank = build_filterbank(FilterBankConfig(args.n, args.j, args.l))
    report = littlewood_paley_report(bank)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(f"grid points : {report.n_grid_points}")
        print(f"lp_min      : {report.lp_min:.6f} (corner Nyquist bin excluded)")
        print(f"lp_max      : {report.lp_max:.6f}")
        print(f"lp_mean     : {report.lp_mean:.6f}")
        print(f"argmin      : index {report.argmin}, "
              f"frequency {tuple(round(v, 4) for v in report.argmin_frequency)}")
        print(f"frame_ok    : {report.frame_ok}")
    if not report.frame_ok:
        raise FrameBoundError(
            f"frame bounds violated: lp in [{report.lp_min:.4f}, {report.lp_max:.6f}]")
    return 0


def cmd_synth_gen(args):
    spec = datasets.from_preset(args.task, args.shift, image_size=args.image_size,
                                seed=args.seed)
    manifest = datasets.write_dataset(args.out, spec, args.n_train, args.n_test)
    print(f"wrote {args.n_train}+{args.n_test} samples; manifest: {manifest}")
    return 0


def _scattering_setup(args, image_size):
    bank_cfg = FilterBankConfig(image_size, args.j, args.l)
    cfg = ScatteringConfig(bank=bank_cfg, max_order=args.order,
                           variant=VARIANT_FLAGS[args.variant])
    cfg.validate()
    return cfg


def cmd_features_extract(args):
    manifest_path = Path(args.manifest)
    records = datasets.read_manifest(manifest_path)
    if not records:
        raise InvalidConfigError(f"{manifest_path}: manifest has no data rows")
    root = manifest_path.parent
    images = [datasets.load_image(root / rec.path) for rec in records]
    shape = images[0].shape
    image_size = shape[-1]
    channels = shape[0] if len(shape) == 3 else 1

    cfg = _scattering_setup(args, image_size)
    bank = build_filterbank(cfg.bank)
    fvs = scatter_batch(images, bank, cfg, n_jobs=args.threads)
    matrix = stack_features(fvs)
    digest = datasets.config_digest(cfg, channels)
    datasets.write_cache(args.out, matrix, digest)
    print(f"extracted {matrix.shape[0]} x {matrix.shape[1]} features -> {args.out}")
    return 0


def _fit_transforms(x_train, standardize, pca_retain):
    standardizer = fit_standardizer(x_train) if standardize else None
    if standardizer is not None:
        x_train = standardizer.transform(x_train)
    pca = None
    if pca_retain is not None:
        pca = pca_fit(x_train, retain=pca_retain)
        x_train = pca.project(x_train)
    return x_train, standardizer, pca


def _apply_transforms(x, standardizer, pca):
    if standardizer is not None:
        x = standardizer.transform(x)
    if pca is not None:
        x = pca.project(x)
    return x


def cmd_gp_fit(args):
    x, y = _load_features_targets(args.features, args.targets, args.split)
    x, standardizer, pca = _fit_transforms(x, args.standardize == "on", args.pca)
    spec = _parse_kernel(args.kernel, x.shape[1])
    opt = gp.OptimizerConfig(learning_rate=args.lr, iterations=args.iters)
    state = gp.fit(x, y, spec, opt)
    save_model(args.out, state, standardizer, pca)
    print(f"fitted exact GP on {x.shape[0]} x {x.shape[1]}; "
          f"LML={state.log_marginal_likelihood:.4f} -> {args.out}")
    return 0


def _eval_common(args, predict_fn):
    state, standardizer, pca = load_model(args.model)
    x, y = _load_features_targets(args.features, args.targets, args.split)
    x = _apply_transforms(x, standardizer, pca)
    pred = predict_fn(state, x)
    report = metrics.compute_metrics(pred, y)
    Path(args.metrics_out).write_text(report.to_json() + "\n")
    if args.pred_out:
        Path(args.pred_out).write_text(predictions_to_json(pred) + "\n")
    print(report.to_json())
    return 0


def cmd_gp_eval(args):
    return _eval_common(args, gp.predict)


def cmd_svgp_fit(args):
    from . import svgp

    x, y = _load_features_targets(args.features, args.targets, args.split)
    x, standardizer, pca = _fit_transforms(x, args.standardize == "on", args.pca)
    spec = _parse_kernel(args.kernel, x.shape[1])
    state = svgp.svgp_fit(x, y, spec, num_inducing=min(args.inducing, x.shape[0]),
                          batch_size=args.batch, steps=args.steps, lr=args.lr,
                          seed=args.seed)
    save_model(args.out, state, standardizer, pca)
    print(f"fitted SVGP ({state.num_inducing} inducing) on {x.shape[0]} rows "
          f"-> {args.out}")
    return 0


def cmd_svgp_eval(args):
    from . import svgp

    return _eval_common(args, svgp.svgp_predict)


def cmd_metrics_report(args):
    pred = predictions_from_json(Path(args.pred).read_text())
    records = datasets.read_manifest(args.truth)
    rows = [r for r in records if args.split is None or r.split == args.split]
    y = np.array([r.target for r in rows])
    report = metrics.compute_metrics(pred, y)
    order = ["rmse_raw", "rmse_standardized", "nll", "qce", "pi_mu", "pi_sigma",
             "n_test"]
    data = report.to_dict()
    width = max(len(k) for k in order)
    for key in order:
        value = data[key]
        text = f"{value:.6f}" if isinstance(value, float) else str(value)
        print(f"{key.ljust(width)} : {text}")
    return 0


def cmd_bo_run(args):
    features, _ = datasets.read_cache(args.pool_features)
    records = datasets.read_manifest(args.pool_targets)
    if features.shape[0] != len(records):
        raise InvalidConfigError("pool cache and manifest row counts differ")
    targets = np.array([r.target for r in records])
    if args.standardize == "on":
        features = fit_standardizer(features).transform(features)
    spec = _parse_kernel(args.kernel, features.shape[1])
    cfg = bayesopt.BOConfig(n_init=args.init, n_iters=args.iters,
                            pool_size=args.pool, direction=args.direction,
                            kernel=spec, seed=args.seed,
                            gp_opt=gp.OptimizerConfig(iterations=args.gp_iters))
    runner = bayesopt.random_search if args.random_search else bayesopt.run_bo
    trace = runner(features, lambda i: targets[i], cfg)
    Path(args.trace_out).write_text(trace.to_csv())
    print(f"final best={trace.records[-1].best!r} "
          f"regret={trace.final_regret!r} -> {args.trace_out}")
    return 0


# ---------------------------------------------------------------------------
# pipeline


PIPELINE_DEFAULTS = {
    "task": "blob_count", "shift": "mild", "image_size": 32,
    "n_train": 500, "n_test": 250, "master_factor": 2, "splits": 5,
    "j": 0, "l": 8, "order": 2, "variant": "global", "kernel": "rbf",
    "iters": 500, "lr": 0.05, "standardize": "on", "pca": "",
    "threads": 1, "seed": 0, "with_trivial": "true", "with_bo": "false",
    "bo_task": "charge_energy", "bo_shift": "none", "bo_pool": 1000,
    "bo_init": 50, "bo_iters": 50, "bo_seeds": 5, "bo_kernel": "matern52",
    "bo_gp_iters": 150, "out": "scatgp-run", "verbose": "false",
}


def read_config(path):
    """Flat `key = value` config file; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise InvalidConfigError(f"{path}: line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def _pipeline_settings(args):
    settings = dict(PIPELINE_DEFAULTS)
    if args.config:
        file_values = read_config(args.config)
        unknown = set(file_values) - set(settings)
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {sorted(unknown)}")
        settings.update(file_values)
    for item in args.set or []:
        if "=" not in item:
            raise InvalidConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        if key not in settings:
            raise InvalidConfigError(f"unknown config key {key!r}")
        settings[key] = value
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.out is not None:
        settings["out"] = args.out
    for key in ("image_size", "n_train", "n_test", "master_factor", "splits",
                "j", "l", "order", "iters", "threads", "seed", "bo_pool",
                "bo_init", "bo_iters", "bo_seeds", "bo_gp_iters"):
        settings[key] = int(settings[key])
    settings["lr"] = float(settings["lr"])
    if settings["j"] <= 0:
        settings["j"] = max(1, int(np.log2(settings["image_size"])) - 1)
    return settings


def _aggregate(per_split):
    """Mean and std per metric over split reports."""
    keys = sorted(per_split[0])
    return {key: {"mean": float(np.mean([r[key] for r in per_split])),
                  "std": float(np.std([r[key] for r in per_split]))}
            for key in keys}


def _aligned_table(aggregates):
    methods = sorted(aggregates)
    keys = [k for k in ("rmse_raw", "rmse_standardized", "nll", "qce", "pi_mu",
                        "pi_sigma") if k in aggregates[methods[0]]]
    name_w = max(len(m) for m in methods)
    cells = {m: {k: f"{aggregates[m][k]['mean']:.4f} +- "
                    f"{aggregates[m][k]['std']:.4f}" for k in keys}
             for m in methods}
    col_w = {k: max(len(k), *(len(cells[m][k]) for m in methods)) for k in keys}
    lines = [" ".join(["method".ljust(name_w)] + [k.rjust(col_w[k]) for k in keys])]
    for m in methods:
        lines.append(" ".join([m.ljust(name_w)]
                              + [cells[m][k].rjust(col_w[k]) for k in keys]))
    return "\n".join(lines)


def cmd_pipeline_run(args):
    s = _pipeline_settings(args)
    out = Path(s["out"])
    out.mkdir(parents=True, exist_ok=True)
    seed = s["seed"]

    # master synthetic dataset
    master_train = s["n_train"] * s["master_factor"]
    master_test = s["n_test"] * s["master_factor"]
    spec = datasets.from_preset(s["task"], s["shift"], image_size=s["image_size"],
                                seed=seed)
    data_dir = out / "data"
    manifest = datasets.write_dataset(data_dir, spec, master_train, master_test)
    records = datasets.read_manifest(manifest)

    # features
    cfg = ScatteringConfig(
        bank=FilterBankConfig(s["image_size"], s["j"], s["l"]),
        max_order=s["order"], variant=VARIANT_FLAGS[s["variant"]])
    bank = build_filterbank(cfg.bank)
    images = [datasets.load_image(data_dir / r.path) for r in records]
    features = stack_features(scatter_batch(images, bank, cfg, n_jobs=s["threads"]))
    cache_path = out / "features.bscf"
    datasets.write_cache(cache_path, features,
                         datasets.config_digest(cfg, spec.channels))

    train_rows = np.array([i for i, r in enumerate(records) if r.split == "train"])
    test_rows = np.array([i for i, r in enumerate(records) if r.split == "test"])
    targets = np.array([r.target for r in records])

    per_split_reports = {}
    for split_idx in range(s["splits"]):
        rng = derive_rng(seed, "split", split_idx)
        tr = train_rows[rng.choice(train_rows.size, s["n_train"], replace=False)]
        te = test_rows[rng.choice(test_rows.size, s["n_test"], replace=False)]
        x_tr_raw, y_tr = features[tr], targets[tr]
        x_te_raw, y_te = features[te], targets[te]

        split_methods = {}
        if s["with_trivial"].lower() in ("true", "1", "yes", "on"):
            split_methods["trivial"] = metrics.trivial_baseline(y_tr, y_te)

        pca_retain = float(s["pca"]) if s["pca"] else None
        x_tr, standardizer, pca = _fit_transforms(
            x_tr_raw, s["standardize"] == "on", pca_retain)
        x_te = _apply_transforms(x_te_raw, standardizer, pca)
        spec_k = _parse_kernel(s["kernel"], x_tr.shape[1])
        state = gp.fit(x_tr, y_tr, spec_k,
                       gp.OptimizerConfig(learning_rate=s["lr"],
                                          iterations=s["iters"]))
        split_methods[f"gp-{s['kernel']}"] = metrics.compute_metrics(
            gp.predict(state, x_te), y_te)

        for method, report in split_methods.items():
            path = out / f"metrics_{method}_split{split_idx}.json"
            path.write_text(report.to_json() + "\n")
            per_split_reports.setdefault(method, []).append(report.to_dict())
            if s["verbose"].lower() in ("true", "1", "yes", "on"):
                print(f"split {split_idx} {method}: nll={report.nll:.4f} "
                      f"rmse={report.rmse_standardized:.4f} qce={report.qce:.4f}")

    aggregates = {m: _aggregate(rs) for m, rs in per_split_reports.items()}
    (out / "aggregate.json").write_text(
        json.dumps(aggregates, indent=2, sort_keys=True) + "\n")
    table = _aligned_table(aggregates)
    (out / "aggregate.txt").write_text(table + "\n")
    print(table)

    if s["with_bo"].lower() in ("true", "1", "yes", "on"):
        _pipeline_bo(s, out, seed)
    print(f"pipeline outputs in {out}")
    return 0


def _pipeline_bo(s, out, seed):
    spec = datasets.from_preset(s["bo_task"], s["bo_shift"],
                                image_size=s["image_size"], seed=seed + 1)
    samples = datasets.synth_generate(spec, s["bo_pool"], "train")
    cfg = ScatteringConfig(
        bank=FilterBankConfig(s["image_size"], s["j"], s["l"]),
        max_order=s["order"], variant=VARIANT_FLAGS[s["variant"]])
    bank = build_filterbank(cfg.bank)
    features = stack_features(scatter_batch([im for im, _ in samples], bank, cfg,
                                            n_jobs=s["threads"]))
    features = fit_standardizer(features).transform(features)
    values = np.array([t for _, t in samples])

    curves = {}
    for label, runner in (("bo", bayesopt.run_bo),
                          ("rs", bayesopt.random_search)):
        curves[label] = []
        for run in range(s["bo_seeds"]):
            cfg_bo = bayesopt.BOConfig(
                n_init=s["bo_init"], n_iters=s["bo_iters"],
                pool_size=s["bo_pool"],
                kernel=_parse_kernel(s["bo_kernel"], features.shape[1]),
                seed=int(derive_rng(seed, "bo", label, run).integers(2 ** 31)),
                gp_opt=gp.OptimizerConfig(iterations=s["bo_gp_iters"]))
            trace = runner(features, lambda i: values[i], cfg_bo)
            (out / f"trace_{label}_seed{run}.csv").write_text(trace.to_csv())
            curves[label].append([r.regret for r in trace.records])

    for label, runs in curves.items():
        arr = np.array(runs)
        mean = arr.mean(axis=0)
        sem = arr.std(axis=0) / np.sqrt(arr.shape[0])
        lines = ["iteration,mean,ci_lo,ci_hi"]
        for i in range(arr.shape[1]):
            lo, hi = mean[i] - 1.96 * sem[i], mean[i] + 1.96 * sem[i]
            lines.append(f"{i + 1},{mean[i]!r},{lo!r},{hi!r}")
        (out / f"regret_{label}.csv").write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = _Parser(prog="scatgp",
                     description="Scattering features with GP heads: "
                                 "uncertainty-aware image regression and BO.")
    sub = parser.add_subparsers(dest="command", required=True)

    fb = sub.add_parser("filterbank", parents=[], help="filter-bank tools")
    fb_sub = fb.add_subparsers(dest="subcommand", required=True)
    chk = fb_sub.add_parser("check", help="Littlewood-Paley frame report")
    chk.add_argument("--n", type=int, required=True, help="image size (power of 2)")
    chk.add_argument("--j", type=int, required=True, help="number of scales")
    chk.add_argument("--l", type=int, required=True, help="number of angles")
    chk.add_argument("--json", action="store_true", help="print JSON")
    chk.set_defaults(func=cmd_filterbank_check)

    sg = sub.add_parser("synth", help="synthetic datasets")
    sg_sub = sg.add_subparsers(dest="subcommand", required=True)
    gen = sg_sub.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--task", choices=datasets.TASKS, required=True)
    gen.add_argument("--n-train", type=int, default=500)
    gen.add_argument("--n-test", type=int, default=250)
    gen.add_argument("--image-size", type=int, default=32)
    gen.add_argument("--shift", default="none", help="shift preset name")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output dataset directory")
    gen.set_defaults(func=cmd_synth_gen)

    fe = sub.add_parser("features", help="feature extraction")
    fe_sub = fe.add_subparsers(dest="subcommand", required=True)
    ext = fe_sub.add_parser("extract", help="scatter a manifest into a cache")
    ext.add_argument("--manifest", required=True)
    ext.add_argument("--out", required=True, help="output cache path")
    ext.add_argument("--j", type=int, required=True)
    ext.add_argument("--l", type=int, default=8)
    ext.add_argument("--order", type=int, default=2)
    ext.add_argument("--variant", choices=sorted(VARIANT_FLAGS), default="global")
    ext.add_argument("--threads", type=int, default=1)
    ext.add_argument("--seed", type=int, default=0,
                     help="unused; extraction is deterministic")
    ext.set_defaults(func=cmd_features_extract)

    def add_fit_eval(name, fit_func, eval_func, fit_extra):
        grp = sub.add_parser(name, help=f"{name} regression head")
        grp_sub = grp.add_subparsers(dest="subcommand", required=True)
        fit_p = grp_sub.add_parser("fit")
        fit_p.add_argument("--features", required=True)
        fit_p.add_argument("--targets", required=True, help="manifest path")
        fit_p.add_argument("--split", default="train")
        fit_p.add_argument("--kernel", default="rbf",
                           help="family[,ard]: rbf, matern52, linear")
        fit_p.add_argument("--standardize", choices=("on", "off"), default="on")
        fit_p.add_argument("--pca", type=float, default=None,
                           help="retained variance fraction (enables PCA)")
        fit_p.add_argument("--seed", type=int, default=0)
        fit_p.add_argument("--out", required=True, help="model output path (.npz)")
        fit_extra(fit_p)
        fit_p.set_defaults(func=fit_func)
        ev = grp_sub.add_parser("eval")
        ev.add_argument("--model", required=True)
        ev.add_argument("--features", required=True)
        ev.add_argument("--targets", required=True)
        ev.add_argument("--split", default="test")
        ev.add_argument("--metrics-out", required=True)
        ev.add_argument("--pred-out", default=None,
                        help="also write predictions JSON")
        ev.set_defaults(func=eval_func)

    def gp_extra(p):
        p.add_argument("--iters", type=int, default=500)
        p.add_argument("--lr", type=float, default=0.05)

    def svgp_extra(p):
        p.add_argument("--inducing", type=int, default=1024)
        p.add_argument("--batch", type=int, default=256)
        p.add_argument("--steps", type=int, default=5000)
        p.add_argument("--lr", type=float, default=0.01)

    add_fit_eval("gp", cmd_gp_fit, cmd_gp_eval, gp_extra)
    add_fit_eval("svgp", cmd_svgp_fit, cmd_svgp_eval, svgp_extra)

    mr = sub.add_parser("metrics", help="metric reports")
    mr_sub = mr.add_subparsers(dest="subcommand", required=True)
    rep = mr_sub.add_parser("report", help="score predictions against truths")
    rep.add_argument("--pred", required=True, help="predictions JSON")
    rep.add_argument("--truth", required=True, help="manifest path")
    rep.add_argument("--split", default="test")
    rep.set_defaults(func=cmd_metrics_report)

    bo = sub.add_parser("bo", help="Bayesian optimization")
    bo_sub = bo.add_subparsers(dest="subcommand", required=True)
    run = bo_sub.add_parser("run", help="pool-based BO with EI")
    run.add_argument("--pool-features", required=True)
    run.add_argument("--pool-targets", required=True)
    run.add_argument("--init", type=int, default=50)
    run.add_argument("--iters", type=int, default=50)
    run.add_argument("--pool", type=int, default=1000)
    run.add_argument("--kernel", default="matern52")
    run.add_argument("--direction", choices=bayesopt.DIRECTIONS,
                     default="minimize")
    run.add_argument("--standardize", choices=("on", "off"), default="on")
    run.add_argument("--gp-iters", type=int, default=500,
                     help="Adam iterations per refit")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--random-search", action="store_true",
                     help="random-search baseline instead of EI")
    run.add_argument("--trace-out", required=True, help="trace CSV path")
    run.set_defaults(func=cmd_bo_run)

    pl = sub.add_parser("pipeline", help="end-to-end experiment")
    pl_sub = pl.add_subparsers(dest="subcommand", required=True)
    prun = pl_sub.add_parser("run", help="synth -> features -> fit/eval -> tables")
    prun.add_argument("--config", default=None, help="flat key=value file")
    prun.add_argument("--set", action="append", metavar="KEY=VALUE",
                      help="override one config key")
    prun.add_argument("--seed", type=int, default=None)
    prun.add_argument("--out", default=None)
    prun.set_defaults(func=cmd_pipeline_run)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScatGPError as exc:
        print(f"scatgp {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"scatgp {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
