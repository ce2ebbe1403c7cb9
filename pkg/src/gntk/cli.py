"""Command-line driver composing the toolkit into reproducible runs.

Subcommands:
  generate    sample a DC-SBM graph (and optionally its population
              adjacency) to files
  ntk         compute a kernel for a dataset and export it
  population  closed-form population kernel values/curves
  sweep       block-gap versus depth, CSV export
  classify    kernel ridge regression node classification accuracy
  validate    oracle-equivalence suites; exit status reflects the result

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
All randomness derives from --seed through named sub-streams, so output
payloads are bit-deterministic per platform.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import gap_depth_sweep
from .conv import CONV_KINDS, build_convolution
from .dcsbm import DcSbmParams, make_pi, population_adjacency, remove_isolated, sample_graph
from .errors import GntkError, ParameterError, ParseError
from .io import (Dataset, export_matrix, export_predictions, load_dataset, save_edge_list,
                 write_gap_reports)
from .ntk import NtkConfig, empirical_ntk, ntk_exact, ntk_linear_closed, ntk_skip_linear_closed
from .population import PopulationParams, pop_ntk_depth, pop_ntk_limit, pop_skip_limit
from .predict import accuracy, kernel_regression_predict, make_split
from .validate import LEVELS, run_checks

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _parse_depths(spec: str) -> list[int]:
    """'1..10' or '1,2,8' (mixes allowed: '1..4,8')."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ParameterError(f"bad depth range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise ParameterError("no depths given")
    return out


def _parse_convs(spec: str) -> list[str]:
    kinds = [k.strip() for k in spec.split(",") if k.strip()]
    for k in kinds:
        if k not in CONV_KINDS:
            raise ParameterError(f"unknown convolution {k!r}; expected one of {CONV_KINDS}")
    if not kinds:
        raise ParameterError("no convolutions given")
    return kinds


def _config_from_args(args, depth: int | None = None) -> NtkConfig:
    return NtkConfig(
        depth=depth if depth is not None else args.depth,
        activation=args.activation,
        skip=args.skip,
        alpha=args.alpha if args.skip == "alpha" else None,
        skip_activation=args.skip_activation,
    )


def _add_kernel_flags(sub, default_conv="sym"):
    sub.add_argument("--conv", default=default_conv, help=f"one of {CONV_KINDS}")
    sub.add_argument("--depth", type=int, default=2, help="number of diffusion layers (>= 1)")
    sub.add_argument("--activation", default="linear", choices=("linear", "relu"))
    sub.add_argument("--skip", default="none", choices=("none", "pc", "alpha"))
    sub.add_argument("--alpha", type=float, default=None, help="interpolation weight for skip=alpha")
    sub.add_argument("--skip-activation", dest="skip_activation", default="linear",
                     choices=("linear", "relu"))


def _dataset_from_args(args) -> Dataset:
    if args.dataset is not None:
        root = Path(args.dataset)
        feature_path = root / "features.csv"
        return load_dataset(root / "edges.txt", root / "labels.txt",
                            feature_path if feature_path.exists() else None,
                            name=root.name)
    if args.edges is None or args.labels is None:
        raise ParameterError("provide --dataset DIR or both --edges and --labels")
    return load_dataset(args.edges, args.labels, args.features)


def _cmd_generate(args) -> int:
    pi = make_pi(args.n, args.classes, args.pi, seed=args.seed)
    params = DcSbmParams(n=args.n, num_classes=args.classes, p=args.p, q=args.q, pi=pi)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph = sample_graph(params, seed=args.seed, pi_scale=args.pi_scale)
    save_edge_list(graph, out / "edges.txt", out / "labels.txt")
    np.savetxt(out / "pi.csv", pi, fmt="%.17g", delimiter=",")
    if args.population:
        export_matrix(population_adjacency(params).adjacency, out / "population.csv")
    print(f"wrote {out}/edges.txt ({int(graph.adjacency.sum() // 2)} edges), labels.txt, pi.csv")
    return EXIT_OK


def _cmd_ntk(args) -> int:
    ds = _dataset_from_args(args)
    cfg = _config_from_args(args)
    S = build_convolution(ds.graph, args.conv)
    if args.empirical_width:
        kernel = empirical_ntk(S, ds.features, cfg, width=args.empirical_width,
                               num_samples=args.empirical_samples, seed=args.seed,
                               conv=args.conv)
    else:
        kernel = ntk_exact(S, ds.features, cfg, conv=args.conv)
    export_matrix(kernel, args.out, format="csv")
    print(f"wrote {args.out} (+ meta sidecar), n={kernel.n}")
    return EXIT_OK


def _cmd_population(args) -> int:
    depths = _parse_depths(args.depths) if args.depths else []
    kinds = _parse_convs(args.conv)
    pi_val = 1.0 / args.n
    gamma = 1.0 / (2.0 * args.n)
    lines = ["conv,depth,same_class,cross_class,gap"]
    for kind in kinds:
        pairs = {}
        for same in (True, False):
            pairs[same] = PopulationParams(
                p=args.p, q=args.q, n=args.n, num_classes=args.classes,
                pi_i=pi_val, pi_j=pi_val, gamma=gamma, same_class=same)
        for d in depths:
            s_val = pop_ntk_depth(pairs[True], kind, d)
            x_val = pop_ntk_depth(pairs[False], kind, d)
            lines.append(f"{kind},{d},{s_val:.17g},{x_val:.17g},{s_val - x_val:.17g}")
        if args.limit:
            if args.skip == "none":
                s_val = pop_ntk_limit(pairs[True], kind)
                x_val = pop_ntk_limit(pairs[False], kind)
            else:
                s_val = pop_skip_limit(pairs[True], kind, args.skip, alpha=args.alpha)
                x_val = pop_skip_limit(pairs[False], kind, args.skip, alpha=args.alpha)
            lines.append(f"{kind},inf,{s_val:.17g},{x_val:.17g},{s_val - x_val:.17g}")
    payload = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(payload)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    depths = _parse_depths(args.depths)
    kinds = _parse_convs(args.conv)
    pi = make_pi(args.n, args.classes, args.pi, seed=args.seed)
    params = DcSbmParams(n=args.n, num_classes=args.classes, p=args.p, q=args.q, pi=pi)
    graph = population_adjacency(params)
    cfg = _config_from_args(args, depth=1)
    rows = []
    for kind in kinds:
        for rep in gap_depth_sweep(graph, kind, cfg, depths):
            rows.append((kind, rep))
    write_gap_reports(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_classify(args) -> int:
    ds = _dataset_from_args(args)
    cfg = _config_from_args(args)
    graph, kept = remove_isolated(ds.graph)
    if kept.size < ds.graph.n:
        print(f"dropped {ds.graph.n - kept.size} isolated node(s)", file=sys.stderr)
    feats = None if ds.features is None else ds.features[kept]
    S = build_convolution(graph, args.conv)
    if cfg.activation == "linear" and cfg.skip_activation == "linear" and feats is None:
        if cfg.skip == "none":
            kernel = ntk_linear_closed(S, cfg.depth, conv=args.conv)
        else:
            kernel = ntk_skip_linear_closed(S, cfg.depth, cfg.skip, alpha=cfg.alpha, conv=args.conv)
    else:
        kernel = ntk_exact(S, feats, cfg, conv=args.conv)
    labels = ds.labels[kept]
    split = make_split(labels, args.train_frac, args.seed, num_classes=ds.num_classes)
    pred = kernel_regression_predict(kernel, split, ridge=args.ridge)
    acc = accuracy(pred, labels[split.test])
    print(f"accuracy {acc:.6f} (n={graph.n}, train={split.train.size}, conv={args.conv})")
    if args.out:
        export_predictions(args.out, kept[split.test], pred, labels[split.test])
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    results = run_checks(args.level, seed=args.seed)
    failed = 0
    for res in results:
        tag = "PASS" if res.ok else "FAIL"
        print(f"[{tag}] {res.name}: {res.detail}")
        failed += not res.ok
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gntk",
        description="Graph NTK toolkit: exact and closed-form kernels over DC-SBM graphs.",
    )
    parser.add_argument("--version", action="version", version=f"gntk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a DC-SBM graph to files")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--classes", type=int, default=2, help="number of classes K")
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--q", type=float, required=True)
    g.add_argument("--pi", default="uniform", choices=("uniform", "unif01", "balanced_gamma"))
    g.add_argument("--pi-scale", dest="pi_scale", type=float, default=1.0,
                   help="scale on pi at sampling time (n/K restores Unif(0,1) magnitudes)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--population", action="store_true", help="also write population.csv")
    g.add_argument("--out-dir", dest="out_dir", required=True)
    g.set_defaults(func=_cmd_generate)

    k = sub.add_parser("ntk", help="compute a kernel for a dataset")
    k.add_argument("--dataset", help="directory with edges.txt, labels.txt[, features.csv]")
    k.add_argument("--edges")
    k.add_argument("--labels")
    k.add_argument("--features")
    _add_kernel_flags(k)
    k.add_argument("--empirical-width", dest="empirical_width", type=int, default=0,
                   help="use the Monte-Carlo estimator at this width instead of the exact kernel")
    k.add_argument("--empirical-samples", dest="empirical_samples", type=int, default=16)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out", required=True)
    k.set_defaults(func=_cmd_ntk)

    p = sub.add_parser("population", help="closed-form population kernel values")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--conv", default="sym,row,col,adj")
    p.add_argument("--depths", default="", help="e.g. 1..10 or 1,2,8")
    p.add_argument("--limit", action="store_true", help="append the infinite-depth rows")
    p.add_argument("--skip", default="none", choices=("none", "pc", "alpha"))
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_population)

    s = sub.add_parser("sweep", help="block gap vs depth on the population kernel")
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--classes", type=int, default=2)
    s.add_argument("--pi", default="uniform", choices=("uniform", "unif01", "balanced_gamma"))
    s.add_argument("--conv", default="sym,row,col,adj")
    s.add_argument("--depths", default="1..10")
    s.add_argument("--activation", default="linear", choices=("linear", "relu"))
    s.add_argument("--skip", default="none", choices=("none", "pc", "alpha"))
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--skip-activation", dest="skip_activation", default="linear",
                   choices=("linear", "relu"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sweep)

    c = sub.add_parser("classify", help="kernel regression node classification")
    c.add_argument("--dataset")
    c.add_argument("--edges")
    c.add_argument("--labels")
    c.add_argument("--features")
    _add_kernel_flags(c, default_conv="row")
    c.add_argument("--train-frac", dest="train_frac", type=float, default=0.1)
    c.add_argument("--ridge", type=float, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=_cmd_classify)

    v = sub.add_parser("validate", help="run the oracle-equivalence suites")
    v.add_argument("--level", default="all", choices=LEVELS)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=_cmd_validate)
    return parser


def run_command(argv) -> int:
    """Parse and execute; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GntkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
