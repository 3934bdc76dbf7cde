"""Command line interface and the grid point-source demo.

Subcommands: gen, graph, classify, bench, pde-demo, eval.  Every command is
deterministic given its flags, writes output files atomically (temp file then
rename), and exits 0 on success, 1 on any error, 2 when benchmark trials
failed to converge.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .data import MoonSpec, gen_moons, load_csv, load_keel, save_csv
from .graph import Dataset, WeightKernel, grid_graph, knn_graph, write_edge_list
from .learn import (GraphParams, LabelConstraint, TrialReport, TrialSpec,
                    classify, evaluate, sample_labels)
from .solvers import (BoundaryData, SolverConfig, component_labels,
                      laplace_solve, lipschitz_solve)

LAYOUTS = ("center", "ring")
MODES = ("infinity", "laplace")


@dataclass(frozen=True)
class DemoSpec:
    """Point-source problem on the [-1, 1]^2 grid.

    Boundary nodes are pinned to 0.  Layout "center" pins the middle node to
    1; "ring" pins the ten nodes nearest to equiangular points on the circle
    of radius 0.8 to +1 and the middle node to -1.  Mode picks the operator:
    "infinity" solves the minimal Lipschitz extension, "laplace" the harmonic
    one.
    """

    m: int = 101
    stencil: int = 8
    mode: str = "infinity"
    layout: str = "center"

    def __post_init__(self):
        if self.m < 3 or self.m % 2 == 0:
            raise ValueError("m must be an odd integer >= 3")
        if self.stencil not in (4, 8):
            raise ValueError("stencil must be 4 or 8")
        if self.mode not in MODES:
            raise ValueError("mode must be one of %r" % (MODES,))
        if self.layout not in LAYOUTS:
            raise ValueError("layout must be one of %r" % (LAYOUTS,))


def pde_demo(spec: DemoSpec, cfg: SolverConfig | None = None) -> np.ndarray:
    """Solve the demo problem; returns the field as an (m, m) array indexed
    [iy, ix], i.e. row-major by y then x.

    The inner solve runs one order tighter than cfg.tol: sweep ordering
    perturbs the lattice symmetries by roughly 25x the last-pass change, so
    the extra margin (on top of the solvers' own) keeps the emitted field
    symmetric to within cfg.tol.
    """
    cfg = cfg or SolverConfig()
    g, coords = grid_graph(spec.m, spec.stencil)
    m = spec.m
    pinned: dict[int, float] = {}
    for iy in range(m):
        for ix in range(m):
            if iy in (0, m - 1) or ix in (0, m - 1):
                pinned[iy * m + ix] = 0.0
    center = (m // 2) * m + (m // 2)
    if spec.layout == "center":
        pinned[center] = 1.0
    else:
        for q in range(10):
            ang = 2.0 * math.pi * q / 10.0
            tx, ty = 0.8 * math.cos(ang), 0.8 * math.sin(ang)
            d2 = (coords[:, 0] - tx) ** 2 + (coords[:, 1] - ty) ** 2
            pinned[int(np.argmin(d2))] = 1.0
        pinned[center] = -1.0
    idx = np.asarray(sorted(pinned), dtype=np.int64)
    bd = BoundaryData(idx, np.asarray([pinned[i] for i in idx]))
    solve = lipschitz_solve if spec.mode == "infinity" else laplace_solve
    inner = replace(cfg, tol=cfg.tol / 10.0)
    res = solve(g, bd, inner)
    if not res.converged:
        raise RuntimeError("demo solve did not converge in %d iterations" % res.iterations)
    return res.u.reshape(m, m)


def _write_atomic(path, text: str) -> None:
    tmp = "%s.tmp" % path
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_field_csv(field: np.ndarray, path) -> None:
    """m rows of m comma-separated values, bottom grid row first."""
    lines = [",".join("%.17g" % v for v in row) for row in field]
    _write_atomic(path, "\n".join(lines) + "\n")


def _format_report(report: TrialReport) -> str:
    lines = [
        "method = %s" % report.method,
        "trials = %d" % report.trials,
        "seed = %d" % report.seed,
        "labels_per_trial = %d" % report.labels_per_trial,
        "mean_accuracy = %r" % report.mean_accuracy,
        "std_accuracy = %r" % report.std_accuracy,
        "convergence_failures = %d" % report.convergence_failures,
        "",
        "class precision recall f1",
    ]
    for c in range(report.mean_precision.size):
        lines.append("%d %r %r %r" % (c, float(report.mean_precision[c]),
                                      float(report.mean_recall[c]),
                                      float(report.mean_f1[c])))
    lines.append("")
    lines.append("confusion (rows truth, cols prediction):")
    for row in report.confusion:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def _write_report(report: TrialReport, out_dir, context: dict) -> None:
    payload = report.to_dict()
    payload["context"] = context
    _write_atomic(os.path.join(out_dir, "report.txt"), _format_report(report))
    _write_atomic(os.path.join(out_dir, "report.json"),
                  json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _kernel_from_args(args) -> WeightKernel:
    if args.kernel == "gaussian":
        return WeightKernel.gaussian_self_tuning(k_sigma=args.k_sigma)
    if args.kernel == "cosine":
        return WeightKernel.cosine_adjusted()
    return WeightKernel.inverse_distance(alpha=args.alpha)


def _solver_from_args(args) -> SolverConfig:
    return SolverConfig(tol=args.tol, max_iter=args.max_iter, dt=args.dt,
                        length_mode=args.length_mode)


def _load_dataset(args) -> Dataset:
    fmt = args.format
    if fmt == "auto":
        fmt = "keel" if str(args.data).endswith(".dat") else "csv"
    if fmt == "keel":
        ds, _ = load_keel(args.data)
        return ds
    return load_csv(args.data, has_label_column=not args.no_label_column)


def _moons_from_args(args) -> Dataset:
    if args.n % args.classes:
        raise ValueError("--n must be divisible by --classes")
    return gen_moons(MoonSpec(classes=args.classes,
                              points_per_class=args.n // args.classes,
                              noise=args.noise, seed=args.data_seed))


def cmd_gen(args) -> int:
    ds = _moons_from_args(args)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "dataset.csv")
    save_csv(ds, path)
    print("wrote %s (%d points, %d classes)" % (path, ds.n, ds.k))
    return 0


def cmd_graph(args) -> int:
    ds = _load_dataset(args)
    g = knn_graph(ds, args.k, _kernel_from_args(args))
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "graph.edges")
    tmp = path + ".tmp"
    write_edge_list(g, tmp)
    os.replace(tmp, path)
    ncomp, _ = component_labels(g)
    print("wrote %s (nodes=%d edges=%d components=%d)" % (path, g.n, g.num_edges, ncomp))
    return 0


def _trial_zero(ds: Dataset, g, spec: TrialSpec):
    rng = np.random.default_rng((spec.seed, 0))
    labeled = sample_labels(rng, ds.labels, ds.k, spec)
    lc = LabelConstraint(labeled, ds.labels[labeled], ds.k)
    preds, fld = classify(spec.method, g, lc, spec.solver)
    return labeled, preds, fld


def _predictions_text(ds: Dataset, preds: np.ndarray) -> str:
    lines = ["node_index,predicted_class,true_class"]
    for i in range(ds.n):
        lines.append("%d,%d,%d" % (i, preds[i], ds.labels[i]))
    return "\n".join(lines) + "\n"


def cmd_classify(args) -> int:
    ds = _load_dataset(args)
    if ds.labels is None:
        raise ValueError("classify needs a labeled dataset")
    spec = TrialSpec(method=args.method, labels_per_class=args.labels_per_class,
                     label_fraction=args.label_fraction, seed=args.seed,
                     solver=_solver_from_args(args))
    g = knn_graph(ds, args.k, _kernel_from_args(args))
    labeled, preds, fld = _trial_zero(ds, g, spec)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "predictions.csv")
    _write_atomic(path, _predictions_text(ds, preds))
    mask = np.ones(ds.n, dtype=bool)
    mask[labeled] = False
    tm = evaluate(preds[mask], ds.labels[mask], ds.k)
    print("wrote %s (accuracy on unlabeled: %.4f, converged: %s)"
          % (path, tm.accuracy, fld.converged))
    return 0


def cmd_bench(args) -> int:
    if args.data is not None:
        ds = _load_dataset(args)
        source = {"data": str(args.data)}
    else:
        ds = _moons_from_args(args)
        source = {"moons": {"classes": args.classes, "n": args.n,
                            "noise": args.noise, "seed": args.data_seed}}
    if ds.labels is None:
        raise ValueError("bench needs a labeled dataset")
    spec = TrialSpec(method=args.method, labels_per_class=args.labels_per_class,
                     label_fraction=args.label_fraction, trials=args.trials,
                     seed=args.seed, solver=_solver_from_args(args))
    gp = GraphParams(k=args.k, kernel=_kernel_from_args(args))
    from .learn import run_trials
    report = run_trials(ds, gp, spec, threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    context = {
        "source": source,
        "graph": {"k": gp.k, "kernel": gp.kernel.variant,
                  "alpha": gp.kernel.alpha, "k_sigma": gp.kernel.k_sigma},
        "solver": {"tol": spec.solver.tol, "max_iter": spec.solver.max_iter,
                   "dt": spec.solver.dt, "length_mode": spec.solver.length_mode},
    }
    _write_report(report, args.out, context)
    if args.predictions:
        g = knn_graph(ds, gp.k, gp.kernel)
        _, preds, _ = _trial_zero(ds, g, spec)
        _write_atomic(os.path.join(args.out, "predictions.csv"),
                      _predictions_text(ds, preds))
    print("method=%s trials=%d mean_accuracy=%.4f failures=%d"
          % (report.method, report.trials, report.mean_accuracy,
             report.convergence_failures))
    return 2 if report.convergence_failures else 0


def cmd_pde_demo(args) -> int:
    spec = DemoSpec(m=args.m, stencil=args.stencil, mode=args.mode,
                    layout=args.layout)
    field = pde_demo(spec, _solver_from_args(args))
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "field.csv")
    write_field_csv(field, path)
    print("wrote %s (min=%.6g max=%.6g)" % (path, field.min(), field.max()))
    return 0


def _read_predictions(path):
    preds, truth = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or not line[0].isdigit():
                continue
            cells = line.split(",")
            if len(cells) != 3:
                raise ValueError("line %d: expected node_index,predicted_class,true_class"
                                 % lineno)
            preds.append(int(cells[1]))
            truth.append(int(cells[2]))
    if not preds:
        raise ValueError("no prediction rows in %s" % path)
    return np.asarray(preds), np.asarray(truth)


def cmd_eval(args) -> int:
    preds, truth = _read_predictions(args.pred)
    k = args.num_classes or int(max(preds.max(), truth.max())) + 1
    tm = evaluate(preds, truth, k)
    print("accuracy: %r" % tm.accuracy)
    print("class precision recall f1")
    for c in range(k):
        print("%d %r %r %r" % (c, float(tm.precision[c]),
                               float(tm.recall[c]), float(tm.f1[c])))
    print("confusion (rows truth, cols prediction):")
    for row in tm.confusion:
        print(" ".join(str(int(v)) for v in row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liplearn",
        description="Graph-based semi-supervised learning with Lipschitz extensions.")
    sub = parser.add_subparsers(dest="command", required=True)

    graph_flags = argparse.ArgumentParser(add_help=False)
    graph_flags.add_argument("--k", type=int, default=10, help="K-NN neighbor count")
    graph_flags.add_argument("--kernel", choices=("gaussian", "cosine", "invdist"),
                             default="gaussian")
    graph_flags.add_argument("--alpha", type=float, default=1.0,
                             help="inverse-distance exponent")
    graph_flags.add_argument("--k-sigma", type=int, default=None,
                             help="self-tuning scale rank (default: --k)")

    solver_flags = argparse.ArgumentParser(add_help=False)
    solver_flags.add_argument("--tol", type=float, default=1e-6)
    solver_flags.add_argument("--max-iter", type=int, default=100_000)
    solver_flags.add_argument("--dt", type=float, default=None)
    solver_flags.add_argument("--length-mode", choices=("graph_length", "euclidean"),
                              default="graph_length")

    data_flags = argparse.ArgumentParser(add_help=False)
    data_flags.add_argument("--data", required=True, help="input CSV or KEEL .dat file")
    data_flags.add_argument("--format", choices=("auto", "csv", "keel"), default="auto")
    data_flags.add_argument("--no-label-column", action="store_true",
                            help="CSV has no trailing label column")

    moons_flags = argparse.ArgumentParser(add_help=False)
    moons_flags.add_argument("--classes", type=int, default=2)
    moons_flags.add_argument("--n", type=int, default=2000,
                             help="total points, split evenly across classes")
    moons_flags.add_argument("--noise", type=float, default=0.15)
    moons_flags.add_argument("--data-seed", type=int, default=0)

    label_flags = argparse.ArgumentParser(add_help=False)
    label_flags.add_argument("--method", choices=("infl", "infsl", "laplace", "poisson"),
                             default="infsl")
    label_flags.add_argument("--labels-per-class", type=int, default=None)
    label_flags.add_argument("--label-fraction", type=float, default=None)
    label_flags.add_argument("--seed", type=int, default=0)

    out_flags = argparse.ArgumentParser(add_help=False)
    out_flags.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("gen", parents=[moons_flags, out_flags],
                       help="generate a moons dataset CSV")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("graph", parents=[data_flags, graph_flags, out_flags],
                       help="build a K-NN graph and write its edge list")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("classify",
                       parents=[data_flags, graph_flags, label_flags, solver_flags, out_flags],
                       help="run one labeled trial and write predictions")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bench",
                       parents=[graph_flags, label_flags, solver_flags, moons_flags, out_flags],
                       help="run a seeded batch of trials and write a report")
    p.add_argument("--data", default=None, help="input file (omit to use --classes/--n moons)")
    p.add_argument("--gen", choices=("moons",), default="moons",
                   help="generator used when --data is absent")
    p.add_argument("--format", choices=("auto", "csv", "keel"), default="auto")
    p.add_argument("--no-label-column", action="store_true")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="trial workers (default: all cores); results do not depend on it")
    p.add_argument("--predictions", action="store_true",
                   help="also write trial-0 predictions.csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pde-demo", parents=[solver_flags, out_flags],
                       help="solve a point-source problem on the square grid")
    p.add_argument("--m", type=int, default=101)
    p.add_argument("--stencil", type=int, choices=(4, 8), default=8)
    p.add_argument("--mode", choices=MODES, default="infinity")
    p.add_argument("--layout", choices=LAYOUTS, default="center")
    p.set_defaults(func=cmd_pde_demo)

    p = sub.add_parser("eval", help="score a predictions CSV against its true labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--num-classes", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else (0 if exc.code is None else 1)
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def main_entry() -> None:
    raise SystemExit(main(sys.argv[1:]))
