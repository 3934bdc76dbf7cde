"""Benchmark the four label-propagation methods on two moons.

Sweeps 1 to 5 labels per class with the shared seeded trial protocol and
prints one table row per (method, label count).  Writes nothing; redirect
stdout to keep the table.
"""

import argparse
import sys

from liplearn import GraphParams, MoonSpec, TrialSpec, WeightKernel, gen_moons, run_trials

METHODS = ("infsl", "infl", "laplace", "poisson")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--noise", type=float, default=0.15)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--data-seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args(argv)

    ds = gen_moons(MoonSpec(classes=2, points_per_class=args.n // 2,
                            noise=args.noise, seed=args.data_seed))
    gp = GraphParams(k=args.k, kernel=WeightKernel.gaussian_self_tuning())

    print("method labels mean_acc std_acc failures")
    for method in METHODS:
        for lpc in range(1, 6):
            spec = TrialSpec(method=method, labels_per_class=lpc,
                             trials=args.trials, seed=args.seed)
            rep = run_trials(ds, gp, spec, threads=args.threads)
            print("%-7s %d %.4f %.4f %d"
                  % (method, lpc, rep.mean_accuracy, rep.std_accuracy,
                     rep.convergence_failures))
    return 0


if __name__ == "__main__":
    sys.exit(main())
