"""Graph-based semi-supervised classifiers and the benchmark harness.

Four methods share one interface: they take a graph, a set of labeled nodes,
and produce an (n, k) score field plus hard predictions.

  infl     one minimal Lipschitz extension per class of one-hot data
  infsl    coupled scheme: one Lipschitz sweep per class per outer
           iteration followed by a truncation that keeps the per-class
           scores segregated (at most one positive entry per node)
  laplace  harmonic extension per class
  poisson  point sources at the labeled nodes, zero-mean gauge
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import Dataset, Graph, WeightKernel, knn_graph
from .operators import LabelField
from .solvers import (BoundaryData, SolverConfig, _edge_lengths,
                      check_reachable, laplace_solve, lipschitz_solve,
                      poisson_solve)

METHODS = ("infl", "infsl", "laplace", "poisson")


@dataclass(frozen=True)
class LabelConstraint:
    """Labeled node set: sorted indices and their class ids in {0..k-1}."""

    indices: np.ndarray
    classes: np.ndarray
    k: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        cls = np.asarray(self.classes, dtype=np.int64)
        if idx.ndim != 1 or cls.shape != idx.shape:
            raise ValueError("indices and classes must be aligned 1-D arrays")
        if idx.size == 0:
            raise ValueError("need at least one labeled node")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("labeled indices must be strictly increasing")
        if self.k < 1:
            raise ValueError("class count must be >= 1")
        if cls.min() < 0 or cls.max() >= self.k:
            raise ValueError("class ids must lie in {0, ..., k-1}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "classes", cls)


@dataclass(frozen=True)
class GraphParams:
    """K-NN graph settings used by the trial runner."""

    k: int = 10
    kernel: WeightKernel = field(default_factory=WeightKernel.gaussian_self_tuning)


@dataclass(frozen=True)
class TrialSpec:
    """Benchmark protocol: how labels are sampled and which method runs.

    Exactly one of ``labels_per_class`` / ``label_fraction`` must be set.
    Trial t draws its labeled set from ``numpy.random.default_rng((seed, t))``
    so individual trials are reproducible in isolation.
    """

    method: str = "infsl"
    labels_per_class: int | None = None
    label_fraction: float | None = None
    trials: int = 1
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError("unknown method %r" % (self.method,))
        have_count = self.labels_per_class is not None
        have_frac = self.label_fraction is not None
        if have_count == have_frac:
            raise ValueError("set exactly one of labels_per_class / label_fraction")
        if have_count and self.labels_per_class < 1:
            raise ValueError("labels_per_class must be >= 1")
        if have_frac and not 0 < self.label_fraction < 1:
            raise ValueError("label_fraction must lie in (0, 1)")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class TrialMetrics:
    """Scores over the unlabeled nodes of one trial (labeled nodes excluded).

    Per-class precision/recall are 1 when the class is absent from both the
    truth and the predictions, 0 when absent from only one side.  Confusion
    rows are truth, columns predictions.
    """

    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    confusion: np.ndarray


@dataclass
class TrialReport:
    """Aggregate of a seeded batch of trials on one dataset and graph."""

    method: str
    trials: int
    seed: int
    labels_per_trial: int
    mean_accuracy: float
    std_accuracy: float
    mean_precision: np.ndarray
    mean_recall: np.ndarray
    mean_f1: np.ndarray
    confusion: np.ndarray
    convergence_failures: int

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "trials": self.trials,
            "seed": self.seed,
            "labels_per_trial": self.labels_per_trial,
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "mean_precision": self.mean_precision.tolist(),
            "mean_recall": self.mean_recall.tolist(),
            "mean_f1": self.mean_f1.tolist(),
            "confusion": self.confusion.tolist(),
            "convergence_failures": self.convergence_failures,
        }


def onehot_boundary(lc: LabelConstraint, c: int) -> BoundaryData:
    """Dirichlet data that is 1 on class-c labeled nodes, 0 on the rest."""
    return BoundaryData(lc.indices, (lc.classes == c).astype(np.float64))


def decide(fld, lc: LabelConstraint) -> np.ndarray:
    """Argmax over classes, ties to the lowest class id; labeled nodes are
    forced to their given class."""
    vals = fld.values if isinstance(fld, LabelField) else np.asarray(fld, dtype=np.float64)
    preds = np.argmax(vals, axis=1).astype(np.int64)
    preds[lc.indices] = lc.classes
    return preds


def infl_classify(g: Graph, lc: LabelConstraint,
                  cfg: SolverConfig | None = None) -> tuple[np.ndarray, LabelField]:
    """One Lipschitz extension per class, decision by argmax."""
    cfg = cfg or SolverConfig()
    vals = np.empty((g.n, lc.k))
    converged = True
    iterations = 0
    for c in range(lc.k):
        res = lipschitz_solve(g, onehot_boundary(lc, c), cfg)
        vals[:, c] = res.u
        converged = converged and res.converged
        iterations = max(iterations, res.iterations)
    fld = LabelField(vals, converged=converged, iterations=iterations)
    return decide(fld, lc), fld


def laplace_classify(g: Graph, lc: LabelConstraint,
                     cfg: SolverConfig | None = None) -> tuple[np.ndarray, LabelField]:
    """One harmonic extension per class, decision by argmax."""
    cfg = cfg or SolverConfig()
    vals = np.empty((g.n, lc.k))
    converged = True
    iterations = 0
    for c in range(lc.k):
        res = laplace_solve(g, onehot_boundary(lc, c), cfg)
        vals[:, c] = res.u
        converged = converged and res.converged
        iterations = max(iterations, res.iterations)
    fld = LabelField(vals, converged=converged, iterations=iterations)
    return decide(fld, lc), fld


def poisson_classify(g: Graph, lc: LabelConstraint,
                     cfg: SolverConfig | None = None) -> tuple[np.ndarray, LabelField]:
    """Labeled nodes act as point sources y_i - mean(y); zero elsewhere."""
    cfg = cfg or SolverConfig()
    onehot = np.zeros((lc.indices.size, lc.k))
    onehot[np.arange(lc.indices.size), lc.classes] = 1.0
    ybar = onehot.mean(axis=0)
    B = np.zeros((g.n, lc.k))
    B[lc.indices] = onehot - ybar
    fld = poisson_solve(g, B, cfg)
    return decide(fld, lc), fld


def infsl_classify(g: Graph, lc: LabelConstraint, cfg: SolverConfig | None = None,
                   on_iteration=None) -> tuple[np.ndarray, LabelField]:
    """Segregated Lipschitz learning.

    Columns start as one-hot indicators of the labeled sets.  Each outer
    iteration applies one Lipschitz sweep to every column independently,
    then truncates the sweep output u* on unlabeled nodes:

        u_c <- max(u*_c - sum_{p != c} u*_p, 0)

    which leaves at most one positive entry per node.  Labeled rows are
    reasserted afterwards.  Stops when the largest entry change across all
    columns falls to tol.  Nodes whose row is all zero fall back to the
    pre-truncation sweep values for the argmax; labeled nodes keep their
    class.  ``on_iteration(m, values, presweep)`` is called with copies after
    every outer iteration when provided.
    """
    cfg = cfg or SolverConfig()
    if lc.k < 2:
        raise ValueError("segregated scheme needs k >= 2 classes")
    check_reachable(g, lc.indices)
    if lc.indices.size == g.n:
        vals = np.zeros((g.n, lc.k))
        vals[lc.indices, lc.classes] = 1.0
        return lc.classes.copy(), LabelField(vals, converged=True, iterations=0)
    d = np.ascontiguousarray(_edge_lengths(g, cfg))
    mask = np.ones(g.n, dtype=bool)
    mask[lc.indices] = False
    interior = np.flatnonzero(mask).astype(np.int64)

    # columns kept as rows of a (k, n) array so each sweep sees contiguous data
    u = np.zeros((lc.k, g.n))
    u[lc.classes, lc.indices] = 1.0
    bvals = u[:, lc.indices].copy()
    ustar = u.copy()
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        ustar = u.copy()
        for c in range(lc.k):
            _kernels.lipschitz_sweep(g.indptr, g.indices, d, ustar[c], interior)
        total = ustar.sum(axis=0)
        nxt = np.maximum(2.0 * ustar - total[None, :], 0.0)
        nxt[:, lc.indices] = bvals
        change = float(np.abs(nxt - u).max())
        u = nxt
        if on_iteration is not None:
            on_iteration(it, u.T.copy(), ustar.T.copy())
        if change <= cfg.tol:
            converged = True
            break

    vals = np.ascontiguousarray(u.T)
    star = ustar.T
    preds = np.argmax(vals, axis=1).astype(np.int64)
    dead = vals.max(axis=1) == 0.0
    if dead.any():
        preds[dead] = np.argmax(star[dead], axis=1)
    preds[lc.indices] = lc.classes
    return preds, LabelField(vals, converged=converged, iterations=it)


_CLASSIFIERS = {
    "infl": infl_classify,
    "infsl": infsl_classify,
    "laplace": laplace_classify,
    "poisson": poisson_classify,
}


def classify(method: str, g: Graph, lc: LabelConstraint,
             cfg: SolverConfig | None = None) -> tuple[np.ndarray, LabelField]:
    if method not in _CLASSIFIERS:
        raise ValueError("unknown method %r" % (method,))
    return _CLASSIFIERS[method](g, lc, cfg)


def evaluate(predictions, truth, k: int) -> TrialMetrics:
    """Accuracy, per-class precision/recall/F1 and the confusion matrix.

    An empty evaluation set scores accuracy 1 by convention.
    """
    pred = np.asarray(predictions, dtype=np.int64)
    true = np.asarray(truth, dtype=np.int64)
    if pred.shape != true.shape or pred.ndim != 1:
        raise ValueError("predictions and truth must be aligned 1-D arrays")
    if k < 1:
        raise ValueError("need k >= 1 classes")
    if pred.size and (min(pred.min(), true.min()) < 0 or max(pred.max(), true.max()) >= k):
        raise ValueError("class id outside {0, ..., k-1}")
    n = pred.size
    accuracy = float((pred == true).mean()) if n else 1.0
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (true, pred), 1)
    precision = np.zeros(k)
    recall = np.zeros(k)
    f1 = np.zeros(k)
    for c in range(k):
        tp = confusion[c, c]
        in_true = confusion[c, :].sum()
        in_pred = confusion[:, c].sum()
        if in_true == 0 and in_pred == 0:
            precision[c] = recall[c] = f1[c] = 1.0
            continue
        precision[c] = tp / in_pred if in_pred else 0.0
        recall[c] = tp / in_true if in_true else 0.0
        s = precision[c] + recall[c]
        f1[c] = 2.0 * precision[c] * recall[c] / s if s else 0.0
    return TrialMetrics(accuracy, precision, recall, f1, confusion)


def sample_labels(rng: np.random.Generator, labels: np.ndarray, k: int,
                  spec: TrialSpec) -> np.ndarray:
    """Stratified draw of labeled node indices, sorted ascending.

    Per class: ``labels_per_class`` nodes, or ceil(fraction * class size)
    with a minimum of one.  Classes are visited in ascending id order so the
    stream of random draws is reproducible.
    """
    chosen = []
    for c in range(k):
        pool = np.flatnonzero(labels == c)
        if pool.size == 0:
            raise ValueError("class %d has no samples to label" % c)
        if spec.labels_per_class is not None:
            m = spec.labels_per_class
            if m > pool.size:
                raise ValueError("class %d has %d samples, cannot label %d"
                                 % (c, pool.size, m))
        else:
            m = max(1, math.ceil(spec.label_fraction * pool.size))
        take = rng.choice(pool.size, size=m, replace=False)
        chosen.append(pool[take])
    return np.sort(np.concatenate(chosen))


def run_trials(data: Dataset, graph_params: GraphParams, spec: TrialSpec,
               threads: int = 1) -> TrialReport:
    """Seeded benchmark: one graph, ``spec.trials`` independent label draws.

    The graph is built once.  Scoring excludes the labeled nodes.  Trials are
    independent, so ``threads > 1`` distributes them over a thread pool; the
    reduction is ordered by trial index either way and results do not depend
    on ``threads``.
    """
    if data.labels is None or data.k is None:
        raise ValueError("benchmark needs a labeled dataset")
    g = knn_graph(data, graph_params.k, graph_params.kernel)
    k = data.k

    def one_trial(t: int):
        rng = np.random.default_rng((spec.seed, t))
        labeled = sample_labels(rng, data.labels, k, spec)
        lc = LabelConstraint(labeled, data.labels[labeled], k)
        preds, fld = classify(spec.method, g, lc, spec.solver)
        mask = np.ones(data.n, dtype=bool)
        mask[labeled] = False
        tm = evaluate(preds[mask], data.labels[mask], k)
        return labeled.size, tm, fld.converged

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_trial, range(spec.trials)))
    else:
        results = [one_trial(t) for t in range(spec.trials)]

    accs = np.array([tm.accuracy for _, tm, _ in results])
    return TrialReport(
        method=spec.method,
        trials=spec.trials,
        seed=spec.seed,
        labels_per_trial=results[0][0],
        mean_accuracy=float(accs.mean()),
        std_accuracy=float(accs.std()),
        mean_precision=np.mean([tm.precision for _, tm, _ in results], axis=0),
        mean_recall=np.mean([tm.recall for _, tm, _ in results], axis=0),
        mean_f1=np.mean([tm.f1 for _, tm, _ in results], axis=0),
        confusion=np.sum([tm.confusion for _, tm, _ in results], axis=0),
        convergence_failures=sum(0 if ok else 1 for _, _, ok in results),
    )
