"""Iterative solvers for graph boundary value problems.

All solvers share the Dirichlet setup: values are pinned on a boundary set
and the interior is relaxed until the sup-norm change of a full pass drops
to ``tol``.  Internally each Dirichlet solver sweeps one order of magnitude
past that threshold before declaring convergence; the change over one pass
understates how far the iterate still has to travel by a graph-dependent
factor, and the margin keeps independently produced
solutions (Gauss-Seidel vs flow, direct vs limiting family) within a few
``tol`` of each other instead of a few tens.  Unless stated otherwise a
solve requires every interior node to be reachable from the boundary, since
unreachable components have no data to propagate and would stall at their
initial values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .graph import Graph
from .operators import LabelField

LENGTH_MODES = ("graph_length", "euclidean")

# Dirichlet solvers stop once a pass moves less than _SAFETY * tol, see the
# module docstring.  Residual-based stops (Poisson) do not need the margin.
_SAFETY = 0.1


@dataclass(frozen=True)
class SolverConfig:
    """Shared iteration knobs.

    ``dt`` only applies to the evolution solver (None picks a stable step).
    ``length_mode`` selects the edge length fed to distance-based updates:
    "graph_length" derives d = 1/sqrt(w) from the similarities, "euclidean"
    uses the stored edge lengths.
    """

    tol: float = 1e-6
    max_iter: int = 100_000
    dt: float | None = None
    length_mode: str = "graph_length"

    def __post_init__(self):
        if not (self.tol > 0 and np.isfinite(self.tol)):
            raise ValueError("tol must be a positive finite number")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.dt is not None and not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.length_mode not in LENGTH_MODES:
            raise ValueError("length_mode must be one of %r" % (LENGTH_MODES,))


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet data: sorted node indices and the values pinned there."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or val.shape != idx.shape:
            raise ValueError("boundary indices and values must be aligned 1-D arrays")
        if idx.size == 0:
            raise ValueError("boundary set must be nonempty")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("boundary indices must be strictly increasing")
        if not np.all(np.isfinite(val)):
            raise ValueError("boundary values must be finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)


@dataclass
class SolveResult:
    u: np.ndarray
    iterations: int
    residual: float
    converged: bool


def _check_boundary(g: Graph, bd: BoundaryData) -> None:
    if bd.indices[0] < 0 or bd.indices[-1] >= g.n:
        raise ValueError("boundary index out of range")


def component_labels(g: Graph) -> tuple[int, np.ndarray]:
    """Connected components of the graph (count, per-node label)."""
    A = csr_matrix((np.ones(g.indices.size), g.indices, g.indptr), shape=(g.n, g.n))
    ncomp, labels = connected_components(A, directed=False)
    return int(ncomp), labels


def check_reachable(g: Graph, seeds: np.ndarray) -> None:
    """Raise unless every node lies in a component containing a seed."""
    ncomp, labels = component_labels(g)
    seeded = np.zeros(ncomp, dtype=bool)
    seeded[labels[seeds]] = True
    if not seeded.all():
        missing = int(np.flatnonzero(~seeded)[0])
        node = int(np.flatnonzero(labels == missing)[0])
        raise ValueError(
            "component containing node %d has no boundary node" % node)


def _interior(g: Graph, bd: BoundaryData) -> np.ndarray:
    mask = np.ones(g.n, dtype=bool)
    mask[bd.indices] = False
    return np.flatnonzero(mask).astype(np.int64)


def _edge_lengths(g: Graph, cfg: SolverConfig) -> np.ndarray:
    if cfg.length_mode == "euclidean":
        return g.lengths
    return 1.0 / np.sqrt(g.weights)


def lipschitz_solve(g: Graph, bd: BoundaryData, cfg: SolverConfig | None = None) -> SolveResult:
    """Minimal Lipschitz extension of the boundary values.

    Gauss-Seidel on the two-point update: node i moves to the weighted
    midpoint of the neighbor pair (r, s) with the steepest difference quotient
    |u_r - u_s| / (d_ir + d_is), scanning pairs with r = s allowed.  Nodes are
    swept in ascending index order until a full pass changes nothing by more
    than tol.
    """
    cfg = cfg or SolverConfig()
    _check_boundary(g, bd)
    check_reachable(g, bd.indices)
    d = np.ascontiguousarray(_edge_lengths(g, cfg))
    u = np.zeros(g.n)
    u[bd.indices] = bd.values
    interior = _interior(g, bd)
    if interior.size == 0:
        return SolveResult(u, 0, 0.0, True)
    change = np.inf
    for it in range(1, cfg.max_iter + 1):
        change = _kernels.lipschitz_sweep(g.indptr, g.indices, d, u, interior)
        if change <= cfg.tol * _SAFETY:
            return SolveResult(u, it, float(change), True)
    return SolveResult(u, cfg.max_iter, float(change), False)


def stable_dt(g: Graph) -> float:
    """Default step for the evolution solver: 0.9 / max_ij sqrt(w_ij)."""
    if g.weights.size == 0:
        raise ValueError("graph has no edges")
    return 0.9 / float(np.sqrt(g.weights.max()))


def evolution_solve(g: Graph, bd: BoundaryData, u0=None, cfg: SolverConfig | None = None) -> SolveResult:
    """Explicit Euler flow u <- u + dt * infinity-Laplacian(u) to steady state.

    Updates are simultaneous (Jacobi); boundary entries stay pinned.  A step
    size above 2 / max_i (top two incident sqrt-weights at i) is rejected as
    unstable.  Convergence is sup |delta| <= tol over one step.  ``u0`` of
    None starts from zero (with boundary values applied).
    """
    cfg = cfg or SolverConfig()
    _check_boundary(g, bd)
    check_reachable(g, bd.indices)
    sqw = np.sqrt(g.weights)
    limit = 2.0 / _kernels.max_pair_sum(g.indptr, sqw, g.n)
    dt = cfg.dt if cfg.dt is not None else stable_dt(g)
    if dt > limit:
        raise ValueError("dt %.3g exceeds the stability limit %.3g" % (dt, limit))
    u = np.zeros(g.n) if u0 is None else np.array(u0, dtype=np.float64)
    if u.shape != (g.n,):
        raise ValueError("initial field must have one value per node")
    u[bd.indices] = bd.values
    interior = _interior(g, bd)
    if interior.size == 0:
        return SolveResult(u, 0, 0.0, True)
    unew = u.copy()
    delta = np.inf
    for it in range(1, cfg.max_iter + 1):
        delta = _kernels.evolution_step(g.indptr, g.indices, sqw, u, unew, interior, dt)
        u, unew = unew, u
        if delta <= cfg.tol * _SAFETY:
            return SolveResult(u, it, float(delta), True)
    return SolveResult(u, cfg.max_iter, float(delta), False)


def laplace_solve(g: Graph, bd: BoundaryData, cfg: SolverConfig | None = None) -> SolveResult:
    """Harmonic extension: Gauss-Seidel on u_i = sum_j w_ij u_j / deg_i.

    A pass that changes nothing by more than tol must also leave the sup
    residual |deg_i u_i - sum_j w_ij u_j| below tol * max degree before the
    solve is declared converged.
    """
    cfg = cfg or SolverConfig()
    _check_boundary(g, bd)
    check_reachable(g, bd.indices)
    u = np.zeros(g.n)
    u[bd.indices] = bd.values
    interior = _interior(g, bd)
    if interior.size == 0:
        return SolveResult(u, 0, 0.0, True)
    degmax = float(g.degrees.max())
    change = np.inf
    for it in range(1, cfg.max_iter + 1):
        change = _kernels.laplace_sweep(g.indptr, g.indices, g.weights, g.degrees, u, interior)
        if change <= cfg.tol * _SAFETY:
            res = _kernels.laplace_residual(g.indptr, g.indices, g.weights,
                                            g.degrees, u, interior)
            if res <= cfg.tol * _SAFETY * degmax:
                return SolveResult(u, it, float(res), True)
    return SolveResult(u, cfg.max_iter, float(change), False)


def p_laplace_solve(g: Graph, bd: BoundaryData, p: float,
                    cfg: SolverConfig | None = None) -> SolveResult:
    """Minimizer of the p-Dirichlet energy (1/p) sum w^(p/2) |u_i - u_j|^p.

    Coordinate descent, one bisection per node per sweep; finite p >= 2.
    Convergence requires both a quiet sweep and a p-Laplacian residual below
    tol (checked in log space so large p cannot overflow).
    """
    if np.isinf(p) or p < 2:
        raise ValueError("p must be finite and >= 2")
    cfg = cfg or SolverConfig()
    _check_boundary(g, bd)
    check_reachable(g, bd.indices)
    # wq^(p-1) = w^(p/2) |.|^(p-1): the derivative term with the weight folded in
    wq = g.weights ** (p / (2.0 * (p - 1.0)))
    u = np.zeros(g.n)
    u[bd.indices] = bd.values
    interior = _interior(g, bd)
    if interior.size == 0:
        return SolveResult(u, 0, 0.0, True)
    log_tol = np.log(cfg.tol * _SAFETY)
    change = np.inf
    for it in range(1, cfg.max_iter + 1):
        change = _kernels.plaplace_sweep(g.indptr, g.indices, wq, u, interior,
                                         float(p), 1e-12)
        if change <= cfg.tol * _SAFETY:
            logres = _kernels.plaplace_log_residual(g.indptr, g.indices, wq,
                                                    u, interior, float(p))
            if logres <= log_tol:
                return SolveResult(u, it, float(np.exp(logres)), True)
    return SolveResult(u, cfg.max_iter, float(change), False)


def poisson_solve(g: Graph, B, cfg: SolverConfig | None = None) -> LabelField:
    """Solve L u = B per column with the degree-weighted zero-mean gauge.

    The graph must be connected and every column of B must sum to ~0 (the
    compatibility condition; tolerance 1e-9).  Iteration is the fixed point
    u <- u + D^-1 (B - L u) from u = 0, re-centering each column to
    degree-weighted mean zero after every sweep.  Converges when
    sup |B - L u| <= tol * max degree.
    """
    cfg = cfg or SolverConfig()
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != g.n:
        raise ValueError("B must be an (n, k) source matrix")
    ncomp, _ = component_labels(g)
    if ncomp != 1:
        raise ValueError("Poisson solve needs a connected graph (%d components)" % ncomp)
    colsum = np.abs(B.sum(axis=0))
    if np.any(colsum > 1e-9):
        raise ValueError("source columns must sum to zero (max |sum| = %.3g)" % colsum.max())
    u = np.zeros_like(B)
    r = np.empty_like(B)
    tol_abs = cfg.tol * float(g.degrees.max())
    it, resid, ok = _kernels.poisson_iterate(
        g.indptr, g.indices, g.weights, g.degrees,
        np.ascontiguousarray(B), u, r, tol_abs, cfg.max_iter)
    return LabelField(u, converged=bool(ok), iterations=int(it))
