"""Discrete graph operators evaluated at single nodes.

All operators read a scalar field u over the nodes of a weighted graph and
return a float.  Conventions:

  graph Laplacian       L u(i) = sum_j w_ij (u_i - u_j)
  upwind gradient norm  sign "+" uses (u_i - u_j)^+ (descent side),
                        sign "-" uses (u_i - u_j)^- = (u_j - u_i)^+ (ascent)
  infinity Laplacian    0.5 [ max_j sqrt(w_ij) (u_j - u_i)^+
                              - max_j sqrt(w_ij) (u_i - u_j)^+ ]
  p-Laplacian           sum_j w_ij^(p/2) |u_i - u_j|^(p-2) (u_i - u_j)
  Holder infinity       max_j (u_j - u_i)/d_ij^a + min_j (u_j - u_i)/d_ij^a
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = [
    "LabelField", "graph_laplacian", "upwind_grad_norm",
    "infinity_laplacian", "p_laplacian", "holder_infinity", "apply_to_field",
]


@dataclass
class LabelField:
    """Per-node, per-class score matrix of shape (n, k) plus solver state."""

    values: np.ndarray
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] < 1:
            raise ValueError("label field must be an (n, k) matrix")
        if not np.all(np.isfinite(v)):
            raise ValueError("label field contains non-finite entries")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


def _node_slice(g: Graph, u: np.ndarray, i: int):
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (g.n,):
        raise ValueError("field must have one value per node")
    if not 0 <= i < g.n:
        raise ValueError("node index out of range")
    s = slice(g.indptr[i], g.indptr[i + 1])
    return u, g.indices[s], g.weights[s], g.lengths[s]


def graph_laplacian(g: Graph, u, i: int) -> float:
    """sum_j w_ij (u_i - u_j); zero at isolated nodes."""
    u, nbr, w, _ = _node_slice(g, u, i)
    return float(np.sum(w * (u[i] - u[nbr])))


def upwind_grad_norm(g: Graph, u, i: int, sign: str = "+", p: float = 2.0) -> float:
    """One-sided gradient norm at node i.

    For finite p this is (sum_j w_ij^(p/2) ((u_i - u_j)^s)^p)^(1/p) and for
    p = inf it is max_j sqrt(w_ij) (u_i - u_j)^s, where s picks the positive
    part ("+", neighbors below u_i) or negative part ("-", neighbors above).
    Empty maxima are 0.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if not (p > 0 or math.isinf(p)):
        raise ValueError("p must be positive or inf")
    u, nbr, w, _ = _node_slice(g, u, i)
    diff = u[i] - u[nbr]
    part = np.maximum(diff, 0.0) if sign == "+" else np.maximum(-diff, 0.0)
    if math.isinf(p):
        return float(np.max(np.sqrt(w) * part, initial=0.0))
    return float(np.sum(w ** (p / 2.0) * part ** p) ** (1.0 / p))


def infinity_laplacian(g: Graph, u, i: int) -> float:
    """0.5 [ max_j sqrt(w)(u_j - u_i)^+ - max_j sqrt(w)(u_i - u_j)^+ ].

    Positive when the largest upwind ascent exceeds the largest descent.
    Requires at least one neighbor.
    """
    u, nbr, w, _ = _node_slice(g, u, i)
    if nbr.size == 0:
        raise ValueError("infinity Laplacian undefined at isolated node %d" % i)
    sq = np.sqrt(w)
    diff = u[nbr] - u[i]
    up = np.max(sq * np.maximum(diff, 0.0), initial=0.0)
    down = np.max(sq * np.maximum(-diff, 0.0), initial=0.0)
    return 0.5 * float(up - down)


def p_laplacian(g: Graph, u, i: int, p: float) -> float:
    """sum_j w_ij^(p/2) |u_i - u_j|^(p-2) (u_i - u_j) for finite p >= 1.

    Terms with u_i = u_j contribute 0, which keeps p < 2 finite and avoids
    0^0 at p = 2.  Written as sign(diff) |diff|^(p-1) so no negative power
    of zero is ever formed.
    """
    if math.isinf(p) or p < 1:
        raise ValueError("p must be finite and >= 1")
    u, nbr, w, _ = _node_slice(g, u, i)
    diff = u[i] - u[nbr]
    out = 0.0
    for wj, dj in zip(w, diff):
        if dj != 0.0:
            out += wj ** (p / 2.0) * math.copysign(abs(dj) ** (p - 1.0), dj)
    return float(out)


def holder_infinity(g: Graph, u, i: int, alpha: float = 1.0) -> float:
    """max_j (u_j - u_i)/d_ij^alpha + min_j (u_j - u_i)/d_ij^alpha.

    alpha = 0 drops the length scaling entirely so the value is the sum of
    the largest and smallest neighbour differences.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    u, nbr, _, d = _node_slice(g, u, i)
    if nbr.size == 0:
        raise ValueError("Holder infinity Laplacian undefined at isolated node %d" % i)
    r = (u[nbr] - u[i]) / d ** alpha
    return float(np.max(r) + np.min(r))


def apply_to_field(op, g: Graph, u, exclude=(), **kw) -> np.ndarray:
    """Evaluate a nodal operator at every node not in ``exclude``.

    Excluded nodes get 0.  ``op`` is one of the functions in this module;
    extra keyword arguments are forwarded to it.
    """
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros(g.n)
    skip = np.zeros(g.n, dtype=bool)
    if len(exclude):
        skip[np.asarray(exclude, dtype=np.int64)] = True
    for i in range(g.n):
        if not skip[i]:
            out[i] = op(g, u, i, **kw)
    return out
