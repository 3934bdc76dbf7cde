"""Sparse weighted graphs: K-NN construction over point clouds and regular grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

# Numeric guard rails. Duplicate points would otherwise produce zero-length
# edges and infinite similarities; every stored weight/length is clamped into
# these ranges so iterative solvers stay finite.
W_MAX = 1e12
W_MIN = 1e-12
D_MIN = 1e-12

_KERNEL_VARIANTS = ("gaussian", "cosine", "invdist")


@dataclass(frozen=True)
class Dataset:
    """Point cloud of n samples in R^d with optional labels in {0, ..., k-1}.

    ``label_map`` records how raw label values from a file were remapped to
    the dense 0..k-1 range (first-appearance order).
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    k: int | None = None
    label_map: dict | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array, got shape %r" % (pts.shape,))
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("dataset needs n >= 1 samples and d >= 1 features")
        if not np.all(np.isfinite(pts)):
            raise ValueError("dataset contains non-finite coordinates")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.shape != (pts.shape[0],):
                raise ValueError("labels must be a length-n vector")
            if self.k is None:
                raise ValueError("labeled dataset needs a class count k")
            if self.k < 2:
                raise ValueError("class count k must be >= 2, got %d" % self.k)
            if lab.min() < 0 or lab.max() >= self.k:
                raise ValueError("labels must lie in {0, ..., k-1}")
            object.__setattr__(self, "labels", lab)
        elif self.k is not None and self.k < 2:
            raise ValueError("class count k must be >= 2, got %d" % self.k)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class WeightKernel:
    """Similarity kernel used to weight K-NN edges.

    variant "gaussian": w = exp(-|x_i - x_j|^2 / (sigma_i sigma_j)) with
    self-tuning scales, d = |x_i - x_j|.
    variant "cosine":   adjusted cosine similarity, sim = (cos + 1) / 2,
    w = sim, d = 1/sim - 1.
    variant "invdist":  w = 1 / d^(2 alpha), d = |x_i - x_j|, alpha >= 0.
    """

    variant: str
    k_sigma: int | None = None
    alpha: float = 1.0

    def __post_init__(self):
        if self.variant not in _KERNEL_VARIANTS:
            raise ValueError("unknown kernel variant %r" % (self.variant,))
        if self.k_sigma is not None and self.k_sigma < 1:
            raise ValueError("k_sigma must be >= 1")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError("alpha must be finite and >= 0")

    @classmethod
    def gaussian_self_tuning(cls, k_sigma: int | None = None) -> "WeightKernel":
        return cls("gaussian", k_sigma=k_sigma)

    @classmethod
    def cosine_adjusted(cls) -> "WeightKernel":
        return cls("cosine")

    @classmethod
    def inverse_distance(cls, alpha: float = 1.0) -> "WeightKernel":
        return cls("invdist", alpha=alpha)


@dataclass(frozen=True)
class Graph:
    """Immutable sparse undirected graph in CSR layout.

    Adjacency lists are sorted per node.  ``weights`` holds the similarity
    w_ij > 0, ``lengths`` the edge length d_ij > 0, aligned with ``indices``.
    ``degrees[i]`` is the sum of weights incident to node i.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    lengths: np.ndarray
    degrees: np.ndarray

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edge_weights(self, i: int) -> np.ndarray:
        return self.weights[self.indptr[i]:self.indptr[i + 1]]

    def edge_lengths(self, i: int) -> np.ndarray:
        return self.lengths[self.indptr[i]:self.indptr[i + 1]]

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return self.indices.size // 2

    def edges(self) -> Iterator[tuple[int, int, float, float]]:
        """Yield each undirected edge once as (i, j, w, d) with i < j."""
        for i in range(self.n):
            for a in range(self.indptr[i], self.indptr[i + 1]):
                j = int(self.indices[a])
                if i < j:
                    yield i, j, float(self.weights[a]), float(self.lengths[a])

    def validate(self) -> None:
        """Assert the structural invariants; raises ValueError on violation."""
        if self.indptr.shape != (self.n + 1,):
            raise ValueError("indptr has wrong shape")
        if self.indices.min(initial=0) < 0 or self.indices.max(initial=-1) >= self.n:
            raise ValueError("neighbor index out of range")
        for i in range(self.n):
            nbr = self.neighbors(i)
            if np.any(nbr == i):
                raise ValueError("self-loop at node %d" % i)
            if nbr.size > 1 and np.any(np.diff(nbr) <= 0):
                raise ValueError("adjacency list of node %d is not sorted unique" % i)
            # symmetry with exactly equal w and d
            for a in range(self.indptr[i], self.indptr[i + 1]):
                j = int(self.indices[a])
                back = np.searchsorted(self.neighbors(j), i)
                if back >= self.neighbors(j).size or self.neighbors(j)[back] != i:
                    raise ValueError("edge (%d, %d) is not symmetric" % (i, j))
                b = self.indptr[j] + back
                if self.weights[a] != self.weights[b] or self.lengths[a] != self.lengths[b]:
                    raise ValueError("asymmetric weight/length on edge (%d, %d)" % (i, j))
        if self.weights.size:
            if self.weights.min() <= 0 or self.weights.max() > W_MAX:
                raise ValueError("weights outside (0, W_MAX]")
            if self.lengths.min() < D_MIN or not np.all(np.isfinite(self.lengths)):
                raise ValueError("lengths outside [D_MIN, inf)")
        sums = np.zeros(self.n)
        np.add.at(sums, np.repeat(np.arange(self.n), np.diff(self.indptr)), self.weights)
        scale = np.maximum(np.abs(sums), 1.0)
        if np.any(np.abs(sums - self.degrees) > 1e-12 * scale):
            raise ValueError("degrees do not match incident weight sums")


def _clamp_edges(w: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.clip(w, W_MIN, W_MAX), np.maximum(d, D_MIN)


def _pair_values(kernel: WeightKernel, xi: np.ndarray, xj: np.ndarray,
                 sigma_i: np.ndarray, sigma_j: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (w, d) for rows of point pairs; shared by the scalar API
    and the graph builder so both produce bit-identical values."""
    diff = xi - xj
    d2 = np.einsum("ij,ij->i", diff, diff)
    if kernel.variant == "gaussian":
        d = np.sqrt(d2)
        w = np.exp(-d2 / (sigma_i * sigma_j))
    elif kernel.variant == "invdist":
        d = np.maximum(np.sqrt(d2), D_MIN)
        w = d ** (-2.0 * kernel.alpha)
    else:  # cosine
        ni = np.sqrt(np.einsum("ij,ij->i", xi, xi))
        nj = np.sqrt(np.einsum("ij,ij->i", xj, xj))
        if np.any(ni == 0) or np.any(nj == 0):
            raise ValueError("cosine kernel undefined for an all-zero feature vector")
        cos = np.einsum("ij,ij->i", xi, xj) / (ni * nj)
        sim = (cos + 1.0) / 2.0
        w = np.clip(sim, W_MIN, W_MAX)
        d = 1.0 / w - 1.0
    return _clamp_edges(w, d)


def kernel_weight(kernel: WeightKernel, x_i, x_j,
                  sigma_i: float = 1.0, sigma_j: float = 1.0) -> tuple[float, float]:
    """Similarity and distance for one point pair.

    The sigma arguments are the self-tuning scales and are only used by the
    gaussian variant.  Returns (w, d) with w in (0, W_MAX] and d >= D_MIN.
    """
    xi = np.atleast_2d(np.asarray(x_i, dtype=np.float64))
    xj = np.atleast_2d(np.asarray(x_j, dtype=np.float64))
    if xi.shape != xj.shape:
        raise ValueError("points must share a dimension")
    if kernel.variant == "gaussian" and (sigma_i <= 0 or sigma_j <= 0):
        raise ValueError("gaussian kernel needs positive scales")
    w, d = _pair_values(kernel, xi, xj, np.asarray([float(sigma_i)]),
                        np.asarray([float(sigma_j)]))
    return float(w[0]), float(d[0])


def _selection_distances(kernel: WeightKernel, X: np.ndarray) -> np.ndarray:
    """Full pairwise distance matrix in the kernel's metric, diag set to inf."""
    n = X.shape[0]
    if kernel.variant == "cosine":
        norms = np.sqrt(np.einsum("ij,ij->i", X, X))
        if np.any(norms == 0):
            raise ValueError("cosine kernel undefined for an all-zero feature vector")
        C = (X / norms[:, None]) @ (X / norms[:, None]).T
        sim = np.clip((C + 1.0) / 2.0, W_MIN, None)
        D = 1.0 / sim - 1.0
    else:
        sq = np.einsum("ij,ij->i", X, X)
        D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, np.inf)
    return D


def _assemble(n: int, ii: np.ndarray, jj: np.ndarray,
              w: np.ndarray, d: np.ndarray) -> Graph:
    """CSR graph from undirected edge representatives (ii < jj)."""
    rows = np.concatenate([ii, jj])
    cols = np.concatenate([jj, ii])
    ww = np.concatenate([w, w])
    dd = np.concatenate([d, d])
    order = np.lexsort((cols, rows))
    rows, cols, ww, dd = rows[order], cols[order], ww[order], dd[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    degrees = np.zeros(n)
    np.add.at(degrees, rows, ww)
    return Graph(n=n, indptr=indptr, indices=cols.astype(np.int64),
                 weights=ww, lengths=dd, degrees=degrees)


def knn_graph(data: Dataset, k: int, kernel: WeightKernel) -> Graph:
    """Symmetrized K-NN graph over the dataset.

    Each node selects its k nearest points under the kernel's distance
    (ties broken by lower index); the edge set is the union of the directed
    selections.  Neighbor search is exact brute force, O(n^2 d).
    """
    n = data.n
    if n < 2:
        raise ValueError("need at least 2 points to build a K-NN graph")
    if not 1 <= k <= n - 1:
        raise ValueError("k must satisfy 1 <= k <= n-1, got %d" % k)
    X = data.points
    D = _selection_distances(kernel, X)
    order = np.argsort(D, axis=1, kind="stable")
    sel = order[:, :k]

    if kernel.variant == "gaussian":
        # D holds squared Euclidean distances here; the self-tuning scale is
        # the plain distance to the k_sigma-th nearest neighbor.
        ks = kernel.k_sigma if kernel.k_sigma is not None else k
        if ks > n - 1:
            raise ValueError("k_sigma exceeds available neighbors")
        kth = order[:, ks - 1]
        sigma = np.sqrt(D[np.arange(n), kth])
        sigma = np.maximum(sigma, D_MIN)
    else:
        sigma = np.ones(n)

    src = np.repeat(np.arange(n), k)
    dst = sel.ravel()
    a = np.minimum(src, dst)
    b = np.maximum(src, dst)
    keys = np.unique(a.astype(np.int64) * n + b)
    ii = (keys // n).astype(np.int64)
    jj = (keys % n).astype(np.int64)

    w, d = _pair_values(kernel, X[ii], X[jj], sigma[ii], sigma[jj])
    return _assemble(n, ii, jj, w, d)


def grid_graph(m: int, stencil: int = 4) -> tuple[Graph, np.ndarray]:
    """Uniform m-by-m lattice over [-1, 1]^2.

    Node index iy * m + ix carries coordinates (x[ix], y[iy]).  Edge lengths
    are the Euclidean spacing and w = 1 / d^2.  ``stencil`` is 4 (axis
    neighbors) or 8 (axis plus diagonals).
    """
    if m < 3:
        raise ValueError("grid needs m >= 3")
    if stencil not in (4, 8):
        raise ValueError("stencil must be 4 or 8")
    vals = np.linspace(-1.0, 1.0, m)
    xs, ys = np.meshgrid(vals, vals)
    coords = np.column_stack([xs.ravel(), ys.ravel()])

    offsets = [(0, 1), (1, 0)]
    if stencil == 8:
        offsets += [(1, 1), (1, -1)]
    ii, jj, ww, dd = [], [], [], []
    for iy in range(m):
        for ix in range(m):
            i = iy * m + ix
            for oy, ox in offsets:
                ny, nx = iy + oy, ix + ox
                if 0 <= ny < m and 0 <= nx < m:
                    j = ny * m + nx
                    dx = vals[nx] - vals[ix]
                    dy = vals[ny] - vals[iy]
                    d2 = dx * dx + dy * dy
                    ii.append(min(i, j))
                    jj.append(max(i, j))
                    ww.append(1.0 / d2)
                    dd.append(np.sqrt(d2))
    g = _assemble(m * m, np.asarray(ii, dtype=np.int64), np.asarray(jj, dtype=np.int64),
                  np.asarray(ww), np.asarray(dd))
    return g, coords


def graph_from_edges(n: int, edges) -> Graph:
    """Graph from an iterable of (i, j, w, d) undirected edge tuples."""
    if n < 1:
        raise ValueError("graph needs n >= 1 nodes")
    rows = list(edges)
    if rows:
        arr = np.asarray([(i, j) for i, j, _, _ in rows], dtype=np.int64)
        ii, jj = np.minimum(arr[:, 0], arr[:, 1]), np.maximum(arr[:, 0], arr[:, 1])
        w = np.asarray([e[2] for e in rows], dtype=np.float64)
        d = np.asarray([e[3] for e in rows], dtype=np.float64)
    else:
        ii = jj = np.zeros(0, dtype=np.int64)
        w = d = np.zeros(0)
    if rows:
        if ii.min() < 0 or jj.max() >= n:
            raise ValueError("edge endpoint out of range")
        if np.any(ii == jj):
            raise ValueError("self-loops are not allowed")
        keys = ii * n + jj
        if np.unique(keys).size != keys.size:
            raise ValueError("duplicate edge")
        if w.min() <= 0 or w.max() > W_MAX:
            raise ValueError("edge weight outside (0, W_MAX]")
        if d.min() < D_MIN or not np.all(np.isfinite(d)):
            raise ValueError("edge length outside [D_MIN, inf)")
    return _assemble(n, ii, jj, w, d)


def write_edge_list(g: Graph, path) -> None:
    """Write the edge-list text format: header ``#nodes=n`` then one
    ``i,j,w,d`` line per undirected edge with i < j, 17 significant digits."""
    lines = ["#nodes=%d" % g.n]
    for i, j, w, d in g.edges():
        lines.append("%d,%d,%.17g,%.17g" % (i, j, w, d))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edge_list(path) -> Graph:
    """Inverse of :func:`write_edge_list`; round-trips bit-exactly."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("#nodes="):
        raise ValueError("edge list must start with a '#nodes=<n>' header")
    n = int(lines[0][len("#nodes="):])
    edges = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise ValueError("malformed edge line: %r" % ln)
        edges.append((int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])))
    return graph_from_edges(n, edges)
