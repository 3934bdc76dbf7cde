"""Compiled inner loops for the iterative solvers.

Everything here takes raw CSR arrays so numba can specialize once and the
public modules stay plain Python.  Sweeps mutate u in place and return the
sup-norm of the change; residual helpers never mutate.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def lipschitz_sweep(indptr, indices, d, u, order):
    # One Gauss-Seidel pass of u_i <- (d_is u_r + d_ir u_s)/(d_ir + d_is)
    # where (r, s) maximizes |u_r - u_s| / (d_ir + d_is) over neighbor pairs,
    # r = s allowed, first strict maximum in lexicographic (r, s) order wins.
    max_change = 0.0
    for t in range(order.size):
        i = order[t]
        s0 = indptr[i]
        s1 = indptr[i + 1]
        if s0 == s1:
            continue
        best = -1.0
        br = s0
        bs = s0
        for a in range(s0, s1):
            ua = u[indices[a]]
            da = d[a]
            for b in range(a, s1):
                v = abs(ua - u[indices[b]]) / (da + d[b])
                if v > best:
                    best = v
                    br = a
                    bs = b
        dr = d[br]
        ds = d[bs]
        new = (ds * u[indices[br]] + dr * u[indices[bs]]) / (dr + ds)
        ch = abs(new - u[i])
        if ch > max_change:
            max_change = ch
        u[i] = new
    return max_change


@njit(cache=True, nogil=True)
def evolution_step(indptr, indices, sqw, u, unew, order, dt):
    # Explicit Euler step of the infinity-Laplacian flow, Jacobi style:
    # all updates read the old field u and write unew.  Entries of unew not
    # listed in order must already equal u.
    max_delta = 0.0
    for t in range(order.size):
        i = order[t]
        up = 0.0
        down = 0.0
        for a in range(indptr[i], indptr[i + 1]):
            v = sqw[a] * (u[indices[a]] - u[i])
            if v > up:
                up = v
            if -v > down:
                down = -v
        delta = 0.5 * dt * (up - down)
        unew[i] = u[i] + delta
        ad = abs(delta)
        if ad > max_delta:
            max_delta = ad
    return max_delta


@njit(cache=True, nogil=True)
def laplace_sweep(indptr, indices, w, deg, u, order):
    # Gauss-Seidel pass of u_i <- sum_j w_ij u_j / deg_i.
    max_change = 0.0
    for t in range(order.size):
        i = order[t]
        acc = 0.0
        for a in range(indptr[i], indptr[i + 1]):
            acc += w[a] * u[indices[a]]
        new = acc / deg[i]
        ch = abs(new - u[i])
        if ch > max_change:
            max_change = ch
        u[i] = new
    return max_change


@njit(cache=True, nogil=True)
def laplace_residual(indptr, indices, w, deg, u, order):
    # sup_i |deg_i u_i - sum_j w_ij u_j| over the given nodes.
    worst = 0.0
    for t in range(order.size):
        i = order[t]
        acc = 0.0
        for a in range(indptr[i], indptr[i + 1]):
            acc += w[a] * u[indices[a]]
        r = abs(deg[i] * u[i] - acc)
        if r > worst:
            worst = r
    return worst


@njit(cache=True, nogil=True)
def _plap_derivative(indices, wq, u, s0, s1, t, p):
    # Scaled evaluation of sum_j w^(p/2) |t - u_j|^(p-2) (t - u_j), with
    # wq = w^(p / (2 (p-1))) precomputed so each term is (wq |t - u_j|)^(p-1).
    # Dividing through by the largest term magnitude keeps the powers finite
    # for p as large as 100; only the sign of the result is consumed.
    scale = 0.0
    for a in range(s0, s1):
        m = wq[a] * abs(t - u[indices[a]])
        if m > scale:
            scale = m
    if scale == 0.0:
        return 0.0
    acc = 0.0
    for a in range(s0, s1):
        diff = t - u[indices[a]]
        m = (wq[a] * abs(diff) / scale) ** (p - 1.0)
        acc += m if diff > 0.0 else -m
    return acc


@njit(cache=True, nogil=True)
def plaplace_sweep(indptr, indices, wq, u, order, p, xtol):
    # Coordinate descent on the p-Dirichlet energy: per node, bisection on
    # the monotone derivative down to an interval of width xtol.
    max_change = 0.0
    for t in range(order.size):
        i = order[t]
        s0 = indptr[i]
        s1 = indptr[i + 1]
        if s0 == s1:
            continue
        lo = u[indices[s0]]
        hi = lo
        for a in range(s0 + 1, s1):
            v = u[indices[a]]
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        if hi - lo <= 0.0:
            new = lo
        else:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if _plap_derivative(indices, wq, u, s0, s1, mid, p) > 0.0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo <= xtol:
                    break
            new = 0.5 * (lo + hi)
        ch = abs(new - u[i])
        if ch > max_change:
            max_change = ch
        u[i] = new
    return max_change


@njit(cache=True, nogil=True)
def plaplace_log_residual(indptr, indices, wq, u, order, p):
    # max_i log |p-Laplacian at i|, computed in log space so p = 100 does
    # not overflow.  Returns -inf-like value when every residual is 0.
    worst = -1e300
    for t in range(order.size):
        i = order[t]
        s0 = indptr[i]
        s1 = indptr[i + 1]
        scale = 0.0
        for a in range(s0, s1):
            m = wq[a] * abs(u[i] - u[indices[a]])
            if m > scale:
                scale = m
        if scale == 0.0:
            continue
        acc = 0.0
        for a in range(s0, s1):
            diff = u[i] - u[indices[a]]
            m = (wq[a] * abs(diff) / scale) ** (p - 1.0)
            acc += m if diff > 0.0 else -m
        if acc != 0.0:
            r = (p - 1.0) * np.log(scale) + np.log(abs(acc))
            if r > worst:
                worst = r
    return worst


@njit(cache=True, nogil=True)
def poisson_iterate(indptr, indices, w, deg, B, u, r, tol_abs, max_iter):
    # Fixed point u <- u + D^-1 (B - L u) from u = 0, each sweep followed by
    # removing the degree-weighted mean per column.  Returns (iterations,
    # residual, converged) with residual = sup |B - L u|.
    n, k = u.shape
    sum_deg = 0.0
    for i in range(n):
        sum_deg += deg[i]
    it = 0
    while True:
        resid = 0.0
        for i in range(n):
            for c in range(k):
                r[i, c] = B[i, c] - deg[i] * u[i, c]
            for a in range(indptr[i], indptr[i + 1]):
                j = indices[a]
                wa = w[a]
                for c in range(k):
                    r[i, c] += wa * u[j, c]
            for c in range(k):
                av = abs(r[i, c])
                if av > resid:
                    resid = av
        if resid <= tol_abs or it >= max_iter:
            return it, resid, resid <= tol_abs
        for i in range(n):
            for c in range(k):
                u[i, c] += r[i, c] / deg[i]
        for c in range(k):
            s = 0.0
            for i in range(n):
                s += deg[i] * u[i, c]
            shift = s / sum_deg
            for i in range(n):
                u[i, c] -= shift
        it += 1


@njit(cache=True, nogil=True)
def max_pair_sum(indptr, sqw, n):
    # max over nodes of (largest + second largest) incident sqrt-weight;
    # degree-1 nodes contribute their single value.
    out = 0.0
    for i in range(n):
        top1 = 0.0
        top2 = 0.0
        for a in range(indptr[i], indptr[i + 1]):
            v = sqw[a]
            if v > top1:
                top2 = top1
                top1 = v
            elif v > top2:
                top2 = v
        s = top1 + top2
        if s > out:
            out = s
    return out
