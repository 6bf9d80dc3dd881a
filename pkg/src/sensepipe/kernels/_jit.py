"""numba-compiled twins of the kernels in ``_numpy``."""
import numpy as np
from numba import njit

# Vectorized numpy already wins for these two (strided copy; SIMD tanh over
# whole gate blocks), as measured by benchmarks/bench_kernels.py.
from ._numpy import im2col, lstm_forward  # noqa: F401

ACTIVE, RESOLVED, REMOVED = 0, 1, 2

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def disambiguation_loop(indptr, indices, node_span, node_prio, ov_ptr, ov_idx,
                        sn_ptr, sn_idx, n_spans, threshold):
    n = node_span.shape[0]
    deg = np.empty(n, dtype=np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    state = np.zeros(n, dtype=np.int8)
    order = np.empty(n_spans, dtype=np.int64)
    degrees = np.empty(n_spans, dtype=np.int64)
    k = 0
    iterations = 0
    stopped = False
    for _ in range(n_spans):
        iterations += 1
        best = -1
        for v in range(n):
            if state[v] != ACTIVE:
                continue
            if best < 0 or deg[v] > deg[best] or (deg[v] == deg[best] and node_prio[v] < node_prio[best]):
                best = v
        if best < 0:
            break
        if deg[best] < threshold:
            stopped = True
            break
        order[k] = best
        degrees[k] = deg[best]
        k += 1
        state[best] = RESOLVED
        span = node_span[best]
        # mark first, then decrement survivors, so edges inside the doomed set are ignored
        for j in range(ov_ptr[span], ov_ptr[span + 1]):
            s = ov_idx[j]
            for q in range(sn_ptr[s], sn_ptr[s + 1]):
                u = sn_idx[q]
                if state[u] == ACTIVE:
                    state[u] = 3
        for j in range(ov_ptr[span], ov_ptr[span + 1]):
            s = ov_idx[j]
            for q in range(sn_ptr[s], sn_ptr[s + 1]):
                u = sn_idx[q]
                if state[u] != 3:
                    continue
                state[u] = REMOVED
                for e in range(indptr[u], indptr[u + 1]):
                    w = indices[e]
                    if state[w] == ACTIVE or state[w] == RESOLVED:
                        deg[w] -= 1
    return order[:k], degrees[:k], stopped, iterations


@njit(**_opts)
def col2im(dcols, h, L):
    B, n, hd = dcols.shape
    d = hd // h
    dX = np.zeros((B, L, d))
    for b in range(B):
        for i in range(n):
            for k in range(h):
                for j in range(d):
                    dX[b, i + k, j] += dcols[b, i, k * d + j]
    return dX


@njit(**_opts)
def pool_forward(M, chunk):
    B, n, F = M.shape
    T = (n + chunk - 1) // chunk
    G = np.empty((B, T, F))
    idx = np.empty((B, T, F), dtype=np.int64)
    for b in range(B):
        for t in range(T):
            lo = t * chunk
            hi = min(lo + chunk, n)
            for f in range(F):
                best = lo
                for p in range(lo + 1, hi):
                    if M[b, p, f] > M[b, best, f]:
                        best = p
                G[b, t, f] = M[b, best, f]
                idx[b, t, f] = best
    return G, idx


@njit(**_opts)
def pool_backward(dG, idx, n):
    B, T, F = dG.shape
    dM = np.zeros((B, n, F))
    for b in range(B):
        for t in range(T):
            for f in range(F):
                dM[b, idx[b, t, f], f] += dG[b, t, f]
    return dM


@njit(**_opts)
def scatter_rows(ids, grads, n_rows):
    B, L = ids.shape
    d = grads.shape[2]
    out = np.zeros((n_rows, d))
    for b in range(B):
        for l in range(L):
            r = ids[b, l]
            for j in range(d):
                out[r, j] += grads[b, l, j]
    return out


@njit(**_opts)
def lstm_backward(dh_last, Uh, hs, cs, gates):
    T, B, H4 = gates.shape
    H = H4 // 4
    da = np.empty((T, B, H4))
    dh = dh_last.copy()
    dc = np.zeros((B, H))
    UhT = np.ascontiguousarray(Uh.T)
    for t in range(T - 1, -1, -1):
        for b in range(B):
            for j in range(H):
                f = gates[t, b, j]
                i = gates[t, b, H + j]
                o = gates[t, b, 2 * H + j]
                u = gates[t, b, 3 * H + j]
                tc = np.tanh(cs[t + 1, b, j])
                dcj = dc[b, j] + dh[b, j] * o * (1.0 - tc * tc)
                da[t, b, j] = dcj * cs[t, b, j] * f * (1.0 - f)
                da[t, b, H + j] = dcj * u * i * (1.0 - i)
                da[t, b, 2 * H + j] = dh[b, j] * tc * o * (1.0 - o)
                da[t, b, 3 * H + j] = dcj * i * (1.0 - u * u)
                dc[b, j] = dcj * f
        dh = np.dot(da[t], UhT)
    return da
