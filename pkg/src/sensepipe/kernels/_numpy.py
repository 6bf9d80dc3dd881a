"""Vectorized numpy implementations of the hot kernels.

Every function here has a twin in ``_jit`` with the same signature and
semantics. Recurrent kernels take time-major arrays: ``(T, B, ...)``.
"""
import numpy as np

ACTIVE, RESOLVED, REMOVED = 0, 1, 2


def disambiguation_loop(indptr, indices, node_span, node_prio, ov_ptr, ov_idx,
                        sn_ptr, sn_idx, n_spans, threshold):
    n = node_span.shape[0]
    deg = np.diff(indptr).astype(np.int64)
    state = np.zeros(n, dtype=np.int8)
    order = np.empty(n_spans, dtype=np.int64)
    degrees = np.empty(n_spans, dtype=np.int64)
    k = 0
    iterations = 0
    stopped = False
    for _ in range(n_spans):
        iterations += 1
        live = np.flatnonzero(state == ACTIVE)
        if live.size == 0:
            break
        d = deg[live]
        tied = live[d == d.max()]
        best = tied[np.argmin(node_prio[tied])]
        if deg[best] < threshold:
            stopped = True
            break
        order[k] = best
        degrees[k] = deg[best]
        k += 1
        state[best] = RESOLVED
        span = node_span[best]
        spans = ov_idx[ov_ptr[span]:ov_ptr[span + 1]]
        doomed = np.concatenate([sn_idx[sn_ptr[s]:sn_ptr[s + 1]] for s in spans])
        doomed = doomed[state[doomed] == ACTIVE]
        state[doomed] = REMOVED
        if doomed.size:
            nbrs = np.concatenate([indices[indptr[u]:indptr[u + 1]] for u in doomed])
            nbrs = nbrs[state[nbrs] != REMOVED]
            np.subtract.at(deg, nbrs, 1)
    return order[:k], degrees[:k], stopped, iterations


def im2col(X, h):
    """(B, L, d) -> (B, L-h+1, h*d) sliding windows."""
    B, L, d = X.shape
    win = np.lib.stride_tricks.sliding_window_view(X, h, axis=1)  # (B, n, d, h)
    return np.ascontiguousarray(win.transpose(0, 1, 3, 2)).reshape(B, L - h + 1, h * d)


def col2im(dcols, h, L):
    """Adjoint of :func:`im2col`: scatter-add window gradients back to positions."""
    B, n, hd = dcols.shape
    d = hd // h
    dX = np.zeros((B, L, d))
    dc = dcols.reshape(B, n, h, d)
    for k in range(h):
        dX[:, k:k + n] += dc[:, :, k]
    return dX


def pool_forward(M, chunk):
    """Max over non-overlapping chunks of ``chunk`` positions.

    Returns pooled ``(B, T, F)`` and the absolute argmax positions.
    """
    B, n, F = M.shape
    T = -(-n // chunk)
    padded = np.full((B, T * chunk, F), -np.inf)
    padded[:, :n] = M
    r = padded.reshape(B, T, chunk, F)
    arg = r.argmax(axis=2)
    G = np.take_along_axis(r, arg[:, :, None, :], axis=2)[:, :, 0, :]
    return G, arg + (np.arange(T) * chunk)[None, :, None]


def pool_backward(dG, idx, n):
    B, T, F = dG.shape
    dM = np.zeros((B, n, F))
    # chunks are disjoint, so each (b, position, f) receives at most one value
    dM[np.arange(B)[:, None, None], idx, np.arange(F)[None, None, :]] = dG
    return dM


def scatter_rows(ids, grads, n_rows):
    """Sum ``grads[b, l]`` into row ``ids[b, l]`` of a ``(n_rows, d)`` matrix."""
    out = np.zeros((n_rows, grads.shape[-1]))
    np.add.at(out, ids.ravel(), grads.reshape(-1, grads.shape[-1]))
    return out


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def lstm_forward(xa, Uh):
    """Run the recurrence given precomputed input projections.

    ``xa`` is ``(T, B, 4H)`` = W g_t + b with gate blocks ordered forget,
    input, output, candidate. Returns hidden ``(T+1, B, H)``, cell
    ``(T+1, B, H)`` (index 0 holds the zero initial state) and activated
    gates ``(T, B, 4H)``.
    """
    T, B, H4 = xa.shape
    H = H4 // 4
    hs = np.zeros((T + 1, B, H))
    cs = np.zeros((T + 1, B, H))
    gates = np.empty((T, B, H4))
    for t in range(T):
        a = xa[t] + hs[t] @ Uh
        sg = _sigmoid(a[:, :3 * H])
        u = np.tanh(a[:, 3 * H:])
        c = sg[:, :H] * cs[t] + sg[:, H:2 * H] * u
        cs[t + 1] = c
        hs[t + 1] = sg[:, 2 * H:] * np.tanh(c)
        gates[t, :, :3 * H] = sg
        gates[t, :, 3 * H:] = u
    return hs, cs, gates


def lstm_backward(dh_last, Uh, hs, cs, gates):
    """Backprop through time from a gradient on the final hidden state.

    Returns ``da`` ``(T, B, 4H)``: gradients on the gate pre-activations.
    Parameter gradients follow from ``da`` with two matmuls in the caller.
    """
    T, B, H4 = gates.shape
    H = H4 // 4
    da = np.empty((T, B, H4))
    dh = dh_last.copy()
    dc = np.zeros((B, H))
    for t in range(T - 1, -1, -1):
        g = gates[t]
        f, i, o, u = g[:, :H], g[:, H:2 * H], g[:, 2 * H:3 * H], g[:, 3 * H:]
        tc = np.tanh(cs[t + 1])
        dc = dc + dh * o * (1.0 - tc * tc)
        da[t, :, :H] = dc * cs[t] * f * (1.0 - f)
        da[t, :, H:2 * H] = dc * u * i * (1.0 - i)
        da[t, :, 2 * H:3 * H] = dh * tc * o * (1.0 - o)
        da[t, :, 3 * H:] = dc * i * (1.0 - u * u)
        dh = da[t] @ Uh.T
        dc = dc * f
    return da
