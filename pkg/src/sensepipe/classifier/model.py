"""Embedding -> dropout -> convolution/ReLU -> chunked max pooling -> LSTM -> softmax.

Parameters live in a plain ``dict[str, ndarray]`` keyed by ``PARAM_NAMES``.
LSTM weights follow the gate equations with ``W_*`` of shape ``(H, F)``
applied to the pooled features and ``U_*`` of shape ``(H, H)`` applied to
the previous hidden state; the candidate cell has no bias.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from .config import GLOBAL, ClassifierConfig
from .vocab import PAD, Vocabulary

GATES = ("f", "i", "o", "c")
PARAM_NAMES = (
    "embedding", "conv_filters", "conv_bias",
    "lstm_W_f", "lstm_W_i", "lstm_W_o", "lstm_W_c",
    "lstm_U_f", "lstm_U_i", "lstm_U_o", "lstm_U_c",
    "lstm_b_f", "lstm_b_i", "lstm_b_o",
    "out_W", "out_b",
)

Params = dict[str, np.ndarray]


def param_shapes(config: ClassifierConfig, vocab_size: int) -> dict[str, tuple[int, ...]]:
    d, F, h, H, C = config.dimension, config.num_filters, config.window, config.lstm_hidden, config.num_classes
    shapes = {"embedding": (vocab_size, d), "conv_filters": (F, h, d), "conv_bias": (F,)}
    for g in GATES:
        shapes[f"lstm_W_{g}"] = (H, F)
        shapes[f"lstm_U_{g}"] = (H, H)
    for g in GATES[:3]:
        shapes[f"lstm_b_{g}"] = (H,)
    shapes["out_W"] = (H, C)
    shapes["out_b"] = (C,)
    return {k: shapes[k] for k in PARAM_NAMES}


def init_params(config: ClassifierConfig, vocab_size: int, rng: np.random.Generator,
                pretrained=None, vocab: Vocabulary | None = None) -> Params:
    """Uniform(-scale, scale) weights, zero biases, zero padding row.

    With ``pretrained`` (an embedding table) and ``vocab``, rows of tokens
    found in the table are overwritten with their pre-trained vectors.
    """
    s = config.init_scale
    params = {}
    for name, shape in param_shapes(config, vocab_size).items():
        if name == "conv_bias" or name.startswith(("lstm_b_", "out_b")):
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.uniform(-s, s, size=shape)
    if pretrained is not None:
        if vocab is None:
            raise ValueError("pretrained initialization needs the vocabulary")
        if pretrained.dimension != config.dimension:
            raise ValueError(f"pretrained vectors have dimension {pretrained.dimension}, "
                             f"classifier expects {config.dimension}")
        for i, tok in enumerate(vocab.tokens):
            vec = pretrained.get(tok)
            if vec is not None:
                params["embedding"][i] = vec
    params["embedding"][PAD] = 0.0
    return params


def zero_params(config: ClassifierConfig, vocab_size: int) -> Params:
    return {k: np.zeros(v) for k, v in param_shapes(config, vocab_size).items()}


def _pack_lstm(p: Params):
    Wx = np.ascontiguousarray(np.concatenate([p[f"lstm_W_{g}"] for g in GATES]).T)
    Uh = np.ascontiguousarray(np.concatenate([p[f"lstm_U_{g}"] for g in GATES]).T)
    H = Uh.shape[0]
    bias = np.concatenate([p["lstm_b_f"], p["lstm_b_i"], p["lstm_b_o"], np.zeros(H)])
    return Wx, Uh, bias


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


@dataclass
class Cache:
    ids: np.ndarray
    mask: np.ndarray | None
    cols: np.ndarray
    Z: np.ndarray
    pool_idx: np.ndarray
    G_t: np.ndarray        # pooled features, time-major (T, B, F)
    hs: np.ndarray
    cs: np.ndarray
    gates: np.ndarray
    log_probs: np.ndarray


def forward(params: Params, ids: np.ndarray, config: ClassifierConfig, train: bool = False,
            rng: np.random.Generator | None = None, mask: np.ndarray | None = None):
    """Class probabilities for a batch of encoded documents.

    ``ids`` is ``(B, L)`` (or ``(L,)`` for one document). In training mode
    inverted dropout is applied to the embeddings, drawing the mask from
    ``rng`` unless an explicit ``mask`` is supplied.
    """
    ids = np.ascontiguousarray(np.atleast_2d(ids), dtype=np.int64)
    B, L = ids.shape
    filters = params["conv_filters"]
    F, h, d = filters.shape
    if L < h:
        raise ValueError(f"document length {L} is shorter than the filter window {h}")

    X = params["embedding"][ids]
    if train and mask is None and config.dropout > 0.0:
        if rng is None:
            raise ValueError("training-mode dropout needs an rng")
        keep = 1.0 - config.dropout
        mask = (rng.random(X.shape) < keep) / keep
    if not train:
        mask = None
    if mask is not None:
        X = X * mask

    cols = kernels.im2col(np.ascontiguousarray(X), h)
    Z = cols @ filters.reshape(F, h * d).T + params["conv_bias"]
    M = np.maximum(Z, 0.0)
    n = M.shape[1]
    chunk = n if config.pool_chunk == GLOBAL else config.pool_chunk
    G, pool_idx = kernels.pool_forward(np.ascontiguousarray(M), chunk)

    Wx, Uh, bias = _pack_lstm(params)
    G_t = np.ascontiguousarray(G.transpose(1, 0, 2))
    hs, cs, gates = kernels.lstm_forward(np.ascontiguousarray(G_t @ Wx + bias), Uh)
    logits = hs[-1] @ params["out_W"] + params["out_b"]
    log_probs = log_softmax(logits)
    return np.exp(log_probs), Cache(ids, mask, cols, Z, pool_idx, G_t, hs, cs, gates, log_probs)


def loss_and_grads(params: Params, ids: np.ndarray, labels: np.ndarray, config: ClassifierConfig,
                   train: bool = False, rng: np.random.Generator | None = None,
                   mask: np.ndarray | None = None) -> tuple[float, Params]:
    """Mean cross-entropy over the batch and its exact gradient for every tensor."""
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    probs, c = forward(params, ids, config, train=train, rng=rng, mask=mask)
    B = probs.shape[0]
    loss = float(-c.log_probs[np.arange(B), labels].mean())

    grads: Params = {}
    dlogits = probs.copy()
    dlogits[np.arange(B), labels] -= 1.0
    dlogits /= B
    h_last = c.hs[-1]
    grads["out_W"] = h_last.T @ dlogits
    grads["out_b"] = dlogits.sum(axis=0)

    Wx, Uh, _ = _pack_lstm(params)
    H = Uh.shape[0]
    da = kernels.lstm_backward(np.ascontiguousarray(dlogits @ params["out_W"].T), Uh, c.hs, c.cs, c.gates)
    dWx = np.einsum("tbf,tbk->fk", c.G_t, da)
    dUh = np.einsum("tbh,tbk->hk", c.hs[:-1], da)
    db = da.sum(axis=(0, 1))
    for k, g in enumerate(GATES):
        grads[f"lstm_W_{g}"] = dWx[:, k * H:(k + 1) * H].T.copy()
        grads[f"lstm_U_{g}"] = dUh[:, k * H:(k + 1) * H].T.copy()
        if g != "c":
            grads[f"lstm_b_{g}"] = db[k * H:(k + 1) * H].copy()
    dG = np.ascontiguousarray((da @ Wx.T).transpose(1, 0, 2))

    filters = params["conv_filters"]
    F, h, d = filters.shape
    n = c.Z.shape[1]
    dZ = kernels.pool_backward(dG, c.pool_idx, n) * (c.Z > 0.0)
    dZ2 = dZ.reshape(-1, F)
    grads["conv_filters"] = (dZ2.T @ c.cols.reshape(-1, h * d)).reshape(F, h, d)
    grads["conv_bias"] = dZ2.sum(axis=0)
    dX = kernels.col2im(np.ascontiguousarray(dZ @ filters.reshape(F, h * d)), h, c.ids.shape[1])
    if c.mask is not None:
        dX = dX * c.mask
    dE = kernels.scatter_rows(c.ids, np.ascontiguousarray(dX), params["embedding"].shape[0])
    dE[PAD] = 0.0
    grads["embedding"] = dE
    return loss, {k: grads[k] for k in PARAM_NAMES}


def predict_proba(params: Params, ids: np.ndarray, config: ClassifierConfig) -> np.ndarray:
    probs, _ = forward(params, ids, config, train=False)
    return probs


def predict(params: Params, ids: np.ndarray, config: ClassifierConfig) -> np.ndarray:
    """Arg-max class per document; ties go to the smaller class index."""
    return np.argmax(predict_proba(params, ids, config), axis=1)
