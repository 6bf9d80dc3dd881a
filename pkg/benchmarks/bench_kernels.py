"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--batch 32] [--doc-len 400]

Times each kernel at the default classifier scale, one full
forward/backward training step, and semantification of a long synthetic
document. Every timing is the best of ``--repeat`` runs after a warm-up
call, so numba compilation is excluded.
"""
import argparse
import timeit
from contextlib import contextmanager

import numpy as np

from sensepipe import kernels
from sensepipe.classifier import ClassifierConfig, init_params, loss_and_grads
from sensepipe.disambiguate import build_graph, disambiguate
from sensepipe.preprocess import preprocess
from sensepipe.synthetic import make_ambiguity_corpus


@contextmanager
def backend(name):
    impl = kernels.get_backend(name)
    saved = {k: getattr(kernels, k) for k in kernels.KERNELS}
    for k in kernels.KERNELS:
        setattr(kernels, k, getattr(impl, k))
    try:
        yield impl
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


def best_of(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def cases(args):
    rng = np.random.default_rng(0)
    cfg = ClassifierConfig(max_doc_len=args.doc_len, batch_size=args.batch)
    B, L, d, h, F, H = args.batch, cfg.max_doc_len, cfg.dimension, cfg.window, cfg.num_filters, cfg.lstm_hidden
    n = cfg.n_positions
    X = rng.normal(size=(B, L, d))
    dcols = rng.normal(size=(B, n, h * d))
    M = rng.normal(size=(B, n, F))
    G, idx = kernels.get_backend("numpy").pool_forward(M, cfg.pool_chunk)
    T = G.shape[1]
    xa = rng.normal(size=(T, B, 4 * H))
    Uh = rng.normal(size=(H, 4 * H)) * 0.1
    hs, cs, gates = kernels.get_backend("numpy").lstm_forward(xa, Uh)
    dh = rng.normal(size=(B, H))
    ids = rng.integers(0, 5000, size=(B, L))
    dX = rng.normal(size=(B, L, d))

    params = init_params(cfg, 5000, rng)
    labels = rng.integers(0, 2, size=B)
    step_rng = np.random.default_rng(1)

    net, docs = make_ambiguity_corpus(n_docs=1, doc_len=args.doc_len, n_groups=12, group_size=6,
                                      mentions=20, seed=0)
    _, spans = preprocess(docs[0][1], net)
    graph = build_graph(spans, net)

    return [
        ("im2col", lambda k: k.im2col(X, h)),
        ("col2im", lambda k: k.col2im(dcols, h, L)),
        ("pool_forward", lambda k: k.pool_forward(M, cfg.pool_chunk)),
        ("pool_backward", lambda k: k.pool_backward(G, idx, n)),
        ("scatter_rows", lambda k: k.scatter_rows(ids, dX, 5000)),
        ("lstm_forward", lambda k: k.lstm_forward(xa, Uh)),
        ("lstm_backward", lambda k: k.lstm_backward(dh, Uh, hs, cs, gates)),
        ("training step", lambda k: loss_and_grads(params, ids, labels, cfg, train=True, rng=step_rng)),
        (f"disambiguate ({len(graph)} nodes)", lambda k: disambiguate(graph, 0.0)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--doc-len", type=int, default=400)
    args = parser.parse_args(argv)

    rows = []
    for label, fn in cases(args):
        times = {}
        for name in ("numpy", "numba"):
            with backend(name) as impl:
                times[name] = best_of(lambda: fn(impl), args.repeat)
        rows.append((label, times["numpy"], times["numba"]))

    print(f"batch={args.batch} doc_len={args.doc_len} repeat={args.repeat}")
    print(f"{'case':<28}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for label, t_np, t_nb in rows:
        print(f"{label:<28}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
