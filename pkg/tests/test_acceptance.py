"""End-to-end acceptance criteria. Each test prints one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from conftest import OASIS, write
from oracles import brute_force_disambiguation, max_relative_error, numeric_grad, random_instance
from sensepipe import oasis_network_path
from sensepipe.classifier import GLOBAL, PARAM_NAMES, ClassifierConfig, dump_params, init_params, loss_and_grads, train
from sensepipe.cli import main
from sensepipe.disambiguate import build_graph, disambiguate
from sensepipe.embeddings import EmbeddingTable, decayed_bias_vector
from sensepipe.harness import DEFAULT_THETA_GRID, ExperimentConfig, LabeledCorpus, kfold_split, run_experiment
from sensepipe.preprocess import preprocess
from sensepipe.synthetic import make_ambiguity_corpus


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


def test_figure2_walkthrough(report, oasis_net):
    t0 = time.perf_counter()
    _, spans = preprocess(OASIS, oasis_net)
    res = disambiguate(build_graph(spans, oasis_net), 0.5)
    elapsed = time.perf_counter() - t0
    got = [(s.key.lemma, sense, d) for s, sense, d in res.order]
    want = [("oasis", "oasis#band", 3), ("rock band", "rock_band#music", 2), ("manchester", "manchester#city", 1)]
    report(1, got == want and len(spans) == 5 and elapsed < 1.0, f"order {got}, {elapsed:.3f}s")


def test_bruteforce_equivalence(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        net, spans = random_instance(rng, max_nodes=30, max_spans=10)
        theta = float(rng.uniform(0, 3))
        res = disambiguate(build_graph(spans, net), theta)
        ref, degs, iters, stopped = brute_force_disambiguation(spans, net, theta)
        resolved_spans = {s for s, _ in ref}
        same = (list(res.resolved.items()) == ref and res.degrees == degs and res.iterations == iters
                and res.stopped_by_threshold == stopped
                and res.unresolved == [s for s in spans if s not in resolved_spans])
        mismatches += not same
    elapsed = time.perf_counter() - t0
    report(2, mismatches == 0 and elapsed < 10.0, f"{mismatches} mismatches over 500 graphs, {elapsed:.2f}s")


def test_theta_monotonicity(report):
    rng = np.random.default_rng(99)
    violations = 0
    for _ in range(200):
        net, spans = random_instance(rng)
        t1, t2 = sorted(rng.uniform(0, 3, size=2))
        if t1 == t2:
            t2 += 0.1
        g = build_graph(spans, net)
        lo = list(disambiguate(g, t1).resolved.items())
        hi = list(disambiguate(g, t2).resolved.items())
        violations += not (set(hi) <= set(lo) and hi == lo[:len(hi)])
    report(3, violations == 0, f"{violations} violations over 200 pairs")


def test_decay_composition(report):
    v = np.array([1.0, 0.0])
    single = decayed_bias_vector(EmbeddingTable(2, ["w1"], [v]), ["w1"], 5.0)
    err1 = max_relative_error(single, math.exp(-0.2) * v, floor=1e-300)
    rng = np.random.default_rng(0)
    vecs = rng.normal(size=(6, 4))
    table = EmbeddingTable(4, [f"b{i}" for i in range(6)], vecs)
    limit = decayed_bias_vector(table, table.keys, 1e9)
    err2 = float(np.max(np.abs(limit - vecs.mean(axis=0)) / np.abs(vecs.mean(axis=0))))
    report(4, err1 < 1e-9 and err2 < 1e-6, f"single-word rel err {err1:.2e}, large-delta rel err {err2:.2e}")


def test_gradient_check(report):
    t0 = time.perf_counter()
    worst, norm_err = {}, 0.0
    for pool in (GLOBAL, 3):
        cfg = ClassifierConfig(num_classes=2, dimension=8, num_filters=4, window=3, pool_chunk=pool,
                               lstm_hidden=8, max_doc_len=12, dropout=0.5)
        rng = np.random.default_rng(11)
        p = init_params(cfg, 12, rng)
        for k in p:
            p[k] = rng.normal(0, 0.5, p[k].shape)
        p["embedding"][0] = 0.0
        ids = rng.integers(1, 12, size=(3, 12))
        ids[2, 9:] = 0
        y = np.array([0, 1, 1])
        mask = (rng.random((3, 12, 8)) < 0.5) / 0.5

        def loss():
            return loss_and_grads(p, ids, y, cfg, train=True, mask=mask)[0]

        grads = loss_and_grads(p, ids, y, cfg, train=True, mask=mask)[1]
        for name in PARAM_NAMES:
            a, n = grads[name], numeric_grad(loss, p, name, eps=1e-5)
            if name == "embedding":
                # the padding row is frozen; only trainable rows are compared
                a, n = a[1:], n[1:]
            worst[(pool, name)] = max_relative_error(a, n)
            scale = max(np.linalg.norm(a), np.linalg.norm(n))
            # a single GLOBAL step starts from a zero state, so U and the forget gate get exact zeros
            norm_err = max(norm_err, np.linalg.norm(a - n) / scale if scale else 0.0)
    elapsed = time.perf_counter() - t0
    (pool, name), err = max(worst.items(), key=lambda kv: kv[1])
    report(5, err < 1e-4 and elapsed < 30.0,
           f"max rel err {err:.2e} ({name}, pool={'GLOBAL' if pool == GLOBAL else pool}), "
           f"max tensor-norm rel err {norm_err:.1e}, {elapsed:.2f}s")


def test_overfit_toy(report, tmp_path):
    docs = [["good", "fine", "nice", "x"], ["nice", "good", "y", "x"], ["fine", "nice", "z", "y"],
            ["good", "z", "fine", "x"], ["bad", "awful", "poor", "x"], ["poor", "bad", "y", "x"],
            ["awful", "poor", "z", "y"], ["bad", "z", "awful", "x"]]
    labels = [0, 0, 0, 0, 1, 1, 1, 1]
    cfg = ClassifierConfig(num_classes=2, dimension=8, num_filters=4, window=2, pool_chunk=2, lstm_hidden=8,
                           dropout=0.0, max_doc_len=6, learning_rate=0.01, epochs=200, batch_size=4, seed=3)
    accs, dumps = [], []
    for run in range(2):
        model, _ = train(docs, labels, cfg)
        accs.append(float(np.mean(model.predict(docs) == labels)))
        dump_params(model.params, cfg, tmp_path / f"p{run}")
        dumps.append((tmp_path / f"p{run}").read_bytes())
    same = dumps[0] == dumps[1]
    report(6, accs == [1.0, 1.0] and same, f"train accuracy {accs}, identical reruns {same}")


SYNTH_CLF = dict(dimension=16, num_filters=16, window=3, pool_chunk=4, lstm_hidden=16, dropout=0.2,
                 max_doc_len=52, learning_rate=0.01, epochs=10, batch_size=20)


@pytest.fixture(scope="module")
def synthetic_runs():
    net, pairs = make_ambiguity_corpus(n_docs=200, doc_len=50, seed=0)
    corpus = LabeledCorpus.from_pairs(pairs)
    t0 = time.perf_counter()
    runs = {}
    for mode in ("word", "sense"):
        cfg = ExperimentConfig(dataset="synthetic", mode=mode, init="random", folds=10, seed=0,
                               classifier=ClassifierConfig(**SYNTH_CLF))
        runs[mode] = run_experiment(cfg, corpus, net)
    return runs, time.perf_counter() - t0


@pytest.mark.slow
def test_synthetic_benefit(report, synthetic_runs):
    runs, elapsed = synthetic_runs
    gap = 100 * (runs["sense"].accuracy - runs["word"].accuracy)
    report(7, gap >= 10.0 and elapsed < 300.0,
           f"sense {runs['sense'].accuracy:.3f} vs word {runs['word'].accuracy:.3f} "
           f"(+{gap:.1f} points), {elapsed:.1f}s")


@pytest.mark.slow
def test_protocol_fidelity(report, synthetic_runs):
    runs, _ = synthetic_runs
    grid_ok = DEFAULT_THETA_GRID == (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
    a, b = kfold_split(200, 10, seed=0), kfold_split(200, 10, seed=0)
    tests = [set(te.tolist()) for _, te in a]
    disjoint = all(not (x & y) for i, x in enumerate(tests) for y in tests[i + 1:]) and set().union(*tests) == set(range(200))
    balanced = {len(t) for t in tests} == {20}
    reproducible = all(np.array_equal(x[1], y[1]) and np.array_equal(x[0], y[0]) for x, y in zip(a, b))
    micro = all(f.metrics.micro_f1 == pytest.approx(f.metrics.accuracy, abs=1e-12)
                for r in runs.values() for f in r.folds)
    ok = grid_ok and disjoint and balanced and reproducible and micro
    report(8, ok, f"grid {grid_ok}, disjoint {disjoint}, balanced {balanced}, "
                  f"reproducible {reproducible}, accuracy==micro-F1 {micro}")


def test_cli_determinism(report, tmp_path):
    words = write(tmp_path / "w.txt", "3 2\nrock 1 0\nmusic 1 1\ncity 2 0\n")
    bias = write(tmp_path / "b.tsv", "rock#music\tmusic,rock\nmanchester#city\tcity\n")
    docs = write(tmp_path / "docs.txt", f"{OASIS}\nManchester rock band\n")

    def invoke(tag):
        d = tmp_path / tag
        d.mkdir()
        main(["synth", "--out", str(d / "synth"), "--docs", "20", "--doc-len", "12", "--seed", "1"])
        conf = d / "synth" / "sense.conf"
        conf.write_text(conf.read_text().replace("folds=10", "folds=2").replace("epochs=10", "epochs=2")
                        + "theta_grid=0,1\n")
        main(["run", "--config", str(conf)])
        main(["semantify", "--network", str(oasis_network_path()), "--theta", "0.5", "--input", str(docs),
              "--output", str(d / "sem.txt")])
        main(["build-embeddings", "--words", str(words), "--bias", str(bias), "--network",
              str(oasis_network_path()), "--output", str(d / "emb.txt")])
        return {p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}

    first, second = invoke("one"), invoke("two")
    differing = sorted(str(k) for k in first if first[k] != second.get(k))
    ok = first.keys() == second.keys() and not differing and len(first) >= 8
    report(9, ok, f"{len(first)} output files compared, differing: {differing or 'none'}")
