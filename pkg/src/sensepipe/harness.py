"""Experiment driver: corpus I/O, cross-validation, theta tuning, metrics, CSV reports."""
from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifier import ClassifierConfig, train
from .disambiguate import MODES, DisambiguationResult, build_graph, disambiguate, render
from .embeddings import EmbeddingTable, load_embeddings
from .network import SemanticNetwork, load_network
from .preprocess import DEFAULT_STOPWORDS, TagLexicon, Token, load_stopwords, preprocess, tokenize

log = logging.getLogger(__name__)

DEFAULT_THETA_GRID = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
CSV_HEADER = ("dataset", "mode", "init", "fold", "theta", "accuracy", "macro_f1")
MIN_TUNING_DOCS = 10


class CorpusError(ValueError):
    pass


@dataclass
class LabeledCorpus:
    docs: list[tuple[str, str]]
    label_set: list[str]

    def __post_init__(self):
        if not self.docs:
            raise CorpusError("corpus is empty")
        known = set(self.label_set)
        for label, _ in self.docs:
            if label not in known:
                raise CorpusError(f"label {label!r} missing from label set")

    def __len__(self):
        return len(self.docs)

    @property
    def texts(self) -> list[str]:
        return [t for _, t in self.docs]

    @property
    def labels(self) -> list[str]:
        return [lab for lab, _ in self.docs]

    def subset(self, idx: Iterable[int]) -> "LabeledCorpus":
        return LabeledCorpus([self.docs[i] for i in idx], list(self.label_set))

    def mean_length(self) -> float:
        return float(np.mean([len(tokenize(t)) for t in self.texts]))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "LabeledCorpus":
        docs = list(pairs)
        labels: list[str] = []
        for lab, _ in docs:
            if lab not in labels:
                labels.append(lab)
        return cls(docs, labels)


def load_corpus(path: str | os.PathLike) -> LabeledCorpus:
    """Read ``label<TAB>text`` lines; labels are ordered by first appearance."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            label, sep, text = line.partition("\t")
            if not sep:
                raise CorpusError(f"{path}:{lineno}: missing tab between label and text")
            pairs.append((label.strip(), text))
    if not pairs:
        raise CorpusError(f"{path}: empty corpus")
    return LabeledCorpus.from_pairs(pairs)


def kfold_split(n: int | Sequence, k: int, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded shuffle, then ``k`` contiguous test folds whose sizes differ by at most one."""
    n = n if isinstance(n, int) else len(n)
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    folds = np.array_split(perm, k)
    out = []
    for i, test in enumerate(folds):
        train_idx = np.sort(np.concatenate([f for j, f in enumerate(folds) if j != i]))
        out.append((train_idx, np.sort(test)))
    return out


@dataclass
class Metrics:
    accuracy: float
    macro_f1: float
    micro_f1: float
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    confusion: np.ndarray     # rows: gold, columns: predicted, in label-set order
    labels: list[str]


def compute_metrics(gold: Sequence[str], predicted: Sequence[str], label_set: Sequence[str]) -> Metrics:
    if len(gold) != len(predicted) or not gold:
        raise ValueError("gold and predicted must be non-empty and of equal length")
    index = {lab: i for i, lab in enumerate(label_set)}
    C = len(label_set)
    conf = np.zeros((C, C), dtype=np.int64)
    for g, p in zip(gold, predicted):
        conf[index[g], index[p]] += 1
    tp = np.diag(conf).astype(float)
    pred_tot = conf.sum(axis=0).astype(float)
    gold_tot = conf.sum(axis=1).astype(float)
    prec = np.divide(tp, pred_tot, out=np.zeros(C), where=pred_tot > 0)
    rec = np.divide(tp, gold_tot, out=np.zeros(C), where=gold_tot > 0)
    denom = prec + rec
    f1 = np.divide(2 * prec * rec, denom, out=np.zeros(C), where=denom > 0)

    micro_p = tp.sum() / pred_tot.sum()
    micro_r = tp.sum() / gold_tot.sum()
    micro_f1 = 0.0 if micro_p + micro_r == 0 else 2 * micro_p * micro_r / (micro_p + micro_r)
    labels = list(label_set)
    return Metrics(
        accuracy=float(tp.sum() / len(gold)),
        macro_f1=float(f1.mean()),
        micro_f1=float(micro_f1),
        precision=dict(zip(labels, prec.tolist())),
        recall=dict(zip(labels, rec.tolist())),
        f1=dict(zip(labels, f1.tolist())),
        confusion=conf,
        labels=labels,
    )


class Semantifier:
    """Caches tokenization and the full selection sequence of each document.

    The selection order does not depend on theta, so one pass at theta=0
    serves every threshold in a tuning grid.
    """

    def __init__(self, net: SemanticNetwork | None, lexicon: TagLexicon | None = None,
                 stopwords: frozenset[str] = DEFAULT_STOPWORDS):
        self.net = net
        self.lexicon = lexicon
        self.stopwords = stopwords
        self._cache: dict[str, tuple[list[Token], DisambiguationResult]] = {}

    def _trace(self, text: str):
        hit = self._cache.get(text)
        if hit is None:
            tokens, spans = preprocess(text, self.net, self.lexicon, self.stopwords)
            hit = (tokens, disambiguate(build_graph(spans, self.net), 0.0))
            self._cache[text] = hit
        return hit

    def __call__(self, text: str, theta: float, mode: str) -> list[str]:
        if mode == "word":
            return [t.surface.lower() for t in tokenize(text)]
        if self.net is None:
            raise ValueError(f"mode {mode!r} needs a semantic network")
        tokens, full = self._trace(text)
        return render(tokens, full.at_theta(theta), self.net, mode)

    def many(self, texts: Iterable[str], theta: float, mode: str) -> list[list[str]]:
        return [self(t, theta, mode) for t in texts]


@dataclass
class ExperimentConfig:
    dataset: str = "dataset"
    data: str = ""
    test_data: str = ""
    network: str = ""
    lexicon: str = ""
    stopwords: str = ""
    embeddings: str = ""
    embeddings_top: int = 0
    mode: str = "sense"
    init: str = "random"
    theta_grid: tuple[float, ...] = DEFAULT_THETA_GRID
    folds: int = 10
    seed: int = 0
    output: str = ""
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        grid = tuple(float(t) for t in self.theta_grid)
        if not grid or list(grid) != sorted(set(grid)) or grid[0] < 0:
            raise ValueError("theta_grid must be non-empty, strictly ascending and non-negative")
        self.theta_grid = grid
        self.classifier.init_mode = self.init
        self.classifier.seed = self.seed


def parse_config(path: str | os.PathLike) -> ExperimentConfig:
    """Flat ``key=value`` file; classifier options use their own field names.

    Relative paths are resolved against the config file's directory.
    """
    base = Path(path).resolve().parent
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            values[key.strip()] = value.strip()

    exp_fields = {f.name for f in fields(ExperimentConfig)} - {"classifier"}
    clf_fields = {f.name for f in fields(ClassifierConfig)} - {"seed", "init_mode", "num_classes"}
    kwargs: dict = {}
    clf: dict[str, str] = {}
    for key, value in values.items():
        if key in exp_fields:
            kwargs[key] = value
        elif key in clf_fields:
            clf[key] = value
        else:
            raise ValueError(f"{path}: unknown option {key!r}")
    for key in ("data", "test_data", "network", "lexicon", "stopwords", "embeddings", "output"):
        if kwargs.get(key):
            kwargs[key] = str((base / kwargs[key]).resolve())
    for key in ("folds", "seed", "embeddings_top"):
        if key in kwargs:
            kwargs[key] = int(kwargs[key])
    if "theta_grid" in kwargs:
        kwargs["theta_grid"] = tuple(float(x) for x in kwargs["theta_grid"].split(",") if x.strip())
    kwargs["classifier"] = ClassifierConfig.from_strings(clf)
    return ExperimentConfig(**kwargs)


def _label_ids(labels: Sequence[str], label_set: Sequence[str]) -> list[int]:
    index = {lab: i for i, lab in enumerate(label_set)}
    return [index[lab] for lab in labels]


def _fit_and_score(train_docs, train_y, test_docs, test_y, config: ClassifierConfig, pretrained) -> np.ndarray:
    model, _ = train(train_docs, train_y, config, pretrained=pretrained)
    return model.predict(test_docs)


def tune_theta(corpus: LabeledCorpus, grid: Sequence[float], config: ClassifierConfig,
               semantifier: Semantifier, mode: str = "sense", seed: int = 0,
               pretrained: EmbeddingTable | None = None) -> tuple[float, dict[float, float]]:
    """Pick theta by accuracy on a seeded 90/10 split of ``corpus``.

    Returns the best theta (smallest on ties) and the accuracy per theta.
    A single-value grid is returned without training.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty theta grid")
    if len(grid) == 1:
        return grid[0], {}
    if len(corpus) < MIN_TUNING_DOCS:
        raise CorpusError(f"theta tuning needs at least {MIN_TUNING_DOCS} training documents, got {len(corpus)}")
    perm = np.random.default_rng(seed).permutation(len(corpus))
    n_val = max(1, int(round(0.1 * len(corpus))))
    val_idx, fit_idx = np.sort(perm[:n_val]), np.sort(perm[n_val:])
    y = np.asarray(_label_ids(corpus.labels, corpus.label_set))
    texts = corpus.texts
    cfg = ClassifierConfig(**{**config.to_dict(), "num_classes": len(corpus.label_set)})
    scores: dict[float, float] = {}
    for theta in grid:
        fit_docs = semantifier.many((texts[i] for i in fit_idx), theta, mode)
        val_docs = semantifier.many((texts[i] for i in val_idx), theta, mode)
        pred = _fit_and_score(fit_docs, y[fit_idx], val_docs, y[val_idx], cfg, pretrained)
        scores[theta] = float(np.mean(pred == y[val_idx]))
        log.debug("theta %.2f: inner accuracy %.4f", theta, scores[theta])
    best = max(grid, key=lambda t: (scores[t], -t))
    return best, scores


@dataclass
class FoldResult:
    fold: int
    theta: float | None
    metrics: Metrics
    theta_scores: dict[float, float] = field(default_factory=dict)


@dataclass
class ExperimentReport:
    dataset: str
    mode: str
    init: str
    folds: list[FoldResult]
    mean_doc_length: float
    tuning: str = "single seeded 90/10 split of each training portion"

    @property
    def accuracy(self) -> float:
        return float(np.mean([f.metrics.accuracy for f in self.folds]))

    @property
    def macro_f1(self) -> float:
        return float(np.mean([f.metrics.macro_f1 for f in self.folds]))

    def rows(self) -> list[tuple[str, ...]]:
        out = []
        for f in self.folds:
            theta = "" if f.theta is None else f"{f.theta:g}"
            out.append((self.dataset, self.mode, self.init, str(f.fold), theta,
                        f"{f.metrics.accuracy:.6f}", f"{f.metrics.macro_f1:.6f}"))
        out.append((self.dataset, self.mode, self.init, "mean", "", f"{self.accuracy:.6f}", f"{self.macro_f1:.6f}"))
        return out

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(CSV_HEADER)
        w.writerows(self.rows())
        return buf.getvalue()


def run_experiment(config: ExperimentConfig, corpus: LabeledCorpus, network: SemanticNetwork | None = None,
                   embeddings: EmbeddingTable | None = None, test_corpus: LabeledCorpus | None = None,
                   lexicon: TagLexicon | None = None, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> ExperimentReport:
    """Cross-validate (or use the given test split) one (mode, init) configuration."""
    if config.mode != "word" and network is None:
        raise ValueError(f"mode {config.mode!r} needs a semantic network")
    if config.init == "pretrained" and embeddings is None:
        raise ValueError("pretrained initialization needs an embedding table")
    label_set = list(corpus.label_set)
    if test_corpus is not None:
        for lab in test_corpus.label_set:
            if lab not in label_set:
                label_set.append(lab)
        full = LabeledCorpus(corpus.docs + test_corpus.docs, label_set)
        splits = [(np.arange(len(corpus)), np.arange(len(corpus), len(full)))]
    else:
        full = LabeledCorpus(corpus.docs, label_set)
        splits = kfold_split(len(full), config.folds, config.seed)

    clf = ClassifierConfig(**{**config.classifier.to_dict(), "num_classes": len(label_set)})
    sem = Semantifier(network, lexicon, stopwords)
    texts = full.texts
    y_all = np.asarray(_label_ids(full.labels, label_set))
    results = []
    for k, (train_idx, test_idx) in enumerate(splits):
        train_part = full.subset(train_idx)
        theta, scores = None, {}
        if config.mode != "word":
            theta, scores = tune_theta(train_part, config.theta_grid, clf, sem, config.mode,
                                       seed=config.seed + k, pretrained=embeddings)
        th = 0.0 if theta is None else theta
        train_docs = sem.many((texts[i] for i in train_idx), th, config.mode)
        test_docs = sem.many((texts[i] for i in test_idx), th, config.mode)
        pred = _fit_and_score(train_docs, y_all[train_idx], test_docs, y_all[test_idx], clf, embeddings)
        m = compute_metrics([label_set[i] for i in y_all[test_idx]], [label_set[i] for i in pred], label_set)
        if abs(m.micro_f1 - m.accuracy) > 1e-12:
            raise AssertionError(f"fold {k}: micro-F1 {m.micro_f1} differs from accuracy {m.accuracy}")
        log.info("%s %s fold %d theta=%s acc=%.4f macroF1=%.4f", config.dataset, config.mode, k, theta,
                 m.accuracy, m.macro_f1)
        results.append(FoldResult(k, theta, m, scores))
    return ExperimentReport(config.dataset, config.mode, config.init, results, corpus.mean_length())


def run_from_config(config: ExperimentConfig) -> ExperimentReport:
    corpus = load_corpus(config.data)
    test = load_corpus(config.test_data) if config.test_data else None
    net = load_network(config.network) if config.network else None
    lexicon = TagLexicon.load(config.lexicon) if config.lexicon else None
    stopwords = load_stopwords(config.stopwords) if config.stopwords else DEFAULT_STOPWORDS
    emb = None
    if config.embeddings:
        emb = load_embeddings(config.embeddings, top=config.embeddings_top or None)
    report = run_experiment(config, corpus, net, emb if config.init == "pretrained" else None, test, lexicon, stopwords)
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_csv())
    return report


GAIN_HEADER = ("dataset", "mode", "avg_doc_size", "accuracy_gain")


def report_doclen_gain(pairs: Iterable[tuple[ExperimentReport, ExperimentReport]]) -> str:
    """CSV of (mean document length, accuracy gain over the word baseline).

    Each pair is ``(word_report, other_report)`` for one dataset. Rows are
    sorted by document length.
    """
    rows = []
    for base, other in pairs:
        if base.dataset != other.dataset:
            raise ValueError(f"paired reports disagree on dataset: {base.dataset!r} vs {other.dataset!r}")
        rows.append((base.mean_doc_length, base.dataset, other.mode, other.accuracy - base.accuracy))
    rows.sort(key=lambda r: (r[0], r[1]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GAIN_HEADER)
    for size, name, mode, gain in rows:
        w.writerow((name, mode, f"{size:.2f}", f"{gain:.6f}"))
    return buf.getvalue()
