from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import ClassifierConfig
from .model import Params, init_params, loss_and_grads, predict
from .vocab import Vocabulary

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


class Adam:
    def __init__(self, params: Params, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: Params, grads: Params) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class TextClassifier:
    """Trained parameters plus the vocabulary and config needed to use them."""

    config: ClassifierConfig
    vocab: Vocabulary
    params: Params

    def encode(self, docs: Sequence[Sequence[str]]) -> np.ndarray:
        return self.vocab.encode_batch(docs, self.config.max_doc_len)

    def predict(self, docs: Sequence[Sequence[str]], batch_size: int = 256) -> np.ndarray:
        ids = self.encode(docs)
        out = [predict(self.params, ids[i:i + batch_size], self.config) for i in range(0, len(ids), batch_size)]
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


@dataclass
class TrainLog:
    losses: list[float] = field(default_factory=list)        # mean training loss per epoch
    val_accuracy: list[float] = field(default_factory=list)
    best_epoch: int | None = None


def train(docs: Sequence[Sequence[str]], labels: Sequence[int], config: ClassifierConfig,
          pretrained=None, validation: tuple[Sequence[Sequence[str]], Sequence[int]] | None = None,
          vocab: Vocabulary | None = None) -> tuple[TextClassifier, TrainLog]:
    """Mini-batch Adam on mean cross-entropy.

    The vocabulary is built from ``docs`` only. With ``validation`` the
    parameters of the epoch with the best validation accuracy (earliest on
    ties) are returned; otherwise those after the last epoch.
    """
    if len(docs) == 0:
        raise ValueError("cannot train on an empty corpus")
    if len(docs) != len(labels):
        raise ValueError("docs and labels differ in length")
    y = np.asarray(labels, dtype=np.int64)
    if y.min() < 0 or y.max() >= config.num_classes:
        raise ValueError("label index out of range")

    rng = np.random.default_rng(config.seed)
    if vocab is None:
        vocab = Vocabulary.build(docs, config.max_vocab)
    if config.init_mode == "pretrained" and pretrained is None:
        raise ValueError("init_mode 'pretrained' needs an embedding table")
    params = init_params(config, len(vocab), rng,
                         pretrained if config.init_mode == "pretrained" else None, vocab)
    ids = vocab.encode_batch(docs, config.max_doc_len)
    model = TextClassifier(config, vocab, params)
    history = TrainLog()

    val_ids = val_y = None
    best = None
    if validation is not None:
        val_ids = vocab.encode_batch(validation[0], config.max_doc_len)
        val_y = np.asarray(validation[1], dtype=np.int64)

    opt = Adam(params, lr=config.learning_rate)
    n = len(ids)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for b, lo in enumerate(range(0, n, config.batch_size)):
            sel = order[lo:lo + config.batch_size]
            loss, grads = loss_and_grads(params, ids[sel], y[sel], config, train=True, rng=rng)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss in epoch {epoch}, batch {b}")
            opt.step(params, grads)
            total += loss * len(sel)
        history.losses.append(total / n)
        if val_ids is not None:
            acc = float(np.mean(predict(params, val_ids, config) == val_y)) if len(val_ids) else 0.0
            history.val_accuracy.append(acc)
            if best is None or acc > best[0]:
                best = (acc, epoch, {k: v.copy() for k, v in params.items()})
        log.debug("epoch %d loss %.6f", epoch, history.losses[-1])

    if best is not None:
        history.best_epoch = best[1]
        model.params = best[2]
    return model, history
