"""Word, sense and supersense vectors.

Sense vectors are built from ranked bias-word lists with an exponential
decay over rank, then averaged with the vector of the sense's word.
Supersense vectors are plain means of their member sense vectors.
"""
from __future__ import annotations

import logging
import math
import os
from typing import Mapping, Sequence

import numpy as np

from .network import SemanticNetwork

log = logging.getLogger(__name__)

DEFAULT_DIM = 300
DEFAULT_DECAY = 5.0


class EmbeddingFormatError(ValueError):
    pass


class CompositionError(ValueError):
    pass


class EmbeddingTable:
    """Fixed-dimension vectors keyed by string, in insertion order."""

    def __init__(self, dimension: int = DEFAULT_DIM, keys: Sequence[str] = (), vectors=None):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = int(dimension)
        self._index: dict[str, int] = {}
        self._keys: list[str] = []
        self._rows: list[np.ndarray] = []
        if vectors is not None:
            for k, v in zip(keys, vectors):
                self[k] = v

    def __setitem__(self, key: str, vec) -> None:
        v = np.asarray(vec, dtype=np.float64).reshape(-1)
        if v.shape[0] != self.dimension:
            raise ValueError(f"vector for {key!r} has {v.shape[0]} components, expected {self.dimension}")
        if key in self._index:
            self._rows[self._index[key]] = v
        else:
            self._index[key] = len(self._keys)
            self._keys.append(key)
            self._rows.append(v)

    def __getitem__(self, key: str) -> np.ndarray:
        return self._rows[self._index[key]]

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self._keys)

    def __iter__(self):
        return iter(self._keys)

    def get(self, key, default=None):
        i = self._index.get(key)
        return default if i is None else self._rows[i]

    @property
    def keys(self) -> list[str]:
        return list(self._keys)

    def matrix(self) -> np.ndarray:
        if not self._rows:
            return np.zeros((0, self.dimension))
        return np.vstack(self._rows)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{len(self)} {self.dimension}\n")
            for k, v in zip(self._keys, self._rows):
                fh.write(k + " " + " ".join(f"{x:.9g}" for x in v) + "\n")


def load_embeddings(path: str | os.PathLike, top: int | None = None) -> EmbeddingTable:
    """Parse the ``<count> <dim>`` header format; ``top`` keeps the first K rows."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError(f"{path}:1: expected header '<count> <dimension>'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError(f"{path}:1: non-integer header {header!r}") from None
        table = EmbeddingTable(dim)
        read = 0
        for lineno, line in enumerate(fh, 2):
            if top is not None and read >= top:
                break
            parts = line.rstrip("\n").split(" ")
            if not line.strip():
                continue
            if len(parts) != dim + 1:
                raise EmbeddingFormatError(
                    f"{path}:{lineno}: expected {dim} values for {parts[0]!r}, got {len(parts) - 1}")
            try:
                vec = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise EmbeddingFormatError(f"{path}:{lineno}: malformed float") from None
            table[parts[0]] = vec
            read += 1
    if top is None and read != count:
        log.warning("%s: header declares %d entries, found %d", path, count, read)
    return table


def decayed_bias_vector(table: EmbeddingTable, bias_words: Sequence[str], delta: float = DEFAULT_DECAY) -> np.ndarray:
    """Rank-decayed mean of the bias word vectors.

    Ranks are 1-based positions in the original list; words missing from the
    table are skipped but keep their rank slot, and the sum is divided by
    the number of words actually used.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    acc = np.zeros(table.dimension)
    used = 0
    for rank, word in enumerate(bias_words, 1):
        v = table.get(word)
        if v is None:
            continue
        acc += math.exp(-rank / delta) * v
        used += 1
    if used == 0:
        raise CompositionError("no bias word has a vector")
    return acc / used


def compose_sense(table: EmbeddingTable, bias_words: Sequence[str], word_key: str,
                  delta: float = DEFAULT_DECAY) -> np.ndarray:
    word_vec = table.get(word_key)
    if word_vec is None:
        raise CompositionError(f"word {word_key!r} has no vector")
    return (decayed_bias_vector(table, bias_words, delta) + word_vec) / 2.0


def compose_supersense(sense_vectors: Sequence[np.ndarray]) -> np.ndarray:
    if len(sense_vectors) == 0:
        raise CompositionError("cannot average an empty list of sense vectors")
    dims = {np.shape(v) for v in sense_vectors}
    if len(dims) != 1:
        raise CompositionError(f"dimension mismatch among sense vectors: {sorted(dims)}")
    return np.mean(np.asarray(sense_vectors, dtype=np.float64), axis=0)


def word_vector_for(table: EmbeddingTable, lemma: str) -> np.ndarray | None:
    """Vector for a (possibly multiword) lemma.

    Multiword lemmas are looked up underscore-joined, falling back to the
    mean of their part vectors when every part is present.
    """
    parts = lemma.split(" ")
    if len(parts) == 1:
        return table.get(lemma)
    joined = table.get("_".join(parts))
    if joined is not None:
        return joined
    vecs = [table.get(p) for p in parts]
    if any(v is None for v in vecs):
        return None
    return np.mean(vecs, axis=0)


def load_bias_lists(path: str | os.PathLike) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise ValueError(f"{path}:{lineno}: expected sense_id<TAB>w1,w2,...")
            words = [w.strip() for w in cols[1].split(",") if w.strip()]
            if not words:
                raise ValueError(f"{path}:{lineno}: empty bias list")
            out[cols[0].strip()] = words
    return out


def build_sense_table(word_table: EmbeddingTable, bias_lists: Mapping[str, Sequence[str]] | str | os.PathLike,
                      net: SemanticNetwork, delta: float = DEFAULT_DECAY) -> EmbeddingTable:
    """Merge word vectors with composed sense and supersense vectors."""
    if not isinstance(bias_lists, Mapping):
        bias_lists = load_bias_lists(bias_lists)
    out = EmbeddingTable(word_table.dimension)
    for k in word_table:
        out[k] = word_table[k]

    skipped = 0
    composed: dict[str, np.ndarray] = {}
    for sense, words in bias_lists.items():
        if sense not in net or not net.lemmas_of(sense):
            skipped += 1
            continue
        word_vec = word_vector_for(word_table, net.lemmas_of(sense)[0])
        if word_vec is None:
            skipped += 1
            continue
        try:
            vec = (decayed_bias_vector(word_table, words, delta) + word_vec) / 2.0
        except CompositionError:
            skipped += 1
            continue
        composed[sense] = vec
        out[sense] = vec
    if skipped:
        log.info("skipped %d of %d senses with no usable word or bias vectors", skipped, len(bias_lists))

    n_super = 0
    for ss in net.supersenses:
        members = [composed[s] for s in net.members(ss) if s in composed]
        if members:
            out[ss] = compose_supersense(members)
            n_super += 1
    log.info("sense table: %d words, %d senses, %d supersenses", len(word_table), len(composed), n_super)
    return out

