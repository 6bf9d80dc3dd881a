from __future__ import annotations

import os
from collections import Counter
from typing import Iterable, Sequence

import numpy as np

PAD, UNK = 0, 1
PAD_TOKEN, UNK_TOKEN = "<pad>", "<unk>"


class VocabularyOverflow(ValueError):
    pass


class Vocabulary:
    """Token <-> id map with reserved padding (0) and unknown (1) ids."""

    def __init__(self, tokens: Sequence[str] = ()):
        self.tokens = [PAD_TOKEN, UNK_TOKEN]
        self.index = {PAD_TOKEN: PAD, UNK_TOKEN: UNK}
        for t in tokens:
            if t not in self.index:
                self.index[t] = len(self.tokens)
                self.tokens.append(t)

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    @classmethod
    def build(cls, docs: Iterable[Sequence[str]], max_size: int = 0) -> "Vocabulary":
        """Most frequent first, ties in first-appearance order."""
        counts: Counter[str] = Counter()
        first: dict[str, int] = {}
        for doc in docs:
            for tok in doc:
                counts[tok] += 1
                first.setdefault(tok, len(first))
        ranked = sorted(counts, key=lambda t: (-counts[t], first[t]))
        if max_size and len(ranked) + 2 > max_size:
            raise VocabularyOverflow(f"{len(ranked) + 2} entries exceed the vocabulary limit of {max_size}")
        return cls(ranked)

    def encode(self, tokens: Sequence[str], length: int) -> np.ndarray:
        """Map to ids, truncating or right-padding with PAD to ``length``."""
        ids = np.full(length, PAD, dtype=np.int64)
        for i, tok in enumerate(tokens[:length]):
            ids[i] = self.index.get(tok, UNK)
        return ids

    def encode_batch(self, docs: Sequence[Sequence[str]], length: int) -> np.ndarray:
        out = np.full((len(docs), length), PAD, dtype=np.int64)
        for b, doc in enumerate(docs):
            out[b] = self.encode(doc, length)
        return out

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for i, tok in enumerate(self.tokens):
                fh.write(f"{i}\t{tok}\n")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Vocabulary":
        rows = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                i, _, tok = line.rstrip("\n").partition("\t")
                if int(i) != lineno - 1:
                    raise ValueError(f"{path}:{lineno}: ids must be consecutive from 0")
                rows.append(tok)
        if rows[:2] != [PAD_TOKEN, UNK_TOKEN]:
            raise ValueError(f"{path}: first two entries must be {PAD_TOKEN} and {UNK_TOKEN}")
        return cls(rows[2:])
