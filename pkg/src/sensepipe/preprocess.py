"""Tokenization, lexicon tagging and candidate span extraction."""
from __future__ import annotations

import os
import string
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, Sequence

from .network import POS_TAGS, LexKey, SemanticNetwork

NONE = "NONE"
MAX_SPAN = 3

_PUNCT = frozenset(string.punctuation)
_CLITICS = ("n't", "'s", "'re", "'ve", "'ll", "'d", "'m")


@dataclass(frozen=True)
class Token:
    surface: str
    position: int
    lemma: str = ""
    pos: str = NONE

    @property
    def is_content(self) -> bool:
        return self.pos != NONE


@dataclass(frozen=True)
class CandidateSpan:
    start: int
    length: int
    key: LexKey
    candidates: tuple[str, ...]

    @property
    def end(self) -> int:
        return self.start + self.length

    def overlaps(self, other: "CandidateSpan") -> bool:
        return self.start < other.end and other.start < self.end


class TagLexicon:
    """Surface form -> (pos, lemma) lookup table.

    Lookups try the exact surface first, then its lowercased form.
    """

    def __init__(self, entries: dict[str, tuple[str, str]] | None = None):
        self._entries: dict[str, tuple[str, str]] = {}
        for surface, (pos, lemma) in (entries or {}).items():
            self.add(surface, pos, lemma)

    def add(self, surface: str, pos: str, lemma: str) -> None:
        if pos not in POS_TAGS and pos != NONE:
            raise ValueError(f"invalid pos {pos!r} for {surface!r}")
        # first entry wins, keeping one entry per surface form
        self._entries.setdefault(surface, (pos, lemma.lower()))

    def lookup(self, surface: str) -> tuple[str, str] | None:
        hit = self._entries.get(surface)
        if hit is None:
            hit = self._entries.get(surface.lower())
        return hit

    def __len__(self):
        return len(self._entries)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "TagLexicon":
        lex = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise ValueError(f"{path}:{lineno}: expected surface<TAB>pos<TAB>lemma")
                try:
                    lex.add(cols[0].strip(), cols[1].strip(), cols[2].strip())
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
        return lex


def load_stopwords(path: str | os.PathLike | None = None) -> frozenset[str]:
    """Read one word per line; with no path, the bundled list is used."""
    if path is None:
        text = resources.files("sensepipe.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#"))


DEFAULT_STOPWORDS = load_stopwords()


def _split_chunk(chunk: str) -> list[str]:
    lead, trail = [], []
    i, j = 0, len(chunk)
    while i < j and chunk[i] in _PUNCT:
        lead.append(chunk[i])
        i += 1
    while j > i and chunk[j - 1] in _PUNCT:
        trail.append(chunk[j - 1])
        j -= 1
    core = chunk[i:j]
    parts = []
    if core:
        low = core.lower()
        for clitic in _CLITICS:
            if low.endswith(clitic) and len(core) > len(clitic):
                parts = [core[: -len(clitic)], core[-len(clitic):]]
                break
        else:
            parts = [core]
    return lead + parts + trail[::-1]


def tokenize(text: str) -> list[Token]:
    """Whitespace tokenization with edge punctuation and clitics split off.

    >>> [t.surface for t in tokenize("F1's win-rate!")]
    ['F1', "'s", 'win-rate', '!']
    """
    surfaces = [piece for chunk in text.split() for piece in _split_chunk(chunk)]
    return [Token(s, i) for i, s in enumerate(surfaces)]


def _is_punct(surface: str) -> bool:
    return all(c in _PUNCT for c in surface)


def tag_and_lemmatize(tokens: Iterable[Token], lexicon: TagLexicon | None = None,
                      stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[Token]:
    out = []
    for tok in tokens:
        hit = lexicon.lookup(tok.surface) if lexicon is not None else None
        if hit is not None:
            pos, lemma = hit
        else:
            lemma = tok.surface.lower()
            pos = NONE if _is_punct(tok.surface) or lemma in stopwords else "NOUN"
        out.append(replace(tok, lemma=lemma, pos=pos))
    return out


def extract_spans(tokens: Sequence[Token], net: SemanticNetwork) -> list[CandidateSpan]:
    """All 1- to 3-token windows whose lemma sequence is lexicalized in ``net``.

    A multiword window takes the tag of its last content token; windows
    without any content token are skipped. Overlapping spans are all kept,
    ordered by start then by decreasing length.
    """
    spans = []
    n = len(tokens)
    for start in range(n):
        for length in range(min(MAX_SPAN, n - start), 0, -1):
            window = tokens[start:start + length]
            head = next((t for t in reversed(window) if t.is_content), None)
            if head is None:
                continue
            try:
                key = LexKey(" ".join(t.lemma for t in window), head.pos)
            except ValueError:
                continue
            senses = net.candidates(key)
            if senses:
                spans.append(CandidateSpan(start, length, key, tuple(senses)))
    return spans


def preprocess(text: str, net: SemanticNetwork, lexicon: TagLexicon | None = None,
               stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> tuple[list[Token], list[CandidateSpan]]:
    tokens = tag_and_lemmatize(tokenize(text), lexicon, stopwords)
    return tokens, extract_spans(tokens, net)
