"""Semantic network: senses, undirected edges, lexicalizations and supersenses.

A network is stored as three TSV files in one directory::

    senses.tsv            sense_id <TAB> supersense_id   (second column may be empty)
    edges.tsv             sense_id <TAB> sense_id
    lexicalizations.tsv   lemma <TAB> pos <TAB> sense_id

Lines starting with ``#`` and blank lines are ignored.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

POS_TAGS = ("NOUN", "VERB", "ADJ", "ADV")
ANY = "ANY"

SENSES_FILE = "senses.tsv"
EDGES_FILE = "edges.tsv"
LEX_FILE = "lexicalizations.tsv"


class NetworkError(ValueError):
    """Raised for malformed or inconsistent network files."""

    def __init__(self, message: str, path: str | os.PathLike | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


def normalize_lemma(lemma: str) -> str:
    return " ".join(lemma.lower().split())


@dataclass(frozen=True, order=True)
class LexKey:
    lemma: str
    pos: str = "NOUN"

    def __post_init__(self):
        parts = self.lemma.split(" ")
        if not self.lemma or self.lemma != self.lemma.strip() or not 1 <= len(parts) <= 3 or "" in parts:
            raise ValueError(f"invalid lemma {self.lemma!r}: expected 1-3 single-space separated parts")
        if self.pos not in POS_TAGS and self.pos != ANY:
            raise ValueError(f"invalid pos {self.pos!r}")


class SemanticNetwork:
    """Immutable sense graph with a lemma index and a supersense map.

    Build it with :func:`load_network` or :meth:`from_records`.
    """

    __slots__ = ("_senses", "_sense_set", "_adj", "_lex", "_by_lemma", "_supersense",
                 "_supersenses", "_lemmas_of")

    def __init__(self, senses, adjacency, lex, supersense_of, supersenses):
        self._senses = tuple(senses)
        self._sense_set = frozenset(self._senses)
        self._adj = {s: frozenset(adjacency.get(s, ())) for s in self._senses}
        self._lex = {k: tuple(v) for k, v in lex.items()}
        self._supersense = dict(supersense_of)
        self._supersenses = tuple(supersenses)

        by_lemma: dict[str, list[str]] = {}
        lemmas_of: dict[str, list[str]] = {}
        for key, ids in self._lex.items():
            bucket = by_lemma.setdefault(key.lemma, [])
            for s in ids:
                if s not in bucket:
                    bucket.append(s)
                lemmas = lemmas_of.setdefault(s, [])
                if key.lemma not in lemmas:
                    lemmas.append(key.lemma)
        self._by_lemma = {k: tuple(v) for k, v in by_lemma.items()}
        self._lemmas_of = {k: tuple(v) for k, v in lemmas_of.items()}

    @classmethod
    def from_records(cls, senses: Iterable[tuple[str, str | None]],
                     edges: Iterable[tuple[str, str]],
                     lexicalizations: Iterable[tuple[str, str, str]]) -> "SemanticNetwork":
        """Build and validate a network from in-memory rows (same shape as the files)."""
        return _build(
            ((None, s, ss) for s, ss in senses),
            ((None, a, b) for a, b in edges),
            ((None, lemma, pos, s) for lemma, pos, s in lexicalizations),
        )

    @property
    def senses(self) -> tuple[str, ...]:
        return self._senses

    @property
    def supersenses(self) -> tuple[str, ...]:
        """Supersense ids in first-declaration order."""
        return self._supersenses

    def __contains__(self, sense: str) -> bool:
        return sense in self._sense_set

    def __len__(self) -> int:
        return len(self._senses)

    def __eq__(self, other):
        if not isinstance(other, SemanticNetwork):
            return NotImplemented
        return (self._senses == other._senses and self._adj == other._adj
                and self._lex == other._lex and self._supersense == other._supersense)

    __hash__ = None

    def __repr__(self):
        n_edges = sum(len(v) for v in self._adj.values()) // 2
        return f"SemanticNetwork(senses={len(self._senses)}, edges={n_edges}, lex_keys={len(self._lex)})"

    def _check(self, sense: str) -> None:
        if sense not in self._sense_set:
            raise KeyError(f"unknown sense id {sense!r}")

    def candidates(self, key: LexKey) -> list[str]:
        """Candidate senses for ``key`` in file order; ``pos=ANY`` merges all tags."""
        if key.pos == ANY:
            return list(self._by_lemma.get(key.lemma, ()))
        return list(self._lex.get(key, ()))

    def neighbors(self, sense: str) -> frozenset[str]:
        self._check(sense)
        return self._adj[sense]

    def supersense_of(self, sense: str) -> str | None:
        self._check(sense)
        return self._supersense.get(sense)

    def lemmas_of(self, sense: str) -> tuple[str, ...]:
        """Lemmas lexicalizing ``sense``, first lexicalization first."""
        self._check(sense)
        return self._lemmas_of.get(sense, ())

    def members(self, supersense: str) -> list[str]:
        return [s for s in self._senses if self._supersense.get(s) == supersense]

    def edges(self) -> list[tuple[str, str]]:
        """Each undirected edge once, ordered by sense file order."""
        order = {s: i for i, s in enumerate(self._senses)}
        out = []
        for a in self._senses:
            for b in sorted(self._adj[a], key=order.__getitem__):
                if order[a] < order[b]:
                    out.append((a, b))
        return out

    def lex_items(self) -> list[tuple[LexKey, tuple[str, ...]]]:
        return list(self._lex.items())


def _rows(path: Path, ncols: int, pad_last: bool = False):
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if pad_last and len(cols) == ncols - 1:
                cols.append("")
            if len(cols) != ncols:
                raise NetworkError(f"expected {ncols} tab-separated columns, got {len(cols)}", path, lineno)
            yield ((path, lineno), *(c.strip() for c in cols))


def _build(sense_rows, edge_rows, lex_rows) -> SemanticNetwork:
    senses: list[str] = []
    seen: set[str] = set()
    supersense_of: dict[str, str] = {}
    supersenses: list[str] = []
    for where, sid, ss in sense_rows:
        loc = where or (None, None)
        if not sid:
            raise NetworkError("empty sense id", *loc)
        if sid in seen:
            raise NetworkError(f"duplicate sense id {sid!r}", *loc)
        seen.add(sid)
        senses.append(sid)
        if ss:
            supersense_of[sid] = ss
            if ss not in supersenses:
                supersenses.append(ss)

    adjacency: dict[str, set[str]] = {s: set() for s in senses}
    for where, a, b in edge_rows:
        loc = where or (None, None)
        for s in (a, b):
            if s not in seen:
                raise NetworkError(f"edge references unknown sense {s!r}", *loc)
        if a == b:
            raise NetworkError(f"self-loop edge on {a!r}", *loc)
        adjacency[a].add(b)
        adjacency[b].add(a)

    lex: dict[LexKey, list[str]] = {}
    for where, lemma, pos, sid in lex_rows:
        loc = where or (None, None)
        if pos not in POS_TAGS:
            raise NetworkError(f"invalid pos {pos!r}", *loc)
        if sid not in seen:
            raise NetworkError(f"lexicalization references unknown sense {sid!r}", *loc)
        try:
            key = LexKey(normalize_lemma(lemma), pos)
        except ValueError as exc:
            raise NetworkError(str(exc), *loc) from None
        bucket = lex.setdefault(key, [])
        if sid not in bucket:
            bucket.append(sid)

    return SemanticNetwork(senses, adjacency, lex, supersense_of, supersenses)


def load_network(senses: str | os.PathLike, edges: str | os.PathLike | None = None,
                 lexicalizations: str | os.PathLike | None = None) -> SemanticNetwork:
    """Load a network from its three TSV files.

    With a single argument, it is taken to be a directory holding
    ``senses.tsv``, ``edges.tsv`` and ``lexicalizations.tsv``.
    """
    if edges is None and lexicalizations is None:
        root = Path(senses)
        senses, edges, lexicalizations = root / SENSES_FILE, root / EDGES_FILE, root / LEX_FILE
    elif edges is None or lexicalizations is None:
        raise TypeError("pass either a directory or all three file paths")
    return _build(_rows(Path(senses), 2, pad_last=True), _rows(Path(edges), 2), _rows(Path(lexicalizations), 3))


def save_network(net: SemanticNetwork, directory: str | os.PathLike) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    with open(root / SENSES_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for s in net.senses:
            fh.write(f"{s}\t{net.supersense_of(s) or ''}\n")
    with open(root / EDGES_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in net.edges():
            fh.write(f"{a}\t{b}\n")
    with open(root / LEX_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for key, ids in net.lex_items():
            for s in ids:
                fh.write(f"{key.lemma}\t{key.pos}\t{s}\n")
