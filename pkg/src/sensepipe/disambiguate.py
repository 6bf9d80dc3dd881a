"""Iterative max-degree disambiguation over a per-document candidate graph.

Each candidate span contributes one node per candidate sense. Nodes of
non-overlapping spans are linked when their senses are adjacent in the
semantic network. The engine repeatedly picks the selectable node of
highest degree and stops once that degree falls below
``theta * initial_size / 100``. The winning node stays in the graph (its
edges keep supporting later picks) but can no longer be selected; the
other candidates of its span and every node of an overlapping span are
removed together with their edges.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .network import SemanticNetwork
from .preprocess import DEFAULT_STOPWORDS, CandidateSpan, TagLexicon, Token, preprocess, tokenize

MODES = ("sense", "supersense", "word")


def _csr(rows: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(r) for r in rows])
    idx = np.fromiter((v for r in rows for v in r), dtype=np.int64, count=int(ptr[-1]))
    return ptr, idx


@dataclass(frozen=True, eq=False)
class CandidateGraph:
    """Candidate senses of one document and the edges among them."""

    spans: tuple[CandidateSpan, ...]
    senses: tuple[str, ...]          # node -> sense id
    node_span: np.ndarray            # node -> index into spans
    node_rank: np.ndarray            # node -> position within its span's candidate list
    indptr: np.ndarray
    indices: np.ndarray
    initial_size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "initial_size", len(self.senses))

    def __len__(self) -> int:
        return len(self.senses)

    @property
    def n_edges(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    def degree(self, node: int) -> int:
        return int(self.indptr[node + 1] - self.indptr[node])

    def span_of(self, node: int) -> CandidateSpan:
        return self.spans[self.node_span[node]]

    def node_priority(self) -> np.ndarray:
        """Tie-break rank: longer span, then earlier start, then candidate order."""
        keys = [(-self.spans[s].length, self.spans[s].start, s, int(r))
                for s, r in zip(self.node_span.tolist(), self.node_rank.tolist())]
        order = sorted(range(len(keys)), key=keys.__getitem__)
        prio = np.empty(len(keys), dtype=np.int64)
        prio[order] = np.arange(len(keys))
        return prio

    def span_overlaps(self) -> tuple[np.ndarray, np.ndarray]:
        rows = [[j for j, other in enumerate(self.spans) if span.overlaps(other)] for span in self.spans]
        return _csr(rows)

    def span_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        rows: list[list[int]] = [[] for _ in self.spans]
        for v, s in enumerate(self.node_span.tolist()):
            rows[s].append(v)
        return _csr(rows)


def build_graph(spans: Iterable[CandidateSpan], net: SemanticNetwork) -> CandidateGraph:
    spans = tuple(spans)
    senses, node_span, node_rank = [], [], []
    by_sense: dict[str, list[int]] = {}
    for si, span in enumerate(spans):
        for rank, sense in enumerate(span.candidates):
            by_sense.setdefault(sense, []).append(len(senses))
            senses.append(sense)
            node_span.append(si)
            node_rank.append(rank)

    adj: list[list[int]] = []
    for v, sense in enumerate(senses):
        own = spans[node_span[v]]
        row = []
        for other in net.neighbors(sense):
            for u in by_sense.get(other, ()):
                if not own.overlaps(spans[node_span[u]]):
                    row.append(u)
        row.sort()
        adj.append(row)
    indptr, indices = _csr(adj)
    return CandidateGraph(spans, tuple(senses), np.asarray(node_span, dtype=np.int64),
                          np.asarray(node_rank, dtype=np.int64), indptr, indices)


def max_degree_candidate(g: CandidateGraph, active: Iterable[int] | None = None,
                         present: Iterable[int] | None = None) -> tuple[int, int] | None:
    """Highest-degree node among ``active`` (default: all nodes).

    Degrees count neighbours within ``present`` (default: all nodes).
    Ties go to the longer span, then the earlier span, then candidate order.
    """
    nodes = range(len(g)) if active is None else sorted(set(active))
    keep = None if present is None else set(present)
    prio = g.node_priority()
    best = None
    for v in nodes:
        nb = g.neighbors(v)
        deg = len(nb) if keep is None else sum(1 for u in nb.tolist() if u in keep)
        if best is None or deg > best[1] or (deg == best[1] and prio[v] < prio[best[0]]):
            best = (v, deg)
    return best


@dataclass
class DisambiguationResult:
    spans: tuple[CandidateSpan, ...]
    resolved: dict[CandidateSpan, str]       # insertion order = resolution order
    degrees: list[int]                       # degree of each winner when picked
    unresolved: list[CandidateSpan]
    iterations: int
    stopped_by_threshold: bool
    initial_size: int

    @property
    def order(self) -> list[tuple[CandidateSpan, str, int]]:
        return [(span, sense, d) for (span, sense), d in zip(self.resolved.items(), self.degrees)]

    def at_theta(self, theta: float) -> "DisambiguationResult":
        """Re-threshold a result computed at a smaller or equal theta.

        The selection sequence does not depend on theta; a larger theta only
        cuts it short.
        """
        limit = stopping_threshold(theta, self.initial_size)
        items = list(self.resolved.items())
        for k, d in enumerate(self.degrees):
            if d < limit:
                return _result(self.spans, items[:k], self.degrees[:k], k + 1, True, self.initial_size)
        return _result(self.spans, items, self.degrees, self.iterations, self.stopped_by_threshold,
                       self.initial_size)


def _result(spans, items, degrees, iterations, stopped, initial_size) -> DisambiguationResult:
    resolved = dict(items)
    return DisambiguationResult(spans, resolved, list(degrees), [s for s in spans if s not in resolved],
                                iterations, stopped, initial_size)


def stopping_threshold(theta: float, initial_size: int) -> float:
    return theta * initial_size / 100.0


def disambiguate(g: CandidateGraph, theta: float) -> DisambiguationResult:
    if theta < 0:
        raise ValueError(f"theta must be non-negative, got {theta}")
    ov_ptr, ov_idx = g.span_overlaps()
    sn_ptr, sn_idx = g.span_nodes()
    order, degrees, stopped, iterations = kernels.disambiguation_loop(
        g.indptr, g.indices, g.node_span, g.node_priority(), ov_ptr, ov_idx, sn_ptr, sn_idx,
        len(g.spans), float(stopping_threshold(theta, g.initial_size)))
    items = [(g.span_of(v), g.senses[v]) for v in order.tolist()]
    return _result(g.spans, items, degrees.tolist(), int(iterations), bool(stopped), g.initial_size)


@dataclass
class SemantifiedDocument:
    tokens: list[str]
    source: list[Token]
    result: DisambiguationResult | None = None

    def __str__(self):
        return " ".join(self.tokens)


def render(tokens: Sequence[Token], result: DisambiguationResult | None, net: SemanticNetwork,
           mode: str = "sense") -> list[str]:
    """Replace each resolved span by its sense (or supersense) id; back off to word forms."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    starts = {}
    if mode != "word" and result is not None:
        starts = {span.start: (span, sense) for span, sense in result.resolved.items()}
    out = []
    i = 0
    while i < len(tokens):
        hit = starts.get(i)
        if hit is None:
            out.append(tokens[i].surface.lower())
            i += 1
            continue
        span, sense = hit
        label = sense
        if mode == "supersense":
            label = net.supersense_of(sense) or sense
        out.append(label)
        i += span.length
    return out


def semantify(document: str, net: SemanticNetwork, lexicon: TagLexicon | None = None,
              theta: float = 0.0, mode: str = "sense",
              stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> SemantifiedDocument:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "word":
        toks = tokenize(document)
        return SemantifiedDocument([t.surface.lower() for t in toks], toks)
    tokens, spans = preprocess(document, net, lexicon, stopwords)
    result = disambiguate(build_graph(spans, net), theta)
    return SemantifiedDocument(render(tokens, result, net, mode), tokens, result)
