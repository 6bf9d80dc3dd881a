"""Synthetic corpora whose classes differ only in the senses of shared words.

Every ambiguous term ``tNN`` has two senses, ``tNN#a`` and ``tNN#b``. The
``#a`` senses form cliques over one partition of the terms into groups,
the ``#b`` senses over a second partition chosen so that no two terms
share a group in both. A class-``a`` document draws its terms from one
``a`` group, a class-``b`` document from one ``b`` group, and both pad
with the same unambiguous filler words. Every term is equally frequent
in both classes, so only co-occurrence (that is, sense) separates them.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .network import SemanticNetwork


def _partitions(n_groups: int, group_size: int) -> tuple[list[list[int]], list[list[int]]]:
    # terms laid out on an n_groups x group_size grid: rows vs. shifted diagonals
    rows = [[g * group_size + j for j in range(group_size)] for g in range(n_groups)]
    diags = [[((g + j) % n_groups) * group_size + j for j in range(group_size)] for g in range(n_groups)]
    return rows, diags


def make_ambiguity_network(n_groups: int = 6, group_size: int = 3) -> tuple[SemanticNetwork, list, list]:
    if group_size > n_groups:
        raise ValueError("group_size must not exceed n_groups")
    part_a, part_b = _partitions(n_groups, group_size)
    n_terms = n_groups * group_size
    terms = [f"t{i:02d}" for i in range(n_terms)]
    senses = []
    for t in terms:
        senses += [(f"{t}#a", "topic.a"), (f"{t}#b", "topic.b")]
    edges = []
    for part, tag in ((part_a, "a"), (part_b, "b")):
        for group in part:
            edges += [(f"{terms[x]}#{tag}", f"{terms[y]}#{tag}") for x, y in combinations(group, 2)]
    lex = [(t, "NOUN", f"{t}#{tag}") for t in terms for tag in ("a", "b")]
    net = SemanticNetwork.from_records(senses, edges, lex)
    return net, [[terms[i] for i in g] for g in part_a], [[terms[i] for i in g] for g in part_b]


def make_ambiguity_corpus(n_docs: int = 200, doc_len: int = 50, n_groups: int = 6, group_size: int = 3,
                          mentions: int = 2, n_fillers: int = 60, seed: int = 0):
    """Return ``(network, [(label, text), ...])`` with balanced labels ``a``/``b``."""
    net, groups_a, groups_b = make_ambiguity_network(n_groups, group_size)
    rng = np.random.default_rng(seed)
    fillers = [f"w{i:02d}" for i in range(n_fillers)]
    docs = []
    for i in range(n_docs):
        label = "a" if i % 2 == 0 else "b"
        groups = groups_a if label == "a" else groups_b
        group = groups[rng.integers(len(groups))]
        words = [t for t in group for _ in range(mentions)]
        words += [fillers[j] for j in rng.integers(n_fillers, size=doc_len - len(words))]
        rng.shuffle(words)
        docs.append((label, " ".join(words)))
    return net, docs
