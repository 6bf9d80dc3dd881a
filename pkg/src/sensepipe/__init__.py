"""Sense-level text classification: graph-degree disambiguation + CNN/LSTM classifier."""
from .disambiguate import (CandidateGraph, DisambiguationResult, SemantifiedDocument, build_graph, disambiguate,
                           max_degree_candidate, semantify)
from .network import LexKey, SemanticNetwork, load_network, save_network
from .preprocess import CandidateSpan, TagLexicon, Token, extract_spans, tag_and_lemmatize, tokenize

__version__ = "0.1.0"


def oasis_network_path():
    """Directory of the bundled 'Oasis were a rock band from Manchester' network."""
    from importlib import resources

    return resources.files("sensepipe.data") / "oasis"
