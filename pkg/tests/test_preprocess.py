import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import OASIS, write
from sensepipe.network import LexKey, SemanticNetwork
from sensepipe.preprocess import (NONE, TagLexicon, extract_spans, load_stopwords, preprocess, tag_and_lemmatize,
                                  tokenize)


def surfaces(text):
    return [t.surface for t in tokenize(text)]


@pytest.mark.parametrize("text, expected", [
    ("Oasis were a rock band.", ["Oasis", "were", "a", "rock", "band", "."]),
    ("", []),
    ("F1's win-rate!", ["F1", "'s", "win-rate", "!"]),
    ("(hello)", ["(", "hello", ")"]),
    ("don't  stop...", ["do", "n't", "stop", ".", ".", "."]),
    ("3-2 in 2016", ["3-2", "in", "2016"]),
])
def test_tokenize(text, expected):
    assert surfaces(text) == expected


@given(st.text())
def test_tokenize_positions_consecutive(text):
    toks = tokenize(text)
    assert [t.position for t in toks] == list(range(len(toks)))
    assert all(t.surface and not any(c.isspace() for c in t.surface) for t in toks)


def test_tagging_rules():
    lex = TagLexicon({"bands": ("NOUN", "band")})
    toks = tag_and_lemmatize(tokenize("bands the zorblax ."), lex)
    assert [(t.lemma, t.pos) for t in toks] == [("band", "NOUN"), ("the", NONE), ("zorblax", "NOUN"), (".", NONE)]


def test_lexicon_lookup_falls_back_to_lowercase(tmp_path):
    path = write(tmp_path / "lex.tsv", "ran\tVERB\trun\nbank\tNOUN\tbank\n")
    lex = TagLexicon.load(path)
    toks = tag_and_lemmatize(tokenize("Ran Bank"), lex)
    assert [(t.lemma, t.pos) for t in toks] == [("run", "VERB"), ("bank", "NOUN")]


def test_lexicon_first_entry_wins():
    lex = TagLexicon()
    lex.add("saw", "VERB", "see")
    lex.add("saw", "NOUN", "saw")
    assert lex.lookup("saw") == ("VERB", "see")


def test_stopword_file(tmp_path):
    sw = load_stopwords(write(tmp_path / "sw.txt", "Foo\nbar\n"))
    assert sw == {"foo", "bar"}
    toks = tag_and_lemmatize(tokenize("foo the"), stopwords=sw)
    assert [t.pos for t in toks] == [NONE, "NOUN"]


def test_bundled_stopwords_size():
    sw = load_stopwords()
    assert 100 <= len(sw) <= 140
    assert {"were", "a", "from", "the"} <= sw


def test_oasis_spans(oasis_net):
    _, spans = preprocess(OASIS, oasis_net)
    assert [(s.start, s.length, s.key.lemma) for s in spans] == [
        (0, 1, "oasis"), (3, 2, "rock band"), (3, 1, "rock"), (4, 1, "band"), (6, 1, "manchester")]
    for s in spans:
        assert list(s.candidates) == oasis_net.candidates(s.key)


def test_no_lemma_in_network(oasis_net):
    assert preprocess("nothing matches here", oasis_net)[1] == []


def test_trigram_and_unigram_coexist():
    net = SemanticNetwork.from_records(
        [("nyc", None), ("city", None)], [],
        [("new york city", "NOUN", "nyc"), ("city", "NOUN", "city")])
    _, spans = preprocess("I love New York City", net)
    # windows by hand: "new york city" at 2 (len 3) and "city" at 4 (len 1)
    assert [(s.start, s.length) for s in spans] == [(2, 3), (4, 1)]


def test_multiword_pos_from_last_content_token():
    net = SemanticNetwork.from_records([("x", None)], [], [("take off", "VERB", "x")])
    lex = TagLexicon({"take": ("VERB", "take"), "off": ("NONE", "off")})
    _, spans = preprocess("take off", net, lex)
    assert [(s.key.lemma, s.key.pos) for s in spans] == [("take off", "VERB")]


def test_stopword_never_a_unigram_span():
    net = SemanticNetwork.from_records([("the#x", None)], [], [("the", "NOUN", "the#x")])
    assert preprocess("the", net)[1] == []


def test_monotone_under_lexicalization_removal(oasis_net):
    reduced = SemanticNetwork.from_records(
        [(s, oasis_net.supersense_of(s)) for s in oasis_net.senses], oasis_net.edges(),
        [(k.lemma, k.pos, s) for k, ids in oasis_net.lex_items() if k.lemma != "rock band" for s in ids])
    full = {(s.start, s.length) for s in preprocess(OASIS, oasis_net)[1]}
    less = {(s.start, s.length) for s in preprocess(OASIS, reduced)[1]}
    assert less <= full and (3, 2) not in less


def test_spans_sorted(oasis_net):
    _, spans = preprocess("rock band rock band Oasis", oasis_net)
    keys = [(s.start, -s.length) for s in spans]
    assert keys == sorted(keys)
    assert LexKey("rock band") in {s.key for s in spans}
