import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import write
from sensepipe.embeddings import (CompositionError, EmbeddingFormatError, EmbeddingTable, build_sense_table,
                                  compose_sense, compose_supersense, load_bias_lists, load_embeddings,
                                  word_vector_for)
from sensepipe.network import SemanticNetwork


def table(**vecs):
    dim = len(next(iter(vecs.values())))
    t = EmbeddingTable(dim)
    for k, v in vecs.items():
        t[k] = v
    return t


def test_load(tmp_path):
    t = load_embeddings(write(tmp_path / "e.txt", "2 3\na 1 2 3\nb 4 5 6\n"))
    assert len(t) == 2 and t.dimension == 3
    np.testing.assert_array_equal(t["b"], [4, 5, 6])


def test_load_dimension_mismatch(tmp_path):
    with pytest.raises(EmbeddingFormatError, match=":3:"):
        load_embeddings(write(tmp_path / "e.txt", "2 3\na 1 2 3\nb 4 5\n"))


def test_load_malformed_float(tmp_path):
    with pytest.raises(EmbeddingFormatError, match="malformed"):
        load_embeddings(write(tmp_path / "e.txt", "1 2\na 1 x\n"))


def test_load_top(tmp_path):
    t = load_embeddings(write(tmp_path / "e.txt", "2 2\na 1 2\nb 3 4\n"), top=1)
    assert t.keys == ["a"]


def test_later_duplicates_overwrite(tmp_path):
    t = load_embeddings(write(tmp_path / "e.txt", "2 1\na 1\na 2\n"))
    assert len(t) == 1 and t["a"][0] == 2


def test_single_bias_word():
    # e^{-1/5} = 0.8187307530779818
    v = compose_sense(table(w1=[1.0, 0.0], word=[0.0, 1.0]), ["w1"], "word", 5.0)
    np.testing.assert_allclose(v, [0.8187307530779818 / 2, 0.5], rtol=1e-12)


def test_bias_equal_to_word_vector():
    v = compose_sense(table(word=[1.0, 1.0]), ["word"], "word", 5.0)
    np.testing.assert_allclose(v, [0.9093653765389909] * 2, rtol=1e-12)


def test_large_delta_is_plain_mean():
    t = table(a=[1.0, 2.0], b=[3.0, -1.0], c=[0.5, 0.5], word=[0.0, 0.0])
    v = compose_sense(t, ["a", "b", "c"], "word", 1e9) * 2  # undo averaging with a zero word vector
    np.testing.assert_allclose(v, np.mean([t["a"], t["b"], t["c"]], axis=0), rtol=1e-6)


def test_missing_bias_words_keep_rank():
    t = table(a=[1.0], c=[1.0], word=[0.0])
    got = compose_sense(t, ["a", "zz", "c"], "word", 5.0) * 2
    assert got[0] == pytest.approx((math.exp(-1 / 5) + math.exp(-3 / 5)) / 2, rel=1e-12)


def test_composition_errors():
    t = table(a=[1.0])
    with pytest.raises(CompositionError):
        compose_sense(t, ["a"], "nope")
    with pytest.raises(CompositionError):
        compose_sense(t, ["x", "y"], "a")
    with pytest.raises(CompositionError):
        compose_supersense([])
    with pytest.raises(CompositionError):
        compose_supersense([np.zeros(2), np.zeros(3)])


def test_compose_supersense():
    np.testing.assert_array_equal(compose_supersense([np.array([1.0, 0.0]), np.array([0.0, 1.0])]), [0.5, 0.5])
    v = np.array([0.3, -2.0])
    np.testing.assert_array_equal(compose_supersense([v]), v)
    np.testing.assert_allclose(compose_supersense([v] * 5), v, rtol=1e-15)


def test_multiword_word_vector():
    t = table(rock=[1.0, 0.0], band=[0.0, 1.0])
    np.testing.assert_array_equal(word_vector_for(t, "rock band"), [0.5, 0.5])
    t["rock_band"] = [2.0, 2.0]
    np.testing.assert_array_equal(word_vector_for(t, "rock band"), [2.0, 2.0])
    assert word_vector_for(t, "rock star") is None


def net3():
    senses = [("x#1", "noun.group"), ("x#2", "noun.group"), ("y#1", "noun.group"), ("z#1", None)]
    lex = [("x", "NOUN", "x#1"), ("x", "NOUN", "x#2"), ("y", "NOUN", "y#1"), ("z", "NOUN", "z#1")]
    return SemanticNetwork.from_records(senses, [], lex)


def test_build_sense_table_counts():
    words = table(x=[1.0, 0.0])
    out = build_sense_table(words, {"x#1": ["x"]}, net3())
    assert out.keys == ["x", "x#1", "noun.group"]


def test_build_sense_table_skips_unknown_bias(caplog):
    words = table(x=[1.0, 0.0])
    with caplog.at_level(logging.INFO, logger="sensepipe.embeddings"):
        out = build_sense_table(words, {"x#1": ["nothing"], "q#9": ["x"]}, net3())
    assert out.keys == ["x"]
    assert "skipped 2" in caplog.text


def test_supersense_is_mean_of_members(tmp_path):
    words = table(x=[1.0, 0.0], y=[0.0, 2.0], a=[3.0, 1.0], b=[-1.0, 1.0])
    bias = write(tmp_path / "bias.tsv", "x#1\ta,b\nx#2\tb\ny#1\ta\n")
    out = build_sense_table(words, bias, net3(), 5.0)
    e1, e2 = math.exp(-0.2), math.exp(-0.4)
    expect = {
        "x#1": (np.array([e1 * 3 + e2 * -1, e1 * 1 + e2 * 1]) / 2 + [1.0, 0.0]) / 2,
        "x#2": (np.array([e1 * -1, e1 * 1]) + [1.0, 0.0]) / 2,
        "y#1": (np.array([e1 * 3, e1 * 1]) + [0.0, 2.0]) / 2,
    }
    for k, v in expect.items():
        np.testing.assert_allclose(out[k], v, rtol=1e-12)
    np.testing.assert_allclose(out["noun.group"], sum(expect.values()) / 3, rtol=1e-12)


def test_bias_file_format(tmp_path):
    assert load_bias_lists(write(tmp_path / "b.tsv", "s\tw1, w2 ,w3\n")) == {"s": ["w1", "w2", "w3"]}
    with pytest.raises(ValueError):
        load_bias_lists(write(tmp_path / "bad.tsv", "s w1\n"))


vecs = arrays(np.float64, (4, 3), elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=50, deadline=None)
@given(vecs, st.floats(-5, 5, allow_nan=False), st.floats(0.1, 50))
def test_scale_equivariance(m, lam, delta):
    def build(scale):
        return table(a=m[0] * scale, b=m[1] * scale, c=m[2] * scale, word=m[3] * scale)
    base = compose_sense(build(1.0), ["a", "b", "c"], "word", delta)
    scaled = compose_sense(build(lam), ["a", "b", "c"], "word", delta)
    np.testing.assert_allclose(scaled, lam * base, rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(compose_supersense(list(m * lam)), lam * compose_supersense(list(m)),
                               rtol=1e-9, atol=1e-9)


def test_zero_inputs_give_zero():
    z = table(a=[0.0, 0.0], word=[0.0, 0.0])
    np.testing.assert_array_equal(compose_sense(z, ["a"], "word"), [0.0, 0.0])


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (3, 4), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_save_load_round_trip(tmp_path_factory, m):
    t = EmbeddingTable(4, ["a", "b", "c"], m)
    path = tmp_path_factory.mktemp("emb") / "t.txt"
    t.save(path)
    back = load_embeddings(path)
    np.testing.assert_allclose(back.matrix(), m, rtol=1e-8, atol=1e-300)
