import numpy as np
import pytest
from hypothesis import given, strategies as st

from sentilens.vocab import (
    PAD_INDEX,
    UNK_INDEX,
    Vocabulary,
    decode,
    encode,
    encode_corpus,
)


def test_specials_reserved():
    vocab = Vocabulary.build(["good good bad"], max_size=20000)
    assert vocab.token_to_index["<pad>"] == PAD_INDEX == 0
    assert vocab.token_to_index["<unk>"] == UNK_INDEX == 1
    assert vocab.token_to_index["good"] == 2
    assert vocab.token_to_index["bad"] == 3
    assert vocab.size == 4


def test_frequency_cap():
    vocab = Vocabulary.build(["a b", "b c"], max_size=1)
    assert vocab.content_tokens() == ["b"]
    assert vocab.token_to_index["b"] == 2


def test_lexicographic_tie_break():
    vocab = Vocabulary.build(["x y"], max_size=20000)
    assert vocab.token_to_index["x"] == 2
    assert vocab.token_to_index["y"] == 3


def test_max_size_validation():
    with pytest.raises(ValueError):
        Vocabulary.build(["a"], max_size=0)


def test_empty_corpus_gives_specials_only():
    vocab = Vocabulary.build([], max_size=10)
    assert vocab.size == 2


def test_inverse_maps():
    vocab = Vocabulary.build(["one two three two three three"], max_size=100)
    for token, idx in vocab.token_to_index.items():
        assert vocab.index_to_token[idx] == token


def test_encode_pads_at_end():
    vocab = Vocabulary.build(["good good bad"], max_size=20000)
    ex = encode("good bad", vocab, max_len=4, label=1)
    assert ex.indices.tolist() == [2, 3, 0, 0]
    assert ex.length == 2
    assert ex.label == 1


def test_encode_unknown_token():
    vocab = Vocabulary.build(["good good bad"], max_size=20000)
    ex = encode("good zzz", vocab, max_len=4, label=0)
    assert ex.indices.tolist() == [2, UNK_INDEX, 0, 0]
    assert ex.length == 2


def test_encode_empty_raises():
    vocab = Vocabulary.build(["good"], max_size=10)
    with pytest.raises(ValueError):
        encode("", vocab, max_len=4, label=0)


def test_truncation_keeps_prefix():
    # 150 distinct tokens; only the first 100 must survive, in order.
    tokens = [f"tok{chr(97 + i // 26)}{chr(97 + i % 26)}" for i in range(150)]
    text = " ".join(tokens)
    vocab = Vocabulary.build([text], max_size=20000)
    ex = encode(text, vocab, max_len=100, label=1)
    assert ex.length == 100
    recovered = [vocab.index_to_token[i] for i in ex.indices]
    assert recovered == tokens[:100]


def test_coverage_monotone_in_max_size():
    corpus = ["a a a b b c d d d d e"]
    small = set(Vocabulary.build(corpus, max_size=2).content_tokens())
    large = set(Vocabulary.build(corpus, max_size=4).content_tokens())
    assert small <= large


def test_decode_roundtrip():
    corpus = ["the game is fun", "the game crashes"]
    vocab = Vocabulary.build(corpus, max_size=100)
    for text in corpus:
        ex = encode(text, vocab, max_len=10, label=1)
        assert decode(ex.indices, ex.length, vocab) == text


@given(
    st.lists(
        st.lists(st.sampled_from("ab bc cd de ef fg gh".split()), min_size=1, max_size=20),
        min_size=1,
        max_size=15,
    )
)
def test_encoded_indices_within_bounds(docs):
    texts = [" ".join(doc) for doc in docs]
    vocab = Vocabulary.build(texts, max_size=5)
    for text in texts:
        ex = encode(text, vocab, max_len=8, label=0)
        assert ex.indices.max() < vocab.size
        assert ex.indices.min() >= 0
        assert 1 <= ex.length <= 8
        assert (ex.indices[ex.length :] == 0).all()
        assert (ex.indices[: ex.length] != 0).all()


def test_encode_corpus_shapes():
    vocab = Vocabulary.build(["good bad", "bad ugly"], max_size=100)
    indices, lengths, labels = encode_corpus(
        ["good bad", "bad ugly good"], [1, 0], vocab, max_len=5
    )
    assert indices.shape == (2, 5)
    assert lengths.tolist() == [2, 3]
    assert labels.tolist() == [1, 0]
    assert indices.dtype == np.int64
