"""Frequency-ranked vocabulary and fixed-length index encoding.

Index 0 is reserved for padding, index 1 for out-of-vocabulary tokens;
content tokens occupy 2..size-1 densely, ordered by descending corpus
frequency with lexicographic tie-breaking.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .textprep import tokenize

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
PAD_INDEX = 0
UNK_INDEX = 1


class Vocabulary:
    """Token <-> index mapping with two reserved specials."""

    def __init__(self, content_tokens: list[str]):
        self.index_to_token = [PAD_TOKEN, UNK_TOKEN, *content_tokens]
        self.token_to_index = {tok: i for i, tok in enumerate(self.index_to_token)}
        if len(self.token_to_index) != len(self.index_to_token):
            raise ValueError("duplicate tokens in vocabulary")

    @classmethod
    def build(cls, corpus: list[str], max_size: int) -> "Vocabulary":
        """Build from cleaned texts, keeping the ``max_size`` most frequent
        tokens (ties broken lexicographically ascending)."""
        if max_size < 1:
            raise ValueError("max_size must be >= 1")
        counts = Counter()
        for text in corpus:
            counts.update(tokenize(text))
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls([tok for tok, _ in ranked[:max_size]])

    @property
    def size(self) -> int:
        return len(self.index_to_token)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    def content_tokens(self) -> list[str]:
        return self.index_to_token[2:]


@dataclass
class EncodedExample:
    """A review as a fixed-length index sequence plus its true length."""

    indices: np.ndarray  # shape (max_len,), int64
    length: int
    label: int


def encode(text: str, vocab: Vocabulary, max_len: int, label: int) -> EncodedExample:
    """Encode a cleaned text into indices, truncating to the first
    ``max_len`` tokens and padding at the end with 0."""
    tokens = tokenize(text)
    if not tokens:
        raise ValueError("cannot encode empty text; drop empty records at ingest")
    kept = tokens[:max_len]
    indices = np.zeros(max_len, dtype=np.int64)
    for t, tok in enumerate(kept):
        indices[t] = vocab.token_to_index.get(tok, UNK_INDEX)
    return EncodedExample(indices=indices, length=len(kept), label=label)


def decode(indices: np.ndarray, length: int, vocab: Vocabulary) -> str:
    """Inverse of :func:`encode` for in-vocabulary, untruncated inputs."""
    return " ".join(vocab.index_to_token[int(i)] for i in indices[:length])


def encode_corpus(texts, labels, vocab: Vocabulary, max_len: int):
    """Encode many cleaned texts into dense arrays.

    Returns (indices (N, max_len) int64, lengths (N,) int64,
    labels (N,) int64).
    """
    n = len(texts)
    indices = np.zeros((n, max_len), dtype=np.int64)
    lengths = np.zeros(n, dtype=np.int64)
    out_labels = np.asarray(labels, dtype=np.int64)
    for row, text in enumerate(texts):
        ex = encode(text, vocab, max_len, int(out_labels[row]))
        indices[row] = ex.indices
        lengths[row] = ex.length
    return indices, lengths, out_labels
