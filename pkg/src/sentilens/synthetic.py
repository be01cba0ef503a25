"""Lexicon-planted synthetic review corpus.

Documents are neutral filler tokens with one to three cue words from the
class's sentiment lexicon planted at random positions. Useful for
end-to-end pipeline checks where the ground-truth signal (which token
carries the sentiment) is known exactly.
"""

import string

import numpy as np

from .ingest import ReviewRecord

POSITIVE_CUES = (
    "stunning", "smooth", "love", "great", "fantastic",
    "awesome", "fun", "beautiful", "enjoyable", "polished",
)
NEGATIVE_CUES = (
    "terrible", "crashes", "boring", "broken", "awful",
    "buggy", "laggy", "unplayable", "refund", "disappointing",
)
_CUE_SET = set(POSITIVE_CUES) | set(NEGATIVE_CUES)


def _filler_words(rng: np.random.Generator, count: int) -> list[str]:
    letters = np.array(list(string.ascii_lowercase))
    words = set()
    while len(words) < count:
        length = int(rng.integers(3, 9))
        word = "".join(rng.choice(letters, size=length))
        if word not in _CUE_SET:
            words.add(word)
    return sorted(words)


def cue_positions(tokens: list[str]) -> list[int]:
    """Indices of tokens that belong to either sentiment lexicon."""
    return [i for i, tok in enumerate(tokens) if tok in _CUE_SET]


def generate_corpus(
    num_documents: int = 5000,
    positive_fraction: float = 0.9,
    seed: int = 42,
    num_filler_words: int = 180,
    min_length: int = 6,
    max_length: int = 24,
    max_cues: int = 3,
    label_noise: float = 0.0,
) -> list[ReviewRecord]:
    """Generate records with source-style labels (1 positive, -1 negative).

    A fraction ``label_noise`` of documents keeps its planted cues but has
    the label flipped, bounding attainable accuracy. Texts include mild
    raw-text noise (capitalization, punctuation, stray URLs) so the corpus
    exercises the cleaning pipeline.
    """
    rng = np.random.default_rng(seed)
    fillers = _filler_words(rng, num_filler_words)
    records = []
    num_positive = int(round(num_documents * positive_fraction))
    for doc_index in range(num_documents):
        positive = doc_index < num_positive
        cues = POSITIVE_CUES if positive else NEGATIVE_CUES
        length = int(rng.integers(min_length, max_length + 1))
        tokens = list(rng.choice(fillers, size=length))
        for _ in range(int(rng.integers(1, max_cues + 1))):
            cue = cues[int(rng.integers(0, len(cues)))]
            tokens.insert(int(rng.integers(0, len(tokens) + 1)), cue)
        if rng.random() < 0.1:
            tokens.insert(0, "Check")
            tokens.insert(1, "http://store.example/app")
        if rng.random() < 0.3:
            tokens[-1] = tokens[-1] + "!!!"
        if rng.random() < 0.2:
            tokens[0] = tokens[0].capitalize()
        label = 1 if positive else -1
        if label_noise and rng.random() < label_noise:
            label = -label
        records.append(ReviewRecord(text=" ".join(tokens), label=label))
    order = rng.permutation(num_documents)
    return [records[i] for i in order]


def write_corpus_csv(records, path, text_column="review_text", label_column="review_score"):
    """Write records in the raw-corpus CSV layout."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([text_column, label_column])
        for rec in records:
            writer.writerow([rec.text, rec.label])
    return path
