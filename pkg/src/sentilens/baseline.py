"""TF-IDF features with a class-weighted logistic-regression baseline,
evaluated under stratified k-fold cross-validation.

The weighting is the classic smoothed form, idf(t) = ln((1+N)/(1+df)) + 1
with raw in-document counts and Euclidean normalization. The classifier is
deliberately plain: full-batch gradient descent from zero initialization,
so runs are exactly reproducible.
"""

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import NumericError
from .metrics import weighted_f1
from .textprep import tokenize

logger = logging.getLogger(__name__)


@dataclass
class SparseVector:
    """Strictly index-sorted (index, value) pairs; unit Euclidean norm for
    any nonempty document."""

    entries: list[tuple[int, float]]

    def norm(self) -> float:
        return float(np.sqrt(sum(v * v for _, v in self.entries)))


class TfidfModel:
    def __init__(self, term_to_index: dict[str, int], idf: np.ndarray, num_documents: int):
        self.term_to_index = term_to_index
        self.idf = idf
        self.num_documents = num_documents

    @property
    def num_features(self) -> int:
        return len(self.term_to_index)


def tfidf_fit(corpus: list[str], max_features: int = 20000) -> TfidfModel:
    """Fit on cleaned texts: vocabulary is the ``max_features`` terms with
    highest document frequency (ties lexicographic ascending)."""
    if not corpus:
        raise ValueError("cannot fit TF-IDF on an empty corpus")
    doc_freq = Counter()
    for text in corpus:
        doc_freq.update(set(tokenize(text)))
    ranked = sorted(doc_freq.items(), key=lambda kv: (-kv[1], kv[0]))[:max_features]
    term_to_index = {term: i for i, (term, _) in enumerate(ranked)}
    n = len(corpus)
    idf = np.zeros(len(ranked))
    for term, df in ranked:
        idf[term_to_index[term]] = np.log((1.0 + n) / (1.0 + df)) + 1.0
    return TfidfModel(term_to_index, idf, n)


def tfidf_transform(doc: str, model: TfidfModel) -> SparseVector:
    """count(t, doc) * idf(t), Euclidean-normalized; unseen terms are
    ignored (a document of only unseen terms yields the empty vector)."""
    counts = Counter(tokenize(doc))
    raw = []
    for term, count in counts.items():
        idx = model.term_to_index.get(term)
        if idx is not None:
            raw.append((idx, count * model.idf[idx]))
    if not raw:
        return SparseVector(entries=[])
    norm = np.sqrt(sum(v * v for _, v in raw))
    return SparseVector(entries=sorted((i, v / norm) for i, v in raw))


def _to_csr(vectors: list[SparseVector], num_features: int) -> sparse.csr_matrix:
    data, col_indices, indptr = [], [], [0]
    for vec in vectors:
        for idx, val in vec.entries:
            col_indices.append(idx)
            data.append(val)
        indptr.append(len(data))
    return sparse.csr_matrix(
        (data, col_indices, indptr), shape=(len(vectors), num_features)
    )


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float

    def decision(self, matrix) -> np.ndarray:
        return matrix @ self.weights + self.bias

    def predict(self, matrix) -> np.ndarray:
        return (self.decision(matrix) >= 0.0).astype(np.int64)


def train_linear(
    vectors: list[SparseVector],
    labels,
    class_weights=(1.0, 1.0),
    epochs: int = 300,
    learning_rate: float = 1.0,
    num_features: int = None,
) -> LinearModel:
    """Logistic regression minimizing class-weighted mean log-loss by
    full-batch gradient descent from zero initialization.

    Aborts with ``NumericError`` if the loss increases for 10 consecutive
    epochs (divergence guard).
    """
    labels = np.asarray(labels, dtype=np.int64)
    if not ((labels == 0).any() and (labels == 1).any()):
        raise ValueError("both classes must be present")
    if num_features is None:
        num_features = 1 + max(
            (i for vec in vectors for i, _ in vec.entries), default=-1
        )
    matrix = _to_csr(vectors, num_features)
    sample_w = np.asarray(class_weights, dtype=np.float64)[labels]
    w_total = float(sample_w.sum())

    weights = np.zeros(num_features)
    bias = 0.0
    prev_loss = np.inf
    rising = 0
    for epoch in range(epochs):
        z = matrix @ weights + bias
        with np.errstate(over="ignore"):
            p = 1.0 / (1.0 + np.exp(-z))
        p_true = np.where(labels == 1, p, 1.0 - p)
        loss = float(np.sum(sample_w * -np.log(np.maximum(p_true, 1e-12))) / w_total)
        if loss > prev_loss:
            rising += 1
            if rising >= 10:
                raise NumericError(
                    f"baseline diverged: loss rose for 10 consecutive epochs "
                    f"(epoch {epoch}, loss {loss:.6f})"
                )
        else:
            rising = 0
        prev_loss = loss
        residual = sample_w * (p - labels) / w_total
        weights -= learning_rate * (matrix.T @ residual)
        bias -= learning_rate * float(residual.sum())
    return LinearModel(weights=weights, bias=bias)


@dataclass
class CrossValidationResult:
    fold_f1: list[float]
    mean_f1: float
    fold_sizes: list[dict]


def stratified_kfold_cv(
    records,
    k: int = 3,
    seed: int = 42,
    max_features: int = 20000,
    epochs: int = 300,
    learning_rate: float = 1.0,
) -> CrossValidationResult:
    """Stratified k-fold CV of the TF-IDF + logistic-regression pipeline.

    ``records`` is a list of (cleaned_text, label) with labels 0/1. Folds
    are assigned round-robin within each class after a seeded shuffle; the
    TF-IDF vocabulary and idf table are refit on each training fold only
    (no test-fold leakage). Returns per-fold weighted F1 and the mean.
    """
    texts = [r[0] for r in records]
    labels = np.asarray([r[1] for r in records], dtype=np.int64)
    rng = np.random.default_rng(seed)
    fold_of = np.zeros(len(records), dtype=np.int64)
    for cls in (0, 1):
        members = np.flatnonzero(labels == cls)
        if len(members) < k:
            raise ValueError(
                f"class {cls} has {len(members)} members; need at least k={k}"
            )
        members = members[rng.permutation(len(members))]
        fold_of[members] = np.arange(len(members)) % k

    fold_scores = []
    fold_sizes = []
    for fold in range(k):
        test_idx = np.flatnonzero(fold_of == fold)
        train_idx = np.flatnonzero(fold_of != fold)
        tfidf = tfidf_fit([texts[i] for i in train_idx], max_features=max_features)
        train_vecs = [tfidf_transform(texts[i], tfidf) for i in train_idx]
        test_vecs = [tfidf_transform(texts[i], tfidf) for i in test_idx]
        train_labels = labels[train_idx]
        counts_neg = int((train_labels == 0).sum())
        counts_pos = int((train_labels == 1).sum())
        class_weights = (
            len(train_labels) / (2.0 * counts_neg),
            len(train_labels) / (2.0 * counts_pos),
        )
        model = train_linear(
            train_vecs,
            train_labels,
            class_weights=class_weights,
            epochs=epochs,
            learning_rate=learning_rate,
            num_features=tfidf.num_features,
        )
        predictions = model.predict(_to_csr(test_vecs, tfidf.num_features))
        score = weighted_f1(predictions, labels[test_idx])
        fold_scores.append(score)
        fold_sizes.append(
            {
                "fold": fold,
                "test_total": len(test_idx),
                "test_positive": int(labels[test_idx].sum()),
                "test_negative": int((labels[test_idx] == 0).sum()),
                "tfidf_documents": tfidf.num_documents,
            }
        )
        logger.info("fold %d: weighted F1 = %.4f", fold, score)
    return CrossValidationResult(
        fold_f1=fold_scores,
        mean_f1=float(np.mean(fold_scores)),
        fold_sizes=fold_sizes,
    )
