import math

import numpy as np
import pytest

from sentilens.baseline import (
    LinearModel,
    SparseVector,
    _to_csr,
    stratified_kfold_cv,
    tfidf_fit,
    tfidf_transform,
    train_linear,
)
from sentilens.errors import NumericError


class TestTfidfFit:
    def test_two_document_idf_values(self):
        model = tfidf_fit(["a b", "a c"])
        # df(a)=2 -> idf = ln(3/3)+1 = 1; df(b)=1 -> ln(3/2)+1
        assert model.idf[model.term_to_index["a"]] == 1.0
        expected = math.log(3.0 / 2.0) + 1.0
        assert abs(model.idf[model.term_to_index["b"]] - expected) < 1e-12
        assert abs(expected - 1.4054651081) < 1e-9

    def test_single_document_idf_is_one(self):
        model = tfidf_fit(["x y z"])
        np.testing.assert_allclose(model.idf, 1.0)

    def test_max_features_by_document_frequency(self):
        model = tfidf_fit(["a b", "a c"], max_features=1)
        assert set(model.term_to_index) == {"a"}

    def test_tie_break_lexicographic(self):
        model = tfidf_fit(["b a", "a b"], max_features=1)
        assert set(model.term_to_index) == {"a"}

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            tfidf_fit([])

    def test_idf_positive_and_finite(self):
        model = tfidf_fit(["a b c", "a b", "a"])
        assert (model.idf > 0).all()
        assert np.isfinite(model.idf).all()


class TestTfidfTransform:
    def test_hand_computed_example(self):
        model = tfidf_fit(["a b", "a c"])
        vec = tfidf_transform("a a b", model)
        idf_b = math.log(3.0 / 2.0) + 1.0
        norm = math.sqrt(2.0**2 + idf_b**2)
        expected = {model.term_to_index["a"]: 2.0 / norm, model.term_to_index["b"]: idf_b / norm}
        assert dict(vec.entries) == pytest.approx(expected)

    def test_unseen_terms_only_gives_empty_vector(self):
        model = tfidf_fit(["a b"])
        assert tfidf_transform("z q", model).entries == []

    def test_unit_norm(self):
        model = tfidf_fit(["a b c", "b c d", "c d e"])
        for doc in ("a", "a b", "c d e e e", "b"):
            vec = tfidf_transform(doc, model)
            assert abs(vec.norm() - 1.0) < 1e-12

    def test_repetition_scale_free(self):
        model = tfidf_fit(["a b", "a c"])
        once = tfidf_transform("a b", model)
        twice = tfidf_transform("a b a b", model)
        assert [i for i, _ in once.entries] == [i for i, _ in twice.entries]
        np.testing.assert_allclose(
            [v for _, v in once.entries], [v for _, v in twice.entries], atol=1e-15
        )

    def test_indices_strictly_increasing(self):
        model = tfidf_fit(["e d c b a"])
        vec = tfidf_transform("a c e", model)
        idx = [i for i, _ in vec.entries]
        assert idx == sorted(idx)
        assert len(set(idx)) == len(idx)


def separable_toy_set():
    """2-D points, class 1 iff feature 0 dominates."""
    vectors = []
    labels = []
    for x0, x1, y in [
        (0.9, 0.1, 1), (0.8, 0.3, 1), (0.95, 0.05, 1), (0.7, 0.2, 1),
        (0.1, 0.9, 0), (0.2, 0.85, 0), (0.05, 0.95, 0), (0.3, 0.7, 0),
    ]:
        vectors.append(SparseVector(entries=[(0, x0), (1, x1)]))
        labels.append(y)
    return vectors, np.array(labels)


class TestTrainLinear:
    def test_separable_set_reaches_perfect_accuracy(self):
        vectors, labels = separable_toy_set()
        model = train_linear(vectors, labels, epochs=500, learning_rate=1.0)
        preds = model.predict(_to_csr(vectors, 2))
        assert (preds == labels).all()

    def test_uniform_weight_scaling_is_identical(self):
        vectors, labels = separable_toy_set()
        m1 = train_linear(vectors, labels, class_weights=(1.0, 1.0), epochs=300)
        m2 = train_linear(vectors, labels, class_weights=(2.0, 2.0), epochs=300)
        matrix = _to_csr(vectors, 2)
        np.testing.assert_array_equal(m1.predict(matrix), m2.predict(matrix))
        np.testing.assert_allclose(m1.weights, m2.weights, atol=1e-12)

    def test_gradient_at_zero_weights_closed_form(self):
        # single feature: grad = sum(w_i (p - y_i) x_i) / sum(w_i), p = 0.5
        vectors = [SparseVector(entries=[(0, x)]) for x in (1.0, 2.0, -1.0)]
        labels = np.array([1, 0, 1])
        cw = (3.0, 1.0)
        sample_w = np.array([cw[y] for y in labels])
        expected_grad = float(
            np.sum(sample_w * (0.5 - labels) * np.array([1.0, 2.0, -1.0]))
            / sample_w.sum()
        )
        lr = 0.25
        model = train_linear(vectors, labels, class_weights=cw, epochs=1, learning_rate=lr)
        assert abs(model.weights[0] - (-lr * expected_grad)) < 1e-12

    def test_single_class_rejected(self):
        vectors = [SparseVector(entries=[(0, 1.0)])] * 3
        with pytest.raises(ValueError):
            train_linear(vectors, [1, 1, 1])

    def test_divergence_guard(self):
        # gradient ascent makes the loss rise every epoch, so the
        # 10-consecutive-increase guard must fire
        vectors, labels = separable_toy_set()
        with pytest.raises(NumericError, match="diverged"):
            train_linear(vectors, labels, epochs=400, learning_rate=-0.5)

    def test_deterministic_from_zero_init(self):
        vectors, labels = separable_toy_set()
        m1 = train_linear(vectors, labels, epochs=100)
        m2 = train_linear(vectors, labels, epochs=100)
        np.testing.assert_array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias


def lexicon_corpus(n_pos, n_neg, seed=0):
    rng = np.random.default_rng(seed)
    filler = "alpha bravo charlie delta echo foxtrot golf hotel".split()
    records = []
    for i in range(n_pos + n_neg):
        label = 1 if i < n_pos else 0
        cue = "great" if label else "awful"
        words = list(rng.choice(filler, size=5))
        words.insert(int(rng.integers(0, 6)), cue)
        records.append((" ".join(words), label))
    order = rng.permutation(len(records))
    return [records[i] for i in order]


class TestStratifiedKfoldCv:
    def test_exact_fold_stratification(self):
        records = lexicon_corpus(6, 3)
        result = stratified_kfold_cv(records, k=3, seed=1, epochs=50)
        for sizes in result.fold_sizes:
            assert sizes["test_positive"] == 2
            assert sizes["test_negative"] == 1

    def test_folds_partition_dataset(self):
        records = lexicon_corpus(9, 6)
        result = stratified_kfold_cv(records, k=3, seed=2, epochs=50)
        assert sum(s["test_total"] for s in result.fold_sizes) == 15

    def test_no_leakage_refit_per_fold(self):
        records = lexicon_corpus(6, 3)
        result = stratified_kfold_cv(records, k=3, seed=3, epochs=50)
        for sizes in result.fold_sizes:
            assert sizes["tfidf_documents"] == 9 - sizes["test_total"]

    def test_learnable_corpus_scores_high(self):
        records = lexicon_corpus(40, 20, seed=4)
        result = stratified_kfold_cv(records, k=3, seed=4, epochs=300)
        assert result.mean_f1 > 0.95
        assert result.mean_f1 == pytest.approx(np.mean(result.fold_f1))

    def test_class_smaller_than_k(self):
        records = lexicon_corpus(6, 2)
        with pytest.raises(ValueError, match="at least k"):
            stratified_kfold_cv(records, k=3)


class TestLinearModelPrediction:
    def test_decision_threshold(self):
        model = LinearModel(weights=np.array([1.0, -1.0]), bias=0.0)
        matrix = _to_csr(
            [SparseVector(entries=[(0, 1.0)]), SparseVector(entries=[(1, 1.0)])], 2
        )
        np.testing.assert_array_equal(model.predict(matrix), [1, 0])
