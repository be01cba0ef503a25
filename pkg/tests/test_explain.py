import csv
import re

import numpy as np
import pytest

from sentilens.artifact import Predictor
from sentilens.explain import attention_trace, render_heatmap
from sentilens.model import BiLstmAttentionClassifier, ModelConfig
from sentilens.vocab import Vocabulary


@pytest.fixture
def predictor():
    corpus = ["stunning smooth love", "terrible crashes boring", "the game runs fine"]
    vocab = Vocabulary.build(corpus, max_size=50)
    config = ModelConfig(
        vocab_size=vocab.size, embed_dim=4, hidden_dim=3, max_len=6,
        dropout_rate=0.0, seed=21,
    )
    return Predictor(BiLstmAttentionClassifier(config), vocab)


class TestAttentionTrace:
    def test_single_token_review(self, predictor):
        trace = attention_trace(predictor, "stunning")
        assert trace.tokens == ["stunning"]
        np.testing.assert_allclose(trace.weights, [1.0])

    def test_zero_attention_parameters_give_uniform(self, predictor):
        predictor.model.parameters["attention_w"].values[...] = 0.0
        predictor.model.parameters["attention_b"].values[...] = 0.0
        trace = attention_trace(predictor, "the game runs fine")
        np.testing.assert_allclose(trace.weights, np.full(4, 0.25), atol=1e-12)

    def test_weights_sum_to_one(self, predictor):
        trace = attention_trace(predictor, "terrible crashes boring game")
        assert abs(trace.weights.sum() - 1.0) < 1e-9
        assert (trace.weights >= 0).all()
        assert len(trace.tokens) == len(trace.weights)

    def test_empty_after_cleaning_rejected(self, predictor):
        with pytest.raises(ValueError, match="empty"):
            attention_trace(predictor, "1234 !!!")

    def test_invariant_to_url_junk(self, predictor):
        base = attention_trace(predictor, "stunning smooth love")
        noisy = attention_trace(
            predictor, "  Stunning SMOOTH love!!! http://spam.example/x  "
        )
        assert base.tokens == noisy.tokens
        np.testing.assert_array_equal(base.weights, noisy.weights)
        np.testing.assert_array_equal(
            base.class_probabilities, noisy.class_probabilities
        )

    def test_truncation_flagged(self, predictor):
        long_text = " ".join(["game"] * 10)  # max_len is 6
        trace = attention_trace(predictor, long_text)
        assert trace.truncated
        assert len(trace.tokens) == 6


class TestRenderCsv:
    def test_uniform_trace(self, predictor, tmp_path):
        predictor.model.parameters["attention_w"].values[...] = 0.0
        predictor.model.parameters["attention_b"].values[...] = 0.0
        trace = attention_trace(predictor, "the game runs fine")
        path = tmp_path / "trace.csv"
        render_heatmap(trace, "csv", path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["token"] for r in rows] == ["the", "game", "runs", "fine"]
        assert all(float(r["weight"]) == 0.25 for r in rows)

    def test_roundtrip_nine_significant_digits(self, predictor, tmp_path):
        trace = attention_trace(predictor, "stunning smooth love game")
        path = tmp_path / "trace.csv"
        render_heatmap(trace, "csv", path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        for row, weight in zip(rows, trace.weights):
            # the emitted decimal string is exactly the 9-significant-digit
            # rendering of the weight, and parses back to it
            assert row["weight"] == f"{weight:.9g}"
            assert f"{float(row['weight']):.9g}" == row["weight"]

    def test_unknown_format_rejected(self, predictor, tmp_path):
        trace = attention_trace(predictor, "game")
        with pytest.raises(ValueError, match="format"):
            render_heatmap(trace, "svg", tmp_path / "x.svg")


class TestRenderHtml:
    def _opacities(self, html_text):
        return [float(m) for m in re.findall(r"rgba\(\d+, \d+, \d+, ([0-9.]+)\)", html_text)]

    def test_standalone_document_with_hover_weights(self, predictor, tmp_path):
        trace = attention_trace(predictor, "terrible crashes boring")
        path = tmp_path / "trace.html"
        render_heatmap(trace, "html", path)
        text = path.read_text()
        assert text.startswith("<!DOCTYPE html>")
        for token, weight in zip(trace.tokens, trace.weights):
            assert f">{token}</span>" in text
            assert f'title="{weight:.9g}"' in text

    def test_intensity_monotone_in_weight(self, predictor, tmp_path):
        trace = attention_trace(predictor, "stunning smooth love game fine")
        path = tmp_path / "trace.html"
        render_heatmap(trace, "html", path)
        opacities = self._opacities(path.read_text())
        assert len(opacities) == len(trace.weights)
        order = np.argsort(trace.weights)
        sorted_opacities = np.array(opacities)[order]
        assert (np.diff(sorted_opacities) >= 0).all()

    def test_max_weight_full_tint(self, predictor, tmp_path):
        trace = attention_trace(predictor, "stunning smooth love game fine")
        path = tmp_path / "trace.html"
        render_heatmap(trace, "html", path)
        opacities = self._opacities(path.read_text())
        assert max(opacities) == 1.0
