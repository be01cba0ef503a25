"""Sentiment classification toolkit for game reviews.

A self-contained numpy implementation of a bidirectional-LSTM classifier
with attention pooling: text preparation, vocabulary encoding, a minimal
reverse-mode autodiff engine, class-weighted Adam training with early
stopping, evaluation metrics, attention-based explanations, and a TF-IDF
logistic-regression baseline.
"""

__version__ = "0.1.0"

from .artifact import Predictor, load_model, save_model
from .explain import AttentionTrace, attention_trace, render_heatmap
from .ingest import (
    ClassCounts,
    CorpusSplit,
    ReviewRecord,
    class_distribution,
    load_corpus,
    prepare_corpus,
    stratified_split,
)
from .metrics import ClassificationReport, classification_report, confusion_matrix
from .model import (
    BiLstmAttentionClassifier,
    ForwardOutput,
    ModelConfig,
    ModelParameters,
    count_parameters,
)
from .textprep import clean_text
from .train import (
    AdamState,
    EarlyStopping,
    TrainConfig,
    TrainHistory,
    adam_step,
    compute_class_weights,
    train_model,
    weighted_cross_entropy,
)
from .vocab import EncodedExample, Vocabulary, encode, encode_corpus

__all__ = [
    "AdamState",
    "AttentionTrace",
    "BiLstmAttentionClassifier",
    "ClassCounts",
    "ClassificationReport",
    "CorpusSplit",
    "EarlyStopping",
    "EncodedExample",
    "ForwardOutput",
    "ModelConfig",
    "ModelParameters",
    "Predictor",
    "ReviewRecord",
    "TrainConfig",
    "TrainHistory",
    "Vocabulary",
    "adam_step",
    "attention_trace",
    "class_distribution",
    "classification_report",
    "clean_text",
    "compute_class_weights",
    "confusion_matrix",
    "count_parameters",
    "encode",
    "encode_corpus",
    "load_corpus",
    "load_model",
    "prepare_corpus",
    "render_heatmap",
    "save_model",
    "stratified_split",
    "train_model",
    "weighted_cross_entropy",
]
