"""Class-weighted training with Adam, early stopping, and history export.

The loss is a weighted mean: sum of w[y_i] * (-ln p_i[y_i]) divided by the
sum of the sample weights, which keeps the scale comparable across batches
with different class mixes and reduces to plain mean cross-entropy under
uniform weights.
"""

import csv
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import NumericError
from .ingest import ClassCounts
from .metrics import weighted_f1
from .model import BiLstmAttentionClassifier, ModelParameters

logger = logging.getLogger(__name__)

LOG_FLOOR = 1e-12


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 30
    patience: int = 3
    class_weights: Optional[tuple[float, float]] = None  # (w_negative, w_positive)
    gradient_clip_norm: Optional[float] = 5.0  # None disables clipping
    min_improvement: float = 1e-6
    seed: int = 42

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("batch_size, max_epochs, patience must be >= 1")
        if self.class_weights is not None and any(w <= 0 for w in self.class_weights):
            raise ValueError("class weights must be > 0")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "class_weights": list(self.class_weights) if self.class_weights else None,
            "gradient_clip_norm": self.gradient_clip_norm,
            "min_improvement": self.min_improvement,
            "seed": self.seed,
        }


def compute_class_weights(counts: ClassCounts) -> tuple[float, float]:
    """Balanced inverse-frequency weights w_c = N_total / (2 * N_c)."""
    if counts.positive <= 0 or counts.negative <= 0:
        raise ValueError("both classes need at least one example")
    total = counts.total
    return (total / (2.0 * counts.negative), total / (2.0 * counts.positive))


def weighted_cross_entropy(probabilities: Tensor, labels, weights) -> Tensor:
    """Weighted-mean cross-entropy over a probability batch.

    ``probabilities`` is (batch, 2) with rows summing to 1; ``labels`` is
    an int array of 0/1; ``weights`` is (w_negative, w_positive). The log
    argument is floored at 1e-12.
    """
    labels = np.asarray(labels, dtype=np.int64)
    dtype = probabilities.dtype
    one_hot = np.eye(2, dtype=dtype)[labels]
    picked = ad.tsum(ad.mul(probabilities, one_hot), axis=1)
    log_p = ad.log_clamped(picked, floor=LOG_FLOOR)
    sample_w = np.asarray(weights, dtype=dtype)[labels]
    weighted_sum = ad.tsum(ad.mul(log_p, -sample_w))
    return ad.mul(weighted_sum, 1.0 / float(sample_w.sum()))


class AdamState:
    """First/second-moment accumulators and the shared step counter."""

    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}


def adam_step(
    parameters: ModelParameters,
    state: AdamState,
    learning_rate: float,
    clip_norm: Optional[float] = None,
):
    """Bias-corrected Adam update over every parameter.

    Applies global-norm gradient clipping first when configured; raises
    ``NumericError`` on non-finite gradients; zeroes gradients afterwards.
    """
    grads = {}
    sq_norm = 0.0
    for name, tensor in parameters.items():
        g = tensor.grad
        if g is None:
            g = np.zeros_like(tensor.values)
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in parameter {name!r}")
        grads[name] = g
        sq_norm += float(np.sum(g.astype(np.float64) ** 2))
    global_norm = np.sqrt(sq_norm)
    scale = 1.0
    if clip_norm is not None and global_norm > clip_norm:
        scale = clip_norm / global_norm

    state.t += 1
    correction1 = 1.0 - state.beta1**state.t
    correction2 = 1.0 - state.beta2**state.t
    for name, tensor in parameters.items():
        g = grads[name] * scale
        if name not in state.m:
            state.m[name] = np.zeros_like(tensor.values, dtype=np.float64)
            state.v[name] = np.zeros_like(tensor.values, dtype=np.float64)
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        update = (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        tensor.values -= (learning_rate * update).astype(tensor.values.dtype)
        tensor.zero_grad()


class EarlyStopping:
    """Patience rule on validation loss.

    An epoch improves when its loss is lower than the best seen by more
    than ``min_improvement``; training stops once ``patience`` consecutive
    epochs fail to improve. Epochs are 1-indexed.
    """

    def __init__(self, patience: int, min_improvement: float = 1e-6):
        if patience < 1:
            raise ValueError("patience must be >= 1")
        self.patience = patience
        self.min_improvement = min_improvement
        self.epoch = 0
        self.best_epoch = 0
        self.best_loss = np.inf
        self.epochs_since_best = 0

    def update(self, val_loss: float) -> bool:
        """Record one epoch's validation loss; returns True to stop."""
        self.epoch += 1
        if val_loss < self.best_loss - self.min_improvement:
            self.best_loss = val_loss
            self.best_epoch = self.epoch
            self.epochs_since_best = 0
        else:
            self.epochs_since_best += 1
        return self.epochs_since_best >= self.patience


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    val_weighted_f1: float


@dataclass
class TrainHistory:
    epochs: list[EpochStats] = field(default_factory=list)
    best_epoch: int = 0

    def save_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_loss", "val_loss", "val_weighted_f1"])
            for row in self.epochs:
                writer.writerow(
                    [
                        row.epoch,
                        f"{row.train_loss:.12g}",
                        f"{row.val_loss:.12g}",
                        f"{row.val_weighted_f1:.12g}",
                    ]
                )


def _iter_batches(n: int, batch_size: int, order=None):
    order = np.arange(n) if order is None else order
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def evaluate_model(model, dataset, weights, batch_size: int = 256):
    """Loss and argmax predictions over a dataset with dropout disabled.

    ``dataset`` is (indices, lengths, labels). The loss is the same
    weighted mean used in training, pooled exactly across batches.
    """
    indices, lengths, labels = dataset
    weights_arr = np.asarray(weights, dtype=np.float64)
    loss_sum = 0.0
    weight_sum = 0.0
    predictions = np.zeros(len(labels), dtype=np.int64)
    with ad.no_grad():
        for batch in _iter_batches(len(labels), batch_size):
            out = model.forward(indices[batch], lengths[batch], training=False)
            probs = out.class_probabilities.values
            batch_labels = labels[batch]
            picked = np.maximum(probs[np.arange(len(batch)), batch_labels], LOG_FLOOR)
            sample_w = weights_arr[batch_labels]
            loss_sum += float(np.sum(sample_w * -np.log(picked)))
            weight_sum += float(sample_w.sum())
            predictions[batch] = np.argmax(probs, axis=1)
    return loss_sum / weight_sum, predictions


def train_model(
    model: BiLstmAttentionClassifier,
    train_set,
    val_set,
    config: TrainConfig,
) -> TrainHistory:
    """Run the training loop; the model ends at its best-epoch checkpoint.

    Each epoch is one seeded-shuffle pass over the training batches;
    validation loss (dropout disabled) drives early stopping. Raises
    ``NumericError`` on non-finite losses or gradients.
    """
    train_indices, train_lengths, train_labels = train_set
    if len(train_labels) == 0 or len(val_set[2]) == 0:
        raise ValueError("train and validation sets must be nonempty")

    weights = config.class_weights
    if weights is None:
        counts = ClassCounts(
            positive=int(np.sum(train_labels == 1)),
            negative=int(np.sum(train_labels == 0)),
        )
        weights = compute_class_weights(counts)
    logger.info("class weights (negative, positive) = (%.4f, %.4f)", *weights)

    rng = np.random.default_rng(config.seed)
    model.reset_dropout_stream(config.seed)
    state = AdamState()
    stopper = EarlyStopping(config.patience, config.min_improvement)
    history = TrainHistory()
    best_snapshot = model.parameters.snapshot()

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train_labels))
        loss_sum = 0.0
        weight_sum = 0.0
        for batch in _iter_batches(len(train_labels), config.batch_size, order):
            out = model.forward(
                train_indices[batch], train_lengths[batch], training=True
            )
            loss = weighted_cross_entropy(
                out.class_probabilities, train_labels[batch], weights
            )
            loss_value = float(loss.values)
            if not np.isfinite(loss_value):
                raise NumericError(f"non-finite training loss at epoch {epoch}")
            batch_w = float(np.asarray(weights)[train_labels[batch]].sum())
            loss_sum += loss_value * batch_w
            weight_sum += batch_w
            ad.backward(loss)
            adam_step(
                model.parameters, state, config.learning_rate, config.gradient_clip_norm
            )
        train_loss = loss_sum / weight_sum

        val_loss, val_pred = evaluate_model(model, val_set, weights)
        if not np.isfinite(val_loss):
            raise NumericError(f"non-finite validation loss at epoch {epoch}")
        val_f1 = weighted_f1(val_pred, val_set[2])
        history.epochs.append(EpochStats(epoch, train_loss, val_loss, val_f1))
        logger.info(
            "epoch %d: train_loss=%.4f val_loss=%.4f val_weighted_f1=%.4f",
            epoch,
            train_loss,
            val_loss,
            val_f1,
        )

        stop = stopper.update(val_loss)
        if stopper.best_epoch == epoch:
            best_snapshot = model.parameters.snapshot()
        if stop:
            break

    model.parameters.restore(best_snapshot)
    history.best_epoch = stopper.best_epoch
    return history
