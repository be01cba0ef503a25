"""Bidirectional LSTM encoder with attention pooling and a softmax head.

Architecture: embedding lookup (with inverted dropout), one or more
bidirectional LSTM layers whose per-position forward/backward outputs are
concatenated, a scalar-score attention layer that pools positions into a
context vector, then dropout and an affine softmax classifier.

Padding is handled by masking everywhere: the recurrence carries state
through padded steps unchanged, encoder outputs at padded positions are
exactly zero, and attention assigns them exactly zero weight, so appending
padding never changes the class probabilities.
"""

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor

GATE_ORDER = ("input", "forget", "candidate", "output")  # bias block layout


@dataclass
class ModelConfig:
    vocab_size: int = 20000  # total embedding rows, specials included
    embed_dim: int = 128
    hidden_dim: int = 256  # per direction
    max_len: int = 100
    dropout_rate: float = 0.3
    num_classes: int = 2
    num_layers: int = 1
    seed: int = 42
    dtype: str = "float64"  # "float32" for full-scale runs

    def __post_init__(self):
        for name in ("vocab_size", "embed_dim", "hidden_dim", "max_len", "num_layers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.num_classes != 2:
            raise ValueError("only binary classification is supported")
        if self.dtype not in ("float64", "float32"):
            raise ValueError("dtype must be 'float64' or 'float32'")

    @property
    def np_dtype(self):
        return np.dtype(self.dtype)

    def to_dict(self) -> dict:
        return {
            "vocab_size": self.vocab_size,
            "embed_dim": self.embed_dim,
            "hidden_dim": self.hidden_dim,
            "max_len": self.max_len,
            "dropout_rate": self.dropout_rate,
            "num_classes": self.num_classes,
            "num_layers": self.num_layers,
            "seed": self.seed,
            "dtype": self.dtype,
        }


def _direction_names(layer: int) -> tuple[str, str]:
    return (f"layer{layer}_forward", f"layer{layer}_backward")


class ModelParameters:
    """Named, ordered collection of trainable tensors."""

    def __init__(self, tensors: dict[str, Tensor]):
        self._tensors = dict(tensors)

    @classmethod
    def initialize(cls, config: ModelConfig) -> "ModelParameters":
        """Deterministic initialization under ``config.seed``.

        Matrix weights are uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)];
        biases are zero except the LSTM forget-gate block (set to 1);
        embedding rows are uniform in [-0.1, 0.1] with the PAD row zeroed.
        """
        rng = np.random.default_rng(config.seed)
        dtype = config.np_dtype
        dh = config.hidden_dim

        def uniform(fan_in, shape):
            k = 1.0 / np.sqrt(fan_in)
            return rng.uniform(-k, k, size=shape).astype(dtype)

        tensors: dict[str, Tensor] = {}
        embedding = rng.uniform(
            -0.1, 0.1, size=(config.vocab_size, config.embed_dim)
        ).astype(dtype)
        embedding[0] = 0.0  # PAD row
        tensors["embedding"] = Tensor(embedding, requires_grad=True)

        for layer in range(config.num_layers):
            d_in = config.embed_dim if layer == 0 else 2 * dh
            for direction in _direction_names(layer):
                bias = np.zeros(4 * dh, dtype=dtype)
                bias[dh : 2 * dh] = 1.0  # forget gate
                tensors[f"{direction}_w_x"] = Tensor(
                    uniform(d_in, (d_in, 4 * dh)), requires_grad=True
                )
                tensors[f"{direction}_w_h"] = Tensor(
                    uniform(dh, (dh, 4 * dh)), requires_grad=True
                )
                tensors[f"{direction}_b"] = Tensor(bias, requires_grad=True)

        tensors["attention_w"] = Tensor(uniform(2 * dh, (2 * dh, 1)), requires_grad=True)
        tensors["attention_b"] = Tensor(np.zeros(1, dtype=dtype), requires_grad=True)
        tensors["head_w"] = Tensor(
            uniform(2 * dh, (2 * dh, config.num_classes)), requires_grad=True
        )
        tensors["head_b"] = Tensor(
            np.zeros(config.num_classes, dtype=dtype), requires_grad=True
        )
        return cls(tensors)

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def names(self) -> list[str]:
        return list(self._tensors)

    def items(self):
        return self._tensors.items()

    def tensors(self) -> list[Tensor]:
        return list(self._tensors.values())

    def zero_grads(self):
        for t in self._tensors.values():
            t.zero_grad()

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: t.values.copy() for name, t in self._tensors.items()}

    def restore(self, snapshot: dict[str, np.ndarray]):
        for name, values in snapshot.items():
            self._tensors[name].values[...] = values

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(t.values)) for t in self._tensors.values())


def count_parameters(parameters: ModelParameters) -> int:
    """Exact element count over all parameter tensors."""
    return sum(t.size for t in parameters.tensors())


@dataclass
class ForwardOutput:
    class_probabilities: Tensor  # (batch, 2), rows sum to 1
    attention_weights: Tensor  # (batch, max_len), zero at padding
    context_vectors: Tensor  # (batch, 2 * hidden_dim)


def validity_mask(lengths, max_len: int) -> np.ndarray:
    """Boolean (batch, max_len) mask: position < length."""
    lengths = np.asarray(lengths)
    return np.arange(max_len)[None, :] < lengths[:, None]


class BiLstmAttentionClassifier:
    """The classifier; holds configuration, parameters, and the dropout
    random stream (counter-based, re-seedable per training run)."""

    def __init__(self, config: ModelConfig, parameters: ModelParameters = None):
        self.config = config
        self.parameters = parameters or ModelParameters.initialize(config)
        self.reset_dropout_stream(config.seed)

    def reset_dropout_stream(self, seed: int):
        self._dropout_rng = np.random.Generator(np.random.Philox(seed))

    # -- stages ------------------------------------------------------------

    def embed(self, indices: np.ndarray, training: bool = False) -> Tensor:
        """Row-gather embeddings for an index batch, with dropout when
        training. ``indices`` is (batch, max_len) int."""
        embedded = ad.gather_rows(self.parameters["embedding"], indices)
        return ad.dropout(
            embedded, self.config.dropout_rate, self._dropout_rng, training
        )

    def _run_direction(self, x_steps, mask, w_x, w_h, b, reverse: bool):
        """One LSTM direction over per-position inputs.

        State carries through invalid (padded) steps unchanged, so the
        backward direction effectively starts at each row's last valid
        position; outputs at invalid positions are exactly zero.
        """
        steps = len(x_steps)
        batch = x_steps[0].shape[0]
        dh = w_h.shape[0]
        dtype = w_h.dtype
        h = ad.as_tensor(np.zeros((batch, dh), dtype=dtype))
        c = ad.as_tensor(np.zeros((batch, dh), dtype=dtype))
        outputs = [None] * steps
        order = range(steps - 1, -1, -1) if reverse else range(steps)
        for t in order:
            gates = ad.add(ad.add(ad.matmul(x_steps[t], w_x), ad.matmul(h, w_h)), b)
            gate_in = ad.sigmoid(ad.slice_cols(gates, 0, dh))
            gate_forget = ad.sigmoid(ad.slice_cols(gates, dh, 2 * dh))
            candidate = ad.tanh(ad.slice_cols(gates, 2 * dh, 3 * dh))
            gate_out = ad.sigmoid(ad.slice_cols(gates, 3 * dh, 4 * dh))
            c_new = ad.add(ad.mul(gate_forget, c), ad.mul(gate_in, candidate))
            h_new = ad.mul(gate_out, ad.tanh(c_new))
            m = mask[:, t : t + 1].astype(dtype)
            h_masked = ad.mul(h_new, m)
            outputs[t] = h_masked
            h = ad.add(h_masked, ad.mul(h, 1.0 - m))
            c = ad.add(ad.mul(c_new, m), ad.mul(c, 1.0 - m))
        return outputs

    def bilstm_forward(self, embedded: Tensor, lengths) -> Tensor:
        """Encode (batch, max_len, embed_dim) into (batch, max_len,
        2 * hidden_dim): concatenated forward/backward states per position,
        zeros at padded positions."""
        lengths = np.asarray(lengths)
        max_len = embedded.shape[1]
        if lengths.size and (lengths.min() < 1 or lengths.max() > max_len):
            raise ValueError("lengths must be in [1, max_len]")
        mask = validity_mask(lengths, max_len)
        x_steps = [ad.timestep(embedded, t) for t in range(max_len)]
        for layer in range(self.config.num_layers):
            fwd_name, bwd_name = _direction_names(layer)
            fwd = self._run_direction(
                x_steps,
                mask,
                self.parameters[f"{fwd_name}_w_x"],
                self.parameters[f"{fwd_name}_w_h"],
                self.parameters[f"{fwd_name}_b"],
                reverse=False,
            )
            bwd = self._run_direction(
                x_steps,
                mask,
                self.parameters[f"{bwd_name}_w_x"],
                self.parameters[f"{bwd_name}_w_h"],
                self.parameters[f"{bwd_name}_b"],
                reverse=True,
            )
            x_steps = [ad.concat([f, b], axis=1) for f, b in zip(fwd, bwd)]
        return ad.stack(x_steps, axis=1)

    def attention(self, encoded: Tensor, mask: np.ndarray):
        """Scalar-score attention pooling over valid positions.

        Per position: score = tanh(w . h + b); weights are a masked softmax
        of the scores; the context vector is the weight-sum of states.
        Returns (context (batch, 2*hidden), weights (batch, max_len)).
        """
        batch, max_len, _ = encoded.shape
        scores = ad.add(
            ad.matmul(encoded, self.parameters["attention_w"]),
            self.parameters["attention_b"],
        )
        u = ad.tanh(ad.reshape(scores, (batch, max_len)))
        alpha = ad.masked_softmax(u, mask, axis=1)
        weighted = ad.mul(ad.reshape(alpha, (batch, max_len, 1)), encoded)
        context = ad.tsum(weighted, axis=1)
        return context, alpha

    def classify(self, context: Tensor, training: bool = False) -> Tensor:
        """Dropout, affine map, softmax -> class probabilities."""
        dropped = ad.dropout(
            context, self.config.dropout_rate, self._dropout_rng, training
        )
        logits = ad.add(ad.matmul(dropped, self.parameters["head_w"]), self.parameters["head_b"])
        return ad.softmax(logits, axis=1)

    # -- full pass ----------------------------------------------------------

    def forward(self, indices, lengths, training: bool = False) -> ForwardOutput:
        indices = np.asarray(indices)
        lengths = np.asarray(lengths)
        if indices.ndim != 2 or indices.shape[1] != self.config.max_len:
            raise ValueError(
                f"indices must be (batch, {self.config.max_len}), got {indices.shape}"
            )
        embedded = self.embed(indices, training=training)
        encoded = self.bilstm_forward(embedded, lengths)
        mask = validity_mask(lengths, self.config.max_len)
        context, alpha = self.attention(encoded, mask)
        probabilities = self.classify(context, training=training)
        return ForwardOutput(
            class_probabilities=probabilities,
            attention_weights=alpha,
            context_vectors=context,
        )

    def predict_proba(self, indices, lengths) -> np.ndarray:
        """Inference-only class probabilities (no tape, no dropout)."""
        with ad.no_grad():
            return self.forward(indices, lengths, training=False).class_probabilities.values
