"""Single-file model artifact with integrity checking.

Layout (little-endian throughout):

    bytes 0..7    magic ``SLNSMDL1``
    bytes 8..11   format version (u32)
    bytes 12..15  metadata length (u32)
    ...           UTF-8 JSON metadata: model config, training config,
                  ordered vocabulary, tensor manifest (name/shape/offset)
    ...           raw float32 weight blobs, manifest order
    last 4 bytes  CRC32 over all preceding bytes (u32)

Weights are stored as float32; a loaded predictor computes in float32, so
an artifact round-trips to bit-identical predictions.
"""

import json
import struct
import zlib

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import ArtifactError
from .model import BiLstmAttentionClassifier, ModelConfig, ModelParameters
from .textprep import clean_text
from .vocab import PAD_TOKEN, UNK_TOKEN, Vocabulary, encode

MAGIC = b"SLNSMDL1"
FORMAT_VERSION = 1


def save_model(
    parameters: ModelParameters,
    vocabulary: Vocabulary,
    model_config: ModelConfig,
    train_config=None,
    path=None,
):
    """Write a self-contained artifact. Weights are cast to float32."""
    manifest = []
    blobs = []
    offset = 0
    for name, tensor in parameters.items():
        blob = np.ascontiguousarray(tensor.values, dtype="<f4").tobytes()
        manifest.append({"name": name, "shape": list(tensor.shape), "offset": offset})
        blobs.append(blob)
        offset += len(blob)
    meta = {
        "model_config": model_config.to_dict(),
        "train_config": train_config.to_dict() if train_config else None,
        "vocabulary": vocabulary.index_to_token,
        "tensors": manifest,
    }
    meta_bytes = json.dumps(meta).encode("utf-8")
    body = (
        MAGIC
        + struct.pack("<I", FORMAT_VERSION)
        + struct.pack("<I", len(meta_bytes))
        + meta_bytes
        + b"".join(blobs)
    )
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(struct.pack("<I", zlib.crc32(body)))
    return path


def _read_artifact(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < len(MAGIC) + 12:
        raise ArtifactError(f"{path}: truncated artifact")
    if raw[: len(MAGIC)] != MAGIC:
        raise ArtifactError(f"{path}: not a model artifact (bad magic)")
    (stored_crc,) = struct.unpack("<I", raw[-4:])
    if zlib.crc32(raw[:-4]) != stored_crc:
        raise ArtifactError(f"{path}: checksum mismatch, artifact is corrupted")
    (version,) = struct.unpack("<I", raw[8:12])
    if version != FORMAT_VERSION:
        raise ArtifactError(
            f"{path}: unsupported format version {version} (expected {FORMAT_VERSION})"
        )
    (meta_len,) = struct.unpack("<I", raw[12:16])
    meta_end = 16 + meta_len
    if meta_end > len(raw) - 4:
        raise ArtifactError(f"{path}: truncated metadata")
    meta = json.loads(raw[16:meta_end].decode("utf-8"))
    return meta, raw[meta_end:-4]


def load_model(path) -> "Predictor":
    """Load an artifact into a ready float32 predictor."""
    meta, blob = _read_artifact(path)
    config_dict = dict(meta["model_config"])
    config_dict["dtype"] = "float32"  # artifact weights are float32
    config = ModelConfig(**config_dict)

    tokens = meta["vocabulary"]
    if tokens[:2] != [PAD_TOKEN, UNK_TOKEN]:
        raise ArtifactError(f"{path}: vocabulary is missing reserved tokens")
    vocabulary = Vocabulary(tokens[2:])
    if vocabulary.size != config.vocab_size:
        raise ArtifactError(
            f"{path}: vocabulary size {vocabulary.size} does not match "
            f"configured {config.vocab_size}"
        )

    tensors = {}
    for entry in meta["tensors"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape))
        start = entry["offset"]
        end = start + 4 * count
        if end > len(blob):
            raise ArtifactError(f"{path}: weight blob shorter than manifest")
        values = np.frombuffer(blob, dtype="<f4", count=count, offset=start)
        tensors[entry["name"]] = Tensor(
            values.reshape(shape).copy(), requires_grad=True
        )
    parameters = ModelParameters(tensors)
    model = BiLstmAttentionClassifier(config, parameters)
    return Predictor(model, vocabulary, train_config=meta.get("train_config"))


class Predictor:
    """Bundles a model with its vocabulary for raw-text inference."""

    def __init__(self, model: BiLstmAttentionClassifier, vocabulary: Vocabulary, train_config=None):
        self.model = model
        self.vocabulary = vocabulary
        self.train_config = train_config

    @property
    def max_len(self) -> int:
        return self.model.config.max_len

    def encode_text(self, raw_text: str):
        """Clean and encode one raw text; returns None when the text is
        empty after cleaning."""
        cleaned = clean_text(raw_text)
        if not cleaned:
            return None
        return encode(cleaned, self.vocabulary, self.max_len, label=0)

    def predict_encoded(self, indices, lengths, batch_size: int = 256) -> np.ndarray:
        """Class probabilities for pre-encoded inputs, (n, 2)."""
        indices = np.asarray(indices)
        lengths = np.asarray(lengths)
        out = np.zeros((len(lengths), 2), dtype=self.model.config.np_dtype)
        with ad.no_grad():
            for start in range(0, len(lengths), batch_size):
                stop = start + batch_size
                result = self.model.forward(
                    indices[start:stop], lengths[start:stop], training=False
                )
                out[start:stop] = result.class_probabilities.values
        return out

    def predict_proba(self, texts) -> list:
        """Per-text class probabilities; None for texts that clean to
        empty (callers emit a diagnostic and continue)."""
        encoded = [self.encode_text(t) for t in texts]
        keep = [i for i, e in enumerate(encoded) if e is not None]
        results: list = [None] * len(texts)
        if keep:
            indices = np.stack([encoded[i].indices for i in keep])
            lengths = np.asarray([encoded[i].length for i in keep])
            probs = self.predict_encoded(indices, lengths)
            for row, i in enumerate(keep):
                results[i] = probs[row]
        return results
