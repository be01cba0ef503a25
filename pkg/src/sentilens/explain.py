"""Per-token attention traces and heatmap rendering.

Weights are reported for the cleaned, truncated token sequence the model
actually saw; the trace records whether truncation occurred.
"""

import csv
import html
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .textprep import clean_text, tokenize

# Single-hue tint; opacity scales linearly with weight / max weight.
_TINT_RGB = (255, 111, 60)


@dataclass
class AttentionTrace:
    tokens: list[str]
    weights: np.ndarray  # same length as tokens, sums to 1
    predicted_class: int
    class_probabilities: np.ndarray  # (2,)
    truncated: bool


def attention_trace(predictor, raw_text: str) -> AttentionTrace:
    """Run clean -> encode -> forward (dropout disabled) and return the
    attention weights over the real (non-padding) positions."""
    cleaned = clean_text(raw_text)
    if not cleaned:
        raise ValueError("text is empty after cleaning; nothing to explain")
    tokens = tokenize(cleaned)
    example = predictor.encode_text(raw_text)
    with ad.no_grad():
        out = predictor.model.forward(
            example.indices[None, :], np.asarray([example.length]), training=False
        )
    probs = out.class_probabilities.values[0]
    weights = out.attention_weights.values[0, : example.length].copy()
    return AttentionTrace(
        tokens=tokens[: example.length],
        weights=weights,
        predicted_class=int(np.argmax(probs)),
        class_probabilities=probs.copy(),
        truncated=len(tokens) > example.length,
    )


def _format_weight(w: float) -> str:
    return f"{w:.9g}"


def render_heatmap(trace: AttentionTrace, fmt: str, path) -> str:
    """Write the trace as a standalone HTML heatmap or a token,weight CSV."""
    if fmt == "html":
        _render_html(trace, path)
    elif fmt == "csv":
        _render_csv(trace, path)
    else:
        raise ValueError(f"unknown heatmap format {fmt!r} (use 'html' or 'csv')")
    return path


def _render_csv(trace: AttentionTrace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["token", "weight"])
        for token, weight in zip(trace.tokens, trace.weights):
            writer.writerow([token, _format_weight(weight)])


def _render_html(trace: AttentionTrace, path):
    max_weight = float(np.max(trace.weights))
    spans = []
    for token, weight in zip(trace.tokens, trace.weights):
        opacity = float(weight) / max_weight if max_weight > 0 else 0.0
        spans.append(
            f'<span class="tok" title="{_format_weight(weight)}" '
            f'style="background-color: rgba({_TINT_RGB[0]}, {_TINT_RGB[1]}, '
            f'{_TINT_RGB[2]}, {opacity:.6f})">{html.escape(token)}</span>'
        )
    label = "positive" if trace.predicted_class == 1 else "negative"
    confidence = trace.class_probabilities[trace.predicted_class]
    note = (
        "<p class='note'>input truncated to the model's maximum length</p>"
        if trace.truncated
        else ""
    )
    doc = f"""<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>attention heatmap</title>
<style>
body {{ font-family: sans-serif; margin: 2em; }}
.tok {{ padding: 2px 4px; margin: 1px; border-radius: 3px; display: inline-block; }}
.meta {{ color: #555; margin-top: 1em; }}
.note {{ color: #a33; }}
</style>
</head>
<body>
<div class="trace">{' '.join(spans)}</div>
<p class="meta">predicted: {label} (p = {confidence:.4f})</p>
{note}
</body>
</html>
"""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(doc)
