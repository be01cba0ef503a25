"""Attention traces: which tokens the model weighted, as HTML and CSV.

Trains a small model on synthetic reviews, then renders per-token
attention heatmaps for a few inputs into demos/output/.

Run: python3 demos/04_attention_explanations.py
"""

import os
import tempfile

from sentilens.artifact import load_model
from sentilens.cli import command_prepare, command_train
from sentilens.explain import attention_trace, render_heatmap
from sentilens.synthetic import generate_corpus, write_corpus_csv

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

work = tempfile.mkdtemp(prefix="sentilens-demo-")
raw_csv = os.path.join(work, "reviews.csv")
write_corpus_csv(generate_corpus(1500, positive_fraction=0.9, seed=11), raw_csv)
splits = os.path.join(work, "splits")
command_prepare(raw_csv, output_dir=splits, seed=11)
_, model_path = command_train(
    splits,
    model_path=os.path.join(work, "model.slns"),
    model_config={"vocab_size": 400, "embed_dim": 16, "hidden_dim": 16, "max_len": 32},
    train_config={"max_epochs": 4, "patience": 3, "seed": 11},
    output_dir=work,
)
predictor = load_model(model_path)

reviews = [
    "Absolutely stunning visuals, smooth performance, I love it!",
    "Constant crashes, boring missions... asked for a refund.",
]
for i, review in enumerate(reviews):
    trace = attention_trace(predictor, review)
    label = "positive" if trace.predicted_class == 1 else "negative"
    print(f"\nreview: {review}")
    print(f"predicted {label} (p = {trace.class_probabilities[trace.predicted_class]:.3f})")
    ranked = sorted(zip(trace.tokens, trace.weights), key=lambda tw: -tw[1])
    print("tokens by attention weight:")
    for token, weight in ranked:
        print(f"  {token:<12} {weight:.4f}")
    html_path = os.path.join(OUT, f"attention_{i}.html")
    csv_path = os.path.join(OUT, f"attention_{i}.csv")
    render_heatmap(trace, "html", html_path)
    render_heatmap(trace, "csv", csv_path)
    print(f"wrote {html_path} and {csv_path}")
