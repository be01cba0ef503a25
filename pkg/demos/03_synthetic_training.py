"""End-to-end pipeline on a synthetic review corpus.

Generates 2,000 lexicon-planted reviews (9:1 positive:negative), prepares
splits, trains the BiLSTM+attention classifier with class-weighted loss
and early stopping, and prints the classification report. Writes a loss
curve to demos/output/ when matplotlib is available.

Run: python3 demos/03_synthetic_training.py   (about half a minute)
"""

import os
import tempfile

from sentilens.cli import command_evaluate, command_prepare, command_train
from sentilens.synthetic import generate_corpus, write_corpus_csv

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

work = tempfile.mkdtemp(prefix="sentilens-demo-")
raw_csv = os.path.join(work, "reviews.csv")
write_corpus_csv(generate_corpus(2000, positive_fraction=0.9, seed=7), raw_csv)
print(f"generated corpus at {raw_csv}")

# -- prepare: clean, dedupe, stratified 80/10/10 ------------------------------
splits = os.path.join(work, "splits")
summary = command_prepare(raw_csv, output_dir=splits, seed=7)
for name, stats in summary["splits"].items():
    print(f"  {name}: {stats['total']} ({stats['negative']} negative)")

# -- train ---------------------------------------------------------------------
run_dir = os.path.join(work, "run")
history, model_path = command_train(
    splits,
    model_path=os.path.join(run_dir, "model.slns"),
    model_config={"vocab_size": 400, "embed_dim": 16, "hidden_dim": 16, "max_len": 32},
    train_config={"max_epochs": 6, "patience": 3, "seed": 7},
    output_dir=run_dir,
)
print(f"\ntrained {len(history.epochs)} epochs (best: {history.best_epoch})")
for row in history.epochs:
    print(
        f"  epoch {row.epoch}: train {row.train_loss:.4f}  "
        f"val {row.val_loss:.4f}  val F1 {row.val_weighted_f1:.4f}"
    )

# -- evaluate -------------------------------------------------------------------
report, cm = command_evaluate(
    model_path, os.path.join(splits, "test.csv"), output_dir=os.path.join(run_dir, "eval")
)
print("\nconfusion matrix (rows = true):")
print(cm)
print("\n" + report.format_table())

# -- loss curve ------------------------------------------------------------------
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    epochs = [r.epoch for r in history.epochs]
    plt.figure(figsize=(6, 4))
    plt.plot(epochs, [r.train_loss for r in history.epochs], marker="o", label="train")
    plt.plot(epochs, [r.val_loss for r in history.epochs], marker="s", label="validation")
    plt.xlabel("epoch")
    plt.ylabel("weighted cross-entropy")
    plt.legend()
    plt.tight_layout()
    curve = os.path.join(OUT, "loss_curve.png")
    plt.savefig(curve, dpi=120)
    print(f"\nloss curve written to {curve}")
except ImportError:
    print("\n(matplotlib not installed; skipping the loss-curve plot — "
          f"the numbers are in {run_dir}/history.csv)")
