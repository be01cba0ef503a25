"""The full desk-scale workflow on the real review corpus, via the CLI.

Needs the raw reviews CSV (columns `review_text`, `review_score` with
labels 1 / -1). Point STEAM_REVIEWS_CSV at it; without the file this
script just prints the commands it would run.

A 50,000-review sample with default hyperparameters (vocab 20,000,
length 100, embed 128, hidden 256, dropout 0.3, batch 64, Adam 1e-3,
patience 3) takes hours on a desktop CPU; --precision float32 is the
practical choice at that scale.

Run: STEAM_REVIEWS_CSV=/path/to/reviews.csv python3 demos/06_real_corpus_workflow.py
"""

import os
import subprocess
import sys

RAW = os.environ.get("STEAM_REVIEWS_CSV")

STEPS = [
    ["sentilens", "prepare", "--input", RAW or "<reviews.csv>",
     "--output-dir", "runs/splits", "--sample-size", "50000", "--seed", "42"],
    ["sentilens", "train", "--splits-dir", "runs/splits",
     "--model-out", "runs/model.slns", "--output-dir", "runs/train",
     "--precision", "float32", "--seed", "42"],
    ["sentilens", "evaluate", "--model", "runs/model.slns",
     "--test", "runs/splits/test.csv", "--output-dir", "runs/eval"],
    ["sentilens", "baseline", "--data", "runs/splits/train.csv",
     "--output-dir", "runs/baseline"],
    ["sentilens", "explain", "--model", "runs/model.slns",
     "--text", "Stunning graphics and smooth gameplay, I love it",
     "--format", "html", "--output", "runs/attention.html"],
]

if RAW is None or not os.path.exists(RAW or ""):
    print("STEAM_REVIEWS_CSV not set (or missing); the workflow would be:\n")
    for step in STEPS:
        print("  " + " ".join(step))
    sys.exit(0)

for step in STEPS:
    print("+ " + " ".join(step))
    subprocess.run(step, check=True)
