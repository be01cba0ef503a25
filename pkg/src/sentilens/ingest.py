"""Corpus loading, cleaning, and stratified splitting.

Input files are comma-separated with a header row; quoted fields may
contain embedded newlines. Source labels are 1 (recommended) and -1
(not recommended); prepared split files map them to 1/0.
"""

import csv
import logging
import os
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .textprep import clean_text

logger = logging.getLogger(__name__)

DEFAULT_TEXT_COLUMN = "review_text"
DEFAULT_LABEL_COLUMN = "review_score"

SPLIT_FILENAMES = ("train.csv", "validation.csv", "test.csv")


class ReviewRecord(NamedTuple):
    text: str
    label: int  # 1 or -1 for raw corpora, 1 or 0 after mapping


@dataclass
class ClassCounts:
    positive: int
    negative: int

    @property
    def total(self) -> int:
        return self.positive + self.negative


@dataclass
class CorpusSplit:
    train: list
    validation: list
    test: list
    seed: int

    def parts(self):
        return {"train": self.train, "validation": self.validation, "test": self.test}


def load_corpus(
    path,
    text_column: str = DEFAULT_TEXT_COLUMN,
    label_column: str = DEFAULT_LABEL_COLUMN,
    sample_size: Optional[int] = None,
    seed: int = 42,
) -> list[ReviewRecord]:
    """Load review records from a delimited file.

    Rows whose label does not parse to 1 or -1 are counted and skipped.
    When ``sample_size`` is given, a uniform random sample without
    replacement is drawn (deterministic under ``seed``); the sampled
    order is the permutation drawn, not file order.
    """
    records: list[ReviewRecord] = []
    skipped = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for col in (text_column, label_column):
            if col not in fields:
                raise ValueError(f"column {col!r} not found in {path} (have {fields})")
        for row in reader:
            try:
                label = int(str(row[label_column]).strip())
            except (TypeError, ValueError):
                skipped += 1
                continue
            if label not in (1, -1):
                skipped += 1
                continue
            records.append(ReviewRecord(text=row[text_column] or "", label=label))
    if skipped:
        logger.info("skipped %d rows with unparseable labels", skipped)
    if sample_size is not None:
        if sample_size > len(records):
            raise ValueError(
                f"sample_size {sample_size} exceeds available rows {len(records)}"
            )
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(records), size=sample_size, replace=False)
        records = [records[i] for i in chosen]
    return records


def class_distribution(records: Sequence[ReviewRecord]) -> ClassCounts:
    """Exact per-class counts. Accepts raw (1/-1) or mapped (1/0) labels."""
    positive = 0
    negative = 0
    for rec in records:
        if rec.label == 1:
            positive += 1
        elif rec.label in (-1, 0):
            negative += 1
        else:
            raise ValueError(f"unexpected label {rec.label!r}")
    return ClassCounts(positive=positive, negative=negative)


def _largest_remainder_allocation(n: int, fractions: Sequence[float]) -> list[int]:
    exact = [n * f for f in fractions]
    base = [int(np.floor(e)) for e in exact]
    leftover = n - sum(base)
    remainders = sorted(
        range(len(fractions)), key=lambda i: (-(exact[i] - base[i]), i)
    )
    for i in remainders[:leftover]:
        base[i] += 1
    return base


def stratified_split(
    records: Sequence[ReviewRecord],
    fractions=(0.8, 0.1, 0.1),
    seed: int = 42,
) -> CorpusSplit:
    """Partition records into train/validation/test preserving class
    proportions (largest-remainder rounding per class).

    Classes are shuffled independently under ``seed`` and allocated
    proportionally, so part sizes are identical for any seed.
    """
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ValueError("fractions must be three positive numbers")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must sum to 1, got {sum(fractions)}")
    by_label: dict[int, list[ReviewRecord]] = {}
    for rec in records:
        by_label.setdefault(rec.label, []).append(rec)
    if len(by_label) < 2:
        raise ValueError(
            f"stratified split needs both classes; found labels {sorted(by_label)}"
        )
    rng = np.random.default_rng(seed)
    parts: tuple[list, list, list] = ([], [], [])
    for label in sorted(by_label):
        members = by_label[label]
        order = rng.permutation(len(members))
        shuffled = [members[i] for i in order]
        n_train, n_val, _ = _largest_remainder_allocation(len(members), fractions)
        parts[0].extend(shuffled[:n_train])
        parts[1].extend(shuffled[n_train : n_train + n_val])
        parts[2].extend(shuffled[n_train + n_val :])
    return CorpusSplit(train=parts[0], validation=parts[1], test=parts[2], seed=seed)


def clean_and_dedupe(records: Sequence[ReviewRecord]) -> list[ReviewRecord]:
    """Clean texts, drop records that are empty after cleaning, and drop
    exact duplicate (text, label) pairs, keeping first occurrences."""
    seen = set()
    out = []
    for rec in records:
        cleaned = clean_text(rec.text)
        if not cleaned:
            continue
        key = (cleaned, rec.label)
        if key in seen:
            continue
        seen.add(key)
        out.append(ReviewRecord(text=cleaned, label=rec.label))
    return out


def map_label(label: int) -> int:
    """Source label {1, -1} -> training label {1, 0}."""
    return 1 if label == 1 else 0


def write_split_files(split: CorpusSplit, out_dir) -> dict[str, str]:
    """Write train/validation/test CSVs with columns ``text,label``
    (labels mapped to 0/1). Returns part name -> file path."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for name, filename in zip(("train", "validation", "test"), SPLIT_FILENAMES):
        path = os.path.join(out_dir, filename)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["text", "label"])
            for rec in split.parts()[name]:
                writer.writerow([rec.text, map_label(rec.label)])
        paths[name] = path
    return paths


def read_split_file(path):
    """Read a prepared split file back into (texts, labels) with labels
    as an int64 array of 0/1."""
    texts = []
    labels = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["text", "label"]:
            raise ValueError(f"{path} is not a prepared split file")
        for row in reader:
            label = int(row["label"])
            if label not in (0, 1):
                raise ValueError(f"prepared labels must be 0/1, got {label}")
            texts.append(row["text"])
            labels.append(label)
    return texts, np.asarray(labels, dtype=np.int64)


def prepare_corpus(
    input_path,
    output_dir,
    sample_size: Optional[int] = None,
    seed: int = 42,
    fractions=(0.8, 0.1, 0.1),
    text_column: str = DEFAULT_TEXT_COLUMN,
    label_column: str = DEFAULT_LABEL_COLUMN,
) -> dict:
    """Full preparation pipeline: load (optionally sample), clean,
    dedupe, stratify, and write split files. Returns a summary dict."""
    raw = load_corpus(
        input_path,
        text_column=text_column,
        label_column=label_column,
        sample_size=sample_size,
        seed=seed,
    )
    cleaned = clean_and_dedupe(raw)
    if not cleaned:
        raise ValueError("corpus is empty after cleaning")
    split = stratified_split(cleaned, fractions=fractions, seed=seed)
    paths = write_split_files(split, output_dir)
    summary = {
        "loaded": len(raw),
        "after_cleaning": len(cleaned),
        "splits": {},
        "files": paths,
    }
    for name, part in split.parts().items():
        counts = class_distribution(part)
        summary["splits"][name] = {
            "total": counts.total,
            "positive": counts.positive,
            "negative": counts.negative,
        }
    return summary
