"""Command-line front end: prepare -> train -> evaluate -> predict /
explain -> baseline.

Configuration precedence is flags > config file > defaults; every command
writes a ``run_manifest.json`` next to its outputs echoing the effective
configuration, the seed, and SHA-256 checksums of its inputs. Exit codes:
0 success, 2 usage errors, 3 I/O errors, 4 numeric failures.
"""

import argparse
import hashlib
import json
import os
import sys
import time


from . import __version__
from .artifact import load_model, save_model
from .baseline import stratified_kfold_cv
from .errors import ArtifactError, NumericError
from .explain import attention_trace, render_heatmap
from .ingest import (
    DEFAULT_LABEL_COLUMN,
    DEFAULT_TEXT_COLUMN,
    SPLIT_FILENAMES,
    prepare_corpus,
    read_split_file,
)
from .metrics import classification_report, confusion_matrix
from .model import BiLstmAttentionClassifier, ModelConfig, count_parameters
from .train import TrainConfig, evaluate_model, train_model
from .vocab import Vocabulary, encode_corpus

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

DATA_DIR_ENV = "SENTILENS_DATA_DIR"

MODEL_DEFAULTS = {
    "vocab_size": 20000,
    "embed_dim": 128,
    "hidden_dim": 256,
    "max_len": 100,
    "dropout": 0.3,
    "num_layers": 1,
    "precision": "float64",
}
TRAIN_DEFAULTS = {
    "learning_rate": 1e-3,
    "batch_size": 64,
    "max_epochs": 30,
    "patience": 3,
    "gradient_clip_norm": 5.0,
}


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _default_run_dir(seed: int) -> str:
    base = os.environ.get(DATA_DIR_ENV, os.path.join(os.getcwd(), "runs"))
    stamp = time.strftime("%Y%m%d-%H%M%S")
    return os.path.join(base, f"{stamp}-seed{seed}")


def _resolve_output_dir(explicit, seed: int) -> str:
    out_dir = explicit or _default_run_dir(seed)
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _write_manifest(out_dir, command: str, config: dict, inputs: list, outputs: list):
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": sorted(os.path.basename(str(p)) for p in outputs),
    }
    path = os.path.join(out_dir, "run_manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _merge_config(defaults: dict, file_config: dict, flags: dict) -> dict:
    """Precedence: flags > config file > defaults. ``flags`` entries that
    are None (flag not given) are ignored."""
    merged = dict(defaults)
    for key, value in (file_config or {}).items():
        if key in merged:
            merged[key] = value
    for key, value in flags.items():
        if value is not None:
            merged[key] = value
    return merged


def _load_config_file(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Commands (plain functions so tests can call them without argv plumbing)
# ---------------------------------------------------------------------------


def command_prepare(
    input_path,
    output_dir=None,
    sample_size=None,
    seed=42,
    text_column=DEFAULT_TEXT_COLUMN,
    label_column=DEFAULT_LABEL_COLUMN,
):
    out_dir = _resolve_output_dir(output_dir, seed)
    summary = prepare_corpus(
        input_path,
        out_dir,
        sample_size=sample_size,
        seed=seed,
        text_column=text_column,
        label_column=label_column,
    )
    config = {
        "input": str(input_path),
        "sample_size": sample_size,
        "seed": seed,
        "text_column": text_column,
        "label_column": label_column,
        "summary": {k: v for k, v in summary.items() if k != "files"},
    }
    _write_manifest(
        out_dir, "prepare", config, [input_path], list(summary["files"].values())
    )
    return summary


def command_train(
    splits_dir,
    model_path=None,
    model_config: dict = None,
    train_config: dict = None,
    output_dir=None,
):
    model_cfg = _merge_config(MODEL_DEFAULTS, {}, model_config or {})
    train_cfg = _merge_config(TRAIN_DEFAULTS, {}, train_config or {})
    seed = train_cfg.get("seed", 42)
    out_dir = _resolve_output_dir(output_dir or os.path.dirname(model_path or ""), seed)
    model_path = model_path or os.path.join(out_dir, "model.slns")
    history_path = os.path.join(out_dir, "history.csv")

    split_paths = [os.path.join(splits_dir, name) for name in SPLIT_FILENAMES]
    train_texts, train_labels = read_split_file(split_paths[0])
    val_texts, val_labels = read_split_file(split_paths[1])

    vocabulary = Vocabulary.build(train_texts, max_size=model_cfg["vocab_size"] - 2)
    config = ModelConfig(
        vocab_size=vocabulary.size,
        embed_dim=model_cfg["embed_dim"],
        hidden_dim=model_cfg["hidden_dim"],
        max_len=model_cfg["max_len"],
        dropout_rate=model_cfg["dropout"],
        num_layers=model_cfg["num_layers"],
        seed=seed,
        dtype=model_cfg["precision"],
    )
    tconfig = TrainConfig(
        learning_rate=train_cfg["learning_rate"],
        batch_size=train_cfg["batch_size"],
        max_epochs=train_cfg["max_epochs"],
        patience=train_cfg["patience"],
        gradient_clip_norm=train_cfg["gradient_clip_norm"] or None,
        seed=seed,
    )

    train_set = encode_corpus(train_texts, train_labels, vocabulary, config.max_len)
    val_set = encode_corpus(val_texts, val_labels, vocabulary, config.max_len)

    model = BiLstmAttentionClassifier(config)
    history = train_model(model, train_set, val_set, tconfig)
    history.save_csv(history_path)
    save_model(model.parameters, vocabulary, config, tconfig, model_path)

    effective = {
        "splits_dir": str(splits_dir),
        "model": {**model_cfg, "effective_vocab_size": vocabulary.size},
        "train": tconfig.to_dict(),
        "parameter_count": count_parameters(model.parameters),
        "best_epoch": history.best_epoch,
    }
    _write_manifest(
        out_dir, "train", effective, split_paths[:2], [model_path, history_path]
    )
    return history, model_path


def command_evaluate(model_path, test_path, output_dir=None):
    predictor = load_model(model_path)
    texts, labels = read_split_file(test_path)
    indices, lengths, labels = encode_corpus(
        texts, labels, predictor.vocabulary, predictor.max_len
    )
    _, predictions = evaluate_model(
        predictor.model, (indices, lengths, labels), weights=(1.0, 1.0)
    )
    cm = confusion_matrix(predictions, labels)
    report = classification_report(cm)

    out_dir = _resolve_output_dir(output_dir, seed=predictor.model.config.seed)
    report_txt = os.path.join(out_dir, "report.txt")
    report_json = os.path.join(out_dir, "report.json")
    cm_path = os.path.join(out_dir, "confusion_matrix.csv")
    with open(report_txt, "w", encoding="utf-8") as fh:
        fh.write(report.format_table() + "\n")
    with open(report_json, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(cm_path, "w", encoding="utf-8") as fh:
        fh.write("true_class,predicted_negative,predicted_positive\n")
        fh.write(f"negative,{cm[0, 0]},{cm[0, 1]}\n")
        fh.write(f"positive,{cm[1, 0]},{cm[1, 1]}\n")
    _write_manifest(
        out_dir,
        "evaluate",
        {"model": str(model_path), "test": str(test_path)},
        [model_path, test_path],
        [report_txt, report_json, cm_path],
    )
    return report, cm


def _iter_texts(text, input_file):
    if text is not None:
        yield text
        return
    with open(input_file, encoding="utf-8") as fh:
        for line in fh:
            yield line.rstrip("\n")


def command_predict(model_path, text=None, input_file=None, output=None):
    predictor = load_model(model_path)
    texts = list(_iter_texts(text, input_file))
    probs = predictor.predict_proba(texts)
    rows = []
    for i, p in enumerate(probs):
        if p is None:
            rows.append(f"{i},error,empty text after cleaning,")
        else:
            label = "positive" if p[1] >= p[0] else "negative"
            rows.append(f"{i},{label},{p[0]:.9g},{p[1]:.9g}")
    body = "line,label,p_negative,p_positive\n" + "\n".join(rows) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return rows


def command_explain(model_path, text=None, input_file=None, fmt="html", output=None):
    predictor = load_model(model_path)
    texts = list(_iter_texts(text, input_file))
    if len(texts) != 1:
        raise ValueError("explain expects exactly one review text")
    trace = attention_trace(predictor, texts[0])
    output = output or f"attention.{fmt}"
    render_heatmap(trace, fmt, output)
    return trace, output


def command_baseline(
    data_path,
    k=3,
    max_features=20000,
    epochs=300,
    learning_rate=1.0,
    seed=42,
    output_dir=None,
):
    texts, labels = read_split_file(data_path)
    result = stratified_kfold_cv(
        list(zip(texts, labels.tolist())),
        k=k,
        seed=seed,
        max_features=max_features,
        epochs=epochs,
        learning_rate=learning_rate,
    )
    out_dir = _resolve_output_dir(output_dir, seed)
    report_path = os.path.join(out_dir, "baseline_cv.csv")
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write("fold,weighted_f1\n")
        for fold, score in enumerate(result.fold_f1):
            fh.write(f"{fold},{score:.9g}\n")
        fh.write(f"mean,{result.mean_f1:.9g}\n")
    _write_manifest(
        out_dir,
        "baseline",
        {
            "data": str(data_path),
            "k": k,
            "max_features": max_features,
            "epochs": epochs,
            "learning_rate": learning_rate,
            "seed": seed,
        },
        [data_path],
        [report_path],
    )
    return result, report_path


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentilens",
        description="Train, evaluate, and explain a BiLSTM+attention "
        "sentiment classifier for game reviews.",
    )
    parser.add_argument("--config", help="JSON config file (flags win over it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="clean, dedupe, and split a raw corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir")
    p.add_argument("--sample-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--text-column", default=DEFAULT_TEXT_COLUMN)
    p.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN)

    p = sub.add_parser("train", help="train on prepared splits")
    p.add_argument("--splits-dir", required=True)
    p.add_argument("--model-out")
    p.add_argument("--output-dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--vocab-size", type=int)
    p.add_argument("--embed-dim", type=int)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--num-layers", type=int)
    p.add_argument("--precision", choices=["float64", "float32"])
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--gradient-clip-norm", type=float)

    p = sub.add_parser("evaluate", help="score a model on a prepared split")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--output-dir")

    p = sub.add_parser("predict", help="classify texts")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text")
    group.add_argument("--input-file")
    p.add_argument("--output")

    p = sub.add_parser("explain", help="attention heatmap for one review")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text")
    group.add_argument("--input-file")
    p.add_argument("--format", choices=["html", "csv"], default="html")
    p.add_argument("--output")

    p = sub.add_parser("baseline", help="TF-IDF + logistic regression CV")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--max-features", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir")
    return parser


def _run(args) -> int:
    file_config = _load_config_file(args.config)
    if args.command == "prepare":
        cfg = _merge_config(
            {"sample_size": None, "seed": 42},
            file_config.get("prepare", {}),
            {"sample_size": args.sample_size, "seed": args.seed},
        )
        summary = command_prepare(
            args.input,
            output_dir=args.output_dir,
            sample_size=cfg["sample_size"],
            seed=cfg["seed"],
            text_column=args.text_column,
            label_column=args.label_column,
        )
        for name, stats in summary["splits"].items():
            print(
                f"{name}: {stats['total']} records "
                f"({stats['positive']} positive, {stats['negative']} negative)"
            )
        print(f"files written under {os.path.dirname(summary['files']['train'])}")
    elif args.command == "train":
        model_flags = {
            "vocab_size": args.vocab_size,
            "embed_dim": args.embed_dim,
            "hidden_dim": args.hidden_dim,
            "max_len": args.max_len,
            "dropout": args.dropout,
            "num_layers": args.num_layers,
            "precision": args.precision,
        }
        train_flags = {
            "learning_rate": args.learning_rate,
            "batch_size": args.batch_size,
            "max_epochs": args.max_epochs,
            "patience": args.patience,
            "gradient_clip_norm": args.gradient_clip_norm,
            "seed": args.seed,
        }
        model_cfg = _merge_config(MODEL_DEFAULTS, file_config.get("model", {}), model_flags)
        train_cfg = _merge_config(
            {**TRAIN_DEFAULTS, "seed": 42}, file_config.get("train", {}), train_flags
        )
        history, model_path = command_train(
            args.splits_dir,
            model_path=args.model_out,
            model_config=model_cfg,
            train_config=train_cfg,
            output_dir=args.output_dir,
        )
        last = history.epochs[-1]
        print(
            f"trained {last.epoch} epochs; best epoch {history.best_epoch}; "
            f"model saved to {model_path}"
        )
    elif args.command == "evaluate":
        report, _ = command_evaluate(args.model, args.test, output_dir=args.output_dir)
        print(report.format_table())
    elif args.command == "predict":
        command_predict(
            args.model, text=args.text, input_file=args.input_file, output=args.output
        )
    elif args.command == "explain":
        trace, path = command_explain(
            args.model,
            text=args.text,
            input_file=args.input_file,
            fmt=args.format,
            output=args.output,
        )
        label = "positive" if trace.predicted_class == 1 else "negative"
        print(f"predicted {label}; heatmap written to {path}")
    elif args.command == "baseline":
        cfg = _merge_config(
            {"k": 3, "max_features": 20000, "epochs": 300, "learning_rate": 1.0, "seed": 42},
            file_config.get("baseline", {}),
            {
                "k": args.k,
                "max_features": args.max_features,
                "epochs": args.epochs,
                "learning_rate": args.learning_rate,
                "seed": args.seed,
            },
        )
        result, path = command_baseline(
            args.data,
            k=cfg["k"],
            max_features=cfg["max_features"],
            epochs=cfg["epochs"],
            learning_rate=cfg["learning_rate"],
            seed=cfg["seed"],
            output_dir=args.output_dir,
        )
        for fold, score in enumerate(result.fold_f1):
            print(f"fold {fold}: weighted F1 = {score:.4f}")
        print(f"mean weighted F1 = {result.mean_f1:.4f} (report: {path})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, OSError, ArtifactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
