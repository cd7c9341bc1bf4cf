"""Command-line entry point.

Subcommands:
  train    fine-tune on (masked question, gold query) TSV pairs
  predict  decode a predictions TSV from a trained checkpoint

Exit codes: 0 success, 1 runtime failure (bad data, missing file, empty
training set), 2 bad flags.
"""

import argparse
import logging
import sys

from .config import TrainConfig
from .predicting import predict
from .training import train


def _add_length_flags(parser):
    parser.add_argument("--max-input-length", type=int, default=64)
    parser.add_argument("--max-output-length", type=int, default=64)


def cmd_train(args) -> int:
    cfg = TrainConfig(
        train_tsv=args.train,
        dev_tsv=args.dev,
        out_dir=args.out,
        model=args.model,
        steps=args.steps,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        eval_every=args.eval_every,
        seed=args.seed,
        max_input_length=args.max_input_length,
        max_output_length=args.max_output_length,
    )
    manifest = train(cfg)
    score = manifest["best_dev_exact_match"]
    shown = "n/a (no dev examples)" if score is None else f"{score:.4f}"
    print(f"selection: {manifest['selection']} (step {manifest['best_step']})")
    print(f"best dev exact match: {shown}")
    print(f"wrote {args.out}/manifest.json")
    return 0


def cmd_predict(args) -> int:
    count = predict(
        args.checkpoint,
        args.annotated,
        args.meta,
        args.out,
        batch_size=args.batch_size,
        max_input_length=args.max_input_length,
        max_output_length=args.max_output_length,
    )
    print(f"wrote {count} predictions to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seq2seq", description="question-to-query translator trainer"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune on source<TAB>target pairs")
    p.add_argument("--train", required=True, help="training pairs TSV")
    p.add_argument("--dev", required=True, help="dev pairs TSV for selection")
    p.add_argument("--out", required=True, help="run directory")
    p.add_argument(
        "--model", default="t5-small",
        help="pretrained name/path, or 'tiny' for the offline word-level model",
    )
    p.add_argument("--steps", type=int, default=5000)
    p.add_argument("--lr", type=float, default=5e-5)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--eval-every", type=int, default=250)
    p.add_argument("--seed", type=int, default=0)
    _add_length_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="decode predictions from a checkpoint")
    p.add_argument("--checkpoint", required=True, help="checkpoint directory")
    p.add_argument("--annotated", required=True, help="annotated TSV (questions)")
    p.add_argument("--meta", required=True, help="metadata TSV (ids)")
    p.add_argument("--out", required=True, help="predictions TSV to write")
    p.add_argument("--batch-size", type=int, default=32)
    _add_length_flags(p)
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
