"""Offline end-to-end demo: corpus generation to scored predictions.

Generates a synthetic corpus with the sibling kgqa package, annotates it,
samples a training set, fine-tunes the offline tiny model, predicts the test
split, and scores the predictions with `kgqa eval`. Everything runs on CPU in
about a minute; no downloads.

Usage: python3 scripts/e2e_toy.py [--workdir /tmp/seq2seq_demo] [--steps 600]
"""

import argparse
import json
import shutil
import subprocess
import sys
from pathlib import Path

from seq2seq_trainer import TrainConfig, predict, train

REPO_SCRIPTS = Path(__file__).resolve().parents[2] / "scripts"


def sh(*argv) -> None:
    argv = [str(a) for a in argv]
    print(f"\n=== {' '.join(argv)} ===")
    subprocess.run(argv, check=True)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--workdir", type=Path, default=Path("/tmp/seq2seq_demo"))
    parser.add_argument("--steps", type=int, default=600)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    kgqa = shutil.which("kgqa")
    generator = REPO_SCRIPTS / "make_toy_dataset.py"
    if kgqa is None or not generator.exists():
        print("error: needs the kgqa CLI installed and its repo scripts present",
              file=sys.stderr)
        return 1

    dataset = args.workdir / "dataset"
    out = args.workdir / "out"
    sh(sys.executable, generator, "--out", dataset, "--movies", "40",
       "--train", "80", "--dev", "20", "--test", "20", "--seed", args.seed)
    for split in ("train", "dev", "test"):
        sh(kgqa, "annotate", "--dataset-root", dataset, "--split", split,
           "--out", out / "ann")
    sh(kgqa, "sample", "--annotated", out / "ann" / "annotated_train.tsv",
       "--meta", out / "ann" / "meta_train.tsv", "--n", "60",
       "--seed", args.seed, "--out", out / "samples")

    print("\n=== fine-tune tiny model ===")
    manifest = train(
        TrainConfig(
            train_tsv=str(out / "samples" / f"s60_seed{args.seed}.tsv"),
            dev_tsv=str(out / "ann" / "annotated_dev.tsv"),
            out_dir=str(out / "run"),
            model="tiny",
            steps=args.steps,
            eval_every=50,
            learning_rate=5e-4,
            batch_size=8,
            seed=args.seed,
        )
    )
    print(f"best dev exact match: {manifest['best_dev_exact_match']:.4f} "
          f"at step {manifest['best_step']}")

    print("\n=== predict test split ===")
    predictions = out / "predictions.tsv"
    count = predict(out / "run" / "checkpoint",
                    out / "ann" / "annotated_test.tsv",
                    out / "ann" / "meta_test.tsv", predictions)
    print(f"wrote {count} predictions")

    sh(kgqa, "eval", "--kb", dataset / "kb.txt",
       "--annotated", out / "ann" / "annotated_test.tsv",
       "--meta", out / "ann" / "meta_test.tsv",
       "--translator", "file", "--predictions", predictions,
       "--out", out / "eval")
    report = json.loads((out / "eval" / "report.json").read_text(encoding="utf-8"))
    print(f"\ntranslator exact match: {report['overall']['translator_exact_match']:.4f}")
    print(f"outputs under {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
