"""Command-line driver wiring the pipeline stages together.

One binary, six subcommands:

    kgqa augment   --kb kb.txt --out kb_augmented.txt
    kgqa annotate  --dataset-root DATA --split test --out work/
    kgqa sample    --annotated work/annotated_train.tsv --meta work/meta_train.tsv \
                   --n 1000 --seed 1 --out work/
    kgqa answer    --kb kb.txt --question "... [entity] ..." --path writer_movie_director
    kgqa eval      --kb kb.txt --annotated A.tsv --meta M.tsv --translator gold --out report/
    kgqa variance  --kb kb.txt --annotated A.tsv --meta M.tsv --sizes 100,250,500,1000 \
                   --repeats 5 --predictions-template "preds_s{n}_r{repeat}.tsv" --translator file

All randomness flows from --seed; rerunning a command with the same flags
produces byte-identical output files. Exit codes: 0 success, 3 parse
errors, 4 schema errors, 5 alignment errors, 6 I/O errors, 1 anything
else, 2 bad command lines.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import IO, Callable, Sequence

from .annotate import (
    InferencePath,
    QAExample,
    load_questions,
    mask_question,
    path_to_query,
    read_annotated_pair,
    sample_training_set,
    write_annotated_tsv,
    write_meta_tsv,
)
from .errors import EvalConfigError, KgqaError
from .evaluate import EvalConfig, Translator, evaluate, variance_run
from .kb import REVERSE_SUFFIX, FactBase, augment_reverse, dump_kb, load_kb_path
from .logic import (
    DEFAULT_PROOF_CAP,
    AnswerResult,
    execute,
    ground,
    parse_query,
    print_query,
)
from .translate import FileTranslator, GoldTranslator

SPLITS = ("train", "dev", "test")
IO_ERROR_EXIT = 6


def _parse_hops(text: str) -> tuple[int, ...]:
    return (1, 2, 3) if text == "all" else (int(text),)


def _first_existing(candidates: Sequence[Path]) -> Path:
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    tried = ", ".join(str(c) for c in candidates)
    raise FileNotFoundError(f"none of the expected files exist: {tried}")


def locate_split_files(dataset_root: str, hop: int, split: str) -> tuple[Path, Path]:
    """Find the qa / qtype files for one hop, tolerating a vanilla/ subdir."""
    hop_dir = Path(dataset_root) / f"{hop}-hop"
    qa = _first_existing(
        [hop_dir / f"qa_{split}.txt", hop_dir / "vanilla" / f"qa_{split}.txt"]
    )
    qtype = _first_existing(
        [
            hop_dir / f"qa_{split}_qtype.txt",
            hop_dir / "vanilla" / f"qa_{split}_qtype.txt",
        ]
    )
    return qa, qtype


def _load_kb_for_queries(path: str) -> FactBase:
    # Accept either a raw base dump (augment it here) or the output of
    # `kgqa augment` (already carries reverse facts).
    fb = load_kb_path(path)
    if any(relation.endswith(REVERSE_SUFFIX) for relation in fb.relations):
        return fb
    return augment_reverse(fb)


def _write_text(path: Path, write: Callable[[IO[str]], object]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        write(handle)


def _read_pair(annotated_path: str, meta_path: str) -> list[QAExample]:
    with open(annotated_path, encoding="utf-8") as annotated:
        with open(meta_path, encoding="utf-8") as meta:
            return read_annotated_pair(annotated, meta)


def _make_translator(kind: str, predictions_path: str | None) -> Translator:
    if kind == "gold":
        return GoldTranslator()
    if predictions_path is None:
        raise EvalConfigError("--translator file requires --predictions")
    with open(predictions_path, encoding="utf-8") as handle:
        return FileTranslator.from_file(handle)


# --- subcommands --------------------------------------------------------------


def cmd_augment(args: argparse.Namespace) -> int:
    fb = load_kb_path(args.kb)
    augmented = augment_reverse(fb)
    out_path = Path(args.out)
    _write_text(out_path, lambda handle: dump_kb(augmented, handle))
    print(f"base facts: {len(fb.facts)}")
    print(f"augmented facts: {len(augmented.facts)}")
    print(f"wrote {out_path}")
    return 0


def cmd_annotate(args: argparse.Namespace) -> int:
    examples: list[QAExample] = []
    for hop in _parse_hops(args.hop):
        qa_path, qtype_path = locate_split_files(args.dataset_root, hop, args.split)
        with qa_path.open(encoding="utf-8") as qa:
            with qtype_path.open(encoding="utf-8") as qtype:
                hop_examples = load_questions(qa, qtype, hop)
        examples.extend(hop_examples)
        print(f"hop {hop}: {len(hop_examples)} examples")
    out_dir = Path(args.out)
    annotated_path = out_dir / f"annotated_{args.split}.tsv"
    meta_path = out_dir / f"meta_{args.split}.tsv"
    _write_text(annotated_path, lambda handle: write_annotated_tsv(examples, handle))
    _write_text(meta_path, lambda handle: write_meta_tsv(examples, handle))
    print(f"total: {len(examples)} examples")
    print(f"wrote {annotated_path}")
    print(f"wrote {meta_path}")
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    examples = _read_pair(args.annotated, args.meta)
    by_hop = [[e for e in examples if e.hop == hop] for hop in (1, 2, 3)]
    sample = sample_training_set(by_hop, args.n, args.seed)
    out = Path(args.out)
    out_path = out if out.suffix == ".tsv" else out / f"s{args.n}_seed{args.seed}.tsv"
    _write_text(out_path, lambda handle: write_annotated_tsv(sample, handle))
    counts = [sum(e.hop == hop for e in sample) for hop in (1, 2, 3)]
    print(f"sampled {len(sample)} examples (per hop: {counts[0]}/{counts[1]}/{counts[2]})")
    print(f"wrote {out_path}")
    return 0


def _print_answer_result(result: AnswerResult, out: IO[str]) -> None:
    out.write(f"answers ({len(result.answers)}):\n")
    for answer in result.answers:
        out.write(f"- {answer}\n")
        for proof in result.proofs.get(answer, ()):
            for depth, (predicate, subject, obj) in enumerate(proof.as_strings()):
                indent = "  " * (depth + 1)
                out.write(f"{indent}{predicate}({subject}, {obj})\n")
    if result.excluded_seed is not None:
        out.write(f"excluded seed: {result.excluded_seed}\n")


def cmd_answer(args: argparse.Namespace) -> int:
    if args.query is None and args.path is None:
        raise EvalConfigError("provide --query or --path")
    fb = _load_kb_for_queries(args.kb)
    entity = None
    if args.question is not None:
        _, entity = mask_question(args.question)
    if args.query is not None:
        query = parse_query(args.query)
    else:
        query = path_to_query(InferencePath.from_label(args.path))
    if not query.is_grounded:
        if entity is None:
            raise EvalConfigError(
                "query contains ENT; provide --question with one bracketed entity"
            )
        query = ground(query, entity)
    print(f"query: {print_query(query)}")
    result = execute(
        query,
        fb,
        exclude_seed=args.exclude_seed == "on",
        proof_cap=args.proof_cap,
    )
    _print_answer_result(result, sys.stdout)
    return 0


def _eval_config(args: argparse.Namespace) -> EvalConfig:
    return EvalConfig(
        exclude_seed=args.exclude_seed == "on",
        rng_seed=args.seed,
        hit1_mode=args.hit1,
        proof_cap=args.proof_cap,
        workers=args.workers,
    )


def cmd_eval(args: argparse.Namespace) -> int:
    hops = _parse_hops(args.hop)
    examples = [e for e in _read_pair(args.annotated, args.meta) if e.hop in hops]
    translator = _make_translator(args.translator, args.predictions)
    fb = _load_kb_for_queries(args.kb)
    report = evaluate(examples, translator, fb, _eval_config(args))
    if args.out is not None:
        out_dir = Path(args.out)
        _write_text(out_dir / "report.json", lambda handle: report.to_json(handle))
        _write_text(out_dir / "summary.tsv", report.write_summary_tsv)
        print(f"wrote {out_dir / 'report.json'}")
        print(f"wrote {out_dir / 'summary.tsv'}")
    print("hit@1 (%) per hop:")
    print("1-hop\t2-hop\t3-hop")
    print(report.hit1_table_row())
    print(f"overall hit@1: {report.overall.hit_at_1 * 100:.1f}")
    return 0


def cmd_variance(args: argparse.Namespace) -> int:
    examples = _read_pair(args.annotated, args.meta)
    fb = _load_kb_for_queries(args.kb)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    if not sizes:
        raise EvalConfigError("--sizes must name at least one sample size")

    if args.translator == "gold":

        def translator_for(size: int, repeat: int) -> Translator | None:
            return GoldTranslator()

    else:
        template = args.predictions_template
        if template is None:
            raise EvalConfigError(
                "--translator file requires --predictions-template"
            )

        def translator_for(size: int, repeat: int) -> Translator | None:
            path = Path(template.format(n=size, repeat=repeat, seed=args.seed))
            if not path.is_file():
                return None
            with path.open(encoding="utf-8") as handle:
                return FileTranslator.from_file(handle)

    table = variance_run(
        examples,
        fb,
        _eval_config(args),
        sizes,
        args.repeats,
        args.seed,
        translator_for,
    )
    if args.out is not None:
        out_dir = Path(args.out)
        _write_text(out_dir / "variance_cells.tsv", table.write_cells_tsv)
        _write_text(out_dir / "variance_summary.tsv", table.write_summary_tsv)
        print(f"wrote {out_dir / 'variance_cells.tsv'}")
        print(f"wrote {out_dir / 'variance_summary.tsv'}")
    table.write_summary_tsv(sys.stdout)
    return 0


# --- parser -------------------------------------------------------------------


def _add_execution_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--exclude-seed",
        choices=("on", "off"),
        default="on",
        help="drop the question entity from final answers (default on)",
    )
    parser.add_argument(
        "--proof-cap",
        type=int,
        default=DEFAULT_PROOF_CAP,
        help=f"max proofs kept per answer (default {DEFAULT_PROOF_CAP})",
    )


def _add_eval_flags(parser: argparse.ArgumentParser) -> None:
    _add_execution_flags(parser)
    parser.add_argument(
        "--hit1",
        choices=("expected", "sampled"),
        default="expected",
        help="hit@1 protocol: analytic expectation or seeded random pick",
    )
    parser.add_argument("--seed", type=int, default=0, help="rng seed (default 0)")
    parser.add_argument(
        "--workers",
        type=int,
        default=0,
        help="thread pool size for evaluation; 0 = run serially",
    )
    parser.add_argument(
        "--translator",
        choices=("gold", "file"),
        default="gold",
        help="question-to-query translator under evaluation",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgqa",
        description="Knowledge-graph logic-query pipeline: augment, annotate, "
        "sample, answer, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="add reverse twin facts to a KB dump")
    p.add_argument("--kb", required=True, help="pipe-delimited triple file")
    p.add_argument("--out", required=True, help="path for the augmented dump")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser(
        "annotate", help="compile qa/qtype files into annotated + meta TSVs"
    )
    p.add_argument(
        "--dataset-root",
        required=True,
        help="directory containing {1,2,3}-hop subdirectories",
    )
    p.add_argument("--split", choices=SPLITS, required=True)
    p.add_argument("--hop", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser(
        "sample", help="draw a stratified training sample from an annotated split"
    )
    p.add_argument("--annotated", required=True, help="annotated_train.tsv path")
    p.add_argument("--meta", required=True, help="meta_train.tsv path")
    p.add_argument("--n", type=int, required=True, help="total sample size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--out",
        default=".",
        help="output directory (file named s{n}_seed{seed}.tsv) or explicit .tsv path",
    )
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser(
        "answer", help="answer one question, printing answers and proof trees"
    )
    p.add_argument("--kb", required=True)
    p.add_argument(
        "--question", help="question text with the entity in [brackets]"
    )
    p.add_argument("--path", help="inference path label, e.g. writer_movie_director")
    p.add_argument(
        "--query", help='explicit query text, e.g. "written_by(ENT, X)"'
    )
    _add_execution_flags(p)
    p.set_defaults(func=cmd_answer)

    p = sub.add_parser("eval", help="run the full pipeline and report metrics")
    p.add_argument("--kb", required=True)
    p.add_argument("--annotated", required=True, help="annotated_{split}.tsv path")
    p.add_argument("--meta", required=True, help="meta_{split}.tsv path")
    p.add_argument("--hop", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--predictions", help="predictions TSV (file translator)")
    p.add_argument("--out", help="directory for report.json and summary.tsv")
    _add_eval_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser(
        "variance", help="repeat evaluation across sample sizes (trend table)"
    )
    p.add_argument("--kb", required=True)
    p.add_argument("--annotated", required=True)
    p.add_argument("--meta", required=True)
    p.add_argument(
        "--sizes", default="100,250,500,1000", help="comma-separated sample sizes"
    )
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument(
        "--predictions-template",
        help="predictions path template with {n} and {repeat} placeholders",
    )
    p.add_argument("--out", help="directory for variance TSVs")
    _add_eval_flags(p)
    p.set_defaults(func=cmd_variance)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KgqaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_ERROR_EXIT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
