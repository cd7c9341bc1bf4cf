import json
from pathlib import Path

import pytest

from conftest import DATA_DIR, TOY_KB_TEXT
from kgqa_logic import write_annotated_tsv, write_meta_tsv
from kgqa_logic.annotate import load_questions
from kgqa_logic.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def toy_kb_file(tmp_path):
    path = tmp_path / "kb.txt"
    path.write_text(TOY_KB_TEXT, encoding="utf-8")
    return path


# --- augment ----------------------------------------------------------------


def test_augment(capsys, toy_kb_file, tmp_path):
    out = tmp_path / "kb_aug.txt"
    code, stdout, _ = run(capsys, "augment", "--kb", toy_kb_file, "--out", out)
    assert code == 0
    assert "base facts: 20" in stdout
    assert "augmented facts: 40" in stdout
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 40
    assert lines == sorted(lines, key=lambda line: line.split("|"))


def test_augment_rerun_is_byte_identical(capsys, toy_kb_file, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(capsys, "augment", "--kb", toy_kb_file, "--out", a)[0] == 0
    assert run(capsys, "augment", "--kb", toy_kb_file, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_augment_empty_file(capsys, tmp_path):
    kb = tmp_path / "empty.txt"
    kb.write_text("", encoding="utf-8")
    code, stdout, _ = run(capsys, "augment", "--kb", kb, "--out", tmp_path / "o.txt")
    assert code == 0
    assert "base facts: 0" in stdout
    assert "augmented facts: 0" in stdout


def test_augment_error_exit_codes(capsys, tmp_path):
    bad_fields = tmp_path / "bad.txt"
    bad_fields.write_text("m1|directed_by\n", encoding="utf-8")
    code, _, stderr = run(capsys, "augment", "--kb", bad_fields, "--out", tmp_path / "o")
    assert code == 3 and "line 1" in stderr

    bad_relation = tmp_path / "rel.txt"
    bad_relation.write_text("m1|acted_in|a1\n", encoding="utf-8")
    assert run(capsys, "augment", "--kb", bad_relation, "--out", tmp_path / "o")[0] == 4

    assert run(capsys, "augment", "--kb", tmp_path / "missing.txt", "--out", tmp_path / "o")[0] == 6


# --- annotate ----------------------------------------------------------------


def test_annotate_with_vanilla_fallback(capsys, toy_dataset, tmp_path):
    out = tmp_path / "work"
    code, stdout, _ = run(
        capsys, "annotate", "--dataset-root", toy_dataset, "--split", "test", "--out", out
    )
    assert code == 0
    for hop in (1, 2, 3):
        assert f"hop {hop}: 2 examples" in stdout
    assert "total: 6 examples" in stdout
    annotated = (out / "annotated_test.tsv").read_text(encoding="utf-8").splitlines()
    meta = (out / "meta_test.tsv").read_text(encoding="utf-8").splitlines()
    assert len(annotated) == len(meta) == 6
    assert annotated[0] == "who directed ENT\tdirected_by(ENT, X)"
    assert meta[0] == "1hop-000001\t1\tAlpha\tDan"


def test_annotate_single_hop(capsys, toy_dataset, tmp_path):
    out = tmp_path / "work"
    code, stdout, _ = run(
        capsys, "annotate", "--dataset-root", toy_dataset, "--split", "test",
        "--hop", "2", "--out", out,
    )
    assert code == 0
    lines = (out / "annotated_test.tsv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2


def test_annotate_missing_qtype_names_paths(capsys, toy_dataset, tmp_path):
    (toy_dataset / "2-hop" / "qa_test_qtype.txt").unlink()
    code, _, stderr = run(
        capsys, "annotate", "--dataset-root", toy_dataset, "--split", "test",
        "--out", tmp_path / "w",
    )
    assert code == 6
    assert "qa_test_qtype.txt" in stderr


def test_annotate_alignment_error(capsys, toy_dataset, tmp_path):
    qa = toy_dataset / "3-hop" / "qa_test.txt"
    qa.write_text(qa.read_text(encoding="utf-8") + "extra [q]\ta\n", encoding="utf-8")
    code, _, stderr = run(
        capsys, "annotate", "--dataset-root", toy_dataset, "--split", "test",
        "--out", tmp_path / "w",
    )
    assert code == 5


# --- sample ----------------------------------------------------------------


def _write_training_pair(directory: Path) -> tuple[Path, Path]:
    labels = {
        1: "movie_to_director",
        2: "movie_to_director_to_movie",
        3: "movie_to_director_to_movie_to_writer",
    }
    examples = []
    for hop, label in labels.items():
        qa = [f"question {i} about [e{i}]\tans{i}" for i in range(20)]
        examples.extend(load_questions(qa, [label] * 20, hop))
    annotated, meta = directory / "annotated_train.tsv", directory / "meta_train.tsv"
    with annotated.open("w", encoding="utf-8") as handle:
        write_annotated_tsv(examples, handle)
    with meta.open("w", encoding="utf-8") as handle:
        write_meta_tsv(examples, handle)
    return annotated, meta


def test_sample_command(capsys, tmp_path):
    annotated, meta = _write_training_pair(tmp_path)
    code, stdout, _ = run(
        capsys, "sample", "--annotated", annotated, "--meta", meta,
        "--n", 30, "--seed", 5, "--out", tmp_path,
    )
    assert code == 0
    out_path = tmp_path / "s30_seed5.tsv"
    assert out_path.is_file()
    assert len(out_path.read_text(encoding="utf-8").splitlines()) == 30
    assert "10/10/10" in stdout

    again = tmp_path / "again"
    again.mkdir()
    run(capsys, "sample", "--annotated", annotated, "--meta", meta,
        "--n", 30, "--seed", 5, "--out", again)
    assert (again / "s30_seed5.tsv").read_bytes() == out_path.read_bytes()


def test_sample_explicit_tsv_path_and_remainder(capsys, tmp_path):
    annotated, meta = _write_training_pair(tmp_path)
    out_path = tmp_path / "custom.tsv"
    code, stdout, _ = run(
        capsys, "sample", "--annotated", annotated, "--meta", meta,
        "--n", 10, "--seed", 0, "--out", out_path,
    )
    assert code == 0
    assert "4/3/3" in stdout
    assert len(out_path.read_text(encoding="utf-8").splitlines()) == 10


def test_sample_capacity_error(capsys, tmp_path):
    annotated, meta = _write_training_pair(tmp_path)
    code, _, stderr = run(
        capsys, "sample", "--annotated", annotated, "--meta", meta,
        "--n", 100, "--seed", 0, "--out", tmp_path,
    )
    assert code == 1
    assert "need 34" in stderr


# --- answer ----------------------------------------------------------------


def test_answer_with_path(capsys, toy_kb_file):
    code, stdout, _ = run(
        capsys, "answer", "--kb", toy_kb_file,
        "--question", "who directed [Alpha]", "--path", "movie_to_director",
    )
    assert code == 0
    assert 'query: directed_by("Alpha", X)' in stdout
    assert "answers (1):" in stdout
    assert "- Dan" in stdout
    assert "directed_by(Alpha, Dan)" in stdout


def test_answer_with_explicit_query_and_flags(capsys, toy_kb_file):
    code, stdout, _ = run(
        capsys, "answer", "--kb", toy_kb_file,
        "--question", "films sharing a director with [Alpha]",
        "--query", "directed_by(ENT, X), directed_by_reverse(X, Y)",
    )
    assert code == 0
    assert "- Beta" in stdout
    assert "excluded seed: Alpha" in stdout

    code, stdout, _ = run(
        capsys, "answer", "--kb", toy_kb_file,
        "--question", "films sharing a director with [Alpha]",
        "--query", "directed_by(ENT, X), directed_by_reverse(X, Y)",
        "--exclude-seed", "off",
    )
    assert code == 0
    assert "- Alpha" in stdout and "- Beta" in stdout


def test_answer_grounded_query_needs_no_question(capsys, toy_kb_file):
    code, stdout, _ = run(
        capsys, "answer", "--kb", toy_kb_file, "--query", 'written_by("Gamma", X)'
    )
    assert code == 0
    assert "- Wes" in stdout


def test_answer_error_paths(capsys, toy_kb_file):
    code, _, _ = run(
        capsys, "answer", "--kb", toy_kb_file,
        "--question", "no brackets", "--path", "movie_to_director",
    )
    assert code == 3
    code, _, _ = run(capsys, "answer", "--kb", toy_kb_file, "--query", "directed_by(ENT, X)")
    assert code == 1  # ENT but no --question
    code, _, _ = run(capsys, "answer", "--kb", toy_kb_file)
    assert code == 1
    code, _, _ = run(capsys, "answer", "--kb", toy_kb_file, "--query", "directed_by(ENT X)")
    assert code == 3


# --- eval ----------------------------------------------------------------


@pytest.fixture()
def annotated_test_pair(capsys, toy_dataset, tmp_path):
    out = tmp_path / "work"
    assert run(
        capsys, "annotate", "--dataset-root", toy_dataset, "--split", "test", "--out", out
    )[0] == 0
    return out / "annotated_test.tsv", out / "meta_test.tsv"


def test_eval_gold(capsys, toy_dataset, annotated_test_pair, tmp_path):
    annotated, meta = annotated_test_pair
    report_dir = tmp_path / "report"
    code, stdout, _ = run(
        capsys, "eval", "--kb", toy_dataset / "kb.txt",
        "--annotated", annotated, "--meta", meta, "--out", report_dir,
    )
    assert code == 0
    assert "100.0\t100.0\t100.0" in stdout
    report = json.loads((report_dir / "report.json").read_text(encoding="utf-8"))
    assert report["overall"]["hit_at_1"] == 1.0
    assert report["overall"]["n"] == 6
    assert (report_dir / "summary.tsv").is_file()


def test_eval_rerun_byte_identical(capsys, toy_dataset, annotated_test_pair, tmp_path):
    annotated, meta = annotated_test_pair
    dirs = [tmp_path / "r1", tmp_path / "r2"]
    for directory in dirs:
        assert run(
            capsys, "eval", "--kb", toy_dataset / "kb.txt",
            "--annotated", annotated, "--meta", meta,
            "--hit1", "sampled", "--seed", 11, "--out", directory,
        )[0] == 0
    assert (dirs[0] / "report.json").read_bytes() == (dirs[1] / "report.json").read_bytes()
    assert (dirs[0] / "summary.tsv").read_bytes() == (dirs[1] / "summary.tsv").read_bytes()


def test_eval_file_translator_fixture(capsys, toy_dataset, annotated_test_pair, tmp_path):
    annotated, meta = annotated_test_pair
    report_dir = tmp_path / "report"
    code, stdout, _ = run(
        capsys, "eval", "--kb", toy_dataset / "kb.txt",
        "--annotated", annotated, "--meta", meta,
        "--translator", "file", "--predictions", DATA_DIR / "toy_predictions.tsv",
        "--out", report_dir,
    )
    assert code == 0
    assert "100.0\t50.0\t50.0" in stdout
    report = json.loads((report_dir / "report.json").read_text(encoding="utf-8"))
    assert report["overall"]["parse_failures"] == 1
    assert report["overall"]["absent_predictions"] == 1
    assert report["overall"]["hit_at_1"] == pytest.approx(4 / 6)
    # renamed variables still count as translator exact match
    assert report["overall"]["translator_exact_match"] == pytest.approx(4 / 6)


def test_eval_hop_filter(capsys, toy_dataset, annotated_test_pair):
    annotated, meta = annotated_test_pair
    code, stdout, _ = run(
        capsys, "eval", "--kb", toy_dataset / "kb.txt",
        "--annotated", annotated, "--meta", meta, "--hop", "1",
    )
    assert code == 0
    assert "100.0\t-\t-" in stdout


def test_eval_error_paths(capsys, toy_dataset, annotated_test_pair, tmp_path):
    annotated, meta = annotated_test_pair
    kb = toy_dataset / "kb.txt"
    code, _, _ = run(
        capsys, "eval", "--kb", kb, "--annotated", annotated, "--meta", meta,
        "--translator", "file", "--predictions", tmp_path / "missing.tsv",
    )
    assert code == 6
    code, _, _ = run(
        capsys, "eval", "--kb", kb, "--annotated", annotated, "--meta", meta,
        "--translator", "file",
    )
    assert code == 1

    empty = tmp_path / "empty.tsv"
    empty.write_text("", encoding="utf-8")
    code, _, stderr = run(
        capsys, "eval", "--kb", kb, "--annotated", empty, "--meta", empty
    )
    assert code == 1 and "no examples" in stderr

    short_meta = tmp_path / "short_meta.tsv"
    short_meta.write_text(meta.read_text(encoding="utf-8").splitlines()[0] + "\n", encoding="utf-8")
    code, _, _ = run(
        capsys, "eval", "--kb", kb, "--annotated", annotated, "--meta", short_meta
    )
    assert code == 5


# --- variance ----------------------------------------------------------------


def test_variance_gold(capsys, toy_dataset, annotated_test_pair, tmp_path):
    annotated, meta = annotated_test_pair
    out = tmp_path / "var"
    code, stdout, _ = run(
        capsys, "variance", "--kb", toy_dataset / "kb.txt",
        "--annotated", annotated, "--meta", meta,
        "--sizes", "3,6", "--repeats", 2, "--out", out,
    )
    assert code == 0
    cells = (out / "variance_cells.tsv").read_text(encoding="utf-8").splitlines()
    assert len(cells) == 1 + 4
    assert all(line.endswith("1.000000") for line in cells[1:])
    assert "size\tcells\tmin\tmax\tmean" in stdout


def test_variance_file_translator_with_missing_cells(capsys, toy_dataset, annotated_test_pair, tmp_path):
    annotated, meta = annotated_test_pair
    gold_lines = []
    for line, meta_line in zip(
        annotated.read_text(encoding="utf-8").splitlines(),
        meta.read_text(encoding="utf-8").splitlines(),
    ):
        example_id = meta_line.split("\t")[0]
        gold_lines.append(f"{example_id}\t{line.split(chr(9))[1]}")
    predictions = "\n".join(gold_lines) + "\n"
    (tmp_path / "preds_s3_r1.tsv").write_text(predictions, encoding="utf-8")
    (tmp_path / "preds_s3_r2.tsv").write_text(predictions, encoding="utf-8")
    out = tmp_path / "var"
    code, stdout, _ = run(
        capsys, "variance", "--kb", toy_dataset / "kb.txt",
        "--annotated", annotated, "--meta", meta,
        "--sizes", "3,6", "--repeats", 2,
        "--translator", "file",
        "--predictions-template", str(tmp_path / "preds_s{n}_r{repeat}.tsv"),
        "--out", out,
    )
    assert code == 0
    cells = (out / "variance_cells.tsv").read_text(encoding="utf-8").splitlines()[1:]
    assert sum("skipped" in line for line in cells) == 2
    summary = (out / "variance_summary.tsv").read_text(encoding="utf-8").splitlines()
    assert len(summary) == 2  # header + size 3 only
    assert summary[1].startswith("3\t2\t1.000000")


def test_variance_missing_template_errors(capsys, toy_dataset, annotated_test_pair):
    annotated, meta = annotated_test_pair
    code, _, stderr = run(
        capsys, "variance", "--kb", toy_dataset / "kb.txt",
        "--annotated", annotated, "--meta", meta, "--translator", "file",
    )
    assert code == 1
    assert "predictions-template" in stderr
