"""Shared fixtures: a hand-built movie world with questions at every hop.

The gold answers below were enumerated by hand and are cross-checked
against brute_force_execute in the evaluation tests, so every other test
can treat them as ground truth.
"""

from __future__ import annotations

import io
import os
from pathlib import Path

import pytest

from kgqa_logic import FactBase, QAExample, augment_reverse, load_kb, load_questions

DATA_DIR = Path(__file__).parent / "data"

METAQA_ROOT = os.environ.get("METAQA_ROOT", "")

requires_metaqa = pytest.mark.skipif(
    not METAQA_ROOT,
    reason="METAQA_ROOT not set; point it at a local MetaQA checkout to run "
    "real-dataset acceptance checks",
)


def metaqa_kb_path() -> Path:
    root = Path(METAQA_ROOT)
    for candidate in (root / "kb.txt", root / "kb" / "kb.txt"):
        if candidate.is_file():
            return candidate
    raise FileNotFoundError(f"no kb.txt under {root}")


# 20 base facts: three movies, shared people, attribute relations.
TOY_KB_TEXT = """\
Alpha|directed_by|Dan
Beta|directed_by|Dan
Gamma|directed_by|Dana
Alpha|written_by|Wes
Beta|written_by|Wendy
Gamma|written_by|Wes
Alpha|starred_actors|Amy
Alpha|starred_actors|Alan
Beta|starred_actors|Amy
Gamma|starred_actors|Ann
Alpha|release_year|1994
Beta|release_year|1994
Gamma|release_year|2001
Alpha|has_genre|drama
Beta|has_genre|comedy
Gamma|has_genre|drama
Alpha|in_language|english
Beta|in_language|french
Alpha|has_tags|noir
Gamma|has_tags|noir
"""

# (question, pipe-joined gold answers, path label) per hop; answers assume
# seed exclusion ON (the harness default).
TOY_QA: dict[int, list[tuple[str, str, str]]] = {
    1: [
        ("who directed [Alpha]", "Dan", "movie_to_director"),
        ("what films did [Amy] star in", "Alpha|Beta", "actor_to_movie"),
    ],
    2: [
        (
            "what films share a director with [Alpha]",
            "Beta",
            "movie_to_director_to_movie",
        ),
        (
            "who starred in films written by [Wes]",
            "Alan|Amy|Ann",
            "writer_to_movie_to_actor",
        ),
    ],
    3: [
        (
            "which genres describe films sharing an actor with [Beta]",
            "comedy|drama",
            "movie_to_actor_to_movie_to_genre",
        ),
        (
            "who wrote films directed by the director of [Gamma]",
            "Wes",
            "movie_to_director_to_movie_to_writer",
        ),
    ],
}


def build_toy_examples() -> list[QAExample]:
    examples: list[QAExample] = []
    for hop, rows in sorted(TOY_QA.items()):
        qa_lines = [f"{question}\t{answers}" for question, answers, _ in rows]
        qtype_lines = [label for _, _, label in rows]
        examples.extend(load_questions(qa_lines, qtype_lines, hop))
    return examples


@pytest.fixture(scope="session")
def toy_base_fb() -> FactBase:
    return load_kb(io.StringIO(TOY_KB_TEXT))


@pytest.fixture(scope="session")
def toy_fb(toy_base_fb: FactBase) -> FactBase:
    return augment_reverse(toy_base_fb)


@pytest.fixture(scope="session")
def toy_examples() -> list[QAExample]:
    return build_toy_examples()


@pytest.fixture()
def toy_dataset(tmp_path: Path) -> Path:
    """MetaQA-style directory tree for CLI tests.

    Hop 1 hides its qa files under vanilla/ to exercise the fallback; the
    qtype file stays at hop level, matching the dataset's real layout.
    """
    root = tmp_path / "dataset"
    (root / "1-hop" / "vanilla").mkdir(parents=True)
    (root / "2-hop").mkdir()
    (root / "3-hop").mkdir()
    (root / "kb.txt").write_text(TOY_KB_TEXT, encoding="utf-8")
    for hop, rows in TOY_QA.items():
        qa_text = "".join(f"{q}\t{a}\n" for q, a, _ in rows)
        qtype_text = "".join(f"{label}\n" for _, _, label in rows)
        hop_dir = root / f"{hop}-hop"
        qa_dir = hop_dir / "vanilla" if hop == 1 else hop_dir
        (qa_dir / "qa_test.txt").write_text(qa_text, encoding="utf-8")
        (hop_dir / "qa_test_qtype.txt").write_text(qtype_text, encoding="utf-8")
    return root
