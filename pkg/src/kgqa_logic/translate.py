"""Question->query translators and exact-match scoring.

Two implementations of the translation contract: the gold oracle compiles
the dataset-provided inference path, and the file-backed translator reads
an external model's predictions TSV - the sole bridge to any trained
translator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Mapping

from .annotate import QAExample, path_to_query
from .errors import KgqaError, QaParseError, QuerySyntaxError
from .logic import Query, canonicalize_variables, parse_query, print_query


@dataclass(frozen=True)
class TranslationResult:
    raw_text: str
    query: Query | None
    parse_ok: bool
    absent: bool = False


def translate_gold(example: QAExample) -> TranslationResult:
    """Oracle translator: compile the example's inference path."""
    query = path_to_query(example.path)
    return TranslationResult(raw_text=print_query(query), query=query, parse_ok=True)


def load_predictions(lines: Iterable[str]) -> dict[str, str]:
    """Read an ``example_id<TAB>predicted_query_text`` TSV into a map.

    Duplicate ids are an error; an empty prediction text is kept (it will
    score as a parse failure downstream).
    """
    predictions: dict[str, str] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if "\t" not in line:
            raise QaParseError(
                f"expected 'example_id<TAB>query_text', got {line!r}", line_no
            )
        example_id, text = line.split("\t", 1)
        if example_id in predictions:
            raise QaParseError(f"duplicate example id {example_id!r}", line_no)
        predictions[example_id] = text
    return predictions


def translate_from_file(
    predictions: Mapping[str, str], example_id: str
) -> TranslationResult:
    """Look up and parse one prediction; id absence is its own category."""
    if example_id not in predictions:
        return TranslationResult(raw_text="", query=None, parse_ok=False, absent=True)
    text = predictions[example_id]
    try:
        query = parse_query(text)
    except KgqaError:
        return TranslationResult(raw_text=text, query=None, parse_ok=False)
    return TranslationResult(raw_text=text, query=query, parse_ok=True)


class GoldTranslator:
    """Callable translator wrapping :func:`translate_gold`."""

    name = "gold"

    def __call__(self, example: QAExample) -> TranslationResult:
        return translate_gold(example)


class FileTranslator:
    """Callable translator over a loaded predictions map."""

    name = "file"

    def __init__(self, predictions: Mapping[str, str]):
        self.predictions = dict(predictions)

    @classmethod
    def from_file(cls, source: IO[str]) -> "FileTranslator":
        return cls(load_predictions(source))

    def __call__(self, example: QAExample) -> TranslationResult:
        return translate_from_file(self.predictions, example.id)


def exact_match(predicted: str, gold: str, *, raw: bool = False) -> bool:
    """Structural equality after canonicalization (default) or raw strings.

    Canonical mode parses both texts, renames variables X, Y, Z in
    first-occurrence order, and compares structures, so variable letters
    and whitespace do not matter. An unparseable prediction never matches;
    an unparseable gold is a caller error.
    """
    if raw:
        return predicted.strip() == gold.strip()
    try:
        gold_query = parse_query(gold)
    except KgqaError as exc:
        raise QuerySyntaxError(f"gold query does not parse: {exc}") from exc
    try:
        predicted_query = parse_query(predicted)
    except KgqaError:
        return False
    return canonicalize_variables(predicted_query) == canonicalize_variables(gold_query)
