"""Question annotation: entity masking, inference-path compilation, sampling.

Turns MetaQA-style question records plus their dataset-provided inference
paths into (masked question, gold query) training pairs, and draws the
stratified per-hop samples used for fine-tuning runs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .errors import (
    AlignmentError,
    PathMappingError,
    QaParseError,
    QuestionFormatError,
    SamplingError,
)
from .logic import ENT, ENT_TOKEN, Atom, Query, Variable, canonical_variable_name, parse_query, print_query

# Node-type pair -> predicate, the fixed 13-entry vocabulary that covers
# every adjacent pair occurring in MetaQA path labels.
PAIR_TO_RELATION: dict[tuple[str, str], str] = {
    ("actor", "movie"): "starred_actors_reverse",
    ("director", "movie"): "directed_by_reverse",
    ("movie", "actor"): "starred_actors",
    ("movie", "director"): "directed_by",
    ("movie", "genre"): "has_genre",
    ("movie", "imdbrating"): "has_imdb_rating",
    ("movie", "imdbvotes"): "has_imdb_votes",
    ("movie", "language"): "in_language",
    ("movie", "tags"): "has_tags",
    ("movie", "writer"): "written_by",
    ("movie", "year"): "release_year",
    ("tag", "movie"): "has_tags_reverse",
    ("writer", "movie"): "written_by_reverse",
}

# The 13 predicates are pairwise distinct, so the map inverts cleanly.
RELATION_TO_PAIR: dict[str, tuple[str, str]] = {
    relation: pair for pair, relation in PAIR_TO_RELATION.items()
}


@dataclass(frozen=True)
class InferencePath:
    """Dataset-provided node-type chain, e.g. writer -> movie -> director."""

    nodes: tuple[str, ...]

    def __post_init__(self):
        if len(self.nodes) < 2 or len(self.nodes) > 4:
            raise PathMappingError(
                f"inference path must have 2-4 nodes, got {list(self.nodes)}"
            )

    @classmethod
    def from_label(cls, label: str) -> "InferencePath":
        """Parse a path label; both ``writer_movie_director`` and the
        released files' ``writer_to_movie_to_director`` forms work."""
        label = label.strip()
        if not label:
            raise PathMappingError("empty inference path label")
        if "_to_" in label:
            nodes = label.split("_to_")
        else:
            nodes = label.split("_")
        return cls(tuple(nodes))

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    @property
    def label(self) -> str:
        return "_".join(self.nodes)

    def pairs(self) -> list[tuple[str, str]]:
        return [
            (self.nodes[i], self.nodes[i + 1]) for i in range(len(self.nodes) - 1)
        ]


def path_to_query(path: InferencePath) -> Query:
    """Compile an inference path into its gold chain query.

    Adjacent node pairs map to predicates; atoms chain through fresh
    variables X, Y, Z starting from ENT.
    """
    atoms: list[Atom] = []
    previous = ENT
    for i, pair in enumerate(path.pairs()):
        if pair not in PAIR_TO_RELATION:
            raise PathMappingError(f"no predicate mapping for pair {'_'.join(pair)!r}")
        var = Variable(canonical_variable_name(i))
        atoms.append(Atom(PAIR_TO_RELATION[pair], previous, var))
        previous = var
    return Query(tuple(atoms))


def path_from_query(query: Query) -> InferencePath:
    """Invert :func:`path_to_query`; defined because the pair map is injective."""
    nodes: list[str] = []
    for i, atom in enumerate(query.atoms):
        pair = RELATION_TO_PAIR.get(atom.predicate)
        if pair is None:
            raise PathMappingError(
                f"predicate {atom.predicate!r} has no inference-pair mapping"
            )
        if not nodes:
            nodes.extend(pair)
        else:
            if pair[0] != nodes[-1]:
                raise PathMappingError(
                    f"atom {i} pair {'_'.join(pair)!r} does not chain from "
                    f"{nodes[-1]!r}"
                )
            nodes.append(pair[1])
    return InferencePath(tuple(nodes))


def mask_question(raw_question: str) -> tuple[str, str]:
    """Replace the single bracketed span with ENT; returns (masked, entity)."""
    opens = raw_question.count("[")
    closes = raw_question.count("]")
    if opens != 1 or closes != 1:
        raise QuestionFormatError(
            f"expected exactly one bracketed entity, got {opens} '[' and "
            f"{closes} ']': {raw_question!r}"
        )
    start = raw_question.index("[")
    end = raw_question.index("]")
    if start > end:
        raise QuestionFormatError(
            f"']' precedes '[' in question: {raw_question!r}"
        )
    entity = raw_question[start + 1 : end].strip()
    masked = raw_question[:start] + ENT_TOKEN + raw_question[end + 1 :]
    return masked, entity


@dataclass(frozen=True)
class QAExample:
    id: str
    raw_question: str
    masked_question: str
    entity: str
    path: InferencePath
    gold_answers: tuple[str, ...]
    hop: int

    def __post_init__(self):
        if self.masked_question.count(ENT_TOKEN) != 1:
            raise QuestionFormatError(
                f"masked question must contain {ENT_TOKEN} exactly once: "
                f"{self.masked_question!r}"
            )
        if "[" in self.masked_question or "]" in self.masked_question:
            raise QuestionFormatError(
                f"masked question still contains brackets: {self.masked_question!r}"
            )
        if self.hop != self.path.hop_count:
            raise QuestionFormatError(
                f"hop {self.hop} disagrees with path {self.path.label!r}"
            )


@dataclass(frozen=True)
class AnnotatedPair:
    masked_question: str
    gold_query_text: str


def annotate(example: QAExample) -> AnnotatedPair:
    """Masked question plus the canonical text of the path-compiled query."""
    return AnnotatedPair(
        masked_question=example.masked_question,
        gold_query_text=print_query(path_to_query(example.path)),
    )


def _read_lines(source: Iterable[str]) -> list[str]:
    lines = [line.rstrip("\r\n") for line in source]
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def example_id(hop: int, line_no: int) -> str:
    return f"{hop}hop-{line_no:06d}"


def load_questions(
    qa_lines: Iterable[str], qtype_lines: Iterable[str], hop: int
) -> list[QAExample]:
    """Parse line-aligned qa / qtype files for one hop directory.

    qa lines are ``question<TAB>ans1|ans2|...`` with the question entity in
    brackets; each qtype line is the path label for the same-numbered qa
    line. Ids are ordinal within the file, prefixed with the hop so they
    stay unique when splits are combined.
    """
    qa = _read_lines(qa_lines)
    qtype = _read_lines(qtype_lines)
    if len(qa) != len(qtype):
        raise AlignmentError(
            f"qa file has {len(qa)} lines but qtype file has {len(qtype)}"
        )
    examples: list[QAExample] = []
    for line_no, (qa_line, label) in enumerate(zip(qa, qtype), start=1):
        if qa_line.count("\t") != 1:
            raise QaParseError(
                f"expected 'question<TAB>answers', got {qa_line!r}", line_no
            )
        question, answer_field = qa_line.split("\t")
        answers = tuple(sorted({a.strip() for a in answer_field.split("|") if a.strip()}))
        if not answers:
            raise QaParseError("empty answer list", line_no)
        try:
            masked, entity = mask_question(question)
            path = InferencePath.from_label(label)
            if path.hop_count != hop:
                raise QaParseError(
                    f"path {path.label!r} is {path.hop_count}-hop, expected {hop}",
                    line_no,
                )
            examples.append(
                QAExample(
                    id=example_id(hop, line_no),
                    raw_question=question,
                    masked_question=masked,
                    entity=entity,
                    path=path,
                    gold_answers=answers,
                    hop=hop,
                )
            )
        except (QuestionFormatError, PathMappingError) as exc:
            raise type(exc)(f"line {line_no}: {exc}") from None
    return examples


# --- annotation files --------------------------------------------------------
#
# annotated_*.tsv: masked_question<TAB>gold_query_text
# meta_*.tsv:      id<TAB>hop<TAB>entity<TAB>gold_answers(pipe-joined)
#
# The two files are line-aligned; together they carry everything evaluation
# needs. The meta line's path is recovered from the gold query (the pair
# map is injective), so no extra columns are required.


def write_annotated_tsv(examples: Sequence[QAExample], out: IO[str]) -> int:
    for example in examples:
        pair = annotate(example)
        out.write(f"{pair.masked_question}\t{pair.gold_query_text}\n")
    return len(examples)


def write_meta_tsv(examples: Sequence[QAExample], out: IO[str]) -> int:
    for example in examples:
        answers = "|".join(example.gold_answers)
        out.write(f"{example.id}\t{example.hop}\t{example.entity}\t{answers}\n")
    return len(examples)


def read_annotated_pair(
    annotated_lines: Iterable[str], meta_lines: Iterable[str]
) -> list[QAExample]:
    """Rebuild examples from a line-aligned annotated/meta TSV pair."""
    annotated = _read_lines(annotated_lines)
    meta = _read_lines(meta_lines)
    if len(annotated) != len(meta):
        raise AlignmentError(
            f"annotated file has {len(annotated)} lines but meta file has "
            f"{len(meta)}"
        )
    examples: list[QAExample] = []
    for line_no, (ann_line, meta_line) in enumerate(zip(annotated, meta), start=1):
        ann_fields = ann_line.split("\t")
        if len(ann_fields) != 2:
            raise QaParseError(
                f"annotated line must have 2 tab-separated fields, got "
                f"{len(ann_fields)}",
                line_no,
            )
        masked, gold_query_text = ann_fields
        meta_fields = meta_line.split("\t")
        if len(meta_fields) != 4:
            raise QaParseError(
                f"meta line must have 4 tab-separated fields, got "
                f"{len(meta_fields)}",
                line_no,
            )
        ex_id, hop_text, entity, answer_field = meta_fields
        try:
            hop = int(hop_text)
        except ValueError:
            raise QaParseError(f"bad hop value {hop_text!r}", line_no) from None
        answers = tuple(sorted({a.strip() for a in answer_field.split("|") if a.strip()}))
        if not answers:
            raise QaParseError("empty answer list", line_no)
        path = path_from_query(parse_query(gold_query_text))
        raw = masked.replace(ENT_TOKEN, f"[{entity}]", 1)
        examples.append(
            QAExample(
                id=ex_id,
                raw_question=raw,
                masked_question=masked,
                entity=entity,
                path=path,
                gold_answers=answers,
                hop=hop,
            )
        )
    return examples


def sample_training_set(
    examples_by_hop: Sequence[Sequence[QAExample]], n: int, seed: int
) -> list[QAExample]:
    """Stratified sample: floor(n/3) per hop, remainder to hop 1 then hop 2.

    Uniform without replacement from each hop list using one seeded
    generator, then a deterministic shuffle of the combined draw; the same
    (inputs, n, seed) always reproduces the same sample.
    """
    if len(examples_by_hop) != 3:
        raise SamplingError("expected example lists for hops 1, 2, 3")
    if n < 1:
        raise SamplingError(f"sample size must be >= 1, got {n}")
    base, remainder = divmod(n, 3)
    quotas = [base + (1 if hop_idx < remainder else 0) for hop_idx in range(3)]
    rng = random.Random(seed)
    combined: list[QAExample] = []
    for hop_idx, (quota, pool) in enumerate(zip(quotas, examples_by_hop), start=1):
        if len(pool) < quota:
            raise SamplingError(
                f"hop {hop_idx} has {len(pool)} examples, need {quota}"
            )
        combined.extend(rng.sample(list(pool), quota))
    rng.shuffle(combined)
    return combined
