"""Pipe-delimited knowledge base: ingestion, reverse augmentation, indexed lookup.

The store keeps binary facts only. Traversal against edge direction is served
by materialized ``*_reverse`` twins rather than a second index, so a single
(relation, subject) index answers every hop.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple

from .errors import KbParseError, KbSchemaError, KbStateError

log = logging.getLogger(__name__)

BASE_RELATIONS = frozenset({
    "directed_by",
    "written_by",
    "starred_actors",
    "release_year",
    "in_language",
    "has_tags",
    "has_genre",
    "has_imdb_rating",
    "has_imdb_votes",
})

REVERSE_SUFFIX = "_reverse"

ALL_RELATIONS = frozenset(BASE_RELATIONS | {r + REVERSE_SUFFIX for r in BASE_RELATIONS})


def reverse_relation(relation: str) -> str:
    """Name of the argument-swapped twin of a base relation."""
    return relation + REVERSE_SUFFIX


def is_reverse(relation: str) -> bool:
    return relation.endswith(REVERSE_SUFFIX)


class Triple(NamedTuple):
    subject: str
    relation: str
    object: str


@dataclass(frozen=True)
class FactBase:
    """Deduplicated fact set with an eager (relation, subject) index.

    Immutable after construction; safe for unlimited concurrent readers.
    """

    facts: frozenset[Triple]
    forward_index: dict[tuple[str, str], tuple[str, ...]]
    relations: frozenset[str]
    entities: frozenset[str]

    @classmethod
    def from_facts(cls, facts: Iterable[Triple]) -> "FactBase":
        fact_set = frozenset(facts)
        index: dict[tuple[str, str], list[str]] = {}
        relations: set[str] = set()
        entities: set[str] = set()
        for subject, relation, obj in sorted(fact_set):
            index.setdefault((relation, subject), []).append(obj)
            relations.add(relation)
            entities.add(subject)
            entities.add(obj)
        frozen_index = {key: tuple(objs) for key, objs in index.items()}
        return cls(
            facts=fact_set,
            forward_index=frozen_index,
            relations=frozenset(relations),
            entities=frozenset(entities),
        )

    def __len__(self) -> int:
        return len(self.facts)


def _parse_field(field: str, line_no: int, role: str) -> str:
    value = field.strip()
    if not value:
        raise KbParseError(f"empty {role} field", line_no)
    if "\t" in value:
        raise KbParseError(f"{role} field contains a tab character", line_no)
    return value


def load_kb(lines: Iterable[str], *, strict: bool = True) -> FactBase:
    """Parse ``subject|relation|object`` lines into a deduplicated fact base.

    Fields are split on ``|`` and stripped of surrounding whitespace; empty
    lines are skipped; LF and CRLF both work. With ``strict`` (the default)
    a relation outside the nine-name base vocabulary raises
    :class:`KbSchemaError`; otherwise it is logged once and accepted, for
    KBs from other domains.
    """
    facts: list[Triple] = []
    warned: set[str] = set()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("|")
        if len(fields) != 3:
            raise KbParseError(
                f"expected 3 pipe-delimited fields, got {len(fields)}", line_no
            )
        subject = _parse_field(fields[0], line_no, "subject")
        relation = _parse_field(fields[1], line_no, "relation")
        obj = _parse_field(fields[2], line_no, "object")
        if relation not in ALL_RELATIONS:
            if strict:
                raise KbSchemaError(
                    f"line {line_no}: unknown relation {relation!r} "
                    f"(expected one of {sorted(ALL_RELATIONS)})"
                )
            if relation not in warned:
                warned.add(relation)
                log.warning("accepting relation %r outside the base vocabulary", relation)
        facts.append(Triple(subject, relation, obj))
    return FactBase.from_facts(facts)


def load_kb_path(path, *, strict: bool = True) -> FactBase:
    with open(path, encoding="utf-8") as fh:
        return load_kb(fh, strict=strict)


def augment_reverse(fb: FactBase) -> FactBase:
    """Add the argument-swapped ``*_reverse`` twin of every fact.

    The input must contain base relations only; the fact count exactly
    doubles because the twins live under relation names absent from the
    input.
    """
    already = sorted(r for r in fb.relations if is_reverse(r))
    if already:
        raise KbStateError(
            f"fact base already contains reverse relations: {already}"
        )
    reversed_facts = (
        Triple(obj, reverse_relation(rel), subj) for subj, rel, obj in fb.facts
    )
    return FactBase.from_facts(list(fb.facts) + list(reversed_facts))


def lookup(fb: FactBase, relation: str, subject: str) -> list[str]:
    """All objects o with (subject, relation, o) in the fact base, sorted.

    Missing relations or subjects yield an empty list.
    """
    return list(fb.forward_index.get((relation, subject), ()))


def dump_kb(fb: FactBase, out: IO[str]) -> int:
    """Write one ``s|r|o`` line per fact in sorted order; returns the line count.

    The output is bit-exact for a given fact set, and reloading it
    reproduces an equal fact base.
    """
    count = 0
    for subject, relation, obj in sorted(fb.facts):
        out.write(f"{subject}|{relation}|{obj}\n")
        count += 1
    return count
