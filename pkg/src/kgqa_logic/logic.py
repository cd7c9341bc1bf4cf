"""Chain-shaped conjunctive queries: parse, print, ground, execute.

A query is an ordered conjunction of binary atoms whose first arguments
chain through the previous atom's second argument, e.g.::

    written_by_reverse(ENT, X), directed_by(X, Y)

The last variable is the answer variable. Execution walks the chain
left to right over an augmented fact base, carrying proof paths so each
answer comes with the grounded atom chain that reached it.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .errors import (
    ChainShapeError,
    GroundingError,
    QuerySyntaxError,
    UnknownPredicateError,
)
from .kb import ALL_RELATIONS, FactBase, Triple

ENT_TOKEN = "ENT"
VARIABLE_RE = re.compile(r"[A-Z][A-Za-z0-9_]*")
PREDICATE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

DEFAULT_PROOF_CAP = 16


@dataclass(frozen=True)
class Constant:
    value: str


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if self.name == ENT_TOKEN or not VARIABLE_RE.fullmatch(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")


@dataclass(frozen=True)
class EntPlaceholder:
    """The ENT token standing in for the question entity."""


ENT = EntPlaceholder()

Term = Union[Constant, Variable, EntPlaceholder]


@dataclass(frozen=True)
class Atom:
    predicate: str
    arg1: Term
    arg2: Term


def _check_chain(atoms: tuple[Atom, ...]) -> None:
    if not atoms:
        raise ChainShapeError("query must contain at least one atom", 0)
    first = atoms[0].arg1
    if not isinstance(first, (EntPlaceholder, Constant)):
        raise ChainShapeError(
            "first argument of the leading atom must be ENT or an entity", 0
        )
    seen: set[Variable] = set()
    for i, atom in enumerate(atoms):
        if i >= 1:
            if not isinstance(atom.arg1, Variable) or atom.arg1 != atoms[i - 1].arg2:
                raise ChainShapeError(
                    "first argument must repeat the previous atom's variable", i
                )
        if not isinstance(atom.arg2, Variable):
            raise ChainShapeError("second argument must be a fresh variable", i)
        if atom.arg2 in seen:
            raise ChainShapeError(
                f"variable {atom.arg2.name} reused as a second argument", i
            )
        seen.add(atom.arg2)


@dataclass(frozen=True)
class Query:
    """Validated chain of atoms; construction rejects non-chain shapes."""

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        _check_chain(self.atoms)

    @property
    def answer_var(self) -> Variable:
        return self.atoms[-1].arg2

    @property
    def is_grounded(self) -> bool:
        return isinstance(self.atoms[0].arg1, Constant)

    @property
    def seed(self) -> str:
        first = self.atoms[0].arg1
        if not isinstance(first, Constant):
            raise GroundingError("query is not grounded")
        return first.value

    def __len__(self) -> int:
        return len(self.atoms)


# --- parsing ---------------------------------------------------------------

_BARE_STOP = {",", "(", ")", '"'}


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> QuerySyntaxError:
        return QuerySyntaxError(message, self.pos)

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while not self.eof() and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, char: str) -> None:
        if self.peek() != char:
            got = repr(self.peek()) if not self.eof() else "end of input"
            raise self.error(f"expected {char!r}, got {got}")
        self.pos += 1

    def predicate(self) -> str:
        match = PREDICATE_RE.match(self.text, self.pos)
        if not match:
            raise self.error("expected a predicate name")
        self.pos = match.end()
        return match.group()

    def quoted(self) -> str:
        self.expect('"')
        chars: list[str] = []
        while True:
            if self.eof():
                raise self.error("unterminated quoted entity")
            ch = self.text[self.pos]
            self.pos += 1
            if ch == '"':
                return "".join(chars)
            if ch == "\\":
                if self.eof() or self.text[self.pos] not in ('"', "\\"):
                    raise self.error("invalid escape in quoted entity")
                chars.append(self.text[self.pos])
                self.pos += 1
            else:
                chars.append(ch)

    def term(self) -> Term:
        self.skip_ws()
        if self.peek() == '"':
            return Constant(self.quoted())
        start = self.pos
        while not self.eof() and self.text[self.pos] not in _BARE_STOP:
            self.pos += 1
        token = self.text[start : self.pos].strip()
        if not token:
            raise self.error("expected a term")
        if token == ENT_TOKEN:
            return ENT
        if VARIABLE_RE.fullmatch(token):
            return Variable(token)
        return Constant(token)


def parse_query(
    text: str, *, known_predicates: Iterable[str] | None = ALL_RELATIONS
) -> Query:
    """Parse canonical query text into a validated :class:`Query`.

    Whitespace between tokens is ignored. Predicates are checked against
    ``known_predicates`` (the 18 augmented MetaQA relations by default;
    pass ``None`` to accept any well-formed name). Raises
    :class:`QuerySyntaxError` with a position, :class:`ChainShapeError`
    naming the offending atom, or :class:`UnknownPredicateError`.
    """
    catalog = frozenset(known_predicates) if known_predicates is not None else None
    scanner = _Scanner(text)
    atoms: list[Atom] = []
    while True:
        scanner.skip_ws()
        predicate = scanner.predicate()
        if catalog is not None and predicate not in catalog:
            raise UnknownPredicateError(f"unknown predicate {predicate!r}")
        scanner.skip_ws()
        scanner.expect("(")
        arg1 = scanner.term()
        scanner.skip_ws()
        scanner.expect(",")
        arg2 = scanner.term()
        scanner.skip_ws()
        scanner.expect(")")
        atoms.append(Atom(predicate, arg1, arg2))
        scanner.skip_ws()
        if scanner.eof():
            break
        scanner.expect(",")
    return Query(tuple(atoms))


# --- printing --------------------------------------------------------------


def _needs_quoting(value: str) -> bool:
    if not value or value != value.strip():
        return True
    if VARIABLE_RE.fullmatch(value):  # would read back as a variable (or ENT)
        return True
    return any(ch in value for ch in ',()"\\')


def _render_entity(value: str) -> str:
    if _needs_quoting(value):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return value


def _render_term(term: Term) -> str:
    if isinstance(term, EntPlaceholder):
        return ENT_TOKEN
    if isinstance(term, Variable):
        return term.name
    return _render_entity(term.value)


def print_query(query: Query) -> str:
    """Canonical text: ``pred(t1, t2), pred(t2, t3)``.

    ``parse_query(print_query(q))`` structurally equals ``q`` for every
    valid query; entities that could be read back as variables or that
    contain ``, ( ) "`` are double-quoted.
    """
    return ", ".join(
        f"{atom.predicate}({_render_term(atom.arg1)}, {_render_term(atom.arg2)})"
        for atom in query.atoms
    )


def canonical_variable_name(index: int) -> str:
    return "XYZ"[index] if index < 3 else f"V{index + 1}"


def canonicalize_variables(query: Query) -> Query:
    """Rename variables to X, Y, Z, V4, ... in first-occurrence order."""
    mapping: dict[Variable, Variable] = {}

    def rename(term: Term) -> Term:
        if isinstance(term, Variable):
            if term not in mapping:
                mapping[term] = Variable(canonical_variable_name(len(mapping)))
            return mapping[term]
        return term

    atoms = tuple(
        Atom(atom.predicate, rename(atom.arg1), rename(atom.arg2))
        for atom in query.atoms
    )
    return Query(atoms)


# --- grounding and execution ------------------------------------------------


def ground(query: Query, entity: str) -> Query:
    """Replace the ENT placeholder with ``entity``.

    The chain shape confines ENT to the leading atom's first argument, so
    a query either has exactly one placeholder or none; the latter raises
    :class:`GroundingError`.
    """
    if not isinstance(query.atoms[0].arg1, EntPlaceholder):
        raise GroundingError("query has no ENT placeholder to ground")
    first = query.atoms[0]
    grounded_first = Atom(first.predicate, Constant(entity), first.arg2)
    return Query((grounded_first,) + query.atoms[1:])


@dataclass(frozen=True)
class ProofPath:
    """Grounded atom chain from the seed entity to one answer."""

    steps: tuple[Atom, ...]

    @property
    def final_entity(self) -> str:
        last = self.steps[-1].arg2
        assert isinstance(last, Constant)
        return last.value

    def as_strings(self) -> list[list[str]]:
        out = []
        for step in self.steps:
            assert isinstance(step.arg1, Constant) and isinstance(step.arg2, Constant)
            out.append([step.predicate, step.arg1.value, step.arg2.value])
        return out


@dataclass(frozen=True)
class AnswerResult:
    """Answer entities plus the proof paths that reached them."""

    answers: tuple[str, ...]
    proofs: dict[str, tuple[ProofPath, ...]]
    excluded_seed: str | None = None

    def answer_set(self) -> frozenset[str]:
        return frozenset(self.answers)

    def to_json_obj(self) -> dict:
        return {
            "answers": list(self.answers),
            "proofs": {
                answer: [proof.as_strings() for proof in paths]
                for answer, paths in self.proofs.items()
            },
            "excluded_seed": self.excluded_seed,
        }

    def to_json(self, out: IO[str] | None = None, indent: int | None = 2) -> str:
        text = json.dumps(self.to_json_obj(), indent=indent, sort_keys=True)
        if out is not None:
            out.write(text + "\n")
        return text


def execute(
    query: Query,
    fb: FactBase,
    *,
    exclude_seed: bool = True,
    proof_cap: int = DEFAULT_PROOF_CAP,
) -> AnswerResult:
    """Evaluate a grounded chain query by frontier expansion.

    Each hop maps every frontier entity through the (relation, subject)
    index, extending proof paths; intermediate frontiers are deduplicated
    per entity with at most ``proof_cap`` paths kept. Seed exclusion
    applies only to the final answer set - intermediate hops may pass
    back through the seed.
    """
    if not query.is_grounded:
        raise GroundingError("execute requires a grounded query")
    if proof_cap < 1:
        raise ValueError("proof_cap must be >= 1")
    seed = query.seed
    frontier: dict[str, list[tuple[Atom, ...]]] = {seed: [()]}
    for atom in query.atoms:
        next_frontier: dict[str, list[tuple[Atom, ...]]] = {}
        for entity in sorted(frontier):
            paths = frontier[entity]
            for obj in fb.forward_index.get((atom.predicate, entity), ()):
                step = Atom(atom.predicate, Constant(entity), Constant(obj))
                bucket = next_frontier.setdefault(obj, [])
                for path in paths:
                    if len(bucket) >= proof_cap:
                        break
                    bucket.append(path + (step,))
        frontier = next_frontier
        if not frontier:
            break
    excluded = None
    if exclude_seed and seed in frontier:
        del frontier[seed]
        excluded = seed
    answers = tuple(sorted(frontier))
    proofs = {
        answer: tuple(ProofPath(steps) for steps in frontier[answer])
        for answer in answers
    }
    return AnswerResult(answers=answers, proofs=proofs, excluded_seed=excluded)


def brute_force_execute(
    query: Query, fb: FactBase, *, exclude_seed: bool = True
) -> set[str]:
    """Testing oracle: nested enumeration over facts, checking the conjunction.

    Independent of the frontier algorithm and of the (relation, subject)
    index; intended for property tests, not production paths.
    """
    if not query.is_grounded:
        raise GroundingError("brute_force_execute requires a grounded query")
    by_relation: dict[str, list[Triple]] = {}
    for fact in sorted(fb.facts):
        by_relation.setdefault(fact.relation, []).append(fact)

    answers: set[str] = set()

    def term_value(term: Term, env: dict[str, str]) -> str | None:
        if isinstance(term, Constant):
            return term.value
        assert isinstance(term, Variable)
        return env.get(term.name)

    def extend(index: int, env: dict[str, str]) -> None:
        if index == len(query.atoms):
            answers.add(env[query.answer_var.name])
            return
        atom = query.atoms[index]
        want_subject = term_value(atom.arg1, env)
        for subject, _, obj in by_relation.get(atom.predicate, ()):
            if want_subject is not None and subject != want_subject:
                continue
            prior = term_value(atom.arg2, env)
            if prior is not None and prior != obj:
                continue
            child = dict(env)
            if isinstance(atom.arg1, Variable):
                child[atom.arg1.name] = subject
            child[atom.arg2.name] = obj
            extend(index + 1, child)

    extend(0, {})
    if exclude_seed:
        answers.discard(query.seed)
    return answers
