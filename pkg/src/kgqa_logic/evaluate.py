"""Pipeline evaluation: translate -> ground -> execute -> score.

Implements the random-pick hit@1 protocol (with a deterministic
expected-value mode), set metrics, per-hop aggregation, and the
repeated-sampling variance table.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import IO, Callable, Iterable, NamedTuple, Sequence

from .annotate import QAExample, path_to_query
from .errors import EvalConfigError, GroundingError, InvalidExampleError
from .kb import FactBase
from .logic import DEFAULT_PROOF_CAP, execute, ground, print_query
from .translate import TranslationResult, exact_match

HIT1_MODES = ("expected", "sampled")


@dataclass(frozen=True)
class EvalConfig:
    exclude_seed: bool = True
    rng_seed: int = 0
    hit1_mode: str = "expected"
    repeats: int = 5
    proof_cap: int = DEFAULT_PROOF_CAP
    workers: int = 0

    def __post_init__(self):
        if self.hit1_mode not in HIT1_MODES:
            raise EvalConfigError(f"hit1_mode must be one of {HIT1_MODES}")
        if self.repeats < 1:
            raise EvalConfigError("repeats must be >= 1")
        if self.proof_cap < 1:
            raise EvalConfigError("proof_cap must be >= 1")


def _example_rng(cfg: EvalConfig, example_id: str) -> random.Random:
    # Per-example stream derived from (seed, id): parallel order cannot
    # perturb sampled-mode results.
    return random.Random(f"{cfg.rng_seed}|{example_id}")


def score_hit_at_1(
    predicted_answers: Iterable[str],
    gold_answers: Iterable[str],
    mode: str = "expected",
    rng: random.Random | None = None,
) -> float:
    """Paper protocol: pretend one uniformly drawn answer is the rank-1 pick.

    ``sampled`` draws with the supplied generator and returns 0/1;
    ``expected`` returns |predicted & gold| / |predicted|, the analytic
    expectation of the same draw. An empty predicted set scores 0; an
    empty gold set is an invalid example.
    """
    predicted = sorted(set(predicted_answers))
    gold = set(gold_answers)
    if not gold:
        raise InvalidExampleError("gold answer set is empty")
    if not predicted:
        return 0.0
    if mode == "expected":
        return len(set(predicted) & gold) / len(predicted)
    if mode == "sampled":
        if rng is None:
            raise EvalConfigError("sampled mode requires an rng")
        return 1.0 if rng.choice(predicted) in gold else 0.0
    raise EvalConfigError(f"hit1 mode must be one of {HIT1_MODES}")


class SetScores(NamedTuple):
    precision: float
    recall: float
    f1: float
    exact: bool


def score_sets(predicted_answers: Iterable[str], gold_answers: Iterable[str]) -> SetScores:
    predicted = set(predicted_answers)
    gold = set(gold_answers)
    if not gold:
        raise InvalidExampleError("gold answer set is empty")
    if not predicted:
        return SetScores(0.0, 0.0, 0.0, False)
    overlap = len(predicted & gold)
    precision = overlap / len(predicted)
    recall = overlap / len(gold)
    f1 = 0.0 if overlap == 0 else 2 * precision * recall / (precision + recall)
    return SetScores(precision, recall, f1, predicted == gold)


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    hop: int
    gold_query: str
    predicted_text: str
    status: str  # ok | parse_error | absent | ground_error
    translator_exact_match: bool
    answers: tuple[str, ...]
    gold_answers: tuple[str, ...]
    hit_at_1: float
    precision: float
    recall: float
    f1: float
    exact_set: bool
    excluded_seed: str | None


@dataclass(frozen=True)
class MetricBlock:
    n: int
    hit_at_1: float
    precision: float
    recall: float
    f1: float
    exact_set_accuracy: float
    translator_exact_match: float
    parse_failures: int
    absent_predictions: int
    ground_failures: int


def _aggregate(records: Sequence[ExampleRecord]) -> MetricBlock:
    n = len(records)

    def mean(values: Iterable[float]) -> float:
        return sum(values) / n if n else 0.0

    return MetricBlock(
        n=n,
        hit_at_1=mean(r.hit_at_1 for r in records),
        precision=mean(r.precision for r in records),
        recall=mean(r.recall for r in records),
        f1=mean(r.f1 for r in records),
        exact_set_accuracy=mean(float(r.exact_set) for r in records),
        translator_exact_match=mean(float(r.translator_exact_match) for r in records),
        parse_failures=sum(r.status == "parse_error" for r in records),
        absent_predictions=sum(r.status == "absent" for r in records),
        ground_failures=sum(r.status == "ground_error" for r in records),
    )


@dataclass(frozen=True)
class EvalReport:
    config: EvalConfig
    overall: MetricBlock
    per_hop: dict[int, MetricBlock]
    records: tuple[ExampleRecord, ...]

    def to_json_obj(self) -> dict:
        return {
            "config": asdict(self.config),
            "overall": asdict(self.overall),
            "per_hop": {str(hop): asdict(block) for hop, block in self.per_hop.items()},
            "examples": [asdict(record) for record in self.records],
        }

    def to_json(self, out: IO[str] | None = None) -> str:
        text = json.dumps(self.to_json_obj(), indent=2, sort_keys=True)
        if out is not None:
            out.write(text + "\n")
        return text

    def summary_rows(self) -> list[tuple[str, str, str]]:
        """Flat (scope, metric, value) rows - one per hop x metric."""
        rows: list[tuple[str, str, str]] = []
        scopes = [(str(hop), block) for hop, block in sorted(self.per_hop.items())]
        scopes.append(("overall", self.overall))
        for scope, block in scopes:
            for metric, value in asdict(block).items():
                rows.append((scope, metric, f"{value:.6f}" if isinstance(value, float) else str(value)))
        return rows

    def write_summary_tsv(self, out: IO[str]) -> None:
        out.write("scope\tmetric\tvalue\n")
        for scope, metric, value in self.summary_rows():
            out.write(f"{scope}\t{metric}\t{value}\n")

    def hit1_table_row(self) -> str:
        """Per-hop hit@1 percentages, one decimal, results-table style."""
        cells = [
            f"{self.per_hop[hop].hit_at_1 * 100:.1f}" if hop in self.per_hop else "-"
            for hop in (1, 2, 3)
        ]
        return "\t".join(cells)


Translator = Callable[[QAExample], TranslationResult]


def _evaluate_one(
    example: QAExample, translator: Translator, fb: FactBase, cfg: EvalConfig
) -> ExampleRecord:
    gold_query_text = print_query(path_to_query(example.path))
    result = translator(example)
    if result.absent:
        status = "absent"
    elif not result.parse_ok:
        status = "parse_error"
    else:
        status = "ok"
    translator_hit = bool(result.raw_text) and exact_match(
        result.raw_text, gold_query_text
    )

    answers: tuple[str, ...] = ()
    excluded = None
    if status == "ok":
        assert result.query is not None
        try:
            grounded = ground(result.query, example.entity)
        except GroundingError:
            status = "ground_error"
        else:
            outcome = execute(
                grounded, fb, exclude_seed=cfg.exclude_seed, proof_cap=cfg.proof_cap
            )
            answers = outcome.answers
            excluded = outcome.excluded_seed

    if status == "ok" and answers:
        hit = score_hit_at_1(
            answers, example.gold_answers, cfg.hit1_mode, _example_rng(cfg, example.id)
        )
        scores = score_sets(answers, example.gold_answers)
    else:
        hit = 0.0
        scores = SetScores(0.0, 0.0, 0.0, False)

    return ExampleRecord(
        id=example.id,
        hop=example.hop,
        gold_query=gold_query_text,
        predicted_text=result.raw_text,
        status=status,
        translator_exact_match=translator_hit,
        answers=answers,
        gold_answers=example.gold_answers,
        hit_at_1=hit,
        precision=scores.precision,
        recall=scores.recall,
        f1=scores.f1,
        exact_set=scores.exact,
        excluded_seed=excluded,
    )


def evaluate(
    examples: Sequence[QAExample],
    translator: Translator,
    fb: FactBase,
    cfg: EvalConfig = EvalConfig(),
) -> EvalReport:
    """Run the full pipeline over ``examples`` and aggregate per hop.

    Per-example failures (absent prediction, parse error, ungroundable
    query) are recorded and scored zero; the run always completes.
    Deterministic for a fixed config: per-example RNG streams make the
    thread pool (``cfg.workers`` > 0) order-insensitive.
    """
    if not examples:
        raise EvalConfigError("no examples to evaluate")

    def work(example: QAExample) -> ExampleRecord:
        return _evaluate_one(example, translator, fb, cfg)

    if cfg.workers > 0:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = tuple(pool.map(work, examples))
    else:
        records = tuple(map(work, examples))

    per_hop = {
        hop: _aggregate([r for r in records if r.hop == hop])
        for hop in sorted({r.hop for r in records})
    }
    return EvalReport(
        config=cfg, overall=_aggregate(records), per_hop=per_hop, records=records
    )


# --- repeated-sampling variance protocol -------------------------------------


@dataclass(frozen=True)
class VarianceCell:
    size: int
    repeat: int
    hit_at_1: float | None  # None when the cell was skipped
    note: str = ""


@dataclass(frozen=True)
class VarianceSummary:
    size: int
    cells: int
    minimum: float
    maximum: float
    mean: float


@dataclass(frozen=True)
class VarianceTable:
    cells: tuple[VarianceCell, ...]

    def summaries(self) -> list[VarianceSummary]:
        out: list[VarianceSummary] = []
        for size in sorted({c.size for c in self.cells}):
            values = [c.hit_at_1 for c in self.cells if c.size == size and c.hit_at_1 is not None]
            if not values:
                continue
            out.append(
                VarianceSummary(
                    size=size,
                    cells=len(values),
                    minimum=min(values),
                    maximum=max(values),
                    mean=sum(values) / len(values),
                )
            )
        return out

    def write_cells_tsv(self, out: IO[str]) -> None:
        out.write("size\trepeat\thit_at_1\n")
        for cell in self.cells:
            value = "skipped" if cell.hit_at_1 is None else f"{cell.hit_at_1:.6f}"
            out.write(f"{cell.size}\t{cell.repeat}\t{value}\n")

    def write_summary_tsv(self, out: IO[str]) -> None:
        out.write("size\tcells\tmin\tmax\tmean\n")
        for s in self.summaries():
            out.write(
                f"{s.size}\t{s.cells}\t{s.minimum:.6f}\t{s.maximum:.6f}\t{s.mean:.6f}\n"
            )


TranslatorFactory = Callable[[int, int], "Translator | None"]


def variance_run(
    examples: Sequence[QAExample],
    fb: FactBase,
    cfg: EvalConfig,
    sample_sizes: Sequence[int],
    repeats: int,
    base_seed: int,
    translator_for: TranslatorFactory,
) -> VarianceTable:
    """hit@1 per (sample size, repeat) cell, for min/max/mean trend plots.

    ``translator_for(size, repeat)`` returns the translator for that cell,
    or None to skip it (e.g. a missing predictions file). Each cell gets
    its own derived rng seed so sampled-mode draws differ across repeats.
    """
    if repeats < 1:
        raise EvalConfigError("repeats must be >= 1")
    cells: list[VarianceCell] = []
    for size in sample_sizes:
        for repeat in range(1, repeats + 1):
            translator = translator_for(size, repeat)
            if translator is None:
                cells.append(VarianceCell(size, repeat, None, "missing predictions"))
                continue
            cell_cfg = replace(
                cfg, rng_seed=base_seed * 1_000_003 + size * 101 + repeat
            )
            report = evaluate(examples, translator, fb, cell_cfg)
            cells.append(VarianceCell(size, repeat, report.overall.hit_at_1))
    return VarianceTable(tuple(cells))
