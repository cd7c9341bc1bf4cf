"""Knowledge-graph logic-query engine and KGQA evaluation harness.

Pipeline: load a pipe-delimited triple store, add reverse twin relations,
compile (question, inference path) records into chain-shaped conjunctive
queries, execute them for answer sets with proof paths, and score
question-to-query translators (hit@1, set metrics, exact match).
"""

from .annotate import (
    PAIR_TO_RELATION,
    AnnotatedPair,
    InferencePath,
    QAExample,
    annotate,
    load_questions,
    mask_question,
    path_from_query,
    path_to_query,
    read_annotated_pair,
    sample_training_set,
    write_annotated_tsv,
    write_meta_tsv,
)
from .errors import (
    AlignmentError,
    ChainShapeError,
    EvalConfigError,
    GroundingError,
    InvalidExampleError,
    KbParseError,
    KbSchemaError,
    KbStateError,
    KgqaError,
    ParseError,
    PathMappingError,
    QaParseError,
    QuerySyntaxError,
    QuestionFormatError,
    SamplingError,
    SchemaError,
    UnknownPredicateError,
)
from .evaluate import (
    EvalConfig,
    EvalReport,
    ExampleRecord,
    MetricBlock,
    SetScores,
    VarianceTable,
    evaluate,
    score_hit_at_1,
    score_sets,
    variance_run,
)
from .kb import (
    ALL_RELATIONS,
    BASE_RELATIONS,
    REVERSE_SUFFIX,
    FactBase,
    Triple,
    augment_reverse,
    dump_kb,
    load_kb,
    load_kb_path,
    lookup,
)
from .logic import (
    ENT,
    AnswerResult,
    Atom,
    Constant,
    EntPlaceholder,
    ProofPath,
    Query,
    Variable,
    brute_force_execute,
    canonicalize_variables,
    execute,
    ground,
    parse_query,
    print_query,
)
from .translate import (
    FileTranslator,
    GoldTranslator,
    TranslationResult,
    exact_match,
    load_predictions,
    translate_gold,
)

__version__ = "0.1.0"
