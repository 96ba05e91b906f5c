"""Multilingual text-editing toolkit: datasets, metrics, and evaluation.

Covers three editing tasks (grammatical error correction, simplification,
paraphrasing) across seven languages: corpus IO, instruction-dataset
construction, edit-overlap scoring, n-gram metrics, similarity scoring, and
task-level aggregation, all behind one CLI.
"""

from ._version import __version__
from .aggregate import (
    KsResult,
    TaskAggregate,
    harmonic_mean,
    ks_test,
    length_distribution,
    task_aggregate,
)
from .builder import (
    BuildConfig,
    InstructionDataset,
    InstructionRecord,
    build_dataset,
    noedit_count,
    summarize,
    write_dataset,
)
from .config import CorpusEntry, RunConfig, default_routing, load_config, save_config
from .corpus import (
    TASKS,
    EditExample,
    EditSpan,
    GoldAnnotation,
    GoldEdit,
    SystemOutput,
    parse_m2,
    read_outputs,
    read_parallel,
    write_jsonl,
)
from .errors import (
    BuildWarning,
    ConfigError,
    CorpusFormatError,
    EditkitError,
    MetricWarning,
    ScorerError,
    UsageError,
    ValidationError,
    WriteError,
)
from .gec_align import (
    DEL,
    INS,
    MATCH,
    SUB,
    GecScore,
    align,
    apply_edits,
    errant_lite_score,
    extract_edits,
    score_gec,
)
from .metrics import (
    BleuAccumulator,
    GleuAccumulator,
    MetricConfig,
    SariAccumulator,
    SariScore,
    bleu,
    gleu,
    sari,
    self_bleu_diversity,
)
from .report import (
    CSV_COLUMNS,
    ReportRow,
    build_report,
    evaluate_dataset,
    load_report,
    render_table,
    write_csv,
    write_report,
)
from .semsim import (
    LexicalScorer,
    SubprocessScorer,
    get_scorer,
    lexical_similarity,
    semantic_accuracy,
)
from .tokenize import (
    SEPARATOR,
    SUPPORTED_LANGS,
    NGramBag,
    TokenSeq,
    ngrams,
    scheme_for,
    tokenize,
)
from .verbalizer import (
    MAX_PER_COMBO,
    MIN_PER_COMBO,
    Instruction,
    InstructionBank,
    PromptRecord,
    PromptTemplate,
    assemble_prompt,
    default_bank_path,
    get_template,
    load_bank,
    register_template,
    sample_instruction,
    validate_bank,
)
