"""blockmine: find unusual solutions in collections of Scratch 3 programs.

The pipeline: load .sb3 archives, build one control-flow model per script,
derive temporal block-pair properties, mine closed frequent patterns over
the whole collection, and flag scripts that follow a common pattern only
partially. See README.md for a tour and demos/ for runnable walkthroughs.
"""

__version__ = "0.1.0"

from .errors import (
    ArchiveUnreadable,
    BlockmineError,
    DatasetEmpty,
    InvalidConfig,
    MalformedProject,
    OutputUnwritable,
)
from .blocks import BlockKind, BlockLabel, classify_opcode, opcode_display_name, table_version
from .ingest import (
    Actor,
    RawBlock,
    RawProject,
    ScriptSource,
    SkipRecord,
    enumerate_scripts,
    load_dataset,
    load_project,
    scan_dataset,
)
from .model import (
    ScriptModel,
    abstract_labels,
    build_script_model,
    eliminate_epsilon,
    model_to_dot,
)
from .properties import (
    PropertySet,
    ReachabilityRelation,
    TemporalProperty,
    format_properties,
    properties_to_dot,
    props,
    reachability,
    sorted_properties,
)
from .mining import (
    MiningConfig,
    Pattern,
    PRESETS,
    SMALL_CLASS_CONFIG,
    STANDARD_CONFIG,
    mine_closed_patterns,
    support,
)
from .anomalies import (
    Anomaly,
    SweepCell,
    Violation,
    confidence,
    detect_anomalies,
    find_violations,
    parameter_sweep,
    rank_anomalies,
)
from .report import (
    AnalysisResult,
    AnomalyReport,
    DatasetStats,
    analyze_dataset,
    anomaly_dot_documents,
    compute_stats,
    document_to_json,
    extract_models,
    extract_property_sets,
    format_confidence,
    model_artifacts,
    report_to_document,
    report_to_json,
    report_to_text,
    stats_to_document,
    stats_to_text,
    sweep_to_csv,
    sweep_to_document,
)
from .corpus import (
    CorpusSpec,
    MutationKind,
    MutationSpec,
    apply_mutation,
    build_actor,
    build_project,
    generate_corpus,
    load_corpus_spec,
    project_payload,
    project_to_document,
    write_project_archive,
)

__all__ = [
    "__version__",
    "ArchiveUnreadable",
    "BlockmineError",
    "DatasetEmpty",
    "InvalidConfig",
    "MalformedProject",
    "OutputUnwritable",
    "BlockKind",
    "BlockLabel",
    "classify_opcode",
    "opcode_display_name",
    "table_version",
    "Actor",
    "RawBlock",
    "RawProject",
    "ScriptSource",
    "SkipRecord",
    "enumerate_scripts",
    "load_dataset",
    "load_project",
    "scan_dataset",
    "ScriptModel",
    "abstract_labels",
    "build_script_model",
    "eliminate_epsilon",
    "model_to_dot",
    "PropertySet",
    "ReachabilityRelation",
    "TemporalProperty",
    "format_properties",
    "properties_to_dot",
    "props",
    "reachability",
    "sorted_properties",
    "MiningConfig",
    "Pattern",
    "PRESETS",
    "SMALL_CLASS_CONFIG",
    "STANDARD_CONFIG",
    "mine_closed_patterns",
    "support",
    "Anomaly",
    "SweepCell",
    "Violation",
    "confidence",
    "detect_anomalies",
    "find_violations",
    "parameter_sweep",
    "rank_anomalies",
    "AnalysisResult",
    "AnomalyReport",
    "DatasetStats",
    "analyze_dataset",
    "anomaly_dot_documents",
    "document_to_json",
    "model_artifacts",
    "report_to_document",
    "stats_to_document",
    "stats_to_text",
    "sweep_to_csv",
    "sweep_to_document",
    "compute_stats",
    "extract_models",
    "extract_property_sets",
    "format_confidence",
    "report_to_json",
    "report_to_text",
    "CorpusSpec",
    "MutationKind",
    "MutationSpec",
    "apply_mutation",
    "build_actor",
    "build_project",
    "project_payload",
    "project_to_document",
    "generate_corpus",
    "load_corpus_spec",
    "write_project_archive",
]
