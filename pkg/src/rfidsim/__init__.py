"""Perfect RFID tag identification over an ideal superposition channel."""

from . import kernels
from .baselines import (
    FsaConfig,
    FsaMode,
    StarvationError,
    run_binary_splitting,
    run_framed_slotted_aloha,
    run_query_tree,
)
from .channel import (
    AnswerVector,
    SlotKind,
    SlotOutcome,
    classify_slot,
    decode_if_singleton,
    superpose,
)
from .core import (
    CapacityError,
    Distribution,
    DuplicateTagError,
    Population,
    PopulationSpec,
    TagId,
    TagLengthError,
    TagParseError,
    encode_signal,
    generate_population,
    load_population,
    make_tag_id,
    matches,
    save_population,
)
from .harness import (
    ExperimentReport,
    ExperimentSpec,
    UndefinedMetricError,
    bits_transmitted,
    export_report,
    run_experiment,
    system_efficiency,
)
from .protocol_p import (
    NoSplitError,
    ProtocolAssumptionError,
    SplitDecision,
    TraceNode,
    TraceStructureError,
    check,
    run_protocol_p,
    select_split,
    serialize_trace,
    subtract,
    verify_trace,
)
from .results import BitAccounting, RunResult

__version__ = "0.1.0"
