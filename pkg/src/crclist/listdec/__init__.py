from .decoders import (
    CORRECT,
    ERASURE,
    UNDETECTED,
    CandidatePath,
    DecodeOutcome,
    ListConfig,
    ListDecoderCore,
    RankedList,
    Selection,
    adaptive_decode,
    classify_outcome,
    crc_select,
    lva_decode,
    outcome_from_selection,
    scl_decode,
    wava_init_metrics,
)

__all__ = [
    "CORRECT",
    "ERASURE",
    "UNDETECTED",
    "CandidatePath",
    "DecodeOutcome",
    "ListConfig",
    "ListDecoderCore",
    "RankedList",
    "Selection",
    "adaptive_decode",
    "classify_outcome",
    "crc_select",
    "lva_decode",
    "outcome_from_selection",
    "scl_decode",
    "wava_init_metrics",
]
