"""Pattern-based open information extraction over dependency-parsed text."""

__version__ = "0.1.0"

from .evaluation import (
    CorpusScore,
    PairScore,
    char_overlap,
    corpus_scores,
    f1_score,
    greedy_match,
    pair_scores,
    synset_scores,
)
from .induction import (
    AlignmentError,
    DegenerateError,
    InductionConfig,
    PatternLibrary,
    align_slot,
    build_library,
    induce_pattern,
    slot_head,
)
from .ingest import (
    AnnotatedSample,
    IngestError,
    SynsetGold,
    read_annotations,
    read_extractions,
    read_parses,
    read_pattern_library,
    read_scheme,
    read_synset_gold,
    write_extractions,
    write_parses,
    write_pattern_library,
    write_scheme,
)
from .matcher import (
    Embedding,
    ExtractOptions,
    Extractor,
    extract,
    fill_slots,
    match_pattern,
)
from .model import (
    ARG1,
    ARG2,
    REL,
    SLOT_ROLES,
    ParsedSentence,
    Pattern,
    PatternEdge,
    PatternError,
    PatternNode,
    SchemeError,
    TagScheme,
    Token,
    Triple,
    canonical_key,
    default_scheme,
    validate_pattern,
    validate_sentence,
)
from .postprocess import (
    PostprocessConfig,
    attach_negation,
    expand_argument,
    load_negation_lexicon,
    postprocess_triple,
)
from .prefilter import (
    PatternTensor,
    SignatureMatrix,
    build_tensor,
    encode_pattern,
    encode_sentence,
    filter_candidates,
)
