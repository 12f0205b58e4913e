from modindex.detectors.frame import (
    FrameError,
    SyntheticFrame,
    decode_pgm,
    encode_pgm,
    read_pgm,
    write_pgm,
)
from modindex.detectors.grammar import (
    REGISTRY,
    DetectorError,
    DetectorGrammar,
    FeatureTuple,
    MediaKind,
    ParseNode,
    ParseTree,
    Rule,
    age_band,
    color_histogram,
    detect_object,
    edge_density,
    load_grammar,
    register_detector,
    run_grammar,
    tuples_from_tree,
    tuples_to_terms,
)

__all__ = [
    "DetectorError", "DetectorGrammar", "FeatureTuple", "FrameError", "MediaKind",
    "ParseNode", "ParseTree", "REGISTRY", "Rule", "SyntheticFrame", "age_band",
    "color_histogram", "decode_pgm", "detect_object", "edge_density", "encode_pgm",
    "load_grammar", "read_pgm", "register_detector", "run_grammar",
    "tuples_from_tree", "tuples_to_terms", "write_pgm",
]
