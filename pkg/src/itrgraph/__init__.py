"""Grammar-based graph compression with triple queries on the compressed form."""

from .codec import ContainerError, ContainerView, deserialize, serialize
from .dictionary import Dictionary, apply_plus, strip_plus
from .digrams import Compressor, prune, replace_digrams
from .ingestion import InputFormat, ParseError, parse
from .model import (
    Edge,
    Grammar,
    Hypergraph,
    LabelTable,
    Rule,
    decompress,
    expand_edge,
    graphs_equal,
    validate_straight_line,
)
from .pipeline import compress_file, compress_parsed, decompress_file, load_view
from .query import TriplePattern, answer, neighborhood, node_label

__version__ = "0.1.0"

__all__ = [
    "ContainerError",
    "ContainerView",
    "deserialize",
    "serialize",
    "Dictionary",
    "apply_plus",
    "strip_plus",
    "Compressor",
    "prune",
    "replace_digrams",
    "InputFormat",
    "ParseError",
    "parse",
    "Edge",
    "Grammar",
    "Hypergraph",
    "LabelTable",
    "Rule",
    "decompress",
    "expand_edge",
    "graphs_equal",
    "validate_straight_line",
    "compress_file",
    "compress_parsed",
    "decompress_file",
    "load_view",
    "TriplePattern",
    "answer",
    "neighborhood",
    "node_label",
    "__version__",
]
