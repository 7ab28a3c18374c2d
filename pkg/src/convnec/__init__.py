"""Convolutional network-error correction over coherent linear network codes."""

from .convcode import CodeMetrics, EncoderFSM, analyze, build_encoder, encode, free_distance, t_dfree
from .errors import NecError, ParseError
from .formats import builtin_network, load_network, parse_generator, parse_network, parse_phi
from .galois import FieldSpec, make_field
from .nec import (
    ConstructionReport,
    ErrorPatternSet,
    SearchParams,
    construct,
    decode_sink,
    viterbi_decode,
    window_decode_batch,
)
from .network import NetworkSpec, TransferSet, build_transfer, propagate
from .polymat import Poly, PolyMatrix, ScalarMatrix

__version__ = "0.1.0"

__all__ = [
    "CodeMetrics",
    "ConstructionReport",
    "EncoderFSM",
    "ErrorPatternSet",
    "FieldSpec",
    "NecError",
    "NetworkSpec",
    "ParseError",
    "Poly",
    "PolyMatrix",
    "ScalarMatrix",
    "SearchParams",
    "TransferSet",
    "analyze",
    "build_encoder",
    "build_transfer",
    "builtin_network",
    "construct",
    "decode_sink",
    "encode",
    "free_distance",
    "load_network",
    "make_field",
    "parse_generator",
    "parse_network",
    "parse_phi",
    "propagate",
    "t_dfree",
    "viterbi_decode",
    "window_decode_batch",
]
