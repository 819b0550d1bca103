"""Storage graphs, secure-storage codes and their CSS quantum translation."""

from .errors import (
    DecompositionError,
    FieldError,
    GraphValidationError,
    InvalidPartition,
    LimitExceeded,
    MismatchError,
    OutOfClass,
    ParameterError,
    ParseError,
    QcapError,
    RetriesExhausted,
)
from .galois import FieldSpec, field_of_order, make_field
from .graph import StorageGraph, make_graph, validate_graph
from .matrix import MatrixFq

__all__ = [
    "DecompositionError",
    "FieldError",
    "FieldSpec",
    "GraphValidationError",
    "InvalidPartition",
    "LimitExceeded",
    "MatrixFq",
    "MismatchError",
    "OutOfClass",
    "ParameterError",
    "ParseError",
    "QcapError",
    "RetriesExhausted",
    "StorageGraph",
    "field_of_order",
    "make_field",
    "make_graph",
    "validate_graph",
]

__version__ = "0.1.0"
