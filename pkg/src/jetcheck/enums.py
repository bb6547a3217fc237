"""Enums for expression classes, check verdicts and output modes."""

from enum import Enum


class ExprClass(str, Enum):
    """Enumeration for the two classes of expressions."""

    SCALAR = "scalar"
    MATRIX = "matrix"


class CheckStatus(str, Enum):
    """Enumeration for the outcome of a verification."""

    ZERO = "zero"
    RESIDUAL = "residual"
    ERROR = "error"


class Triviality(str, Enum):
    """Enumeration for the triviality types of conservation laws."""

    TYPE1 = "Type1"
    TYPE2 = "Type2"
    TYPE3 = "Type3"
    TYPE4 = "Type4"
    NONTRIVIAL_SO_FAR = "NontrivialSoFar"


class NumericMode(str, Enum):
    """Enumeration for numeric evaluation backends."""

    EXACT = "exact"
    FLOAT = "float"


class OutputFormat(str, Enum):
    """Enumeration for CLI output formats."""

    TEXT = "text"
    JSON = "json"
