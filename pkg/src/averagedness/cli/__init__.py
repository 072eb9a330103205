"""Batch front end: JSON operator documents in, JSON or CSV reports out."""
from .main import AnalysisRequest, main, run
from .report import Report, dumps, loads
from .spec_io import (SCHEMA_VERSION, parse_function, parse_monotone, parse_operator, parse_set,
                      serialize_function, serialize_monotone, serialize_operator, serialize_set)

__all__ = ["SCHEMA_VERSION", "AnalysisRequest", "Report", "dumps", "loads", "main", "run",
           "parse_function", "parse_monotone", "parse_operator", "parse_set",
           "serialize_function", "serialize_monotone", "serialize_operator", "serialize_set"]
