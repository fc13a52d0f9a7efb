"""Exact generic character tables and generalized Steinberg characters."""

__version__ = "0.1.0"
SCHEMA_VERSION = "cvan/1"
