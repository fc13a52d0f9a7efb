"""Generic character tables: model, documents, instantiation and checks."""

from .model import (CharSet, ClassSet, GenericTable, ParamSpace, SchemaError,
                    dump_table, load_table)
from .concrete import (CharEntry, ClassEntry, ConcreteTable, ConstraintError,
                       admissible, character_value, context_for, expand_params,
                       instantiate)
from .validate import ValidationReport, validate
from .audit import AuditReport, DegreeFixture, RowResult, audit_all, degree_audit
from .registry import get_fixture, get_table, list_families, list_fixture_families

__all__ = [
    "AuditReport", "DegreeFixture", "RowResult", "audit_all", "degree_audit",
    "CharEntry", "CharSet", "ClassEntry", "ClassSet", "ConcreteTable", "ConstraintError",
    "GenericTable", "ParamSpace", "SchemaError", "ValidationReport", "admissible",
    "character_value", "context_for", "dump_table", "expand_params", "get_fixture",
    "get_table", "instantiate", "list_families", "list_fixture_families", "load_table",
    "validate",
]
