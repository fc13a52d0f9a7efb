"""Independent character tables computed from explicit matrix groups."""

from .groups import (SUPPORTED, GroupSpec, GroupTooLarge, OracleGroup, SpecError,
                     build_group, expected_order, parse_spec)
from .classes import ClassData, conjugacy_classes, element_orders, structure_constants
from .dixon import DixonError, OracleTable, burnside_consistent, check_table, dixon_table
from .compare import (CrossCheck, SolutionComparison, brute_pvanish, compare_solutions,
                      cross_check, match_tables)

FAMILY_GROUP = {"sl2": "sl2", "gl2": "gl2", "gl3": "gl3", "sl3-n3": "sl3",
                "u3": "u3", "su3-n3": "su3", "2b2": "sz"}


def oracle_for(family: str, q: int, cap: int | None = None) -> OracleTable:
    """Oracle table of the finite group matching a generic family at q."""
    if family not in FAMILY_GROUP:
        raise SpecError(f"no oracle group for family {family!r}")
    spec = parse_spec(f"{FAMILY_GROUP[family]}:{q}")
    G = build_group(spec) if cap is None else build_group(spec, cap)
    return dixon_table(G)


__all__ = [
    "FAMILY_GROUP", "SUPPORTED", "ClassData", "CrossCheck", "DixonError", "GroupSpec",
    "GroupTooLarge", "OracleGroup", "OracleTable", "SolutionComparison", "SpecError",
    "brute_pvanish", "build_group", "burnside_consistent", "check_table", "compare_solutions",
    "conjugacy_classes", "cross_check", "dixon_table", "element_orders", "expected_order",
    "match_tables", "oracle_for", "parse_spec", "structure_constants",
]
