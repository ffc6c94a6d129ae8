"""Symbolic algebra of SU(2)-invariant Pauli monomials."""

from .basis import basis_hash, enumerate_basis, k_count, pair_monomials, perfect_matchings
from .dependencies import DependencyReport, check_dependencies
from .monomial import IDENTITY, Monomial, OperatorPoly, canonicalize, parse_monomial
from .product import multiply, multiply_monomials
from .relations import ALL_RELATIONS, MIXED_DETERMINANT, PRODUCT_RELATIONS, Relation
from .structure import StructureTensor, build_structure_tensor
from .trace import trace_inner

__all__ = [
    "ALL_RELATIONS",
    "DependencyReport",
    "IDENTITY",
    "MIXED_DETERMINANT",
    "Monomial",
    "OperatorPoly",
    "PRODUCT_RELATIONS",
    "Relation",
    "StructureTensor",
    "basis_hash",
    "build_structure_tensor",
    "canonicalize",
    "check_dependencies",
    "enumerate_basis",
    "k_count",
    "multiply",
    "multiply_monomials",
    "pair_monomials",
    "parse_monomial",
    "perfect_matchings",
    "trace_inner",
]
