"""Free algebras of multi-sorted equational theories enriched in a
topological category over Set, on finite carriers."""
from .structure import Kind, Metric, StructuredMap, VObject
from .signature import EnrichedSignature, OperationSymbol, SyntacticEquation, Theory
from .algebra import Algebra, Homomorphism
from .free import FreeAlgebra, Policy, extend, free_sigma, free_theory

__all__ = ["Kind", "Metric", "StructuredMap", "VObject", "EnrichedSignature", "OperationSymbol",
           "SyntacticEquation", "Theory", "Algebra", "Homomorphism", "FreeAlgebra", "Policy", "extend",
           "free_sigma", "free_theory"]
