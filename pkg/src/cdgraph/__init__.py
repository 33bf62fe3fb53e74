"""Common-divisor graphs on (p-regular) conjugacy classes of permutation groups."""
from .classes import ClassTable, ConjClass, conjugacy_classes, p_regular_classes, sigma_part
from .constructors import GroupSpec, build, builtin_corpus, parse_spec, serialize_spec
from .graph import ClassGraph, build_graph, diameter, distance_pairs, maximal_classes, s_subgroup
from .permgroup import Group, Permutation, PrimeSet, closure, element_order
from .verdict import Verdict
from .verifier import run_suite

__version__ = "0.1.0"

__all__ = [
    "ClassGraph", "ClassTable", "ConjClass", "Group", "GroupSpec", "Permutation", "PrimeSet",
    "Verdict", "build", "build_graph", "builtin_corpus", "closure", "conjugacy_classes",
    "diameter", "distance_pairs", "element_order", "maximal_classes", "p_regular_classes",
    "parse_spec", "run_suite", "s_subgroup", "serialize_spec", "sigma_part",
]
