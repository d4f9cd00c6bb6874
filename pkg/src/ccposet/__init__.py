"""Finite models of commutative-subalgebra posets and reconstruction of
Artin-Wedderburn signatures from order structure alone."""
from .lattice import (BoundedLattice, Factorization, NotALattice, complements_of,
                      factorize, is_directly_indecomposable)
from .partitions import (AlgebraSpec, GuardExceeded, Partition, WitnessPoset, central_partition,
                         csubalgebra_poset, interval_above_center, iota, is_central,
                         join_partitions, meet_partitions, pi, subalgebra_leq,
                         transversal_complements, witness_poset)
from .poset import (FinitePoset, PosetError, height, interval, is_order_isomorphic, join,
                    maximal_elements, meet, minimal_elements, product, rank_function,
                    well_founded_fold)
from .reconstruct import FailureStage, ReconstructionReport, reconstruct, specs_up_to

__version__ = "0.1.0"

__all__ = [
    "BoundedLattice",
    "Factorization",
    "NotALattice",
    "complements_of",
    "factorize",
    "is_directly_indecomposable",
    "AlgebraSpec",
    "GuardExceeded",
    "Partition",
    "WitnessPoset",
    "central_partition",
    "csubalgebra_poset",
    "interval_above_center",
    "iota",
    "is_central",
    "join_partitions",
    "meet_partitions",
    "pi",
    "subalgebra_leq",
    "transversal_complements",
    "witness_poset",
    "FinitePoset",
    "PosetError",
    "height",
    "interval",
    "is_order_isomorphic",
    "join",
    "maximal_elements",
    "meet",
    "minimal_elements",
    "product",
    "rank_function",
    "well_founded_fold",
    "FailureStage",
    "ReconstructionReport",
    "reconstruct",
    "specs_up_to",
]
