"""Propus difference families over Z_v and symmetric Hadamard matrices of order 4v."""

from propus.residues import (
    EvenModulus,
    ResidueSet,
    UnitSubgroup,
    complement,
    decode_skew,
    decode_symmetric,
    expand_orbits,
    half_set,
    is_h_invariant,
    is_skew_set,
    is_symmetric_set,
    unit_subgroup,
)
from propus.families import (
    DiffFamily,
    PropusParamSet,
    compute_symbol,
    difference_counts,
    enumerate_pps,
    paf_vector,
    to_sign_sequence,
    validate_pps,
    verify_gsdf,
    verify_pdf,
)

__version__ = "0.1.0"

__all__ = [
    "EvenModulus",
    "ResidueSet",
    "UnitSubgroup",
    "complement",
    "decode_skew",
    "decode_symmetric",
    "expand_orbits",
    "half_set",
    "is_h_invariant",
    "is_skew_set",
    "is_symmetric_set",
    "unit_subgroup",
    "DiffFamily",
    "PropusParamSet",
    "compute_symbol",
    "difference_counts",
    "enumerate_pps",
    "paf_vector",
    "to_sign_sequence",
    "validate_pps",
    "verify_gsdf",
    "verify_pdf",
]
