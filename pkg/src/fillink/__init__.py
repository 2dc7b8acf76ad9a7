"""Exact equivariant-linking computations on torus-link filtrations.

The package builds the standard periodic link families in T^2 x I and T^3,
assembles the equivariant linking matrices on augmentation-ideal filtration
quotients, cross-checks them against a geometric lattice oracle, and emits
machine-checkable filling certificates.  A FastAPI service exposes the
operations; the ``fillink`` CLI is a thin client of that service.
"""

__version__ = "0.1.0"

from .certifier import (
    Certificate,
    LinkingMatrix,
    build_matrix,
    certify_filling,
    closed_form_entry,
    is_injective,
    single_curve_link,
    standard_link,
    vandermonde_check,
)
from .errors import StructuralError
from .fingers import FingerMoveMap, kernel_invariance_check, perturbed_linking, random_finger_map
from .groupring import AugClass, FiltrationError, LaurentPoly, reduce_mod_filtration
from .lattice import Line, LinkSpec, OffsetCollisionError, geometric_linking
from .modules import (
    MeridianChain,
    PlaquetteChain,
    TorsionError,
    basis_H,
    basis_J,
    j_boundary,
    normal_form_H,
    normal_form_J,
)
from .nilpotent import (
    FreeWord,
    basic_commutator,
    hall_basis,
    lcs_depth,
    magnus,
    parse_word,
    phi_image,
    phi_surjectivity_check,
    witt_rank,
)

__all__ = [
    "AugClass",
    "Certificate",
    "FiltrationError",
    "FingerMoveMap",
    "FreeWord",
    "LaurentPoly",
    "Line",
    "LinkSpec",
    "LinkingMatrix",
    "MeridianChain",
    "OffsetCollisionError",
    "PlaquetteChain",
    "StructuralError",
    "TorsionError",
    "__version__",
    "basic_commutator",
    "basis_H",
    "basis_J",
    "build_matrix",
    "certify_filling",
    "closed_form_entry",
    "geometric_linking",
    "hall_basis",
    "is_injective",
    "j_boundary",
    "kernel_invariance_check",
    "lcs_depth",
    "magnus",
    "normal_form_H",
    "normal_form_J",
    "parse_word",
    "perturbed_linking",
    "phi_image",
    "phi_surjectivity_check",
    "random_finger_map",
    "reduce_mod_filtration",
    "single_curve_link",
    "standard_link",
    "vandermonde_check",
    "witt_rank",
]
