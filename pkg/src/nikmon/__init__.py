"""Exact lattice computations for the monodromy of Nikulin-type orbifolds."""

from .discriminant import DiscriminantIsometry, DiscriminantModule, FiniteQuadraticModule, discriminant_module
from .glue import GlueData, glue_group, nikulin_extends, orientation_correct
from .isometry import (
    Isometry,
    compose,
    induced_discriminant_action,
    inverse,
    is_orientation_preserving,
    random_word,
    reflection,
    spinor_norm,
)
from .lattice import (
    E8,
    Lattice,
    U,
    determinant,
    direct_sum,
    divisibility,
    inner,
    is_primitive,
    orthogonal_complement,
    saturate,
    twist,
)
from .nikulin import (
    constants,
    equivariant_extension,
    even_divisibility_sublattice,
    induce_from_k3,
    monodromy_reflection,
    orbit_invariants,
    phi,
    reconstruct,
    sample_sigma_fixing_isometry,
    transfer,
)

__version__ = "0.1.0"
