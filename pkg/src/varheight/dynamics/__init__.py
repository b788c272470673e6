"""Families of endomorphisms of P^N over Q(t), their fibers and explicit constants."""

from .constants import (
    ConstantsBundle,
    c3_value,
    constants_bundle,
    corollary_constants,
    fiber_constants,
    good_reduction_threshold,
    growth_constants,
)
from .family import (
    FiberMap,
    MacaulayCertificate,
    MorphismFamily,
    build_family,
    eval_forms,
    family_heights,
    fiber_map_from_forms,
    has_good_reduction,
    is_morphism,
    iterate_point,
    monomials,
    reversed_family,
    specialize_morphism,
)

__all__ = [
    "ConstantsBundle",
    "FiberMap",
    "MacaulayCertificate",
    "MorphismFamily",
    "build_family",
    "c3_value",
    "constants_bundle",
    "corollary_constants",
    "eval_forms",
    "family_heights",
    "fiber_constants",
    "fiber_map_from_forms",
    "good_reduction_threshold",
    "growth_constants",
    "has_good_reduction",
    "is_morphism",
    "iterate_point",
    "monomials",
    "reversed_family",
    "specialize_morphism",
]
