"""Edge contractions and expansions between triangulations of RP^3.

Modules: ``triangulation``, ``moves``, ``homology``, ``isomorphism`` and
``search`` (simplicial core), ``cells`` (cell complexes), ``normal``
(normal surfaces), ``rp2`` (decompositions of the projective plane),
``rp3`` (standard triangulations and certificates), ``io`` and ``cli``.
"""
from .homology import HomologyProfile, homology
from .isomorphism import iso_signature, isomorphic, isomorphism
from .moves import Contract, Expand, MoveError, MoveSequence, contract, expand, is_contractible, replay
from .triangulation import Triangulation, validate

__version__ = "0.1.0"

__all__ = [
    "Contract", "Expand", "HomologyProfile", "MoveError", "MoveSequence", "Triangulation",
    "contract", "expand", "homology", "is_contractible", "iso_signature", "isomorphic",
    "isomorphism", "replay", "validate",
]
