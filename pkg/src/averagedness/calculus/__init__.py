"""Exact and interval values of the modulus of averagedness from structural rules."""
from .identities import SUITES, IdentityReport, verify_identities
from .matrix import (SubspacePair, friedrichs_cosine, matrix_modulus, scalar_modulus,
                     two_subspace_modulus)
from .rules import (ModulusBound, TraceStep, exact_modulus, ogura_yamada, prox_modulus,
                    resolvent_modulus)

__all__ = ["SUITES", "IdentityReport", "ModulusBound", "SubspacePair", "TraceStep",
           "exact_modulus", "friedrichs_cosine", "matrix_modulus", "ogura_yamada",
           "prox_modulus", "resolvent_modulus", "scalar_modulus", "two_subspace_modulus",
           "verify_identities"]
