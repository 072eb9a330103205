"""Sampled bounds for the modulus and related values, falsification and inversion."""
from .inversion import BiLipschitzReport, InversionResult, bilipschitz_check, invert_by_contraction
from .values import (Complement, ValueEstimate, Violation, estimate_modulus, estimate_value,
                     falsify_averaged, modulus_ratio)

__all__ = ["BiLipschitzReport", "Complement", "InversionResult", "ValueEstimate", "Violation",
           "bilipschitz_check", "estimate_modulus", "estimate_value", "falsify_averaged",
           "invert_by_contraction", "modulus_ratio"]
