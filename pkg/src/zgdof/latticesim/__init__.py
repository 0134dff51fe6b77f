"""Achievability schemes and their Monte Carlo evaluation."""

from .constlemma import ConstLemmaReport, support_bound, verify_const_lemma
from .jamming import JammingScheme
from .lattice import LatticeScheme, LatticeSpec
from .schemes import SchemeConfig, ZeroForcingScheme, build_scheme
from .simulate import (DEFAULT_SEED, RateBounds, SimReport, leakage_check, rate_lower_bounds,
                       simulate)
from .zeroforcing import ZFResult, bc_zero_forcing

__all__ = [
    "ConstLemmaReport", "support_bound", "verify_const_lemma", "JammingScheme", "LatticeScheme",
    "LatticeSpec", "SchemeConfig", "ZeroForcingScheme", "build_scheme", "DEFAULT_SEED", "RateBounds",
    "SimReport", "leakage_check", "rate_lower_bounds", "simulate", "ZFResult", "bc_zero_forcing",
]
