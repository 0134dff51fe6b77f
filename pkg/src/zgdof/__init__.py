"""Secure GDoF regions, power-level models, sum-set stacking and achievability
simulators for the two-user Z interference and broadcast channels."""

__version__ = "0.1.0"

from .errors import ZgdofError  # noqa: F401
from .region import (BC_FP, BC_P, CSIT, IC_FP, IC_P, ChannelParams, GdofRegion,  # noqa: F401
                     Regime, RegimeId, ScenarioTag, Topology, WeightVector, classify_regime,
                     corner_point, fp_to_p_ratio, gdof_region, ratio_scan, weighted_max)
