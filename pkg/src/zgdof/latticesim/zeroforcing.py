"""Zero-forcing for the Z broadcast channel under perfect CSIT."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..region import ChannelParams


@dataclass
class ZFResult:
    branch: str
    x1: np.ndarray
    x2: np.ndarray
    snr1: np.ndarray
    snr2: np.ndarray
    residual_power: float
    d1: float
    d2: float


def bc_zero_forcing(params: ChannelParams, P: float, gains, messages) -> ZFResult:
    """Precode ``messages = (U1, U2)`` with known ``gains = (G11, G12, G22)``.

    When ``beta - 1 <= alpha``, U2 is sent along a direction that nulls it
    at Rx1 and U1 rides on Tx1 alone. Otherwise Tx1 is silent and Tx2
    carries W1 at power 1/P. GDoF estimates are ergodic averages of
    ``0.5 log2(1 + SNR)`` normalised by ``0.5 log2 P``.
    """
    a, b = float(params.alpha), float(params.beta)
    g11, g12, g22 = (np.asarray(g, dtype=float) for g in gains)
    u1, u2 = (np.asarray(m, dtype=float) for m in messages)
    half_log = 0.5 * math.log2(P)
    ra, rb = math.sqrt(P**a), math.sqrt(P**b)

    if b - 1 <= a:
        c1 = 0.5
        c2 = 1.0 / np.sqrt(2 * (g12**2 * P**b + g11**2 * P**a))
        x1 = c1 * u1 - c2 * g12 * rb * u2
        x2 = c2 * g11 * ra * u2
        # what U2 contributes at Rx1; zero up to rounding
        cross = g11 * ra * (-c2 * g12 * rb) + g12 * rb * (c2 * g11 * ra)
        residual = float(np.max(cross**2))
        snr1 = (c1 * g11 * ra) ** 2
        snr2 = g22**2 * P ** (1 + a) / (2 * (g12**2 * P**b + g11**2 * P**a))
        branch = "P1"
    else:
        x1 = np.zeros_like(u1)
        x2 = u1 / math.sqrt(P)
        residual = 0.0
        snr1 = g12**2 * P**b / P
        snr2 = np.zeros_like(snr1)
        branch = "P2"
    d1 = float(np.mean(0.5 * np.log2(1 + snr1))) / half_log
    d2 = float(np.mean(0.5 * np.log2(1 + snr2))) / half_log
    return ZFResult(branch, x1, x2, snr1, snr2, residual, d1, d2)
