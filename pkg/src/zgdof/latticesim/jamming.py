"""Gaussian jamming schemes for finite precision CSIT.

alpha >= beta (Regimes 1 and 4.1): Tx1 puts its message on the top
alpha-beta levels and fills the rest with Gaussian jamming, so the noise
floor at Rx1 rises to the level of Tx2's signal. Tx2 sends at full power.

alpha < beta (Regimes 2 and 4.2): Tx1 only jams, at full power; Tx2 backs
off to P^-(beta-alpha) so its top beta-alpha levels are empty.

Rates are ergodic averages of Gaussian-input formulas over gain draws.
User 2's secure rate subtracts the eavesdropper rate at Rx1 with Tx1's
message already known, which is the conservative choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..detmodel import GainEnsemble, _draw, rng_for


@dataclass(frozen=True)
class JammingScheme:
    regime: str
    alpha: float
    beta: float
    ensemble: GainEnsemble
    kind: str = "jamming"

    @property
    def tx1_sends_message(self) -> bool:
        return self.alpha >= self.beta

    def powers(self, P: float) -> dict[str, float]:
        """Per-transmitter power split (each transmitter sums to <= 1)."""
        a, b = self.alpha, self.beta
        if self.tx1_sends_message:
            jam = P ** (b - a)
            return {"tx1_message": 1.0 - jam, "tx1_jam": jam, "tx2": 1.0}
        return {"tx1_message": 0.0, "tx1_jam": 1.0, "tx2": P ** (-(b - a))}

    def rates(self, P: float, g11: np.ndarray, g12: np.ndarray, g22: np.ndarray) -> dict[str, np.ndarray]:
        """Per-draw secure rates (bits per channel use) and eavesdropper SINR."""
        pw = self.powers(P)
        a, b = self.alpha, self.beta
        s11 = g11**2 * P**a
        s12 = g12**2 * P**b
        s22 = g22**2 * P
        jam_rx1 = s11 * pw["tx1_jam"]
        if self.tx1_sends_message:
            r1 = 0.5 * np.log2(1 + s11 * pw["tx1_message"] / (1 + jam_rx1 + s12 * pw["tx2"]))
        else:
            r1 = np.zeros_like(s11)
        eve_sinr = s12 * pw["tx2"] / (1 + jam_rx1)
        r2_main = 0.5 * np.log2(1 + s22 * pw["tx2"])
        r2_eve = 0.5 * np.log2(1 + eve_sinr)
        return {"R1": r1, "R2": np.maximum(r2_main - r2_eve, 0.0), "eve_sinr": eve_sinr}

    def draw_gains(self, rng: np.random.Generator, n: int):
        g = _draw(self.ensemble, rng, 3 * n).reshape(3, n)
        return g[0], g[1], g[2]

    def ergodic_rates(self, P: float, draws: int, seed: int, stream: int = 0) -> dict[str, float]:
        rng = rng_for(seed, stream)
        r = self.rates(P, *self.draw_gains(rng, draws))
        half_log = 0.5 * math.log2(P)
        R1, R2 = float(np.mean(r["R1"])), float(np.mean(r["R2"]))
        return {"R1": R1, "R2": R2, "d1": R1 / half_log, "d2": R2 / half_log,
                "eve_sinr_max": float(np.max(r["eve_sinr"]))}
