"""Lattice-alignment schemes for perfect CSIT in Regimes 1 and 2.

A scheme is a list of :class:`Component` descriptors whose exponents are
functions of ``(alpha, beta, eps)``. Realising the scheme at a power ``P``
gives concrete :class:`LatticeSpec` objects. Each lattice is
``scale * spacing * {-count, ..., count}``.

Two presets are shipped for each regime:

``verbatim``
    The constellation exponents exactly as originally written. In that
    text alpha and beta are interchanged relative to the channel model (X1
    is scaled by P̄^-beta but received at P̄^alpha), so at the physical
    receive amplitudes the verbatim presets break the power budget whenever
    alpha != beta.
``calibrated``
    alpha and beta swapped back, plus a 1/8 factor on the V11 count so
    Tx1 stays within unit power. This preset decodes and hits the intended
    corner points (alpha-1, 1) and (beta-1, 1+alpha-beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.signal import fftconvolve
from scipy.stats import entropy

from ..errors import ConfigError, PowerBudgetExceeded, SupportTooLarge

Exp = Callable[[float, float, float], float]

AUDIT_P_GRID = (1e4, 1e6, 1e8, 1e10)
POWER_TOL = 1e-9
LEAKAGE_SUPPORT_LIMIT = 10**7


def amp(P: float, x: float) -> float:
    """``sqrt(P)**x`` as a real number."""
    return P ** (0.5 * x)


@dataclass(frozen=True)
class Component:
    name: str
    tx: int
    scale_exp: Exp
    spacing_exp: Optional[Exp]
    count_exp: Exp
    count_factor: float = 1.0
    count_offset: int = 0


@dataclass(frozen=True)
class LatticeSpec:
    name: str
    tx: int
    scale: float
    spacing: int
    count: int

    @property
    def cardinality(self) -> int:
        return 2 * self.count + 1

    @property
    def step(self) -> float:
        return self.scale * self.spacing

    @property
    def second_moment(self) -> float:
        # uniform over {-K..K}: E[k^2] = K(K+1)/3
        return self.step**2 * self.count * (self.count + 1) / 3

    @property
    def peak(self) -> float:
        return self.step * self.count

    def points(self) -> np.ndarray:
        return self.step * np.arange(-self.count, self.count + 1)


def _c(v):
    return lambda a, b, e: v


PRESETS: dict[tuple[str, str], tuple[Callable[[float, float, float, float], float], tuple[Component, ...]]] = {
    ("R1", "calibrated"): (
        lambda P, a, b, e: 8 * amp(P, 2 * e),
        (
            Component("V11", 1, lambda a, b, e: -a, lambda a, b, e: b - e, lambda a, b, e: a - b - e, 1 / 8, 0),
            Component("J1", 1, lambda a, b, e: -a, lambda a, b, e: b - 1 - e, lambda a, b, e: 1 - e, 1 / 8, -1),
            Component("V12", 1, lambda a, b, e: -a, None, lambda a, b, e: b - 1 - 2 * e, 1 / 4, -1),
            Component("V2", 2, lambda a, b, e: -b, lambda a, b, e: b - 1 - e, lambda a, b, e: 1 - e, 1 / 8, -1),
        ),
    ),
    ("R1", "verbatim"): (
        lambda P, a, b, e: 8 * amp(P, 2 * e),
        (
            Component("V11", 1, lambda a, b, e: -b, lambda a, b, e: a - e, lambda a, b, e: b - a - e, 1.0, 0),
            Component("J1", 1, lambda a, b, e: -b, lambda a, b, e: a - 1 - e, lambda a, b, e: 1 - e, 1 / 8, -1),
            Component("V12", 1, lambda a, b, e: -b, None, lambda a, b, e: a - 1 - 2 * e, 1 / 4, -1),
            Component("V2", 2, lambda a, b, e: -a, lambda a, b, e: a - 1 - e, lambda a, b, e: 1 - e, 1 / 8, -1),
        ),
    ),
    ("R2", "calibrated"): (
        lambda P, a, b, e: amp(P, 2 * e),
        (
            Component("V1", 1, lambda a, b, e: -a, None, lambda a, b, e: b - 1 - 2 * e, 1 / 2, -1),
            Component("J1", 1, lambda a, b, e: -a, lambda a, b, e: b - 1 - e, lambda a, b, e: 1 + a - b - e, 1.0, 0),
            Component("V2", 2, lambda a, b, e: -b, lambda a, b, e: b - 1 - e, lambda a, b, e: 1 + a - b - e, 1.0, 0),
        ),
    ),
    ("R2", "verbatim"): (
        lambda P, a, b, e: amp(P, 2 * e),
        (
            Component("V1", 1, lambda a, b, e: -b, None, lambda a, b, e: a - 1 - 2 * e, 1 / 2, -1),
            Component("J1", 1, lambda a, b, e: -b, lambda a, b, e: a - 1 - e, lambda a, b, e: 1 - a + b - e, 1.0, 0),
            Component("V2", 2, lambda a, b, e: -a, lambda a, b, e: a - 1 - e, lambda a, b, e: 1 - a + b - e, 1.0, 0),
        ),
    ),
}


@dataclass(frozen=True)
class RealizedLattices:
    P: float
    A: float
    lattices: Mapping[str, LatticeSpec]

    def __getitem__(self, name: str) -> LatticeSpec:
        return self.lattices[name]

    def tx_power(self, tx: int) -> float:
        return sum(l.second_moment for l in self.lattices.values() if l.tx == tx)


@dataclass(frozen=True)
class LatticeScheme:
    """Perfect-CSIT lattice alignment with unit channel gains."""

    regime: str
    alpha: float
    beta: float
    epsilon: float
    preset: str
    components: tuple[Component, ...]
    a_fn: Callable = field(repr=False, default=None)
    kind: str = "lattice"

    @classmethod
    def from_preset(cls, regime: str, alpha: float, beta: float, epsilon: float,
                    preset: str = "calibrated",
                    overrides: Optional[Mapping[str, tuple]] = None) -> "LatticeScheme":
        key = (regime, preset)
        if key not in PRESETS:
            raise ConfigError(f"no lattice preset {preset!r} for {regime}")
        a_fn, comps = PRESETS[key]
        if overrides:
            names = {c.name for c in comps}
            unknown = set(overrides) - names
            if unknown:
                raise ConfigError(f"unknown lattice components in overrides: {sorted(unknown)}")
            new = []
            for c in comps:
                if c.name in overrides:
                    s, sp, ct = overrides[c.name]
                    c = Component(c.name, c.tx, _c(float(s)), None if sp is None else _c(float(sp)),
                                  _c(float(ct)), c.count_factor, c.count_offset)
                new.append(c)
            comps = tuple(new)
            preset = f"{preset}+overrides"
        return cls(regime, float(alpha), float(beta), float(epsilon), preset, comps, a_fn)

    @property
    def message_names(self) -> tuple[str, ...]:
        return ("V11", "V12") if self.regime == "R1" else ("V1",)

    def at(self, P: float) -> RealizedLattices:
        a, b, e = self.alpha, self.beta, self.epsilon
        A = self.a_fn(P, a, b, e)
        out = {}
        for c in self.components:
            scale = A * amp(P, c.scale_exp(a, b, e))
            spacing = 1 if c.spacing_exp is None else max(1, math.floor(amp(P, c.spacing_exp(a, b, e))))
            count = max(0, math.floor(c.count_factor * amp(P, c.count_exp(a, b, e))) + c.count_offset)
            out[c.name] = LatticeSpec(c.name, c.tx, scale, spacing, count)
        return RealizedLattices(P, A, out)

    def audit_power(self, P_values=AUDIT_P_GRID) -> dict[float, tuple[float, float]]:
        """Exact per-transmitter second moments; raises if either exceeds 1."""
        report = {}
        for P in P_values:
            lat = self.at(P)
            p1, p2 = lat.tx_power(1), lat.tx_power(2)
            report[P] = (p1, p2)
            if p1 > 1 + POWER_TOL or p2 > 1 + POWER_TOL:
                raise PowerBudgetExceeded(
                    f"{self.regime}/{self.preset} at P={P:g}: E[X1^2]={p1:.4g}, E[X2^2]={p2:.4g}")
        return report

    # -- channel and decoders ------------------------------------------------

    def transmit(self, lat: RealizedLattices, idx: Mapping[str, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        x1 = sum(lat[n].step * idx[n] for n in idx if lat[n].tx == 1)
        x2 = sum(lat[n].step * idx[n] for n in idx if lat[n].tx == 2)
        return x1, x2

    def receive(self, lat: RealizedLattices, x1, x2, z1, z2):
        P = lat.P
        y1 = amp(P, self.alpha) * x1 + amp(P, self.beta) * x2 + z1
        y2 = amp(P, 1.0) * x2 + z2
        return y1, y2

    def decode(self, lat: RealizedLattices, y1: np.ndarray, y2: np.ndarray) -> dict[str, np.ndarray]:
        """Round-and-clip nearest-neighbour decoders (returns lattice indices)."""
        P = lat.P
        a1 = amp(P, self.alpha)

        def slicer(y, step, count):
            return np.clip(np.rint(y / step), -count, count).astype(np.int64)

        out = {}
        fold = a1 * lat["J1"].step
        if self.regime == "R1":
            v11, v12 = lat["V11"], lat["V12"]
            out["V11"] = slicer(y1, a1 * v11.step, v11.count)
            yt = y1 - a1 * v11.step * out["V11"]
            r = yt - fold * np.rint(yt / fold)
            out["V12"] = slicer(r, a1 * v12.step, v12.count)
        else:
            v1 = lat["V1"]
            r = y1 - fold * np.rint(y1 / fold)
            out["V1"] = slicer(r, a1 * v1.step, v1.count)
        v2 = lat["V2"]
        out["V2"] = slicer(y2, amp(P, 1.0) * v2.step, v2.count)
        return out

    def analytic_bounds(self, lat: RealizedLattices) -> dict[str, float]:
        A = lat.A
        joint = (6.0 if self.regime == "R1" else 2.0) * math.exp(-A * A / 8)
        d2 = amp(lat.P, 1.0) * lat["V2"].step
        return {"joint": min(1.0, joint), "V2": min(1.0, 2.0 * math.exp(-d2 * d2 / 8))}

    def noiseless_oracle(self, P: float, limit: int = 10**6) -> tuple[int, int]:
        """Decode every lattice combination without noise.

        Returns (combinations checked, failures).
        """
        lat = self.at(P)
        names = [c.name for c in self.components]
        ranges = [np.arange(-lat[n].count, lat[n].count + 1) for n in names]
        total = math.prod(len(r) for r in ranges)
        if total > limit:
            raise SupportTooLarge(f"{total} lattice combinations exceeds {limit}")
        grids = np.meshgrid(*ranges, indexing="ij")
        idx = {n: g.reshape(-1) for n, g in zip(names, grids)}
        x1, x2 = self.transmit(lat, idx)
        zeros = np.zeros_like(x1, dtype=float)
        y1, y2 = self.receive(lat, x1, x2, zeros, zeros)
        dec = self.decode(lat, y1, y2)
        bad = np.zeros(total, dtype=bool)
        for n in (*self.message_names, "V2"):
            bad |= dec[n] != idx[n]
        return total, int(bad.sum())

    # -- leakage ---------------------------------------------------------------

    def leakage_bits(self, P: float) -> float:
        """``H(a J1 + b V2) - H(a J1)`` at Rx1, exactly.

        Raises SupportTooLarge when the two steps are incommensurate and the
        sum set is too big to enumerate.
        """
        lat = self.at(P)
        j, v = lat["J1"], lat["V2"]
        kj, kv = j.count, v.count
        if kv == 0:
            return 0.0
        sj = amp(P, self.alpha) * j.step
        sv = amp(P, self.beta) * v.step
        h_j = math.log2(2 * kj + 1)
        ratio = sv / sj
        frac = Fraction(ratio).limit_denominator(1000)
        if abs(float(frac) - ratio) <= 1e-9 * ratio:
            n, d = frac.numerator, frac.denominator
            pj = np.zeros(2 * kj * d + 1)
            pj[::d] = 1.0 / (2 * kj + 1)
            pv = np.zeros(2 * kv * n + 1)
            pv[::n] = 1.0 / (2 * kv + 1)
            if len(pj) + len(pv) > LEAKAGE_SUPPORT_LIMIT:
                raise SupportTooLarge("sum-set grid too long to convolve")
            if len(pj) * len(pv) > 10**7:
                pmf = np.clip(fftconvolve(pj, pv), 0.0, None)
            else:
                pmf = np.convolve(pj, pv)
            return float(entropy(pmf, base=2)) - h_j
        if (2 * kj + 1) * (2 * kv + 1) > LEAKAGE_SUPPORT_LIMIT:
            raise SupportTooLarge("incommensurate lattices with a large sum set")
        sums = (sj * np.arange(-kj, kj + 1))[:, None] + (sv * np.arange(-kv, kv + 1))[None, :]
        tol = 1e-9 * max(sj, sv)
        _, counts = np.unique(np.rint(sums.reshape(-1) / tol), return_counts=True)
        return float(entropy(counts, base=2)) - h_j

    def leakage_closed_form(self, P: float) -> float:
        """log2(|Γ_J| + |Γ_2| - 1) - log2|Γ_J|: the aligned-sum support bound."""
        lat = self.at(P)
        nj, nv = lat["J1"].cardinality, lat["V2"].cardinality
        return math.log2(nj + nv - 1) - math.log2(nj)
