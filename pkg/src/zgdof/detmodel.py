"""Deterministic power-level model: P̄-ary levels, sub-sections, the ⊞
combination and bounded-density gain sampling.

All level arithmetic is on Python ints, so values far beyond 64 bits are
fine. ``P`` is stored as an exact Fraction; ``pbar`` is computed with an
integer root and is never off by one from float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import gmpy2
import numpy as np

from .errors import ConfigError, DomainError, InvalidInterval
from .region import ChannelParams
from .rationals import pos

Gain = Union[float, int, Fraction]


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


@lru_cache(maxsize=4096)
def _pbar(P: Fraction, lam: Fraction) -> int:
    # floor(P^(a/2b)) = floor(floor(P^a)^(1/2b))
    a, b = lam.numerator, lam.denominator
    pa = P ** a
    return int(gmpy2.iroot(gmpy2.mpz(pa.numerator // pa.denominator), 2 * b)[0])


@dataclass(frozen=True)
class PowerContext:
    """Nominal power ``P`` with ``pbar(lam) = floor(sqrt(P)**lam)``."""

    P: Fraction

    def __post_init__(self):
        object.__setattr__(self, "P", _exact(self.P))
        if self.P <= 1:
            raise DomainError(f"power must exceed 1, got {self.P}")

    @classmethod
    def from_base(cls, base: int) -> "PowerContext":
        """Exact-base context, P̄ = ``base``."""
        return cls(Fraction(base) ** 2)

    def pbar(self, lam) -> int:
        lam = _exact(lam)
        if lam < 0:
            raise DomainError(f"power level must be nonnegative, got {lam}")
        return _pbar(self.P, lam)

    @property
    def log2_pbar(self) -> float:
        return 0.5 * math.log2(self.P)

    def level_value(self, value: int, level_cap) -> "LevelValue":
        cap = _exact(level_cap)
        if not 0 <= value < self.pbar(cap):
            raise DomainError(f"value {value} outside [0, pbar({cap})={self.pbar(cap)})")
        return LevelValue(int(value), cap)


@dataclass(frozen=True)
class LevelValue:
    value: int
    level_cap: Fraction

    def __int__(self):
        return self.value


def subsection(x: Union[LevelValue, int], lam1, lam2, ctx: PowerContext) -> LevelValue:
    """The levels of ``x`` between ``lam1`` and ``lam2``."""
    l1, l2 = _exact(lam1), _exact(lam2)
    if l1 < 0 or l1 > l2:
        raise InvalidInterval(f"need 0 <= lam1 <= lam2, got ({l1}, {l2})")
    v = int(x)
    return LevelValue((v % ctx.pbar(l2)) // ctx.pbar(l1), l2 - l1)


def top(x: LevelValue, mu, ctx: PowerContext) -> LevelValue:
    """Most significant ``mu`` levels of ``x``."""
    mu = _exact(mu)
    lam = x.level_cap
    if mu > lam:
        raise InvalidInterval(f"top-{mu} of a value capped at level {lam}")
    return subsection(x, lam - mu, lam, ctx)


def floor_mul(g: Gain, x: int) -> int:
    """Exact ``floor(g * x)``."""
    if isinstance(g, Fraction):
        num, den = g.numerator, g.denominator
    elif isinstance(g, (int, np.integer)):
        return int(g) * int(x)
    else:
        num, den = float(g).as_integer_ratio()
    return (num * int(x)) // den


def boxplus(x1: Union[LevelValue, int], x2: Union[LevelValue, int], g1: Gain, g2: Gain) -> int:
    """``floor(g1*x1) + floor(g2*x2)``."""
    return floor_mul(g1, int(x1)) + floor_mul(g2, int(x2))


def det_channel(a: Union[LevelValue, int], b: Union[LevelValue, int], gains: Sequence[Gain],
                params: ChannelParams, ctx: PowerContext) -> tuple[int, int]:
    """Outputs (ȳ1, ȳ2) of the deterministic Z channel."""
    a, b = int(a), int(b)
    if not 0 <= a < ctx.pbar(params.alpha):
        raise DomainError(f"a={a} exceeds level cap alpha={params.alpha}")
    if not 0 <= b < ctx.pbar(max(Fraction(1), params.beta)):
        raise DomainError(f"b={b} exceeds level cap max(1, beta)")
    g11, g12, g22 = (_exact(g) for g in gains)
    att1 = Fraction(1, ctx.pbar(pos(1 - params.beta)))
    att2 = Fraction(1, ctx.pbar(pos(params.beta - 1)))
    y1 = floor_mul(g11, a) + floor_mul(g12 * att1, b)
    y2 = floor_mul(g22 * att2, b)
    return y1, y2


# ---------------------------------------------------------------------------
# bounded-density gains
# ---------------------------------------------------------------------------

def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for ``(seed, stream...)``; independent of call order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(stream))))


@dataclass(frozen=True)
class GainEnsemble:
    """Gain distribution obeying ``1/delta < |g| < delta`` and density <= f_max.

    ``dist`` is ``"uniform_pm"`` (magnitude uniform on ``[lo, hi]`` with a
    random sign), ``"uniform"`` (uniform on ``[lo, hi]``) or ``"point"``
    (always rejected, its density is unbounded).
    """

    delta: float = 2.0
    f_max: float = 1 / 3
    dist: str = "uniform_pm"
    lo: float | None = None
    hi: float | None = None
    seed: int = 0
    density: float = field(init=False, default=math.inf)

    def __post_init__(self):
        if not self.delta > 1:
            raise ConfigError(f"delta must exceed 1, got {self.delta}")
        lo = 1 / self.delta if self.lo is None else self.lo
        hi = self.delta if self.hi is None else self.hi
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.dist == "point":
            raise ConfigError("point-mass gains have unbounded density")
        if self.dist not in ("uniform_pm", "uniform"):
            raise ConfigError(f"unknown gain distribution {self.dist!r}")
        if not hi > lo:
            raise ConfigError(f"empty gain interval [{lo}, {hi}]")
        mags = (abs(lo), abs(hi))
        if self.dist == "uniform" and lo < 0 < hi:
            raise ConfigError("uniform gain interval straddles zero")
        if min(mags) < 1 / self.delta - 1e-15 or max(mags) > self.delta + 1e-15:
            raise ConfigError(f"gain interval [{lo}, {hi}] leaves (1/delta, delta)")
        dens = 1 / (2 * (hi - lo)) if self.dist == "uniform_pm" else 1 / (hi - lo)
        if dens > self.f_max * (1 + 1e-12):
            raise ConfigError(f"density {dens} exceeds f_max={self.f_max}")
        object.__setattr__(self, "density", dens)


def sample_gains(ensemble: GainEnsemble, count: int, stream: int = 0) -> np.ndarray:
    """``count`` i.i.d. gains; deterministic in ``(ensemble.seed, stream)``."""
    return _draw(ensemble, rng_for(ensemble.seed, stream), count)


def _draw(ens: GainEnsemble, rng: np.random.Generator, count) -> np.ndarray:
    lo, hi = ens.lo, ens.hi
    mag = rng.uniform(lo, hi, size=count)
    # the open interval: redraw exact endpoints (vanishingly rare)
    bad = (mag <= lo) | (mag >= hi)
    while np.any(bad):
        mag[bad] = rng.uniform(lo, hi, size=int(bad.sum()))
        bad = (mag <= lo) | (mag >= hi)
    if ens.dist == "uniform_pm":
        sign = np.where(rng.integers(0, 2, size=count) == 1, 1.0, -1.0)
        return sign * mag
    return mag
