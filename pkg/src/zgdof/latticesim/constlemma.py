"""Empirical support of the distortion between ``(T ⊞ U)^lam`` and
``(T)^lam ⊞ (U)^mu``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..detmodel import GainEnsemble, PowerContext, boxplus, rng_for, sample_gains, subsection
from ..errors import DomainError


def support_bound(delta: float) -> float:
    return 3 * (4 * delta + 3) * (4 * delta + 6)


@dataclass
class ConstLemmaReport:
    observed_support_size: int
    bound: float
    passed: bool
    support: list[int] = field(default_factory=list)
    trials: int = 0

    def to_json(self) -> dict:
        return {"observed_support_size": self.observed_support_size, "bound": self.bound,
                "pass": self.passed, "support_min": min(self.support), "support_max": max(self.support),
                "trials": self.trials}


def distortion(T: int, U: int, g1, g2, lam, mu, nu, ctx: PowerContext) -> int:
    """E_Σ for one draw; the same gains enter both sides."""
    V = boxplus(T, U, g1, g2)
    v_top = subsection(V, nu, lam + nu, ctx).value
    t_top = subsection(T, nu, lam + nu, ctx).value
    u_top = subsection(U, nu, mu + nu, ctx).value
    return v_top - boxplus(t_top, u_top, g1, g2)


def verify_const_lemma(lam, mu, nu, delta: float = 2.0, trials: int = 10**5,
                       ctx: PowerContext | None = None, seed: int = 0,
                       gains: tuple | None = None, exhaustive: bool = False) -> ConstLemmaReport:
    """Collect the distinct values of E_Σ.

    T is uniform on X_{nu+lam} and U on X_{nu+mu}. Gains are fresh draws
    from a uniform ±(1/delta, delta) ensemble per trial unless ``gains``
    pins them. ``exhaustive`` enumerates every (T, U) pair instead of
    sampling.
    """
    lam, mu, nu = Fraction(lam), Fraction(mu), Fraction(nu)
    if not (lam >= mu > 0 and nu >= 0):
        raise DomainError(f"need lam >= mu > 0 and nu >= 0, got {lam}, {mu}, {nu}")
    ctx = ctx or PowerContext.from_base(32)
    nT, nU = ctx.pbar(nu + lam), ctx.pbar(nu + mu)
    seen: set[int] = set()
    if exhaustive:
        if gains is None:
            raise DomainError("exhaustive mode needs explicit gains")
        g1, g2 = gains
        for T in range(nT):
            for U in range(nU):
                seen.add(distortion(T, U, g1, g2, lam, mu, nu, ctx))
        n = nT * nU
    else:
        rng = rng_for(seed, 7)
        Ts = rng.integers(0, nT, size=trials)
        Us = rng.integers(0, nU, size=trials)
        if gains is None:
            ens = GainEnsemble(delta=delta, f_max=1 / (2 * (delta - 1 / delta)), seed=seed)
            G = sample_gains(ens, 2 * trials, stream=8).reshape(trials, 2)
        else:
            G = np.tile(np.asarray(gains, dtype=float), (trials, 1))
        for T, U, (g1, g2) in zip(Ts.tolist(), Us.tolist(), G.tolist()):
            seen.add(distortion(T, U, g1, g2, lam, mu, nu, ctx))
        n = trials
    bound = support_bound(delta)
    return ConstLemmaReport(len(seen), bound, len(seen) <= bound, sorted(seen), n)
