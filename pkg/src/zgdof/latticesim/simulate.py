"""Monte Carlo driver, leakage and finite-P rate lower bounds.

Trials are split into fixed-size chunks. Chunk ``c`` at power ``P`` draws
from its own counter-based stream ``(seed, key(P), c)``, so totals do not
depend on how many workers run the chunks.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.stats import binomtest

from ..detmodel import _draw, rng_for
from ..errors import SupportTooLarge, UnsupportedCombination
from .jamming import JammingScheme
from .lattice import LatticeScheme
from .schemes import Scheme, ZeroForcingScheme
from .zeroforcing import bc_zero_forcing

DEFAULT_SEED = 20190101
CHUNK = 8192


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("ZGDOF_JOBS", "1")))
    except ValueError:
        return 1


def p_key(P: float) -> int:
    return zlib.crc32(repr(float(P)).encode())


def wilson(k: int, n: int) -> dict:
    ci = binomtest(k, n).proportion_ci(method="wilson")
    return {"errors": int(k), "trials": int(n), "rate": k / n, "ci_low": float(ci.low),
            "ci_high": float(ci.high), "half_width": float(ci.high - ci.low) / 2}


@dataclass
class RateBounds:
    R1: float
    R2: float
    d1: float
    d2: float


@dataclass
class SimReport:
    scheme: dict
    seed: int
    trials: int
    P_values: list
    entries: list
    wall_time: float = 0.0
    noiseless: bool = False

    def entry(self, P: float) -> dict:
        for e in self.entries:
            if e["P"] == P:
                return e
        raise KeyError(P)

    def to_json(self, include_wall_time: bool = False) -> dict:
        out = {"scheme": self.scheme, "seed": self.seed, "trials": self.trials,
               "noiseless": self.noiseless, "P_values": self.P_values, "entries": self.entries}
        if include_wall_time:
            out["wall_time"] = self.wall_time
        return out

    def to_csv(self) -> str:
        """Long format: one row per (P, metric)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["P", "metric", "value"])
        for e in self.entries:
            for key, val in _flatten(e):
                if key != "P":
                    w.writerow([repr(e["P"]), key, val])
        return buf.getvalue()


def _flatten(d: dict, prefix: str = ""):
    for k, v in d.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, name + ".")
        else:
            yield name, v


def describe(scheme: Scheme) -> dict:
    if isinstance(scheme, LatticeScheme):
        return {"kind": "lattice", "regime": scheme.regime, "alpha": scheme.alpha, "beta": scheme.beta,
                "epsilon": scheme.epsilon, "preset": scheme.preset}
    if isinstance(scheme, JammingScheme):
        return {"kind": "jamming", "regime": scheme.regime, "alpha": scheme.alpha, "beta": scheme.beta,
                "delta": scheme.ensemble.delta}
    return {"kind": "zeroforcing", "alpha": float(scheme.params.alpha), "beta": float(scheme.params.beta),
            "delta": scheme.ensemble.delta}


def _chunks(trials: int, chunk: int) -> list[tuple[int, int]]:
    return [(c, min(chunk, trials - c * chunk)) for c in range(math.ceil(trials / chunk))]


def simulate(scheme: Scheme, P: Union[float, Sequence[float]], trials: int, seed: int = DEFAULT_SEED,
             jobs: int | None = None, noiseless: bool = False, chunk: int = CHUNK) -> SimReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    P_values = [float(P)] if np.isscalar(P) else [float(p) for p in P]
    jobs = jobs or default_jobs()
    t0 = time.perf_counter()
    entries = []
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for Pv in P_values:
            if isinstance(scheme, LatticeScheme):
                entries.append(_sim_lattice(scheme, Pv, trials, seed, pool, noiseless, chunk))
            elif isinstance(scheme, JammingScheme):
                entries.append(_sim_jamming(scheme, Pv, trials, seed, pool, chunk))
            else:
                entries.append(_sim_zf(scheme, Pv, trials, seed, pool, chunk))
    return SimReport(describe(scheme), seed, trials, P_values, entries,
                     time.perf_counter() - t0, noiseless)


def _sim_lattice(scheme: LatticeScheme, P, trials, seed, pool, noiseless, chunk) -> dict:
    lat = scheme.at(P)
    names = [c.name for c in scheme.components]
    msgs = scheme.message_names
    key = p_key(P)

    def work(job):
        c, n = job
        rng = rng_for(seed, key, c)
        idx = {nm: rng.integers(-lat[nm].count, lat[nm].count + 1, size=n) for nm in names}
        if noiseless:
            z1 = z2 = np.zeros(n)
        else:
            z1, z2 = rng.standard_normal(n), rng.standard_normal(n)
        x1, x2 = scheme.transmit(lat, idx)
        y1, y2 = scheme.receive(lat, x1, x2, z1, z2)
        dec = scheme.decode(lat, y1, y2)
        wrong = {nm: dec[nm] != idx[nm] for nm in (*msgs, "V2")}
        joint = np.zeros(n, dtype=bool)
        for nm in msgs:
            joint |= wrong[nm]
        out = {nm: int(w.sum()) for nm, w in wrong.items()}
        out["joint"] = int(joint.sum())
        out["noise_event"] = int((np.abs(z1) >= lat.A / 2).sum())
        return out

    totals: dict[str, int] = {}
    for part in pool.map(work, _chunks(trials, chunk)):
        for k, v in part.items():
            totals[k] = totals.get(k, 0) + v
    errors = {k: wilson(v, trials) for k, v in totals.items()}
    bounds = scheme.analytic_bounds(lat)
    leak = leakage_check(scheme, P)
    rb = rate_lower_bounds(scheme, P, {"joint": errors["joint"]["rate"], "V2": errors["V2"]["rate"]},
                           leakage=leak)
    return {
        "P": P, "A": lat.A,
        "cardinality": {nm: lat[nm].cardinality for nm in names},
        "tx_power": {"tx1": lat.tx_power(1), "tx2": lat.tx_power(2)},
        "errors": errors, "analytic_bound": bounds, "leakage_bits": leak,
        "R1": rb.R1, "R2": rb.R2, "d1": rb.d1, "d2": rb.d2,
    }


def _sim_jamming(scheme: JammingScheme, P, trials, seed, pool, chunk) -> dict:
    key = p_key(P)

    def work(job):
        c, n = job
        rng = rng_for(seed, key, c)
        r = scheme.rates(P, *scheme.draw_gains(rng, n))
        return float(r["R1"].sum()), float(r["R2"].sum()), float(r["eve_sinr"].max())

    parts = list(pool.map(work, _chunks(trials, chunk)))
    R1 = math.fsum(p[0] for p in parts) / trials
    R2 = math.fsum(p[1] for p in parts) / trials
    half_log = 0.5 * math.log2(P)
    return {"P": P, "powers": scheme.powers(P), "R1": R1, "R2": R2, "d1": R1 / half_log,
            "d2": R2 / half_log, "eve_sinr_max": max(p[2] for p in parts),
            "eve_sinr_bound": scheme.ensemble.delta**4}


def _sim_zf(scheme: ZeroForcingScheme, P, trials, seed, pool, chunk) -> dict:
    key = p_key(P)

    def work(job):
        c, n = job
        rng = rng_for(seed, key, c)
        g = _draw(scheme.ensemble, rng, 3 * n).reshape(3, n)
        u = rng.standard_normal((2, n))
        res = bc_zero_forcing(scheme.params, P, g, u)
        return res.d1 * n, res.d2 * n, res.residual_power, res.branch

    parts = list(pool.map(work, _chunks(trials, chunk)))
    return {"P": P, "branch": parts[0][3], "d1": math.fsum(p[0] for p in parts) / trials,
            "d2": math.fsum(p[1] for p in parts) / trials,
            "residual_power": max(p[2] for p in parts),
            "residual_limit": 1e-18 * P ** float(scheme.params.beta)}


def leakage_check(scheme: Scheme, P: float) -> float:
    """Bits leaked about V2 at Rx1 given Tx1's messages (lattice schemes)."""
    if not isinstance(scheme, LatticeScheme):
        raise UnsupportedCombination("leakage_check needs a lattice scheme")
    try:
        return scheme.leakage_bits(P)
    except SupportTooLarge:
        return scheme.leakage_closed_form(P)


def rate_lower_bounds(scheme: Scheme, P: float, error_estimates: dict | None = None,
                      leakage: float | None = None, draws: int = 10**5,
                      seed: int = DEFAULT_SEED) -> RateBounds:
    """Finite-P secure rate lower bounds in bits, and the normalised GDoF.

    Lattice schemes use the Fano-type bounds ``log|Γ|(1 - Pe) - 1`` with
    the leakage subtracted from user 2. Error probabilities default to the
    analytic bounds. Jamming and zero-forcing use ergodic Gaussian rates.
    """
    half_log = 0.5 * math.log2(P)
    if isinstance(scheme, LatticeScheme):
        lat = scheme.at(P)
        est = error_estimates or scheme.analytic_bounds(lat)
        pe, pe2 = est["joint"], est["V2"]
        leak = leakage_check(scheme, P) if leakage is None else leakage
        msg_bits = sum(math.log2(lat[n].cardinality) for n in scheme.message_names)
        R1 = max(0.0, msg_bits * (1 - pe) - 1)
        R2 = max(0.0, math.log2(lat["V2"].cardinality) * (1 - pe2) - 1 - leak)
        return RateBounds(R1, R2, R1 / half_log, R2 / half_log)
    if isinstance(scheme, JammingScheme):
        r = scheme.ergodic_rates(P, draws, seed)
        return RateBounds(r["R1"], r["R2"], r["d1"], r["d2"])
    rep = _sim_zf(scheme, P, draws, seed, _Serial(), CHUNK)
    return RateBounds(rep["d1"] * half_log, rep["d2"] * half_log, rep["d1"], rep["d2"])


class _Serial:
    def map(self, fn, it: Iterable):
        return map(fn, it)
