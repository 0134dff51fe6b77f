"""Plot-ready CSV tables. Rationals get a decimal column plus exact
``*_num``/``*_den`` columns."""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Iterable

from .errors import KindMismatch
from .latticesim.simulate import SimReport
from .rationals import decimal_str
from .region import CSIT, ChannelParams, GdofRegion, RatioScan, ScenarioTag, Topology, gdof_region

KINDS = ("region", "error_curve", "ratio_surface", "corner_surface")

COLUMNS = {
    "region": "polygon, index, d1, d2, d1_num, d1_den, d2_num, d2_den",
    "error_curve": "P, decoder, errors, trials, rate, ci_low, ci_high, analytic_bound",
    "ratio_surface": "alpha, beta, w1, w2, regime, ratio (each with _num/_den)",
    "corner_surface": "alpha, beta, regime, d1ss_p, d2s_p, d1ss_fp, d2s_fp (each with _num/_den)",
}


def _rat_cols(name: str, x) -> dict:
    x = Fraction(x)
    return {name: decimal_str(x), f"{name}_num": x.numerator, f"{name}_den": x.denominator}


def _write(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def region_overlay(params: ChannelParams, topology: Topology = Topology.IC) -> list[GdofRegion]:
    return [gdof_region(params, ScenarioTag(topology, c)) for c in (CSIT.PERFECT, CSIT.FINITE_PRECISION)]


def _region_csv(regions: Iterable[GdofRegion]) -> str:
    rows = []
    for reg in regions:
        for k, (x, y) in enumerate(reg.vertices):
            row = {"polygon": reg.scenario.csit.value, "index": k}
            row.update(_rat_cols("d1", x))
            row.update(_rat_cols("d2", y))
            rows.append(row)
    header = ["polygon", "index", "d1", "d1_num", "d1_den", "d2", "d2_num", "d2_den"]
    return _write(rows, header)


def _error_csv(report: SimReport) -> str:
    rows = []
    for e in report.entries:
        if "errors" not in e:
            raise KindMismatch("error_curve needs a lattice simulation report")
        for dec, st in e["errors"].items():
            bound = e["analytic_bound"].get(dec, "")
            rows.append({"P": repr(e["P"]), "decoder": dec, "errors": st["errors"], "trials": st["trials"],
                         "rate": repr(st["rate"]), "ci_low": repr(st["ci_low"]),
                         "ci_high": repr(st["ci_high"]), "analytic_bound": repr(bound) if bound != "" else ""})
    header = ["P", "decoder", "errors", "trials", "rate", "ci_low", "ci_high", "analytic_bound"]
    return _write(rows, header)


def _ratio_csv(scan: RatioScan) -> str:
    rows = []
    for r in scan.rows:
        row = {}
        for k in ("alpha", "beta", "w1", "w2"):
            row.update(_rat_cols(k, r[k]))
        row["regime"] = r["regime"]
        row.update(_rat_cols("ratio", r["ratio"]))
        rows.append(row)
    header = []
    for k in ("alpha", "beta", "w1", "w2"):
        header += [k, f"{k}_num", f"{k}_den"]
    header += ["regime", "ratio", "ratio_num", "ratio_den"]
    return _write(rows, header)


def _corner_csv(rows_in: list[dict]) -> str:
    rows = []
    keys = ("d1ss_p", "d2s_p", "d1ss_fp", "d2s_fp")
    for r in rows_in:
        row = {}
        row.update(_rat_cols("alpha", r["alpha"]))
        row.update(_rat_cols("beta", r["beta"]))
        row["regime"] = r["regime"]
        for k in keys:
            row.update(_rat_cols(k, r[k]))
        rows.append(row)
    header = ["alpha", "alpha_num", "alpha_den", "beta", "beta_num", "beta_den", "regime"]
    for k in keys:
        header += [k, f"{k}_num", f"{k}_den"]
    return _write(rows, header)


def emit_plot_data(result, kind: str) -> str:
    """CSV for ``result``; ``kind`` must match the result's type."""
    if kind not in KINDS:
        raise KindMismatch(f"unknown plot kind {kind!r}")
    if kind == "region":
        if isinstance(result, GdofRegion):
            result = [result]
        if not (isinstance(result, (list, tuple)) and all(isinstance(r, GdofRegion) for r in result)):
            raise KindMismatch("region plot needs GdofRegion(s)")
        return _region_csv(result)
    if kind == "error_curve":
        if not isinstance(result, SimReport):
            raise KindMismatch("error_curve plot needs a SimReport")
        return _error_csv(result)
    if kind == "ratio_surface":
        if not isinstance(result, RatioScan):
            raise KindMismatch("ratio_surface plot needs a RatioScan")
        return _ratio_csv(result)
    if not (isinstance(result, list) and all(isinstance(r, dict) and "d1ss_fp" in r for r in result)):
        raise KindMismatch("corner_surface plot needs corner_surface rows")
    return _corner_csv(result)
