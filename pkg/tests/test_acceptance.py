"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
Tolerances are the stated ones; nothing is relaxed to make a line pass.
"""

import itertools
import random
import sys
import time
from fractions import Fraction as F

import pytest

from zgdof.detmodel import PowerContext, subsection, top
from zgdof.latticesim import SchemeConfig, build_scheme, leakage_check, rate_lower_bounds, simulate
from zgdof.latticesim import verify_const_lemma
from zgdof.errors import PowerBudgetExceeded
from zgdof.region import (BC_FP, BC_P, CSIT, IC_FP, IC_P, ChannelParams, Topology, fp_to_p_ratio,
                          gdof_region, ratio_scan, weighted_max)
from zgdof.sumset import (Box, StackingProblem, brute_force_feasible, problem_from_json, sliding_window_plan,
                          stacking_feasible)
from zgdof.sweep import parse_weights, regime12_grid

_out = print


@pytest.fixture(autouse=True)
def _show(capsys):
    global _out

    def emit(*a):
        with capsys.disabled():
            print(*a, flush=True)

    _out = emit
    yield
    _out = print


def report(n, ok, detail, elapsed=None):
    t = "" if elapsed is None else f" [{elapsed:.2f}s]"
    _out(f"criterion {n}: {'PASS' if ok else 'FAIL'}: {detail}{t}")
    assert ok, detail


def _pts(vs):
    return "{" + ", ".join(f"({x},{y})" for x, y in sorted(vs)) + "}"


def test_c01_corner_points():
    t0 = time.perf_counter()
    a = ChannelParams(2, F(3, 2))
    p = set(gdof_region(a, IC_P).vertices)
    fp = set(gdof_region(a, IC_FP).vertices)
    ok_p = p == {(0, 0), (2, 0), (1, 1), (0, 1)}
    ok_fp = fp == {(0, 0), (2, 0), (F(1, 2), 1), (0, 1)}
    r2 = gdof_region(ChannelParams(F(6, 5), F(3, 2)), IC_FP)
    d1ss = weighted_max(r2, (1, 0), constraint=max(v[1] for v in r2.vertices)).value
    d2s = weighted_max(r2, (0, 1)).value
    ok_r2 = d1ss == 0 and d2s == F(7, 10)
    dt = time.perf_counter() - t0
    report(1, ok_p and ok_fp and ok_r2 and dt < 1,
           f"IC-p {_pts(p)}; IC-fp {_pts(fp)}; (1.2,1.5) fp d1**={d1ss} d2*={d2s}", dt)


def test_c02_toy_example():
    reg = gdof_region(ChannelParams(1, F(3, 2)), IC_FP)
    v = weighted_max(reg, (1, 0), constraint=F(1, 2)).value
    report(2, v == 0, f"max d1 on d2=1/2 is {v}")


def test_c03_extremal_ratio():
    t0 = time.perf_counter()
    alphas, betas = regime12_grid()
    weights = parse_weights([["alpha-1", "1"], ["1", "alpha-1"], ["1", "0"], ["0", "1"], ["1", "1"]])
    scan = ratio_scan(alphas, betas, weights, Topology.IC)
    ok_min = scan.min_ratio is not None and scan.min_ratio >= F(1, 2)
    literal = [fp_to_p_ratio(ChannelParams(a, a - F(1, 10)), (a - 1, 1)) for a in (4, 16, 64)]
    ok_seq = all(x > y for x, y in zip(literal, literal[1:])) and literal[-1] < F(52, 100)
    swapped = [fp_to_p_ratio(ChannelParams(a, a - F(1, 10)), (1, a - 1)) for a in (4, 16, 64)]
    dt = time.perf_counter() - t0
    report(3, ok_min and ok_seq and dt < 30,
           f"grid min {scan.min_ratio} over {len(scan.rows)} rows; w=(alpha-1,1) sequence "
           f"{[str(x) for x in literal]} (w=(1,alpha-1) gives {[str(x) for x in swapped]})", dt)


BOXES = {
    "boxes": [
        {"id": "A1", "source": "T", "level": "5", "height": "1"},
        {"id": "A2", "source": "T", "level": "3", "height": "2"},
        {"id": "A3", "source": "T", "level": "2", "height": "1"},
        {"id": "A4", "source": "T", "level": "0", "height": "2"},
        {"id": "A5", "source": "U", "level": "4", "height": "1"},
        {"id": "A6", "source": "U", "level": "1", "height": "3"},
        {"id": "A7", "source": "U", "level": "0", "height": "1"},
    ],
    "query": [],
}


def test_c04_stacking_fixture():
    expect = {("A1", "A2", "A4", "A5"): True, ("A1", "A5", "A6"): True,
              ("A2", "A3", "A6"): False, ("A4", "A6"): False}
    got = {q: stacking_feasible(problem_from_json(BOXES, list(q))).feasible for q in expect}
    report(4, got == expect, ", ".join(f"{{{','.join(q)}}}={v}" for q, v in got.items()))


def _random_problem(rng):
    boxes = []
    n_t = rng.randint(0, 4)
    for src, n in (("T", n_t), ("U", rng.randint(0, 8 - n_t if n_t < 4 else 4))):
        level = F(0)
        for k in range(n):
            level += F(rng.randint(0, 3), rng.randint(1, 3))
            h = F(rng.randint(1, 4), rng.randint(1, 3))
            boxes.append(Box(f"{src}{k}", src, level, h))
            level += h
    ids = [b.id for b in boxes]
    return StackingProblem(tuple(boxes), tuple(rng.sample(ids, rng.randint(0, len(ids)))))


def test_c05_greedy_vs_oracle():
    t0 = time.perf_counter()
    rng = random.Random(20190101)
    bad = 0
    for _ in range(10**4):
        prob = _random_problem(rng)
        bad += stacking_feasible(prob).feasible != brute_force_feasible(prob)
    dt = time.perf_counter() - t0
    report(5, bad == 0 and dt < 60, f"{bad} disagreements in 10^4 problems", dt)


def test_c06_window_plan():
    plan = sliding_window_plan(2, 3, 0, 0)
    feas = [stacking_feasible(plan.window_problem(k)).feasible for k in range(len(plan.windows))]
    ok = plan.windows == ((1, 2, 3), (2, 3, 4), (3, 4, 1), (4, 1, 2)) and all(feas)
    report(6, ok, f"windows {list(plan.windows)}, feasible {feas}")


def test_c07_subsections():
    ctx = PowerContext(100)
    a = subsection(123456, 2, 4, ctx).value
    b = top(ctx.level_value(987, 3), 2, ctx).value
    recon = all(x == sum(subsection(x, i, i + 1, ctx).value * ctx.pbar(i) for i in range(4))
                for x in range(10**4))
    report(7, a == 34 and b == 98 and recon, f"subsection={a}, top={b}, reconstruction={recon}")


def test_c08_const_lemma():
    t0 = time.perf_counter()
    mc = verify_const_lemma(2, 1, 1, delta=2, trials=10**5, ctx=PowerContext.from_base(32), seed=20190101)
    unit = verify_const_lemma(2, 2, 0, ctx=PowerContext.from_base(10), gains=(1, 1), exhaustive=True)
    ok_unit = set(unit.support) <= set(range(-2, 3))
    dt = time.perf_counter() - t0
    report(8, mc.passed and mc.bound == 462 and ok_unit,
           f"Monte Carlo support {mc.observed_support_size} <= {mc.bound:g}: {mc.passed}; "
           f"unit gains support {unit.support} within -2..2: {ok_unit}", dt)


def test_c09_lattice_r1():
    t0 = time.perf_counter()
    params = ChannelParams(2, F(3, 2))
    try:
        build_scheme(SchemeConfig(params, preset="verbatim"))
        preset = "verbatim"
    except PowerBudgetExceeded:
        preset = "calibrated"
    scheme = build_scheme(SchemeConfig(params, epsilon=0.05, preset=preset))
    total, fails = scheme.noiseless_oracle(1e4)
    rep = simulate(scheme, [1e4, 1e6, 1e8], 10**5)
    rates, bound_ok, leaks = [], True, []
    for e in rep.entries:
        j = e["errors"]["joint"]
        rates.append(j["rate"])
        bound_ok &= j["rate"] <= e["analytic_bound"]["joint"] + 3 * j["half_width"]
        leaks.append(leakage_check(scheme, e["P"]))
    # nonincreasing within the confidence bands
    mono = all(e2["errors"]["joint"]["ci_low"] <= e1["errors"]["joint"]["ci_high"]
               for e1, e2 in zip(rep.entries, rep.entries[1:]))
    dt = time.perf_counter() - t0
    ok = fails == 0 and bound_ok and mono and all(l <= 1.0 for l in leaks) and dt < 300
    report(9, ok, f"preset={preset}; oracle {fails}/{total} failures; joint error {rates}; "
                  f"leakage {[round(l, 4) for l in leaks]}", dt)


def test_c10_jamming():
    r1 = rate_lower_bounds(build_scheme(SchemeConfig(ChannelParams(2, F(3, 2)), csit=CSIT.FINITE_PRECISION)),
                           1e10)
    r2 = rate_lower_bounds(build_scheme(SchemeConfig(ChannelParams(F(6, 5), F(3, 2)),
                                                     csit=CSIT.FINITE_PRECISION)), 1e10)
    ok = (abs(r1.d1 - 0.5) < 0.05 and abs(r1.d2 - 1) < 0.05
          and abs(r2.d1) < 0.05 and abs(r2.d2 - 0.7) < 0.05)
    report(10, ok, f"R1-fp (d1,d2)=({r1.d1:.4f},{r1.d2:.4f}); R2-fp (d1,d2)=({r2.d1:.4f},{r2.d2:.4f})")


def test_c11_zero_forcing():
    scheme = build_scheme(SchemeConfig(ChannelParams(2, F(3, 2)), Topology.BC, CSIT.PERFECT))
    e = simulate(scheme, 1e10, 10**5).entries[0]
    ok = e["residual_power"] < e["residual_limit"] and abs(e["d1"] - 2) < 0.05 and abs(e["d2"] - 1) < 0.05
    report(11, ok, f"residual {e['residual_power']:.3g} < {e['residual_limit']:.3g}; "
                   f"(d1,d2)=({e['d1']:.4f},{e['d2']:.4f})")


def test_c12_converse_substitute():
    grid = [F(k, 4) for k in range(0, 13)]
    bad = 0
    for a, b in itertools.product(grid, grid):
        p = ChannelParams(a, b)
        ic_p, ic_fp = gdof_region(p, IC_P), gdof_region(p, IC_FP)
        bc_p, bc_fp = gdof_region(p, BC_P), gdof_region(p, BC_FP)
        bad += not (ic_fp.is_subset_of(ic_p) and bc_fp.is_subset_of(bc_p)
                    and ic_p.is_subset_of(bc_p) and ic_fp.is_subset_of(bc_fp))
    report(12, bad == 0, "converse not simulable; substitute = criteria 4-6 plus containment "
                         f"(fp in p, IC in BC) on {len(grid) ** 2} grid points, {bad} violations")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
