"""zgdof command line.

Exit codes: 0 success, 1 domain error, 2 usage error. Results go to stdout
(or ``--out``); diagnostics go to stderr. Stdout JSON carries no timestamps,
so repeated runs are byte-identical. Run metadata goes to
``<out>.manifest.json`` when ``--out`` is given.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .detmodel import PowerContext, subsection, top
from .errors import ZgdofError
from .latticesim import (DEFAULT_SEED, SchemeConfig, build_scheme, leakage_check,
                         simulate, verify_const_lemma)
from .latticesim.lattice import LatticeScheme
from .plotdata import COLUMNS, KINDS, emit_plot_data, region_overlay
from .rationals import decimal_str, parse_rational, rational_to_json
from .region import (CSIT, ChannelParams, ScenarioTag, Topology, classify_regime, corner_surface,
                     gdof_region, ratio_scan, region_to_csv, region_to_json, weighted_max)
from .sumset import (brute_force_feasible, problem_from_json, sliding_window_plan, stacking_feasible,
                     sumset_inequality)
from .sweep import parse_grid, parse_weights, regime12_grid, run_sweep


# -- argument types ------------------------------------------------------------

def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _nonneg_rational(text: str) -> Fraction:
    x = _rational(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text}")
    return x


def _real(text: str) -> float:
    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _real_list(text: str) -> list[float]:
    return [_real(t) for t in text.split(",") if t.strip()]


def _grid(text: str) -> list[Fraction]:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


# -- helpers -------------------------------------------------------------------

def _params(ns) -> ChannelParams:
    return ChannelParams(ns.alpha, ns.beta)


def _scenario(ns) -> ScenarioTag:
    return ScenarioTag.parse(ns.topology, ns.csit)


def _json_default(o):
    if isinstance(o, Fraction):
        return rational_to_json(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default, ensure_ascii=False) + "\n"


def _emit(ns, text: str, argv: list[str], seed: int | None = None, inputs: list[str] = ()):
    out = getattr(ns, "out", None)
    if not out:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    h = hashlib.sha256(json.dumps(argv).encode())
    for f in inputs:
        h.update(Path(f).read_bytes())
    manifest = {
        "tool": "zgdof", "version": __version__, "seed": seed, "argv": argv,
        "input_digest": h.hexdigest(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "outputs": [str(path)],
    }
    Path(str(path) + ".manifest.json").write_text(_dump(manifest))


def _add_channel(p, scenario=True):
    p.add_argument("--alpha", type=_nonneg_rational, required=True, help="rational, e.g. 3/2")
    p.add_argument("--beta", type=_nonneg_rational, required=True, help="rational, e.g. 3/2")
    if scenario:
        p.add_argument("--topology", choices=["ic", "bc", "IC", "BC"], default="ic")
        p.add_argument("--csit", choices=["p", "fp"], default="p")


def _add_out(p):
    p.add_argument("--out", help="write the result here instead of stdout (plus a manifest)")


# -- subcommands ---------------------------------------------------------------

def cmd_classify(ns, argv):
    reg = classify_regime(_params(ns), _scenario(ns))
    _emit(ns, _dump({"regime": reg.id.value, "tight": list(reg.tight)}), argv)


def cmd_region(ns, argv):
    reg = gdof_region(_params(ns), _scenario(ns))
    text = region_to_csv(reg) if ns.format == "csv" else _dump(region_to_json(reg))
    _emit(ns, text, argv)


def cmd_weighted_max(ns, argv):
    reg = gdof_region(_params(ns), _scenario(ns))
    res = weighted_max(reg, (ns.w1, ns.w2), ns.d2)
    _emit(ns, _dump({"value": res.value, "value_decimal": decimal_str(res.value),
                     "argmax": list(res.argmax)}), argv)


def cmd_ratio_scan(ns, argv):
    if ns.regime12:
        alphas, betas = regime12_grid()
    else:
        if ns.alpha_grid is None or ns.beta_grid is None:
            raise _UsageError("ratio-scan: give --alpha-grid and --beta-grid, or --regime12")
        alphas, betas = ns.alpha_grid, ns.beta_grid
    weights = parse_weights([w.split(",") for w in ns.weight]) if ns.weight else [lambda p: (1, 0)]
    scan = ratio_scan(alphas, betas, weights, Topology(ns.topology.upper()))
    if ns.table:
        Path(ns.table).write_text(emit_plot_data(scan, "ratio_surface"))
    body = {"points": len(scan.rows), "min_ratio": scan.min_ratio,
            "min_ratio_decimal": None if scan.min_ratio is None else decimal_str(scan.min_ratio),
            "argmin": None if scan.argmin is None else
            dict(zip(("alpha", "beta", "w1", "w2"), scan.argmin))}
    _emit(ns, _dump(body), argv)


def cmd_subsection(ns, argv):
    ctx = PowerContext(Fraction(ns.P))
    if ns.top is not None:
        if ns.cap is None:
            raise _UsageError("subsection: --top needs --cap")
        res = top(ctx.level_value(ns.x, ns.cap), ns.top, ctx)
    else:
        if ns.lam1 is None or ns.lam2 is None:
            raise _UsageError("subsection: give --lam1 and --lam2, or --top with --cap")
        res = subsection(ns.x, ns.lam1, ns.lam2, ctx)
    _emit(ns, _dump({"value": str(res.value), "level_cap": res.level_cap}), argv)


def cmd_stack_check(ns, argv):
    obj = json.loads(Path(ns.file).read_text())
    query = ns.query.split(",") if ns.query is not None else None
    if query == [""]:
        query = []
    prob = problem_from_json(obj, query)
    res = stacking_feasible(prob)
    body = {"feasible": res.feasible, "order": list(res.order) if res.order else None,
            "query": list(prob.query)}
    if ns.brute_force:
        body["brute_force"] = brute_force_feasible(prob)
    _emit(ns, _dump(body), argv, inputs=[ns.file])


def cmd_window_plan(ns, argv):
    plan = sliding_window_plan(ns.p, ns.q, ns.mu, ns.nu)
    ineq = sumset_inequality(plan)
    if ns.format == "text":
        lines = [f"slice_height={plan.slice_height} p~={plan.p_tilde} q~={plan.q_tilde}"]
        lines += ["window " + ",".join(map(str, w)) for w in plan.windows]
        lines.append(ineq.render())
        _emit(ns, "\n".join(lines) + "\n", argv)
    else:
        _emit(ns, _dump({"plan": plan.to_json(), "inequality": ineq.to_json()}), argv)


def _scheme_config(ns) -> SchemeConfig:
    scen = _scenario(ns)
    return SchemeConfig(_params(ns), scen.topology, scen.csit, ns.epsilon, ns.preset)


def cmd_simulate(ns, argv):
    if ns.config:
        cfg = SchemeConfig.from_json(json.loads(Path(ns.config).read_text()))
    else:
        if ns.alpha is None or ns.beta is None:
            raise _UsageError("simulate: give --alpha and --beta, or --config")
        cfg = _scheme_config(ns)
    scheme = build_scheme(cfg)
    rep = simulate(scheme, ns.P, ns.trials, ns.seed, jobs=ns.jobs, noiseless=ns.noiseless)
    text = rep.to_csv() if ns.format == "csv" else _dump(rep.to_json())
    _emit(ns, text, argv, seed=ns.seed, inputs=[ns.config] if ns.config else [])


def cmd_leakage(ns, argv):
    scheme = build_scheme(SchemeConfig(_params(ns), epsilon=ns.epsilon, preset=ns.preset))
    if not isinstance(scheme, LatticeScheme):
        raise ZgdofError("leakage applies to lattice schemes (perfect CSIT, Regimes 1-2)")
    rows = [{"P": P, "leakage_bits": leakage_check(scheme, P),
             "closed_form_bits": scheme.leakage_closed_form(P)} for P in ns.P]
    _emit(ns, _dump({"scheme": {"regime": scheme.regime, "preset": scheme.preset}, "rows": rows}), argv)


def cmd_verify_const(ns, argv):
    ctx = PowerContext.from_base(ns.pbar)
    gains = (1, 1) if ns.unit_gains else None
    rep = verify_const_lemma(ns.lam, ns.mu, ns.nu, ns.delta, ns.trials, ctx, ns.seed, gains, ns.exhaustive)
    _emit(ns, _dump(rep.to_json()), argv, seed=ns.seed)


def cmd_bc_zf(ns, argv):
    scheme = build_scheme(SchemeConfig(_params(ns), Topology.BC, CSIT.PERFECT))
    rep = simulate(scheme, ns.P, ns.trials, ns.seed, jobs=ns.jobs)
    _emit(ns, _dump(rep.to_json()), argv, seed=ns.seed)


def cmd_sweep(ns, argv):
    _emit(ns, _dump(run_sweep(ns.config, jobs=ns.jobs)), argv, inputs=[ns.config])


def cmd_plot(ns, argv):
    if ns.kind == "region":
        if ns.alpha is None or ns.beta is None:
            raise _UsageError("plot --kind region needs --alpha and --beta")
        result = region_overlay(_params(ns), Topology(ns.topology.upper()))
    elif ns.kind == "error_curve":
        if not ns.input:
            raise _UsageError("plot --kind error_curve needs --input (simulate JSON)")
        from .latticesim.simulate import SimReport
        obj = json.loads(Path(ns.input).read_text())
        result = SimReport(obj["scheme"], obj["seed"], obj["trials"], obj["P_values"], obj["entries"])
    else:
        if ns.alpha_grid is None or ns.beta_grid is None:
            raise _UsageError(f"plot --kind {ns.kind} needs --alpha-grid and --beta-grid")
        if ns.kind == "ratio_surface":
            weights = parse_weights([w.split(",") for w in ns.weight]) if ns.weight else [lambda p: (1, 0)]
            result = ratio_scan(ns.alpha_grid, ns.beta_grid, weights)
        else:
            result = corner_surface(ns.alpha_grid, ns.beta_grid)
    _emit(ns, emit_plot_data(result, ns.kind), argv, inputs=[ns.input] if ns.input else [])


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .latticesim.simulate import default_jobs

    p = _Parser(prog="zgdof", description="Secure GDoF regions and achievability tools for Z channels.")
    p.add_argument("--version", action="version", version=f"zgdof {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", help="regime of (alpha, beta)")
    _add_channel(s)
    _add_out(s)
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("region", help="exact secure GDoF region")
    _add_channel(s)
    s.add_argument("--format", choices=["json", "csv"], default="json")
    _add_out(s)
    s.set_defaults(fn=cmd_region)

    s = sub.add_parser("weighted-max", help="max of w1*d1 + w2*d2 over a region")
    _add_channel(s)
    s.add_argument("--w1", type=_nonneg_rational, required=True)
    s.add_argument("--w2", type=_nonneg_rational, required=True)
    s.add_argument("--d2", type=_rational, default=None, help="restrict to the line d2 = value")
    _add_out(s)
    s.set_defaults(fn=cmd_weighted_max)

    s = sub.add_parser("ratio-scan", help="min fp/perfect weighted-sum ratio over a grid")
    s.add_argument("--alpha-grid", type=_grid, help="start:stop:step or a,b,c")
    s.add_argument("--beta-grid", type=_grid)
    s.add_argument("--regime12", action="store_true", help="use the built-in 50x50 Regime 1-2 grid")
    s.add_argument("--weight", action="append",
                   help="w1,w2 where each term is a rational or alpha/beta +- rational (repeatable)")
    s.add_argument("--topology", choices=["ic", "bc", "IC", "BC"], default="ic")
    s.add_argument("--table", help="also write the full table as CSV here")
    _add_out(s)
    s.set_defaults(fn=cmd_ratio_scan)

    s = sub.add_parser("subsection", help="sub-section of an integer at power P")
    s.add_argument("--P", type=_real, required=True)
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--lam1", type=_nonneg_rational)
    s.add_argument("--lam2", type=_nonneg_rational)
    s.add_argument("--top", type=_nonneg_rational, help="top-mu sub-section instead of an interval")
    s.add_argument("--cap", type=_nonneg_rational, help="level cap of x (for --top)")
    _add_out(s)
    s.set_defaults(fn=cmd_subsection)

    s = sub.add_parser("stack-check", help="box-stacking feasibility of a query")
    s.add_argument("--file", required=True, help="StackingProblem JSON")
    s.add_argument("--query", help="comma-separated box ids (overrides the file's query)")
    s.add_argument("--brute-force", action="store_true", help="also run the permutation oracle")
    _add_out(s)
    s.set_defaults(fn=cmd_stack_check)

    s = sub.add_parser("window-plan", help="sliding-window slices and the resulting inequality")
    s.add_argument("--p", type=_rational, required=True)
    s.add_argument("--q", type=_rational, required=True)
    s.add_argument("--mu", type=_nonneg_rational, default=Fraction(0))
    s.add_argument("--nu", type=_nonneg_rational, default=Fraction(0))
    s.add_argument("--format", choices=["json", "text"], default="json")
    _add_out(s)
    s.set_defaults(fn=cmd_window_plan)

    def sim_common(s):
        s.add_argument("--P", type=_real_list, default=[1e4, 1e6, 1e8], help="comma-separated powers")
        s.add_argument("--trials", type=int, default=10**4)
        s.add_argument("--seed", type=int, default=DEFAULT_SEED)
        s.add_argument("--jobs", type=int, default=default_jobs(), help="worker threads (env ZGDOF_JOBS)")

    s = sub.add_parser("simulate", help="Monte Carlo for the achievability scheme of a scenario")
    s.add_argument("--alpha", type=_nonneg_rational)
    s.add_argument("--beta", type=_nonneg_rational)
    s.add_argument("--topology", choices=["ic", "bc", "IC", "BC"], default="ic")
    s.add_argument("--csit", choices=["p", "fp"], default="p")
    s.add_argument("--epsilon", type=_real, default=0.05)
    s.add_argument("--preset", choices=["calibrated", "verbatim"], default="calibrated")
    s.add_argument("--config", help="SchemeConfig JSON (replaces the channel flags)")
    s.add_argument("--noiseless", action="store_true")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    sim_common(s)
    _add_out(s)
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("leakage", help="secrecy leakage of a lattice scheme")
    _add_channel(s, scenario=False)
    s.add_argument("--epsilon", type=_real, default=0.05)
    s.add_argument("--preset", choices=["calibrated", "verbatim"], default="calibrated")
    s.add_argument("--P", type=_real_list, default=[1e4, 1e6, 1e8])
    _add_out(s)
    s.set_defaults(fn=cmd_leakage)

    s = sub.add_parser("verify-const", help="support size of the top-section distortion")
    s.add_argument("--lam", type=_rational, default=Fraction(2))
    s.add_argument("--mu", type=_rational, default=Fraction(1))
    s.add_argument("--nu", type=_nonneg_rational, default=Fraction(1))
    s.add_argument("--delta", type=_real, default=2.0)
    s.add_argument("--pbar", type=int, default=32, help="integer base, P = pbar^2")
    s.add_argument("--trials", type=int, default=10**5)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--unit-gains", action="store_true")
    s.add_argument("--exhaustive", action="store_true", help="enumerate all (T, U); needs --unit-gains")
    _add_out(s)
    s.set_defaults(fn=cmd_verify_const)

    s = sub.add_parser("bc-zf", help="zero-forcing on the broadcast channel")
    _add_channel(s, scenario=False)
    sim_common(s)
    s.set_defaults(P=[1e10])
    _add_out(s)
    s.set_defaults(fn=cmd_bc_zf)

    s = sub.add_parser("sweep", help="resumable grid sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--jobs", type=int, default=default_jobs())
    _add_out(s)
    s.set_defaults(fn=cmd_sweep)

    kinds_help = "; ".join(f"{k}: {v}" for k, v in COLUMNS.items())
    s = sub.add_parser("plot", help="plot-ready CSV tables", description=f"Columns. {kinds_help}")
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--alpha", type=_nonneg_rational)
    s.add_argument("--beta", type=_nonneg_rational)
    s.add_argument("--topology", choices=["ic", "bc", "IC", "BC"], default="ic")
    s.add_argument("--alpha-grid", type=_grid)
    s.add_argument("--beta-grid", type=_grid)
    s.add_argument("--weight", action="append")
    s.add_argument("--input", help="simulate JSON (error_curve)")
    _add_out(s)
    s.set_defaults(fn=cmd_plot)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        ns.fn(ns, argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ZgdofError as exc:
        print(f"zgdof: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"zgdof: input error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"zgdof: invalid value: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
