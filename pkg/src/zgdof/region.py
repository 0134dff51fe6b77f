"""Exact secure GDoF regions of the Z interference / broadcast channel.

Everything in this module is rational arithmetic on :class:`fractions.Fraction`.
Regime boundaries sit on lines such as ``beta == 1`` and ``alpha == beta - 1``;
a float would put boundary points on the wrong side.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .errors import EmptyIntersection, UndefinedRatio
from .rationals import decimal_str, pos, rational_from_json, rational_to_json

ZERO = Fraction(0)
ONE = Fraction(1)


class Topology(enum.Enum):
    IC = "IC"
    BC = "BC"


class CSIT(enum.Enum):
    PERFECT = "p"
    FINITE_PRECISION = "fp"


class Regime(enum.Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    BC_DEGENERATE = "BCdeg"


@dataclass(frozen=True)
class ChannelParams:
    """Channel-strength exponents; the Tx2->Rx2 exponent is normalised to 1."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(f"alpha and beta must be nonnegative, got {self.alpha}, {self.beta}")

    @property
    def mu(self) -> Fraction:
        return self.beta - self.alpha

    @property
    def mu_bar(self) -> Fraction:
        return pos(self.beta - self.alpha)

    @property
    def mu_under(self) -> Fraction:
        return pos(self.alpha - self.beta)


@dataclass(frozen=True)
class ScenarioTag:
    topology: Topology
    csit: CSIT

    @classmethod
    def parse(cls, topology: str, csit: str) -> "ScenarioTag":
        topo = Topology(topology.upper())
        c = csit.lower()
        c = {"perfect": "p", "finite": "fp", "fp": "fp", "p": "p"}.get(c, c)
        return cls(topo, CSIT(c))


IC_P = ScenarioTag(Topology.IC, CSIT.PERFECT)
IC_FP = ScenarioTag(Topology.IC, CSIT.FINITE_PRECISION)
BC_P = ScenarioTag(Topology.BC, CSIT.PERFECT)
BC_FP = ScenarioTag(Topology.BC, CSIT.FINITE_PRECISION)


@dataclass(frozen=True)
class RegimeId:
    id: Regime
    # boundary equalities that hold exactly at the classified point
    tight: tuple[str, ...] = ()


@dataclass(frozen=True)
class HalfSpace:
    """``a1*d1 + a2*d2 <= b``."""

    a1: Fraction
    a2: Fraction
    b: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "b"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def slack(self, d1: Fraction, d2: Fraction) -> Fraction:
        return self.b - self.a1 * d1 - self.a2 * d2

    def contains(self, point: tuple[Fraction, Fraction]) -> bool:
        return self.slack(*point) >= 0


Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class GdofRegion:
    params: ChannelParams
    scenario: ScenarioTag
    regime: RegimeId
    halfspaces: tuple[HalfSpace, ...]
    vertices: tuple[Point, ...] = field(default=())

    def contains(self, point: Point) -> bool:
        return all(h.contains(point) for h in self.halfspaces)

    def is_subset_of(self, other: "GdofRegion") -> bool:
        # convex polygons: vertex containment suffices
        return all(other.contains(v) for v in self.vertices)


@dataclass(frozen=True)
class WeightVector:
    w1: Fraction
    w2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "w1", Fraction(self.w1))
        object.__setattr__(self, "w2", Fraction(self.w2))
        if self.w1 < 0 or self.w2 < 0 or self.w1 + self.w2 <= 0:
            raise ValueError(f"weights must be nonnegative and not both zero: ({self.w1}, {self.w2})")


@dataclass(frozen=True)
class WeightedMax:
    value: Fraction
    argmax: Point


# ---------------------------------------------------------------------------
# regimes and regions
# ---------------------------------------------------------------------------

def _tight(params: ChannelParams) -> tuple[str, ...]:
    a, b = params.alpha, params.beta
    checks = [
        ("beta=1", b == 1),
        ("alpha=beta", a == b),
        ("alpha=beta-1", a == b - 1),
        ("alpha=0", a == 0),
        ("beta=0", b == 0),
    ]
    return tuple(name for name, hit in checks if hit)


def _ic_regime(params: ChannelParams) -> Regime:
    a, b = params.alpha, params.beta
    if b <= 1:
        return Regime.R4
    if a > b:
        return Regime.R1
    if a > b - 1:
        return Regime.R2
    return Regime.R3


def classify_regime(params: ChannelParams, scenario: ScenarioTag) -> RegimeId:
    """Regime cell of ``(alpha, beta)``.

    R2 includes ``alpha == beta``, R3 includes ``alpha == beta - 1`` and R4
    includes ``beta == 1``. Under finite precision CSIT the broadcast channel
    collapses R3 into its own degenerate case.
    """
    reg = _ic_regime(params)
    if (scenario.topology is Topology.BC and scenario.csit is CSIT.FINITE_PRECISION
            and reg is Regime.R3):
        reg = Regime.BC_DEGENERATE
    return RegimeId(reg, _tight(params))


def _theorem_halfspaces(params: ChannelParams, scenario: ScenarioTag, regime: Regime) -> list[HalfSpace]:
    a, b = params.alpha, params.beta
    if scenario.topology is Topology.BC and scenario.csit is CSIT.PERFECT:
        return [
            HalfSpace(1, 0, max(a, b - 1)),
            HalfSpace(0, 1, pos(1 - pos(b - a))),
        ]
    if scenario.csit is CSIT.PERFECT:
        return [
            HalfSpace(1, 0, a),
            HalfSpace(0, 1, min(ONE, pos(1 + a - b))),
            HalfSpace(1, 1, a + pos(1 - b)),
        ]
    if regime is Regime.BC_DEGENERATE:
        return [HalfSpace(1, 0, b - 1), HalfSpace(0, 1, 0)]
    if regime is Regime.R1:
        return [HalfSpace(0, 1, 1), HalfSpace(1, b, a)]
    if regime is Regime.R2:
        return [HalfSpace(1 / a, 1 / (1 + a - b), 1)]
    if regime is Regime.R3:
        return [HalfSpace(1, 0, a), HalfSpace(0, 1, 0)]
    return [
        HalfSpace(1, 0, a),
        HalfSpace(0, 1, 1),
        HalfSpace(1, 1, 1 + a - b),
    ]


_NONNEG = (HalfSpace(-1, 0, 0), HalfSpace(0, -1, 0))


def gdof_region(params: ChannelParams, scenario: ScenarioTag) -> GdofRegion:
    regime = classify_regime(params, scenario)
    hs = tuple(_theorem_halfspaces(params, scenario, regime.id)) + _NONNEG
    return GdofRegion(params, scenario, regime, hs, tuple(enumerate_vertices(hs)))


def _cross(o: Point, p: Point, q: Point) -> Fraction:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def enumerate_vertices(halfspaces: Sequence[HalfSpace]) -> list[Point]:
    """Vertices of a bounded 2-D polytope, counterclockwise from the
    lexicographically smallest ``(d1 + d2, d2)`` vertex.

    Segments come back as their two endpoints and a point as itself.
    """
    cand: set[Point] = set()
    hs = list(halfspaces)
    for i in range(len(hs)):
        for j in range(i + 1, len(hs)):
            h, g = hs[i], hs[j]
            det = h.a1 * g.a2 - h.a2 * g.a1
            if det == 0:
                continue
            x = (h.b * g.a2 - h.a2 * g.b) / det
            y = (h.a1 * g.b - h.b * g.a1) / det
            if all(k.slack(x, y) >= 0 for k in hs):
                cand.add((x, y))
    pts = sorted(cand)
    if len(pts) <= 1:
        return pts
    # collinear case: keep the two extremes
    p0 = pts[0]
    if all(_cross(p0, pts[-1], p) == 0 for p in pts):
        return [pts[0], pts[-1]] if (pts[0][0] + pts[0][1], pts[0][1]) <= (pts[-1][0] + pts[-1][1], pts[-1][1]) \
            else [pts[-1], pts[0]]
    hull = _convex_hull(pts)
    start = min(range(len(hull)), key=lambda k: (hull[k][0] + hull[k][1], hull[k][1]))
    return hull[start:] + hull[:start]


def _convex_hull(pts: list[Point]) -> list[Point]:
    # Andrew's monotone chain, strict turns only, so collinear points are dropped
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------

def _as_weights(w) -> WeightVector:
    if isinstance(w, WeightVector):
        return w
    return WeightVector(*w)


def weighted_max(region: GdofRegion, w, constraint: Fraction | None = None) -> WeightedMax:
    """Exact maximum of ``w1*d1 + w2*d2`` over the region.

    With ``constraint`` the region is first cut by the line ``d2 == constraint``.
    Ties are broken toward the larger ``d1``.
    """
    w = _as_weights(w)
    if constraint is None:
        best = None
        for v in region.vertices:
            key = (w.w1 * v[0] + w.w2 * v[1], v[0])
            if best is None or key > best[0]:
                best = (key, v)
        if best is None:
            raise EmptyIntersection("region has no vertices")
        return WeightedMax(best[0][0], best[1])

    c = Fraction(constraint)
    lo, hi = None, None
    for h in region.halfspaces:
        rhs = h.b - h.a2 * c
        if h.a1 > 0:
            bound = rhs / h.a1
            hi = bound if hi is None else min(hi, bound)
        elif h.a1 < 0:
            bound = rhs / h.a1
            lo = bound if lo is None else max(lo, bound)
        elif rhs < 0:
            raise EmptyIntersection(f"line d2 = {c} misses the region")
    if lo is None or hi is None or lo > hi:
        raise EmptyIntersection(f"line d2 = {c} misses the region")
    # w1 >= 0, so the right end of the slice always wins (and wins ties)
    return WeightedMax(w.w1 * hi + w.w2 * c, (hi, c))


def fp_to_p_ratio(params: ChannelParams, w, topology: Topology = Topology.IC) -> Fraction:
    d_fp = weighted_max(gdof_region(params, ScenarioTag(topology, CSIT.FINITE_PRECISION)), w).value
    d_p = weighted_max(gdof_region(params, ScenarioTag(topology, CSIT.PERFECT)), w).value
    if d_p == 0:
        raise UndefinedRatio(f"perfect-CSIT maximum is zero for {params} and {w}")
    return d_fp / d_p


WeightSpec = Union[WeightVector, tuple, Callable[[ChannelParams], object]]


@dataclass
class RatioScan:
    min_ratio: Fraction | None
    argmin: tuple | None
    rows: list[dict]


def ratio_scan(alpha_grid: Iterable, beta_grid: Iterable, weight_grid: Sequence[WeightSpec],
               topology: Topology = Topology.IC) -> RatioScan:
    """Exhaustive exact evaluation of the fp/perfect weighted-sum ratio.

    Weight entries may be callables of the channel parameters, e.g.
    ``lambda p: (p.alpha - 1, 1)``. Points with a zero perfect-CSIT maximum
    are skipped.
    """
    rows: list[dict] = []
    best = None
    betas = [Fraction(b) for b in beta_grid]
    for a in alpha_grid:
        for b in betas:
            params = ChannelParams(Fraction(a), b)
            reg_fp = gdof_region(params, ScenarioTag(topology, CSIT.FINITE_PRECISION))
            reg_p = gdof_region(params, ScenarioTag(topology, CSIT.PERFECT))
            for spec in weight_grid:
                raw = spec(params) if callable(spec) else spec
                try:
                    w = _as_weights(raw)
                except ValueError:
                    continue
                d_p = weighted_max(reg_p, w).value
                if d_p == 0:
                    continue
                d_fp = weighted_max(reg_fp, w).value
                ratio = d_fp / d_p
                rows.append({
                    "alpha": params.alpha, "beta": params.beta, "w1": w.w1, "w2": w.w2,
                    "regime": reg_fp.regime.id.value, "d_fp": d_fp, "d_p": d_p, "ratio": ratio,
                })
                if best is None or ratio < best[0]:
                    best = (ratio, (params.alpha, params.beta, w.w1, w.w2))
    if best is None:
        return RatioScan(None, None, rows)
    return RatioScan(best[0], best[1], rows)


def corner_point(params: ChannelParams, scenario: ScenarioTag) -> Point:
    """``(d1**, d2*)``: the largest d2, then the largest d1 given that d2."""
    region = gdof_region(params, scenario)
    d2_star = weighted_max(region, (0, 1)).value
    d1_ss = weighted_max(region, (1, 0), constraint=d2_star).value
    return d1_ss, d2_star


def corner_surface(alpha_grid: Iterable, beta_grid: Iterable) -> list[dict]:
    """d1** under both CSIT models over a grid (IC topology)."""
    rows = []
    betas = [Fraction(b) for b in beta_grid]
    for a in alpha_grid:
        for b in betas:
            params = ChannelParams(Fraction(a), b)
            d1p, d2p = corner_point(params, IC_P)
            d1f, d2f = corner_point(params, IC_FP)
            rows.append({
                "alpha": params.alpha, "beta": params.beta,
                "regime": classify_regime(params, IC_FP).id.value,
                "d1ss_p": d1p, "d2s_p": d2p, "d1ss_fp": d1f, "d2s_fp": d2f,
            })
    return rows


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def region_to_json(region: GdofRegion) -> dict:
    return {
        "alpha": rational_to_json(region.params.alpha),
        "beta": rational_to_json(region.params.beta),
        "topology": region.scenario.topology.value,
        "csit": region.scenario.csit.value,
        "regime": region.regime.id.value,
        "halfspaces": [
            {"a": [rational_to_json(h.a1), rational_to_json(h.a2)], "b": rational_to_json(h.b)}
            for h in region.halfspaces
        ],
        "vertices": [[rational_to_json(x), rational_to_json(y)] for x, y in region.vertices],
    }


def region_from_json(obj: dict) -> GdofRegion:
    params = ChannelParams(rational_from_json(obj["alpha"]), rational_from_json(obj["beta"]))
    scenario = ScenarioTag(Topology(obj["topology"]), CSIT(obj["csit"]))
    hs = tuple(
        HalfSpace(rational_from_json(h["a"][0]), rational_from_json(h["a"][1]), rational_from_json(h["b"]))
        for h in obj["halfspaces"]
    )
    verts = tuple((rational_from_json(x), rational_from_json(y)) for x, y in obj["vertices"])
    regime = RegimeId(Regime(obj["regime"]), _tight(params))
    return GdofRegion(params, scenario, regime, hs, verts)


def region_to_csv(region: GdofRegion) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "d1", "d2", "d1_num", "d1_den", "d2_num", "d2_den"])
    for k, (x, y) in enumerate(region.vertices):
        writer.writerow([k, decimal_str(x), decimal_str(y), x.numerator, x.denominator,
                         y.numerator, y.denominator])
    return buf.getvalue()
