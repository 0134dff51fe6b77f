"""Box stacking, circular sliding windows and a small entropy harness for the
sum-set inequality ``2p H(V|.) >= q H(T^(p+mu), U^(p+nu)|.)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import entropy

from .detmodel import GainEnsemble, PowerContext, floor_mul, sample_gains
from .errors import (DomainError, RatioOutOfRange, StateSpaceTooLarge, TooManyBoxes,
                     UnknownBoxId, ZgdofError)
from .rationals import fmt, rational_from_json, rational_to_json

BRUTE_FORCE_LIMIT = 10
EXACT_STATE_LIMIT = 10**6


@dataclass(frozen=True)
class Box:
    id: str
    source: str
    level: Fraction
    height: Fraction

    def __post_init__(self):
        object.__setattr__(self, "level", Fraction(self.level))
        object.__setattr__(self, "height", Fraction(self.height))
        if self.source not in ("T", "U"):
            raise DomainError(f"box {self.id}: source must be T or U, got {self.source!r}")
        if self.level < 0:
            raise DomainError(f"box {self.id}: negative level {self.level}")
        if self.height <= 0:
            # zero-height sub-sections are treated as absent, not as boxes
            raise DomainError(f"box {self.id}: height must be positive, got {self.height}")


@dataclass(frozen=True)
class StackingProblem:
    boxes: tuple[Box, ...]
    query: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(self.boxes))
        object.__setattr__(self, "query", tuple(self.query))
        ids = [b.id for b in self.boxes]
        if len(set(ids)) != len(ids):
            raise DomainError("duplicate box ids")
        for src in ("T", "U"):
            spans = sorted((b.level, b.level + b.height, b.id) for b in self.boxes if b.source == src)
            for (l0, h0, i0), (l1, _, i1) in zip(spans, spans[1:]):
                if l1 < h0:
                    raise DomainError(f"boxes {i0} and {i1} of {src} overlap")
        if len(set(self.query)) != len(self.query):
            raise DomainError("query ids must be distinct")
        known = set(ids)
        for q in self.query:
            if q not in known:
                raise UnknownBoxId(q)

    def queried(self) -> list[Box]:
        by_id = {b.id: b for b in self.boxes}
        return [by_id[q] for q in self.query]

    def with_query(self, query: Iterable[str]) -> "StackingProblem":
        return StackingProblem(self.boxes, tuple(query))


@dataclass(frozen=True)
class StackResult:
    feasible: bool
    order: tuple[str, ...] | None


def _stacks(boxes: Sequence[Box]) -> bool:
    filled = Fraction(0)
    for b in boxes:
        if b.level < filled:
            return False
        filled += b.height
    return True


def stacking_feasible(problem: StackingProblem) -> StackResult:
    """Greedy stacking by ``level + height`` (the box's top), ties by level then id.

    A box may sit no higher than its level, i.e. it must be finished by
    ``level + height``; stacking is single-machine scheduling with
    deadlines, where earliest-deadline-first is optimal. Sorting by level
    alone is not: a tall low box can need short boxes underneath it.
    """
    order = sorted(problem.queried(), key=lambda b: (b.level + b.height, b.level, b.id))
    if _stacks(order):
        return StackResult(True, tuple(b.id for b in order))
    return StackResult(False, None)


def brute_force_feasible(problem: StackingProblem) -> bool:
    boxes = problem.queried()
    if len(boxes) > BRUTE_FORCE_LIMIT:
        raise TooManyBoxes(f"{len(boxes)} boxes exceeds the brute-force limit of {BRUTE_FORCE_LIMIT}")
    return any(_stacks(perm) for perm in itertools.permutations(boxes))


def problem_to_json(problem: StackingProblem) -> dict:
    return {
        "boxes": [
            {"id": b.id, "source": b.source, "level": rational_to_json(b.level),
             "height": rational_to_json(b.height)}
            for b in problem.boxes
        ],
        "query": list(problem.query),
    }


def problem_from_json(obj: dict, query: Iterable[str] | None = None) -> StackingProblem:
    boxes = tuple(
        Box(str(b["id"]), b["source"], rational_from_json(b["level"]), rational_from_json(b["height"]))
        for b in obj["boxes"]
    )
    return StackingProblem(boxes, tuple(obj.get("query", ())) if query is None else tuple(query))


# ---------------------------------------------------------------------------
# sliding windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowPlan:
    p: Fraction
    q: Fraction
    mu: Fraction
    nu: Fraction
    slice_height: Fraction
    p_tilde: int
    q_tilde: int
    boxes: tuple[Box, ...]
    windows: tuple[tuple[int, ...], ...]

    def window_problem(self, k: int) -> StackingProblem:
        return StackingProblem(self.boxes, tuple(f"A{i}" for i in self.windows[k]))

    def to_json(self) -> dict:
        return {
            "p": rational_to_json(self.p), "q": rational_to_json(self.q),
            "mu": rational_to_json(self.mu), "nu": rational_to_json(self.nu),
            "slice_height": rational_to_json(self.slice_height),
            "p_tilde": self.p_tilde, "q_tilde": self.q_tilde,
            "boxes": problem_to_json(StackingProblem(self.boxes, ()))["boxes"],
            "windows": [list(w) for w in self.windows],
        }


def sliding_window_plan(p, q, mu=0, nu=0) -> WindowPlan:
    """Slices and circular windows behind the sum-set inequality.

    Levels are measured inside the part of T (resp. U) left after its top-mu
    (resp. top-nu) has been set aside, so each remaining signal has height q.
    """
    p, q, mu, nu = (Fraction(v) for v in (p, q, mu, nu))
    if p <= 0 or q <= 0:
        raise RatioOutOfRange(f"p and q must be positive, got {p}, {q}")
    if mu < 0 or nu < 0:
        raise RatioOutOfRange(f"mu and nu must be nonnegative, got {mu}, {nu}")
    r = p / q
    if not Fraction(1, 2) <= r <= 1:
        raise RatioOutOfRange(f"p/q = {r} outside [1/2, 1]")
    pt, qt = r.numerator, r.denominator
    ell = p / pt
    boxes = []
    for i in range(1, pt + 1):
        boxes.append(Box(f"A{i}", "T", q - i * ell, ell))
    for i in range(1, pt + 1):
        boxes.append(Box(f"A{pt + i}", "U", q - i * ell, ell))
    n = 2 * pt
    windows = tuple(tuple((i + k) % n + 1 for k in range(qt)) for i in range(n))
    plan = WindowPlan(p, q, mu, nu, ell, pt, qt, tuple(boxes), windows)
    for k in range(n):
        if not stacking_feasible(plan.window_problem(k)).feasible:
            raise ZgdofError(f"window {windows[k]} does not stack; slice construction is broken")
    return plan


@dataclass(frozen=True)
class InequalityStatement:
    lhs_coeff: Fraction
    rhs_coeff: Fraction
    conditioning: tuple[str, ...]
    rhs_terms: tuple[str, ...]

    def render(self) -> str:
        cond = ", ".join(self.conditioning)
        return (f"{_coeff(self.lhs_coeff)}H(V|{cond}) ≥ "
                f"{_coeff(self.rhs_coeff)}H({', '.join(self.rhs_terms)} | {cond}) + n·o(log P̄)")

    def to_json(self) -> dict:
        return {
            "lhs_coeff": rational_to_json(self.lhs_coeff),
            "rhs_coeff": rational_to_json(self.rhs_coeff),
            "conditioning": list(self.conditioning),
            "rhs_terms": list(self.rhs_terms),
            "text": self.render(),
        }


def _coeff(c: Fraction) -> str:
    return "" if c == 1 else f"{fmt(c)}·"


def sumset_inequality(plan: WindowPlan) -> InequalityStatement:
    cond = ["W"]
    if plan.mu > 0:
        cond.append(f"T^{{({fmt(plan.mu)})}}")
    if plan.nu > 0:
        cond.append(f"U^{{({fmt(plan.nu)})}}")
    rhs = (f"T^{{({fmt(plan.p + plan.mu)})}}", f"U^{{({fmt(plan.p + plan.nu)})}}")
    return InequalityStatement(2 * plan.p, plan.q, tuple(cond), rhs)


# ---------------------------------------------------------------------------
# entropy harness
# ---------------------------------------------------------------------------

@dataclass
class EntropyReport:
    lhs_bits: float
    rhs_bits: float
    gap_bits: float
    normalized_gap: float
    slack_constant: float
    gain_draws: int
    per_draw: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in
                ("lhs_bits", "rhs_bits", "gap_bits", "normalized_gap", "slack_constant", "gain_draws")}


def _joint_entropy(*cols: np.ndarray, weights: np.ndarray | None = None) -> float:
    stacked = np.stack(cols, axis=1)
    _, inv = np.unique(stacked, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    mass = np.bincount(inv, weights=weights)
    return float(entropy(mass, base=2))


def empirical_entropy_check(plan: WindowPlan, ctx: PowerContext, inputs: str = "independent",
                            ensemble: GainEnsemble | None = None, gain_draws: int = 8,
                            exact: bool = True, trials: int = 10**5, seed: int = 0) -> EntropyReport:
    """Evaluate both sides of the sum-set inequality for one symbol.

    Entropies are conditional on the gains: each gain draw gives exact (or
    plug-in) entropies and the results are averaged. ``inputs`` is
    ``"independent"`` (uniform T, U), ``"aligned"`` (T = U) or ``"zero"``.
    """
    if inputs not in ("independent", "aligned", "zero"):
        raise DomainError(f"unknown input distribution {inputs!r}")
    ensemble = ensemble or GainEnsemble(seed=seed)
    nt = ctx.pbar(plan.q + plan.mu)
    nu_ = ctx.pbar(plan.q + plan.nu)
    if exact and nt * nu_ > EXACT_STATE_LIMIT:
        raise StateSpaceTooLarge(f"{nt}x{nu_} joint states exceeds {EXACT_STATE_LIMIT}")

    if exact:
        if inputs == "independent":
            T, U = (a.reshape(-1) for a in np.meshgrid(np.arange(nt), np.arange(nu_), indexing="ij"))
        elif inputs == "aligned":
            T = U = np.arange(min(nt, nu_))
        else:
            T = U = np.zeros(1, dtype=np.int64)
    else:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(1,))))
        if inputs == "independent":
            T, U = rng.integers(0, nt, size=trials), rng.integers(0, nu_, size=trials)
        elif inputs == "aligned":
            T = rng.integers(0, min(nt, nu_), size=trials)
            U = T
        else:
            T = U = np.zeros(trials, dtype=np.int64)

    def cut(x, lo, hi):
        return (x % ctx.pbar(hi)) // ctx.pbar(lo) if hi > 0 else np.zeros_like(x)

    capT, capU = plan.q + plan.mu, plan.q + plan.nu
    topT = cut(T, capT - plan.mu, capT)
    topU = cut(U, capU - plan.nu, capU)
    rT = cut(T, capT - (plan.p + plan.mu), capT)
    rU = cut(U, capU - (plan.p + plan.nu), capU)
    h_cond = _joint_entropy(topT, topU)
    h_rhs = _joint_entropy(rT, rU) - h_cond

    gains = sample_gains(ensemble, 2 * gain_draws, stream=0).reshape(gain_draws, 2)
    per = []
    for g1, g2 in gains:
        f1 = np.array([floor_mul(g1, v) for v in range(nt)], dtype=np.int64)
        f2 = np.array([floor_mul(g2, v) for v in range(nu_)], dtype=np.int64)
        V = f1[T] + f2[U]
        h_lhs = _joint_entropy(V, topT, topU) - h_cond
        per.append((float(2 * plan.p) * h_lhs, float(plan.q) * h_rhs))
    lhs = float(np.mean([a for a, _ in per]))
    rhs = float(np.mean([b for _, b in per]))
    gap = lhs - rhs
    return EntropyReport(lhs, rhs, gap, gap / ctx.log2_pbar, max(0.0, -gap), gain_draws, per)
