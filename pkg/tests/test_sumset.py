import json
import random
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zgdof.detmodel import PowerContext
from zgdof.errors import DomainError, RatioOutOfRange, StateSpaceTooLarge, TooManyBoxes, UnknownBoxId
from zgdof.sumset import (Box, StackingProblem, brute_force_feasible, empirical_entropy_check,
                          problem_from_json, problem_to_json, sliding_window_plan, stacking_feasible,
                          sumset_inequality)

BOXES = problem_from_json(json.loads((Path(__file__).parent / "fixtures" / "seven_boxes.json").read_text()))


def q(*ids):
    return BOXES.with_query(ids)


@pytest.mark.parametrize("ids, expect", [
    (("A1", "A2", "A4", "A5"), True),
    (("A1", "A5", "A6"), True),
    (("A2", "A3", "A6"), False),
    (("A4", "A6"), False),
    (("A7",), True),
    ((), True),
])
def test_seven_boxes(ids, expect):
    res = stacking_feasible(q(*ids))
    assert res.feasible is expect
    assert brute_force_feasible(q(*ids)) is expect


def test_seven_boxes_order():
    assert stacking_feasible(q("A1", "A2", "A4", "A5")).order == ("A4", "A2", "A5", "A1")


def test_problem_validation():
    with pytest.raises(UnknownBoxId):
        q("A9")
    with pytest.raises(DomainError):
        Box("x", "T", 0, 0)
    with pytest.raises(DomainError):
        StackingProblem((Box("a", "T", 0, 2), Box("b", "T", 1, 1)), ())
    with pytest.raises(DomainError):
        q("A1", "A1")


def test_brute_force_guard():
    boxes = tuple(Box(f"b{i}", "T", i, 1) for i in range(11))
    with pytest.raises(TooManyBoxes):
        brute_force_feasible(StackingProblem(boxes, tuple(b.id for b in boxes)))


def test_json_round_trip():
    assert problem_from_json(problem_to_json(q("A1", "A4"))) == q("A1", "A4")


def _random_problem(rng: random.Random) -> StackingProblem:
    boxes = []
    for src in ("T", "U"):
        level = F(0)
        for k in range(rng.randint(0, 4)):
            level += F(rng.randint(0, 3), rng.randint(1, 3))
            h = F(rng.randint(1, 4), rng.randint(1, 3))
            boxes.append(Box(f"{src}{k}", src, level, h))
            level += h
    ids = [b.id for b in boxes]
    query = rng.sample(ids, rng.randint(0, len(ids)))
    return StackingProblem(tuple(boxes), tuple(query))


def test_greedy_matches_oracle_random():
    rng = random.Random(11)
    for _ in range(2000):
        prob = _random_problem(rng)
        assert stacking_feasible(prob).feasible == brute_force_feasible(prob)


def test_subset_monotone_and_relabel_invariant():
    rng = random.Random(3)
    for _ in range(300):
        prob = _random_problem(rng)
        if not stacking_feasible(prob).feasible:
            continue
        for k in range(len(prob.query)):
            sub = prob.with_query(prob.query[:k] + prob.query[k + 1:])
            assert stacking_feasible(sub).feasible
        perm = {b.id: f"z{i}" for i, b in enumerate(reversed(prob.boxes))}
        relabeled = StackingProblem(tuple(Box(perm[b.id], b.source, b.level, b.height) for b in prob.boxes),
                                    tuple(perm[i] for i in prob.query))
        assert stacking_feasible(relabeled).feasible


def test_window_plan_examples():
    plan = sliding_window_plan(2, 3)
    assert (plan.slice_height, plan.p_tilde, plan.q_tilde) == (1, 2, 3)
    assert plan.windows == ((1, 2, 3), (2, 3, 4), (3, 4, 1), (4, 1, 2))
    one = sliding_window_plan(1, 1)
    assert one.windows == ((1,), (2,))
    frac = sliding_window_plan(F(3, 2), F(5, 2))
    assert (frac.slice_height, frac.p_tilde, frac.q_tilde, len(frac.windows)) == (F(1, 2), 3, 5, 6)
    assert all(len(w) == 5 for w in frac.windows)


def test_window_plan_errors():
    for p, qq in ((1, 3), (3, 2), (0, 1)):
        with pytest.raises(RatioOutOfRange):
            sliding_window_plan(p, qq)
    with pytest.raises(RatioOutOfRange):
        sliding_window_plan(1, 1, -1, 0)


@settings(max_examples=1000, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.fractions(F(1, 4), 4, max_denominator=4),
       st.fractions(0, 3, max_denominator=4), st.fractions(0, 3, max_denominator=4))
def test_every_window_stacks(a, b, scale, mu, nu):
    p, qq = min(a, b), max(a, b)
    if 2 * p < qq:
        return
    plan = sliding_window_plan(p * scale, qq * scale, mu, nu)
    for k in range(len(plan.windows)):
        assert stacking_feasible(plan.window_problem(k)).feasible


def test_inequality_text():
    assert sumset_inequality(sliding_window_plan(2, 3)).render() == \
        "4·H(V|W) ≥ 3·H(T^{(2)}, U^{(2)} | W) + n·o(log P̄)"
    assert sumset_inequality(sliding_window_plan(1, 1)).render() == \
        "2·H(V|W) ≥ H(T^{(1)}, U^{(1)} | W) + n·o(log P̄)"
    ineq = sumset_inequality(sliding_window_plan(2, 3, 1, 0))
    assert ineq.conditioning == ("W", "T^{(1)}")
    assert ineq.rhs_terms == ("T^{(3)}", "U^{(2)}")


def test_entropy_independent_trend():
    gaps = [empirical_entropy_check(sliding_window_plan(1, 1), PowerContext.from_base(b)).gap_bits
            for b in (8, 16, 32)]
    assert all(g >= 0 for g in gaps)
    assert gaps == sorted(gaps)


def test_entropy_aligned_and_zero():
    rep = empirical_entropy_check(sliding_window_plan(2, 3), PowerContext.from_base(8), "aligned")
    assert rep.gap_bits >= 0
    zero = empirical_entropy_check(sliding_window_plan(2, 3), PowerContext.from_base(8), "zero")
    assert zero.lhs_bits == 0 and zero.rhs_bits == 0


def test_entropy_sampling_mode_close_to_exact():
    plan = sliding_window_plan(1, 1)
    ctx = PowerContext.from_base(8)
    exact = empirical_entropy_check(plan, ctx)
    est = empirical_entropy_check(plan, ctx, exact=False, trials=200000)
    assert abs(est.lhs_bits - exact.lhs_bits) < 0.1


def test_entropy_state_guard():
    with pytest.raises(StateSpaceTooLarge):
        empirical_entropy_check(sliding_window_plan(2, 3), PowerContext.from_base(32))
