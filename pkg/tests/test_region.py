from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zgdof.errors import EmptyIntersection, UndefinedRatio
from zgdof.region import (BC_FP, BC_P, IC_FP, IC_P, ChannelParams, GdofRegion, HalfSpace, Regime,
                          WeightVector, classify_regime, corner_point, corner_surface, enumerate_vertices,
                          fp_to_p_ratio, gdof_region, ratio_scan, region_from_json, region_to_csv,
                          region_to_json, weighted_max)

SCENARIOS = (IC_P, IC_FP, BC_P, BC_FP)
rat = st.fractions(min_value=0, max_value=4, max_denominator=12)


def clip_polygon(halfspaces, big=F(100)):
    """Independent oracle: Sutherland-Hodgman clipping of a large box."""
    poly = [(-big, -big), (big, -big), (big, big), (-big, big)]
    for h in halfspaces:
        out = []
        n = len(poly)
        for i in range(n):
            p, q = poly[i], poly[(i + 1) % n]
            sp, sq = h.slack(*p), h.slack(*q)
            if sp >= 0:
                out.append(p)
            if (sp >= 0) != (sq >= 0) and sp != 0 and sq != 0:
                t = sp / (sp - sq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        poly = out
        if not poly:
            break
    return poly


def extreme_points(poly):
    pts = sorted(set(poly))
    if len(pts) <= 2:
        return set(pts)
    keep = set()
    n = len(poly)
    for i in range(n):
        a, b, c = poly[i - 1], poly[i], poly[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross != 0:
            keep.add(b)
    if not keep:  # all collinear
        return {pts[0], pts[-1]}
    return keep


# -- worked examples --------------------------------------------------------

def test_classify_examples():
    assert classify_regime(ChannelParams(2, F(3, 2)), IC_FP).id is Regime.R1
    assert classify_regime(ChannelParams(1, 1), IC_FP).id is Regime.R4
    assert classify_regime(ChannelParams(F(3, 10), F(3, 2)), BC_FP).id is Regime.BC_DEGENERATE


def test_boundaries():
    assert classify_regime(ChannelParams(F(3, 2), F(3, 2)), IC_FP).id is Regime.R2
    r = classify_regime(ChannelParams(F(1, 2), F(3, 2)), IC_FP)
    assert r.id is Regime.R3 and "alpha=beta-1" in r.tight
    assert classify_regime(ChannelParams(3, 1), IC_FP).id is Regime.R4
    assert classify_regime(ChannelParams(F(1, 2), F(3, 2)), BC_P).id is Regime.R3


def test_region_vertices_examples():
    p = ChannelParams(2, F(3, 2))
    assert gdof_region(p, IC_P).vertices == ((0, 0), (2, 0), (1, 1), (0, 1))
    assert gdof_region(p, IC_FP).vertices == ((0, 0), (2, 0), (F(1, 2), 1), (0, 1))
    seg = gdof_region(ChannelParams(F(2, 5), F(3, 2)), IC_FP)
    assert seg.vertices == ((0, 0), (F(2, 5), 0))
    # equality stored as two opposing half-spaces
    assert HalfSpace(0, 1, 0) in seg.halfspaces and HalfSpace(0, -1, 0) in seg.halfspaces


def test_point_region():
    reg = gdof_region(ChannelParams(0, F(3, 2)), IC_FP)
    assert reg.vertices == ((0, 0),)


def test_weighted_max_examples():
    reg = gdof_region(ChannelParams(2, F(3, 2)), IC_FP)
    assert weighted_max(reg, (1, 0)) == weighted_max(reg, WeightVector(1, 0))
    r = weighted_max(reg, (1, 0))
    assert r.value == 2 and r.argmax == (2, 0)
    toy = gdof_region(ChannelParams(1, F(3, 2)), IC_FP)
    assert weighted_max(toy, (1, 0), constraint=F(1, 2)).value == 0
    r = weighted_max(gdof_region(ChannelParams(2, F(3, 2)), IC_P), (1, 1))
    assert r.value == 2 and r.argmax == (2, 0)  # tie on the edge goes to larger d1


def test_weighted_max_empty_slice():
    with pytest.raises(EmptyIntersection):
        weighted_max(gdof_region(ChannelParams(1, F(3, 2)), IC_FP), (1, 0), constraint=F(2))
    with pytest.raises(EmptyIntersection):
        weighted_max(gdof_region(ChannelParams(F(2, 5), F(3, 2)), IC_FP), (1, 0), constraint=F(1, 10))


def test_weights_validation():
    with pytest.raises(ValueError):
        WeightVector(0, 0)
    with pytest.raises(ValueError):
        WeightVector(-1, 1)
    with pytest.raises(ValueError):
        ChannelParams(-1, 0)


def test_fp_to_p_ratio_examples():
    assert fp_to_p_ratio(ChannelParams(2, F(3, 2)), (1, 0)) == 1
    with pytest.raises(UndefinedRatio):
        fp_to_p_ratio(ChannelParams(0, F(3, 2)), (1, 0))


def test_ratio_scan_trivial():
    scan = ratio_scan([2], [F(3, 2)], [(1, 0)])
    assert scan.min_ratio == 1 and len(scan.rows) == 1


def test_extremal_direction_oracle():
    # frozen from exact evaluation: w = (1, alpha-1) approaches 1/2 from above
    vals = [fp_to_p_ratio(ChannelParams(a, a - F(1, 10)), (1, a - 1)) for a in (4, 16, 64)]
    assert vals == [F(2, 3), F(8, 15), F(32, 63)]


def test_corner_points():
    assert corner_point(ChannelParams(F(6, 5), F(3, 2)), IC_FP) == (0, F(7, 10))
    assert corner_point(ChannelParams(2, F(3, 2)), IC_P) == (1, 1)
    assert corner_point(ChannelParams(2, F(3, 2)), IC_FP) == (F(1, 2), 1)


def test_r2_r3_discontinuity():
    beta = F(3, 2)
    r3 = corner_point(ChannelParams(beta - 1, beta), IC_FP)
    assert r3 == (beta - 1, 0)
    for k in (10, 100, 1000):
        assert corner_point(ChannelParams(beta - 1 + F(1, k), beta), IC_FP)[0] == 0


def test_corner_surface_r2_zero():
    rows = corner_surface([F(11, 10), F(6, 5)], [F(3, 2)])
    assert all(r["d1ss_fp"] == 0 for r in rows if r["regime"] == "R2")


# -- properties ----------------------------------------------------------------

def test_partition_grid():
    grid = [F(i, 8) for i in range(33)]
    for a in grid:
        for b in grid:
            hits = [
                1 < b < a,
                1 < b and b - 1 < a <= b,
                1 < b and a <= b - 1,
                0 <= b <= 1,
            ]
            assert sum(hits) == 1
            reg = classify_regime(ChannelParams(a, b), IC_FP).id
            assert reg is (Regime.R1, Regime.R2, Regime.R3, Regime.R4)[hits.index(True)]


@settings(max_examples=300, deadline=None)
@given(rat, rat)
def test_vertices_match_clipping_oracle(a, b):
    params = ChannelParams(a, b)
    for sc in SCENARIOS:
        reg = gdof_region(params, sc)
        assert set(reg.vertices) == extreme_points(clip_polygon(reg.halfspaces))
        bound = max(a, b, 1)
        for v in reg.vertices:
            assert reg.contains(v)
            assert 0 <= v[0] <= bound and 0 <= v[1] <= bound
            tight = sum(h.slack(*v) == 0 for h in reg.halfspaces)
            assert tight >= 2 or len(reg.vertices) == 1


@settings(max_examples=300, deadline=None)
@given(rat, rat)
def test_fp_inside_perfect_and_ic_inside_bc(a, b):
    params = ChannelParams(a, b)
    assert gdof_region(params, IC_FP).is_subset_of(gdof_region(params, IC_P))
    assert gdof_region(params, BC_FP).is_subset_of(gdof_region(params, BC_P))
    assert gdof_region(params, IC_P).is_subset_of(gdof_region(params, BC_P))


def _brute_weighted(reg: GdofRegion, w, c=None):
    if c is None:
        cands = list(reg.vertices)
    else:
        cands = []
        vs = list(reg.vertices)
        pairs = [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))] if len(vs) > 1 else [(vs[0], vs[0])]
        for p, q in pairs:
            if p[1] == q[1] == c:
                cands += [p, q]
            elif min(p[1], q[1]) <= c <= max(p[1], q[1]) and p[1] != q[1]:
                t = (c - p[1]) / (q[1] - p[1])
                cands.append((p[0] + t * (q[0] - p[0]), c))
    if not cands:
        return None
    return max(w[0] * x + w[1] * y for x, y in cands)


@settings(max_examples=300, deadline=None)
@given(rat, rat, st.fractions(0, 5, max_denominator=6), st.fractions(0, 5, max_denominator=6),
       st.fractions(0, 2, max_denominator=8))
def test_weighted_max_matches_brute_force(a, b, w1, w2, c):
    if w1 + w2 == 0:
        return
    for sc in SCENARIOS:
        reg = gdof_region(ChannelParams(a, b), sc)
        assert weighted_max(reg, (w1, w2)).value == _brute_weighted(reg, (w1, w2))
        expect = _brute_weighted(reg, (w1, w2), c)
        if expect is None:
            with pytest.raises(EmptyIntersection):
                weighted_max(reg, (w1, w2), constraint=c)
        else:
            assert weighted_max(reg, (w1, w2), constraint=c).value == expect


@settings(max_examples=200, deadline=None)
@given(st.fractions(F(21, 20), 4, max_denominator=20), st.fractions(0, 4, max_denominator=20),
       st.fractions(0, 3, max_denominator=5), st.fractions(0, 3, max_denominator=5))
def test_ratio_at_least_half_in_r1_r2(b, a, w1, w2):
    if w1 + w2 == 0 or not a > b - 1:
        return
    assert fp_to_p_ratio(ChannelParams(a, b), (w1, w2)) >= F(1, 2)


def _hausdorff(A, B):
    def d(p, q):
        return max(abs(p[0] - q[0]), abs(p[1] - q[1]))
    return max(max(min(d(p, q) for q in B) for p in A), max(min(d(p, q) for q in A) for p in B))


@pytest.mark.parametrize("target, direction", [
    ((F(2), F(2)), (1, 0)),        # R1/R2 boundary, approached from R1
    ((F(2), F(1)), (0, 1)),        # R1/R4, from above beta=1
    ((F(1, 2), F(1)), (0, 1)),     # R2/R4
])
def test_continuity_across_boundaries(target, direction):
    a0, b0 = target
    limit = gdof_region(ChannelParams(a0, b0), IC_FP)
    dists = []
    for k in (10, 100, 1000, 10000):
        p = ChannelParams(a0 + direction[0] * F(1, k), b0 + direction[1] * F(1, k))
        dists.append(_hausdorff(gdof_region(p, IC_FP).vertices, limit.vertices))
    assert dists == sorted(dists, reverse=True) and dists[-1] < F(1, 1000)


# -- serialisation -------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(rat, rat)
def test_json_round_trip(a, b):
    for sc in SCENARIOS:
        reg = gdof_region(ChannelParams(a, b), sc)
        assert region_from_json(region_to_json(reg)) == reg


def test_csv_one_row_per_vertex():
    reg = gdof_region(ChannelParams(2, F(3, 2)), IC_FP)
    lines = region_to_csv(reg).strip().splitlines()
    assert len(lines) == 1 + len(reg.vertices)
    assert lines[3] == "2,0.5,1,1,2,1,1"


def test_enumerate_vertices_square():
    hs = [HalfSpace(1, 0, 1), HalfSpace(0, 1, 1), HalfSpace(-1, 0, 0), HalfSpace(0, -1, 0),
          HalfSpace(1, 1, 2)]  # redundant constraint through a corner
    assert enumerate_vertices(hs) == [(0, 0), (1, 0), (1, 1), (0, 1)]
