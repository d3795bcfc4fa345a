from fractions import Fraction as F

import pytest

from slopelab import families as fam
from slopelab.errors import HasBridge
from slopelab.graph import PolarizedGraph
from slopelab.invariants import (
    epsilon,
    lambda_direct,
    lambda_from_slope,
    phi,
    report,
    sigma,
    slope,
    slope_bridgeless,
)
from slopelab.laplace import foster, tau
from slopelab.tropical import jac_moment

from conftest import float_resistances

K4_SLOPE = F(3, 4)  # frozen after agreement with the float oracle below


def float_slope(g):
    """Slope of a bridgeless graph from pseudo-inverse resistances.

    Uses j_p(x, y) = (r(x, p) + r(y, p) - r(x, y)) / 2 on each edge-deleted
    graph, recomputed from scratch.
    """
    r = float_resistances(g)
    idx = g.index
    K = g.canonical_divisor
    total = 0.0
    for v in g.vertices:
        p = idx[v.id]
        s = sum(w.genus * r[p, idx[w.id]] for w in g.vertices)
        for e in g.edges:
            if e.is_loop:
                s += r[p, idx[e.u]]
                continue
            rd = float_resistances(g, skip=e.id)
            a, b = idx[e.u], idx[e.v]
            j = (rd[a, p] + rd[b, p] - rd[a, b]) / 2
            s += j * float(foster(g, e.id))
        total += K[v.id] * s
    return total


def test_k4_slope_against_float_oracle():
    g = fam.complete_graph(4)
    assert abs(float_slope(g) - float(K4_SLOPE)) < 1e-12
    assert slope(g) == K4_SLOPE


@pytest.mark.parametrize(
    "g",
    [
        fam.complete_graph(4).with_lengths({"e01": F(2, 3), "e23": 5}),
        fam.theta(1, 2, 3, genera=(1, 0)),
        fam.banana(3, [1, 2, 3, 4], genera=(0, 2)),
        PolarizedGraph.build([("a", 0), ("b", 1), ("c", 0)],
                             [("x", "a", "b", 1), ("y", "b", "c", 2), ("z", "c", "a", 3), ("w", "a", "a", F(1, 2))]),
    ],
)
def test_slope_against_float_oracle(g):
    assert abs(float_slope(g) - float(slope_bridgeless(g))) < 1e-10


def test_sigma_examples():
    g_, h, m1, m2 = 5, 2, F(3), F(4)
    tg = fam.two_gon(g_, h, m1, m2)
    assert sigma(tg, "p1") == m1 * m2 / (m1 + m2) * (g_ - h - 1)
    assert sigma(fam.loop_graph(3, 2), "p") == 0
    b = fam.banana(4, [1, 2, 3, 4, 5])
    assert sigma(b, "u") == 0 and sigma(b, "v") == 0
    with pytest.raises(HasBridge):
        sigma(fam.dumbbell(), "u")


@pytest.mark.parametrize("g_,h", [(3, 1), (4, 1), (5, 2), (6, 3)])
def test_two_gon_slope(g_, h):
    m1, m2 = F(2, 3), F(5)
    assert slope(fam.two_gon(g_, h, m1, m2)) == 4 * h * (g_ - h - 1) * m1 * m2 / (m1 + m2)


def test_vanishing_slopes():
    for n in range(2, 7):
        assert slope_bridgeless(fam.banana(n, list(range(1, n + 2)))) == 0
    assert slope_bridgeless(fam.loop_graph(4)) == 0
    assert slope(fam.dumbbell(1, 2, 3)) == 0
    assert slope(fam.caterpillar([1, 2], [[1], [], [3, 4]])) == 0


def test_lambda_closed_forms():
    for g_ in range(2, 6):
        L = F(7, 3)
        assert lambda_from_slope(fam.loop_graph(g_, L)) == g_ * L / (8 * g_ + 4)
        assert lambda_direct(fam.loop_graph(g_, L)) == g_ * L / (8 * g_ + 4)
        for h in range(1, g_):
            seg = fam.segment(h, g_ - h, L)
            expected = 4 * h * (g_ - h) * L / (8 * g_ + 4)
            assert lambda_from_slope(seg) == expected
            assert lambda_direct(seg) == expected
    assert lambda_from_slope(fam.point(3)) == 0


def test_phi_epsilon_small_cases():
    L = F(5)
    assert phi(fam.circle(L)) == 0
    assert epsilon(fam.circle(L)) == 0
    assert lambda_direct(fam.circle(L)) == L / 12
    assert phi(fam.point(3)) == 0 and epsilon(fam.point(3)) == 0


def test_segment_phi_consistent_with_lambda():
    g_, h, L = 4, 1, F(3)
    seg = fam.segment(h, g_ - h, L)
    lam = F(4 * h * (g_ - h)) * L / (8 * g_ + 4)
    solved_phi = (lam - (L + epsilon(seg)) / 12) * 6 * (2 * g_ + 1) / (g_ - 1)
    assert phi(seg) == solved_phi


def test_dumbbell_phi_tropical_identity():
    g = fam.dumbbell(1, F(2, 3), 5)
    assert 2 * phi(g) == g.total_length + epsilon(g) - 12 * jac_moment(g)


def test_report_examples():
    r = report(fam.dumbbell(1, 2, 3))
    assert r.slope == 0 and r.lambda_A == r.lambda_B
    assert r.vanishing == "loops-and-bridges"
    b = report(fam.banana(3))
    assert b.slope == 0 and b.vanishing == "banana"
    k = report(fam.complete_graph(4))
    assert k.slope > 0 and k.vanishing == "nonvanishing"
    assert all(k.identities.values())


def test_theta_with_genus_vertex_positive():
    g = fam.theta(genera=(1, 0))
    assert g.genus == 3
    assert slope(g) > 0
    assert lambda_from_slope(g) == lambda_direct(g)


def test_loop_subdivision_invariance():
    # a genus-0 valency-2 point on a loop is invisible to every invariant
    for g in [fam.dumbbell(F(1, 2), 2, 3), fam.loop_graph(3, F(7, 2))]:
        loop = next(e.id for e in g.edges if e.is_loop)
        h = g.subdivide(loop, F(1, 5), "m")
        for f in (phi, epsilon, lambda_direct, tau, jac_moment):
            assert f(h) == f(g)
