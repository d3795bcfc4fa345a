"""Scalar invariants of polarized metric graphs.

Two independent routes to lambda are provided: from the slope (resistances
and j-functions of edge-deleted graphs, assembled block by block) and from
the Green's function of the admissible measure (phi and epsilon).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import GenusTooSmall, HasBridge, IdentityViolation
from .graph import PolarizedGraph, edge_profile
from .laplace import admissible_measure, green_function, network

ZERO = Fraction(0)


def _sigma_all(g: PolarizedGraph) -> dict[str, Fraction]:
    """sigma(p) for every vertex of a bridgeless graph.

    The j-function of the edge-deleted graph comes from a rank-one update of
    the grounded inverse: deleting a non-bridge edge ``e = ab`` changes ``X``
    by ``(X u)(X u)^T / (l F)`` with ``u = e_a - e_b``.
    """
    if g.bridges:
        raise HasBridge("sigma needs a graph without bridges")
    net = network(g)
    x = net.x
    idx = g.index
    n = net.n
    ids = [v.id for v in g.vertices]
    q = [v.genus for v in g.vertices]
    sig = [ZERO] * n
    for p in range(n):
        s = ZERO
        for k in range(n):
            if q[k]:
                s += q[k] * net.resistance(p, k)
        sig[p] = s
    for e in g.edges:
        a, b = idx[e.u], idx[e.v]
        if a == b:
            # deleting a loop leaves resistances alone; F(loop) = 1
            for p in range(n):
                sig[p] += net.resistance(p, a)
            continue
        r = net.resistance(a, b)
        fe = 1 - r / e.length
        xu = [x[i][a] - x[i][b] for i in range(n)]
        for p in range(n):
            if p == a or p == b:
                continue
            jp = x[a][b] - x[a][p] - x[p][b] + x[p][p]
            ua = xu[a] - xu[p]
            ub = xu[b] - xu[p]
            jdel = jp + ua * ub / (e.length * fe)
            sig[p] += jdel * fe
    return dict(zip(ids, sig))


def sigma(g: PolarizedGraph, p: str) -> Fraction:
    return _sigma_all(g)[p]


def slope_bridgeless(g: PolarizedGraph) -> Fraction:
    sig = _sigma_all(g)
    kd = g.canonical_divisor
    return sum((kd[p] * s for p, s in sig.items()), ZERO)


def _require_genus(g: PolarizedGraph) -> int:
    if g.genus < 2:
        raise GenusTooSmall(f"needs genus >= 2, got {g.genus}")
    return g.genus


def slope(g: PolarizedGraph) -> Fraction:
    """Sum of the bridgeless slopes of the loop and 2-connected blocks."""
    _require_genus(g)
    return sum(
        (slope_bridgeless(b.graph) for b in g.blocks.blocks if b.kind != "bridge"), ZERO
    )


def lambda_from_slope(g: PolarizedGraph, s: Fraction | None = None) -> Fraction:
    gen = _require_genus(g)
    s = slope(g) if s is None else s
    prof = edge_profile(g)
    num = s + gen * prof.delta0 + sum((4 * h * (gen - h) * d for h, d in prof.deltaH.items()), ZERO)
    return num / (8 * gen + 4)


@lru_cache(maxsize=512)
def _diagonal_pairings(g: PolarizedGraph) -> tuple[Fraction, Fraction]:
    """``(integral of g(x,x) d mu_ad, sum_p K(p) g(p,p))``."""
    mu = admissible_measure(g)
    gf = green_function(g, mu)
    d_mu = gf.integrate_diagonal(g, mu.masses, mu.densities)
    kd = g.canonical_divisor
    d_k = sum((k * gf.diag(p) for p, k in kd.items() if k), ZERO)
    return d_mu, d_k


def phi(g: PolarizedGraph) -> Fraction:
    gen = g.genus
    d_mu, d_k = _diagonal_pairings(g)
    return -g.total_length / 4 + ((10 * gen + 2) * d_mu - d_k) / 4


def epsilon(g: PolarizedGraph) -> Fraction:
    gen = g.genus
    d_mu, d_k = _diagonal_pairings(g)
    return (2 * gen - 2) * d_mu + d_k


def lambda_direct(g: PolarizedGraph) -> Fraction:
    gen = g.genus
    return Fraction(gen - 1, 6 * (2 * gen + 1)) * phi(g) + (g.total_length + epsilon(g)) / 12


@dataclass
class InvariantReport:
    genus: int
    delta: Fraction
    delta0: Fraction
    deltaH: dict[int, Fraction]
    phi: Fraction
    epsilon: Fraction
    lambda_A: Fraction
    lambda_B: Fraction
    slope: Fraction
    tau: Fraction
    jac_moment: Fraction
    identities: dict[str, bool] = field(default_factory=dict)
    vanishing: str = ""


def identity_checks(g: PolarizedGraph, tau_: Fraction, moment: Fraction,
                    phi_: Fraction, eps_: Fraction) -> dict[str, bool]:
    delta = g.total_length
    return {
        "moment_plus_half_tau": moment + tau_ / 2 == delta / 8,
        "two_phi": 2 * phi_ == delta + eps_ - 12 * moment,
        "eps_phi_tau": (delta + eps_ - 2 * phi_) / 12 + tau_ / 2 == delta / 8,
    }


def report(g: PolarizedGraph) -> InvariantReport:
    from .jump import classify_vanishing
    from .laplace import tau
    from .tropical import jac_moment

    _require_genus(g)
    prof = edge_profile(g)
    s = slope(g)
    la = lambda_from_slope(g, s)
    lb = lambda_direct(g)
    if la != lb:
        raise IdentityViolation(f"lambda pipelines disagree: {la} != {lb}")
    t = tau(g)
    m = jac_moment(g)
    ph, ep = phi(g), epsilon(g)
    checks = identity_checks(g, t, m, ph, ep)
    if not all(checks.values()):
        bad = [k for k, ok in checks.items() if not ok]
        raise IdentityViolation(f"identities failed: {bad}")
    return InvariantReport(
        genus=g.genus, delta=prof.delta, delta0=prof.delta0, deltaH=prof.deltaH,
        phi=ph, epsilon=ep, lambda_A=la, lambda_B=lb, slope=s, tau=t, jac_moment=m,
        identities=checks, vanishing=classify_vanishing(g),
    )
