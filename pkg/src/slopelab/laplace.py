"""Exact potential theory on metric graphs.

The basic object is the grounded inverse ``X`` of the weighted vertex
Laplacian (conductance ``1/length`` per edge, row and column of the first
vertex removed).  Resistances, j-functions and Green's functions at vertices
are read off from ``X``.  Values at interior points of an edge are obtained
by subdividing the edge; the subdivided inverse comes from eliminating the
one new vertex exactly, so the original entries of ``X`` are reused.

Sign conventions: ``L f(p) = sum over half-edges (f(p) - f(other)) / length``,
and a Green's function for the measure ``mu`` satisfies
``L g(., y) = delta_y - mu`` in the sense of outgoing slopes, with
``g'' = rho`` on an edge of density ``rho``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from . import exact
from .errors import (
    AdmissibilityCheckFailed,
    IdentityViolation,
    InputError,
    MassNotOne,
    NonConstantDiagonal,
)
from .graph import PolarizedGraph

ZERO = Fraction(0)


# networks -------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """An edge of a network; ``key`` names the original edge it lies on."""
    u: int
    v: int
    length: Fraction
    key: str


class Network:
    """Vertices ``0..n-1`` joined by resistive segments, with grounded inverse."""

    def __init__(self, n: int, segments: list[Segment], x: list[list[Fraction]]):
        self.n = n
        self.segments = segments
        self.x = x

    @classmethod
    def from_graph(cls, g: PolarizedGraph) -> "Network":
        idx = g.index
        n = len(g.vertices)
        segs = [Segment(idx[e.u], idx[e.v], e.length, e.id) for e in g.edges]
        lap = [[ZERO] * n for _ in range(n)]
        for s in segs:
            if s.u == s.v:
                continue
            c = 1 / s.length
            lap[s.u][s.u] += c
            lap[s.v][s.v] += c
            lap[s.u][s.v] -= c
            lap[s.v][s.u] -= c
        x = [[ZERO] * n for _ in range(n)]
        if n > 1:
            inv = exact.inverse([row[1:] for row in lap[1:]])
            for i in range(1, n):
                for j in range(1, n):
                    x[i][j] = inv[i - 1][j - 1]
        return cls(n, segs, x)

    def laplacian_apply(self, f: list[Fraction]) -> list[Fraction]:
        out = [ZERO] * self.n
        for s in self.segments:
            if s.u == s.v:
                continue
            d = (f[s.u] - f[s.v]) / s.length
            out[s.u] += d
            out[s.v] -= d
        return out

    def subdivided(self, k: int, t: Fraction) -> "Network":
        """Split segment ``k`` at distance ``t`` from its ``u`` end.

        The new vertex gets index ``n``.  Eliminating it again recovers the
        old network (series law), so the old block of the inverse is kept and
        only the new row is computed.
        """
        s = self.segments[k]
        ell = s.length
        if not 0 < t < ell:
            raise InputError("subdivision point must be interior")
        a, b, n, x = s.u, s.v, self.n, self.x
        wa, wb = (ell - t) / ell, t / ell
        row = [wa * x[a][j] + wb * x[b][j] for j in range(n)]
        xx = wa * row[a] + wb * row[b] + t * (ell - t) / ell
        newx = [r + [row[i]] for i, r in enumerate(x)]
        newx.append(row + [xx])
        segs = list(self.segments)
        segs[k] = Segment(a, n, t, s.key)
        segs.append(Segment(n, b, ell - t, s.key))
        return Network(n + 1, segs, newx)

    def resistance(self, i: int, j: int) -> Fraction:
        x = self.x
        return x[i][i] + x[j][j] - 2 * x[i][j]

    def j(self, z: int, x_: int, y: int) -> Fraction:
        x = self.x
        return x[x_][y] - x[x_][z] - x[z][y] + x[z][z]


@lru_cache(maxsize=512)
def network(g: PolarizedGraph) -> Network:
    return Network.from_graph(g)


# measures -------------------------------------------------------------------


@dataclass(frozen=True)
class GraphMeasure:
    """Point masses at vertices plus a uniform density on each edge."""
    masses: Mapping[str, Fraction]
    densities: Mapping[str, Fraction]

    def total(self, g: PolarizedGraph) -> Fraction:
        return sum(self.masses.values(), ZERO) + sum(
            (self.densities.get(e.id, ZERO) * e.length for e in g.edges), ZERO
        )

    def to_dict(self) -> dict:
        from .rational import format_rational

        return {
            "masses": {k: format_rational(v) for k, v in self.masses.items()},
            "densities": {k: format_rational(v) for k, v in self.densities.items()},
        }


def dirac(p: str) -> GraphMeasure:
    return GraphMeasure({p: Fraction(1)}, {})


# elementary quantities ------------------------------------------------------


@dataclass(frozen=True)
class EdgeQuadratic:
    """``a + b x + c x^2`` in arc length from the ``u`` end of the edge."""
    a: Fraction
    b: Fraction
    c: Fraction

    def __call__(self, x) -> Fraction:
        return self.a + self.b * x + self.c * x * x

    def integral(self, ell: Fraction) -> Fraction:
        return self.a * ell + self.b * ell ** 2 / 2 + self.c * ell ** 3 / 3


@dataclass(frozen=True)
class JFunction:
    values: dict[str, Fraction]
    edges: dict[str, EdgeQuadratic]


def effective_resistance(g: PolarizedGraph, x: str, y: str) -> Fraction:
    return network(g).resistance(g.index[x], g.index[y])


def resistance_matrix(g: PolarizedGraph) -> list[list[Fraction]]:
    net = network(g)
    return [[net.resistance(i, j) for j in range(net.n)] for i in range(net.n)]


def j_function(g: PolarizedGraph, z: str, y: str) -> JFunction:
    """The function with Laplacian ``delta_y - delta_z`` vanishing at ``z``."""
    net = network(g)
    iz, iy = g.index[z], g.index[y]
    vals = {v.id: net.j(iz, g.index[v.id], iy) for v in g.vertices}
    edges = {
        e.id: EdgeQuadratic(vals[e.u], (vals[e.v] - vals[e.u]) / e.length, ZERO) for e in g.edges
    }
    return JFunction(vals, edges)


def j_value(g: PolarizedGraph, z: str, x: str, y: str) -> Fraction:
    net = network(g)
    return net.j(g.index[z], g.index[x], g.index[y])


def foster(g: PolarizedGraph, eid: str) -> Fraction:
    e = g.edge_by_id[eid]
    return 1 - effective_resistance(g, e.u, e.v) / e.length


def foster_coefficients(g: PolarizedGraph) -> dict[str, Fraction]:
    net = network(g)
    idx = g.index
    return {e.id: 1 - net.resistance(idx[e.u], idx[e.v]) / e.length for e in g.edges}


# Green's functions ----------------------------------------------------------


class _Potential:
    """Green's function data for one measure on one network.

    With ``beta_p`` the vertex mass plus half the mass of each incident
    half-edge, ``w = X beta`` and ``kappa = sum rho^2 l^3 / 12``, the
    normalized Green's function at vertices is
    ``g(x, y) = X_xy - w_x - w_y + beta.w + kappa``.
    """

    def __init__(self, net: Network, masses: list[Fraction], rho: list[Fraction]):
        self.net = net
        n = net.n
        beta = list(masses)
        kappa = ZERO
        for s, r in zip(net.segments, rho):
            if r:
                half = r * s.length / 2
                beta[s.u] += half
                beta[s.v] += half
                kappa += r * r * s.length ** 3 / 12
        x = net.x
        w = [sum((x[i][j] * beta[j] for j in range(n) if beta[j]), ZERO) for i in range(n)]
        self.masses = masses
        self.rho = rho
        self.beta = beta
        self.w = w
        self.const = sum((b * wi for b, wi in zip(beta, w)), ZERO) + kappa

    def value(self, i: int, j: int) -> Fraction:
        return self.net.x[i][j] - self.w[i] - self.w[j] + self.const

    def column(self, j: int) -> list[Fraction]:
        return [self.value(i, j) for i in range(self.net.n)]

    def subdivided(self, k: int, t: Fraction) -> "_Potential":
        net2 = self.net.subdivided(k, t)
        return _Potential(net2, self.masses + [ZERO], self.rho + [self.rho[k]])

    def edge_integral(self, k: int, f_u: Fraction, f_v: Fraction) -> Fraction:
        """Integral over segment ``k`` of a column, given its endpoint values."""
        s = self.net.segments[k]
        r = self.rho[k]
        return s.length * (f_u + f_v) / 2 - r * s.length ** 3 / 12

    def residual_ok(self, j: int) -> bool:
        col = self.column(j)
        lhs = self.net.laplacian_apply(col)
        rhs = [-b for b in self.beta]
        rhs[j] += 1
        return lhs == rhs


@dataclass(frozen=True)
class GreenFunction:
    measure: GraphMeasure
    vertex_ids: tuple[str, ...]
    values: tuple[tuple[Fraction, ...], ...]
    diagonal: dict[str, EdgeQuadratic]

    def __call__(self, p: str, q: str) -> Fraction:
        i = self.vertex_ids.index(p)
        j = self.vertex_ids.index(q)
        return self.values[i][j]

    def diag(self, p: str) -> Fraction:
        i = self.vertex_ids.index(p)
        return self.values[i][i]

    def integrate_diagonal(self, g: PolarizedGraph, masses: Mapping[str, Fraction],
                           densities: Mapping[str, Fraction]) -> Fraction:
        """Integral of ``x -> g(x, x)`` against a signed measure."""
        total = sum((m * self.diag(p) for p, m in masses.items() if m), ZERO)
        for e in g.edges:
            r = densities.get(e.id, ZERO)
            if r:
                total += r * self.diagonal[e.id].integral(e.length)
        return total


def _measure_arrays(g: PolarizedGraph, mu: GraphMeasure):
    masses = [Fraction(mu.masses.get(v.id, ZERO)) for v in g.vertices]
    rho = [Fraction(mu.densities.get(e.id, ZERO)) for e in g.edges]
    return masses, rho


def _potential(g: PolarizedGraph, mu: GraphMeasure) -> _Potential:
    tot = mu.total(g)
    if tot != 1:
        raise MassNotOne(f"measure has total mass {tot}")
    masses, rho = _measure_arrays(g, mu)
    return _Potential(network(g), masses, rho)


def _diagonal_quadratic(pot: _Potential, k: int) -> EdgeQuadratic:
    """Fit ``g(x, x)`` on segment ``k`` through both ends and the midpoint.

    The fit is confirmed at the quarter point before it is returned.
    """
    s = pot.net.segments[k]
    ell = s.length
    y0 = pot.value(s.u, s.u)
    y2 = pot.value(s.v, s.v)
    mid = pot.subdivided(k, ell / 2)
    y1 = mid.value(pot.net.n, pot.net.n)
    # Lagrange interpolation at 0, l/2, l
    c = 2 * (y0 - 2 * y1 + y2) / ell ** 2
    b = (y2 - y0) / ell - c * ell
    quad = EdgeQuadratic(y0, b, c)
    quarter = pot.subdivided(k, ell / 4)
    yq = quarter.value(pot.net.n, pot.net.n)
    if quad(ell / 4) != yq:
        raise IdentityViolation(f"diagonal on edge {s.key} is not quadratic")
    return quad


def green_function(g: PolarizedGraph, mu: GraphMeasure) -> GreenFunction:
    """Green's function of ``mu`` at vertices, with its diagonal on every edge."""
    pot = _potential(g, mu)
    n = pot.net.n
    for j in range(n):
        if not pot.residual_ok(j):
            raise IdentityViolation("Laplacian residual of the Green's function is nonzero")
    vals = tuple(tuple(pot.value(i, j) for j in range(n)) for i in range(n))
    diag = {e.id: _diagonal_quadratic(pot, k) for k, e in enumerate(g.edges)}
    return GreenFunction(mu, tuple(v.id for v in g.vertices), vals, diag)


def green_at_point(g: PolarizedGraph, mu: GraphMeasure, eid: str, t: Fraction) -> tuple[dict[str, Fraction], Fraction]:
    """Values ``g(p, x)`` at all vertices ``p`` and ``g(x, x)`` for the point ``x``
    at distance ``t`` from the ``u`` end of edge ``eid``."""
    pot = _potential(g, mu)
    e = g.edge_by_id[eid]
    t = Fraction(t)
    if t in (0, e.length):
        j = g.index[e.u if t == 0 else e.v]
        col = {v.id: pot.value(i, j) for i, v in enumerate(g.vertices)}
        return col, pot.value(j, j)
    k = [x.id for x in g.edges].index(eid)
    sub = pot.subdivided(k, t)
    n = pot.net.n
    col = {v.id: sub.value(i, n) for i, v in enumerate(g.vertices)}
    return col, sub.value(n, n)


# special measures -----------------------------------------------------------


def canonical_measure(g: PolarizedGraph) -> GraphMeasure:
    fc = foster_coefficients(g)
    masses = {v.id: 1 - Fraction(g.valency(v.id), 2) for v in g.vertices}
    dens = {e.id: fc[e.id] / e.length for e in g.edges}
    return GraphMeasure(masses, dens)


def tau(g: PolarizedGraph) -> Fraction:
    """The constant value of the Green diagonal for the canonical measure."""
    gf = green_function(g, canonical_measure(g))
    consts = {gf.diag(v.id) for v in g.vertices}
    for quad in gf.diagonal.values():
        if quad.b or quad.c:
            raise NonConstantDiagonal("canonical Green diagonal varies along an edge")
        consts.add(quad.a)
    if len(consts) != 1:
        raise NonConstantDiagonal("canonical Green diagonal differs between vertices")
    return consts.pop()


def admissible_measure(g: PolarizedGraph, verify: bool = True) -> GraphMeasure:
    """``(q + F/l dx) / genus``, checked against the admissibility property.

    Admissibility: ``g_mu(K, x) + g_mu(x, x)`` is independent of ``x``.  The
    check runs at every vertex and at the midpoint of every edge.
    """
    gen = g.genus
    if gen < 1:
        raise InputError("admissible measure needs genus >= 1")
    fc = foster_coefficients(g)
    masses = {v.id: Fraction(v.genus, gen) for v in g.vertices}
    dens = {e.id: fc[e.id] / (gen * e.length) for e in g.edges}
    mu = GraphMeasure(masses, dens)
    if verify:
        _check_admissible(g, mu)
    return mu


def _check_admissible(g: PolarizedGraph, mu: GraphMeasure) -> None:
    pot = _potential(g, mu)
    kd = g.canonical_divisor
    kvec = [kd[v.id] for v in g.vertices]
    n = pot.net.n

    def at_vertex(p: int, P: _Potential) -> Fraction:
        return sum((kvec[i] * P.value(i, p) for i in range(n) if kvec[i]), ZERO) + P.value(p, p)

    seen = {at_vertex(i, pot) for i in range(n)}
    for k, e in enumerate(g.edges):
        sub = pot.subdivided(k, e.length / 2)
        seen.add(at_vertex(n, sub))
        if len(seen) != 1:
            break
    if len(seen) != 1:
        raise AdmissibilityCheckFailed("g_mu(K, x) + g_mu(x, x) is not constant")
