"""Lattice Voronoi cells and their exact second moments.

A lattice is given by a Gram matrix ``Z`` of ``Z^b``.  Its Voronoi cell is
described in lattice coordinates ``beta``: ``n^T Z beta <= n^T Z n / 2`` for
every relevant vector ``n``.  The cell has volume one in these coordinates,
which serves as a certificate that no facet was missed.

Vertices are located with a floating-point halfspace intersection and then
recomputed exactly from their tight facets; the exact results are checked
for feasibility before use.  The cell is split into simplices by coning the
origin over a pulling triangulation of each facet, and second moments are
summed in integer arithmetic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy.spatial import HalfspaceIntersection

from . import exact
from .errors import DimensionTooLarge, InputError, NumericalError, TreeGraph, VolumeMismatch
from .graph import PolarizedGraph

MAX_DIM = 6
Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class GramLattice:
    entries: Matrix

    def __post_init__(self):
        b = len(self.entries)
        if b == 0 or any(len(r) != b for r in self.entries):
            raise InputError("Gram matrix must be square and non-empty")
        for i in range(b):
            for j in range(b):
                if self.entries[i][j] != self.entries[j][i]:
                    raise InputError("Gram matrix must be symmetric")
        if not exact.leading_minors_positive(self.entries):
            raise InputError("Gram matrix must be positive definite")

    @classmethod
    def of(cls, rows) -> "GramLattice":
        from .rational import parse_rational

        return cls(tuple(tuple(parse_rational(x) if not isinstance(x, Fraction) else x for x in r) for r in rows))

    @property
    def dim(self) -> int:
        return len(self.entries)


def _as_matrix(z) -> Matrix:
    if isinstance(z, GramLattice):
        return z.entries
    return GramLattice.of(z).entries


# cycle pairing ----------------------------------------------------------------


def cycle_basis(g: PolarizedGraph) -> list[dict[str, int]]:
    """Fundamental cycles of a breadth-first spanning tree, as signed edge maps.

    The root is the smallest vertex id, neighbours are visited in edge-id
    order, and cycles are listed by the id of their non-tree edge.
    """
    order = sorted(g.edges, key=lambda e: e.id)
    adj: dict[str, list] = {v.id: [] for v in g.vertices}
    for e in order:
        if not e.is_loop:
            adj[e.u].append(e)
            adj[e.v].append(e)
    root = min(v.id for v in g.vertices)
    parent: dict[str, tuple] = {root: (None, None)}
    queue = [root]
    tree = set()
    for x in queue:
        for e in adj[x]:
            y = e.other(x)
            if y not in parent:
                parent[y] = (x, e)
                tree.add(e.id)
                queue.append(y)

    def path_to_root(x):
        # signed edges of the tree path from x up to the root
        out = {}
        while parent[x][0] is not None:
            p, e = parent[x]
            out[e.id] = out.get(e.id, 0) + (1 if e.u == x else -1)
            x = p
        return out

    cycles = []
    for e in order:
        if e.id in tree:
            continue
        c = {e.id: 1}
        # e goes u -> v; close it with the tree path v -> root -> u
        for eid, s in path_to_root(e.v).items():
            c[eid] = c.get(eid, 0) + s
        for eid, s in path_to_root(e.u).items():
            c[eid] = c.get(eid, 0) - s
        cycles.append({k: s for k, s in c.items() if s})
    return cycles


def cycle_gram(g: PolarizedGraph) -> GramLattice:
    if g.b1 == 0:
        raise TreeGraph("graph is a tree; its Jacobian is trivial")
    cyc = cycle_basis(g)
    ln = {e.id: e.length for e in g.edges}
    b = len(cyc)
    rows = tuple(
        tuple(sum((ln[k] * s * cyc[j].get(k, 0) for k, s in cyc[i].items()), Fraction(0)) for j in range(b))
        for i in range(b)
    )
    return GramLattice(rows)


# relevant vectors -------------------------------------------------------------


def _integer_gram(z: Matrix) -> list[list[int]]:
    den = 1
    for row in z:
        for x in row:
            den = math.lcm(den, x.denominator)
    return [[int(x * den) for x in row] for row in z]


def _qform(zi: list[list[int]], n) -> int:
    b = len(zi)
    return sum(zi[i][j] * n[i] * n[j] for i in range(b) for j in range(b))


def _short_vectors(zi: list[list[int]], bound: int) -> list[tuple[int, ...]]:
    """All integer vectors with ``n^T Z n <= bound`` (Fincke-Pohst, float with slack)."""
    b = len(zi)
    zf = np.array(zi, dtype=float)
    r = np.linalg.cholesky(zf).T  # zf = r^T r, r upper triangular
    slack = bound * (1 + 1e-9) + 1e-9
    out = []
    n = [0] * b

    def rec(i: int, rem: float):
        # coordinate i, given n[i+1:], with remaining budget rem
        c = -sum(r[i, j] * n[j] for j in range(i + 1, b)) / r[i, i]
        w = math.sqrt(max(rem, 0.0)) / r[i, i]
        for k in range(math.ceil(c - w - 1e-9), math.floor(c + w + 1e-9) + 1):
            n[i] = k
            t = r[i, i] * (k - c)
            left = rem - t * t
            if left < -1e-9 * max(1.0, slack):
                continue
            if i == 0:
                out.append(tuple(n))
            else:
                rec(i - 1, left)
        n[i] = 0

    rec(b - 1, slack)
    return [v for v in out if _qform(zi, v) <= bound]


def _relevant_int(zi: list[list[int]]) -> list[tuple[int, ...]]:
    b = len(zi)
    classes = [c for c in itertools.product((0, 1), repeat=b) if any(c)]
    best: dict[tuple, int] = {}
    for n in itertools.product((-1, 0, 1), repeat=b):
        if not any(n):
            continue
        c = tuple(abs(x) % 2 for x in n)
        v = _qform(zi, n)
        if c not in best or v < best[c]:
            best[c] = v
    bound = max(best[c] for c in classes)
    minima: dict[tuple, int] = {}
    members: dict[tuple, list] = {}
    for n in _short_vectors(zi, bound):
        if not any(n):
            continue
        c = tuple(x % 2 for x in n)
        v = _qform(zi, n)
        if c not in minima or v < minima[c]:
            minima[c] = v
            members[c] = [n]
        elif v == minima[c]:
            members[c].append(n)
    out = []
    for c in classes:
        if c not in members:
            raise NumericalError("short-vector enumeration missed a parity class")
        if len(members[c]) == 2:
            out.extend(sorted(members[c]))
    return out


def relevant_vectors(z) -> list[tuple[int, ...]]:
    """Facet normals of the Voronoi cell.

    A vector is relevant exactly when it and its negative are the only
    shortest vectors of its class modulo 2 (Voronoi).  Every class minimum is
    bounded by the best representative with entries in {-1, 0, 1}, so
    enumerating all vectors up to the largest such bound is exhaustive.
    """
    z = _as_matrix(z)
    if len(z) > MAX_DIM:
        raise DimensionTooLarge(f"dimension {len(z)} exceeds {MAX_DIM}")
    return _relevant_int(_integer_gram(z))


# Voronoi cell -------------------------------------------------------------------


@dataclass(frozen=True)
class VoronoiPolytope:
    """Exact Voronoi cell with its simplicial decomposition and moments.

    ``normals``/``rhs`` give ``normal . beta <= rhs`` (integers).  Vertices
    are integer vectors over the common denominator ``denominator``.
    Simplices list vertex indices; index ``-1`` stands for the origin.
    """
    gram: Matrix
    relevant: tuple[tuple[int, ...], ...]
    normals: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]
    vertices_int: tuple[tuple[int, ...], ...]
    denominator: int
    simplices: tuple[tuple[int, ...], ...]
    volume: Fraction
    second_moment: Matrix  # integral of beta beta^T over the cell

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def vertices(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(x, self.denominator) for x in v) for v in self.vertices_int]

    @property
    def first_moment(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * self.dim

    def contains(self, beta: Sequence[Fraction]) -> bool:
        return all(
            sum(a * x for a, x in zip(nrm, beta)) <= r for nrm, r in zip(self.normals, self.rhs)
        )

    def simplex_points(self) -> list[np.ndarray]:
        verts = np.array(self.vertices_int, dtype=float) / self.denominator
        origin = np.zeros(self.dim)
        return [np.array([origin if k < 0 else verts[k] for k in s]) for s in self.simplices]


def _float_vertices(normals: list[tuple[int, ...]], rhs: list[int], b: int) -> np.ndarray:
    hs = np.array([list(map(float, a)) + [-float(r)] for a, r in zip(normals, rhs)])
    scale = np.linalg.norm(hs[:, :b], axis=1, keepdims=True)
    hs = hs / scale
    return HalfspaceIntersection(hs, np.zeros(b)).intersections


def _exact_vertex(normals, rhs, tight: list[int], b: int):
    """Solve on ``b`` independent tight facets; returns a Fraction vector or None."""
    rows = []
    chosen = []
    for j in tight:
        trial = rows + [list(normals[j])]
        if exact.rank(trial) == len(trial):
            rows = trial
            chosen.append(j)
            if len(rows) == b:
                break
    if len(rows) < b:
        return None
    sol = exact.solve(rows, [[rhs[j]] for j in chosen])
    return tuple(s[0] for s in sol)


def _enumerate_vertices(normals, rhs, b: int) -> list[tuple[Fraction, ...]]:
    m = len(normals)
    nf = np.array(normals, dtype=float)
    rf = np.array(rhs, dtype=float)
    found: set[tuple[Fraction, ...]] = set()
    pts = _float_vertices(normals, rhs, b)
    for p in pts:
        slack = rf - nf @ p
        tol = 1e-7 * (np.abs(rf) + np.linalg.norm(nf, axis=1) * (1 + np.linalg.norm(p)))
        tight = [j for j in np.argsort(slack) if slack[j] <= tol[j]]
        v = _exact_vertex(normals, rhs, [int(j) for j in tight], b)
        if v is None:
            continue
        if all(sum(a * x for a, x in zip(normals[j], v)) <= rhs[j] for j in range(m)):
            found.add(v)
    return sorted(found)


def _exhaustive_vertices(normals, rhs, b: int) -> list[tuple[Fraction, ...]]:
    found = set()
    m = len(normals)
    for sub in itertools.combinations(range(m), b):
        rows = [list(normals[j]) for j in sub]
        if exact.rank(rows) < b:
            continue
        sol = exact.solve(rows, [[rhs[j]] for j in sub])
        v = tuple(s[0] for s in sol)
        if all(sum(a * x for a, x in zip(normals[j], v)) <= rhs[j] for j in range(m)):
            found.add(v)
    return sorted(found)


def _facet_vertex_sets(normals, rhs, verts_int, den) -> list[frozenset[int]]:
    sets = []
    for a, r in zip(normals, rhs):
        sets.append(frozenset(i for i, v in enumerate(verts_int) if sum(x * y for x, y in zip(a, v)) == r * den))
    return sets


def _triangulate_cell(normals, verts_int, facet_sets, b: int) -> list[tuple[int, ...]]:
    """Cone the origin over a pulling triangulation of every facet."""
    ridge_normals = [list(a) for a in normals]
    nf = len(facet_sets)

    @lru_cache(maxsize=None)
    def face_dim(face: frozenset) -> int:
        rows = [ridge_normals[j] for j in range(nf) if face <= facet_sets[j]]
        return b - exact.rank(rows) if rows else b

    @lru_cache(maxsize=None)
    def pull(face: frozenset, d: int) -> tuple[tuple[int, ...], ...]:
        if d == 0:
            return ((next(iter(face)),),)
        apex = min(face)
        subfaces = set()
        for s in facet_sets:
            sub = face & s
            if apex in sub or len(sub) < d or sub == face:
                continue
            if sub not in subfaces and face_dim(sub) == d - 1:
                subfaces.add(sub)
        out = []
        for sub in sorted(subfaces, key=sorted):
            for simp in pull(sub, d - 1):
                out.append((apex,) + simp)
        return tuple(out)

    simplices = []
    for s in facet_sets:
        for simp in pull(s, b - 1):
            simplices.append((-1,) + simp)
    return simplices


def _build_cell(z: Matrix) -> VoronoiPolytope:
    b = len(z)
    if b > MAX_DIM:
        raise DimensionTooLarge(f"dimension {b} exceeds {MAX_DIM}")
    zi = _integer_gram(z)
    rel = _relevant_int(zi)
    normals = [tuple(2 * sum(zi[i][j] * n[j] for j in range(b)) for i in range(b)) for n in rel]
    rhs = [_qform(zi, n) for n in rel]
    if b == 1:
        verts = [(Fraction(-1, 2),), (Fraction(1, 2),)]
    else:
        try:
            verts = _enumerate_vertices(normals, rhs, b)
        except Exception:  # qhull failure on a degenerate input
            verts = []
        if len(verts) < b + 1 and math.comb(len(normals), b) <= 200000:
            verts = _exhaustive_vertices(normals, rhs, b)
    den = 1
    for v in verts:
        for x in v:
            den = math.lcm(den, x.denominator)
    verts_int = [tuple(int(x * den) for x in v) for v in verts]
    facet_sets = _facet_vertex_sets(normals, rhs, verts_int, den)
    if b == 1:
        simplices = [(-1, 0), (-1, 1)]
    else:
        simplices = _triangulate_cell(normals, verts_int, facet_sets, b)
    vol_num = 0
    acc = [[0] * b for _ in range(b)]
    for simp in simplices:
        pts = [verts_int[k] for k in simp[1:]]
        d = abs(exact.det_int(pts))
        if d == 0:
            continue
        vol_num += d
        s = [sum(p[i] for p in pts) for i in range(b)]
        for i in range(b):
            for j in range(i, b):
                t = d * (sum(p[i] * p[j] for p in pts) + s[i] * s[j])
                acc[i][j] += t
    fact = math.factorial(b)
    volume = Fraction(vol_num, den ** b * fact)
    if volume != 1:
        raise VolumeMismatch(f"Voronoi cell volume is {volume}, expected 1")
    scale = den ** (b + 2) * fact * (b + 1) * (b + 2)
    mom = [[Fraction(acc[min(i, j)][max(i, j)], scale) for j in range(b)] for i in range(b)]
    return VoronoiPolytope(
        gram=z,
        relevant=tuple(rel),
        normals=tuple(normals),
        rhs=tuple(rhs),
        vertices_int=tuple(verts_int),
        denominator=den,
        simplices=tuple(simplices),
        volume=volume,
        second_moment=tuple(tuple(r) for r in mom),
    )


@lru_cache(maxsize=1024)
def _cell_cached(z: Matrix) -> VoronoiPolytope:
    return _build_cell(z)


def voronoi_cell(z) -> VoronoiPolytope:
    return _cell_cached(_as_matrix(z))


# regions and moments -----------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-parallel box, by default the centred unit cube."""
    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    @classmethod
    def unit(cls, b: int) -> "Box":
        return cls((Fraction(-1, 2),) * b, (Fraction(1, 2),) * b)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> Fraction:
        return math.prod((u - l for l, u in zip(self.lower, self.upper)), start=Fraction(1))

    @property
    def first_moment(self) -> tuple[Fraction, ...]:
        vol = self.volume
        return tuple(vol * (l + u) / 2 for l, u in zip(self.lower, self.upper))

    @property
    def second_moment(self) -> Matrix:
        b = self.dim
        w = [u - l for l, u in zip(self.lower, self.upper)]
        m1 = [(u * u - l * l) / 2 for l, u in zip(self.lower, self.upper)]
        m2 = [(u ** 3 - l ** 3) / 3 for l, u in zip(self.lower, self.upper)]
        rows = []
        for i in range(b):
            row = []
            for j in range(b):
                rest = math.prod((w[k] for k in range(b) if k not in (i, j)), start=Fraction(1))
                row.append(m2[i] * rest if i == j else m1[i] * m1[j] * rest)
            rows.append(tuple(row))
        return tuple(rows)


@dataclass(frozen=True)
class ProductRegion:
    first: "Region"
    second: "Region"

    @property
    def dim(self) -> int:
        return self.first.dim + self.second.dim

    @property
    def volume(self) -> Fraction:
        return self.first.volume * self.second.volume

    @property
    def first_moment(self) -> tuple[Fraction, ...]:
        return tuple(x * self.second.volume for x in self.first.first_moment) + tuple(
            x * self.first.volume for x in self.second.first_moment
        )

    @property
    def second_moment(self) -> Matrix:
        a, b = self.first, self.second
        r = a.dim
        ma, mb = a.second_moment, b.second_moment
        fa, fb = a.first_moment, b.first_moment
        rows = []
        for i in range(self.dim):
            row = []
            for j in range(self.dim):
                if i < r and j < r:
                    row.append(ma[i][j] * b.volume)
                elif i >= r and j >= r:
                    row.append(mb[i - r][j - r] * a.volume)
                elif i < r:
                    row.append(fa[i] * fb[j - r])
                else:
                    row.append(fb[i - r] * fa[j])
            rows.append(tuple(row))
        return tuple(rows)


Region = Union[VoronoiPolytope, Box, ProductRegion]


def moment_over(region: Region, z):
    """Integral of ``beta^T Z beta`` over the region, i.e. ``trace(Z M)``.

    Exact when ``z`` has rational entries, a float otherwise.
    """
    m = region.second_moment
    b = region.dim
    if isinstance(z, np.ndarray) or any(isinstance(x, float) for row in z for x in row):
        zf = np.asarray(z, dtype=float)
        mf = np.array([[float(x) for x in row] for row in m])
        return float(np.sum(zf * mf))
    return sum((Fraction(z[i][j]) * m[j][i] for i in range(b) for j in range(b)), Fraction(0))


def moment(z) -> Fraction:
    """Tropical moment ``I(Z)``: the second moment of the Voronoi cell."""
    zm = _as_matrix(z)
    return moment_over(voronoi_cell(zm), zm)


def jac_moment(g: PolarizedGraph) -> Fraction:
    if g.b1 == 0:
        return Fraction(0)
    return moment(cycle_gram(g))
