"""Riemann theta numerics and the I-invariant of complex abelian varieties.

Everything here is floating point.  The theta sum is truncated to an
ellipsoid whose radius comes from the tail bound of Deconinck, Heil,
Bobenko, van Hoeij and Schmies (Math. Comp. 2004).  Integrals over a
fundamental domain are estimated with scrambled Sobol points in independent
batches; the reported value is the median of the batch means and the error
is derived from their spread.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gamma, gammaincc
from scipy.stats import qmc

from .errors import InputError, NonConvergent
from .tropical import Box, ProductRegion, VoronoiPolytope, moment, moment_over, voronoi_cell

DEFAULT_TOL = 1e-12
MAX_POINTS = 2_000_000
LOG2 = math.log(2.0)


# Siegel matrices ------------------------------------------------------------


def siegel(omega) -> np.ndarray:
    """Validate a period matrix: symmetric with positive definite imaginary part."""
    om = np.atleast_2d(np.asarray(omega, dtype=complex))
    if om.shape[0] != om.shape[1]:
        raise InputError("period matrix must be square")
    if np.linalg.norm(om - om.T) > 1e-12 * max(1.0, np.linalg.norm(om)):
        raise InputError("period matrix must be symmetric")
    y = (om.imag + om.imag.T) / 2
    if np.linalg.eigvalsh(y).min() <= 0:
        raise InputError("imaginary part must be positive definite")
    return (om + om.T) / 2


def _shortest_sq(y: np.ndarray) -> float:
    """Squared length of the shortest nonzero lattice vector for the form y."""
    g = len(y)
    best = float(np.min(np.diag(y)))
    yinv = np.linalg.inv(y)
    bounds = [int(math.floor(math.sqrt(best * yinv[i, i]) + 1e-9)) for i in range(g)]
    ranges = [np.arange(-b, b + 1) for b in bounds]
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), -1).reshape(-1, g)
    grid = grid[np.any(grid != 0, axis=1)]
    if len(grid):
        best = min(best, float(np.min(np.einsum("ni,ij,nj->n", grid, y, grid))))
    return best


def tail_bound(radius: float, g: int, rho: float) -> float:
    """Upper bound for the omitted part of the oscillatory theta sum."""
    s = radius - rho / 2
    return (g / 2) * (2 / rho) ** g * gamma(g / 2) * gammaincc(g / 2, s * s)


def truncation_radius(g: int, rho: float, tol: float, cap: float = 60.0) -> float:
    lo = math.sqrt(g) + rho / 2
    if tail_bound(lo, g, rho) <= tol:
        return lo
    hi = lo
    while tail_bound(hi, g, rho) > tol:
        hi *= 1.5
        if hi > cap:
            raise NonConvergent(f"theta tail bound cannot reach tol={tol}")
    for _ in range(60):
        mid = (lo + hi) / 2
        if tail_bound(mid, g, rho) > tol:
            lo = mid
        else:
            hi = mid
    return hi


class ThetaEvaluator:
    """Theta sums for one period matrix, vectorised over many arguments.

    The summation set covers the truncation ellipsoid for every offset in
    the unit box, so one set of lattice points serves all arguments.
    """

    def __init__(self, omega, tol: float = DEFAULT_TOL):
        if not tol > 0:
            raise InputError("tol must be positive")
        om = siegel(omega)
        self.omega = om
        self.g = g = om.shape[0]
        self.x = om.real
        self.y = (om.imag + om.imag.T) / 2
        self.yinv = np.linalg.inv(self.y)
        self.logdet_y = float(np.linalg.slogdet(self.y)[1])
        rho = math.sqrt(math.pi * _shortest_sq(self.y))
        self.radius = truncation_radius(g, rho, tol)
        lam = float(np.linalg.eigvalsh(self.y).max())
        outer = self.radius + math.sqrt(math.pi * lam * g / 4)
        bounds = [int(math.ceil(outer * math.sqrt(self.yinv[i, i] / math.pi))) for i in range(g)]
        if math.prod(2 * b + 1 for b in bounds) > MAX_POINTS:
            raise NonConvergent("theta truncation needs too many lattice points")
        ranges = [np.arange(-b, b + 1) for b in bounds]
        grid = np.stack(np.meshgrid(*ranges, indexing="ij"), -1).reshape(-1, g).astype(float)
        q = np.einsum("ni,ij,nj->n", grid, self.y, grid)
        self.points = grid[math.pi * q < outer * outer]
        self._my = self.points @ self.y
        self._mym = np.einsum("ni,ni->n", self._my, self.points)
        self._mx = self.points @ self.x
        self._mxm = np.einsum("ni,ni->n", self._mx, self.points)

    def _parts(self, z: np.ndarray, chunk: int = 4096):
        """Yield (c, log-magnitude offset, oscillatory sum) per chunk of arguments."""
        for start in range(0, len(z), chunk):
            zc = z[start:start + chunk]
            c = zc.imag @ self.yinv
            k = np.rint(c)
            f = c - k
            fy = f @ self.y
            # -pi (m+f)^T Y (m+f)
            mag = -math.pi * (self._mym[None, :] + 2 * fy @ self.points.T + np.einsum("ni,ni->n", fy, f)[:, None])
            # phase for n = m - k: pi n^T X n + 2 pi n^T Re z
            kx = k @ self.x
            ph = math.pi * (self._mxm[None, :] - 2 * kx @ self.points.T + np.einsum("ni,ni->n", kx, k)[:, None])
            ph += 2 * math.pi * (zc.real @ self.points.T - np.einsum("ni,ni->n", k, zc.real)[:, None])
            top = mag.max(axis=1)
            s = np.sum(np.exp(mag - top[:, None] + 1j * ph), axis=1)
            yield c, top, s

    def log_abs(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        out = []
        for c, top, s in self._parts(z):
            base = math.pi * np.einsum("ni,ij,nj->n", c, self.y, c)
            out.append(base + top + np.log(np.abs(s)))
        return np.concatenate(out)

    def log_norm(self, z) -> np.ndarray:
        """log of the normalised theta ``(det Y)^(1/4) exp(-pi y Y^-1 y) |theta|``."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        out = []
        for _, top, s in self._parts(z):
            out.append(0.25 * self.logdet_y + top + np.log(np.abs(s)))
        return np.concatenate(out)

    def value(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        out = []
        for c, top, s in self._parts(z):
            base = math.pi * np.einsum("ni,ij,nj->n", c, self.y, c)
            out.append(np.exp(base + top) * s)
        return np.concatenate(out)


def theta(z, omega, tol: float = DEFAULT_TOL) -> complex:
    return complex(ThetaEvaluator(omega, tol).value(np.atleast_1d(z))[0])


def theta_norm(z, omega, tol: float = DEFAULT_TOL) -> float:
    return float(np.exp(ThetaEvaluator(omega, tol).log_norm(np.atleast_1d(z))[0]))


# Monte Carlo ------------------------------------------------------------------


@dataclass(frozen=True)
class MCConfig:
    samples: int = 100_000
    seed: int = 0
    batches: int = 32

    def __post_init__(self):
        if self.samples < 1000:
            raise InputError("MC needs at least 1000 samples")
        if self.batches < 2:
            raise InputError("MC needs at least two batches")


@dataclass(frozen=True)
class MCEstimate:
    value: float
    sigma: float
    samples: int
    batch_means: tuple[float, ...] = field(default=(), repr=False)


def _batch_points(mc: MCConfig, dim: int) -> list[np.ndarray]:
    per = max(16, mc.samples // mc.batches)
    m = int(math.ceil(math.log2(per)))
    children = np.random.SeedSequence(mc.seed).spawn(mc.batches)
    pts = []
    for child in children:
        eng = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(child))
        pts.append(eng.random_base2(m))
    return pts


def _summarize(means: list[float], n: int) -> MCEstimate:
    arr = np.array(means)
    # median of the batch means; its spread scaled by the median's efficiency factor
    sigma = float(np.std(arr, ddof=1) / math.sqrt(len(arr)) * math.sqrt(math.pi / 2))
    return MCEstimate(float(np.median(arr)), sigma, n, tuple(means))


class _Sampler:
    """Maps uniform points in a cube onto a region of lattice coordinates."""

    def __init__(self, region):
        self.region = region
        if isinstance(region, Box):
            self.dim = region.dim
            self.lower = np.array([float(x) for x in region.lower])
            self.width = np.array([float(u - l) for l, u in zip(region.lower, region.upper)])
        elif isinstance(region, VoronoiPolytope):
            self.dim = region.dim + 1
            self.simplices = np.array(region.simplex_points())
            vols = np.abs([np.linalg.det(s[1:] - s[0]) for s in self.simplices])
            self.cum = np.cumsum(vols / vols.sum())
        elif isinstance(region, ProductRegion):
            self.parts = [_Sampler(region.first), _Sampler(region.second)]
            self.dim = sum(p.dim for p in self.parts)
        else:
            raise InputError(f"unsupported region {type(region).__name__}")

    def __call__(self, u: np.ndarray) -> np.ndarray:
        reg = self.region
        if isinstance(reg, Box):
            return self.lower + u * self.width
        if isinstance(reg, VoronoiPolytope):
            b = reg.dim
            idx = np.minimum(np.searchsorted(self.cum, u[:, 0], side="right"), len(self.cum) - 1)
            s = self.simplices[idx]
            # uniform point in a simplex from sorted spacings of b uniforms
            srt = np.sort(u[:, 1:], axis=1)
            gaps = np.diff(np.concatenate([np.zeros((len(u), 1)), srt, np.ones((len(u), 1))], axis=1), axis=1)
            return np.einsum("nk,nki->ni", gaps, s[:, : b + 1])
        out, col = [], 0
        for p in self.parts:
            out.append(p(u[:, col:col + p.dim]))
            col += p.dim
        return np.concatenate(out, axis=1)


def _domain_mean(ev: ThetaEvaluator, region, mc: MCConfig, which: str = "log_abs") -> MCEstimate:
    """Batch estimates of the mean of log|theta| (or |theta|_norm^2) over F(region, Omega)."""
    g = ev.g
    sampler = _Sampler(region)
    means = []
    total = 0
    for u in _batch_points(mc, g + sampler.dim):
        alpha = u[:, :g] - 0.5
        beta = sampler(u[:, g:])
        z = alpha + beta @ ev.omega.T
        if which == "log_abs":
            vals = ev.log_abs(z)
        else:
            vals = np.exp(2 * ev.log_norm(z))
        means.append(float(np.mean(vals)))
        total += len(u)
    return _summarize(means, total)


def l2_norm_check(omega, mc: MCConfig = MCConfig(), tol: float = DEFAULT_TOL) -> MCEstimate:
    """Mean of the squared normalised theta over the torus (exactly 2^(-g/2))."""
    ev = ThetaEvaluator(omega, tol)
    return _domain_mean(ev, Box.unit(ev.g), mc, which="norm2")


def i_invariant(omega, mc: MCConfig = MCConfig(), domain=None, tol: float = DEFAULT_TOL) -> MCEstimate:
    """The I-invariant ``-int log||theta|| - (g/4) log 2``.

    Uses the fundamental domain ``{alpha + Omega beta}`` with ``alpha`` in the
    unit box and ``beta`` in ``domain`` (the unit box by default):
    ``2I = -(g/2) log 2 - (1/2) log det Y + 2 pi I_W(Y) - 2 E log|theta|``.
    """
    ev = ThetaEvaluator(omega, tol)
    g = ev.g
    region = domain if domain is not None else Box.unit(g)
    est = _domain_mean(ev, region, mc)
    iw = moment_over(region, ev.y)
    two_i = -(g / 2) * LOG2 - 0.5 * ev.logdet_y + 2 * math.pi * iw
    vals = [(two_i - 2 * m) / 2 for m in est.batch_means]
    return _summarize(vals, est.samples)


# period families ---------------------------------------------------------------


@dataclass(frozen=True)
class PeriodFamily:
    """``Omega(t) = A log(t) / (2 pi i) + B(t)`` with ``A = diag(A0, 0)``.

    ``coeffs`` maps the power ``k`` to the complex matrix ``B_k``.
    """
    g: int
    r: int
    a0: tuple[tuple[int, ...], ...]
    coeffs: tuple[tuple[int, np.ndarray], ...]
    radius: float = 0.5

    def __post_init__(self):
        g, r = self.g, self.r
        if not 0 <= r <= g or g < 1:
            raise InputError("need 0 <= r <= g and g >= 1")
        if len(self.a0) != r or any(len(row) != r for row in self.a0):
            raise InputError("A0 must be r x r")
        if r:
            from .exact import leading_minors_positive

            if any(self.a0[i][j] != self.a0[j][i] for i in range(r) for j in range(r)):
                raise InputError("A0 must be symmetric")
            if not leading_minors_positive([[Fraction(x) for x in row] for row in self.a0]):
                raise InputError("A0 must be positive definite")
        for _, mat in self.coeffs:
            if mat.shape != (g, g):
                raise InputError("B coefficients must be g x g")
        if r < g:
            ab = self.b(0.0).imag[r:, r:]
            if np.linalg.eigvalsh((ab + ab.T) / 2).min() <= 0:
                raise InputError("Im B(0) on the abelian block must be positive definite")

    @classmethod
    def from_dict(cls, raw: dict) -> "PeriodFamily":
        try:
            g = int(raw["g"])
            r = int(raw.get("r", len(raw.get("A0", []))))
            a0 = tuple(tuple(int(x) for x in row) for row in raw.get("A0", []))
            coeffs = []
            for term in raw.get("B", []):
                re = np.array(term.get("re", np.zeros((g, g))), dtype=float)
                im = np.array(term.get("im", np.zeros((g, g))), dtype=float)
                coeffs.append((int(term.get("k", 0)), re + 1j * im))
            radius = float(raw.get("radius", 0.5))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed period family: {exc}") from exc
        return cls(g, r, a0, tuple(coeffs), radius)

    @property
    def a(self) -> np.ndarray:
        out = np.zeros((self.g, self.g))
        out[: self.r, : self.r] = np.array(self.a0, dtype=float).reshape(self.r, self.r)
        return out

    def b(self, t: complex) -> np.ndarray:
        out = np.zeros((self.g, self.g), dtype=complex)
        for k, mat in self.coeffs:
            out = out + mat * (t ** k)
        return out

    def omega(self, t: complex) -> np.ndarray:
        t = complex(t)
        if not 0 < abs(t) < self.radius:
            raise InputError(f"|t| must lie in (0, {self.radius})")
        return self.a * (math.log(abs(t)) + 1j * np.angle(t)) / (2j * math.pi) + self.b(t)

    def im_omega(self, t: complex) -> np.ndarray:
        return -self.a * math.log(abs(t)) / (2 * math.pi) + self.b(t).imag

    def fundamental_region(self):
        """``Vor(A0) x Vor(Im B(0))`` on the abelian block, in lattice coordinates."""
        parts = []
        if self.r:
            parts.append(voronoi_cell(self.a0))
        if self.r < self.g:
            yb = self.b(0.0).imag[self.r:, self.r:]
            parts.append(voronoi_cell(_rational_approx(yb)))
        if len(parts) == 1:
            return parts[0]
        return ProductRegion(parts[0], parts[1])


def _rational_approx(m: np.ndarray, den: int = 10**6) -> list[list[Fraction]]:
    """Symmetric rational rounding, used only to shape a fundamental domain."""
    s = (m + m.T) / 2
    return [[Fraction(round(float(x) * den), den) for x in row] for row in s]


def tate_family(b: complex = 1j, radius: float = 0.5) -> PeriodFamily:
    return PeriodFamily(1, 1, ((1,),), ((0, np.array([[b]], dtype=complex)),), radius)


def log_theta_fiber_integral(family: PeriodFamily, t: complex, mc: MCConfig = MCConfig(),
                             tol: float = DEFAULT_TOL) -> MCEstimate:
    ev = ThetaEvaluator(family.omega(t), tol)
    return _domain_mean(ev, family.fundamental_region(), mc)


@dataclass(frozen=True)
class ScanRow:
    t: complex
    two_i: float
    sigma: float
    moment_log_t: float
    half_logdet: float
    h: float


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    limit: float
    error: float


DEFAULT_SCHEDULE = tuple(10.0 ** -k for k in range(2, 9))


def degeneration_scan(family: PeriodFamily, schedule: Sequence[complex] = DEFAULT_SCHEDULE,
                      mc: MCConfig = MCConfig(), tol: float = DEFAULT_TOL) -> ScanResult:
    """Tabulate ``h(t) = 2I + I(Sigma) log|t| + (1/2) log det Im Omega(t)``.

    The same Sobol points are used at every ``t``, which keeps the sequence
    smooth.  The limit is the mean of the last two values; the error adds
    half their difference to the Monte Carlo error of the last row.
    """
    region = family.fundamental_region()
    i_sigma = float(moment(family.a0)) if family.r else 0.0
    rows = []
    for t in schedule:
        est = i_invariant(family.omega(t), mc, domain=region, tol=tol)
        y = family.im_omega(t)
        half_logdet = 0.5 * float(np.linalg.slogdet(y)[1])
        mlt = i_sigma * math.log(abs(t))
        two_i = 2 * est.value
        rows.append(ScanRow(complex(t), two_i, 2 * est.sigma, mlt, half_logdet, two_i + mlt + half_logdet))
    if len(rows) >= 2:
        a, b = rows[-2], rows[-1]
        limit = (a.h + b.h) / 2
        error = abs(a.h - b.h) / 2 + max(a.sigma, b.sigma)
    else:
        limit, error = rows[-1].h, rows[-1].sigma
    return ScanResult(tuple(rows), limit, error)


@dataclass(frozen=True)
class LimitConstant:
    value: float
    sigma: float
    parts: dict


def limit_constant(family: PeriodFamily, mc: MCConfig = MCConfig(), tol: float = DEFAULT_TOL) -> LimitConstant:
    """Closed form for the limit of ``h(t)`` with a Schur-complement term."""
    g, r = family.g, family.r
    b0 = family.b(0.0)
    q = 2 * math.pi * b0.imag
    q = (q + q.T) / 2
    parts = {"log2": -(r / 2) * LOG2}
    sigma = 0.0
    if r < g:
        p = b0[r:, r:]
        est = i_invariant(p, mc, tol=tol)
        parts["two_I_P"] = 2 * est.value
        sigma = 2 * est.sigma
        parts["half_logdet"] = 0.5 * float(np.linalg.slogdet(p.imag)[1])
    else:
        parts["two_I_P"] = 0.0
        parts["half_logdet"] = 0.0
    if r:
        schur = q[:r, :r]
        if r < g:
            schur = schur - q[:r, r:] @ np.linalg.solve(q[r:, r:], q[r:, :r])
        parts["schur_moment"] = float(moment_over(voronoi_cell(family.a0), schur))
    else:
        parts["schur_moment"] = 0.0
    return LimitConstant(sum(parts.values()), sigma, parts)


@dataclass(frozen=True)
class GrowthFit:
    logdet: float
    c: float
    exponent: float


def log_det_growth(family: PeriodFamily, t: complex | None = None,
                   schedule: Sequence[float] | None = None) -> GrowthFit:
    """Fit ``log det Im Omega(t) = log c + r log L + a/L + b/L^2`` with ``L = -log|t|``.

    The fit runs over a geometric schedule from 1e-3 down to 1e-300, where
    the correction terms are small enough to pin the exponent.
    """
    sched = schedule or [10.0 ** -k for k in (3, 5, 8, 12, 20, 35, 60, 100, 160, 230, 300)]
    sched = [s for s in sched if 0 < s < family.radius]
    ls = np.array([-math.log(s) for s in sched])
    vals = np.array([np.linalg.slogdet(family.im_omega(s))[1] for s in sched])
    design = np.column_stack([np.ones_like(ls), np.log(ls), 1 / ls, 1 / ls ** 2])
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    t0 = sched[0] if t is None else t
    logdet = float(np.linalg.slogdet(family.im_omega(t0))[1])
    return GrowthFit(logdet, float(math.exp(coef[0])), float(coef[1]))
