"""L_p quasi-norms (0 < p <= inf) and moduli of smoothness.

Norms of piecewise polynomials are computed exactly where possible (sup
norms via critical points, even integer p via polynomial integration) and
by adaptive quadrature otherwise.  Moduli are grid-search lower estimates
of the sup over step sizes, refined by a golden-section pass around the
best grid point; they are deterministic for a fixed resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InvalidP, InvalidT
from .poly import Polynomial, real_roots
from .ppf import PiecewisePoly, linear_combination, shift_argument, sup_norm_ppf

INF = float("inf")

_QUAD_RTOL = 1e-10
_GOLDEN_ITERS = 40
_GRID_POINTS = 2049  # x-grid for sup norms of sampled callables


@dataclass(frozen=True)
class ModulusEstimate:
    """Lower estimate of a modulus of smoothness.

    h_star is the maximizing step found; resolution is the h-grid size the
    estimate was computed with.
    """

    value: float
    k: int
    t: float
    p: float
    h_star: float
    resolution: int

    def to_dict(self) -> dict:
        return {"value": self.value, "k": self.k, "t": self.t,
                "p": "inf" if self.p == INF else self.p,
                "h_star": self.h_star, "resolution": self.resolution}


def _piece_segments(s: PiecewisePoly, lo: float, hi: float):
    """(piece, seg_lo, seg_hi) triples covering [lo, hi]."""
    z = s.breakpoints
    i0 = int(np.clip(np.searchsorted(z, lo, side="right") - 1, 0, s.n - 1))
    i1 = int(np.clip(np.searchsorted(z, hi, side="left") - 1, 0, s.n - 1))
    out = []
    for i in range(i0, i1 + 1):
        a = max(float(z[i]), lo)
        b = min(float(z[i + 1]), hi)
        if i == i0:
            a = lo
        if i == i1:
            b = hi
        if b > a:
            out.append((s.piece(i), a, b))
    return out


def _poly_power_integral(p: Polynomial, power: int, a: float, b: float) -> float:
    """Exact integral of p(x)^power over [a, b]."""
    c = p.coeffs
    acc = np.ones(1)
    for _ in range(power):
        acc = np.convolve(acc, c)
    anti = Polynomial(p.center, np.concatenate(([0.0], acc / np.arange(1, len(acc) + 1))))
    return anti(b) - anti(a)


def lp_quasinorm(s: PiecewisePoly, p: float,
                 interval: tuple[float, float] | None = None) -> float:
    """L_p quasi-norm of a ppf over an interval (default its domain).

    p = inf uses exact piecewise sup norms; even integer p integrates the
    polynomial powers exactly; all other p > 0 use adaptive quadrature with
    the piece roots passed as break points (relative tolerance 1e-10).
    """
    if p != INF and p <= 0:
        raise InvalidP(f"p must be positive or inf, got {p}")
    lo, hi = interval if interval is not None else s.domain
    if not hi > lo:
        raise ValueError("degenerate interval")
    if p == INF:
        return sup_norm_ppf(s, (lo, hi))
    total = 0.0
    exact_even = float(p).is_integer() and int(p) % 2 == 0
    for piece, a, b in _piece_segments(s, lo, hi):
        if exact_even:
            total += _poly_power_integral(piece, int(p), a, b)
        else:
            pts = real_roots(piece, a, b)
            pts = pts[(pts > a) & (pts < b)]
            val, _ = quad(lambda x: abs(piece(x)) ** p, a, b,
                          points=pts.tolist() if pts.size else None,
                          epsabs=0.0, epsrel=_QUAD_RTOL, limit=200)
            total += val
    return float(max(total, 0.0) ** (1.0 / p))


def lp_norm_callable(f, p: float, interval: tuple[float, float],
                     break_points=None, grid: int = 4097) -> float:
    """L_p norm of a sampled callable; a grid lower estimate for p = inf.

    For finite p the integral uses adaptive quadrature with the supplied
    break points (capped at quadpack's limit).
    """
    lo, hi = float(interval[0]), float(interval[1])
    if p == INF:
        x = np.linspace(lo, hi, grid)
        return float(np.max(np.abs(np.asarray(f(x), dtype=float))))
    if p <= 0:
        raise InvalidP(f"p must be positive or inf, got {p}")
    pts = None
    if break_points is not None:
        pts = [x for x in np.asarray(break_points, dtype=float) if lo < x < hi]
        if len(pts) > 500:
            pts = pts[:: len(pts) // 500 + 1]
    val, _ = quad(lambda x: abs(float(f(x))) ** p, lo, hi, points=pts,
                  epsabs=0.0, epsrel=1e-8, limit=max(60, (len(pts) if pts else 0) + 20))
    return float(max(val, 0.0) ** (1.0 / p))


def finite_diff(f, k: int, h: float, x: float,
                interval: tuple[float, float]) -> float:
    """Symmetric k-th difference with step h at x; zero when the stencil
    leaves the interval."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if h <= 0:
        raise ValueError("h must be positive")
    lo, hi = float(interval[0]), float(interval[1])
    if x - k * h / 2.0 < lo or x + k * h / 2.0 > hi:
        return 0.0
    total = 0.0
    for i in range(k + 1):
        w = math.comb(k, i) * (-1.0) ** (k - i)
        total += w * float(f(x - k * h / 2.0 + i * h))
    return total


def _difference_ppf(s: PiecewisePoly, k: int, h: float,
                    lo: float, hi: float) -> PiecewisePoly | None:
    """The k-th difference of a ppf as a ppf on the admissible x-range."""
    alo = lo + k * h / 2.0
    ahi = hi - k * h / 2.0
    if not ahi > alo + 1e-15 * (hi - lo):
        return None
    terms = []
    for i in range(k + 1):
        w = math.comb(k, i) * (-1.0) ** (k - i)
        terms.append((w, shift_argument(s, -k * h / 2.0 + i * h)))
    return linear_combination(terms, (alo, ahi))


def _difference_norm_ppf(s: PiecewisePoly, k: int, h: float, p: float,
                         interval: tuple[float, float]) -> float:
    d = _difference_ppf(s, k, h, interval[0], interval[1])
    if d is None:
        return 0.0
    return lp_quasinorm(d, p, d.domain)


def _difference_norm_callable(f, k: int, h: float, p: float,
                              interval: tuple[float, float]) -> float:
    lo, hi = interval
    alo = lo + k * h / 2.0
    ahi = hi - k * h / 2.0
    if not ahi > alo:
        return 0.0
    offsets = np.array([-k * h / 2.0 + i * h for i in range(k + 1)])
    weights = np.array([math.comb(k, i) * (-1.0) ** (k - i) for i in range(k + 1)])

    def delta(x):
        x = np.asarray(x, dtype=float)
        vals = np.zeros_like(x)
        for w, off in zip(weights, offsets):
            vals += w * np.asarray(f(x + off), dtype=float)
        return vals

    if p == INF:
        x = np.linspace(alo, ahi, _GRID_POINTS)
        return float(np.max(np.abs(delta(x))))
    # composite Gauss-Legendre: deterministic, good enough for lower estimates
    nodes, wts = np.polynomial.legendre.leggauss(16)
    panels = np.linspace(alo, ahi, 65)
    total = 0.0
    for a, b in zip(panels[:-1], panels[1:]):
        xm = 0.5 * (a + b) + 0.5 * (b - a) * nodes
        total += 0.5 * (b - a) * np.sum(wts * np.abs(delta(xm)) ** p)
    return float(total ** (1.0 / p))


def _golden_max(fun, lo: float, hi: float, iters: int = _GOLDEN_ITERS):
    """Golden-section maximization; returns (best_x, best_value)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    best_x, best_v = (c, fc) if fc >= fd else (d, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
        x, v = (c, fc) if fc >= fd else (d, fd)
        if v > best_v:
            best_x, best_v = x, v
    return best_x, best_v


def _sup_over_steps(norm_at, t: float, resolution: int):
    """Geometric h-grid plus golden refinement; returns (value, h_star)."""
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    gamma = (1.0 / resolution) ** (1.0 / (resolution - 1))
    hs = t * gamma ** np.arange(resolution)
    vals = np.array([norm_at(float(h)) for h in hs])
    j = int(np.argmax(vals))
    best_h, best_v = float(hs[j]), float(vals[j])
    lo = float(hs[j + 1]) if j + 1 < resolution else float(hs[-1] * gamma)
    hi = float(hs[j - 1]) if j > 0 else t
    x, v = _golden_max(norm_at, lo, hi)
    if v > best_v:
        best_h, best_v = x, v
    return best_v, best_h


def modulus(f, k: int, t: float, interval: tuple[float, float], p: float,
            resolution: int = 256) -> ModulusEstimate:
    """k-th modulus of smoothness over an interval: sup_{0<h<=t} of the
    L_p norm of the symmetric k-th difference.

    Piecewise polynomials get exact inner norms (the difference is itself a
    ppf); other callables are sampled on deterministic grids.  The result
    is a lower estimate of the true sup.
    """
    if t <= 0:
        raise InvalidT(f"t must be positive, got {t}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(f, PiecewisePoly):
        def norm_at(h):
            return _difference_norm_ppf(f, k, h, p, interval)
    else:
        def norm_at(h):
            return _difference_norm_callable(f, k, h, p, interval)
    value, h_star = _sup_over_steps(norm_at, t, resolution)
    return ModulusEstimate(float(value), k, float(t), p, float(h_star),
                           int(resolution))


def dt_modulus(f, k: int, t: float, p: float,
               resolution: int = 256) -> ModulusEstimate:
    """Modulus with position-dependent step h * sqrt(1 - x^2) on [-1, 1].

    The difference is zero wherever the stencil leaves [-1, 1].  Piecewise
    polynomials are evaluated through their extension semantics like any
    other callable.
    """
    if t <= 0:
        raise InvalidT(f"t must be positive, got {t}")
    if k < 1:
        raise ValueError("k must be >= 1")
    x_grid = np.linspace(-1.0, 1.0, _GRID_POINTS)
    phi_grid = np.sqrt(np.maximum(1.0 - x_grid**2, 0.0))
    weights = np.array([math.comb(k, i) * (-1.0) ** (k - i) for i in range(k + 1)])

    def delta_grid(h, xs, phis):
        steps = h * phis
        ok = (xs - k * steps / 2.0 >= -1.0) & (xs + k * steps / 2.0 <= 1.0)
        vals = np.zeros_like(xs)
        for i, w in enumerate(weights):
            pts = xs + (i - k / 2.0) * steps
            vals += w * np.asarray(f(np.clip(pts, -1.0, 1.0)), dtype=float)
        return np.where(ok, vals, 0.0)

    if p == INF:
        def norm_at(h):
            return float(np.max(np.abs(delta_grid(h, x_grid, phi_grid))))
    else:
        if p <= 0:
            raise InvalidP(f"p must be positive or inf, got {p}")
        nodes, wts = np.polynomial.legendre.leggauss(16)
        panels = np.linspace(-1.0, 1.0, 129)

        def norm_at(h):
            total = 0.0
            for a, b in zip(panels[:-1], panels[1:]):
                xm = 0.5 * (a + b) + 0.5 * (b - a) * nodes
                pm = np.sqrt(np.maximum(1.0 - xm**2, 0.0))
                total += 0.5 * (b - a) * np.sum(wts * np.abs(delta_grid(h, xm, pm)) ** p)
            return float(total ** (1.0 / p))

    value, h_star = _sup_over_steps(norm_at, t, resolution)
    return ModulusEstimate(float(value), k, float(t), p, float(h_star),
                           int(resolution))
