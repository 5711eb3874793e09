"""Piecewise polynomial functions: evaluation, calculus, and shape checks.

A PiecewisePoly is a partition plus one polynomial per interval.  Pieces
are stored as a padded coefficient matrix so that jumps, norms and
certificates can be computed for all pieces at once.  Each piece keeps its
own basis center; off-piece evaluation uses the polynomial extension of
the nearest piece, and interior knots evaluate to the right piece's value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSmoothness
from .partitions import Partition
from .poly import (Certificate, Polynomial, batched_abs_max, certify_nonneg,
                   rowwise_horner)


@dataclass(frozen=True)
class ShapeSpec:
    """Order of q-monotonicity to certify, with its tolerance.

    q = 1 is non-decreasing, q = 2 is convex; higher q requires the input
    to be C^{q-2} before the derivative test applies.
    """

    q: int
    tol: float = 1e-9

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be a positive integer")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")


@dataclass(frozen=True)
class ContinuityDefect:
    """Jump of the order-th derivative at an interior knot (right minus left)."""

    knot_index: int
    order: int
    jump: float


class PiecewisePoly:
    """Partition plus one polynomial per interval."""

    __slots__ = ("breakpoints", "coeffs", "centers")

    def __init__(self, breakpoints, pieces=None, *, coeffs=None, centers=None):
        part = breakpoints if isinstance(breakpoints, Partition) else Partition(
            np.asarray(breakpoints, dtype=float))
        z = part.breakpoints
        if pieces is not None:
            if len(pieces) != part.n:
                raise ValueError(f"need {part.n} pieces, got {len(pieces)}")
            width = max(len(p.coeffs) for p in pieces)
            coeffs = np.zeros((part.n, width))
            centers = np.empty(part.n)
            for i, p in enumerate(pieces):
                coeffs[i, : len(p.coeffs)] = p.coeffs
                centers[i] = p.center
        else:
            coeffs = np.asarray(coeffs, dtype=float)
            centers = np.asarray(centers, dtype=float)
            if coeffs.ndim != 2 or coeffs.shape[0] != part.n or centers.shape != (part.n,):
                raise ValueError("coeffs/centers shapes do not match the partition")
            coeffs = coeffs.copy()
            centers = centers.copy()
        coeffs.setflags(write=False)
        centers.setflags(write=False)
        object.__setattr__(self, "breakpoints", z)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "centers", centers)

    def __setattr__(self, name, value):
        raise AttributeError("PiecewisePoly is immutable")

    @property
    def partition(self) -> Partition:
        return Partition(self.breakpoints)

    @property
    def n(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def a(self) -> float:
        return float(self.breakpoints[0])

    @property
    def b(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def domain(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def piece(self, i: int) -> Polynomial:
        return Polynomial(self.centers[i], self.coeffs[i])

    def pieces(self) -> list[Polynomial]:
        return [self.piece(i) for i in range(self.n)]

    def piece_index(self, x) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float),
                              side="right") - 1
        return np.clip(idx, 0, self.n - 1)

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        idx = self.piece_index(xs)
        t = xs - self.centers[idx]
        acc = np.zeros_like(t)
        for k in range(self.coeffs.shape[1] - 1, -1, -1):
            acc = acc * t + self.coeffs[idx, k]
        return float(acc[0]) if scalar else acc

    def __eq__(self, other):
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return (np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.coeffs, other.coeffs)
                and np.array_equal(self.centers, other.centers))

    def __hash__(self):
        return hash((self.breakpoints.tobytes(), self.coeffs.tobytes(),
                     self.centers.tobytes()))

    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(z) for z in self.breakpoints],
            "pieces": [
                {"center": float(self.centers[i]),
                 "coeffs": [float(c) for c in self.coeffs[i]]}
                for i in range(self.n)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewisePoly":
        part = Partition(np.asarray(data["breakpoints"], dtype=float))
        pieces = [Polynomial(float(p["center"]), np.asarray(p["coeffs"], dtype=float))
                  for p in data["pieces"]]
        return cls(part, pieces)


def from_global_poly(p: Polynomial, partition: Partition) -> PiecewisePoly:
    """The ppf that equals one polynomial on every interval."""
    return PiecewisePoly(partition, [p] * partition.n)


def eval_ppf(s: PiecewisePoly, x):
    """Evaluate s at x; interior knots take the right piece, x = b the left."""
    return s(x)


def differentiate(s: PiecewisePoly, order: int = 1) -> PiecewisePoly:
    """Piecewise derivative on the same partition."""
    coeffs = s.coeffs
    for _ in range(order):
        if coeffs.shape[1] == 1:
            coeffs = np.zeros_like(coeffs)
            break
        coeffs = coeffs[:, 1:] * np.arange(1, coeffs.shape[1])
    return PiecewisePoly(Partition(s.breakpoints), coeffs=coeffs, centers=s.centers)


def antidifferentiate(s: PiecewisePoly, value_at_a: float = 0.0) -> PiecewisePoly:
    """Piecewise antiderivative, continuous across knots, with F(a) given."""
    pieces = []
    value = float(value_at_a)
    for i in range(s.n):
        p = s.piece(i).antiderivative(float(s.breakpoints[i]), value)
        pieces.append(p)
        value = p(float(s.breakpoints[i + 1]))
    return PiecewisePoly(Partition(s.breakpoints), pieces)


def _derivative_rows(coeffs: np.ndarray, order: int) -> np.ndarray:
    for _ in range(order):
        if coeffs.shape[1] == 1:
            return np.zeros_like(coeffs)
        coeffs = coeffs[:, 1:] * np.arange(1, coeffs.shape[1])
    return coeffs


def knot_jumps(s: PiecewisePoly, order: int) -> list[ContinuityDefect]:
    """Jumps of the order-th derivative at every interior knot."""
    if order < 0 or order > s.degree:
        raise ValueError(f"order must be in [0, {s.degree}]")
    return _jump_list(s, order)


def _jump_values(s: PiecewisePoly, order: int) -> np.ndarray:
    """Vector of right-minus-left derivative values at interior knots."""
    if s.n < 2:
        return np.empty(0)
    d = _derivative_rows(s.coeffs, order)
    z = s.breakpoints[1:-1]
    right = rowwise_horner(d[1:], s.centers[1:], z)
    left = rowwise_horner(d[:-1], s.centers[:-1], z)
    return right - left


def _jump_list(s: PiecewisePoly, order: int) -> list[ContinuityDefect]:
    vals = _jump_values(s, order)
    return [ContinuityDefect(j + 1, order, float(v)) for j, v in enumerate(vals)]


def _knot_scales(s: PiecewisePoly) -> np.ndarray:
    """1 + max |coeff| over the two pieces adjacent to each interior knot."""
    if s.n < 2:
        return np.empty(0)
    mag = np.max(np.abs(s.coeffs), axis=1)
    return 1.0 + np.maximum(mag[1:], mag[:-1])


def smoothness_class(s: PiecewisePoly, tol: float = 1e-9) -> int:
    """Largest mu with all jumps of orders 0..mu below the relative tolerance.

    Returns -1 for a discontinuous ppf and the piece degree when the pieces
    agree up to tolerance at every order (a single global polynomial).
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    if s.n < 2:
        return s.degree
    scales = _knot_scales(s) * tol
    for order in range(s.degree + 1):
        if np.any(np.abs(_jump_values(s, order)) > scales):
            return order - 1
    return s.degree


def is_q_monotone(s: PiecewisePoly, shape: ShapeSpec) -> bool:
    """Certified q-monotonicity check.

    q = 1: value jumps >= -tol at knots and s' certified nonnegative per
    piece.  q = 2: the same test applied to s', plus continuity of s.  For
    q >= 3 the input must be C^{q-2} (otherwise the derivative test does
    not match the divided-difference definition and we refuse to guess).
    An indeterminate nonnegativity certificate counts as failure.
    """
    q, tol = shape.q, shape.tol
    if q >= 3 and smoothness_class(s, tol) < q - 2:
        raise InsufficientSmoothness(
            f"q={q} requires smoothness class >= {q - 2}")
    scales = _knot_scales(s) * tol
    for order in range(q - 1):
        if np.any(np.abs(_jump_values(s, order)) > scales):
            return False
    if s.n >= 2 and np.any(_jump_values(s, q - 1) < -scales):
        return False
    dq = _derivative_rows(s.coeffs, q)
    piece_tol = tol * (1.0 + np.max(np.abs(s.coeffs), axis=1))
    for i in range(s.n):
        cert = certify_nonneg(
            Polynomial(s.centers[i], dq[i]),
            (float(s.breakpoints[i]), float(s.breakpoints[i + 1])),
            float(piece_tol[i]))
        if not cert.is_nonnegative:
            return False
    return True


def q_monotone_witness(s: PiecewisePoly, shape: ShapeSpec):
    """Point where the q-monotonicity certificate fails, or None."""
    q, tol = shape.q, shape.tol
    scales = _knot_scales(s) * tol
    for order in range(q - 1):
        vals = _jump_values(s, order)
        bad = np.nonzero(np.abs(vals) > scales)[0]
        if bad.size:
            j = int(bad[0])
            return {"kind": "discontinuity", "x": float(s.breakpoints[j + 1]),
                    "order": order, "jump": float(vals[j])}
    if s.n >= 2:
        vals = _jump_values(s, q - 1)
        bad = np.nonzero(vals < -scales)[0]
        if bad.size:
            j = int(bad[0])
            return {"kind": "negative_jump", "x": float(s.breakpoints[j + 1]),
                    "order": q - 1, "jump": float(vals[j])}
    dq = _derivative_rows(s.coeffs, q)
    piece_tol = tol * (1.0 + np.max(np.abs(s.coeffs), axis=1))
    for i in range(s.n):
        cert = certify_nonneg(
            Polynomial(s.centers[i], dq[i]),
            (float(s.breakpoints[i]), float(s.breakpoints[i + 1])),
            float(piece_tol[i]))
        if cert.status == "negative":
            return {"kind": "negative_derivative", "x": cert.witness,
                    "order": q, "value": cert.value}
        if cert.status == "indeterminate":
            return {"kind": "indeterminate", "piece": i, "order": q}
    return None


def certify_nonneg_ppf(s: PiecewisePoly, tol: float = 0.0) -> Certificate:
    """Certify s >= -tol piecewise on its whole domain."""
    for i in range(s.n):
        cert = certify_nonneg(
            s.piece(i), (float(s.breakpoints[i]), float(s.breakpoints[i + 1])), tol)
        if not cert.is_nonnegative:
            return cert
    return Certificate("nonnegative")


def sup_norm_ppf(s: PiecewisePoly, interval: tuple[float, float] | None = None) -> float:
    """Exact sup of |s| over the given interval (default the whole domain)."""
    lo, hi = interval if interval is not None else s.domain
    if not hi > lo:
        raise ValueError("degenerate interval")
    z = s.breakpoints
    i0 = int(np.clip(np.searchsorted(z, lo, side="right") - 1, 0, s.n - 1))
    i1 = int(np.clip(np.searchsorted(z, hi, side="left") - 1, 0, s.n - 1))
    rows = np.arange(i0, i1 + 1)
    los = np.maximum(z[rows], lo)
    his = np.minimum(z[rows + 1], hi)
    his = np.maximum(his, los)  # guard zero-width clips
    vals = batched_abs_max(s.coeffs[rows], s.centers[rows], los, his)
    return float(np.max(vals))


# ---------------------------------------------------------------------------
# Algebra used by the smoothing and modulus machinery
# ---------------------------------------------------------------------------

def shift_argument(s: PiecewisePoly, offset: float) -> PiecewisePoly:
    """h with h(x) = s(x + offset); exact (centers shift, coefficients don't)."""
    return PiecewisePoly(Partition(s.breakpoints - offset),
                         coeffs=s.coeffs, centers=s.centers - offset)


def reflect(s: PiecewisePoly) -> PiecewisePoly:
    """h with h(x) = s(-x); exact."""
    signs = (-1.0) ** np.arange(s.coeffs.shape[1])
    return PiecewisePoly(Partition(-s.breakpoints[::-1]),
                         coeffs=(s.coeffs * signs)[::-1],
                         centers=-s.centers[::-1])


def scale_values(s: PiecewisePoly, factor: float) -> PiecewisePoly:
    return PiecewisePoly(Partition(s.breakpoints), coeffs=s.coeffs * factor,
                         centers=s.centers)


def map_affine(s: PiecewisePoly, alpha: float, beta: float) -> PiecewisePoly:
    """h with h(y) = s(alpha * y + beta) for alpha > 0."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    powers = alpha ** np.arange(s.coeffs.shape[1])
    return PiecewisePoly(Partition((s.breakpoints - beta) / alpha),
                         coeffs=s.coeffs * powers,
                         centers=(s.centers - beta) / alpha)


def restrict(s: PiecewisePoly, lo: float, hi: float) -> PiecewisePoly:
    """Restriction to [lo, hi] (extends the boundary pieces if needed)."""
    inner = s.breakpoints[(s.breakpoints > lo) & (s.breakpoints < hi)]
    z = np.concatenate(([lo], inner, [hi]))
    mids = 0.5 * (z[:-1] + z[1:])
    idx = s.piece_index(mids)
    return PiecewisePoly(Partition(z), coeffs=s.coeffs[idx], centers=s.centers[idx])


def insert_breakpoints(s: PiecewisePoly, points) -> PiecewisePoly:
    """Same function on a refined partition; pieces are copied exactly."""
    pts = np.asarray(points, dtype=float)
    pts = pts[(pts > s.a) & (pts < s.b)]
    z = np.unique(np.concatenate((s.breakpoints, pts)))
    mids = 0.5 * (z[:-1] + z[1:])
    idx = s.piece_index(mids)
    return PiecewisePoly(Partition(z), coeffs=s.coeffs[idx], centers=s.centers[idx])


def _merged_breakpoints(parts: list[np.ndarray], lo: float, hi: float) -> np.ndarray:
    pts = np.concatenate([p[(p > lo) & (p < hi)] for p in parts] + [[lo, hi]])
    pts = np.unique(pts)
    # collapse near-duplicates so the Partition invariant holds
    width = hi - lo
    keep = np.concatenate(([True], np.diff(pts) > 1e-13 * width))
    pts = pts[keep]
    pts[-1] = hi
    return pts


def linear_combination(terms: list[tuple[float, PiecewisePoly]],
                       interval: tuple[float, float] | None = None) -> PiecewisePoly:
    """sum w_t * s_t on a merged partition over the given interval.

    Pieces of each term are recentered to the left endpoint of every merged
    interval before summation; this is the only lossy step.
    """
    if not terms:
        raise ValueError("need at least one term")
    if interval is None:
        lo = min(s.a for _, s in terms)
        hi = max(s.b for _, s in terms)
    else:
        lo, hi = float(interval[0]), float(interval[1])
    z = _merged_breakpoints([s.breakpoints for _, s in terms], lo, hi)
    mids = 0.5 * (z[:-1] + z[1:])
    width = max(len(s.coeffs[0]) for _, s in terms)
    coeffs = np.zeros((len(z) - 1, width))
    for w, s in terms:
        idx = s.piece_index(mids)
        for i, pi in enumerate(idx):
            p = s.piece(int(pi)).recenter(float(z[i]))
            coeffs[i, : len(p.coeffs)] += w * p.coeffs
    return PiecewisePoly(Partition(z), coeffs=coeffs, centers=z[:-1].copy())


def subtract(s1: PiecewisePoly, s2: PiecewisePoly,
             interval: tuple[float, float] | None = None) -> PiecewisePoly:
    return linear_combination([(1.0, s1), (-1.0, s2)], interval)
