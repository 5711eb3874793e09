"""Partitions of an interval: construction, descriptors, and remesh checks.

A partition is a strictly increasing breakpoint vector on a domain [a, b].
The remesh relation compares a fine partition against a coarse one: every
fine interval meeting a coarse interval must be short relative to that
coarse interval and its neighbours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainMismatch, InvalidN

_MIN_GAP_REL = 1e-14
_REMESH_SLACK = 1e-12

UNIFORM = "uniform"
CHEBYSHEV = "chebyshev"
ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class Partition:
    """Strictly increasing breakpoints (z_0, ..., z_n) on [z_0, z_n].

    Index extension convention: z_j = z_0 for j < 0 and z_j = z_n for j > n.
    """

    breakpoints: np.ndarray = field(repr=False)

    def __post_init__(self):
        z = np.asarray(self.breakpoints, dtype=float).ravel()
        if z.size < 2:
            raise InvalidN("a partition needs at least 2 breakpoints")
        gaps = np.diff(z)
        width = z[-1] - z[0]
        if np.min(gaps) <= _MIN_GAP_REL * width:
            raise InvalidN("breakpoints must increase with gap > 1e-14 * width")
        z = z.copy()
        z.setflags(write=False)
        object.__setattr__(self, "breakpoints", z)

    @property
    def n(self) -> int:
        """Number of intervals."""
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

    def point(self, j: int) -> float:
        """Breakpoint with the index extension rule."""
        return float(self.breakpoints[min(max(j, 0), self.n)])

    def interval(self, j: int) -> tuple[float, float]:
        """J_j = [z_j, z_{j+1}] under the extension rule (may be empty)."""
        return (self.point(j), self.point(j + 1))

    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def to_dict(self) -> dict:
        return {"breakpoints": [float(z) for z in self.breakpoints]}

    @classmethod
    def from_dict(cls, data: dict) -> "Partition":
        return cls(np.asarray(data["breakpoints"], dtype=float))


@dataclass(frozen=True)
class RemeshVerdict:
    """Outcome of a remesh check.

    worst_ratio is the achieved maximum of (longest intersecting fine
    interval) / (smallest of the three candidate coarse lengths), attained
    at coarse interval index worst_j.
    """

    is_remesh: bool
    worst_j: int
    worst_ratio: float


def make_partition(kind: str, n: int, domain: tuple[float, float] = (-1.0, 1.0)) -> Partition:
    """Uniform or Chebyshev partition with n intervals on the domain."""
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    a, b = float(domain[0]), float(domain[1])
    kind = kind.lower()
    if kind == UNIFORM:
        z = a + (b - a) * np.arange(n + 1) / n
    elif kind == CHEBYSHEV:
        ref = -np.cos(np.pi * np.arange(n + 1) / n)
        z = a + (b - a) * (ref + 1.0) / 2.0
    else:
        raise InvalidN(f"unknown partition kind {kind!r}")
    z[0], z[-1] = a, b
    return Partition(z)


def scale(part: Partition) -> float:
    """Largest adjacent interval-length ratio |J_{j +- 1}| / |J_j|.

    Out-of-range neighbours have length 0 under the extension rule and so
    contribute ratio 0; a single-interval partition has scale 0.
    """
    lengths = part.lengths()
    if len(lengths) < 2:
        return 0.0
    left = lengths[:-1] / lengths[1:]
    right = lengths[1:] / lengths[:-1]
    return float(max(np.max(left), np.max(right)))


def core_intervals(part: Partition) -> list[tuple[float, float]]:
    """Midpoint intervals around each breakpoint, clipped at the domain ends.

    The j-th interval runs from the midpoint of J_{j-1} to the midpoint of
    J_j; together they cover [a, b] overlapping only at endpoints.
    """
    z = part.breakpoints
    mids = 0.5 * (z[:-1] + z[1:])
    left = np.concatenate(([z[0]], mids))
    right = np.concatenate((mids, [z[-1]]))
    return [(float(lo), float(hi)) for lo, hi in zip(left, right)]


def _check_same_domain(fine: Partition, coarse: Partition):
    width = max(coarse.b - coarse.a, fine.b - fine.a)
    tol = 1e-12 * width
    if abs(fine.a - coarse.a) > tol or abs(fine.b - coarse.b) > tol:
        raise DomainMismatch(
            f"domains differ: [{fine.a}, {fine.b}] vs [{coarse.a}, {coarse.b}]")


def is_delta_remesh(fine: Partition, coarse: Partition, delta: float) -> RemeshVerdict:
    """Check whether `fine` is a delta-remesh of `coarse`.

    For each coarse interval (z_j, z_{j+1}), the longest fine interval whose
    closure meets the open coarse interval must be at most delta times the
    smallest of |J_{j-1}|, |J_j|, |J_{j+1}|; out-of-range neighbours count
    as infinitely long (the definition overrides the usual extension rule).
    """
    if delta <= 0:
        raise InvalidN("delta must be positive")
    _check_same_domain(fine, coarse)
    t = fine.breakpoints
    tlen = np.diff(t)
    z = coarse.breakpoints
    zlen = np.diff(z)
    n = coarse.n
    worst_ratio = -np.inf
    worst_j = 0
    for j in range(n):
        i_lo = max(np.searchsorted(t, z[j], side="right") - 1, 0)
        i_hi = min(np.searchsorted(t, z[j + 1], side="left"), len(tlen))
        i_hi = max(i_hi, i_lo + 1)
        max_len = float(np.max(tlen[i_lo:i_hi]))
        neigh = zlen[max(j - 1, 0): j + 2]
        ratio = max_len / float(np.min(neigh))
        if ratio > worst_ratio:
            worst_ratio = ratio
            worst_j = j
    ok = worst_ratio <= delta * (1.0 + _REMESH_SLACK)
    return RemeshVerdict(bool(ok), worst_j, float(worst_ratio))


def _is_family(part: Partition, kind: str) -> bool:
    ref = make_partition(kind, part.n, part.domain)
    width = part.b - part.a
    return bool(np.max(np.abs(ref.breakpoints - part.breakpoints)) <= 1e-9 * width)


def default_remesh(coarse: Partition, delta: float, kind: str = ADAPTIVE) -> Partition:
    """Build a partition certified to be a delta-remesh of `coarse`.

    Uniform and Chebyshev outputs use the proven thresholds when the input
    belongs to the same family (m >= n/delta, resp. m >= max{25/delta, 1} n)
    and a sufficient gap bound otherwise; the adaptive kind subdivides each
    interval into equal parts sized for the neighbour minima.  Every output
    is validated before being returned.
    """
    if delta <= 0:
        raise InvalidN("delta must be positive")
    a, b = coarse.domain
    width = b - a
    lengths = coarse.lengths()
    min_len = float(np.min(lengths))
    kind = kind.lower()
    if kind == ADAPTIVE:
        pieces = []
        n = coarse.n
        for j in range(n):
            neigh = lengths[max(j - 1, 0): j + 2]
            parts = max(int(math.ceil(lengths[j] / (delta * float(np.min(neigh))))), 1)
            pieces.append(np.linspace(coarse.breakpoints[j],
                                      coarse.breakpoints[j + 1], parts + 1)[:-1])
        z = np.concatenate(pieces + [[b]])
        fine = Partition(z)
        verdict = is_delta_remesh(fine, coarse, delta)
        if not verdict.is_remesh:  # guard against pathological rounding
            return default_remesh(coarse, delta * 0.5, kind)
        return fine
    if kind == UNIFORM:
        m = int(math.ceil(width / (delta * min_len)))
    elif kind == CHEBYSHEV:
        if _is_family(coarse, CHEBYSHEV):
            m = int(math.ceil(max(25.0 / delta, 1.0) * coarse.n))
        else:
            # max Chebyshev gap is below width * sin(pi / (2m))
            m = int(math.ceil(math.pi * width / (2.0 * delta * min_len)))
    else:
        raise InvalidN(f"unknown remesh kind {kind!r}")
    m = max(m, 1)
    for _ in range(64):
        fine = make_partition(kind, m, coarse.domain)
        if is_delta_remesh(fine, coarse, delta).is_remesh:
            return fine
        m *= 2
    raise InvalidN("could not certify a remesh; delta may be degenerate")


def quarter_refine(part: Partition) -> Partition:
    """Insert the two quarter points of every interval (3n intervals total)."""
    z = part.breakpoints
    lengths = np.diff(z)
    left = z[:-1] + lengths / 4.0
    right = z[1:] - lengths / 4.0
    out = np.empty(3 * part.n + 1)
    out[0::3] = z
    out[1::3] = left
    out[2::3] = right
    return Partition(out)
