"""Dense polynomials in a shifted local basis, with certified analysis.

A polynomial is stored as coefficients of (x - center)^k.  The shifted
basis keeps coefficients well scaled on short intervals, which is where
all of the smoothing machinery operates.  Nonnegativity certificates use
the Bernstein form on an interval with adaptive subdivision; sup-norms
are exact up to root finding of the derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Subdivision budget for nonnegativity certification.  Coefficients of the
# subdivided Bernstein form converge quadratically to function values, so 40
# halvings put the gap far below any tolerance used here.
SUBDIVISION_DEPTH = 40

_ROOT_IMAG_TOL = 1e-9
_ROOT_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class Polynomial:
    """Polynomial  p(x) = sum_k coeffs[k] * (x - center)^k.

    Trailing zero coefficients are permitted: ``degree`` is an upper bound.
    Evaluation is defined for every real x (polynomial extension).
    """

    center: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d array")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", float(self.center))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Evaluate by Horner's rule; accepts scalars or arrays."""
        t = np.asarray(x, dtype=float) - self.center
        acc = np.zeros_like(t)
        for c in self.coeffs[::-1]:
            acc = acc * t + c
        if np.isscalar(x) or np.ndim(x) == 0:
            return float(acc)
        return acc

    def derivative(self, order: int = 1) -> "Polynomial":
        c = self.coeffs
        for _ in range(order):
            if len(c) == 1:
                c = np.zeros(1)
                break
            c = c[1:] * np.arange(1, len(c))
        return Polynomial(self.center, c)

    def derivative_at(self, x: float, order: int = 1) -> float:
        return self.derivative(order)(x)

    def antiderivative(self, at: float, value: float) -> "Polynomial":
        """Antiderivative F with F(at) = value; center is preserved."""
        c = np.concatenate(([0.0], self.coeffs / np.arange(1, len(self.coeffs) + 1)))
        f = Polynomial(self.center, c)
        c = c.copy()
        c[0] = value - f(at)
        return Polynomial(self.center, c)

    def recenter(self, new_center: float) -> "Polynomial":
        """Taylor shift to a new basis origin; exact in exact arithmetic."""
        if new_center == self.center:
            return self
        d = self.degree
        out = np.zeros(d + 1)
        for k in range(d, -1, -1):
            fk = self.derivative(k)
            out[k] = fk(new_center) / math.factorial(k)
        return Polynomial(new_center, out)

    def scale_argument(self, alpha: float, beta: float) -> "Polynomial":
        """Return q with q(y) = p(alpha*y + beta).

        The affine substitution maps the center exactly:
        q is centered at (center - beta)/alpha with coeffs[k] * alpha^k.
        """
        new_center = (self.center - beta) / alpha
        k = np.arange(len(self.coeffs))
        return Polynomial(new_center, self.coeffs * alpha**k)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        o = other.recenter(self.center)
        n = max(len(self.coeffs), len(o.coeffs))
        c = np.zeros(n)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(o.coeffs)] += o.coeffs
        return Polynomial(self.center, c)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "Polynomial":
        return Polynomial(self.center, self.coeffs * scalar)

    def almost_equal(self, other: "Polynomial", rtol: float = 1e-12) -> bool:
        """Coefficient-wise comparison after recentering, relative to scale."""
        o = other.recenter(self.center)
        n = max(len(self.coeffs), len(o.coeffs))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(o.coeffs)] = o.coeffs
        scale = 1.0 + max(np.max(np.abs(a)), np.max(np.abs(b)))
        return bool(np.max(np.abs(a - b)) <= rtol * scale)


def real_roots(p: Polynomial, lo: float, hi: float) -> np.ndarray:
    """Real roots of p inside [lo, hi], via the companion matrix.

    Leading coefficients below 1e-13 of the coefficient scale are dropped
    before forming the companion matrix; the corresponding far-away roots
    cannot matter inside a bounded interval.
    """
    c = np.asarray(p.coeffs, dtype=float)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.empty(0)
    ncoef = len(c)
    while ncoef > 1 and abs(c[ncoef - 1]) <= 1e-13 * scale:
        ncoef -= 1
    c = c[:ncoef]
    if ncoef <= 1:
        return np.empty(0)
    roots = np.roots(c[::-1])
    re, im = roots.real, roots.imag
    keep = np.abs(im) <= _ROOT_IMAG_TOL * (1.0 + np.abs(re))
    r = re[keep] + p.center
    width = hi - lo
    pad = _ROOT_EDGE_TOL * (abs(lo) + abs(hi) + width)
    r = r[(r >= lo - pad) & (r <= hi + pad)]
    # one Newton polish step against the full polynomial
    if r.size:
        dp = p.derivative()
        fval = p(r)
        dval = dp(r)
        ok = np.abs(dval) > 0
        r = np.where(ok, r - np.where(ok, fval, 0.0) / np.where(ok, dval, 1.0), r)
        r = np.clip(r, lo, hi)
    return np.sort(r)


def sup_norm_poly(p: Polynomial, interval: tuple[float, float]) -> float:
    """Exact C-norm of p on [a, b]: endpoints plus critical points."""
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("degenerate interval")
    cand = [a, b]
    cand.extend(real_roots(p.derivative(), a, b).tolist())
    return float(np.max(np.abs(p(np.array(cand)))))


def extremum(p: Polynomial, interval: tuple[float, float], mode: str = "min"):
    """(location, value) of the min or max of p on the closed interval."""
    a, b = float(interval[0]), float(interval[1])
    cand = np.array([a, b] + real_roots(p.derivative(), a, b).tolist())
    vals = p(cand)
    i = int(np.argmin(vals)) if mode == "min" else int(np.argmax(vals))
    return float(cand[i]), float(vals[i])


# ---------------------------------------------------------------------------
# Bernstein form and nonnegativity certificates
# ---------------------------------------------------------------------------

def _monomial_to_bernstein_matrix(n: int) -> np.ndarray:
    """Matrix M with b = M @ m for p(t) = sum m_j t^j on [0,1], degree n."""
    M = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(i + 1):
            M[i, j] = math.comb(i, j) / math.comb(n, j)
    return M


_BMAT_CACHE: dict[int, np.ndarray] = {}


def _bmat(n: int) -> np.ndarray:
    if n not in _BMAT_CACHE:
        _BMAT_CACHE[n] = _monomial_to_bernstein_matrix(n)
    return _BMAT_CACHE[n]


def monomial_on_unit(p: Polynomial, a: float, b: float) -> np.ndarray:
    """Coefficients m with p(a + t*(b-a)) = sum m_j t^j for t in [0,1]."""
    n = p.degree
    alpha = a - p.center
    beta = b - a
    m = np.zeros(n + 1)
    # expand sum_k c_k (alpha + beta t)^k
    for k, ck in enumerate(p.coeffs):
        if ck == 0.0:
            continue
        for j in range(k + 1):
            m[j] += ck * math.comb(k, j) * alpha ** (k - j) * beta**j
    return m


def bernstein_coeffs(p: Polynomial, a: float, b: float) -> np.ndarray:
    """Bernstein coefficients of p on [a, b] at its stored degree."""
    m = monomial_on_unit(p, a, b)
    return _bmat(p.degree) @ m


def batched_bernstein(coeffs: np.ndarray, centers: np.ndarray,
                      lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Bernstein coefficients for many same-degree polynomials at once.

    coeffs is (npieces, n+1) in the shifted monomial basis; lo/hi give each
    piece's interval.  Returns an (npieces, n+1) array.
    """
    npieces, ncoef = coeffs.shape
    n = ncoef - 1
    alpha = lo - centers
    beta = hi - lo
    # monomial coefficients on [0,1] per piece
    m = np.zeros_like(coeffs)
    for k in range(ncoef):
        ck = coeffs[:, k]
        for j in range(k + 1):
            m[:, j] += ck * math.comb(k, j) * alpha ** (k - j) * beta**j
    return m @ _bmat(n).T


def _decasteljau_split(b: np.ndarray):
    """Split Bernstein coefficients at the midpoint of the interval."""
    n = len(b) - 1
    left = np.empty_like(b)
    right = np.empty_like(b)
    work = b.copy()
    left[0] = work[0]
    right[n] = work[n]
    for r in range(1, n + 1):
        work = 0.5 * (work[:-1] + work[1:])
        left[r] = work[0]
        right[n - r] = work[-1]
    return left, right


@dataclass(frozen=True)
class Certificate:
    """Outcome of a nonnegativity check.

    status is one of "nonnegative", "negative", "indeterminate"; a negative
    certificate carries the witness point and the (strictly < -tol) value.
    """

    status: str
    witness: float | None = None
    value: float | None = None

    @property
    def is_nonnegative(self) -> bool:
        return self.status == "nonnegative"


def certify_nonneg(p: Polynomial, interval: tuple[float, float],
                   tol: float = 0.0) -> Certificate:
    """Certify p >= -tol on [a, b] by Bernstein subdivision.

    Nonnegative means every Bernstein coefficient on some subdivision is
    >= -tol; negative returns a sampled witness with p(x) < -tol;
    indeterminate only occurs when the subdivision budget runs out.
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("degenerate interval")
    bern = bernstein_coeffs(p, a, b)

    def recurse(bc, lo, hi, depth):
        if np.min(bc) >= -tol:
            return Certificate("nonnegative")
        # Bernstein coefficients interpolate the endpoint values, so probe
        # the Greville site of the worst coefficient plus the endpoints.
        n = len(bc) - 1
        worst = lo + (hi - lo) * (np.argmin(bc) / n if n else 0.5)
        for x in (worst, lo, hi):
            v = p(x)
            if v < -tol:
                return Certificate("negative", witness=float(x), value=float(v))
        if depth >= SUBDIVISION_DEPTH:
            return Certificate("indeterminate")
        lb, rb = _decasteljau_split(bc)
        mid = 0.5 * (lo + hi)
        res = recurse(lb, lo, mid, depth + 1)
        if res.status != "nonnegative":
            return res
        return recurse(rb, mid, hi, depth + 1)

    return recurse(bern, a, b, 0)


# ---------------------------------------------------------------------------
# Batched extrema (used by the L_p machinery on piecewise polynomials)
# ---------------------------------------------------------------------------

def rowwise_horner(coeffs: np.ndarray, centers: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate row i's polynomial at x[i, :] (or scalar x[i]); shape-preserving."""
    x = np.asarray(x, dtype=float)
    t = x - (centers[:, None] if x.ndim == 2 else centers)
    acc = np.zeros_like(t)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        c = coeffs[:, k]
        acc = acc * t + (c[:, None] if t.ndim == 2 else c)
    return acc


def batched_abs_max(coeffs: np.ndarray, centers: np.ndarray,
                    lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """max |p_i| on [lo_i, hi_i] for a stack of same-width coefficient rows.

    Critical points come from batched companion eigenvalues of the
    derivatives, grouped by effective degree after dropping negligible
    leading coefficients (their far-away roots cannot land in [lo, hi]).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    centers = np.asarray(centers, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    npieces, ncoef = coeffs.shape
    best = np.maximum(np.abs(rowwise_horner(coeffs, centers, lo)),
                      np.abs(rowwise_horner(coeffs, centers, hi)))
    if ncoef <= 2:
        return best
    dcoef = coeffs[:, 1:] * np.arange(1, ncoef)
    scale = np.max(np.abs(dcoef), axis=1)
    scale[scale == 0.0] = 1.0
    ndc = dcoef.shape[1]
    eff = np.full(npieces, ndc)
    for k in range(ndc, 0, -1):
        drop = (eff == k) & (np.abs(dcoef[:, k - 1]) <= 1e-13 * scale)
        eff[drop] = k - 1
    for k in range(2, ndc + 1):
        rows = np.nonzero(eff == k)[0]
        if rows.size == 0:
            continue
        m = k - 1  # derivative degree for this group
        lead = dcoef[rows, m]
        comp = np.zeros((rows.size, m, m))
        if m > 1:
            idx = np.arange(1, m)
            comp[:, idx, idx - 1] = 1.0
        comp[:, :, m - 1] = -dcoef[rows, :m] / lead[:, None]
        roots = np.linalg.eigvals(comp)
        ok = np.abs(roots.imag) <= _ROOT_IMAG_TOL * (1.0 + np.abs(roots.real))
        xs = roots.real + centers[rows, None]
        ok &= (xs >= lo[rows, None]) & (xs <= hi[rows, None])
        xs = np.where(ok, xs, lo[rows, None])  # masked entries collapse to lo
        vals = np.abs(rowwise_horner(coeffs[rows], centers[rows], xs))
        best[rows] = np.maximum(best[rows], np.max(vals, axis=1))
    return best
