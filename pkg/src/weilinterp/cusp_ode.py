"""Inverting 2 y^2 d^2/dy^2 - lambda near a cusp by variation of parameters.

Homogeneous solutions are y^p1, y^p2 with 2p(1-p) + lambda = 0, i.e.
p = (1 +- sqrt(1 + 2 lambda))/2, so p1 + p2 = 1 and p1 p2 = -lambda/2.  Writing
g'' - lambda g/(2y^2) = f/(2y^2) and W = y1 y2' - y1' y2 = p2 - p1 (constant),

    g = b1 y^p1 + b2 y^p2,   b1' = -f y^(p2-2) / (2W),   b2' = f y^(p1-2) / (2W),

with b_i(Y0) = 0.  For the double root (lambda = -1/2, p = 1/2) the second
solution is y^(1/2) log y and W = 1.

Profiles live on a grid that is uniform in s = log y; Y0 is a grid node and
the grid may extend below Y0 (where profiles vanish).
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

GAUSS_ORDER = 8
SPLINE_DEGREE = 7
DOUBLE_ROOT_TOL = 1e-12
GROWTH_MARGIN = 0.05
RESIDUAL_EDGE = 0.05
DEFAULT_N = 3001

# eighth-order central differences
_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])


class GrowthBoundError(ValueError):
    pass


@dataclass(frozen=True)
class IndicialRoots:
    p1: complex
    p2: complex
    double: bool

    def residuals(self, lam) -> tuple:
        f = lambda p: 2 * p * (1 - p) + lam
        return abs(f(self.p1)), abs(f(self.p2))


def indicial_roots(lam) -> IndicialRoots:
    """Roots of 2p(1-p) + lambda = 0, ordered by real part; double at lambda = -1/2."""
    disc = cmath.sqrt(1 + 2 * complex(lam))
    p1, p2 = (1 - disc) / 2, (1 + disc) / 2
    if (p1.real, p1.imag) > (p2.real, p2.imag):
        p1, p2 = p2, p1
    double = abs(disc) < DOUBLE_ROOT_TOL
    if double:
        p1 = p2 = 0.5 + 0j
    return IndicialRoots(p1, p2, double)


@dataclass(frozen=True, eq=False)
class CuspProfile:
    """Function on y = Y0 exp(h (k - n_below)), k < N + n_below, with h = log(Ymax/Y0)/(N-1)."""

    Y0: float
    Ymax: float
    N: int
    values: np.ndarray
    R: float
    n_below: int = 0
    residual: float | None = None

    def __post_init__(self):
        if not (0 < self.Y0 < self.Ymax):
            raise ValueError("need 0 < Y0 < Ymax")
        if self.N < 2 * len(_D2):
            raise ValueError("need at least %d grid points" % (2 * len(_D2)))
        if self.n_below < 0:
            raise ValueError("n_below must be non-negative")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.N + self.n_below,):
            raise ValueError("expected %d values, got %s" % (self.N + self.n_below, vals.shape))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def h(self) -> float:
        return float(np.log(self.Ymax / self.Y0) / (self.N - 1))

    @property
    def s(self) -> np.ndarray:
        return np.log(self.Y0) + self.h * (np.arange(self.N + self.n_below) - self.n_below)

    @property
    def y(self) -> np.ndarray:
        return np.exp(self.s)

    @classmethod
    def from_callable(cls, func, Y0, Ymax=None, N=DEFAULT_N, R=0.0, n_below=0):
        Ymax = 10 * Y0 if Ymax is None else Ymax
        proto = cls(Y0, Ymax, N, np.zeros(N + n_below), R, n_below)
        y = proto.y
        vals = np.where(np.arange(y.size) > n_below, func(y), 0.0)
        return cls(Y0, Ymax, N, vals, R, n_below)

    def with_values(self, values, R=None, residual=None) -> "CuspProfile":
        return CuspProfile(self.Y0, self.Ymax, self.N, values, self.R if R is None else R,
                           self.n_below, residual)

    def support_ok(self) -> bool:
        """Values vanish identically on y <= Y0."""
        return not np.any(self.values[: self.n_below + 1])

    def to_json(self) -> dict:
        out = {"Y0": self.Y0, "Ymax": self.Ymax, "N": self.N, "R": self.R,
               "re": self.values.real.tolist(), "im": self.values.imag.tolist()}
        if self.n_below:
            out["n_below"] = self.n_below
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CuspProfile":
        re = np.asarray(data["re"], float)
        im = np.asarray(data.get("im", np.zeros_like(re)), float)
        return cls(float(data["Y0"]), float(data["Ymax"]), int(data["N"]), re + 1j * im,
                   float(data.get("R", 0.0)), int(data.get("n_below", 0)))


def _cumulative_integral(prof: CuspProfile, weight) -> np.ndarray:
    """int_{Y0}^{y_k} f(t) weight(t) dt at every node (zero at and below Y0).

    f is interpolated by a spline in s = log y, and each grid interval is
    integrated by Gauss-Legendre quadrature in s (dt = t ds).
    """
    s = prof.s
    start = prof.n_below
    spline_re = make_interp_spline(s, prof.values.real, k=SPLINE_DEGREE)
    spline_im = make_interp_spline(s, prof.values.imag, k=SPLINE_DEGREE)
    nodes, wts = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    left = s[start:-1]
    mid = left + prof.h / 2
    pts = (mid[:, None] + (prof.h / 2) * nodes[None, :])
    t = np.exp(pts)
    fv = spline_re(pts) + 1j * spline_im(pts)
    panel = (prof.h / 2) * np.sum(wts[None, :] * fv * weight(t) * t, axis=1)
    out = np.zeros(s.size, dtype=complex)
    out[start + 1:] = np.cumsum(panel)
    return out


def growth_exponent(R_in: float, roots: IndicialRoots) -> float:
    """Polynomial growth exponent for the solution of an input growing like y^R_in."""
    top = max(roots.p1.real, roots.p2.real)
    R = max(R_in, top)
    resonant = roots.double or any(abs(R_in - p.real) < 1e-9 for p in (roots.p1, roots.p2))
    return R + GROWTH_MARGIN if resonant else R


def solve_cusp(f: CuspProfile, lam, check_growth: bool = True) -> CuspProfile:
    """g with (2 y^2 d^2/dy^2 - lambda) g = f and g = 0 on y <= Y0; residual attached."""
    if not f.support_ok():
        raise ValueError("input profile must vanish on y <= Y0")
    roots = indicial_roots(lam)
    y = f.y
    with np.errstate(all="ignore"):
        if roots.double:
            logy = np.log(y)
            b1 = _cumulative_integral(f, lambda t: -np.sqrt(t) * np.log(t) / (2 * t * t))
            b2 = _cumulative_integral(f, lambda t: np.sqrt(t) / (2 * t * t))
            g = b1 * np.sqrt(y) + b2 * np.sqrt(y) * logy
        else:
            p1, p2 = roots.p1, roots.p2
            W = p2 - p1
            b1 = _cumulative_integral(f, lambda t: -t ** (p2 - 2) / (2 * W))
            b2 = _cumulative_integral(f, lambda t: t ** (p1 - 2) / (2 * W))
            g = b1 * y ** p1 + b2 * y ** p2
    if not np.all(np.isfinite(g)):
        raise ValueError("quadrature produced non-finite values")
    g[: f.n_below + 1] = 0.0
    out = f.with_values(g, R=growth_exponent(f.R, roots))
    res = cusp_residual(out, f, lam)
    out = f.with_values(g, R=out.R, residual=res)
    if check_growth:
        rep = growth_report(out, 2)
        if not rep.bounded:
            raise GrowthBoundError("solution violates the polynomial growth bound with R = %.3g" % out.R)
    return out


def apply_operator(g: CuspProfile, lam) -> np.ndarray:
    """(2 y^2 g'' - lambda g) by eighth-order differences in s; NaN within 4 nodes of the ends.

    Uses y^2 g'' = g_ss - g_s.
    """
    h = g.h
    v = g.values
    out = np.full(v.size, np.nan, dtype=complex)
    half = len(_D1) // 2
    gs = np.convolve(v, _D1[::-1], mode="valid") / h
    gss = np.convolve(v, _D2[::-1], mode="valid") / h ** 2
    out[half:-half] = 2 * (gss - gs) - lam * v[half:-half]
    return out


def cusp_residual(g: CuspProfile, f: CuspProfile, lam, edge: float = RESIDUAL_EDGE) -> float:
    """sup |(2y^2 g'' - lambda g) - f| / sup |f| on [Y0, Ymax] minus the last ``edge`` fraction."""
    scale = np.max(np.abs(f.values))
    if scale == 0:
        return float(np.max(np.abs(g.values)))
    lhs = apply_operator(g, lam)
    n = g.values.size
    stop = n - max(int(edge * g.N), len(_D1) // 2 + 1)
    window = slice(max(g.n_below, len(_D1) // 2), stop)
    diff = np.abs(lhs[window] - f.values[window])
    return float(np.nanmax(diff) / scale)


@dataclass(frozen=True)
class GrowthReport:
    R: float
    seminorms: list  # (j, sup |d^j g/dy^j| (2+y)^(j-R))
    growing: list  # j values whose weighted derivative still grows at the end of the grid

    @property
    def bounded(self) -> bool:
        return not self.growing

    def to_dict(self) -> dict:
        return {"R": self.R, "seminorms": [[j, v] for j, v in self.seminorms],
                "growing": self.growing, "bounded": self.bounded}


def growth_report(g: CuspProfile, j_max: int = 3, tail: float = 0.1, factor: float = 2.0) -> GrowthReport:
    """Weighted sup-norms of derivatives and a flag for unbounded growth.

    A seminorm is flagged when its sup over the last ``tail`` fraction of
    the grid exceeds ``factor`` times the sup over the rest: on a finite grid
    this is the visible signature of growth faster than (2+y)^R.
    """
    y = g.y
    rows, growing = [], []
    spline_re = make_interp_spline(y, g.values.real, k=SPLINE_DEGREE)
    spline_im = make_interp_spline(y, g.values.imag, k=SPLINE_DEGREE)
    n_tail = max(int(tail * y.size), 1)
    edge = SPLINE_DEGREE  # derivative of the interpolant is least accurate at the last nodes
    for j in range(j_max + 1):
        d = spline_re.derivative(j)(y) + 1j * spline_im.derivative(j)(y) if j else g.values
        w = np.abs(d) * (2 + y) ** (j - g.R)
        w = w[: y.size - edge] if j else w
        rows.append((j, float(np.max(w))))
        head, end = w[: -n_tail], w[-n_tail:]
        if end.size and head.size and np.max(end) > factor * max(np.max(head), 1e-300) and np.max(end) > 0:
            growing.append(j)
    return GrowthReport(g.R, rows, growing)


def smooth_bump(a: float, b: float, amplitude: float = 1.0):
    """C-infinity bump supported on [a, b]."""
    def f(y):
        y = np.asarray(y, dtype=float)
        u = (2 * y - a - b) / (b - a)
        out = np.zeros_like(y)
        inside = np.abs(u) < 1
        out[inside] = amplitude * np.exp(1 - 1 / (1 - u[inside] ** 2))
        return out
    return f


def smooth_step(a: float, b: float):
    """C-infinity step rising from 0 at a to 1 at b."""
    def psi(t):
        return np.where(t > 0, np.exp(-1 / np.where(t > 0, t, 1)), 0.0)

    def f(y):
        t = (np.asarray(y, dtype=float) - a) / (b - a)
        return psi(t) / (psi(t) + psi(1 - t))
    return f
