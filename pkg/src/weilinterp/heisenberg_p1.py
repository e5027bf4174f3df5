"""Degree -2 homogeneous functions on R^2 - {0}: Fourier data on the two affine
charts of P^1, lattice sums and the linear relations tying them together.

A form Phi is determined by h(x) = Phi(x, 1) and g(y) = Phi(1, y) = y^-2 h(1/y).
Its coefficient sequences are

    a_n = int h(x) exp(pi i n x) dx,    b_n = int g(y) exp(pi i n y) dy.

Three linear functionals vanish on the image of Phi -> (a, b):

    a_0 - b_0 = 0,
    pi^2/3 Phi(1,0) + pi^2/6 Phi(0,1)
        = sum_{m != 0, t} b_{m(2t+1)}/|m| + sum_{n != 0, t} a_{n(4t+2)}/|n| + 2 log 2 a_0,
    pi^2/6 Phi(1,0) + pi^2/3 Phi(0,1)
        = sum_{m != 0, t} a_{m(2t+1)}/|m| + sum_{n != 0, t} b_{n(4t+2)}/|n| + 2 log 2 b_0.

The last two come from evaluating the disc-ordered lattice sum
I(Phi) = sum_{(m,n) != 0} (-1)^(n+1) Phi(m, n) by Poisson summation in each
variable in turn (and J likewise with m, n exchanged).  The 2 log 2 a_0 term
is the contribution of the zero frequency, sum_{n != 0} (-1)^(n+1)/|n| = 2 log 2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

LOG2 = math.log(2.0)
PI2 = math.pi ** 2
COEFF_TAIL_TOL = 1e-14
QUAD_SPLIT = 20.0
COEFF_MAX_INDEX = 4000
QUAD_LIMIT = 400


class TailDecayError(ValueError):
    pass


class InsufficientRangeError(ValueError):
    pass


def _poly_eval(coeffs, x):
    return np.polynomial.polynomial.polyval(x, np.asarray(coeffs, dtype=float))


@dataclass(frozen=True, eq=False)
class HomogeneousForm:
    """Phi through its two chart profiles h(x) = Phi(x, 1) and g(y) = Phi(1, y)."""

    h: object
    g: object
    spec: dict = field(default_factory=dict)

    @property
    def phi_10(self) -> float:
        return float(self.g(np.array([0.0]))[0])

    @property
    def phi_01(self) -> float:
        return float(self.h(np.array([0.0]))[0])

    def __call__(self, m, n):
        """Phi(m, n) through h where |n| >= |m| and through g elsewhere."""
        m = np.asarray(m, dtype=float)
        n = np.asarray(n, dtype=float)
        m, n = np.broadcast_arrays(m, n)
        out = np.zeros(m.shape)
        use_h = (np.abs(n) >= np.abs(m)) & (n != 0)
        use_g = ~use_h & (m != 0)
        out[use_h] = self.h(m[use_h] / n[use_h]) / n[use_h] ** 2
        out[use_g] = self.g(n[use_g] / m[use_g]) / m[use_g] ** 2
        return out

    def scaled(self, c: float) -> "HomogeneousForm":
        spec = dict(self.spec)
        spec["scale"] = spec.get("scale", 1.0) * c
        return HomogeneousForm(lambda x: c * self.h(x), lambda y: c * self.g(y), spec)

    def swapped(self) -> "HomogeneousForm":
        """Phi~(x, y) = Phi(y, x): the chart profiles exchange roles."""
        spec = dict(self.spec)
        spec["swapped"] = not spec.get("swapped", False)
        return HomogeneousForm(self.g, self.h, spec)

    def __add__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        return HomogeneousForm(lambda x: self.h(x) + other.h(x), lambda y: self.g(y) + other.g(y),
                               {"kind": "sum", "terms": [self.spec, other.spec]})

    def homogeneity_error(self, ys) -> float:
        """max |g(y) - y^-2 h(1/y)| over the given nonzero y."""
        y = np.asarray(ys, dtype=float)
        return float(np.max(np.abs(self.g(y) - self.h(1 / y) / y ** 2)))

    def smoothness_defect(self, eps: float = 1e-2) -> float:
        """Disagreement of two difference estimates of g'' at 0 (steps eps and eps/2).

        Small for a profile that extends smoothly through y = 0; of order one
        when x^-2 h(1/x) has a kink or jump there.
        """
        def d2(e):
            y = e * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
            v = self.g(y)
            return (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * e * e)
        a, b = d2(eps), d2(eps / 2)
        return float(abs(a - b) / (1 + abs(b)))

    def to_json(self) -> dict:
        return dict(self.spec)

    @classmethod
    def from_json(cls, data: dict) -> "HomogeneousForm":
        kind = data.get("kind")
        if kind == "rational":
            form = rational_form(data["numerator"], int(data["power"]))
        elif kind == "gaussian_rational":
            form = gaussian_rational_form(float(data["a"]), data["numerator"], int(data["power"]))
        elif kind == "sum":
            terms = [cls.from_json(t) for t in data["terms"]]
            form = terms[0]
            for t in terms[1:]:
                form = form + t
        elif kind == "zero":
            form = zero_form()
        else:
            raise ValueError("unknown profile kind %r; expected rational, gaussian_rational, "
                             "sum or zero" % (kind,))
        if data.get("swapped"):
            form = form.swapped()
        if "scale" in data:
            form = form.scaled(float(data["scale"]))
        return form


def zero_form() -> HomogeneousForm:
    z = lambda x: np.zeros(np.shape(x))
    return HomogeneousForm(z, z, {"kind": "zero"})


def _reversed_numerator(numerator, power):
    c = np.zeros(2 * power - 1)
    num = np.trim_zeros(np.asarray(numerator, dtype=float), "b")
    if num.size > 2 * power - 1:
        raise ValueError("numerator degree must be at most 2*power - 2 for Phi to stay bounded at infinity")
    c[: num.size] = num
    return c[::-1]


def rational_form(numerator, power: int) -> HomogeneousForm:
    """h(x) = P(x)/(1+x^2)^power, P given by ascending coefficients of degree <= 2 power - 2.

    Then g(y) = y^(2 power - 2) P(1/y)/(1+y^2)^power, a polynomial with the
    coefficients of P reversed over the same denominator.
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    rev = _reversed_numerator(numerator, power)
    num = np.asarray(numerator, dtype=float)
    h = lambda x: _poly_eval(num, x) / (1 + np.asarray(x, float) ** 2) ** power
    g = lambda y: _poly_eval(rev, y) / (1 + np.asarray(y, float) ** 2) ** power
    return HomogeneousForm(h, g, {"kind": "rational", "numerator": num.tolist(), "power": power})


def gaussian_rational_form(a: float, numerator, power: int) -> HomogeneousForm:
    """Rational form times the homogeneous window exp(-a x^2/(x^2 + y^2))."""
    base = rational_form(numerator, power)
    h = lambda x: base.h(x) * np.exp(-a * np.asarray(x, float) ** 2 / (1 + np.asarray(x, float) ** 2))
    g = lambda y: base.g(y) * np.exp(-a / (1 + np.asarray(y, float) ** 2))
    spec = {"kind": "gaussian_rational", "a": a, "numerator": base.spec["numerator"], "power": power}
    return HomogeneousForm(h, g, spec)


def reference_form() -> HomogeneousForm:
    """h(x) = 1/(1+x^2)^2, g(y) = y^2/(1+y^2)^2; Phi(1,0) = 0, Phi(0,1) = 1."""
    return rational_form([1.0], 2)


def check_tail(form: HomogeneousForm, X: float = 1e4, tol: float = 1e-6):
    """Both profiles must decay like x^-2 with limits matching the other chart at 0."""
    for prof, other, name in ((form.h, form.g, "h"), (form.g, form.h, "g")):
        for s in (1.0, -1.0):
            lim = X * X * prof(np.array([s * X]))[0]
            target = other(np.array([0.0]))[0]
            if not np.isfinite(lim) or abs(lim - target) > tol * max(1.0, abs(target)) + 1e3 / X:
                raise TailDecayError("profile %s does not decay like x^-2 (x^2 %s(x) = %.3g at x = %g, "
                                     "expected %.3g)" % (name, name, lim, s * X, target))


def _fourier_coefficient(prof, n: int) -> complex:
    even = lambda x: prof(np.array([x]))[0] + prof(np.array([-x]))[0]
    odd = lambda x: prof(np.array([x]))[0] - prof(np.array([-x]))[0]
    if n == 0:
        re = integrate.quad(even, 0, np.inf, limit=QUAD_LIMIT, epsabs=1e-14, epsrel=1e-13)[0]
        return complex(re)
    w = math.pi * abs(n)
    # QAWO on [0, X] plus QAWF on the tail: QAWF alone stalls near 1e-13 for large n.
    # epsabs is set below what roundoff allows on purpose (so tiny coefficients are
    # resolved to ~1e-16 absolute); QUADPACK then warns, which is expected here.
    re = im = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in ((0.0, QUAD_SPLIT), (QUAD_SPLIT, np.inf)):
            if hi < np.inf:
                kw = dict(limit=QUAD_LIMIT, epsabs=1e-17, epsrel=1e-14)
            else:
                kw = dict(limlst=200, limit=200, epsabs=1e-17)
            re += integrate.quad(even, lo, hi, weight="cos", wvar=w, **kw)[0]
            im += integrate.quad(odd, lo, hi, weight="sin", wvar=w, **kw)[0]
    return complex(re, math.copysign(1.0, n) * im)


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """a_n, b_n for |n| <= computed; entries beyond ``negligible_from`` are taken as zero."""

    a: dict
    b: dict
    negligible_from: int | None
    computed: int

    def get(self, which: str, idx: np.ndarray) -> np.ndarray:
        table = self.a if which == "a" else self.b
        idx = np.asarray(idx)
        if self.negligible_from is None and np.max(np.abs(idx)) > self.computed:
            raise InsufficientRangeError("coefficient index %d beyond computed range %d"
                                         % (np.max(np.abs(idx)), self.computed))
        return np.array([table.get(int(i), 0j) for i in idx.ravel()]).reshape(idx.shape)

    def arrays(self, n_max: int):
        n = np.arange(-n_max, n_max + 1)
        return self.get("a", n), self.get("b", n)


def coefficient_table(form: HomogeneousForm, n_max: int = COEFF_MAX_INDEX,
                      tail_tol: float = COEFF_TAIL_TOL, run: int = 4) -> CoefficientTable:
    """Compute a_n, b_n outward from n = 0 until ``run`` consecutive indices are negligible."""
    check_tail(form)
    a, b = {}, {}
    scale = 0.0
    quiet = 0
    negligible_from = None
    for k in range(n_max + 1):
        for n in ((0,) if k == 0 else (k, -k)):
            a[n] = _fourier_coefficient(form.h, n)
            b[n] = _fourier_coefficient(form.g, n)
        scale = max(scale, abs(a[k]), abs(b[k]), abs(a[-k]), abs(b[-k]))
        small = max(abs(a[k]), abs(b[k]), abs(a[-k]), abs(b[-k])) <= tail_tol * max(scale, 1e-300)
        quiet = quiet + 1 if (small and k > 0) else 0
        if scale == 0 or quiet >= run:
            negligible_from = k + 1
            break
    return CoefficientTable(a, b, negligible_from, k)


def coefficients(form: HomogeneousForm, n_max: int):
    """(a, b) for n = -n_max..n_max (index n at position n + n_max)."""
    check_tail(form)
    n = range(-n_max, n_max + 1)
    a = np.array([_fourier_coefficient(form.h, k) for k in n])
    b = np.array([_fourier_coefficient(form.g, k) for k in n])
    return a, b


def integral_p1(form: HomogeneousForm) -> float:
    """A(Phi) = int_{-1}^{1} h + int_{-1}^{1} g: the integral over P^1 split across the two charts.

    Equal to a_0 and to b_0 (substitute x = 1/y on |x| > 1).
    """
    qa = integrate.quad(lambda x: form.h(np.array([x]))[0], -1, 1, epsabs=1e-14, epsrel=1e-13)[0]
    qb = integrate.quad(lambda y: form.g(np.array([y]))[0], -1, 1, epsabs=1e-14, epsrel=1e-13)[0]
    return qa + qb


@dataclass(frozen=True)
class LatticeSum:
    raw: float
    cesaro: float
    extrapolated: float
    radius: float


def _shell_sums(form: HomogeneousForm, which: str, R: float):
    Ri = int(math.floor(R))
    m = np.arange(-Ri, Ri + 1)
    M, Nn = np.meshgrid(m, m, indexing="ij")
    r2 = (M * M + Nn * Nn).ravel()
    keep = (r2 > 0) & (r2 <= R * R)
    M, Nn, r2 = M.ravel()[keep], Nn.ravel()[keep], r2[keep]
    parity_index = Nn if which == "I" else M
    weight = np.where(parity_index % 2 == 0, -1.0, 1.0)
    vals = weight * form(M, Nn)
    # ties at equal radius are summed together: accumulate by shell
    shells, inverse = np.unique(r2, return_inverse=True)
    per_shell = np.zeros(shells.size)
    np.add.at(per_shell, inverse, vals)
    return np.sqrt(shells), per_shell


def lattice_sum(form: HomogeneousForm, which: str, R: float = 128) -> LatticeSum:
    """A, I or J.

    I = sum_{(m,n) != 0} Phi(m,n) - 2 sum_{n even} Phi(m,n) over the disc of
    radius R (J: parity of m instead of n).  The raw partial sum converges
    slowly; the Cesaro mean (1/R) int_0^R S(r) dr behaves like I + c/R, and
    the returned extrapolation fits I + c1/R + c2/R^2 through the means at
    R/2, 3R/4 and R.
    """
    if which == "A":
        v = integral_p1(form)
        return LatticeSum(v, v, v, R)
    if which not in ("I", "J"):
        raise ValueError("which must be 'A', 'I' or 'J'")
    if R < 10:
        raise ValueError("radius must be at least 10")
    rho, shell = _shell_sums(form, which, R)

    def cesaro(r):
        mask = rho <= r
        return float(np.sum(shell[mask] * (r - rho[mask])) / r)

    radii = np.array([R / 2, 3 * R / 4, R])
    C = np.array([cesaro(r) for r in radii])
    V = np.vstack([np.ones(3), 1 / radii, 1 / radii ** 2]).T
    extrap = float(np.linalg.solve(V, C)[0])
    return LatticeSum(float(np.sum(shell)), float(C[-1]), extrap, R)


def _pair_sums(table: CoefficientTable, which: str, outer: np.ndarray, T: int, step: int, offset: int):
    """sum over m in outer of (1/m) * sum_{t=0..T} (c_{m(step t + offset)} + c_{-m(step t + offset)}).

    Pairing t with -t-1 turns each inner sum over |t| <= T into a sum of
    symmetric pairs.
    """
    t = np.arange(T + 1)
    idx = outer[:, None] * (step * t[None, :] + offset)
    vals = table.get(which, idx) + table.get(which, -idx)
    return np.sum(vals.sum(axis=1) / outer)


@dataclass(frozen=True)
class RelationResiduals:
    r_A: float
    r_I: float
    r_J: float
    R: int
    T: int
    signed_I: complex = 0j
    signed_J: complex = 0j

    def to_dict(self) -> dict:
        return {"R": self.R, "T": self.T, "r_A": self.r_A, "r_I": self.r_I, "r_J": self.r_J}


def relation_sides(form: HomogeneousForm, R: int, T: int, table: CoefficientTable | None = None) -> dict:
    """Both sides of each relation, with outer sums over 1 <= |m| <= R and inner pairs t <= T."""
    table = coefficient_table(form) if table is None else table
    outer = np.arange(1, R + 1)
    a0, b0 = table.a[0], table.b[0]
    # factor 2 for the two signs of the outer index
    Sb_odd = 2 * _pair_sums(table, "b", outer, T, 2, 1)
    Sa_odd = 2 * _pair_sums(table, "a", outer, T, 2, 1)
    Sa_twice_odd = 2 * _pair_sums(table, "a", outer, T, 4, 2)
    Sb_twice_odd = 2 * _pair_sums(table, "b", outer, T, 4, 2)
    p10, p01 = form.phi_10, form.phi_01
    return {
        "I_left": PI2 / 3 * p10 + PI2 / 6 * p01,
        "I_right": Sb_odd + Sa_twice_odd + 2 * LOG2 * a0,
        "J_left": PI2 / 6 * p10 + PI2 / 3 * p01,
        "J_right": Sa_odd + Sb_twice_odd + 2 * LOG2 * b0,
        # the lattice sums themselves, computed from either family of coefficients
        "I_from_a": Sa_twice_odd + 2 * LOG2 * a0 - PI2 / 3 * p10,
        "I_from_b": -Sb_odd + PI2 / 6 * p01,
        "J_from_b": Sb_twice_odd + 2 * LOG2 * b0 - PI2 / 3 * p01,
        "J_from_a": -Sa_odd + PI2 / 6 * p10,
        "a0": a0, "b0": b0,
    }


def relation_residuals(form: HomogeneousForm, R: int = 64, T: int = 64,
                       table: CoefficientTable | None = None) -> RelationResiduals:
    sides = relation_sides(form, R, T, table)
    dI = sides["I_left"] - sides["I_right"]
    dJ = sides["J_left"] - sides["J_right"]
    return RelationResiduals(abs(sides["a0"] - sides["b0"]), abs(dI), abs(dJ), R, T, dI, dJ)


def convergence_table(form: HomogeneousForm, max_size: int = 64) -> list:
    """Residuals along (R, T) = (1, 1), (2, 2), (4, 4), ..., (max_size, max_size)."""
    table = coefficient_table(form)
    rows = []
    size = 1
    while size <= max_size:
        rows.append(relation_residuals(form, size, size, table))
        size *= 2
    return rows


def is_monotone(values, floor: float = 1e-11) -> bool:
    """Non-increasing, ignoring fluctuations once below the noise floor."""
    vals = list(values)
    return all(b <= a or b < floor for a, b in zip(vals, vals[1:]))
