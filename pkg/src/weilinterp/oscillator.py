"""Numerical oscillator (Weil) representation on even and odd functions.

Functions are sampled on the periodic grid x_j = -L + j 2L/N, j < N.  The
Lie algebra acts by

    X phi = -i pi x^2 phi,   Y phi = -i/(4 pi) phi'',   H phi = x phi' + phi/2,

with kappa = i(X - Y), p = (H - i(X + Y))/2 and m = (H + i(X + Y))/2.
Derivatives are spectral (FFT); the Fourier transform
phi^(xi) = int phi(x) exp(-2 pi i x xi) dx is evaluated on the same grid by
a chirp-z transform of the trapezoid rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import czt
from scipy.special import eval_genlaguerre, gammaln

DEFAULT_L = 8.0
DEFAULT_N = 2048
DEFAULT_TOL = 1e-6
TAIL_TOL = 1e-8
BAND_TOL = 1e-9
PARITY_TOL = 1e-9
LIE_OPS = ("X", "Y", "H", "kappa", "p", "m")


class GridError(ValueError):
    """Base class for grid resolution and decay failures."""


class TailDecayError(GridError):
    pass


class AliasingError(GridError):
    pass


class GridResolutionError(GridError):
    pass


def grid_points(L: float = DEFAULT_L, N: int = DEFAULT_N) -> np.ndarray:
    return -L + np.arange(N) * (2 * L / N)


def _check_grid(L, N):
    if L <= 0:
        raise GridResolutionError("half width L must be positive, got %r" % L)
    if N <= 0 or N % 2:
        raise GridResolutionError("point count N must be a positive even integer, got %r" % N)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Even or odd function sampled on the symmetric periodic grid."""

    L: float
    N: int
    values: np.ndarray
    parity: str

    def __post_init__(self):
        _check_grid(self.L, self.N)
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd', got %r" % self.parity)
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.N,):
            raise GridResolutionError("expected %d samples, got shape %s" % (self.N, vals.shape))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, func, parity: str, L: float = DEFAULT_L, N: int = DEFAULT_N):
        return cls(L, N, func(grid_points(L, N)), parity)

    @property
    def x(self) -> np.ndarray:
        return grid_points(self.L, self.N)

    @property
    def dx(self) -> float:
        return 2 * self.L / self.N

    @property
    def sign(self) -> int:
        return 1 if self.parity == "even" else -1

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.L, self.N, values, self.parity)

    def mirrored(self) -> np.ndarray:
        """Samples of phi(-x); index j maps to N - j (mod N)."""
        return self.values[(-np.arange(self.N)) % self.N]

    def scale(self) -> float:
        return float(np.max(np.abs(self.values))) if self.N else 0.0

    def norm(self) -> float:
        return float(np.sqrt(self.dx) * np.linalg.norm(self.values))

    def parity_error(self) -> float:
        s = self.scale()
        if s == 0:
            return 0.0
        return float(np.max(np.abs(self.values - self.sign * self.mirrored())) / s)

    def tail_ratio(self) -> float:
        """max |phi| on |x| > L - 1 relative to max |phi|."""
        s = self.scale()
        if s == 0:
            return 0.0
        tail = np.abs(self.x) > self.L - 1
        return float(np.max(np.abs(self.values[tail])) / s)

    def band_ratio(self) -> float:
        """Spectral content in the top quarter of the FFT band, relative."""
        spec = np.abs(np.fft.fft(self.values))
        top = spec.max()
        if top == 0:
            return 0.0
        k = np.abs(np.fft.fftfreq(self.N)) >= 0.375
        return float(spec[k].max() / top)

    def check(self, tail_tol: float = TAIL_TOL, band_tol: float = BAND_TOL,
              parity_tol: float = PARITY_TOL) -> "GridFunction":
        tr = self.tail_ratio()
        if tr > tail_tol:
            raise TailDecayError("tail |phi| ratio %.3g exceeds %.3g on |x| > L-1" % (tr, tail_tol))
        br = self.band_ratio()
        if br > band_tol:
            raise AliasingError("near-Nyquist spectral ratio %.3g exceeds %.3g" % (br, band_tol))
        pe = self.parity_error()
        if pe > parity_tol:
            raise GridError("parity violated: relative mismatch %.3g" % pe)
        return self

    def to_json(self) -> dict:
        return {"L": self.L, "N": self.N, "parity": self.parity,
                "re": self.values.real.tolist(), "im": self.values.imag.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "GridFunction":
        vals = np.asarray(data["re"], float) + 1j * np.asarray(data.get("im", [0.0] * len(data["re"])), float)
        return cls(float(data["L"]), int(data["N"]), vals, data["parity"])

    def __add__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__


def _same_grid(a: GridFunction, b: GridFunction):
    if a.L != b.L or a.N != b.N or a.parity != b.parity:
        raise GridError("grid functions live on different grids or parities")


def rel_l2(a: GridFunction, b: GridFunction) -> float:
    """||a - b|| / ||b||."""
    nb = b.norm()
    return (a - b).norm() / nb if nb else (a - b).norm()


# -- spectral calculus -------------------------------------------------------------

def _wavenumbers(L, N):
    return 2j * np.pi * np.fft.fftfreq(N, d=2 * L / N)


def derivative(phi: GridFunction, order: int = 1) -> np.ndarray:
    """Spectral derivative samples of the given order."""
    ik = _wavenumbers(phi.L, phi.N)
    if order % 2:
        ik = ik.copy()
        ik[phi.N // 2] = 0.0
    return np.fft.ifft(ik ** order * np.fft.fft(phi.values))


def act_lie(op: str, phi: GridFunction, check: bool = True) -> GridFunction:
    """Action of one of X, Y, H, kappa, p, m; parity is preserved."""
    x = phi.x
    v = phi.values
    if op == "X":
        out = -1j * np.pi * x ** 2 * v
    elif op == "Y":
        out = -1j / (4 * np.pi) * derivative(phi, 2)
    elif op == "H":
        out = x * derivative(phi, 1) + 0.5 * v
    elif op == "kappa":
        out = np.pi * x ** 2 * v - derivative(phi, 2) / (4 * np.pi)
    elif op in ("p", "m"):
        s = -1 if op == "p" else 1
        hx = x * derivative(phi, 1) + 0.5 * v
        xy = -1j * np.pi * x ** 2 * v - 1j / (4 * np.pi) * derivative(phi, 2)
        out = (hx + s * 1j * xy) / 2
    else:
        raise ValueError("unknown Lie algebra element %r; expected one of %s" % (op, LIE_OPS))
    result = phi.with_values(out)
    if check:
        # relative to the input scale so that (near-)annihilated vectors pass
        ref = max(result.scale(), phi.scale())
        tail = np.abs(result.x) > result.L - 1
        tr = float(np.max(np.abs(out[tail])) / ref) if ref else 0.0
        if tr > TAIL_TOL:
            raise TailDecayError("%s(phi) is not decayed on the grid (tail ratio %.3g)" % (op, tr))
    return result


def apply_word(word, phi: GridFunction) -> GridFunction:
    """Apply Lie elements right to left: apply_word(("p", "m"), phi) = p(m(phi))."""
    for op in reversed(word):
        phi = act_lie(op, phi, check=False)
    return phi


def commutator(a: str, b: str, phi: GridFunction) -> GridFunction:
    return apply_word((a, b), phi) - apply_word((b, a), phi)


CASIMIR_FORMS = {
    "HXY": [(0.5, ("H", "H")), (1.0, ("X", "Y")), (1.0, ("Y", "X"))],
    "kappa_pm": [(0.5, ("kappa", "kappa")), (1.0, ("p", "m")), (1.0, ("m", "p"))],
    "kappa_mp": [(0.5, ("kappa", "kappa")), (1.0, ("kappa",)), (2.0, ("m", "p"))],
    "kappa_pm2": [(0.5, ("kappa", "kappa")), (-1.0, ("kappa",)), (2.0, ("p", "m"))],
}


def casimir_apply(phi: GridFunction, form: str = "HXY") -> GridFunction:
    """Casimir element applied through composed Lie actions (default H^2/2 + XY + YX)."""
    total = np.zeros(phi.N, dtype=complex)
    for coeff, word in CASIMIR_FORMS[form]:
        total = total + coeff * apply_word(word, phi).values
    return phi.with_values(total)


def identity_residuals(phi: GridFunction) -> dict:
    """Residuals of [p,m] = kappa, [kappa,p] = 2p, [kappa,m] = -2m and F X = -Y F.

    Each residual is an L^2 norm divided by ||phi||.  The Fourier
    transform conjugates X to -Y (the adjoint action of the Weyl element
    on sl_2), since F(x^2 phi) = -phi^''/(4 pi^2).
    """
    scale = phi.norm()
    if scale == 0:
        return {"pm": 0.0, "kappa_p": 0.0, "kappa_m": 0.0, "fourier_XY": 0.0}
    kp = act_lie("p", phi, check=False)
    km = act_lie("m", phi, check=False)
    fx = fourier(act_lie("X", phi, check=False), check=False)
    yf = act_lie("Y", fourier(phi, check=False), check=False)
    return {
        "pm": (commutator("p", "m", phi) - act_lie("kappa", phi, check=False)).norm() / scale,
        "kappa_p": (commutator("kappa", "p", phi) - 2 * kp).norm() / scale,
        "kappa_m": (commutator("kappa", "m", phi) + 2 * km).norm() / scale,
        "fourier_XY": (fx + yf).norm() / scale,
    }


# -- Fourier transform --------------------------------------------------------------

def _grid_dft(values, L, N, sign):
    # sum_l v_l exp(sign 2 pi i x_l xi_j) dx with x, xi on the same grid
    dx = 2 * L / N
    n = np.arange(N)
    pre = np.exp(-sign * 2j * np.pi * L * dx * n)
    w = np.exp(sign * 2j * np.pi * dx * dx)
    body = czt(values * pre, m=N, w=w, a=1.0)
    post = np.exp(-sign * 2j * np.pi * L * dx * n) * np.exp(sign * 2j * np.pi * L * L)
    return dx * body * post


def fourier(phi: GridFunction, inverse: bool = False, check: bool = True) -> GridFunction:
    """Fourier transform on the same grid (inverse uses exp(+2 pi i x xi))."""
    if check:
        phi.check(parity_tol=np.inf)
    sign = 1 if inverse else -1
    return phi.with_values(_grid_dft(phi.values, phi.L, phi.N, sign))


def evaluate(phi: GridFunction, points) -> np.ndarray:
    """Band-limited (trigonometric) interpolation of phi at arbitrary points."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    if np.any(np.abs(pts) > phi.L):
        raise GridResolutionError("evaluation point outside [-L, L]")
    N = phi.N
    c = np.fft.fft(phi.values) / N
    k = np.fft.fftfreq(N, d=1.0 / N)
    nyq = N // 2
    c_sym = c.copy()
    c_sym[nyq] *= 0.5
    phase = np.exp(1j * np.pi * np.outer(pts + phi.L, k) / phi.L)
    out = phase @ c_sym
    # the Nyquist mode is split symmetrically between +N/2 and -N/2
    out += c_sym[nyq] * np.exp(-1j * np.pi * (pts + phi.L) * nyq / phi.L)
    return out


def fourier_at(phi: GridFunction, freqs) -> np.ndarray:
    """phi^ at arbitrary frequencies by direct trapezoid quadrature."""
    f = np.atleast_1d(np.asarray(freqs, dtype=float))
    return phi.dx * np.exp(-2j * np.pi * np.outer(f, phi.x)) @ phi.values


# -- unipotent elements and sampling ---------------------------------------------------

def act_unipotent(which: str, phi: GridFunction, times: int = 1) -> GridFunction:
    """e_tilde^times multiplies by exp(-2 pi i times x^2); f_tilde = sigma e_tilde sigma^-1."""
    if which == "e_tilde":
        return phi.with_values(np.exp(-2j * np.pi * times * phi.x ** 2) * phi.values)
    if which == "f_tilde":
        inner = fourier(phi, inverse=True)
        chirped = act_unipotent("e_tilde", inner, times)
        return fourier(chirped)
    raise ValueError("which must be 'e_tilde' or 'f_tilde', got %r" % which)


@dataclass(frozen=True, eq=False)
class SampleVector:
    """a_n = phi(sqrt n) and b_n = phi^(sqrt n) for 0 <= n <= n_max."""

    n_max: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if a.shape != (self.n_max + 1,) or b.shape != (self.n_max + 1,):
            raise ValueError("a and b must both have length n_max + 1 = %d" % (self.n_max + 1))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.a, self.b])

    def to_json(self) -> dict:
        return {"n_max": self.n_max,
                "a_re": self.a.real.tolist(), "a_im": self.a.imag.tolist(),
                "b_re": self.b.real.tolist(), "b_im": self.b.imag.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "SampleVector":
        a = np.asarray(data["a_re"], float) + 1j * np.asarray(data["a_im"], float)
        b = np.asarray(data["b_re"], float) + 1j * np.asarray(data["b_im"], float)
        return cls(int(data["n_max"]), a, b)


def sample_map(phi: GridFunction, n_max: int) -> SampleVector:
    """(phi(sqrt n), phi^(sqrt n)) for n = 0..n_max."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if np.sqrt(n_max) > phi.L:
        raise GridResolutionError("sqrt(n_max) = %.3g exceeds the grid half width %g"
                                  % (np.sqrt(n_max), phi.L))
    nodes = np.sqrt(np.arange(n_max + 1))
    return SampleVector(n_max, evaluate(phi, nodes), evaluate(fourier(phi), nodes))


def poisson_residual(phi: GridFunction):
    """Sum phi(n) - sum phi^(n) over |n| <= L - 1.

    Returns ``(residual, truncation)`` where ``truncation`` bounds the
    neglected terms by the largest |phi|, |phi^| sample on |x| >= L - 1.
    """
    n = np.arange(-int(np.floor(phi.L - 1)), int(np.floor(phi.L - 1)) + 1)
    hat = fourier(phi)
    residual = complex(np.sum(evaluate(phi, n)) - np.sum(evaluate(hat, n)))
    outer = np.abs(phi.x) >= phi.L - 1
    truncation = float(np.abs(phi.values[outer]).max() + np.abs(hat.values[outer]).max())
    return residual, truncation


def eval_Q(phi: GridFunction) -> complex:
    """Q(phi) = sum over n in Z of phi(|n|), truncated to |n| <= L - 1."""
    m = np.arange(1, int(np.floor(phi.L - 1)) + 1)
    vals = evaluate(phi, np.concatenate([[0.0], m]))
    return complex(vals[0] + 2 * np.sum(vals[1:]))


def q_invariance_report(phi: GridFunction):
    """(|Q(e_tilde phi) - Q(phi)|, |Q(f_tilde phi) - Q(phi)|)."""
    q = eval_Q(phi)
    res_e = abs(eval_Q(act_unipotent("e_tilde", phi)) - q)
    res_f = abs(eval_Q(act_unipotent("f_tilde", phi)) - q)
    return res_e, res_f


def q_truncation(phi: GridFunction) -> float:
    """Largest |f_tilde phi| on |x| >= L - 1: what the truncated Q sum cannot see."""
    ft = act_unipotent("f_tilde", phi)
    return float(np.abs(ft.values[np.abs(ft.x) >= phi.L - 1]).max())


# -- K-finite bases ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermiteCoefficients:
    parity: str
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    def to_json(self) -> dict:
        return {"parity": self.parity, "re": self.coeffs.real.tolist(), "im": self.coeffs.imag.tolist()}

    @classmethod
    def from_json(cls, data):
        return cls(data["parity"], np.asarray(data["re"]) + 1j * np.asarray(data["im"]))


def _parity_offset(parity: str) -> int:
    if parity == "even":
        return 0
    if parity == "odd":
        return 1
    raise ValueError("parity must be 'even' or 'odd', got %r" % parity)


def hermite_functions(x, k_max: int, parity: str = "even") -> np.ndarray:
    """Rows psi_0..psi_{k_max-1} of the given parity, unit L^2 norm.

    psi_k is the Hermite function of index 2k (even) or 2k+1 (odd) in the
    variable sqrt(2 pi) x, so each has the form q(x) exp(-pi x^2).  Built by
    the normalized three-term recurrence.
    """
    off = _parity_offset(parity)
    x = np.asarray(x, dtype=float)
    t = np.sqrt(2 * np.pi) * x
    n_top = 2 * k_max + off
    out = np.empty((k_max,) + x.shape)
    h_prev = np.zeros_like(t)
    h = np.pi ** -0.25 * np.exp(-t * t / 2)
    for n in range(n_top):
        if n % 2 == off and n // 2 < k_max:
            out[n // 2] = h
        h_prev, h = h, np.sqrt(2.0 / (n + 1)) * t * h - np.sqrt(n / (n + 1.0)) * h_prev
    return out * (2 * np.pi) ** 0.25


def hermite_derivatives_at_zero(k_max: int, parity: str = "odd") -> np.ndarray:
    """psi_k'(0) in closed form (zero for even parity)."""
    if parity == "even":
        return np.zeros(k_max)
    n = 2 * np.arange(k_max)
    # h_{n+1}'(0) = sqrt(2(n+1)) h_n(0) with h_n(0) = (-1)^{n/2} sqrt(n!) / (2^{n/2} (n/2)! pi^{1/4})
    log_h0 = 0.5 * gammaln(n + 1) - (n / 2) * np.log(2) - gammaln(n / 2 + 1)
    h0 = (-1.0) ** (n // 2) * np.exp(log_h0) * np.pi ** -0.25
    return np.sqrt(2.0 * (n + 1)) * h0 * np.sqrt(2 * np.pi) * (2 * np.pi) ** 0.25


def fourier_eigenvalue(k, parity: str = "even"):
    """Eigenvalue of the Fourier transform on basis function k: (-i)^(2k+offset)."""
    return (-1j) ** (2 * np.asarray(k) + _parity_offset(parity))


def kappa_weight(k, parity: str = "even"):
    """kappa-weight 1/2 + 2k (even) or 3/2 + 2k (odd) of basis function k."""
    return 0.5 + _parity_offset(parity) + 2 * np.asarray(k)


def hermite_synthesis(c: HermiteCoefficients, L: float = DEFAULT_L, N: int = DEFAULT_N) -> GridFunction:
    coeffs = np.asarray(c.coeffs)
    basis = hermite_functions(grid_points(L, N), len(coeffs), c.parity)
    phi = GridFunction(L, N, coeffs @ basis, c.parity)
    tr = GridFunction(L, N, basis[-1], c.parity).tail_ratio() if len(coeffs) else 0.0
    if tr > TAIL_TOL:
        raise GridResolutionError("basis function %d is not resolved on L=%g" % (len(coeffs) - 1, L))
    return phi


def hermite_analysis(phi: GridFunction, k_max: int) -> HermiteCoefficients:
    basis = hermite_functions(phi.x, k_max, phi.parity)
    if k_max and GridFunction(phi.L, phi.N, basis[-1], phi.parity).band_ratio() > BAND_TOL:
        raise GridResolutionError("basis function %d is not resolved with N=%d" % (k_max - 1, phi.N))
    return HermiteCoefficients(phi.parity, basis @ phi.values * phi.dx)


@lru_cache(maxsize=16)
def _basis_grid_functions(k_max, parity, L, N):
    basis = hermite_functions(grid_points(L, N), k_max, parity)
    return tuple(GridFunction(L, N, row, parity) for row in basis)


def basis_function(k: int, parity: str = "even", L: float = DEFAULT_L, N: int = DEFAULT_N) -> GridFunction:
    return _basis_grid_functions(k + 1, parity, L, N)[k]


def lie_matrix(op: str, k_max: int, parity: str = "even", L: float = DEFAULT_L, N: int = DEFAULT_N):
    """Matrix <psi_j, op psi_k> on the first k_max basis functions."""
    funcs = _basis_grid_functions(k_max, parity, L, N)
    basis = np.array([f.values.real for f in funcs])
    images = np.array([act_lie(op, f, check=False).values for f in funcs])
    return (basis @ images.T) * (2 * L / N)


def gaussian(L: float = DEFAULT_L, N: int = DEFAULT_N) -> GridFunction:
    return GridFunction.from_callable(lambda x: np.exp(-np.pi * x * x), "even", L, N)


# -- radial functions on R^d --------------------------------------------------------------

def radial_basis(r, k_max: int, d: int) -> np.ndarray:
    """Rows exp(-pi r^2) L_k^{(d/2-1)}(2 pi r^2), unit norm in L^2(R^d).

    These are the K-finite vectors of lowest weight d/2 among radial
    functions on R^d; the d-dimensional Fourier transform acts on row k by
    (-1)^k.
    """
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    r = np.asarray(r, dtype=float)
    alpha = d / 2 - 1
    k = np.arange(k_max)
    rows = np.array([eval_genlaguerre(j, alpha, 2 * np.pi * r * r) * np.exp(-np.pi * r * r) for j in k])
    # int_{R^d} L_k^a(2 pi |v|^2)^2 exp(-2 pi |v|^2) dv = Gamma(k + a + 1) / k! / Gamma(d/2) ... * 2^{-d/2}
    log_norm = 0.5 * (gammaln(k + alpha + 1) - gammaln(k + 1) - gammaln(d / 2) - (d / 2) * np.log(2.0))
    return rows * np.exp(-log_norm)[:, None] if rows.ndim > 1 else rows * np.exp(-log_norm)


# -- theta series --------------------------------------------------------------------------

def theta_coefficients(prec: int, dim: int = 1) -> np.ndarray:
    """Coefficients of q^0..q^{prec-1} in theta^dim, theta = sum_n q^{n^2}.

    For dim = 1 this counts n with n^2 = k; in general it is the number of
    representations of k as a sum of dim squares.
    """
    if prec < 1:
        raise ValueError("prec must be >= 1")
    theta = np.zeros(prec, dtype=np.int64)
    n = 0
    while n * n < prec:
        theta[n * n] += 1 if n == 0 else 2
        n += 1
    out = np.zeros(prec, dtype=np.int64)
    out[0] = 1
    for _ in range(dim):
        out = np.convolve(out, theta)[:prec]
    return out
