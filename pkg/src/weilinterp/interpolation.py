"""Finite sections of the sampling map phi -> (phi(sqrt n), phi^(sqrt n)).

The map is restricted to the span of the first k_max Hermite functions of one
parity and truncated to 0 <= n <= n_max.  The resulting design matrix is used
to check injectivity, to locate the linear relations satisfied by all sample
vectors (Poisson summation in the even sector) and to reconstruct functions
from their samples by least squares.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import oscillator as osc

KERNEL_THRESHOLD = 1e-10
# grid evaluation error leaves exact relations at ~1e-9 relative singular value
LEFT_KERNEL_THRESHOLD = 1e-6
LIVE_ROW_TOL = 1e-6
ANGLE_TOL = 1e-6
ORTH_RCOND = 1e-10
MAX_CONDITION = 1e12


class IllConditionedError(ValueError):
    """The least-squares system is too ill-conditioned to solve without regularization."""


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Row blocks A[n, k] = psi_k(sqrt n) and B[n, k] = psi_k^(sqrt n).

    With ``derivative_rows`` each block carries one extra final row holding
    psi_k'(0) (resp. psi_k^'(0)); these are the natural extra functionals on
    odd functions, which all vanish at 0.
    """

    A: np.ndarray
    B: np.ndarray
    parity: str
    n_max: int
    derivative_rows: bool = False
    eigenvalues: np.ndarray = field(default=None)

    @property
    def k_max(self) -> int:
        return self.A.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return np.vstack([self.A, self.B])

    @property
    def shape(self):
        return self.matrix.shape

    def row_labels(self):
        """(block, n) for each row; n is 'd' for a derivative row."""
        idx = list(range(self.n_max + 1)) + (["d"] if self.derivative_rows else [])
        return [("a", n) for n in idx] + [("b", n) for n in idx]

    def eigen_consistency(self) -> float:
        """max |B - A diag(eig)| relative to max |A|; Hermite functions are Fourier eigenvectors."""
        if self.eigenvalues is None:
            raise ValueError("design has no recorded Fourier eigenvalues")
        scale = np.abs(self.A).max()
        return float(np.abs(self.B - self.A * self.eigenvalues[None, :]).max() / scale) if scale else 0.0


@dataclass(frozen=True)
class PoissonFunctional:
    """sum_{n in Z} x_{n^2} - sum_{n in Z} y_{n^2} as a vector on (a, b) coordinates."""

    n_max: int

    @property
    def weights(self) -> np.ndarray:
        w = np.zeros(self.n_max + 1)
        w[0] = 1.0
        m = 1
        while m * m <= self.n_max:
            w[m * m] = 2.0
            m += 1
        return w

    @property
    def vector(self) -> np.ndarray:
        w = self.weights
        return np.concatenate([w, -w])

    def apply(self, s: osc.SampleVector) -> complex:
        if s.n_max != self.n_max:
            raise ValueError("sample vector has n_max %d, functional has %d" % (s.n_max, self.n_max))
        return complex(self.vector @ s.stacked())


def odd_relation_vector(n_max: int) -> np.ndarray:
    """The analogous relation for odd functions, on rows of a design with derivative rows.

    phi'(0) + sum_n r3(n) phi(sqrt n)/sqrt n = i phi^'(0) + i sum_n r3(n) phi^(sqrt n)/sqrt n,
    where r3(n) counts representations as a sum of three squares.  It is
    the radial Poisson summation formula in R^3 applied to phi(|v|)/|v|.
    Unlike the even relation it involves every n, so on a truncation it
    holds only up to the tail of the basis functions beyond sqrt(n_max).
    """
    r3 = osc.theta_coefficients(n_max + 1, dim=3).astype(float)
    w = np.zeros(n_max + 2)
    n = np.arange(1, n_max + 1)
    w[1:n_max + 1] = r3[1:] / np.sqrt(n)
    w[-1] = 1.0
    return np.concatenate([w, -1j * w])


def _grid_design(n_max, k_max, L, N, parity, derivative_rows):
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    funcs = osc._basis_grid_functions(k_max, parity, L, N)
    last = funcs[-1]
    if last.tail_ratio() > osc.TAIL_TOL:
        raise osc.GridResolutionError("basis function %d is not decayed on L=%g" % (k_max - 1, L))
    if last.band_ratio() > osc.BAND_TOL:
        raise osc.GridResolutionError("basis function %d is not resolved with N=%d" % (k_max - 1, N))
    A_cols, B_cols = [], []
    for phi in funcs:
        s = osc.sample_map(phi, n_max)
        a, b = list(s.a), list(s.b)
        if derivative_rows:
            a.append(osc.derivative(phi, 1)[N // 2])
            b.append(osc.derivative(osc.fourier(phi), 1)[N // 2])
        A_cols.append(a)
        B_cols.append(b)
    return np.array(A_cols).T, np.array(B_cols).T


def build_design(n_max: int, k_max: int, L: float = osc.DEFAULT_L, N: int = osc.DEFAULT_N,
                 parity: str = "even", derivative_rows: bool = False) -> DesignMatrix:
    """Assemble the design column by column from sample_map of each basis function."""
    if derivative_rows and parity != "odd":
        raise ValueError("derivative rows are only meaningful for odd parity")
    A, B = _grid_design(n_max, k_max, L, N, parity, derivative_rows)
    eig = osc.fourier_eigenvalue(np.arange(k_max), parity)
    return DesignMatrix(A, B, parity, n_max, derivative_rows, eig)


def build_radial_design(d: int, n_max: int, k_max: int) -> DesignMatrix:
    """Design for radial functions on R^d (basis of lowest weight d/2), from closed forms."""
    r = np.sqrt(np.arange(n_max + 1))
    A = osc.radial_basis(r, k_max, d).T.astype(complex)
    eig = (-1.0) ** np.arange(k_max)
    return DesignMatrix(A, A * eig[None, :], "radial%d" % d, n_max, False, eig.astype(complex))


def numerical_kernel(D: DesignMatrix, threshold: float = KERNEL_THRESHOLD):
    """(kernel_dim, singular values ascending) with the kernel counted relative to s_max."""
    M = D.matrix
    s = np.linalg.svd(M, compute_uv=False)
    small = int(np.sum(s < threshold * s[0])) if s.size and s[0] > 0 else M.shape[1]
    missing = max(0, M.shape[1] - M.shape[0])
    return small + missing, np.sort(s)


def _square_rows(D: DesignMatrix):
    n_rows = D.n_max + 1 + int(D.derivative_rows)
    squares = [m * m for m in range(math.isqrt(D.n_max) + 1)]
    return squares + [n_rows + q for q in squares]


def live_rows(D: DesignMatrix, rows=None, tol: float = LIVE_ROW_TOL):
    """Rows whose norm exceeds tol times the largest row norm."""
    M = D.matrix
    rows = list(range(M.shape[0])) if rows is None else list(rows)
    norms = np.linalg.norm(M[rows], axis=1)
    top = norms.max() if norms.size else 0.0
    return [r for r, nr in zip(rows, norms) if top and nr > tol * top]


@dataclass(frozen=True, eq=False)
class LeftKernel:
    """Orthonormal basis (columns) of relations on the listed design rows."""

    rows: list
    basis: np.ndarray
    singular_values: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def alignment(self, vector) -> float:
        """Norm of the projection of vector (restricted to rows, unit-normalized) onto the kernel.

        For a one-dimensional kernel this is |cos| of the angle between them.
        """
        v = np.asarray(vector, dtype=complex)[self.rows]
        nv = np.linalg.norm(v)
        if nv == 0 or self.dim == 0:
            return 0.0
        return float(np.linalg.norm(self.basis.conj().T @ (v / nv)))


def left_kernel(D: DesignMatrix, threshold: float = LEFT_KERNEL_THRESHOLD, rows="squares",
                live_tol: float = LIVE_ROW_TOL) -> LeftKernel:
    """Relations u with u^T D = 0, supported on the selected live rows.

    ``rows`` is "squares" (the coordinates n = m^2 on which the even
    Poisson relation lives), "all", or an explicit list of row indices.
    Rows that are numerically zero on the whole basis (square roots far
    beyond the basis' support, or psi(0) for odd functions) are dropped:
    they would add trivial kernel directions.
    """
    if isinstance(rows, str):
        if rows == "squares":
            rows = _square_rows(D)
        elif rows == "all":
            rows = None
        else:
            raise ValueError("rows must be 'squares', 'all' or a list of indices")
    keep = live_rows(D, rows, live_tol)
    sub = D.matrix[keep]
    U, s, _ = np.linalg.svd(sub, full_matrices=True)
    rank = int(np.sum(s > threshold * s[0])) if s.size and s[0] > 0 else 0
    return LeftKernel(keep, U[:, rank:].conj(), s)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    coefficients: osc.HermiteCoefficients
    residual: float
    poisson_residual: complex
    condition: float
    rank: int


def reconstruct(s: osc.SampleVector, k_max: int, L: float = osc.DEFAULT_L, N: int = osc.DEFAULT_N,
                parity: str = "even", regularization: float = 0.0, rcond: float = 1e-13,
                max_condition: float = MAX_CONDITION, design: DesignMatrix | None = None) -> Reconstruction:
    """Least-squares Hermite coefficients from a sample vector.

    Solved by SVD with explicit cutoff ``rcond``; ``regularization`` > 0
    switches to a ridge (Tikhonov) filter.  Without regularization a system
    whose condition number exceeds ``max_condition`` is rejected.
    """
    D = design if design is not None else build_design(s.n_max, k_max, L, N, parity)
    if D.n_max != s.n_max or D.derivative_rows:
        raise ValueError("design does not match the sample vector layout")
    M = D.matrix
    y = s.stacked()
    U, sv, Vh = np.linalg.svd(M, full_matrices=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    if M.shape[1] > M.shape[0]:
        cond = np.inf  # underdetermined: the coefficients are not identifiable
    if regularization < 0:
        raise ValueError("regularization must be non-negative")
    if regularization == 0 and cond > max_condition:
        raise IllConditionedError("design condition number %.3g exceeds %.3g; reduce k_max or "
                                  "pass a ridge regularization" % (cond, max_condition))
    proj = U.conj().T @ y
    if regularization > 0:
        filt = sv / (sv ** 2 + regularization ** 2)
        rank = len(sv)
    else:
        keep = sv > rcond * sv[0]
        filt = np.where(keep, 1 / np.where(keep, sv, 1), 0.0)
        rank = int(keep.sum())
    c = Vh.conj().T @ (filt * proj)
    resid = float(np.linalg.norm(M @ c - y))
    pr = PoissonFunctional(s.n_max).apply(s) if parity == "even" else 0j
    return Reconstruction(osc.HermiteCoefficients(parity, c), resid, pr, cond, rank)


def _row_space(M, rcond):
    # orthonormal basis of span of the rows (as vectors in C^k)
    return sla.orth(M.T, rcond=rcond)


def mv_dimension_report(L: float = osc.DEFAULT_L, N: int = osc.DEFAULT_N, n_max: int = 20,
                        k_max: int | None = None, parity: str = "even",
                        derivative_rows: bool = False, radial_dim: int | None = None,
                        angle_tol: float = ANGLE_TOL, rcond: float = ORTH_RCOND) -> dict:
    """Truncated shadows of dim H^0 and dim H^1.

    h0 counts principal angles below ``angle_tol`` between the row spaces of
    the two blocks (functionals built from phi(sqrt n) and from
    phi^(sqrt n)); h1 is the codimension of their sum in the dual of the
    k_max-dimensional truncated space.  The default k_max = (number of
    rows) - 1 is the matched size at which a single relation between the
    blocks is visible; with many more rows than columns the two row spaces
    overlap trivially and the intersection count is meaningless.
    """
    rows = n_max + 1
    if k_max is None:
        k_max = 2 * rows - 1
    if radial_dim is not None:
        D = build_radial_design(radial_dim, n_max, k_max)
    else:
        D = build_design(n_max, k_max, L, N, parity, derivative_rows)
    A, B = D.A, D.B
    if parity == "odd" and radial_dim is None:
        # phi(0) = phi^(0) = 0 identically on odd functions
        A, B = A[1:], B[1:]
    RA, RB = _row_space(A, rcond), _row_space(B, rcond)
    angles = np.sort(sla.subspace_angles(RA, RB)) if RA.size and RB.size else np.array([])
    h0 = int(np.sum(angles < angle_tol))
    rank_sum = _row_space(np.vstack([A, B]), rcond).shape[1]
    h1 = k_max - rank_sum
    return {"h0": h0, "h1": h1, "n_max": n_max, "k_max": k_max,
            "rank_a": RA.shape[1], "rank_b": RB.shape[1], "rank_sum": rank_sum,
            "smallest_angles": angles[:3].tolist()}
