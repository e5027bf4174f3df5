"""H^0 and H^1 of the free group on two generators e, f with coefficients in a
finite-dimensional module, computed from fixed vectors and coinvariants.

For Gamma = <e> * <f> the Mayer-Vietoris sequence reads

    0 -> V^Gamma -> V^e + V^f -> V -> H^1(Gamma, V) -> V_e + V_f -> 0

where V^g = ker(g - 1) and V_g = V / (g - 1)V is H^1 of the cyclic group <g>.
Hence H^0 = V^e cap V^f and dim H^1 = dim coker(V^e + V^f -> V) + dim V_e + dim V_f.

Matrices are exact (``Fraction``) by default; float mode uses a relative
singular-value threshold.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact

FLOAT_RCOND = 1e-10
GENERATORS = {"e": ("e", 1), "f": ("f", 1), "e^-1": ("e", -1), "f^-1": ("f", -1),
              "E": ("e", -1), "F": ("f", -1)}


def _is_exact_entry(x) -> bool:
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return True
    if isinstance(x, str):
        try:
            Fraction(x)
            return True
        except ValueError:
            return False
    return False


@dataclass(frozen=True, eq=False)
class GroupRep:
    """rho(e), rho(f) as square invertible matrices; ``exact`` selects rational arithmetic."""

    dim: int
    rho_e: object
    rho_f: object
    exact: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        for name in ("rho_e", "rho_f"):
            M = getattr(self, name)
            if self.exact:
                M = exact.to_fraction_matrix(M)
                if len(M) != self.dim or any(len(r) != self.dim for r in M):
                    raise ValueError("%s must be %d x %d" % (name, self.dim, self.dim))
                if exact.determinant(M) == 0:
                    raise ValueError("%s is not invertible" % name)
            else:
                M = np.asarray(M, dtype=complex)
                if M.shape != (self.dim, self.dim):
                    raise ValueError("%s must be %d x %d" % (name, self.dim, self.dim))
                s = np.linalg.svd(M, compute_uv=False)
                if s[-1] <= FLOAT_RCOND * s[0]:
                    raise ValueError("%s is numerically singular" % name)
            object.__setattr__(self, name, M)

    def matrix(self, gen: str):
        return self.rho_e if gen == "e" else self.rho_f

    def conjugate(self, S) -> "GroupRep":
        """(S rho_e S^-1, S rho_f S^-1)."""
        if self.exact:
            Si = exact.inverse(S)
            conj = lambda M: exact.matmul(exact.matmul(S, M), Si)
        else:
            S = np.asarray(S, dtype=complex)
            Si = np.linalg.inv(S)
            conj = lambda M: S @ M @ Si
        return GroupRep(self.dim, conj(self.rho_e), conj(self.rho_f), self.exact)

    def to_json(self) -> dict:
        if self.exact:
            enc = lambda M: [[str(x) if x.denominator != 1 else int(x) for x in row] for row in M]
        else:
            enc = lambda M: np.real_if_close(M).tolist()
        return {"dim": self.dim, "rho_e": enc(self.rho_e), "rho_f": enc(self.rho_f)}

    @classmethod
    def from_json(cls, data: dict) -> "GroupRep":
        """Integers and rational strings ("1/2") give an exact rep; any float gives float mode."""
        entries = [x for key in ("rho_e", "rho_f") for row in data[key] for x in row]
        is_exact = all(_is_exact_entry(x) for x in entries)
        return cls(int(data["dim"]), data["rho_e"], data["rho_f"], exact=is_exact)


@dataclass(frozen=True)
class CohomologyReport:
    h0: int
    h1: int
    fixed_e: list
    fixed_f: list
    coinv_e: int
    coinv_f: int
    coker_dim: int

    def to_dict(self) -> dict:
        return {"h0": self.h0, "h1": self.h1, "dim_fixed_e": len(self.fixed_e),
                "dim_fixed_f": len(self.fixed_f), "coinv_e": self.coinv_e,
                "coinv_f": self.coinv_f, "coker_dim": self.coker_dim}


def _minus_identity(M, is_exact):
    if is_exact:
        return exact.subtract(M, exact.identity(len(M)))
    return np.asarray(M) - np.eye(len(M))


def _rank(rows, is_exact) -> int:
    if is_exact:
        return exact.rank(rows) if rows else 0
    A = np.asarray(rows, dtype=complex)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > FLOAT_RCOND * max(s[0], 1.0)))


def fixed_space(M, is_exact: bool | None = None) -> list:
    """Basis vectors of ker(M - I)."""
    if is_exact is None:
        is_exact = not isinstance(M, np.ndarray)
    if is_exact:
        return exact.nullspace(_minus_identity(exact.to_fraction_matrix(M), True))
    M = np.asarray(M, dtype=complex)
    A = _minus_identity(M, False)
    _, sv, Vh = np.linalg.svd(A)
    # threshold relative to max(||M||, 1) so that M = I + noise is treated as I
    r = int(np.sum(sv > FLOAT_RCOND * max(np.linalg.norm(M, 2), 1.0)))
    return [Vh[i].conj() for i in range(r, len(M))]


def mv_cohomology(rep: GroupRep) -> CohomologyReport:
    d = rep.dim
    Fe = fixed_space(rep.rho_e, rep.exact)
    Ff = fixed_space(rep.rho_f, rep.exact)
    span_sum = _rank([list(v) for v in Fe + Ff], rep.exact)
    h0 = len(Fe) + len(Ff) - span_sum
    coker = d - span_sum
    coinv_e = d - _rank(_minus_identity(rep.rho_e, rep.exact), rep.exact)
    coinv_f = d - _rank(_minus_identity(rep.rho_f, rep.exact), rep.exact)
    return CohomologyReport(h0, coker + coinv_e + coinv_f, Fe, Ff, coinv_e, coinv_f, coker)


def paper_simplification_applies(rep: GroupRep) -> bool:
    """True iff both coinvariant spaces vanish, so H^1 is the cokernel alone."""
    r = mv_cohomology(rep)
    return r.coinv_e == 0 and r.coinv_f == 0


def bar_resolution_dims(rep: GroupRep):
    """Independent oracle from cochains of the free group.

    A 1-cocycle is determined freely by (j(e), j(f)) in V + V; coboundaries
    are v -> ((rho_e - 1)v, (rho_f - 1)v), whose kernel is H^0.
    """
    d = rep.dim
    De = _minus_identity(rep.rho_e, rep.exact)
    Df = _minus_identity(rep.rho_f, rep.exact)
    stacked = [list(r) for r in De] + [list(r) for r in Df]
    r = _rank(stacked, rep.exact)
    return d - r, 2 * d - r


def _parse_word(word):
    out = []
    for tok in word:
        if tok not in GENERATORS:
            raise ValueError("unknown generator %r; use e, f, e^-1, f^-1 (or E, F)" % (tok,))
        out.append(GENERATORS[tok])
    return out


def cocycle_verify(rep: GroupRep, c_e, c_f, word) -> list:
    """j(word) for the cocycle with j(e) = c_e, j(f) = c_f, via j(gh) = j(g) + g j(h)."""
    steps = _parse_word(word)
    d = rep.dim
    if rep.exact:
        vals = {"e": [Fraction(x) for x in c_e], "f": [Fraction(x) for x in c_f]}
        inv = {g: exact.inverse(rep.matrix(g)) for g in "ef"}
        P = exact.identity(d)
        j = [Fraction(0)] * d
        for g, sgn in steps:
            if sgn == 1:
                jg, Mg = vals[g], rep.matrix(g)
            else:
                jg, Mg = [-x for x in exact.matvec(inv[g], vals[g])], inv[g]
            j = [a + b for a, b in zip(j, exact.matvec(P, jg))]
            P = exact.matmul(P, Mg)
        return j
    vals = {"e": np.asarray(c_e, dtype=complex), "f": np.asarray(c_f, dtype=complex)}
    P = np.eye(d, dtype=complex)
    j = np.zeros(d, dtype=complex)
    for g, sgn in steps:
        Mg = rep.matrix(g)
        if sgn == 1:
            jg = vals[g]
        else:
            Mg = np.linalg.inv(Mg)
            jg = -Mg @ vals[g]
        j = j + P @ jg
        P = P @ Mg
    return list(j)


def word_matrix(rep: GroupRep, word):
    """rho(word) as a matrix (product left to right)."""
    steps = _parse_word(word)
    if rep.exact:
        P = exact.identity(rep.dim)
        for g, sgn in steps:
            P = exact.matmul(P, rep.matrix(g) if sgn == 1 else exact.inverse(rep.matrix(g)))
        return P
    P = np.eye(rep.dim, dtype=complex)
    for g, sgn in steps:
        P = P @ (rep.matrix(g) if sgn == 1 else np.linalg.inv(rep.matrix(g)))
    return P
