"""Exact calculator for (g, K)-modules of finite covers of SL2(R).

Weights live in q^-1 Z and are represented by :class:`KWeight`; every
eigenvalue is a :class:`fractions.Fraction`.  Modules are described up to
isomorphism by :class:`GkModule` descriptors.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd
from typing import Optional

from . import exact

LOWEST = "lowest"
HIGHEST = "highest"
DOUBLY_INFINITE = "doubly_infinite"
FINITE = "finite"
KINDS = (LOWEST, HIGHEST, DOUBLY_INFINITE, FINITE)


def as_fraction(value) -> Fraction:
    if isinstance(value, KWeight):
        return value.value
    if isinstance(value, float):
        raise TypeError("weights and eigenvalues must be exact, got float %r" % value)
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class KWeight:
    """A K-weight numerator/cover_degree in q^-1 Z."""

    numerator: int
    cover_degree: int = 1

    def __post_init__(self):
        if self.cover_degree < 1:
            raise ValueError("cover_degree must be >= 1")

    @classmethod
    def of(cls, value, cover_degree: Optional[int] = None) -> "KWeight":
        """Build from an int, Fraction, ``"a/b"`` string or KWeight."""
        if isinstance(value, KWeight):
            if cover_degree is None:
                return value
            value = value.value
        frac = Fraction(value)
        q = frac.denominator if cover_degree is None else cover_degree
        if (frac * q).denominator != 1:
            raise ValueError("%s is not in %d^-1 Z" % (frac, q))
        return cls(int(frac * q), q)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.cover_degree)

    def __eq__(self, other):
        if isinstance(other, KWeight):
            return self.numerator * other.cover_degree == other.numerator * self.cover_degree
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other):
        return self.value < as_fraction(other)

    def __le__(self, other):
        return self.value <= as_fraction(other)

    def _shift(self, n) -> "KWeight":
        n = as_fraction(n)
        q = self.cover_degree
        if (n * q).denominator != 1:
            q = q * n.denominator // gcd(q, n.denominator)
        return KWeight.of(self.value + n, q)

    def __add__(self, other):
        return self._shift(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self._shift(-as_fraction(other))

    def __neg__(self):
        return KWeight(-self.numerator, self.cover_degree)

    def mod2(self) -> "KWeight":
        """Representative of the coset self + 2Z in [0, 2)."""
        v = self.value
        return KWeight.of(v - 2 * (v // 2), self.cover_degree)

    def is_integral(self) -> bool:
        return self.value.denominator == 1

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return "KWeight(%s)" % self.value


def same_coset(a, b) -> bool:
    """True iff a - b lies in 2Z."""
    d = as_fraction(a) - as_fraction(b)
    return d.denominator == 1 and d.numerator % 2 == 0


@dataclass(frozen=True)
class GkModule:
    """Isomorphism class of an irreducible (or principal-series factor) module.

    Use the constructors :meth:`lowest`, :meth:`highest`,
    :meth:`doubly_infinite` and :meth:`finite` rather than the raw fields.
    """

    kind: str
    weight: Optional[KWeight] = None
    casimir_value: Optional[Fraction] = None
    dim: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("unknown module kind %r" % self.kind)

    @classmethod
    def lowest(cls, zeta) -> "GkModule":
        return cls(LOWEST, KWeight.of(zeta))

    @classmethod
    def highest(cls, zeta) -> "GkModule":
        return cls(HIGHEST, KWeight.of(zeta))

    @classmethod
    def doubly_infinite(cls, coset, casimir) -> "GkModule":
        return cls(DOUBLY_INFINITE, KWeight.of(coset).mod2(), as_fraction(casimir))

    @classmethod
    def finite(cls, dim: int) -> "GkModule":
        if dim < 1:
            raise ValueError("finite-dimensional module needs dim >= 1")
        return cls(FINITE, dim=int(dim))

    @property
    def is_infinite(self) -> bool:
        return self.kind != FINITE

    def weights(self, limit: int = 8):
        """First ``limit`` weights in the support (all of them when finite)."""
        if self.kind == LOWEST:
            return [self.weight.value + 2 * j for j in range(limit)]
        if self.kind == HIGHEST:
            return [self.weight.value - 2 * j for j in range(limit)]
        if self.kind == FINITE:
            return [Fraction(-self.dim + 1 + 2 * j) for j in range(self.dim)]
        base = self.weight.value
        half = limit // 2
        return [base + 2 * j for j in range(-half, limit - half)]

    def has_weight(self, zeta) -> bool:
        z = as_fraction(zeta)
        if self.kind == LOWEST:
            return same_coset(z, self.weight) and z >= self.weight.value
        if self.kind == HIGHEST:
            return same_coset(z, self.weight) and z <= self.weight.value
        if self.kind == FINITE:
            return same_coset(z, self.dim - 1) and abs(z) <= self.dim - 1
        return same_coset(z, self.weight)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.weight is not None:
            out["weight"] = str(self.weight.value)
        if self.dim is not None:
            out["dim"] = self.dim
        out["casimir"] = str(casimir_eigenvalue(self))
        return out

    def __str__(self):
        if self.kind == FINITE:
            return "FiniteDim(%d)" % self.dim
        if self.kind == DOUBLY_INFINITE:
            return "DoublyInfinite(%s mod 2, C=%s)" % (self.weight, self.casimir_value)
        return "%sWeight(%s)" % (self.kind.capitalize(), self.weight)


def casimir_eigenvalue(m: GkModule) -> Fraction:
    """Scalar by which the Casimir element acts on ``m``."""
    if m.kind == LOWEST:
        z = m.weight.value
        return z * (z - 2) / 2
    if m.kind == HIGHEST:
        z = m.weight.value
        return z * (z + 2) / 2
    if m.kind == FINITE:
        return Fraction(m.dim * m.dim - 1, 2)
    return m.casimir_value


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    from math import isqrt

    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def is_irreducible(m: GkModule) -> bool:
    """Whether the descriptor names an irreducible module.

    A lowest weight module of integral weight <= 0 (or highest weight >= 0)
    has a finite-dimensional quotient; a doubly infinite module whose weight
    lattice contains a root of the lowest/highest weight Casimir equation
    has a lowest or highest weight vector.
    """
    if m.kind == FINITE:
        return m.dim >= 1
    if m.kind == LOWEST:
        return not (m.weight.is_integral() and m.weight.value <= 0)
    if m.kind == HIGHEST:
        return not (m.weight.is_integral() and m.weight.value >= 0)
    root = _rational_sqrt(1 + 2 * m.casimir_value)
    if root is None:
        return True
    return not any(same_coset(1 + s, m.weight) for s in (root, -root))


def _require_irreducible_infinite(w: GkModule):
    if not w.is_infinite:
        raise ValueError("expected an infinite-dimensional module, got %s" % w)
    if not is_irreducible(w):
        raise ValueError("%s is not irreducible" % w)


def complementary_module(w: GkModule) -> GkModule:
    """The complementary irreducible module W^cl.

    Lowest weight z goes to highest weight z - 2 and highest weight z to
    lowest weight z + 2; doubly infinite modules are their own complement.
    When W is a discrete series module of SL2(R) (integral lowest weight
    >= 2, or integral highest weight <= -2) the irreducible module of that
    highest/lowest weight is finite-dimensional and is returned as such.
    """
    _require_irreducible_infinite(w)
    z = w.weight
    if w.kind == LOWEST:
        if z.is_integral() and z.value >= 2:
            return GkModule.finite(int(z.value) - 1)
        return GkModule(HIGHEST, z - 2)
    if w.kind == HIGHEST:
        if z.is_integral() and z.value <= -2:
            return GkModule.finite(-int(z.value) - 1)
        return GkModule(LOWEST, z + 2)
    return w


def complement_is_finite(w: GkModule) -> bool:
    return complementary_module(w).kind == FINITE


def ext1_dim(w: GkModule, v: GkModule) -> int:
    """Dimension of Ext^1(W, V) for irreducible W (infinite) and V."""
    _require_irreducible_infinite(w)
    if not is_irreducible(v):
        raise ValueError("%s is not irreducible" % v)
    return int(complementary_module(w) == v)


# -- ladder realizations -----------------------------------------------------

def m_coefficient(m: GkModule, zeta) -> Optional[Fraction]:
    """Coefficient c with  m e_zeta = c e_{zeta-2}  in a standard ladder basis.

    Lowest weight and doubly infinite modules are normalized by
    ``p e_zeta = e_{zeta+2}``; the Casimir then forces
    2c = lambda - zeta^2/2 + zeta.  Highest weight and finite modules are
    normalized by ``m e_zeta = e_{zeta-2}`` below the top weight.  Returns
    None when zeta is not a weight of the module.
    """
    z = as_fraction(zeta)
    if not m.has_weight(z):
        return None
    if not m.has_weight(z - 2):
        return Fraction(0)
    lam = casimir_eigenvalue(m)
    if m.kind in (LOWEST, DOUBLY_INFINITE):
        return (lam - z * z / 2 + z) / 2
    return Fraction(1)


def p_coefficient(m: GkModule, zeta) -> Optional[Fraction]:
    """Coefficient c with  p e_zeta = c e_{zeta+2}  (normalizations as above)."""
    z = as_fraction(zeta)
    if not m.has_weight(z):
        return None
    if not m.has_weight(z + 2):
        return Fraction(0)
    lam = casimir_eigenvalue(m)
    if m.kind in (HIGHEST, FINITE):
        return (lam - z * z / 2 - z) / 2
    return Fraction(1)


def ext1_weight_criterion(w: GkModule, v: GkModule) -> int:
    """Upper bound dim V_{z-2}/m V_z for lowest weight W of weight z.

    This is the injective target of Ext^1(W, V) (zero unless the Casimir
    eigenvalues agree).  For highest weight W the mirrored quotient
    V_{z+2}/p V_z is used.  Computed from explicit ladder coefficients only.
    """
    _require_irreducible_infinite(w)
    if casimir_eigenvalue(v) != casimir_eigenvalue(w):
        return 0
    z = w.weight.value
    if w.kind == LOWEST:
        target, source, coeff = z - 2, z, m_coefficient
    elif w.kind == HIGHEST:
        target, source, coeff = z + 2, z, p_coefficient
    else:
        raise ValueError("weight criterion only applies to lowest/highest weight W")
    if not v.has_weight(target):
        return 0
    if not v.has_weight(source):
        return 1
    return int(coeff(v, source) == 0)


# -- principal series ----------------------------------------------------------

@dataclass(frozen=True)
class PrincipalSeries:
    """Principal series with K-type coset zeta0 + 2Z and A-character y^xi."""

    zeta0: KWeight
    xi: Fraction

    @classmethod
    def of(cls, zeta0, xi) -> "PrincipalSeries":
        return cls(KWeight.of(zeta0), as_fraction(xi))

    @property
    def casimir(self) -> Fraction:
        return (self.xi * self.xi - 1) / 2

    def p_coeff(self, zeta) -> Fraction:
        return (as_fraction(zeta) + 1 + self.xi) / 2

    def m_coeff(self, zeta) -> Fraction:
        return (-as_fraction(zeta) + 1 + self.xi) / 2


@dataclass(frozen=True)
class CompositionReport:
    case_tag: str
    factors: tuple  # of (GkModule, role) with role in {"irreducible", "sub", "quotient"}
    degenerate: bool = False
    notes: str = ""

    def modules(self, role=None):
        return [m for m, r in self.factors if role is None or r == role]

    def to_dict(self) -> dict:
        out = {
            "case": self.case_tag,
            "factors": [dict(m.to_dict(), role=r) for m, r in self.factors],
        }
        if self.degenerate:
            out["degenerate"] = True
            out["notes"] = self.notes
        return out


def principal_series_structure(ps: PrincipalSeries) -> CompositionReport:
    """Composition structure of a principal series module.

    Case A: 1+xi lies in neither zeta0+2Z nor -zeta0+2Z (irreducible).
    Case B: exactly one; the submodule is lowest weight 1+xi (m kills that
    vector) or highest weight -1-xi (p kills it), the quotient its complement.
    Case C: both; for xi >= 1 the discrete series pair is the submodule and
    the xi-dimensional module the quotient, mirrored for xi <= -1.  At xi = 0
    the finite factor would be zero-dimensional; the module splits as the two
    limits of discrete series and the report is flagged degenerate.
    """
    a = 1 + ps.xi
    plus = same_coset(a, ps.zeta0)
    minus = same_coset(a, -ps.zeta0.value)
    lam = ps.casimir
    if not plus and not minus:
        return CompositionReport("A", ((GkModule.doubly_infinite(ps.zeta0, lam), "irreducible"),))
    q = ps.zeta0.cover_degree
    if plus != minus:
        if plus:
            sub = GkModule(LOWEST, KWeight.of(a, q))
        else:
            sub = GkModule(HIGHEST, KWeight.of(-a, q))
        return CompositionReport("B", ((sub, "sub"), (complementary_module(sub), "quotient")))
    xi = ps.xi
    if xi >= 1:
        n = int(xi)
        return CompositionReport("C", (
            (GkModule.lowest(n + 1), "sub"),
            (GkModule.highest(-n - 1), "sub"),
            (GkModule.finite(n), "quotient"),
        ))
    if xi <= -1:
        n = int(-xi)
        return CompositionReport("C", (
            (GkModule.finite(n), "sub"),
            (GkModule.lowest(n + 1), "quotient"),
            (GkModule.highest(-n - 1), "quotient"),
        ))
    return CompositionReport(
        "C",
        ((GkModule.lowest(1), "sub"), (GkModule.highest(-1), "sub")),
        degenerate=True,
        notes="xi = 0: finite factor has dimension 0; module is the direct sum "
              "of the limits of discrete series",
    )


def ps_ladder_matrices(ps: PrincipalSeries, zeta_min, count: int):
    """Matrices of p, m and kappa on the window zeta_min, zeta_min+2, ...

    Entries are Fractions; columns index the source basis vector.  Raising
    past the top or lowering past the bottom of the window gives zero.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    z0 = as_fraction(zeta_min)
    if not same_coset(z0, ps.zeta0):
        raise ValueError("window start %s is not in %s + 2Z" % (z0, ps.zeta0))
    weights = [z0 + 2 * i for i in range(count)]
    zero = Fraction(0)
    P = [[zero] * count for _ in range(count)]
    M = [[zero] * count for _ in range(count)]
    Kappa = [[zero] * count for _ in range(count)]
    for i, z in enumerate(weights):
        Kappa[i][i] = z
        if i + 1 < count:
            P[i + 1][i] = ps.p_coeff(z)
        if i > 0:
            M[i - 1][i] = ps.m_coeff(z)
    return P, M, Kappa


def ladder_case_from_ranks(ps: PrincipalSeries, margin: int = 3):
    """Classify by rank deficiency of truncated raising/lowering matrices.

    Independent of :func:`principal_series_structure`: builds a window that
    contains every weight where p or m could vanish and counts the rank drop
    of the off-diagonal ladder blocks.  Returns (case_tag, p_kills, m_kills)
    where the last two list the weights annihilated by p (resp. m).
    """
    bound = abs(1 + ps.xi) + abs(ps.zeta0.value) + 2 * margin
    z0 = ps.zeta0.value
    start = z0 + 2 * ceil((-bound - z0) / 2)
    count = int((bound - start) // 2) + 1
    P, M, _ = ps_ladder_matrices(ps, start, count)
    weights = [start + 2 * i for i in range(count)]
    p_block = [row[:-1] for row in P[1:]]   # p: V_z -> V_{z+2}, z below the top
    m_block = [row[1:] for row in M[:-1]]   # m: V_z -> V_{z-2}, z above the bottom
    p_drop = (count - 1) - exact.rank(p_block)
    m_drop = (count - 1) - exact.rank(m_block)
    p_kills = [weights[i] for i in range(count - 1) if P[i + 1][i] == 0]
    m_kills = [weights[i] for i in range(1, count) if M[i - 1][i] == 0]
    tag = {0: "A", 1: "B", 2: "C"}[p_drop + m_drop]
    return tag, p_kills, m_kills
