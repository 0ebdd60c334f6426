"""Finitely described additive subgroups of R used to label gaps and Bragg peaks.

Supported kinds: Z + rho Z with rho irrational (two generators), the cyclic
degenerations (1/q)Z, and scaled localisations a Z[1/p].  Membership is only
meaningful with coordinate bounds since Z + rho Z is dense; the bounds mirror
how two-integer labels are read off finite spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import UnknownFamily
from .exactla import QuadExt, hermite_column_form

DEFAULT_Q_MAX = 30
DEFAULT_N_MAX = 12
DEFAULT_TOL = 1e-3


def squarefree_decompose(n: int) -> tuple[int, int]:
    """n = s^2 * d with d squarefree; returns (s, d)."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, d = 1, 1
    remaining = n
    f = 2
    while f * f <= remaining:
        power = 0
        while remaining % f == 0:
            remaining //= f
            power += 1
        if power:
            s *= f ** (power // 2)
            if power % 2:
                d *= f
        f += 1
    d *= remaining
    return s, d


def rational_lattice_hnf(columns: list[tuple[Fraction, Fraction]]):
    """Canonical basis of a rank-<=2 lattice in Q^2 (columns of Fractions)."""
    if not columns:
        return []
    denom = 1
    for a, b in columns:
        denom = denom * a.denominator // math.gcd(denom, a.denominator)
        denom = denom * b.denominator // math.gcd(denom, b.denominator)
    int_cols = [[int(a * denom) for a, _ in columns],
                [int(b * denom) for _, b in columns]]
    h = hermite_column_form(int_cols)
    ncols = len(h[0]) if h else 0
    return [tuple(Fraction(h[r][c], denom) for r in range(2)) for c in range(ncols)]


@dataclass(frozen=True)
class LabelGroup:
    """One of (1/q)Z, Z + rho Z, or a Z[1/p]."""

    kind: str  # "cyclic" | "two_gen" | "localized"
    q: int = 1                      # cyclic
    rho: float = 0.0                # two_gen, in (0, 1)
    lattice: Optional[tuple] = None  # two_gen exact: (d, ((a,b), (c,e)) columns)
    scale: Fraction = Fraction(1)   # localized
    prime: int = 2                  # localized

    @property
    def canonical_name(self) -> str:
        if self.kind == "cyclic":
            return "Z" if self.q == 1 else f"(1/{self.q})Z"
        if self.kind == "two_gen":
            return f"Z+rho*Z(rho={self.rho:.10f})"
        if self.scale == 1:
            return f"Z[1/{self.prime}]"
        return f"({self.scale})Z[1/{self.prime}]"

    def __eq__(self, other):
        if not isinstance(other, LabelGroup):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind == "cyclic":
            return self.q == other.q
        if self.kind == "localized":
            return self.scale == other.scale and self.prime == other.prime
        if self.lattice is not None and other.lattice is not None:
            return self.lattice == other.lattice
        return abs(self.rho - other.rho) < 1e-12

    def __hash__(self):
        return hash((self.kind, self.q, self.prime, self.scale))


@dataclass(frozen=True)
class GroupElement:
    """Group element with its integer coordinates and real value."""

    coordinates: tuple[int, ...]
    value: float

    @property
    def reduced_mod_1(self) -> float:
        return self.value - math.floor(self.value)


def cyclic_group(q: int) -> LabelGroup:
    if q < 1:
        raise ValueError("q must be positive")
    return LabelGroup(kind="cyclic", q=q)


def two_gen_group(rho) -> LabelGroup:
    """Z + rho Z.  Rational rho collapses to the cyclic presentation (1/q)Z."""
    if isinstance(rho, Fraction) or isinstance(rho, int):
        frac = Fraction(rho)
        return cyclic_group(frac.denominator)
    if isinstance(rho, QuadExt):
        if rho.is_rational():
            return cyclic_group(Fraction(rho.a).denominator)
        cols = rational_lattice_hnf([(Fraction(1), Fraction(0)), (rho.a, rho.b)])
        lattice = (rho.d, tuple(cols))
        rho_f = _display_rho(rho.d, cols)
        return LabelGroup(kind="two_gen", rho=rho_f, lattice=lattice)
    rho_f = float(rho) % 1.0
    if rho_f == 0.0:
        return cyclic_group(1)
    return LabelGroup(kind="two_gen", rho=rho_f)


def _display_rho(d: int, cols) -> float:
    # Present the lattice as Z * 1 + Z * w: w generates the quotient by Z * 1,
    # i.e. its sqrt(d)-coordinate is the gcd of the basis sqrt(d)-coordinates.
    # Requires 1 to lie in the lattice (true for every group this package
    # constructs); rho = w mod 1.
    if len(cols) != 2:
        raise ValueError("two-generator lattice expected")
    y1, y2 = cols[0][1], cols[1][1]
    denom = math.lcm(y1.denominator, y2.denominator)
    n1, n2 = int(y1 * denom), int(y2 * denom)
    g, a, b = _egcd(n1, n2)
    w_rat = a * cols[0][0] + b * cols[1][0]
    w_irr = a * y1 + b * y2
    val = float(w_rat) + float(w_irr) * math.sqrt(d)
    return val - math.floor(val)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def localized_group(scale: Fraction, prime: int) -> LabelGroup:
    """a Z[1/p] with powers of p absorbed into the module (canonical a)."""
    scale = Fraction(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    num, den = scale.numerator, scale.denominator
    while num % prime == 0:
        num //= prime
    while den % prime == 0:
        den //= prime
    return LabelGroup(kind="localized", scale=Fraction(num, den), prime=prime)


def group_for_family(family: str) -> LabelGroup:
    """Canonical label group of each built-in family.

    periodic gives the degenerate two-generator group for its two-atom cell,
    fibonacci the golden two-generator group, Thue-Morse and period doubling
    (1/3)Z[1/2], Rudin-Shapiro Z[1/2].
    """
    if family == "periodic":
        return two_gen_group(Fraction(1, 2))
    if family == "fibonacci":
        # rho = 1/golden = (sqrt(5) - 1)/2
        return two_gen_group(QuadExt(Fraction(-1, 2), Fraction(1, 2), 5))
    if family in ("thue-morse", "period-doubling"):
        return localized_group(Fraction(1, 3), 2)
    if family == "rudin-shapiro":
        return localized_group(Fraction(1), 2)
    raise UnknownFamily(f"no label group for family {family!r}")


def nearest_element(x: float, group: LabelGroup, q_max: int = DEFAULT_Q_MAX,
                    n_max: int = DEFAULT_N_MAX) -> tuple[GroupElement, float]:
    """Closest group element under bounded coordinates, with its residual.

    Ties go to the smaller |q| (two-generator) or smaller N then |m|
    (localized); the exhaustive search is over |q| <= q_max or N <= n_max.
    """
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    if group.kind == "cyclic":
        m = round(x * group.q)
        value = m / group.q
        return GroupElement((m,), value), abs(x - value)
    if group.kind == "two_gen":
        best = None
        for q in sorted(range(-q_max, q_max + 1), key=abs):
            p = round(x - q * group.rho)
            value = p + q * group.rho
            residual = abs(x - value)
            if best is None or residual < best[1] - 1e-15:
                best = (GroupElement((p, q), value), residual)
        return best
    best = None
    for n in range(n_max + 1):
        step = float(group.scale) / group.prime**n
        m = round(x / step)
        value = m * step
        residual = abs(x - value)
        if best is None or residual < best[1] - 1e-15:
            best = (GroupElement((m, n), value), residual)
    return best


def contains(x: float, group: LabelGroup, tol: float = DEFAULT_TOL,
             q_max: int = DEFAULT_Q_MAX, n_max: int = DEFAULT_N_MAX) -> bool:
    """Bounded-coordinate membership test: nearest residual within tol."""
    _, residual = nearest_element(x, group, q_max=q_max, n_max=n_max)
    return residual <= tol
