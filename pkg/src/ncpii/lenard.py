"""Matrix Lenard polynomials, hierarchy members, and the factorization check.

The Lenard recursion lives in the U-jet algebra:

    L_0 = 1/2 I,
    d/dS L_n = (d^3/dS^3 + [U,.]_+ d/dS + d/dS [U,.]_+ + [U,.] (d/dS)^-1 [U,.]) L_{n-1},

with the formal antiderivative normalized to drop constants.  The n-th
hierarchy member is stated for W through the Miura substitution
U = W_S - W^2:

    (d/dS + [W,.]_+) L_n[U] = (-1)^(n+1) 4^n [S, W]_+        (homogeneous case)

and is represented here as a residual polynomial, zero iff the equation holds,
normalized so the leading word W_{2nS} carries coefficient 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ncalg import (
    GR_ONE,
    Letter,
    NcPoly,
    NotATotalDerivative,
    antiderive,
    is_homogeneous,
)

#: Highest supported Lenard index.  Word bases stay small through weight 12;
#: the cap is configuration, not a proven growth estimate.
SUPPORTED_MAX_N = 5

_U = NcPoly.letter("U")
_W = NcPoly.letter("W")
_S = NcPoly.letter("S")

#: Miura image of U in the W-jet algebra.
MIURA = NcPoly.letter("W", 1) - _W * _W


def commutator(a, p):
    return a * p - p * a


def anticommutator(a, p):
    return a * p + p * a


_table = [NcPoly.identity(Fraction(1, 2))]


def lenard(n):
    """n-th matrix Lenard polynomial L_n[U] (memoized, exact)."""
    if n < 0:
        raise ValueError("Lenard index must be nonnegative")
    if n > SUPPORTED_MAX_N:
        raise ValueError(
            f"Lenard index {n} above the supported envelope {SUPPORTED_MAX_N}"
        )
    while len(_table) <= n:
        prev = _table[-1]
        d_prev = prev.derive()
        inner = antiderive(commutator(_U, prev))
        rhs = (
            d_prev.derive().derive()
            + anticommutator(_U, d_prev)
            + anticommutator(_U, prev).derive()
            + commutator(_U, inner)
        )
        entry = antiderive(rhs)
        if len(_table) >= 1 and is_homogeneous(entry) != 2 * len(_table):
            raise NotATotalDerivative(
                f"L_{len(_table)} failed the homogeneity invariant"
            )
        _table.append(entry)
    return _table[n]


def lenard_miura(n):
    """L_n[U] with U replaced by its Miura image W_S - W^2."""
    return lenard(n).substitute("U", MIURA)


@dataclass(frozen=True)
class HierarchyResidual:
    """Residual polynomial of the n-th hierarchy member (zero iff satisfied)."""

    n: int
    residual: NcPoly


def hierarchy_residual(n):
    """Residual of the n-th member: lhs minus the (-1)^(n+1) 4^n [S,W]_+ term."""
    if n < 1:
        raise ValueError("hierarchy members are indexed from 1")
    ln_w = lenard_miura(n)
    lhs = ln_w.derive() + anticommutator(_W, ln_w)
    rhs = anticommutator(_S, _W).scale((-1) ** (n + 1) * 4**n)
    residual = lhs - rhs
    leading = residual.coeff((Letter("W", 2 * n),))
    if leading != GR_ONE:
        raise AssertionError(f"leading W_{{{2*n}S}} coefficient is {leading}, not 1")
    return HierarchyResidual(n=n, residual=residual)


def factorization_residual(n):
    """Difference of the two sides of the Lenard/Miura factorization; must be 0.

    Left side: derive(L_{n+1}[U]) under Miura.  Right side applies
    (d/dS - [W,.]_+)(d/dS - [W,.](d/dS)^-1[W,.])(d/dS + [W,.]_+) to
    L_n[U] under Miura.
    """
    if n < 0:
        raise ValueError("index must be nonnegative")
    lhs = lenard(n + 1).derive().substitute("U", MIURA)
    y = lenard_miura(n)
    y1 = y.derive() + anticommutator(_W, y)
    y2 = y1.derive() - commutator(_W, antiderive(commutator(_W, y1)))
    y3 = y2.derive() - anticommutator(_W, y2)
    return lhs - y3
