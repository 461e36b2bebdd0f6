"""Isomonodromic Lax matrices for the hierarchy and their compatibility checks.

The first Lax matrix is degree 1 in the spectral parameter,

    L = [[i lam I, W], [W, -i lam I]],

the second is degree 2n, assembled lambda-order by lambda-order from four
coefficient families A (even orders, A_{2n} = I), G (even), E, F (odd), each
an exact polynomial in W-jets produced from the Lenard table.  Every identity
is checked per lambda order; the matrices are never expanded in a symbolic
lambda.  The compatibility condition

    dL/dlam - (d/dS)M + [L, M] = 0

holds identically in the jet letters except for one slot whose residual is the
hierarchy member itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .lenard import anticommutator, commutator, hierarchy_residual, lenard_miura
from .ncalg import (
    GR_I,
    GaussianRational,
    NcPoly,
    antiderive,
    evaluate,
)

_W = NcPoly.letter("W")
_S = NcPoly.letter("S")
_I_HALF = GaussianRational(0, Fraction(1, 2))  # i/2


@dataclass(frozen=True)
class LaxCoefficients:
    """Coefficient families keyed by lambda order (A, G even; E, F odd)."""

    n: int
    a: dict
    g: dict
    e: dict
    f: dict


@lru_cache(maxsize=None)
def lax_coefficients(n):
    """All A, G, E, F coefficients of the degree-2n matrix, exact."""
    if n < 1:
        raise ValueError("Lax coefficients are indexed from n = 1")
    a = {2 * n: NcPoly.identity(1)}
    g, e, f = {}, {}, {}
    for k in range(1, n + 1):
        prefactor = Fraction((-1) ** (k - 1), 4 ** (k - 1))
        minus_i_pref = GaussianRational(0, -1) * prefactor
        l_prev = lenard_miura(k - 1)
        l_here = lenard_miura(k)
        y = l_prev.derive() + anticommutator(_W, l_prev)
        f[2 * n - 2 * k + 1] = y.scale(minus_i_pref)
        e_inner = antiderive(commutator(_W, y))
        e[2 * n - 2 * k + 1] = e_inner.scale(minus_i_pref)
        x = y.derive() - commutator(_W, e_inner)
        g[2 * n - 2 * k] = x.scale(_I_HALF * prefactor)
        a[2 * n - 2 * k] = (l_here - x).scale(GaussianRational(Fraction(-1, 2)) * prefactor)
    return LaxCoefficients(n=n, a=a, g=g, e=e, f=f)


@dataclass(frozen=True)
class BlockTemplate:
    """Lambda-graded 2x2 block template with NcPoly entries over r x r blocks."""

    n: int
    degree: int
    blocks: dict  # lambda order -> ((p11, p12), (p21, p22))


@lru_cache(maxsize=None)
def build_L(n):
    """Degree-1 template [[i lam I, W], [W, -i lam I]]."""
    zero = NcPoly.zero()
    eye_i = NcPoly.identity(GR_I)
    blocks = {
        1: ((eye_i, zero), (zero, -eye_i)),
        0: ((zero, _W), (_W, zero)),
    }
    return BlockTemplate(n=n, degree=1, blocks=blocks)


@lru_cache(maxsize=None)
def build_M(n):
    """Degree-2n template assembled from the coefficient families.

    Even order l: diag blocks +-(i/2) A_l (plus +-iS at order 0), off-diag
    blocks -+ (1/2) G_l.  Odd order l: (i/2) E_l on the diagonal pair and
    (i/2) F_l on the symmetric off-diagonal pair.
    """
    coeffs = lax_coefficients(n)
    zero = NcPoly.zero()
    blocks = {}
    for order, a_l in coeffs.a.items():
        half_a = a_l.scale(_I_HALF)
        g_l = coeffs.g.get(order)
        off = g_l.scale(Fraction(1, 2)) if g_l is not None else zero
        p11, p22 = half_a, -half_a
        if order == 0:
            i_s = _S.scale(GR_I)
            p11 = p11 + i_s
            p22 = p22 - i_s
        blocks[order] = ((p11, -off), (off, p22))
    for order, e_l in coeffs.e.items():
        half_e = e_l.scale(_I_HALF)
        half_f = coeffs.f[order].scale(_I_HALF)
        blocks[order] = ((half_e, half_f), (half_f, half_e))
    return BlockTemplate(n=n, degree=2 * n, blocks=blocks)


def template_parity_ok(template):
    """Check -sigma1_hat M(lam) sigma1_hat = M(-lam) at the template level."""
    for order, ((p11, p12), (p21, p22)) in template.blocks.items():
        if order % 2 == 0:
            if p22 != -p11 or p21 != -p12:
                return False
        else:
            if p22 != p11 or p21 != p12:
                return False
    return True


@dataclass(frozen=True)
class CompatibilityReport:
    """Named residuals of the per-order coefficient system; all must vanish."""

    n: int
    residuals: tuple  # of (label, NcPoly)

    def all_zero(self):
        return all(poly.is_zero() for _, poly in self.residuals)

    def failing(self):
        return [label for label, poly in self.residuals if not poly.is_zero()]


def compatibility_residual_symbolic(n):
    """Residuals of every coefficient equation, with the hierarchy cross-check.

    The final equation is normalized by (-4)^n so its residual carries the
    leading word W_{2nS} with coefficient one, then compared against
    hierarchy_residual(n); the difference must be the zero polynomial.
    """
    c = lax_coefficients(n)
    res = [("dA[2n]", c.a[2 * n].derive())]
    for k in range(1, n + 1):
        odd = 2 * n - 2 * k + 1
        even = 2 * n - 2 * k
        res.append((f"dE[{odd}]", c.e[odd].derive() - commutator(_W, c.f[odd])))
        res.append(
            (f"dA[{even}]", c.a[even].derive() + anticommutator(_W, c.g[even]).scale(GR_I))
        )
        res.append(
            (
                f"G[{even}]",
                c.g[even]
                - (-c.f[odd].derive() + commutator(_W, c.e[odd])).scale(Fraction(1, 2)),
            )
        )
    res.append(
        ("F[2n-1]", c.f[2 * n - 1] + anticommutator(_W, c.a[2 * n]).scale(_I_HALF))
    )
    for k in range(1, n):
        even = 2 * n - 2 * k
        res.append(
            (
                f"F[{even - 1}]",
                c.f[even - 1]
                - (
                    c.g[even].derive() - anticommutator(_W, c.a[even]).scale(GR_I)
                ).scale(Fraction(1, 2)),
            )
        )
    final_raw = (
        c.g[0].derive().scale(_I_HALF)
        + anticommutator(_S, _W)
        + anticommutator(_W, c.a[0]).scale(Fraction(1, 2))
    )
    final_norm = final_raw.scale(Fraction((-4) ** n))
    res.append(("final-vs-hierarchy", final_norm - hierarchy_residual(n).residual))
    return CompatibilityReport(n=n, residuals=tuple(res))


# ---------------------------------------------------------------------------
# numeric zero curvature
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _derived_blocks(n):
    template = build_M(n)
    return {
        order: tuple(tuple(p.derive() for p in row) for row in rows)
        for order, rows in template.blocks.items()
    }


def _assemble(blocks, jet, lam):
    r = jet.r
    out = np.zeros((2 * r, 2 * r), dtype=complex)
    for order, rows in blocks.items():
        lam_pow = lam**order
        for bi in range(2):
            for bj in range(2):
                poly = rows[bi][bj]
                if poly.is_zero():
                    continue
                out[bi * r : (bi + 1) * r, bj * r : (bj + 1) * r] += lam_pow * evaluate(
                    poly, jet
                )
    return out


@dataclass(frozen=True)
class ZeroCurvatureResult:
    """Max-abs entry of dL/dlam - (d/dS)M + [L, M] at one (jet, lambda)."""

    n: int
    lam: complex
    max_abs: float
    max_abs_normalized: float  # 4^n * max_abs: unit leading-coefficient scale
    scale: float  # size of the assembled terms, denominator for relative checks

    @property
    def relative(self):
        return self.max_abs / self.scale


def zero_curvature_numeric(n, jet, lam):
    """Evaluate the compatibility residual numerically.

    The jet must assign W ... W_{2nS} and S; consistency of W_{2nS} with the
    hierarchy is what the residual detects.  d/dS of M is taken by symbolic
    derivation of the coefficient polynomials, then evaluation; the lambda
    derivative of L is analytic.
    """
    l_num = _assemble(build_L(n).blocks, jet, lam)
    m_num = _assemble(build_M(n).blocks, jet, lam)
    dm_ds = _assemble(_derived_blocks(n), jet, lam)
    r = jet.r
    dl_dlam = np.zeros((2 * r, 2 * r), dtype=complex)
    dl_dlam[:r, :r] = 1j * np.eye(r)
    dl_dlam[r:, r:] = -1j * np.eye(r)
    bracket = l_num @ m_num - m_num @ l_num
    residual = dl_dlam - dm_ds + bracket
    max_abs = float(np.max(np.abs(residual)))
    scale = max(1.0, float(np.max(np.abs(bracket))), float(np.max(np.abs(dm_ds))))
    return ZeroCurvatureResult(
        n=n,
        lam=lam,
        max_abs=max_abs,
        max_abs_normalized=4**n * max_abs,
        scale=scale,
    )
