"""Lenard table goldens, hierarchy members, factorization identity."""

from fractions import Fraction

import numpy as np
import pytest

from ncpii.lenard import (
    MIURA,
    anticommutator,
    commutator,
    factorization_residual,
    hierarchy_residual,
    lenard,
    lenard_miura,
)
from ncpii.ncalg import JetPoint, Letter, NcPoly, antiderive, evaluate, is_homogeneous

U = NcPoly.letter("U")
W = NcPoly.letter("W")
S = NcPoly.letter("S")


def w_jet(k):
    return NcPoly.letter("W", k)


def u_jet(k):
    return NcPoly.letter("U", k)


def acomm(a, b):
    return a * b + b * a


def comm(a, b):
    return a * b - b * a


def test_lenard_goldens():
    assert lenard(0) == NcPoly.identity(Fraction(1, 2))
    assert lenard(1) == U
    assert lenard(2) == u_jet(2) + (U * U).scale(3)
    assert lenard(3) == (
        u_jet(4) + acomm(U, u_jet(2)).scale(5) + (u_jet(1) * u_jet(1)).scale(5) + (U * U * U).scale(10)
    )


def test_lenard_homogeneity():
    for n in range(1, 5):
        assert is_homogeneous(lenard(n)) == 2 * n


def test_lenard_satisfies_recursion():
    for n in range(1, 5):
        prev = lenard(n - 1)
        d_prev = prev.derive()
        rhs = (
            d_prev.derive().derive()
            + acomm(U, d_prev)
            + acomm(U, prev).derive()
            + comm(U, antiderive(comm(U, prev)))
        )
        assert lenard(n).derive() == rhs


def test_lenard_index_guards():
    with pytest.raises(ValueError):
        lenard(-1)
    with pytest.raises(ValueError):
        lenard(6)


def member_one():
    # W_2S = 2 W^3 + 4 [S, W]_+
    return w_jet(2) - (W * W * W).scale(2) - acomm(S, W).scale(4)


def member_two():
    # W_4S = 4 [W^2, W_2S]_+ + 2 W W_2S W + 2 [W_S^2, W]_+ + 6 W_S W W_S
    #        - 6 W^5 - 4^2 [S, W]_+
    w1, w2 = w_jet(1), w_jet(2)
    rhs = (
        acomm(W * W, w2).scale(4)
        + (W * w2 * W).scale(2)
        + acomm(w1 * w1, W).scale(2)
        + (w1 * W * w1).scale(6)
        - (W * W * W * W * W).scale(6)
        - acomm(S, W).scale(16)
    )
    return w_jet(4) - rhs


def member_three():
    # W_6S = 20 W^7 - 15 [W_2S, W^4]_+ - 20 W^2 W_2S W^2 - 10 [W W_2S W, W^2]_+
    #        - 10 [W_S^2, W^3]_+ - 15 [W W_S^2 W, W]_+ - 20 W_S W^3 W_S
    #        - 25 [W_S W W_S, W^2]_+ - 5 [W_S W^2 W_S, W]_+ - 10 W W_S W W_S W
    #        + 6 [W_4S, W^2]_+ + 2 W W_4S W + 4 (W_S W_3S W + W W_3S W_S)
    #        + 9 (W W_S W_3S + W_3S W_S W) + 15 (W_S W W_3S + W_3S W W_S)
    #        + 25 [W_2S, W_S^2]_+ + 20 W_S W_2S W_S + 11 [W_2S^2, W]_+
    #        + 20 W_2S W W_2S + 4^3 [S, W]_+
    w1, w2, w3, w4 = w_jet(1), w_jet(2), w_jet(3), w_jet(4)
    w_2 = W * W
    w_3 = w_2 * W
    w_4 = w_3 * W
    rhs = (
        (w_4 * w_3).scale(20)
        - acomm(w2, w_4).scale(15)
        - (w_2 * w2 * w_2).scale(20)
        - acomm(W * w2 * W, w_2).scale(10)
        - acomm(w1 * w1, w_3).scale(10)
        - acomm(W * w1 * w1 * W, W).scale(15)
        - (w1 * w_3 * w1).scale(20)
        - acomm(w1 * W * w1, w_2).scale(25)
        - acomm(w1 * w_2 * w1, W).scale(5)
        - (W * w1 * W * w1 * W).scale(10)
        + acomm(w4, w_2).scale(6)
        + (W * w4 * W).scale(2)
        + (w1 * w3 * W + W * w3 * w1).scale(4)
        + (W * w1 * w3 + w3 * w1 * W).scale(9)
        + (w1 * W * w3 + w3 * W * w1).scale(15)
        + acomm(w2, w1 * w1).scale(25)
        + (w1 * w2 * w1).scale(20)
        + acomm(w2 * w2, W).scale(11)
        + (w2 * W * w2).scale(20)
        + acomm(S, W).scale(64)
    )
    return w_jet(6) - rhs


def test_hierarchy_member_goldens():
    assert hierarchy_residual(1).residual == member_one()
    assert hierarchy_residual(2).residual == member_two()
    assert hierarchy_residual(3).residual == member_three()


def test_hierarchy_leading_coefficient_is_one():
    for n in (1, 2, 3):
        res = hierarchy_residual(n).residual
        assert res.coeff((Letter("W", 2 * n),)) == ncpoly_one()


def ncpoly_one():
    from ncpii.ncalg import GR_ONE

    return GR_ONE


def test_scalar_reduction_n1():
    # r = 1: residual value equals w'' - 2 w^3 - 8 s w
    rng = np.random.default_rng(5)
    res = hierarchy_residual(1).residual
    for _ in range(10):
        w, w1, w2, s = rng.standard_normal(4)
        assignment = {
            Letter("W"): np.array([[w]], dtype=complex),
            Letter("W", 1): np.array([[w1]], dtype=complex),
            Letter("W", 2): np.array([[w2]], dtype=complex),
            Letter("S"): np.array([[s]], dtype=complex),
        }
        val = evaluate(res, JetPoint(r=1, assignment=assignment))[0, 0]
        assert abs(val - (w2 - 2 * w**3 - 8 * s * w)) < 1e-12


def test_factorization_identity():
    for n in range(3):
        assert factorization_residual(n).is_zero()


def test_miura_image():
    assert lenard_miura(1) == MIURA
    assert is_homogeneous(lenard_miura(3)) == 6
