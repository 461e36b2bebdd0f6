"""Exact algebra layer: ring axioms, derivation, antiderivative, evaluation."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncpii import ncalg
from ncpii.ncalg import (
    GaussianRational,
    JetPoint,
    Letter,
    NcPoly,
    NotATotalDerivative,
    SContamination,
    UnassignedLetter,
    antiderive,
    evaluate,
    from_json,
    is_homogeneous,
    substitute,
    to_json,
    to_json_obj,
    to_text,
)

U = NcPoly.letter("U")
US = NcPoly.letter("U", 1)
W = NcPoly.letter("W")
S = NcPoly.letter("S")
MIURA = NcPoly.letter("W", 1) - W * W


# -- scalars -----------------------------------------------------------------


def test_gaussian_rational_field_ops():
    a = GaussianRational(Fraction(1, 2), 3)
    b = GaussianRational(2, Fraction(-1, 4))
    assert a + b == GaussianRational(Fraction(5, 2), Fraction(11, 4))
    assert a * b - b * a == GaussianRational(0)
    assert (a / b) * b == a
    assert -a + a == GaussianRational(0)
    assert str(GaussianRational(0, -1)) == "-i"
    assert str(GaussianRational(Fraction(1, 2))) == "1/2"


# -- mul ----------------------------------------------------------------------


def test_mul_free_product():
    assert (U * US).coeff((Letter("U"), Letter("U", 1))) == ncalg.GR_ONE


def test_mul_distributes():
    left = (U + US) * U
    assert left == NcPoly.word((Letter("U"), Letter("U"))) + NcPoly.word(
        (Letter("U", 1), Letter("U"))
    )


def test_mul_by_half_identity():
    half = NcPoly.identity(Fraction(1, 2))
    assert half * U == U.scale(Fraction(1, 2))


# -- derive --------------------------------------------------------------------


def test_derive_constant_is_zero():
    assert NcPoly.identity(7).derive().is_zero()


def test_derive_leibniz_on_square():
    assert (U * U).derive() == US * U + U * US


def test_derive_s_rule():
    # d(S W) = W + S W_S
    p = S * W
    assert p.derive() == W + S * NcPoly.letter("W", 1)


# -- antiderive ------------------------------------------------------------------


def test_antiderive_square():
    assert antiderive(US * U + U * US) == U * U


def test_antiderive_not_total_derivative():
    # weight-4 U-basis is {U U, U_2S}; U_S U alone is outside the image
    with pytest.raises(NotATotalDerivative):
        antiderive(US * U)


def test_antiderive_rejects_s():
    with pytest.raises(SContamination):
        antiderive(S * W)


def test_antiderive_rejects_constant():
    with pytest.raises(NotATotalDerivative):
        antiderive(NcPoly.identity(1))


def test_antiderive_lenard_two_roundtrip():
    l2 = NcPoly.letter("U", 2) + (U * U).scale(3)
    assert antiderive(l2.derive()) == l2


# -- substitute -------------------------------------------------------------------


def test_substitute_miura_on_u():
    assert substitute(U, "U", MIURA) == MIURA


def test_substitute_zero():
    assert substitute(NcPoly.zero(), "U", MIURA).is_zero()


def test_substitute_derivative_letter():
    expect = NcPoly.letter("W", 2) - NcPoly.letter("W", 1) * W - W * NcPoly.letter("W", 1)
    assert substitute(US, "U", MIURA) == expect


def test_substitute_rejects_self_reference():
    with pytest.raises(ValueError):
        substitute(U, "U", U + W)


# -- evaluate ---------------------------------------------------------------------


def test_evaluate_identity_word():
    jet = JetPoint(r=3, assignment={})
    assert np.allclose(evaluate(NcPoly.identity(1), jet), np.eye(3))


def test_evaluate_nilpotent_square():
    w = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    jet = JetPoint(r=2, assignment={Letter("W"): w})
    assert np.allclose(evaluate(W * W, jet), np.zeros((2, 2)))


def test_evaluate_unassigned_letter():
    jet = JetPoint(r=2, assignment={})
    with pytest.raises(UnassignedLetter):
        evaluate(W, jet)


# -- homogeneity --------------------------------------------------------------------


def test_weights():
    assert is_homogeneous(U) == 2
    assert is_homogeneous(NcPoly.letter("W", 3)) == 4
    assert is_homogeneous(U + U * U) is None
    with pytest.raises(SContamination):
        is_homogeneous(S * W)


def test_l3_weight_six():
    l3 = (
        NcPoly.letter("U", 4)
        + (U * NcPoly.letter("U", 2) + NcPoly.letter("U", 2) * U).scale(5)
        + (US * US).scale(5)
        + (U * U * U).scale(10)
    )
    assert is_homogeneous(l3) == 6


# -- serialization ---------------------------------------------------------------------


def test_canonical_json_shape():
    p = NcPoly.word((Letter("U", 2), Letter("W"), Letter("S")), Fraction(1, 2))
    obj = to_json_obj(p)
    assert obj == [{"coeff": ["1/2", "0/1"], "word": ["U_2S", "W", "S"]}]


def test_text_golden():
    p = NcPoly.letter("U", 2) + (U * U).scale(3)
    assert to_text(p) == "U_2S + 3 U U"


def test_identity_word_serializes_empty():
    assert to_json_obj(NcPoly.identity(1))[0]["word"] == []


# -- hypothesis strategies ---------------------------------------------------------------


letters = st.builds(
    Letter,
    kind=st.sampled_from(["U", "W"]),
    order=st.integers(min_value=0, max_value=2),
)
letters_with_s = st.one_of(letters, st.just(Letter("S")))
words = st.lists(letters_with_s, min_size=0, max_size=3).map(tuple)
coeffs = st.builds(
    GaussianRational,
    re=st.fractions(min_value=-3, max_value=3, max_denominator=4),
    im=st.fractions(min_value=-3, max_value=3, max_denominator=4),
)
polys = st.dictionaries(words, coeffs, min_size=0, max_size=3).map(NcPoly)

sfree_letters = letters
sfree_words = st.lists(sfree_letters, min_size=1, max_size=3).map(tuple)
sfree_polys = st.dictionaries(sfree_words, coeffs, min_size=0, max_size=3).map(NcPoly)


@settings(max_examples=120, deadline=None)
@given(polys, polys)
def test_leibniz_exact(p, q):
    assert (p * q).derive() == p.derive() * q + p * q.derive()


@settings(max_examples=80, deadline=None)
@given(polys, polys, polys)
def test_mul_associative_distributive(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@settings(max_examples=80, deadline=None)
@given(sfree_polys)
def test_antiderive_roundtrip(p):
    assert antiderive(p.derive()) == p


@settings(max_examples=80, deadline=None)
@given(polys)
def test_json_roundtrip(p):
    assert from_json(to_json(p)) == p


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_evaluate_is_ring_homomorphism(p, q):
    rng = np.random.default_rng(7)
    r = 2
    assignment = {
        Letter(kind, order): rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
        for kind in ("U", "W")
        for order in range(0, 4)
    }
    assignment[Letter("S")] = np.diag([0.3, -0.2]) + 0.7 * np.eye(r)
    jet = JetPoint(r=r, assignment=assignment)
    lhs = evaluate(p * q, jet)
    rhs = evaluate(p, jet) @ evaluate(q, jet)
    assert np.allclose(lhs, rhs, atol=1e-9)
    assert np.allclose(evaluate(p + q, jet), evaluate(p, jet) + evaluate(q, jet), atol=1e-9)


# -- jet consistency against finite differences ----------------------------------------------


def _path_jet(t, sigma, coeff_mats, max_order=8):
    """Jet of the cubic matrix path W(t) = c0 + c1 t + c2 t^2 + c3 t^3."""
    c0, c1, c2, c3 = coeff_mats
    derivs = [
        c0 + c1 * t + c2 * t * t + c3 * t**3,
        c1 + 2 * c2 * t + 3 * c3 * t * t,
        2 * c2 + 6 * c3 * t,
        6 * c3,
    ]
    r = c0.shape[0]
    assignment = {
        Letter("W", m): (derivs[m] if m < 4 else np.zeros((r, r))) for m in range(max_order)
    }
    assignment[Letter("S")] = np.diag(sigma) + t * np.eye(r)
    return JetPoint(r=r, assignment=assignment)


def test_jet_derivative_matches_central_difference():
    rng = np.random.default_rng(11)
    coeff_mats = [rng.standard_normal((2, 2)) * 0.4 for _ in range(4)]
    sigma = np.array([0.1, -0.3])
    l2_miura = substitute(NcPoly.letter("U", 2) + (U * U).scale(3), "U", MIURA)
    test_polys = [l2_miura, S * W + W * S, (W * NcPoly.letter("W", 1)).derive()]
    t0, eps = 0.37, 1e-5
    for p in test_polys:
        dp = evaluate(p.derive(), _path_jet(t0, sigma, coeff_mats))
        fd = (
            evaluate(p, _path_jet(t0 + eps, sigma, coeff_mats))
            - evaluate(p, _path_jet(t0 - eps, sigma, coeff_mats))
        ) / (2 * eps)
        assert np.max(np.abs(dp - fd)) < 1e-6
