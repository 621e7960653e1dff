"""Jet arithmetic against sympy series expansions."""

import math

import numpy as np
import pytest
import sympy as sp

from adiavac.errors import DivisionByZeroJet, JetMismatch, NegativeSqrtJet
from adiavac.jets import Jet

from oracles import T


def jet_of(expr: sp.Expr, t0: float, order: int) -> Jet:
    """Taylor coefficients of expr at t0 via sympy, as a Jet."""
    coeffs = []
    f = expr
    for j in range(order + 1):
        coeffs.append(float(f.subs(T, t0).evalf(40)) / math.factorial(j))
        f = sp.diff(f, T)
    return Jet(t0, tuple(coeffs))


def assert_jets_close(got: Jet, want: Jet, rtol=1e-13):
    assert got.base_point == want.base_point
    assert got.order == want.order
    scale = max(1.0, max(abs(c) for c in want.coeffs))
    np.testing.assert_allclose(got.coeffs, want.coeffs, rtol=rtol, atol=rtol * scale)


# a pool of smooth positive expressions with O(1) coefficients at t0 = 0.3
EXPRS = [
    2 + sp.sin(T),
    sp.exp(T / 2),
    3 + T**2 - T**3 / 4,
    1 / (2 + sp.cos(T)),
]


@pytest.mark.parametrize("i", range(len(EXPRS)))
@pytest.mark.parametrize("j", range(len(EXPRS)))
def test_arithmetic_matches_sympy(i, j):
    t0, order = 0.3, 7
    f, g = EXPRS[i], EXPRS[j]
    jf, jg = jet_of(f, t0, order), jet_of(g, t0, order)
    assert_jets_close(jf + jg, jet_of(f + g, t0, order))
    assert_jets_close(jf - jg, jet_of(f - g, t0, order))
    assert_jets_close(jf * jg, jet_of(f * g, t0, order))
    assert_jets_close(jf / jg, jet_of(f / g, t0, order))


@pytest.mark.parametrize("expr", EXPRS)
def test_sqrt_matches_sympy(expr):
    t0, order = 0.3, 7
    assert_jets_close(jet_of(expr, t0, order).sqrt(), jet_of(sp.sqrt(expr), t0, order))


def test_differentiate_is_exact_shift():
    t0, order = -0.7, 6
    expr = sp.exp(T) * (1 + T**2)
    got = jet_of(expr, t0, order).differentiate()
    assert_jets_close(got, jet_of(sp.diff(expr, T), t0, order - 1))


def test_scalar_mixed_ops():
    j = jet_of(2 + sp.sin(T), 0.0, 4)
    assert_jets_close(2.0 * j, j.scale(2.0))
    assert_jets_close(1.0 / j, jet_of(1 / (2 + sp.sin(T)), 0.0, 4))
    assert (j + 1.5).value == j.value + 1.5
    assert (3.0 - j).value == 3.0 - j.value
    assert (j - 1.0).coeffs[1:] == j.coeffs[1:]


def test_value_first_derivative_accessors():
    j = Jet(1.0, (2.0, 3.0, 4.0))
    assert j.value == 2.0
    assert j.first == 3.0
    assert j.derivative(2) == 4.0 * 2  # c_2 * 2!
    assert j.order == 2
    with pytest.raises(JetMismatch):
        j.derivative(3)
    with pytest.raises(JetMismatch):
        Jet(0.0, (1.0,)).first


def test_horner_evaluation():
    j = Jet(2.0, (1.0, -2.0, 0.5))
    t = 2.7
    dt = t - 2.0
    assert j(t) == pytest.approx(1.0 - 2.0 * dt + 0.5 * dt * dt, rel=1e-15)


def test_constant_truncate():
    c = Jet.constant(5.0, 1.0, 3)
    assert c.coeffs == (5.0, 0.0, 0.0, 0.0)
    tr = Jet(0.0, (1.0, 2.0, 3.0)).truncate(1)
    assert tr.coeffs == (1.0, 2.0)
    with pytest.raises(JetMismatch):
        tr.truncate(5)


def test_mismatch_and_domain_errors():
    a = Jet(0.0, (1.0, 1.0))
    b = Jet(1.0, (1.0, 1.0))
    with pytest.raises(JetMismatch):
        a + b
    with pytest.raises(JetMismatch):
        a * Jet(0.0, (1.0, 1.0, 1.0))
    with pytest.raises(DivisionByZeroJet):
        a / Jet(0.0, (0.0, 1.0))
    with pytest.raises(NegativeSqrtJet):
        Jet(0.0, (-1.0, 0.0)).sqrt()
    with pytest.raises(NegativeSqrtJet):
        Jet(0.0, (0.0, 1.0)).sqrt()
    with pytest.raises(JetMismatch):
        Jet(0.0, (1.0,)).differentiate()
    with pytest.raises(ValueError):
        Jet(0.0, ())


def test_random_polynomial_roundtrip():
    # product followed by division recovers the numerator exactly enough
    rng = np.random.default_rng(813)
    for _ in range(25):
        order = int(rng.integers(1, 9))
        a = Jet(0.5, tuple(rng.standard_normal(order + 1)))
        b = Jet(0.5, tuple(rng.standard_normal(order + 1)))
        if abs(b.value) < 0.1:
            b = b + 1.0
        assert_jets_close((a * b) / b, a, rtol=1e-11)
