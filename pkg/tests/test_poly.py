import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from quadradyn.poly import (
    Poly2,
    PowerSeries1,
    VectorField2,
    compose_series,
    field_from_json,
    leading_term,
    poly_eval,
    series_solve_implicit,
)

coef = st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 3))
exps = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(exps, coef, max_size=6).map(Poly2)
points = st.tuples(st.floats(-2, 2), st.floats(-2, 2))

X, Y = sp.symbols("x y")


def to_sympy(p: Poly2):
    return sum(sp.Float(c) * X**i * Y**j for (i, j), c in p.terms.items())


def test_evaluation_examples():
    c, b = 1.0, 3.0
    assert poly_eval(Poly2({(2, 0): -c}), 2, 5) == -4.0
    assert poly_eval(Poly2(), 7.5, -1.0) == 0.0
    assert poly_eval(Poly2({(1, 1): 2 * b}), 1, 2) == 12.0


@given(polys, polys, points)
def test_addition_and_multiplication_match_pointwise(p, q, pt):
    x, y = pt
    assert (p + q)(x, y) == pytest.approx(p(x, y) + q(x, y), abs=1e-9)
    assert (p * q)(x, y) == pytest.approx(p(x, y) * q(x, y), rel=1e-9, abs=1e-8)


@given(polys, polys, polys)
@settings(max_examples=50)
def test_ring_laws(p, q, r):
    assert (p + q).allclose(q + p)
    assert (p * q).allclose(q * p, atol=1e-9)
    assert ((p + q) * r).allclose(p * r + q * r, atol=1e-9)
    assert (p - p).is_zero


@given(polys)
@settings(max_examples=50)
def test_derivatives_match_sympy(p):
    expr = to_sympy(p)
    for var, sym in (("x", X), ("y", Y)):
        got = to_sympy(p.diff(var))
        assert sp.simplify(sp.expand(got - sp.diff(expr, sym))) == 0


@given(polys)
def test_json_round_trip(p):
    assert Poly2.from_json(p.to_json()) == p


def test_jacobian_examples():
    c, b, d = 1.5, 2.0, 3.0
    family_i = VectorField2(Poly2.y(), Poly2({(2, 0): -c}))
    assert np.allclose(family_i.jacobian_at(0.7, 0.1), [[0, 1], [-2 * c * 0.7, 0]])
    family_v = VectorField2(Poly2.y(), Poly2({(0, 1): d / 2, (1, 0): -1.5 * b, (2, 0): -c}))
    x0 = -0.4
    assert np.allclose(family_v.jacobian_at(x0, 9.0), [[0, 1], [-1.5 * b - 2 * c * x0, d / 2]])
    const = VectorField2(Poly2.const(1.0), Poly2.const(1.0))
    assert np.array_equal(const.jacobian_at(3.0, 4.0), np.zeros((2, 2)))


def test_zero_field_rejected():
    with pytest.raises(ValueError):
        VectorField2(Poly2(), Poly2())


def test_field_json_round_trip():
    v = VectorField2(Poly2({(0, 1): 1.0}), Poly2({(2, 0): -2.0, (1, 1): 0.5}))
    import json

    assert field_from_json(json.dumps(v.to_json_obj())) == v


def test_implicit_solution_examples():
    c, b = 2.0, 1.5
    f = series_solve_implicit(Poly2({(3, 0): c}))
    assert f[3] == -c and all(f[k] == 0 for k in range(13) if k != 3)
    # f + A(u, f) must vanish identically: for A = -2b u^2 the root is +2b u^2
    f = series_solve_implicit(Poly2({(2, 0): -2 * b}))
    assert f[2] == 2 * b
    assert series_solve_implicit(Poly2()).is_zero()


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda e: sum(e) >= 2),
                       st.floats(-1, 1).map(lambda v: round(v, 2)), max_size=4))
@settings(max_examples=60)
def test_implicit_solution_satisfies_equation(terms):
    a = Poly2(terms)
    f = series_solve_implicit(a, order=10)
    residual = f + compose_series(a, f)
    assert residual.is_zero(tol=1e-9)


def test_composition_examples():
    c, b = 1.0, 2.0
    assert compose_series(Poly2({(2, 0): -c}), PowerSeries1.zero()).coefficients[2] == -c
    f = PowerSeries1((0, 0, 0, -c))
    F = compose_series(Poly2({(2, 1): c}), f)
    assert F[5] == -c * c and sum(abs(v) for v in F.coefficients) == c * c
    F = compose_series(Poly2({(1, 1): -2 * b}), PowerSeries1((0, 0, 2 * b)))
    assert F[3] == -4 * b * b


def test_composition_requires_zero_constant():
    with pytest.raises(ValueError):
        compose_series(Poly2.x(), PowerSeries1((1.0,)))


def test_leading_term_examples():
    assert leading_term(PowerSeries1((0, 0, 0, 0, 0, -1.0))) == (-1.0, 5)
    assert leading_term(PowerSeries1.zero()) is None
    assert leading_term(PowerSeries1((0, 0, 8.0))) == (8.0, 2)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8), st.floats(-0.5, 0.5))
def test_series_product_matches_values(a, x):
    s = PowerSeries1(tuple(a), 16)
    assert (s * s)(x) == pytest.approx(s(x) ** 2, rel=1e-9, abs=1e-9)
    assert math.isfinite(s(x))
