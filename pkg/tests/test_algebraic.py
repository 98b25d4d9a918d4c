import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadradyn.algebraic import (
    BranchNotCovered,
    PoleProximityError,
    WeierstrassInvariants,
    first_integral,
    integral_curve,
    lie_derivative,
    variational_equation,
    wp_eval,
)
from quadradyn.dynamics import integrate
from quadradyn.families import FamilySpec, SpecError, build_family
from quadradyn.kernels import rk4_poly
from quadradyn.poly import Poly2


def wp_reference(t: float, g2: float, g3: float) -> float:
    """Weierstrass function from Jacobi elliptic functions at 30 digits."""
    with mp.workdps(30):
        roots = sorted((r.real for r in mp.polyroots([4, 0, -g2, -g3]) if abs(mp.im(r)) < 1e-20), reverse=True)
        t = mp.mpf(t)
        if len(roots) == 3:
            e1, e2, e3 = roots
            sn = mp.ellipfun("sn", mp.sqrt(e1 - e3) * t, m=(e2 - e3) / (e1 - e3))
            return float(e3 + (e1 - e3) / sn**2)
        e2 = roots[0]
        h2 = mp.sqrt(3 * e2**2 - mp.mpf(g2) / 4)
        cn = mp.ellipfun("cn", 2 * mp.sqrt(h2) * t, m=mp.mpf(1) / 2 - 3 * e2 / (4 * h2))
        return float(e2 + h2 * (1 + cn) / (1 - cn))


def test_first_integral_examples():
    fi = first_integral(FamilySpec("I", c=3.0))
    assert fi.expression == Poly2({(0, 2): 0.5, (3, 0): 1.0})
    assert lie_derivative(fi.expression, build_family(FamilySpec("I", c=3.0))).is_zero
    fi = first_integral(FamilySpec("II", b=2.0))
    assert fi.expression == Poly2({(0, 1): 1.0, (2, 0): -2.0})


def test_dissipative_families_rejected():
    with pytest.raises(SpecError, match="dissipative"):
        first_integral(FamilySpec("V", b=1.0, c=1.0, s=0))
    fi = first_integral(FamilySpec("V", b=1.0, c=1.0, s=-4, algebraic=True))
    assert fi.kind == "Hamiltonian"


def test_degenerate_lattice():
    wp, dwp = wp_eval(0.5, WeierstrassInvariants(0.0, 0.0))
    assert (wp, dwp) == pytest.approx((4.0, -16.0), rel=1e-15)


def test_pole_guard():
    with pytest.raises(PoleProximityError):
        wp_eval(0.0, WeierstrassInvariants(0.0, 1.0))


@pytest.mark.parametrize("g2, g3", [(0.0, 1.0), (4.0, 1.0), (3.0, -0.9), (-2.0, 0.5), (12.0, 8.5), (1.0, 0.0)])
@pytest.mark.parametrize("t", [0.3, 0.7, 1.3, 2.9, -1.7, 5.1])
def test_wp_against_jacobi_reference(g2, g3, t):
    inv = WeierstrassInvariants(g2, g3)
    try:
        wp, dwp = wp_eval(t, inv)
    except PoleProximityError:
        pytest.skip("sample lands on a lattice point")
    ref = wp_reference(t, g2, g3)
    assert abs(wp - ref) <= 1e-9 * max(1.0, abs(ref))
    assert inv.curve_residual(wp, dwp) <= 1e-9


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-8, 8).filter(lambda t: abs(t) > 1e-3))
@settings(max_examples=300)
def test_curve_relation_holds(g2, g3, t):
    inv = WeierstrassInvariants(g2, g3)
    try:
        wp, dwp = wp_eval(t, inv)
    except PoleProximityError:
        return
    assert inv.curve_residual(wp, dwp) <= 1e-9


def test_tan_curve_family_ii():
    curve = integral_curve(FamilySpec("II", b=1.0), (0.0, 1.0))
    assert curve.kind == "TanCurve" and curve.constants["k2"] == 0.0
    ts = np.linspace(0, 1, 101)
    assert max(abs(curve(t)[0] - math.tan(t)) for t in ts) <= 1e-14
    traj = integrate(build_family(FamilySpec("II", b=1.0)), (0.0, 1.0), 1.0, h=1e-3)
    assert np.max(np.abs(traj.xy[:, 0] - np.tan(traj.t))) <= 1e-6


def test_tan_curve_branch_guard():
    with pytest.raises(BranchNotCovered):
        integral_curve(FamilySpec("II", b=1.0), (1.0, 0.5))


def _rk4_sup_error(spec, start, t_end, h):
    curve = integral_curve(spec, start)
    n = int(round(t_end / h))
    states, status = rk4_poly(build_family(spec), start, h, n)
    assert status == 0
    err = 0.0
    for i in range(0, n + 1, 100):
        x, y = curve(i * h)
        err = max(err, math.hypot(x - states[i, 0], y - states[i, 1]))
    return curve, err


def test_weierstrass_curve_family_i():
    spec, start = FamilySpec("I", c=1.0), (1.0, 0.0)
    curve, err = _rk4_sup_error(spec, start, 0.3, 1e-5)
    assert err <= 1e-6
    h_val = first_integral(spec)(*start)
    assert curve.invariants.g2 == 0.0
    assert curve.invariants.g3 == pytest.approx(-spec.c**2 * h_val / 18.0, rel=1e-14)


@pytest.mark.parametrize("spec, start", [
    (FamilySpec("I", c=-2.0), (0.5, 0.3)),
    (FamilySpec("V", b=1.0, c=1.0, s=-4, algebraic=True), (0.3, 0.1)),   # bounded oval
    (FamilySpec("V", b=1.0, c=1.0, s=-4, algebraic=True), (0.5, 1.5)),   # unbounded branch
    (FamilySpec("IV", a=1.0, c=-1.0, p=-4, algebraic=True), (0.2, -0.2)),
])
def test_weierstrass_curve_other_families(spec, start):
    _, err = _rk4_sup_error(spec, start, 0.3, 1e-5)
    assert err <= 1e-6


def test_curve_pole_raises():
    curve = integral_curve(FamilySpec("I", c=1.0), (1.0, 0.0))
    with pytest.raises(PoleProximityError):
        curve(-curve.constants["k0"])


def test_variational_solution_is_velocity():
    """xi = d/dt of the reference solution solves the variational equation."""
    spec, start = FamilySpec("I", c=1.0), (1.0, 0.0)
    curve = integral_curve(spec, start)
    var = variational_equation(spec, curve)
    field = build_family(spec)
    xi0 = field(*start)
    ts = np.linspace(0, 0.3, 7)
    _, xi = var.solve(xi0, 0.3, t_eval=ts)
    for k, t in enumerate(ts):
        assert np.allclose(xi[:, k], field(*curve(t)), atol=1e-8)


def test_variational_equation_family_ii_matches_scalar_form():
    b = 1.0
    curve = integral_curve(FamilySpec("II", b=b), (0.0, 1.0))
    var = variational_equation(FamilySpec("II", b=b), curve)
    x0, y0 = curve(0.4)
    assert np.allclose(var.matrix(0.4), [[0, 1], [2 * b * y0, 2 * b * x0]])
    assert any("VAR-SIGN" in n for n in var.notes)


def test_variational_zero_trajectory():
    var = variational_equation(FamilySpec("I", c=1.0), lambda t: (0.0, 0.0))
    assert np.allclose(var.fundamental_matrix(2.0), [[1.0, 2.0], [0.0, 1.0]], atol=1e-12)
