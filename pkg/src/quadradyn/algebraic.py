"""First integrals, Weierstrass ℘ evaluation and closed-form integral curves.

The Hamiltonian families satisfy ``x'' = -c x^2 - k x`` with ``k = 0`` (I),
``k = 3a^2/2`` (IV, p = -4) or ``k = 3b/2`` (V, s = -4). The affine change
``x = alpha X + beta`` with ``alpha = -6/c`` and ``beta = -k/(2c)`` turns this
into ``X'' = 6 X^2 - g2/2`` with ``g2 = k^2/12``, so ``X = ℘(t + k0; g2, g3)``
where ``g3`` is read off the energy level through the initial point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from .families import FamilySpec, SpecError, build_family
from .poly import Poly2, VectorField2

POLE_GUARD = 1e12
LAURENT_TERMS = 14  # c_2 .. c_14, i.e. through t^26


class PoleProximityError(ArithmeticError):
    """The requested argument lies within the guard radius of a pole of ℘."""


class BranchNotCovered(ValueError):
    """Initial data outside the sign regime of the closed-form solution."""


GALOIS_NOTES = {
    "I": "ℤ₂ (reported as metadata; no group computation is performed)",
    "II": "identity group (reported as metadata; no group computation is performed)",
    "III": "identity group (reported as metadata; no group computation is performed)",
    "IV": "ℤ₂ (reported as metadata; no group computation is performed)",
    "V": "ℤ₂ (reported as metadata; no group computation is performed)",
}


# ---------------------------------------------------------------------------
# First integrals
# ---------------------------------------------------------------------------


def lie_derivative(expr: Poly2, field_: VectorField2) -> Poly2:
    """``dI/dx * P + dI/dy * Q`` as a polynomial."""
    return expr.diff("x") * field_.p + expr.diff("y") * field_.q


@dataclass(frozen=True)
class FirstIntegral:
    family: str
    kind: str
    expression: Poly2
    galois_note: str
    field: VectorField2

    def __post_init__(self):
        deriv = lie_derivative(self.expression, self.field)
        scale = max([1.0] + [abs(c) for c in self.expression.terms.values()])
        if not deriv.chop(1e-13 * scale).is_zero:
            raise ArithmeticError(f"expression is not conserved: derivative {deriv!r}")

    def __call__(self, x: float, y: float) -> float:
        return float(self.expression(x, y))

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "kind": self.kind,
            "expression": self.expression.to_json_obj(),
            "galois_note": self.galois_note,
        }


def _hamiltonian_k(spec: FamilySpec) -> float:
    """Linear restoring coefficient ``k`` of the Hamiltonian families."""
    if spec.tag == "I":
        return 0.0
    if spec.tag in ("IV", "V"):
        if spec.damping != 0.0:
            raise SpecError(
                "dissipative: no polynomial first integral is available "
                f"(family {spec.tag} has damping d={spec.damping!r}; use "
                f"{'p' if spec.tag == 'IV' else 's'}=-4)"
            )
        return 1.5 * spec.a**2 if spec.tag == "IV" else 1.5 * spec.b
    raise SpecError(f"family {spec.tag} is not Hamiltonian")


def first_integral(spec: FamilySpec) -> FirstIntegral:
    field_ = build_family(spec)
    if spec.tag in ("II", "III"):
        coef = spec.b if spec.tag == "II" else spec.a
        expr = Poly2({(0, 1): 1.0, (2, 0): -coef})
        return FirstIntegral(spec.tag, "Linear-in-y", expr, GALOIS_NOTES[spec.tag], field_)
    k = _hamiltonian_k(spec)
    expr = Poly2({(0, 2): 0.5, (3, 0): spec.c / 3.0, (2, 0): k / 2.0})
    return FirstIntegral(spec.tag, "Hamiltonian", expr, GALOIS_NOTES[spec.tag], field_)


# ---------------------------------------------------------------------------
# Weierstrass ℘
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeierstrassInvariants:
    g2: float
    g3: float

    @property
    def discriminant(self) -> float:
        return self.g2**3 - 27.0 * self.g3**2

    @property
    def degenerate(self) -> bool:
        return self.discriminant == 0.0

    def cubic_roots(self) -> list[float]:
        """Real roots of ``4X^3 - g2 X - g3``, descending."""
        roots = np.roots([4.0, 0.0, -self.g2, -self.g3])
        scale = 1.0 + float(np.max(np.abs(roots)))
        real = sorted((float(r.real) for r in roots if abs(r.imag) <= 1e-9 * scale), reverse=True)
        return real

    def curve_residual(self, wp: float, wp_prime: float) -> float:
        """Relative residual of ``(℘')^2 = 4℘^3 - g2℘ - g3``."""
        lhs = wp_prime * wp_prime
        cubic = 4.0 * wp**3
        rhs = cubic - self.g2 * wp - self.g3
        scale = max(abs(lhs), abs(cubic), abs(self.g2 * wp), abs(self.g3), 1e-300)
        return abs(lhs - rhs) / scale

    def to_json_obj(self) -> dict:
        return {"g2": self.g2, "g3": self.g3, "discriminant": self.discriminant}


def laurent_coefficients(g2: float, g3: float, terms: int = LAURENT_TERMS) -> list[float]:
    """``c[k]`` for k = 2..terms with ``℘ = t^-2 + sum c_k t^(2k-2)``."""
    c = [0.0] * (terms + 1)
    if terms >= 2:
        c[2] = g2 / 20.0
    if terms >= 3:
        c[3] = g3 / 28.0
    for k in range(4, terms + 1):
        acc = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return c


def _series(t: float, coeffs: list[float]) -> tuple[float, float]:
    t2 = t * t
    wp = 0.0
    dwp = 0.0
    for k in range(len(coeffs) - 1, 1, -1):
        wp = wp * t2 + coeffs[k]
        dwp = dwp * t2 + (2 * k - 2) * coeffs[k]
    wp = 1.0 / t2 + wp * t2
    dwp = -2.0 / (t2 * t) + dwp * t
    return wp, dwp


def switchover_radius(inv: WeierstrassInvariants) -> float:
    """Largest |t| at which the Laurent seed is used directly."""
    scale = max(abs(inv.g2) ** 0.25, abs(inv.g3) ** (1.0 / 6.0))
    return 0.75 / scale if scale > 0 else math.inf


def wp_eval(t: float, inv: WeierstrassInvariants) -> tuple[float, float]:
    """℘(t) and ℘'(t) for real ``t``: Laurent seed, then repeated duplication.

    Raises PoleProximityError when the result would exceed the pole guard,
    which covers ``|t| < 1e-6`` and arguments close to the real lattice poles.
    """
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"argument must be finite, got {t}")
    if t == 0.0:
        raise PoleProximityError("t = 0 is a pole of ℘")
    sign = 1.0 if t > 0 else -1.0
    u = abs(t)
    t0 = switchover_radius(inv)
    n = 0
    while u > t0:
        u *= 0.5
        n += 1
    x, y = _series(u, laurent_coefficients(inv.g2, inv.g3))
    for _ in range(n):
        if y == 0.0:
            raise PoleProximityError("duplication through a half period lands on a pole")
        lam = (6.0 * x * x - 0.5 * inv.g2) / y
        x3 = 0.25 * lam * lam - 2.0 * x
        y3 = -y - lam * (x3 - x)
        x, y = x3, y3
        if not (math.isfinite(x) and math.isfinite(y)):
            raise PoleProximityError(f"℘ overflowed near t={t}")
    if abs(x) > POLE_GUARD:
        raise PoleProximityError(f"|℘({t})| = {abs(x):.3g} exceeds the pole guard")
    return x, sign * y


# ---------------------------------------------------------------------------
# Integral curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegralCurve:
    """Closed-form solution through an initial point, as a function of time.

    PCurve: ``x = scale * X + shift`` with ``X = ℘(t + k0)`` on the unbounded
    real branch, or its half-period translate on the bounded oval.
    TanCurve: ``x = amplitude * tan(rate * (t + k2))``.
    """

    kind: str
    family: str
    initial: tuple[float, float]
    constants: dict
    invariants: WeierstrassInvariants | None = None
    scale: float = 1.0
    shift: float = 0.0
    notes: tuple[str, ...] = ()

    def __call__(self, t: float) -> tuple[float, float]:
        if self.kind == "TanCurve":
            amp = self.constants["amplitude"]
            rate = self.constants["rate"]
            arg = rate * (t + self.constants["k2"])
            cos = math.cos(arg)
            if abs(cos) < 1e-12:
                raise PoleProximityError(f"tangent pole at t={t}")
            return amp * math.tan(arg), amp * rate / (cos * cos)
        k0 = self.constants["k0"]
        wp, dwp = wp_eval(t + k0, self.invariants)
        if self.constants["branch"] == "oval":
            e1, e2, e3 = self.constants["roots"]
            kk = (e3 - e1) * (e3 - e2)
            den = wp - e3
            big_x = e3 + kk / den
            big_y = -kk * dwp / (den * den)
        else:
            big_x, big_y = wp, dwp
        return self.scale * big_x + self.shift, self.scale * big_y

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "family": self.family,
            "initial": list(self.initial),
            "constants": {
                k: (list(v) if isinstance(v, (tuple, list)) else v)
                for k, v in self.constants.items()
            },
            "invariants": self.invariants.to_json_obj() if self.invariants else None,
            "scale": self.scale,
            "shift": self.shift,
            "notes": list(self.notes),
        }


def _inverse_wp_real(x0: float, y0: float, inv: WeierstrassInvariants) -> float:
    """``k`` on the real axis with ``℘(k) = x0`` and ``sign ℘'(k) = sign y0``."""
    f = lambda s: 4.0 * (x0 + s * s) ** 3 - inv.g2 * (x0 + s * s) - inv.g3  # noqa: E731
    val, _ = quad(lambda s: 2.0 * s / math.sqrt(max(f(s), 0.0)) if s > 0 else (
        2.0 / math.sqrt(max(12.0 * x0 * x0 - inv.g2, 1e-300))), 0.0, math.inf,
        epsabs=1e-14, epsrel=1e-13, limit=400)
    # ℘ decreases on (0, omega]: ℘' < 0 there, so positive y0 needs -k
    return -val if y0 > 0 else val


def _pcurve(spec: FamilySpec, x0: float, y0: float) -> IntegralCurve:
    k = _hamiltonian_k(spec)
    c = spec.c
    if c == 0.0:
        raise SpecError("the ℘ parametrization needs c≠0")
    alpha = -6.0 / c
    beta = -k / (2.0 * c)
    g2 = k * k / 12.0
    big_x0 = (x0 - beta) / alpha
    big_y0 = y0 / alpha
    if not (math.isfinite(big_x0) and abs(big_x0) < POLE_GUARD):
        raise PoleProximityError("initial point maps to a pole of ℘")
    g3 = 4.0 * big_x0**3 - g2 * big_x0 - big_y0**2
    inv = WeierstrassInvariants(g2, g3)
    roots = inv.cubic_roots()
    notes = []
    if spec.tag == "I":
        h_val = 0.5 * y0 * y0 + c / 3.0 * x0**3
        notes.append(
            "PCURVE-G3: substituting x = (-6/c)℘ into the energy gives g3 = -c^2 H/18 "
            f"(= {g3!r} here); the reference statement prints g3 = -2H (= {-2.0 * h_val!r})"
        )
    else:
        notes.append(
            f"PCURVE-SHIFT: x = alpha X + beta with alpha = {alpha!r}, beta = {beta!r} "
            "removes the linear term of the potential"
        )
    if inv.degenerate and g2 == 0.0 and g3 == 0.0:
        # ℘ = 1/t^2: X0 = 1/k0^2 with k0 sign from Y0
        if big_x0 <= 0.0:
            raise BranchNotCovered("degenerate lattice with X0 <= 0 has no real ℘ solution")
        k0 = 1.0 / math.sqrt(big_x0)
        k0 = -k0 if big_y0 > 0 else k0
        return IntegralCurve(
            "PCurve", spec.tag, (x0, y0), {"k0": k0, "branch": "unbounded", "alpha": alpha,
                                            "beta": beta}, inv, alpha, beta, tuple(notes)
        )
    if len(roots) == 3 and big_x0 <= roots[1] + 1e-12 * (1.0 + abs(roots[1])):
        e1, e2, e3 = roots
        kk = (e3 - e1) * (e3 - e2)
        den = big_x0 - e3
        if den <= 0.0:
            raise PoleProximityError("initial point at the oval's turning point e3")
        wp_k = e3 + kk / den
        # X' = -kk ℘'/(℘ - e3)^2 with kk > 0, so sign X' = -sign ℘'
        k0 = _inverse_wp_real(wp_k, -big_y0, inv)
        branch = "oval"
        notes.append("PCURVE-OVAL: bounded component, X = e3 + (e3-e1)(e3-e2)/(℘(t+k0) - e3)")
    else:
        k0 = _inverse_wp_real(big_x0, big_y0, inv)
        branch = "unbounded"
    consts = {"k0": k0, "branch": branch, "alpha": alpha, "beta": beta, "roots": tuple(roots)}
    return IntegralCurve("PCurve", spec.tag, (x0, y0), consts, inv, alpha, beta, tuple(notes))


def _tancurve(spec: FamilySpec, x0: float, y0: float) -> IntegralCurve:
    coef = spec.b if spec.tag == "II" else spec.a
    k1 = y0 - coef * x0 * x0
    if not (k1 / coef > 0):
        raise BranchNotCovered(
            f"branch not covered by the tangent closed form: k1/{'b' if spec.tag == 'II' else 'a'} "
            f"= {k1 / coef!r} must be positive"
        )
    amplitude = math.sqrt(k1 / coef)
    rate = math.copysign(math.sqrt(k1 * coef), coef)
    k2 = math.atan(x0 / amplitude) / rate
    notes = (
        "TAN-ARGUMENT: the separable integral gives tan(sqrt(k1 b) (t + k2)); the reference "
        "statement prints the whole product k1 b (k2 + t) under the square root",
    )
    if coef < 0:
        notes += ("TAN-SIGN: for negative coefficient the rate carries sign(b)",)
    consts = {"k1": k1, "k2": k2, "amplitude": amplitude, "rate": rate}
    return IntegralCurve("TanCurve", spec.tag, (x0, y0), consts, notes=notes)


def integral_curve(spec: FamilySpec, initial) -> IntegralCurve:
    x0, y0 = float(initial[0]), float(initial[1])
    if spec.tag in ("II", "III"):
        return _tancurve(spec, x0, y0)
    return _pcurve(spec, x0, y0)


# ---------------------------------------------------------------------------
# Variational equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VariationalSystem:
    """``xi' = A(t) xi`` with ``A`` the Jacobian along a reference solution."""

    family: str
    reference: Callable[[float], tuple[float, float]]
    field: VectorField2
    symbolic: str
    notes: tuple[str, ...] = field(default=())

    def matrix(self, t: float) -> np.ndarray:
        x, y = self.reference(t)
        return self.field.jacobian_at(x, y)

    def rhs(self, t: float, xi) -> np.ndarray:
        return self.matrix(t) @ np.asarray(xi, dtype=float)

    def solve(self, xi0, t_end: float, t_eval=None, rtol: float = 1e-11):
        """Numerical solution from ``xi(0) = xi0``; returns ``(t, xi[:, k])``."""
        sol = solve_ivp(
            self.rhs, (0.0, t_end), np.asarray(xi0, dtype=float), method="DOP853",
            t_eval=t_eval, rtol=rtol, atol=rtol * 1e-2,
        )
        if not sol.success:
            raise ArithmeticError(sol.message)
        return sol.t, sol.y

    def fundamental_matrix(self, t_end: float) -> np.ndarray:
        cols = [self.solve(e, t_end)[1][:, -1] for e in ((1.0, 0.0), (0.0, 1.0))]
        return np.column_stack(cols)


_SYMBOLIC = {
    "I": "[[0, 1], [-2c x0(t), 0]]",
    "II": "[[0, 1], [2b y0(t), 2b x0(t)]]",
    "III": "[[0, 1], [2a y0(t), 2a x0(t)]]",
    "IV": "[[0, 1], [-(3/2)a^2 - 2c x0(t), d/2]]",
    "V": "[[0, 1], [-(3/2)b - 2c x0(t), d/2]]",
}


def variational_equation(spec: FamilySpec, reference) -> VariationalSystem:
    """Linearization along ``reference``: an IntegralCurve or any ``t -> (x, y)``."""
    notes = ()
    if spec.tag in ("II", "III"):
        notes = (
            "VAR-SIGN: the Jacobian entry is +2b y0(t); the reference matrix prints -2b y0(t) "
            "while its scalar form xi'' - 2b x0 xi' - 2b y0 xi = 0 agrees with +2b y0",
        )
    return VariationalSystem(spec.tag, reference, build_family(spec), _SYMBOLIC[spec.tag], notes)


__all__ = [
    "BranchNotCovered",
    "FirstIntegral",
    "GALOIS_NOTES",
    "IntegralCurve",
    "PoleProximityError",
    "VariationalSystem",
    "WeierstrassInvariants",
    "first_integral",
    "integral_curve",
    "laurent_coefficients",
    "lie_derivative",
    "variational_equation",
    "wp_eval",
]
