"""Bivariate polynomials, planar vector fields and truncated power series.

Everything here is immutable: operations build new values. Coefficients are
64-bit floats; zero coefficients are never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

#: Default threshold below which a series coefficient counts as zero.
ZERO_THRESHOLD = 1e-12

#: Default truncation order for power series.
DEFAULT_ORDER = 12


class Poly2:
    """Real polynomial in two variables, stored as ``{(i, j): c}`` for ``c x^i y^j``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], float] | None = None):
        clean: dict[tuple[int, int], float] = {}
        for (i, j), c in (terms or {}).items():
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent ({i}, {j})")
            c = float(c)
            if c != 0.0:
                clean[(i, j)] = clean.get((i, j), 0.0) + c
                if clean[(i, j)] == 0.0:
                    del clean[(i, j)]
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c: float) -> "Poly2":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c: float = 1.0) -> "Poly2":
        return cls({(i, j): c})

    @classmethod
    def x(cls) -> "Poly2":
        return cls({(1, 0): 1.0})

    @classmethod
    def y(cls) -> "Poly2":
        return cls({(0, 1): 1.0})

    # -- basic accessors ----------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, int], float]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(i + j for i, j in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, i: int, j: int) -> float:
        return self._terms.get((i, j), 0.0)

    def homogeneous_part(self, k: int) -> "Poly2":
        return Poly2({e: c for e, c in self._terms.items() if sum(e) == k})

    def truncate_below(self, k: int) -> "Poly2":
        """Drop every term of total degree < k."""
        return Poly2({e: c for e, c in self._terms.items() if sum(e) >= k})

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "Poly2":
        other = _as_poly(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0.0) + c
        return Poly2(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly2":
        return Poly2({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Poly2":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly2":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly2":
        if isinstance(other, (int, float)):
            return Poly2({e: c * other for e, c in self._terms.items()})
        other = _as_poly(other)
        out: dict[tuple[int, int], float] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0.0) + c1 * c2
        return Poly2(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly2":
        if n < 0:
            raise ValueError("negative power")
        result = Poly2.const(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def diff(self, var: str) -> "Poly2":
        """Formal partial derivative with respect to ``"x"`` or ``"y"``."""
        if var == "x":
            return Poly2({(i - 1, j): i * c for (i, j), c in self._terms.items() if i > 0})
        if var == "y":
            return Poly2({(i, j - 1): j * c for (i, j), c in self._terms.items() if j > 0})
        raise ValueError(f"unknown variable {var!r}")

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float)):
            other = Poly2.const(other)
        if not isinstance(other, Poly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def allclose(self, other: "Poly2", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(self.coeff(*k) - other.coeff(*k)) <= atol + rtol * abs(other.coeff(*k))
            for k in keys
        )

    def chop(self, tol: float) -> "Poly2":
        """Drop coefficients with magnitude ``<= tol``."""
        return Poly2({e: c for e, c in self._terms.items() if abs(c) > tol})

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x: float, y: float) -> float:
        return poly_eval(self, x, y)

    def compose_affine(self, shift, matrix) -> "Poly2":
        """Substitute ``(x, y) = shift + matrix @ (s, t)``; result is in ``(s, t)``."""
        (x0, y0), ((m00, m01), (m10, m11)) = shift, matrix
        xs = Poly2({(0, 0): x0, (1, 0): m00, (0, 1): m01})
        ys = Poly2({(0, 0): y0, (1, 0): m10, (0, 1): m11})
        out = Poly2()
        xpow = [Poly2.const(1.0)]
        ypow = [Poly2.const(1.0)]
        for (i, j), c in self._terms.items():
            while len(xpow) <= i:
                xpow.append(xpow[-1] * xs)
            while len(ypow) <= j:
                ypow.append(ypow[-1] * ys)
            out = out + c * (xpow[i] * ypow[j])
        return out

    # -- serialization ------------------------------------------------------
    def to_json_obj(self) -> dict:
        return {"terms": [{"i": i, "j": j, "c": c} for (i, j), c in self._terms.items()]}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Poly2":
        try:
            return cls({(t["i"], t["j"]): t["c"] for t in obj["terms"]})
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial JSON: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, text: str) -> "Poly2":
        return cls.from_json_obj(json.loads(text))

    def __repr__(self) -> str:
        if not self._terms:
            return "Poly2(0)"
        parts = []
        for (i, j), c in self._terms.items():
            mono = "".join(
                f"{v}^{k}" if k > 1 else v for v, k in (("x", i), ("y", j)) if k
            )
            parts.append(f"{c:g}{'*' + mono if mono else ''}")
        return "Poly2(" + " + ".join(parts) + ")"


def _as_poly(value) -> Poly2:
    if isinstance(value, Poly2):
        return value
    if isinstance(value, (int, float)):
        return Poly2.const(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Poly2")


def poly_eval(p: Poly2, x: float, y: float) -> float:
    """Evaluate ``p`` at ``(x, y)``.

    Terms are grouped by total degree. Each homogeneous part of degree k is
    evaluated by Horner in x, ``(((c_k0 x + c_{k-1,1} y) x + c_{k-2,2} y^2) x ...)``,
    and the parts are accumulated from the highest degree down.
    """
    if p.is_zero():
        return 0.0
    deg = p.degree
    total = 0.0
    for k in range(deg, -1, -1):
        acc = 0.0
        ycache = [1.0]
        for _ in range(k):
            ycache.append(ycache[-1] * y)
        for i in range(k, -1, -1):
            acc = acc * x + p.coeff(i, k - i) * ycache[k - i]
        total += acc
    return total


@dataclass(frozen=True)
class VectorField2:
    """Planar polynomial field ``x' = p(x, y), y' = q(x, y)``."""

    p: Poly2
    q: Poly2

    def __post_init__(self):
        if self.p.is_zero() and self.q.is_zero():
            raise ValueError("vector field with both components zero")

    @property
    def degree(self) -> int:
        return max(self.p.degree, self.q.degree)

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        return poly_eval(self.p, x, y), poly_eval(self.q, x, y)

    def jacobian(self) -> tuple[tuple[Poly2, Poly2], tuple[Poly2, Poly2]]:
        return jacobian(self)

    def jacobian_at(self, x: float, y: float) -> np.ndarray:
        (pa, pb), (qa, qb) = jacobian(self)
        return np.array([[pa(x, y), pb(x, y)], [qa(x, y), qb(x, y)]])

    def divergence(self) -> Poly2:
        return self.p.diff("x") + self.q.diff("y")

    def reversed(self) -> "VectorField2":
        return VectorField2(-self.p, -self.q)

    def to_json_obj(self) -> dict:
        return {"p": self.p.to_json_obj(), "q": self.q.to_json_obj()}

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "VectorField2":
        try:
            return cls(Poly2.from_json_obj(obj["p"]), Poly2.from_json_obj(obj["q"]))
        except KeyError as exc:
            raise ValueError(f"malformed vector field JSON: missing {exc}") from exc


def jacobian(v: VectorField2) -> tuple[tuple[Poly2, Poly2], tuple[Poly2, Poly2]]:
    """Rows ``[[dP/dx, dP/dy], [dQ/dx, dQ/dy]]`` as polynomials."""
    return (v.p.diff("x"), v.p.diff("y")), (v.q.diff("x"), v.q.diff("y"))


# ---------------------------------------------------------------------------
# Truncated univariate power series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerSeries1:
    """Power series ``sum_k a_k x^k`` known exactly through ``truncation_order``."""

    coefficients: tuple[float, ...]
    truncation_order: int = field(default=DEFAULT_ORDER)

    def __post_init__(self):
        k = self.truncation_order
        coeffs = tuple(float(c) for c in self.coefficients[: k + 1])
        coeffs = coeffs + (0.0,) * (k + 1 - len(coeffs))
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "PowerSeries1":
        return cls((), order)

    @classmethod
    def from_poly(cls, p: Poly2, order: int = DEFAULT_ORDER) -> "PowerSeries1":
        """Series of a polynomial in x alone (y-dependent terms are rejected)."""
        if any(j for (_, j) in p.terms):
            raise ValueError("polynomial depends on y")
        coeffs = [0.0] * (order + 1)
        for (i, _), c in p.terms.items():
            if i <= order:
                coeffs[i] = c
        return cls(tuple(coeffs), order)

    def __getitem__(self, k: int) -> float:
        return self.coefficients[k]

    def __add__(self, other: "PowerSeries1") -> "PowerSeries1":
        k = min(self.truncation_order, other.truncation_order)
        return PowerSeries1(
            tuple(a + b for a, b in zip(self.coefficients[: k + 1], other.coefficients)), k
        )

    def __neg__(self) -> "PowerSeries1":
        return PowerSeries1(tuple(-a for a in self.coefficients), self.truncation_order)

    def __sub__(self, other: "PowerSeries1") -> "PowerSeries1":
        return self + (-other)

    def __mul__(self, other) -> "PowerSeries1":
        if isinstance(other, (int, float)):
            return PowerSeries1(
                tuple(a * other for a in self.coefficients), self.truncation_order
            )
        k = min(self.truncation_order, other.truncation_order)
        a = np.asarray(self.coefficients[: k + 1])
        b = np.asarray(other.coefficients[: k + 1])
        return PowerSeries1(tuple(np.convolve(a, b)[: k + 1]), k)

    __rmul__ = __mul__

    def __call__(self, x: float) -> float:
        return float(np.polynomial.polynomial.polyval(x, self.coefficients))

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.coefficients)


def compose_series(b: Poly2, f: PowerSeries1) -> PowerSeries1:
    """Series of ``b(x, f(x))`` truncated at ``f``'s order; requires ``f(0) = 0``."""
    if f[0] != 0.0:
        raise ValueError("compose_series requires f(0) = 0")
    k = f.truncation_order
    xs = [0.0] * (k + 1)
    if k >= 1:
        xs[1] = 1.0
    x_series = PowerSeries1(tuple(xs), k)
    one = PowerSeries1((1.0,), k)
    xpow, fpow = [one], [one]
    out = PowerSeries1.zero(k)
    for (i, j), c in b.terms.items():
        if i > k:
            continue
        while len(xpow) <= i:
            xpow.append(xpow[-1] * x_series)
        while len(fpow) <= j:
            fpow.append(fpow[-1] * f)
        out = out + (xpow[i] * fpow[j]) * c
    return out


def series_solve_implicit(a: Poly2, order: int = DEFAULT_ORDER) -> PowerSeries1:
    """Solve ``y + a(x, y) = 0`` for ``y = f(x)`` with ``f(0) = f'(0) = 0``.

    Uses the fixed-point iteration ``f <- -a(x, f)`` from ``f = 0``. Because
    ``a`` starts at degree two, each pass fixes at least one more order, so
    ``order`` passes are enough.
    """
    low = [(e, c) for e, c in a.terms.items() if sum(e) < 2]
    if low:
        raise ValueError(
            "series_solve_implicit: a(x, y) must have no constant or linear terms, "
            f"found {dict(low)}"
        )
    f = PowerSeries1.zero(order)
    for _ in range(order):
        f = -compose_series(a, f)
    return f


def leading_term(s: PowerSeries1, tol: float = ZERO_THRESHOLD) -> tuple[float, int] | None:
    """Return ``(coefficient, exponent)`` of the first term above ``tol``.

    ``None`` means the series is identically zero through its truncation order.
    """
    for k, c in enumerate(s.coefficients):
        if abs(c) > tol:
            return c, k
    return None


def field_from_json(text: str) -> VectorField2:
    return VectorField2.from_json_obj(json.loads(text))


def polys_close(ps: Iterable[Poly2], qs: Iterable[Poly2], atol: float = 1e-12) -> bool:
    return all(p.allclose(q, atol=atol) for p, q in zip(ps, qs, strict=True))
