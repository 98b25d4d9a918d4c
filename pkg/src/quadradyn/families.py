"""The five quadratic families and their derived parameters."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Mapping

from .poly import Poly2, VectorField2

FAMILY_TAGS = ("I", "II", "III", "IV", "V")

# Parameters that each family actually reads.
_FIELDS = {
    "I": ("c",),
    "II": ("b",),
    "III": ("a",),
    "IV": ("a", "c", "p"),
    "V": ("b", "c", "s"),
}


class SpecError(ValueError):
    """Parameter combination outside a family's admissible set."""


@dataclass(frozen=True)
class FamilySpec:
    """Family tag plus parameters.

    ``d`` is an optional free override of the damping coefficient for
    families IV and V; when absent it is derived as ``a(p+4)`` or ``b(s+4)``.
    ``algebraic=True`` admits the Hamiltonian exponents ``p = -4`` / ``s = -4``.
    """

    tag: str
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    p: int = 0
    s: int = 0
    d: float | None = None
    algebraic: bool = False

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.d is not None:
            object.__setattr__(self, "d", float(self.d))
        for name in ("p", "s"):
            value = getattr(self, name)
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            if not isinstance(value, int) or isinstance(value, bool):
                raise SpecError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, value)
        validate(self)

    @property
    def damping(self) -> float:
        """The coefficient ``d`` of the y-term (families IV and V)."""
        if self.d is not None:
            return self.d
        if self.tag == "IV":
            return self.a * (self.p + 4)
        if self.tag == "V":
            return self.b * (self.s + 4)
        raise SpecError(f"family {self.tag} has no damping coefficient")

    def to_json_obj(self) -> dict:
        out: dict = {"family": self.tag}
        for name in _FIELDS[self.tag]:
            out[name] = getattr(self, name)
        if self.d is not None and self.tag in ("IV", "V"):
            out["d"] = self.d
        return out

    @classmethod
    def from_json_obj(cls, obj: Mapping, algebraic: bool = False) -> "FamilySpec":
        if "family" not in obj:
            raise SpecError("spec JSON needs a 'family' key")
        tag = str(obj["family"])
        if tag not in FAMILY_TAGS:
            raise SpecError(f"unknown family {tag!r}")
        allowed = set(_FIELDS[tag]) | ({"d"} if tag in ("IV", "V") else set())
        extra = set(obj) - allowed - {"family"}
        if extra:
            raise SpecError(f"family {tag} does not take {sorted(extra)}")
        kwargs = {k: obj[k] for k in allowed if k in obj}
        return cls(tag=tag, algebraic=algebraic, **kwargs)


def validate(spec: FamilySpec) -> None:
    tag = spec.tag
    if tag not in FAMILY_TAGS:
        raise SpecError(f"unknown family {tag!r}")
    if tag == "I" and spec.c == 0:
        raise SpecError("family I requires c≠0")
    if tag == "II" and spec.b == 0:
        raise SpecError("family II requires b≠0")
    if tag == "III" and spec.a == 0:
        raise SpecError("family III requires a≠0")
    if tag == "IV":
        if spec.a == 0:
            raise SpecError("family IV requires a≠0")
        if spec.c == 0:
            raise SpecError("family IV requires c≠0")
        _check_exponent("p", spec.p, spec.algebraic)
    if tag == "V":
        if spec.b == 0:
            raise SpecError("family V requires b≠0 (b=0 reduces to family I)")
        _check_exponent("s", spec.s, spec.algebraic)
    if spec.d is not None and tag not in ("IV", "V"):
        raise SpecError(f"family {tag} does not take d")


def _check_exponent(name: str, value: int, algebraic: bool) -> None:
    if value >= 0:
        return
    if value == -4 and algebraic:
        return
    if value == -4:
        raise SpecError(f"{name}=-4 is admitted only for first-integral analysis")
    raise SpecError(f"{name} must be a non-negative integer, got {value}")


def family_v_field(b: float, c: float, d: float) -> VectorField2:
    """Family V with a free damping coefficient; no admissibility checks."""
    return VectorField2(
        Poly2.y(),
        Poly2({(0, 1): d / 2.0, (1, 0): -1.5 * b, (2, 0): -c}),
    )


def build_family(spec: FamilySpec) -> VectorField2:
    """Vector field of ``spec``; every family has ``x' = y``."""
    validate(spec)
    y = Poly2.y()
    if spec.tag == "I":
        q = Poly2({(2, 0): -spec.c})
    elif spec.tag == "II":
        q = Poly2({(1, 1): 2.0 * spec.b})
    elif spec.tag == "III":
        q = Poly2({(1, 1): 2.0 * spec.a})
    elif spec.tag == "IV":
        q = Poly2(
            {(0, 1): spec.damping / 2.0, (1, 0): -1.5 * spec.a**2, (2, 0): -spec.c}
        )
    else:
        return family_v_field(spec.b, spec.c, spec.damping)
    return VectorField2(y, q)


@dataclass(frozen=True)
class DerivedParams:
    d: float
    discriminant_origin: float
    discriminant_second: float
    second_point_x: float | None

    def to_json_obj(self) -> dict:
        return asdict(self)


def derived_params(spec: FamilySpec) -> DerivedParams:
    """Damping, eigenvalue radicands at both critical points, second point's x."""
    if spec.tag == "IV":
        k = spec.a**2
        x2 = -3.0 * spec.a**2 / (2.0 * spec.c)
    elif spec.tag == "V":
        k = spec.b
        x2 = -3.0 * spec.b / (2.0 * spec.c) if spec.c != 0 else None
    else:
        raise SpecError(f"derived parameters are defined for families IV and V, not {spec.tag}")
    d = spec.damping
    return DerivedParams(
        d=d,
        discriminant_origin=d * d - 24.0 * k,
        discriminant_second=d * d + 24.0 * k,
        second_point_x=x2,
    )
