import pytest

from quadradyn.families import FamilySpec, SpecError, build_family, derived_params
from quadradyn.poly import Poly2


def test_family_i_field():
    f = build_family(FamilySpec("I", c=1.0))
    assert f.p == Poly2.y() and f.q == Poly2({(2, 0): -1.0})


def test_family_v_field_example():
    f = build_family(FamilySpec("V", b=1.0, c=1.0, s=0))
    assert f.q == Poly2({(0, 1): 2.0, (1, 0): -1.5, (2, 0): -1.0})


def test_family_v_with_c_zero_is_linear():
    spec = FamilySpec("V", b=2.0, c=0.0, s=1)
    f = build_family(spec)
    assert f.q == Poly2({(0, 1): spec.damping / 2, (1, 0): -3.0})


def test_derived_parameters():
    dp = derived_params(FamilySpec("V", b=1.0, c=1.0, s=2))
    assert (dp.d, dp.discriminant_origin, dp.second_point_x) == (6.0, 12.0, -1.5)
    dp = derived_params(FamilySpec("IV", a=1.0, c=1.0, p=0))
    assert dp.d == 4.0 and dp.discriminant_origin == -8.0


@pytest.mark.parametrize(
    "kwargs, fragment",
    [
        (dict(tag="IV", a=0.0, c=1.0, p=0), "a≠0"),
        (dict(tag="V", b=0.0, c=1.0, s=0), "b≠0"),
        (dict(tag="V", b=1.0, c=1.0, s=-1), "s"),
        (dict(tag="V", b=1.0, c=1.0, s=2.5), "integer"),
    ],
)
def test_guards(kwargs, fragment):
    with pytest.raises(SpecError, match=fragment):
        FamilySpec(**kwargs)


def test_hamiltonian_exponent_needs_algebraic_flag():
    with pytest.raises(SpecError):
        FamilySpec("V", b=1.0, c=1.0, s=-4)
    assert FamilySpec("V", b=1.0, c=1.0, s=-4, algebraic=True).damping == 0.0


def test_json_round_trip():
    spec = FamilySpec("IV", a=-1.0, c=2.0, p=3, d=0.5)
    assert FamilySpec.from_json_obj(spec.to_json_obj()) == spec


def test_unknown_keys_rejected():
    with pytest.raises(SpecError):
        FamilySpec.from_json_obj({"family": "I", "c": 1.0, "b": 2.0})
