import pytest

from padic_density import FieldSpec, default_modulus, is_irreducible


def test_default_moduli_are_the_documented_ones():
    assert default_modulus(2, 2) == (1, 1, 1)        # x^2 + x + 1
    assert default_modulus(3, 2) == (2, 1, 1)        # x^2 + x + 2
    assert default_modulus(2, 3) == (1, 1, 0, 1)     # x^3 + x + 1
    assert default_modulus(5, 1) == (0, 1)


@pytest.mark.parametrize("p,f", [(2, 1), (2, 2), (2, 3), (2, 4),
                                 (3, 1), (3, 2), (5, 1), (5, 2),
                                 (7, 1), (11, 1), (13, 1)])
def test_default_modulus_is_irreducible(p, f):
    m = default_modulus(p, f)
    assert len(m) == f + 1 and m[-1] == 1
    assert is_irreducible(m, p)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        FieldSpec(4, 1)
    with pytest.raises(ValueError):
        FieldSpec(3, 0)
    with pytest.raises(ValueError):
        FieldSpec(2, 2, modulus=(1, 0, 1))  # x^2 + 1 = (x+1)^2 mod 2
    with pytest.raises(ValueError):
        FieldSpec(3, 2, modulus=(1, 1))     # wrong degree


def test_json_round_trip():
    spec = FieldSpec(3, 2)
    assert FieldSpec.from_json(spec.to_json()) == spec
    assert spec.q == 9
    data = {"p": 2, "f": 3}
    assert FieldSpec.from_json(data).modulus == default_modulus(2, 3)


def test_custom_modulus_override():
    spec = FieldSpec(3, 2, modulus=(1, 0, 1))   # x^2 + 1, irreducible mod 3
    assert spec.q == 9
    assert spec.modulus == (1, 0, 1)
