import cmath

import pytest

from dedekind_moments.characters import (
    DirichletCharacter,
    character_from_table,
    gauss_sum_twisted,
    is_fundamental_discriminant,
    kronecker_character,
    kronecker_symbol,
    principal_character,
)
from dedekind_moments.errors import CharacterError, PreconditionError


def test_kronecker_symbol_small_table():
    assert [kronecker_symbol(-3, n) for n in range(6)] == [0, 1, -1, 0, 1, -1]
    assert [kronecker_symbol(-4, n) for n in range(4)] == [0, 1, 0, -1]
    assert kronecker_symbol(5, 2) == -1
    assert kronecker_symbol(5, 4) == 1


def test_fundamental_discriminants():
    assert [D for D in range(-12, 13) if is_fundamental_discriminant(D)] == [-11, -8, -7, -4, -3, 1, 5, 8, 12]


def test_parity_and_primitivity(chi_m3, chi_m4, chi_5, chi_quartic):
    assert (chi_m3.parity, chi_m4.parity, chi_5.parity) == (1, 1, 0)
    assert chi_quartic.parity == 1
    assert all(c.primitive for c in (chi_m3, chi_m4, chi_5, chi_quartic))
    assert not principal_character(4).primitive
    assert chi_5.is_real and not chi_quartic.is_real


@pytest.mark.parametrize("name", ["chi_m3", "chi_m4", "chi_5", "chi_quartic"])
def test_gauss_sum_laws(name, request):
    chi = request.getfixturevalue(name)
    G = chi.gauss
    assert abs(abs(G) ** 2 - chi.q) < 1e-10
    assert abs(G * chi.conj().gauss - chi(-1) * chi.q) < 1e-10


def test_twisted_gauss_sum_separates(chi_quartic):
    for n in range(1, 12):
        expected = chi_quartic.conj()(n) * chi_quartic.gauss
        assert abs(gauss_sum_twisted(chi_quartic, n) - expected) < 1e-10


def test_real_gauss_sums(chi_m3, chi_5):
    assert abs(chi_m3.gauss - 1j * 3**0.5) < 1e-12
    assert abs(chi_5.gauss - 5**0.5) < 1e-12


def test_vectorised_call(chi_quartic):
    values = chi_quartic([1, 2, 7, 10])
    assert abs(values[2] - 1j) < 1e-15
    assert values[3] == 0


def test_invalid_tables_are_rejected():
    with pytest.raises(CharacterError, match="multiplicativity"):
        character_from_table(5, [0, 1, -1, 1, -1])
    with pytest.raises(CharacterError, match="support"):
        character_from_table(4, [1, 1, 0, -1])
    with pytest.raises(CharacterError):
        character_from_table(3, [0, 1])
    with pytest.raises(CharacterError):
        kronecker_character(-12 * 9)


def test_json_form_restores_the_table(chi_quartic):
    restored = DirichletCharacter.from_json(chi_quartic.to_json())
    assert restored.q == 5
    assert all(cmath.isclose(restored(n), chi_quartic(n)) for n in range(5))


def test_gauss_twisted_needs_primitive():
    with pytest.raises(PreconditionError):
        gauss_sum_twisted(principal_character(4), 1)
