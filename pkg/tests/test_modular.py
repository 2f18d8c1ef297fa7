import pytest

from circlewalk.modular import (
    NotASquare,
    NotPrime,
    Squareness,
    WrongResidueClass,
    inv_mod,
    is_square,
    make_modulus,
    primes_3_mod_4,
    sqrt_mod,
)


def test_squares_mod_7():
    m = make_modulus(7)
    squares = {a for a in range(7) if m.residue_table[a]}
    assert squares == {1, 2, 4}


@pytest.mark.parametrize("n", [5, 13, 17, 29])
def test_rejects_wrong_residue_class(n):
    with pytest.raises(WrongResidueClass):
        make_modulus(n)


@pytest.mark.parametrize("n", [1, 2, 4, 9, 15, 3999])
def test_rejects_non_primes_and_small(n):
    # primality is checked before the residue class, so composites of
    # either class raise NotPrime (3999 = 3 * 31 * 43)
    with pytest.raises(NotPrime):
        make_modulus(n)


def test_accepts_4003():
    m = make_modulus(4003)
    assert m.p == 4003
    assert int(m.residue_table.sum()) == (4003 - 1) // 2


def test_is_square_examples():
    m = make_modulus(7)
    assert is_square(m, 2) is Squareness.SQUARE  # 3^2 = 2 mod 7
    assert is_square(m, 6) is Squareness.NONSQUARE  # 6 = -1 mod 7
    assert is_square(m, 0) is Squareness.ZERO


def test_sqrt_examples():
    m = make_modulus(7)
    assert sqrt_mod(m, 2) == 3
    assert sqrt_mod(m, 1) == 1
    assert sqrt_mod(m, 0) == 0
    with pytest.raises(NotASquare):
        sqrt_mod(m, 6)


def test_inv_examples():
    m = make_modulus(7)
    assert inv_mod(m, 2) == 4
    assert inv_mod(m, 1) == 1
    assert inv_mod(m, 4) == 2
    with pytest.raises(ZeroDivisionError):
        inv_mod(m, 0)


@pytest.mark.parametrize("p", [7, 11, 19, 23])
def test_field_properties_exhaustive(p):
    m = make_modulus(p)
    # canonical root squares back, and only for squares
    for a in range(p):
        cls = is_square(m, a)
        if cls is Squareness.NONSQUARE:
            with pytest.raises(NotASquare):
                sqrt_mod(m, a)
        else:
            r = sqrt_mod(m, a)
            assert (r * r) % p == a
            assert r <= p - r  # canonical root is the smaller one
        assert is_square(m, a * a) in (Squareness.ZERO, Squareness.SQUARE)
    assert int(m.residue_table.sum()) == (p - 1) // 2
    assert is_square(m, p - 1) is Squareness.NONSQUARE
    for a in range(1, p):
        assert inv_mod(m, inv_mod(m, a)) == a
        assert (a * inv_mod(m, a)) % p == 1


def test_inputs_reduced_mod_p():
    m = make_modulus(7)
    assert is_square(m, 9) is Squareness.SQUARE  # 9 = 2 mod 7
    assert sqrt_mod(m, 9) == 3
    assert inv_mod(m, 9) == 4


def test_primes_3_mod_4_range():
    assert primes_3_mod_4(7, 23) == [7, 11, 19, 23]
    assert primes_3_mod_4(3, 7) == [3, 7]
    assert primes_3_mod_4(24, 30) == []
