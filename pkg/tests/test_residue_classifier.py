import pytest

from padic_gibbs.errors import NonResidue, ZeroCoupling, ZeroResidue
from padic_gibbs.residue_classifier import (
    Reason,
    euler_is_qr,
    is_probable_prime,
    is_square_mod,
    minus_three_is_square,
    periodic_condition,
    sqrt_mod,
    ti_condition,
)

from conftest import primes_below

ODD_PRIMES_500 = [p for p in primes_below(500) if p > 2]


def squares(p):
    return {x * x % p for x in range(p)}


def brute_ti_count(p, J):
    """Count from the congruence description, by enumeration only."""
    if J < 0:
        return 3
    if p in (2, 3, 5):
        return 1
    sq = squares(p)
    roots = [x for x in range(p) if x * x % p == 5 % p]
    if not roots:
        return 1
    x0 = roots[0]
    return 3 if (2 * x0 - 6) % p in sq else 1


def brute_periodic_count(p, J):
    if J > 0:
        return 0 if p == 2 else (2 if p - 1 in squares(p) else 0)
    if p in (2, 3):
        return 0
    roots = [x for x in range(p) if (x * x + 3) % p == 0]
    if not roots:
        return 0
    return 2 if (2 * roots[0] - 2) % p in squares(p) else 0


def test_primality_against_sieve():
    small = set(primes_below(5000))
    assert all(is_probable_prime(n) == (n in small) for n in range(5000))
    assert is_probable_prime(2**61 - 1)
    assert not is_probable_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


@pytest.mark.parametrize("a, p, expected", [(4, 5, True), (5, 11, True), (-3, 19, True),
                                            (2, 11, False)])
def test_euler_examples(a, p, expected):
    assert euler_is_qr(a, p) is expected


def test_euler_matches_enumeration():
    for p in [q for q in primes_below(200) if q > 2]:
        sq = squares(p)
        for a in range(1, p):
            assert euler_is_qr(a, p) == (a in sq)


def test_euler_rejects_multiples_of_p():
    with pytest.raises(ZeroResidue):
        euler_is_qr(22, 11)


@pytest.mark.parametrize("a, p, root", [(5, 11, 4), (-3, 7, 2), (-1, 13, 5)])
def test_sqrt_mod_examples(a, p, root):
    r = sqrt_mod(a, p)
    assert r == root and r.modulus == p


def test_sqrt_mod_is_smaller_root():
    for p in ODD_PRIMES_500[:40]:
        for a in sorted(squares(p) - {0}):
            r = sqrt_mod(a, p)
            assert r * r % p == a and r <= p - r


def test_sqrt_mod_non_residue():
    with pytest.raises(NonResidue):
        sqrt_mod(2, 11)


def test_zero_counts_as_square():
    assert is_square_mod(0, 7) and is_square_mod(14, 7)


def test_minus_three():
    assert not minus_three_is_square(2)
    assert not minus_three_is_square(3)
    assert minus_three_is_square(7) and minus_three_is_square(19)
    assert not minus_three_is_square(11)


@pytest.mark.parametrize("p, J, count", [(3, 1, 1), (29, 1, 3), (11, 1, 1), (7, -2, 3)])
def test_ti_examples(p, J, count):
    assert ti_condition(p, J).count == count


def test_ti_witnesses_for_29():
    v = ti_condition(29, 1)
    assert v.reason is Reason.CONGRUENCE_SOLVABLE
    assert v.witnesses["x0"] == 11 and v.witnesses["x"] ** 2 % 29 == 16


@pytest.mark.parametrize("p, J, count", [(5, 1, 2), (2, 3, 0), (7, -1, 2), (11, -1, 0)])
def test_periodic_examples(p, J, count):
    assert periodic_condition(p, J).count == count


def test_zero_coupling():
    with pytest.raises(ZeroCoupling):
        ti_condition(7, 0)
    with pytest.raises(ZeroCoupling):
        periodic_condition(7, 0)


def test_counts_against_enumeration():
    for p in primes_below(500):
        for J in (-1, 1):
            assert ti_condition(p, J).count == brute_ti_count(p, J), (p, J)
            assert periodic_condition(p, J).count == brute_periodic_count(p, J), (p, J)


def test_ti_root_independence():
    for p in [q for q in ODD_PRIMES_500 if q > 7]:
        if not euler_is_qr(5, p):
            continue
        x0 = sqrt_mod(5, p)
        half = pow(2, -1, p)
        assert (x0 - 3) * half * (-x0 - 3) * half % p == 1
        assert ti_condition(p, 1, root=x0).count == ti_condition(p, 1, root=p - x0).count


def test_periodic_root_independence():
    for p in [q for q in ODD_PRIMES_500 if q > 7]:
        if not euler_is_qr(-3, p):
            continue
        x0 = sqrt_mod(-3, p)
        half = pow(2, -1, p)
        assert (x0 - 1) * half * (-x0 - 1) * half % p == 1
        assert (periodic_condition(p, -1, root=x0).count
                == periodic_condition(p, -1, root=p - x0).count)


def test_periodic_count_is_zero_or_two():
    for p in primes_below(500):
        for J in (-3, -1, 1, 3):
            assert periodic_condition(p, J).count in (0, 2)


def test_verdict_serialization():
    d = ti_condition(29, 1).to_dict()
    assert d == {"count": 3, "reason": "CongruenceSolvable",
                 "witnesses": {"x": d["witnesses"]["x"], "x0": 11}}
