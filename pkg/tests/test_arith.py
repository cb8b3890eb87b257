from fractions import Fraction

import pytest
import sympy

from legendre_rank.arith import (
    INFINITY,
    factorize,
    format_rational,
    is_prime,
    is_qp_square,
    is_square,
    kronecker_symbol,
    qp_square_class,
    sqrt_mod_prime,
    squarefree_divisors,
    squarefree_part,
    to_rational,
    val_p,
)
from legendre_rank.errors import BudgetExceeded


def test_rationals_are_normalized():
    x = to_rational("-6/4")
    assert (x.numerator, x.denominator) == (-3, 2)
    assert format_rational(Fraction(0)) == "0/1"
    assert format_rational(5) == "5/1"


@pytest.mark.parametrize(
    "x, p, expected",
    [(15745024, 2, 14), (Fraction(3, 4), 2, -2), (0, 7, INFINITY), (15745024, 31, 2), ("-50/7", 5, 2)],
)
def test_val_p(x, p, expected):
    assert val_p(x, p) == expected


def test_val_p_rejects_composite_modulus():
    with pytest.raises(ValueError):
        val_p(12, 4)


def test_infinity_sentinel_orders_above_integers():
    assert INFINITY > 10**100 and not INFINITY < 3
    assert INFINITY + 5 == INFINITY


@pytest.mark.parametrize("a, n, expected", [(-1, 31, -1), (2, 7, 1), (21, 7, 0), (2, 15, 1), (3, -8, -1)])
def test_kronecker(a, n, expected):
    assert kronecker_symbol(a, n) == expected


def test_kronecker_matches_sympy_jacobi_for_odd_moduli():
    for n in range(1, 60, 2):
        for a in range(-20, 20):
            assert kronecker_symbol(a, n) == sympy.jacobi_symbol(a, n)


def test_kronecker_rejects_zero_modulus():
    with pytest.raises(ValueError):
        kronecker_symbol(3, 0)


@pytest.mark.parametrize("a, p, expected", [(2, 7, 3), (-1, 31, None), (0, 5, 0)])
def test_sqrt_mod_prime_examples(a, p, expected):
    assert sqrt_mod_prime(a, p) == expected


def test_sqrt_mod_prime_against_brute_force():
    for p in (3, 5, 13, 17, 41, 97, 113):
        for a in range(p):
            roots = [x for x in range(p) if x * x % p == a]
            r = sqrt_mod_prime(a, p)
            assert r == (min(roots) if roots else None)


def test_factorize_examples():
    assert str(factorize(2047)) == "23 * 89"
    f = factorize(-12)
    assert f.sign == -1 and f.factors == ((2, 2), (3, 1))
    assert factorize(2**14 * 31**2).factors == ((2, 14), (31, 2))


def test_factorize_large_semiprime_via_rho():
    n = (2**31 - 1) * 1000000007 * 998244353
    assert factorize(n).factors == tuple(sorted(sympy.factorint(n).items()))


def test_factorize_budget_exceeded_reports_cofactor():
    n = 1000003 * 1000033
    with pytest.raises(BudgetExceeded) as info:
        factorize(n, trial_limit=100, rho_iterations=1)
    assert info.value.cofactor == n


def test_factorize_rejects_zero():
    with pytest.raises(ValueError):
        factorize(0)


@pytest.mark.parametrize("x, expected", [(Fraction(49, 9), True), (-4, False), (0, True), (Fraction(2, 9), False)])
def test_is_square(x, expected):
    assert is_square(x) is expected


def test_is_prime_against_sympy():
    for n in list(range(-5, 3000)) + [2**61 - 1, 2**89 - 1, 2**67 - 1, 3317044064679887385961981]:
        assert is_prime(n) == sympy.isprime(n)


def test_squarefree_helpers():
    assert squarefree_part(-72) == -2
    assert squarefree_part(Fraction(3, 12)) == 1
    assert squarefree_divisors(12) == [-1, 1, -2, 2, -3, 3, -6, 6]


def test_qp_square_classes():
    assert is_qp_square(17, 2) and not is_qp_square(5, 2)
    assert is_qp_square(Fraction(1, 4), 3) and not is_qp_square(3, 3)
    assert is_qp_square(-1, 5) and not is_qp_square(-1, 7)
    assert qp_square_class(-3, 0) == (-1,)
    # the 8 classes of Q_2*/Q_2*^2
    classes = {qp_square_class(x, 2) for x in (1, 3, 5, 7, 2, 6, 10, 14)}
    assert len(classes) == 8
