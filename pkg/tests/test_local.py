from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legendre_rank.arith import vp
from legendre_rank.errors import NotMultiplicative, SingularCurveError
from legendre_rank.local import (
    ADDITIVE,
    GOOD,
    LEGENDRE,
    NEUMANN_SETZER,
    NONSPLIT,
    SPLIT,
    Place,
    reduction_profile,
    split_multiplicative_test,
    surface_fibre_types,
    tate_reduce,
)
from legendre_rank.weierstrass import WeierstrassModel, apply_transform, compute_invariants

E5 = WeierstrassModel(0, 33, 0, 32, 0)


def test_e5_at_2_and_31():
    rd = tate_reduce(E5, Place.of_prime(2))
    assert (rd.kodaira, rd.disc_valuation, rd.reduction) == ("I2", 2, SPLIT)
    assert split_multiplicative_test(rd.minimal_model, Place.of_prime(2)) == "split"
    rd = tate_reduce(E5, Place.of_prime(31))
    assert (rd.kodaira, rd.reduction) == ("I2", NONSPLIT)
    assert split_multiplicative_test(E5, Place.of_prime(31)) == "nonsplit"


def test_split_test_examples():
    W = WeierstrassModel(0, 4, 0, 3, 0)  # x(x+1)(x+3)
    assert split_multiplicative_test(W, Place.of_prime(3)) == "split"
    with pytest.raises(NotMultiplicative):
        split_multiplicative_test(WeierstrassModel(0, 0, 0, -1, 0), Place.of_prime(2))


def test_x3_minus_x_is_additive_at_2():
    rd = tate_reduce(WeierstrassModel(0, 0, 0, -1, 0), Place.of_prime(2))
    assert rd.reduction == ADDITIVE and rd.kodaira == "III"


# Reference data for curves of small conductor (standard tables).
@pytest.mark.parametrize(
    "coeffs, p, kodaira, reduction",
    [
        ((0, -1, 1, -10, -20), 11, "I5", SPLIT),  # 11a1
        ((1, 0, 1, 4, -6), 2, "I6", NONSPLIT),  # 14a1
        ((1, 0, 1, 4, -6), 7, "I3", SPLIT),
        ((1, 1, 1, -10, -10), 3, "I4", NONSPLIT),  # 15a1
        ((1, 1, 1, -10, -10), 5, "I4", SPLIT),
        ((0, 0, 1, -1, 0), 37, "I1", NONSPLIT),  # 37a1
        ((0, 0, 1, 0, -7), 3, "IV*", ADDITIVE),  # 27a1
        ((0, 0, 0, 0, 1), 2, "IV", ADDITIVE),  # 36a1
        ((0, 0, 0, 0, 1), 3, "III", ADDITIVE),
        ((0, 1, 0, 4, 4), 2, "IV*", ADDITIVE),  # 20a1
        ((0, 1, 0, 4, 4), 5, "I2", NONSPLIT),
        ((0, -1, 0, -4, 4), 2, "I1*", ADDITIVE),  # 24a1
        ((0, -1, 0, -4, 4), 3, "I2", NONSPLIT),
    ],
)
def test_known_reduction_types(coeffs, p, kodaira, reduction):
    rd = tate_reduce(WeierstrassModel(*coeffs), Place.of_prime(p))
    assert (rd.kodaira, rd.reduction) == (kodaira, reduction)


def test_reduction_profiles():
    prof = reduction_profile(E5)
    assert prof.bad_primes == (2, 31) and (prof.additive, prof.multiplicative) == (0, 2)
    prof = reduction_profile(WeierstrassModel(0, 0, 0, -1, 0))
    assert (prof.additive, prof.multiplicative) == (1, 0)
    assert reduction_profile(WeierstrassModel(0, 3, 0, -16, 0)).bad_primes == (2, 73)
    assert prof.at(5).reduction == GOOD


def test_minimalization_removes_scaling():
    W = apply_transform(E5, Fraction(1, 4))  # discriminant times 2^24
    rd = tate_reduce(W, Place.of_prime(2))
    assert rd.disc_valuation == 2 and rd.kodaira == "I2"


def test_legendre_surface():
    sf = surface_fibre_types(LEGENDRE)
    got = {str(pl): (rd.kodaira, rd.reduction) for pl, rd in sf.fibres}
    assert got == {"t": ("I2", SPLIT), "t - 1": ("I2", NONSPLIT), "infinity": ("I2*", ADDITIVE)}
    assert sf.euler_total == 12
    assert [str(p) for p in sf.finite_places] == ["t", "t - 1"]


def test_neumann_setzer_surface():
    sf = surface_fibre_types(NEUMANN_SETZER)
    got = {str(pl): rd.kodaira for pl, rd in sf.fibres}
    assert got == {"t^2 + 64": "I1", "infinity": "I4*"}
    assert sf.euler_total == 12


def test_places_validate_input():
    with pytest.raises(ValueError):
        Place.of_prime(4)
    with pytest.raises(ValueError):
        Place.polynomial(1, 0, -1)  # t^2 - 1 is reducible
    assert str(Place.linear(-1)) == "t + 1"


# -- property tests --------------------------------------------------------

def _table_type(vc4, vc6, vd):
    """Kodaira type over Z_p, p >= 5, from valuations on a minimal model."""
    if vd == 0:
        return "I0"
    if vc4 == 0:
        return f"I{vd}"
    if vd >= 6 and vc4 == 2 and vc6 == 3:
        return "I0*" if vd == 6 else f"I{vd - 6}*"
    return {2: "II", 3: "III", 4: "IV", 6: "I0*", 8: "IV*", 9: "III*", 10: "II*"}[vd]


def _oracle(W, p):
    _, _, _, _, c4, c6, d, _ = compute_invariants(W)
    v4, v6, vd = vp(c4, p), vp(c6, p), vp(d, p)
    while v4 >= 4 and v6 >= 6 and vd >= 12:  # c4 = 0 or c6 = 0 count as infinite
        v4, v6, vd = v4 - 4, v6 - 6, vd - 12
    v4 = 99 if c4 == 0 else v4
    v6 = 99 if c6 == 0 else v6
    return _table_type(v4, v6, vd), vd


coeff = st.integers(min_value=-30, max_value=30)


@settings(max_examples=150, deadline=None)
@given(a1=coeff, a2=coeff, a3=coeff, a4=coeff, a6=coeff, p=st.sampled_from([5, 7, 11, 13]), k=st.integers(0, 2))
def test_tate_matches_table_for_large_primes(a1, a2, a3, a4, a6, p, k):
    try:
        W = WeierstrassModel(a1, a2, a3, a4, a6)
    except SingularCurveError:
        return
    W = apply_transform(W, Fraction(1, p**k))
    rd = tate_reduce(W, Place.of_prime(p))
    kodaira, vd = _oracle(W, p)
    assert (rd.kodaira, rd.disc_valuation) == (kodaira, vd)


@settings(max_examples=80, deadline=None)
@given(a1=coeff, a2=coeff, a3=coeff, a4=coeff, a6=coeff, p=st.sampled_from([2, 3, 5, 7]))
def test_tate_is_idempotent(a1, a2, a3, a4, a6, p):
    try:
        W = WeierstrassModel(a1, a2, a3, a4, a6)
    except SingularCurveError:
        return
    rd = tate_reduce(W, Place.of_prime(p))
    again = tate_reduce(rd.minimal_model, Place.of_prime(p))
    assert (again.kodaira, again.disc_valuation) == (rd.kodaira, rd.disc_valuation)
    if rd.is_multiplicative:
        assert int(rd.kodaira[1:]) == rd.disc_valuation
        assert vp(compute_invariants(rd.minimal_model).c4, p) == 0


@settings(max_examples=80, deadline=None)
@given(a=st.integers(-40, 40), b=st.integers(-40, 40), p=st.sampled_from([3, 5, 7, 11, 13, 17]))
def test_split_test_agrees_with_tangent_cone(a, b, p):
    # y^2 = x^3 + a x^2 + b x with a node at (0, 0) mod p: tangent cone y^2 = a x^2
    if b == 0 or b % p or a % p == 0 or a * a - 4 * b == 0:
        return
    W = WeierstrassModel(0, a, 0, b, 0)
    rd = tate_reduce(W, Place.of_prime(p))
    if not rd.is_multiplicative:
        return
    from legendre_rank.arith import kronecker_symbol

    # the node sits at x = 0 only when the other roots are nonzero mod p
    if (a * a - 4 * b) % p == 0:
        return
    expected = "split" if kronecker_symbol(a, p) == 1 else "nonsplit"
    assert split_multiplicative_test(W, Place.of_prime(p)) == expected
