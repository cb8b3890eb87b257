from hypothesis import assume, given, settings
from hypothesis import strategies as st

from legendre_rank.arith import (
    factorize,
    is_square,
    kronecker_symbol,
    legendre,
    sqrt_mod_prime,
    val_p,
)
from legendre_rank.pipelines import FibreRecord
from legendre_rank.weierstrass import (
    CurvePoint,
    Transform,
    WeierstrassModel,
    apply_transform,
    compute_invariants,
    point_add,
    point_multiply,
)

nonzero = st.integers(-10**12, 10**12).filter(bool)
rationals = st.fractions(max_denominator=10**6).filter(bool)
primes = st.sampled_from([2, 3, 5, 7, 11, 13, 31, 127, 8191])


@given(rationals, rationals, primes)
def test_valuation_is_additive(x, y, p):
    assert val_p(x * y, p) == val_p(x, p) + val_p(y, p)


@given(rationals, rationals, primes)
def test_valuation_ultrametric(x, y, p):
    assume(x + y != 0)
    assert val_p(x + y, p) >= min(val_p(x, p), val_p(y, p))


@given(nonzero)
def test_factorization_reconstructs(n):
    f = factorize(n)
    assert f.value() == n
    assert all(factorize(p).factors == ((p, 1),) for p in f.primes)


@given(st.integers(0, 10**6), st.sampled_from([3, 5, 7, 13, 31, 97, 8191, 131071]))
def test_sqrt_count(a, p):
    r = sqrt_mod_prime(a, p)
    expected_count = 1 + legendre(a, p)
    if r is None:
        assert expected_count == 0
    else:
        assert r * r % p == a % p
        assert len({r % p, -r % p}) == expected_count


@given(st.integers(-500, 500), st.integers(-500, 500), st.integers(1, 500))
def test_kronecker_multiplicative_in_numerator(a, b, n):
    assert kronecker_symbol(a * b, n) == kronecker_symbol(a, n) * kronecker_symbol(b, n)


@given(rationals)
def test_is_square_of_squares(x):
    assert is_square(x * x)


small = st.integers(-20, 20)
nz_rational = st.fractions(min_value=-10, max_value=10, max_denominator=10).filter(bool)


@settings(max_examples=60)
@given(small, small, small, small, small, nz_rational, st.fractions(max_denominator=5), small, small)
def test_transform_scaling_law(a1, a2, a3, a4, a6, u, r, s, t):
    try:
        W = WeierstrassModel(a1, a2, a3, a4, a6)
    except ValueError:
        return
    W2 = apply_transform(W, Transform(u, r, s, t))
    i1, i2 = compute_invariants(W), compute_invariants(W2)
    assert i2.discriminant == i1.discriminant / u**12
    assert i2.c4 == i1.c4 / u**4 and i2.c6 == i1.c6 / u**6
    assert i2.j == i1.j


E = WeierstrassModel(0, 0, 0, -25, 0)
P = CurvePoint(-4, 6)
T = CurvePoint(0, 0)
points = st.builds(
    lambda m, k: point_add(E, point_multiply(E, m, P), point_multiply(E, k, T)),
    st.integers(-4, 4),
    st.integers(0, 1),
)


@settings(max_examples=40, deadline=None)
@given(points, points, points)
def test_group_law_associative_and_commutative(A, B, C):
    assert point_add(E, A, B) == point_add(E, B, A)
    assert point_add(E, point_add(E, A, B), C) == point_add(E, A, point_add(E, B, C))


records = st.builds(
    FibreRecord,
    b=rationals,
    height=st.integers(1, 10**6),
    classification=st.sampled_from(["N-member", "J-member", "undecided", "singular", "skipped"]),
    model=st.just("0,33,0,32,0"),
    alpha=st.integers(0, 3),
    mu=st.integers(0, 5),
    bad_places=st.just(((2, "I2", "split-multiplicative"),)),
    root_number=st.sampled_from(["+1", "-1", "unsupported"]),
    lower=st.integers(0, 1),
    upper=st.integers(1, 3),
    note=st.text(max_size=20),
)


@given(records)
def test_fibre_records_round_trip(r):
    assert FibreRecord.from_dict(r.to_dict()) == r
