"""Exact integer and rational arithmetic.

Valuations, Kronecker symbols, square roots modulo primes, primality and a
budgeted factorizer (trial division followed by Brent's variant of Pollard rho).
Every function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

import gmpy2

from .errors import BudgetExceeded

Rational = Fraction
RationalLike = Union[int, Fraction, str]

DEFAULT_TRIAL_LIMIT = 10**6
DEFAULT_RHO_ITERATIONS = 10**7


def to_rational(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    return Fraction(x)


def format_rational(x: Fraction) -> str:
    """Serialize as ``"num/den"``; the denominator is always written."""
    x = to_rational(x)
    return f"{x.numerator}/{x.denominator}"


class _Infinity:
    """Tagged +infinity used as the valuation of zero.

    Compares greater than every integer and absorbs addition.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    __str__ = __repr__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("legendre_rank.INFINITY")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        if isinstance(other, (int, _Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__


INFINITY = _Infinity()
Valuation = Union[int, _Infinity]


# -- primality -------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981


def miller_rabin(n: int, bases=_MR_BASES) -> bool:
    """Strong probable-prime test to each of ``bases``."""
    if n < 2:
        return False
    for p in bases:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic below 3.3e24; BPSW plus Miller-Rabin witnesses above."""
    n = int(n)
    if n < 2:
        return False
    if not miller_rabin(n):
        return False
    if n < _MR_DETERMINISTIC_BOUND:
        return True
    return bool(gmpy2.is_bpsw_prp(n))


def _require_prime(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


# -- valuations ------------------------------------------------------------

def _vp_int(n: int, p: int) -> int:
    """v_p of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x, p: int) -> Valuation:
    """Unchecked valuation of an int or Fraction; ``INFINITY`` at zero."""
    if x == 0:
        return INFINITY
    if isinstance(x, Fraction):
        v = 0
        if x.numerator % p == 0:
            v += _vp_int(x.numerator, p)
        if x.denominator % p == 0:
            v -= _vp_int(x.denominator, p)
        return v
    return _vp_int(int(x), p)


def val_p(x: RationalLike, p: int) -> Valuation:
    """p-adic valuation of a rational; rejects non-prime ``p``."""
    _require_prime(p)
    return vp(to_rational(x), p)


# -- quadratic residues ----------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a | n), extending Jacobi to every nonzero n."""
    a, n = int(a), int(n)
    if n == 0:
        raise ValueError("Kronecker symbol undefined for n = 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    """Legendre symbol for an odd prime ``p`` (unchecked)."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_mod_prime(a: int, p: int):
    """Smallest r >= 0 with r^2 = a (mod p), or None for a non-residue."""
    _require_prime(p)
    if p == 2:
        raise ValueError("sqrt_mod_prime expects an odd prime")
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


def is_square(x: RationalLike) -> bool:
    """True iff ``x`` is the square of a rational."""
    x = to_rational(x)
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def rational_sqrt(x: Fraction):
    """Exact square root of a rational square, else None."""
    x = to_rational(x)
    if not is_square(x):
        return None
    return Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator))


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel of a nonzero rational's class in Q*/Q*^2.

    Accepts ints or Fractions; for a/b this is the kernel of a*b.
    """
    if isinstance(n, Fraction):
        n = n.numerator * n.denominator
    n = int(n)
    if n == 0:
        raise ValueError("zero has no square class")
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(abs(n)).factors:
        if e % 2:
            out *= p
    return sign * out


# -- factorization ---------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    """``sign * prod(p**e for p, e in factors)``, primes strictly increasing."""

    sign: int
    factors: tuple

    @property
    def primes(self) -> tuple:
        return tuple(p for p, _ in self.factors)

    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    def __str__(self):
        parts = [] if self.sign == 1 else ["-1"]
        parts += [str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors]
        return " * ".join(parts) or "1"


@lru_cache(maxsize=8)
def _primes_up_to(limit: int) -> tuple:
    if limit < 2:
        return ()
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def _brent_rho(n: int, budget: int, seed: int = 1):
    """Return (factor or None, iterations used)."""
    used = 0
    for c in range(seed, seed + 20):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                step = min(128, r - k)
                for _ in range(step):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                used += step
                g = math.gcd(q, n)
                k += step
                if used > budget:
                    return None, used
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                used += 1
        if 1 < g < n:
            return g, used
        budget -= used
        used = 0
        if budget <= 0:
            return None, used
    return None, used


def _split_large(n: int, budget: int, out: dict) -> int:
    """Factor n (> 1, no prime factor below the trial limit) into ``out``."""
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        root, exact = gmpy2.iroot(m, 2)
        if exact:
            stack += [int(root), int(root)]
            continue
        for k in (3, 5, 7):
            root, exact = gmpy2.iroot(m, k)
            if exact:
                stack += [int(root)] * k
                break
        else:
            g, used = _brent_rho(m, budget)
            budget -= used
            if g is None:
                raise BudgetExceeded(m)
            stack += [g, m // g]
    return budget


def factorize(
    n: int,
    trial_limit: int = DEFAULT_TRIAL_LIMIT,
    rho_iterations: int = DEFAULT_RHO_ITERATIONS,
) -> Factorization:
    """Complete factorization of a nonzero integer or ``BudgetExceeded``."""
    n = int(n)
    if n == 0:
        raise ValueError("cannot factor zero")
    sign = -1 if n < 0 else 1
    n = abs(n)
    found: dict = {}
    for i, p in enumerate(_primes_up_to(trial_limit)):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
        if i % 512 == 511 and is_prime(n):
            break
    if n > 1:
        if n <= trial_limit * trial_limit or is_prime(n):
            found[n] = found.get(n, 0) + 1
        else:
            _split_large(n, rho_iterations, found)
    return Factorization(sign, tuple(sorted(found.items())))


def prime_divisors(n: int) -> tuple:
    return factorize(n).primes


def squarefree_divisors(n: int, signed: bool = True) -> list:
    """All squarefree divisors of a nonzero integer, optionally with signs."""
    primes = prime_divisors(n)
    return squarefree_products(primes, signed)


def squarefree_products(primes, signed: bool = True) -> list:
    out = [1]
    for p in primes:
        out += [d * p for d in out]
    if signed:
        out += [-d for d in out]
    return sorted(out, key=lambda d: (abs(d), d))


def iter_primes(start: int = 2) -> Iterator[int]:
    n = max(2, start)
    while True:
        if is_prime(n):
            yield n
        n += 1


# -- p-adic square classes -------------------------------------------------

def qp_square_class(x, p: int) -> tuple:
    """Key of the class of a nonzero rational in Q_p*/Q_p*^2.

    ``p = 0`` means the real place and the key is the sign.
    """
    x = to_rational(x)
    if x == 0:
        raise ValueError("zero has no square class")
    if p == 0:
        return (1 if x > 0 else -1,)
    v = vp(x, p)
    u = x / Fraction(p) ** v
    if p == 2:
        unit = u.numerator * pow(u.denominator, -1, 8) % 8
        return (v % 2, unit)
    unit = legendre(u.numerator * u.denominator, p)
    return (v % 2, unit)


def is_qp_square(x, p: int) -> bool:
    """True iff the rational ``x`` is a square in Q_p (zero counts)."""
    x = to_rational(x)
    if x == 0:
        return True
    key = qp_square_class(x, p)
    if p == 0:
        return key == (1,)
    return key == (0, 1)
