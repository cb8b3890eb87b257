"""Lucas-Lehmer testing and the expected count of Mersenne primes."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional

from .arith import is_prime, miller_rabin
from .errors import CompositeExponent

PRIME = "prime"
COMPOSITE = "composite"
EULER_GAMMA = 0.5772156649015329

_WITNESS_LIMIT = 29  # composites up to this exponent get an explicit factor


def mod_mersenne(n: int, q: int) -> int:
    """n mod 2^q - 1 for n >= 0, by folding the high bits onto the low ones."""
    m = (1 << q) - 1
    while n > m:
        n = (n & m) + (n >> q)
    return 0 if n == m else n


@dataclass(frozen=True)
class MersenneResult:
    q: int
    M: int
    verdict: str
    checksum: str  # sha256 over the residue sequence, first 16 hex digits
    confirmed: bool  # independent re-test agrees with the verdict
    factor: Optional[int] = None  # a proper factor, for small composite cases

    @property
    def is_prime(self) -> bool:
        return self.verdict == PRIME


def _smallest_factor(M: int, q: int) -> Optional[int]:
    # every prime factor of 2^q - 1 is 2kq + 1
    d = 2 * q + 1
    while d * d <= M:
        if M % d == 0:
            return d
        d += 2 * q
    return None


def lucas_lehmer(q: int) -> MersenneResult:
    if not is_prime(q):
        raise CompositeExponent(f"exponent {q} is not prime")
    M = (1 << q) - 1
    h = hashlib.sha256()
    if q == 2:
        verdict = PRIME
        h.update(b"3")
    else:
        s = 4
        nbytes = (q + 7) // 8
        for _ in range(q - 2):
            s = mod_mersenne(s * s + M - 2, q)
            h.update(s.to_bytes(nbytes, "big"))
        verdict = PRIME if s == 0 else COMPOSITE
    factor = None
    if verdict == PRIME:
        confirmed = miller_rabin(M)
    else:
        confirmed = not miller_rabin(M)
        if q <= _WITNESS_LIMIT:
            factor = _smallest_factor(M, q)
            confirmed = confirmed and factor is not None and 1 < factor < M
    return MersenneResult(q, M, verdict, h.hexdigest()[:16], confirmed, factor)


def mersenne_exponents(limit: int) -> list:
    """Prime q <= limit with 2^q - 1 prime, ascending."""
    return [q for q in range(2, limit + 1) if is_prime(q) and lucas_lehmer(q).is_prime]


def wagstaff_estimate(log2_x: float, base: str = "e") -> float:
    """Expected number of Mersenne exponents q with 2^q - 1 <= x, x = 2^log2_x.

    ``base="e"`` evaluates (e^gamma / ln 2) * ln ln x. ``base="2"`` reads
    both logarithms in base 2, giving e^gamma * log2 log2 x.
    """
    if base not in ("e", "2"):
        raise ValueError(f"unsupported log base {base!r}")
    ln_x = log2_x * math.log(2)
    if not ln_x > 1:
        raise ValueError("estimate needs x > e")
    if base == "e":
        return math.exp(EULER_GAMMA) / math.log(2) * math.log(ln_x)
    return math.exp(EULER_GAMMA) * math.log2(log2_x)
