"""Long Weierstrass models, the group law, torsion and naive point search.

Coefficients are normally ``Fraction``; the same code paths accept elements
of any exact field supporting ``+ - * /`` (the Tate algorithm feeds rational
functions in t through ``apply_transform`` and ``compute_invariants``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .arith import factorize, is_prime, legendre, to_rational
from .errors import SingularCurveError, SingularFibre


def _coerce(x):
    if isinstance(x, (int, str, Fraction)) and not isinstance(x, bool):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class WeierstrassModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with nonzero discriminant."""

    a1: Fraction = Fraction(0)
    a2: Fraction = Fraction(0)
    a3: Fraction = Fraction(0)
    a4: Fraction = Fraction(0)
    a6: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))
        if _discriminant(self.coefficients) == 0:
            raise SingularCurveError(f"singular Weierstrass model {self.coefficients}")

    @classmethod
    def from_coefficients(cls, coeffs) -> "WeierstrassModel":
        coeffs = list(coeffs)
        if len(coeffs) == 2:
            coeffs = [0, 0, 0] + coeffs[:1] + coeffs[1:]
        if len(coeffs) != 5:
            raise ValueError("expected [a4, a6] or [a1, a2, a3, a4, a6]")
        return cls(*coeffs)

    @classmethod
    def parse(cls, text: str) -> "WeierstrassModel":
        """Parse ``"a1,a2,a3,a4,a6"`` with integer or ``p/q`` entries."""
        parts = [s.strip() for s in text.strip().strip("[]").split(",")]
        return cls.from_coefficients([Fraction(s) for s in parts])

    @property
    def coefficients(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def serialize(self) -> str:
        return ",".join(str(c) for c in self.coefficients)

    def is_integral(self) -> bool:
        return all(isinstance(c, Fraction) and c.denominator == 1 for c in self.coefficients)

    def contains(self, P: "CurvePoint") -> bool:
        if P.is_infinity:
            return True
        a1, a2, a3, a4, a6 = self.coefficients
        x, y = P.x, P.y
        return y * y + a1 * x * y + a3 * y == x**3 + a2 * x * x + a4 * x + a6

    def __str__(self):
        return f"[{self.serialize()}]"


class Invariants(NamedTuple):
    b2: Fraction
    b4: Fraction
    b6: Fraction
    b8: Fraction
    c4: Fraction
    c6: Fraction
    discriminant: Fraction
    j: Fraction


def _b_invariants(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _discriminant(a):
    b2, b4, b6, b8 = _b_invariants(a)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def invariants_of(a) -> tuple:
    """(b2, b4, b6, b8, c4, c6, disc) of a raw coefficient tuple."""
    b2, b4, b6, b8 = _b_invariants(a)
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return b2, b4, b6, b8, c4, c6, disc


def compute_invariants(W: WeierstrassModel) -> Invariants:
    b2, b4, b6, b8, c4, c6, disc = invariants_of(W.coefficients)
    if disc == 0:
        raise SingularCurveError("discriminant vanishes")
    return Invariants(b2, b4, b6, b8, c4, c6, disc, c4**3 / disc)


# -- changes of variables --------------------------------------------------

@dataclass(frozen=True)
class Transform:
    """x = u^2 x' + r,  y = u^3 y' + s u^2 x' + t."""

    u: object = Fraction(1)
    r: object = Fraction(0)
    s: object = Fraction(0)
    t: object = Fraction(0)

    def __post_init__(self):
        for name in ("u", "r", "s", "t"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))
        if self.u == 0:
            raise ValueError("u must be nonzero")

    def compose(self, other: "Transform") -> "Transform":
        """Apply ``self`` first, then ``other``."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return Transform(
            u1 * u2,
            r1 + u1 * u1 * r2,
            s1 + u1 * s2,
            t1 + u1 * u1 * s1 * r2 + u1**3 * t2,
        )

    def inverse(self) -> "Transform":
        u, r, s, t = self.u, self.r, self.s, self.t
        return Transform(1 / u, -r / (u * u), -s / u, (r * s - t) / u**3)

    def map_point(self, P: "CurvePoint") -> "CurvePoint":
        """Old coordinates -> new coordinates."""
        if P.is_infinity:
            return P
        u, r, s, t = self.u, self.r, self.s, self.t
        xn = (P.x - r) / (u * u)
        yn = (P.y - s * (P.x - r) - t) / u**3
        return CurvePoint(xn, yn)


def transform_coefficients(a, u, r, s, t) -> tuple:
    a1, a2, a3, a4, a6 = a
    n1 = (a1 + 2 * s) / u
    n2 = (a2 - s * a1 + 3 * r - s * s) / u**2
    n3 = (a3 + r * a1 + 2 * t) / u**3
    n4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4
    n6 = (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6
    return n1, n2, n3, n4, n6


def apply_transform(W: WeierstrassModel, u=1, r=0, s=0, t=0) -> WeierstrassModel:
    """Model in the new coordinates; discriminant scales by u^-12."""
    if isinstance(u, Transform):
        u, r, s, t = u.u, u.r, u.s, u.t
    u, r, s, t = (_coerce(v) for v in (u, r, s, t))
    if u == 0:
        raise ValueError("u must be nonzero")
    return WeierstrassModel(*transform_coefficients(W.coefficients, u, r, s, t))


def integral_transform(W: WeierstrassModel) -> Transform:
    """Scaling x -> x/u^2 with u = 1/k, k the least integer making W integral."""
    k = 1
    for i, a in zip((1, 2, 3, 4, 6), W.coefficients):
        d = a.denominator
        # smallest k with d | k^i
        for p, e in factorize(d).factors if d > 1 else ():
            need = -(-e // i)
            have = 0
            kk = k
            while kk % p == 0:
                kk //= p
                have += 1
            if have < need:
                k *= p ** (need - have)
    return Transform(Fraction(1, k))


def integral_model(W: WeierstrassModel) -> WeierstrassModel:
    return apply_transform(W, integral_transform(W))


# -- points ----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class CurvePoint:
    """Affine point (x, y), or the point at infinity when both are None."""

    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("give both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", to_rational(self.x))
            object.__setattr__(self, "y", to_rational(self.y))

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls()

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def sort_key(self):
        return (0,) if self.is_infinity else (1, self.x, self.y)

    def __str__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


O = CurvePoint.infinity()


def _check_on(W, *points):
    for P in points:
        if not W.contains(P):
            raise ValueError(f"{P} is not on {W}")


def point_negate(W: WeierstrassModel, P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    return CurvePoint(P.x, -P.y - W.a1 * P.x - W.a3)


def _add(W, P, Q):
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    a1, a2, a3, a4, a6 = W.coefficients
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return O
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
        nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return CurvePoint(x3, y3)


def point_add(W: WeierstrassModel, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Chord-tangent sum; rejects points off the curve."""
    _check_on(W, P, Q)
    return _add(W, P, Q)


def point_multiply(W: WeierstrassModel, n: int, P: CurvePoint) -> CurvePoint:
    _check_on(W, P)
    if n < 0:
        return point_multiply(W, -n, point_negate(W, P))
    out, base = O, P
    while n:
        if n & 1:
            out = _add(W, out, base)
        base = _add(W, base, base)
        n >>= 1
    return out


def point_order(W: WeierstrassModel, P: CurvePoint, cap: int = 12):
    """Order of P if at most ``cap``, else None."""
    Q = P
    for n in range(1, cap + 1):
        if Q.is_infinity:
            return n
        Q = _add(W, Q, P)
    return None


# -- integer roots ---------------------------------------------------------

def _cubic(a, b, c, x):
    return ((x + a) * x + b) * x + c


def _bisect_root(a, b, c, lo, hi):
    """Integer root of a monotone cubic piece on [lo, hi], if any."""
    flo, fhi = _cubic(a, b, c, lo), _cubic(a, b, c, hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo < 0) == (fhi < 0):
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        fm = _cubic(a, b, c, mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    return None


def integer_roots_cubic(a: int, b: int, c: int) -> list:
    """Integer roots of x^3 + a x^2 + b x + c, exactly.

    The real critical points (-a +- sqrt(a^2 - 3b))/3 are bracketed by
    consecutive integers; the cubic is monotone between brackets, and each
    monotone piece is searched by integer bisection.
    """
    a, b, c = int(a), int(b), int(c)
    bound = 1 + max(abs(a), abs(b), abs(c))
    D = a * a - 3 * b
    cuts = [-bound]
    if D > 0:
        r = math.isqrt(D)
        if r * r == D:
            lo_minus, lo_plus = (-a - r) // 3, (-a + r) // 3
        else:
            lo_minus, lo_plus = (-a - r - 1) // 3, (-a + r) // 3
        cuts += [lo_minus, lo_minus + 1, lo_plus, lo_plus + 1]
    cuts.append(bound)
    cuts = sorted(set(min(max(x, -bound), bound) for x in cuts))
    roots = set()
    for lo, hi in zip(cuts, cuts[1:]):
        r = _bisect_root(a, b, c, lo, hi)
        if r is not None:
            roots.add(r)
    for x in cuts:
        if _cubic(a, b, c, x) == 0:
            roots.add(x)
    return sorted(roots)


def rational_roots_monic_cubic(A2, A1, A0) -> list:
    """Rational roots of x^3 + A2 x^2 + A1 x + A0 with rational coefficients."""
    A2, A1, A0 = (to_rational(c) for c in (A2, A1, A0))
    d = math.lcm(A2.denominator, A1.denominator, A0.denominator)
    # scale x = X/d: X^3 + d A2 X^2 + d^2 A1 X + d^3 A0
    roots = integer_roots_cubic(int(d * A2), int(d * d * A1), int(d**3 * A0))
    return [Fraction(r, d) for r in roots]


def two_torsion_points(W: WeierstrassModel) -> list:
    """Rational points of exact order 2."""
    b2, b4, b6, *_ = invariants_of(W.coefficients)
    # 4x^3 + b2 x^2 + 2 b4 x + b6 = 0 <=> x^3 + b2/4 x^2 + b4/2 x + b6/4 = 0
    out = []
    for x in rational_roots_monic_cubic(b2 / 4, b4 / 2, b6 / 4):
        out.append(CurvePoint(x, -(W.a1 * x + W.a3) / 2))
    return sorted(out, key=CurvePoint.sort_key)


# -- torsion ---------------------------------------------------------------

class TorsionStructure(NamedTuple):
    shape: tuple  # invariant factors, e.g. (2, 2) or (6,) or () for trivial
    generators: tuple
    points: tuple

    @property
    def order(self) -> int:
        return len(self.points)

    def label(self) -> str:
        if not self.shape:
            return "trivial"
        return " x ".join(f"Z/{n}" for n in self.shape)


def short_weierstrass_transform(W: WeierstrassModel) -> Transform:
    """Transform taking W to y^2 = x^3 - 27 c4 x - 54 c6."""
    b2 = W.a1 * W.a1 + 4 * W.a2
    first = Transform(1, 0, -W.a1 / 2, -W.a3 / 2)
    second = Transform(1, -b2 / 12, 0, 0)
    return first.compose(second).compose(Transform(Fraction(1, 6)))


def _count_points_mod_p(A: int, B: int, p: int) -> int:
    total = p + 1
    for x in range(p):
        total += legendre(x**3 + A * x + B, p)
    return total


def torsion_structure(W: WeierstrassModel) -> TorsionStructure:
    """Rational torsion subgroup by Lutz-Nagell on the integral short model.

    Candidates are integral points with y = 0 or y^2 | 4A^3 + 27B^2; orders
    are computed explicitly with Mazur's cap of 12. The group order is then
    checked to divide #E(F_p) for two good primes p >= 5.
    """
    if not W.is_integral():
        raise ValueError("torsion_structure expects an integral model")
    T = short_weierstrass_transform(W)
    S = apply_transform(W, T)
    A, B = int(S.a4), int(S.a6)
    D = 4 * A**3 + 27 * B * B
    ys = [1]
    for p, e in factorize(abs(D)).factors:
        ys = [y * p**k for y in ys for k in range(e // 2 + 1)]
    candidates = set()
    for y in [0] + sorted(ys):
        for x in integer_roots_cubic(0, A, B - y * y):
            candidates.add(CurvePoint(x, y))
            candidates.add(CurvePoint(x, -y))
    torsion = {O}
    for P in candidates:
        if point_order(S, P) is not None:
            torsion.add(P)
    n = len(torsion)
    checked = 0
    p = 5
    while checked < 2:
        if is_prime(p) and D % p != 0:
            if _count_points_mod_p(A, B, p) % n:
                raise AssertionError(f"torsion order {n} does not divide #E(F_{p})")
            checked += 1
        p += 1
    inv = T.inverse()
    torsion = {inv.map_point(P) for P in torsion}
    orders = {P: point_order(W, P) for P in torsion}
    two_tors = [P for P in torsion if orders[P] == 2]
    if n == 1:
        shape, gens = (), ()
    elif len(two_tors) == 3:
        m = n // 2
        P = min((Q for Q in torsion if orders[Q] == m), key=_small_first)
        span = {point_multiply(W, k, P) for k in range(m)}
        Q = min((R for R in two_tors if R not in span), key=_small_first)
        shape, gens = (2, m), (Q, P)
    else:
        P = min((Q for Q in torsion if orders[Q] == n), key=_small_first)
        shape, gens = (n,), (P,)
    if shape == (2, 2):
        gens = tuple(sorted(gens, key=_small_first))
    return TorsionStructure(shape, gens, tuple(sorted(torsion, key=CurvePoint.sort_key)))


def _small_first(P: CurvePoint):
    # generators are the points with smallest coordinates in the given model
    return (abs(P.x), -P.x, abs(P.y), -P.y)


# -- point search ----------------------------------------------------------

_SQUARES_MOD = {m: frozenset(i * i % m for i in range(m)) for m in (64, 63, 65, 11)}


def _maybe_square(n: int) -> bool:
    for m, sq in _SQUARES_MOD.items():
        if n % m not in sq:
            return False
    return True


def naive_point_search(W: WeierstrassModel, H: int) -> list:
    """All affine points with x = m/e^2, |m| <= H, 1 <= e^2 <= H.

    Works on the 2-division form 4x^3 + b2 x^2 + 2 b4 x + b6 so that each
    candidate costs one integer square test. Results are sorted.
    """
    if not W.is_integral():
        raise ValueError("naive_point_search expects an integral model")
    H = int(H)
    b2, b4, b6, *_ = (int(v) for v in invariants_of(W.coefficients)[:3])
    a1, a3 = W.a1, W.a3
    found = set()
    for e in range(1, math.isqrt(H) + 1):
        e2 = e * e
        c2, c1, c0 = b2 * e2, 2 * b4 * e2 * e2, b6 * e2**3
        e3 = e2 * e
        for m in range(-H, H + 1):
            if e > 1 and math.gcd(m, e) != 1:
                continue
            N = ((4 * m + c2) * m + c1) * m + c0
            if N < 0 or not _maybe_square(N):
                continue
            s = math.isqrt(N)
            if s * s != N:
                continue
            x = Fraction(m, e2)
            base = -(a1 * x + a3)
            for y in {(base + Fraction(s, e3)) / 2, (base - Fraction(s, e3)) / 2}:
                found.add(CurvePoint(x, y))
    return sorted(found, key=CurvePoint.sort_key)


# -- the two families ------------------------------------------------------

def legendre_surface_model(b) -> WeierstrassModel:
    """y^2 = x(x+1)(x+b) before clearing denominators."""
    b = to_rational(b)
    if b in (0, 1):
        raise SingularFibre(f"the Legendre fibre at t={b} is singular")
    return WeierstrassModel(0, 1 + b, 0, b, 0)


def legendre_clearing_transform(b) -> Transform:
    """x = X/n^2, y = Y/n^3 for b = m/n in lowest terms."""
    b = to_rational(b)
    return Transform(Fraction(1, b.denominator))


def fibre_model_legendre(b) -> WeierstrassModel:
    """Integral model Y^2 = X(X+n^2)(X+mn) of the Legendre fibre at t = m/n.

    Obtained from ``legendre_surface_model(b)`` by
    ``legendre_clearing_transform(b)``.
    """
    b = to_rational(b)
    if b in (0, 1):
        raise SingularFibre(f"the Legendre fibre at t={b} is singular")
    m, n = b.numerator, b.denominator
    return WeierstrassModel(0, n * n + m * n, 0, m * n**3, 0)


def fibre_model_neumann_setzer(b: int) -> WeierstrassModel:
    """y^2 = x^3 + b x^2 - 16 x."""
    return WeierstrassModel(0, int(b), 0, -16, 0)


def mersenne_fibre(q: int) -> WeierstrassModel:
    """E_q : y^2 = x(x+1)(x+2^q)."""
    return fibre_model_legendre(2**q)
