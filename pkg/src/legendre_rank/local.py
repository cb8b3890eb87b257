"""Tate's algorithm over a discrete valuation ring.

One implementation serves two kinds of DVR:

* ``Z_(p)`` for a rational prime p (residue field F_p, including p = 2, 3);
* ``Q[t]_(pi)`` for a monic irreducible pi in Q[t] (residue field Q[t]/(pi)),
  with the place at infinity reached through t = 1/s on a cleared model.

Only the residue-field operations Tate's algorithm actually needs are
exposed by a DVR: reduction, inverses, p-th roots in characteristic p, and
whether a monic quadratic splits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from sympy import QQ
from sympy.polys.fields import field as _sympy_field

from .arith import (
    INFINITY,
    factorize,
    is_prime,
    is_square,
    kronecker_symbol,
    rational_sqrt,
    vp,
)
from .errors import NotMultiplicative, SingularCurveError
from .weierstrass import (
    WeierstrassModel,
    integral_model,
    invariants_of,
    transform_coefficients,
)

GOOD = "good"
SPLIT = "split-multiplicative"
NONSPLIT = "nonsplit-multiplicative"
ADDITIVE = "additive"

# Q(t) used for every function-field computation; t also names s = 1/t.
QT, T = _sympy_field("t", QQ)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


# -- places ----------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A rational prime (``prime``), a monic irreducible polynomial in t
    (``poly``, coefficients highest degree first), or infinity."""

    prime: Optional[int] = None
    poly: Optional[tuple] = None
    infinite: bool = False

    def __post_init__(self):
        kinds = (self.prime is not None) + (self.poly is not None) + bool(self.infinite)
        if kinds != 1:
            raise ValueError("a place is exactly one of: prime, polynomial, infinity")
        if self.prime is not None and not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if self.poly is not None:
            coeffs = tuple(Fraction(c) for c in self.poly)
            if not coeffs or coeffs[0] != 1 or len(coeffs) < 2:
                raise ValueError("function-field places are monic of degree >= 1")
            object.__setattr__(self, "poly", coeffs)
            _, facs = self.element().numer.factor_list()
            if len(facs) != 1 or facs[0][1] != 1:
                raise ValueError(f"{self} is not irreducible over Q")

    @classmethod
    def of_prime(cls, p: int) -> "Place":
        return cls(prime=int(p))

    @classmethod
    def polynomial(cls, *coeffs) -> "Place":
        return cls(poly=tuple(coeffs))

    @classmethod
    def at_infinity(cls) -> "Place":
        return cls(infinite=True)

    @classmethod
    def linear(cls, c) -> "Place":
        """The place t - c."""
        return cls(poly=(1, -Fraction(c)))

    @property
    def degree(self) -> int:
        if self.poly is not None:
            return len(self.poly) - 1
        return 1

    def element(self):
        if self.poly is None:
            raise ValueError("not a polynomial place")
        out = QT(0)
        for c in self.poly:
            out = out * T + QT(QQ(c.numerator, c.denominator))
        return out

    def __str__(self):
        if self.prime is not None:
            return str(self.prime)
        if self.infinite:
            return "infinity"
        return str(self.element().numer.as_expr()).replace("**", "^")


# -- DVRs ------------------------------------------------------------------

class PAdicDVR:
    """Z localized at a prime p, elements are Fractions."""

    def __init__(self, p: int):
        self.p = p
        self.char = p
        self.pi = Fraction(p)

    def val(self, x):
        return vp(x, self.p)

    def residue(self, x) -> int:
        x = Fraction(x)
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def reduce(self, x) -> Fraction:
        return Fraction(self.residue(x))

    def inv(self, x) -> Fraction:
        return Fraction(pow(self.residue(x), -1, self.p))

    def root(self, x, e: int) -> Fraction:
        # Frobenius is the identity on F_p
        assert e == self.p
        return self.reduce(x)

    def quadratic_splits(self, a1, a2) -> bool:
        """Does T^2 + a1 T - a2 have a root in F_p?"""
        if self.p == 2:
            b, c = self.residue(a1), self.residue(-a2)
            return any((x * x + b * x + c) % 2 == 0 for x in (0, 1))
        disc = self.residue(Fraction(a1) ** 2 + 4 * Fraction(a2))
        return kronecker_symbol(disc, self.p) >= 0


class FunctionFieldDVR:
    """Q[t] localized at a monic irreducible pi, elements of Q(t)."""

    char = 0

    def __init__(self, pi):
        self.pi = pi
        self._pi_poly = pi.numer
        self.degree = self._pi_poly.degree()

    def val(self, x):
        if x == 0:
            return INFINITY
        x = _as_qt(x)
        return self._poly_val(x.numer) - self._poly_val(x.denom)

    def _poly_val(self, f) -> int:
        v = 0
        while True:
            q, r = f.div(self._pi_poly)
            if r != 0:
                return v
            f = q
            v += 1

    def reduce(self, x):
        """Canonical representative (degree < deg pi) of the residue of x."""
        x = _as_qt(x)
        num, den = x.numer, x.denom
        den_r = den.rem(self._pi_poly)
        s, _, g = den_r.gcdex(self._pi_poly)
        # g is a unit since den is prime to pi for integral x
        r = (num * s).rem(self._pi_poly) * (1 / g.LC)
        return QT(r)

    def inv(self, x):
        r = self.reduce(x)
        s, _, g = r.numer.gcdex(self._pi_poly)
        return QT(s * (1 / g.LC))

    def root(self, x, e):
        raise ValueError("no p-th roots needed in characteristic 0")

    def quadratic_splits(self, a1, a2) -> bool:
        disc = self.reduce(a1 * a1 + 4 * a2)
        return _is_residue_square(disc, self._pi_poly)


def _is_residue_square(z, pi_poly) -> bool:
    """Is z (reduced mod pi, deg pi <= 2) a square in Q[t]/(pi)?"""
    deg = pi_poly.degree()
    zc = [Fraction(0)] * deg
    for (k,), c in z.numer.terms():
        zc[k] = _to_fraction(c)
    zc = [c / _to_fraction(z.denom.LC) for c in zc] if z.denom != 1 else zc
    if deg == 1:
        return is_square(zc[0])
    if deg != 2:
        raise NotImplementedError("split test needs a residue field of degree <= 2")
    # pi = t^2 + c t + e; write z = X + Y sqrt(D) with t = (-c + sqrt(D))/2
    coeffs = {k[0]: _to_fraction(v) for k, v in pi_poly.terms()}
    c, e = coeffs.get(1, Fraction(0)), coeffs.get(0, Fraction(0))
    D = c * c - 4 * e
    x0, y0 = zc[0], zc[1]
    X, Y = x0 - y0 * c / 2, y0 / 2
    if Y == 0:
        return is_square(X) or is_square(X / D)
    n = rational_sqrt(X * X - D * Y * Y)
    if n is None:
        return False
    for cand in ((X + n) / 2, (X - n) / 2):
        if cand != 0 and is_square(cand):
            return True
    return False


# -- Tate's algorithm ------------------------------------------------------

@dataclass(frozen=True)
class ReductionData:
    place: Place
    kodaira: str
    minimal_model: object
    disc_valuation: int
    reduction: str

    @property
    def is_multiplicative(self) -> bool:
        return self.reduction in (SPLIT, NONSPLIT)

    @property
    def euler_number(self) -> int:
        """Euler characteristic of the fibre (over the algebraic closure)."""
        return kodaira_euler_number(self.kodaira)


def kodaira_euler_number(symbol: str) -> int:
    fixed = {"I0": 0, "II": 2, "III": 3, "IV": 4, "IV*": 8, "III*": 9, "II*": 10}
    if symbol in fixed:
        return fixed[symbol]
    if symbol.endswith("*"):
        return int(symbol[1:-1]) + 6
    return int(symbol[1:])


def _v(dvr, x):
    return dvr.val(x)


def _tate(a, dvr):
    """Core loop. ``a`` must be integral at the DVR.

    Returns (kodaira, minimal coefficients, v(disc_min), reduction class).
    """
    p = dvr.char
    pi = dvr.pi
    half = dvr.inv(2) if p != 2 else None

    def rst(a, r=0, s=0, t=0):
        return transform_coefficients(a, 1, r, s, t)

    while True:
        b2, b4, b6, b8, c4, c6, disc = invariants_of(a)
        vd = _v(dvr, disc)
        if vd is INFINITY:
            raise SingularCurveError("singular model")
        if vd == 0:
            return "I0", a, 0, GOOD
        a1, a2, a3, a4, a6 = a

        # move the singular point of the reduction to (0, 0)
        if p == 2:
            if _v(dvr, b2) > 0:
                r = dvr.root(a4, 2)
                t = dvr.root(((r + a2) * r + a4) * r + a6, 2)
            else:
                temp = dvr.inv(a1)
                r = temp * a3
                t = temp * (a4 + r * r)
        elif p == 3:
            if _v(dvr, b2) > 0:
                r = dvr.root(-b6, 3)
            else:
                r = -dvr.inv(b2) * b4
            t = a1 * r + a3
        else:
            if _v(dvr, c4) > 0:
                r = -dvr.inv(12) * b2
            else:
                r = -dvr.inv(12 * c4) * (c6 + b2 * c4)
            t = -half * (a1 * r + a3)
        r, t = dvr.reduce(r), dvr.reduce(t)
        a = rst(a, r, 0, t)
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8, c4, c6, disc = invariants_of(a)

        if _v(dvr, c4) == 0:
            kind = SPLIT if dvr.quadratic_splits(a1, a2) else NONSPLIT
            return f"I{vd}", a, vd, kind
        if _v(dvr, a6) < 2:
            return "II", a, vd, ADDITIVE
        if _v(dvr, b8) < 3:
            return "III", a, vd, ADDITIVE
        if _v(dvr, b6) < 3:
            return "IV", a, vd, ADDITIVE

        # p | a1, a2;  p^2 | a3, a4;  p^3 | a6
        if p == 2:
            s = dvr.root(a2, 2)
            t = pi * dvr.root(a6 / pi**2, 2)
        elif p == 3:
            s, t = a1, a3
        else:
            s, t = -a1 * half, -a3 * half
        a = rst(a, 0, s, t)
        a1, a2, a3, a4, a6 = a

        b = a2 / pi
        c = a4 / pi**2
        d = a6 / pi**3
        w = 27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3
        x = 3 * c - b * b
        if _v(dvr, w) == 0:
            return "I0*", a, vd, ADDITIVE

        if _v(dvr, x) == 0:
            # double root: move it to 0, then peel off the I_n* chain
            if p == 2:
                r = dvr.root(c, 2)
            elif p == 3:
                r = c * dvr.inv(b)
            else:
                r = (b * c - 9 * d) * dvr.inv(2 * x)
            a = rst(a, pi * dvr.reduce(r), 0, 0)
            ix = iy = 3
            mx = my = pi**2
            while True:
                a1, a2, a3, a4, a6 = a
                a3t = a3 / my
                a6t = a6 / (mx * my)
                if _v(dvr, a3t * a3t + 4 * a6t) == 0:
                    break
                if p == 2:
                    t = my * dvr.root(a6t, 2)
                else:
                    t = my * dvr.reduce(-a3t * half)
                a = rst(a, 0, 0, t)
                my = my * pi
                iy += 1
                a1, a2, a3, a4, a6 = a
                a2t = a2 / pi
                a4t = a4 / (pi * mx)
                a6t = a6 / (mx * my)
                if _v(dvr, a4t * a4t - 4 * a6t * a2t) == 0:
                    break
                if p == 2:
                    r = mx * dvr.root(a6t * dvr.inv(a2t), 2)
                else:
                    r = mx * dvr.reduce(-a4t * dvr.inv(2 * a2t))
                a = rst(a, r, 0, 0)
                mx = mx * pi
                ix += 1
            return f"I{ix + iy - 5}*", a, vd, ADDITIVE

        # triple root: move it to 0
        if p == 2:
            r = b
        elif p == 3:
            r = dvr.root(-d, 3)
        else:
            r = -b * dvr.inv(3)
        a = rst(a, pi * dvr.reduce(r), 0, 0)
        a1, a2, a3, a4, a6 = a
        a3t = a3 / pi**2
        a6t = a6 / pi**4
        if _v(dvr, a3t * a3t + 4 * a6t) == 0:
            return "IV*", a, vd, ADDITIVE
        if p == 2:
            t = -(pi**2) * dvr.root(a6t, 2)
        else:
            t = pi**2 * dvr.reduce(-a3t * half)
        a = rst(a, 0, 0, t)
        a1, a2, a3, a4, a6 = a
        if _v(dvr, a4) < 4:
            return "III*", a, vd, ADDITIVE
        if _v(dvr, a6) < 6:
            return "II*", a, vd, ADDITIVE
        # not minimal: scale by the uniformizer and start again
        a = transform_coefficients(a, pi, 0, 0, 0)


def _integral_at(a, dvr):
    """Scale so every coefficient is integral at the DVR."""
    k = 0
    for i, c in zip((1, 2, 3, 4, 6), a):
        v = dvr.val(c)
        if v is not INFINITY and v < 0:
            k = max(k, -(-(-v) // i))
    if k:
        a = transform_coefficients(a, dvr.pi ** (-k), 0, 0, 0)
    return a


def _as_qt(c):
    if isinstance(c, Fraction):
        return QT(QQ(c.numerator, c.denominator))
    if isinstance(c, int):
        return QT(c)
    return c


def _at_reciprocal(c):
    """c(1/s) as an element of Q(s) (written in the same variable)."""
    def flip(poly):
        out = QT(0)
        for (k,), coef in poly.terms():
            out += QT(coef) * T ** (-k)
        return out

    return flip(c.numer) / flip(c.denom)


def clear_at_infinity(coeffs) -> tuple:
    """Coefficients over Q(s), s = 1/t, made integral at s = 0.

    Uses a_i(s) = a_i(1/s) s^(i k) with the least k >= 0 that clears every
    pole at s = 0 (k = 1 for a rational elliptic surface).
    """
    flipped = [_at_reciprocal(_as_qt(c)) for c in coeffs]
    k = 0
    for i, c in zip((1, 2, 3, 4, 6), flipped):
        if c == 0:
            continue
        v = FunctionFieldDVR(T).val(c)
        if v < 0:
            k = max(k, -(v // i))
    return tuple(c * T ** (i * k) for i, c in zip((1, 2, 3, 4, 6), flipped)), k


def tate_reduce(W, v: Place) -> ReductionData:
    """Kodaira type, local minimal model and reduction class of W at a place.

    ``W`` is a ``WeierstrassModel`` over Q for prime places, or over Q(t)
    (coefficients may be Fractions or sympy rational functions in t) for
    function-field places and infinity.
    """
    coeffs = W.coefficients if isinstance(W, WeierstrassModel) else tuple(W)
    if v.prime is not None:
        dvr = PAdicDVR(v.prime)
        a = tuple(Fraction(c) for c in coeffs)
    else:
        if v.infinite:
            a, _ = clear_at_infinity(coeffs)
            dvr = FunctionFieldDVR(T)
        else:
            a = tuple(_as_qt(c) for c in coeffs)
            dvr = FunctionFieldDVR(v.element())
    a = _integral_at(a, dvr)
    kodaira, amin, vd, kind = _tate(a, dvr)
    if v.prime is not None:
        model = WeierstrassModel(*amin)
    else:
        model = tuple(amin)
    return ReductionData(v, kodaira, model, int(vd), kind)


def split_multiplicative_test(Wmin, v: Place) -> str:
    """``"split"`` or ``"nonsplit"`` for a model with multiplicative reduction.

    Moves the node to the origin and asks whether the tangent cone
    y^2 + a1 xy - a2 x^2 factors over the residue field.
    """
    rd = tate_reduce(Wmin, v)
    if not rd.is_multiplicative:
        raise NotMultiplicative(f"reduction at {v} is {rd.kodaira}")
    return "split" if rd.reduction == SPLIT else "nonsplit"


# -- profiles --------------------------------------------------------------

@dataclass(frozen=True)
class ReductionProfile:
    model: WeierstrassModel
    places: tuple  # ReductionData at bad primes, increasing
    additive: int  # alpha
    multiplicative: int  # mu

    @property
    def bad_primes(self) -> tuple:
        return tuple(rd.place.prime for rd in self.places)

    @property
    def semistable(self) -> bool:
        return self.additive == 0

    def at(self, p: int) -> ReductionData:
        for rd in self.places:
            if rd.place.prime == p:
                return rd
        return ReductionData(Place.of_prime(p), "I0", self.model, 0, GOOD)


def reduction_profile(W: WeierstrassModel, trial_limit: int = None, rho_iterations: int = None) -> ReductionProfile:
    """Tate's algorithm at every prime dividing the discriminant."""
    if not W.is_integral():
        W = integral_model(W)
    disc = invariants_of(W.coefficients)[-1]
    kwargs = {}
    if trial_limit is not None:
        kwargs["trial_limit"] = trial_limit
    if rho_iterations is not None:
        kwargs["rho_iterations"] = rho_iterations
    primes = factorize(int(disc), **kwargs).primes
    places = []
    for p in primes:
        rd = tate_reduce(W, Place.of_prime(p))
        if rd.reduction != GOOD:
            places.append(rd)
    alpha = sum(rd.reduction == ADDITIVE for rd in places)
    mu = sum(rd.is_multiplicative for rd in places)
    return ReductionProfile(W, tuple(places), alpha, mu)


# -- surfaces --------------------------------------------------------------

LEGENDRE = "legendre"
NEUMANN_SETZER = "neumann-setzer"


def surface_coefficients(family: str) -> tuple:
    if family == LEGENDRE:
        return (QT(0), 1 + T, QT(0), T, QT(0))
    if family == NEUMANN_SETZER:
        return (QT(0), T, QT(0), QT(-16), QT(0))
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class SurfaceFibres:
    family: str
    fibres: tuple  # (Place, ReductionData)
    euler_total: int

    @property
    def finite_places(self) -> tuple:
        return tuple(pl for pl, _ in self.fibres if not pl.infinite)


def _monic_factors(poly) -> list:
    _, facs = poly.factor_list()
    out = []
    for f, _ in facs:
        f = f * (1 / f.LC)
        out.append(tuple(Fraction(_to_fraction(c)) for c in f.to_dense()))
    return out


def surface_fibre_types(family: str) -> SurfaceFibres:
    """All singular fibres of a family over P^1 and their Kodaira types.

    Runs Tate's algorithm at each monic irreducible factor of the
    discriminant in Q[t] and at infinity; checks that the Euler numbers,
    weighted by the degree of each place, sum to 12.
    """
    coeffs = surface_coefficients(family)
    disc = invariants_of(coeffs)[-1]
    fibres = []
    for poly in sorted(_monic_factors(disc.numer), key=lambda f: (len(f), [abs(c) for c in f], f)):
        place = Place.polynomial(*poly)
        rd = tate_reduce(coeffs, place)
        if rd.kodaira != "I0":
            fibres.append((place, rd))
    inf = Place.at_infinity()
    rd = tate_reduce(coeffs, inf)
    if rd.kodaira != "I0":
        fibres.append((inf, rd))
    total = sum(pl.degree * rd.euler_number for pl, rd in fibres)
    if total != 12:
        raise AssertionError(f"Euler numbers sum to {total}, not 12")
    return SurfaceFibres(family, tuple(fibres), total)
