"""Descent via 2-isogeny and complete 2-descent.

Local solubility is decided exactly. Quartic torsors w^2 = d u^4 + a u^2 v^2
+ e v^4 are searched over P^1(Q_p) by refining p-adic disks until every
disk carries a certificate: a point with square value, a Hensel root of the
quartic, or a proof that the square class of the value is constant (and
non-square) on the disk. Complete 2-descent uses the same disk refinement to
compute the local Kummer image E(Q_p)/2E(Q_p) directly, and checks its size
against |E(Q_p)[2]| * |2|_p^-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import (
    factorize,
    is_qp_square,
    prime_divisors,
    qp_square_class,
    squarefree_divisors,
    squarefree_part,
    vp,
)
from .errors import InconsistentData, LocalUndecided, NoTwoTorsion, SingularCurveError
from .local import ReductionProfile, reduction_profile
from .weierstrass import (
    CurvePoint,
    Transform,
    WeierstrassModel,
    apply_transform,
    integral_transform,
    integer_roots_cubic,
    naive_point_search,
    two_torsion_points,
)

_MAX_DEPTH = 200


def _e_need(p: int) -> int:
    """1 + v_p(u - 1) needed for a unit u = 1 (mod p^e) to be a square."""
    return 3 if p == 2 else 1


# -- 2-isogenies -----------------------------------------------------------

def isogenous_curve(a, b) -> tuple:
    """(a, b) of y^2 = x^3 + a x^2 + b x  ->  its 2-isogenous (-2a, a^2 - 4b)."""
    a, b = Fraction(a), Fraction(b)
    if b == 0 or a * a - 4 * b == 0:
        raise SingularCurveError(f"y^2 = x^3 + {a}x^2 + {b}x is singular")
    out = (-2 * a, a * a - 4 * b)
    return tuple(int(c) if c.denominator == 1 else c for c in out)


def _taylor(coeffs, x0):
    """Taylor coefficients of a polynomial (low degree first) at x0."""
    c = list(coeffs)
    n = len(c)
    out = []
    for k in range(n):
        # synthetic division by (x - x0), repeated
        acc = 0
        rest = [0] * (n - k)
        for i in range(n - k - 1, -1, -1):
            acc = acc * x0 + c[i]
            rest[i] = acc
        out.append(rest[0])
        c = rest[1:]
    return out


def _quartic_qp_point(coeffs, p: int, x0: int, k: int) -> bool:
    """Is f(x) a square in Q_p for some x in the disk x0 + p^k Z_p?

    ``coeffs`` are integers, low degree first, and f has no repeated roots.
    """
    e_need = _e_need(p)
    stack = [(x0, k)]
    while stack:
        x0, k = stack.pop()
        if k > _MAX_DEPTH:
            raise LocalUndecided(p, coeffs)
        tay = _taylor(coeffs, x0)
        f0 = tay[0]
        if f0 == 0 or is_qp_square(f0, p):
            return True
        lam = vp(f0, p)
        if tay[1] != 0:
            mu = vp(tay[1], p)
            if lam > 2 * mu:
                return True  # Hensel: f has a root in Z_p
        spread = min(vp(c, p) + j * k for j, c in enumerate(tay) if j >= 1 and c != 0)
        if spread >= lam + e_need:
            continue  # square class of f is constant and non-square here
        step = p**k
        stack.extend((x0 + i * step, k + 1) for i in range(p))
    return False


def quartic_locally_soluble(d: int, a: int, e: int, p: int) -> bool:
    """w^2 = d u^4 + a u^2 v^2 + e v^4 has a nontrivial Q_p point (p = 0: R)."""
    if p == 0:
        return d > 0 or e > 0 or (a > 0 and a * a >= 4 * d * e)
    # v = 1, u in Z_p; or u = 1, v in p Z_p
    if _quartic_qp_point([e, 0, a, 0, d], p, 0, 0):
        return True
    return _quartic_qp_point([d, 0, a, 0, e], p, 0, 1)


def _is_subgroup(classes) -> bool:
    s = set(classes)
    return all(squarefree_part(x * y) in s for x in s for y in s)


def _log2_exact(n: int) -> int:
    if n <= 0 or n & (n - 1):
        raise InconsistentData(f"Selmer set of size {n} is not a group")
    return n.bit_length() - 1


def _isogeny_classes(a: int, b: int, places) -> list:
    out = []
    for d in squarefree_divisors(b):
        e = b // d
        if all(quartic_locally_soluble(d, a, e, p) for p in places):
            out.append(d)
    return sorted(out, key=lambda d: (abs(d), d))


@dataclass(frozen=True)
class SelmerReport:
    """Selmer dimensions over F_2 and the surviving square classes.

    ``classes_theta_dual`` are the d | b whose torsor d w^2 = d^2 u^4 +
    a d u^2 v^2 + b v^4 is everywhere locally soluble (the isogeny landing
    on E); ``classes_theta`` are the same for the isogenous curve E'.
    For complete 2-descent ``pairs`` lists the surviving (d1, d2).
    """

    dim_theta: Optional[int] = None
    dim_theta_dual: Optional[int] = None
    classes_theta: tuple = ()
    classes_theta_dual: tuple = ()
    dim_two: Optional[int] = None
    pairs: tuple = ()

    @property
    def isogeny_rank_bound(self) -> Optional[int]:
        if self.dim_theta is None:
            return None
        return self.dim_theta + self.dim_theta_dual - 2

    @property
    def two_rank_bound(self) -> Optional[int]:
        if self.dim_two is None:
            return None
        return self.dim_two - 2


def two_isogeny_selmer(a: int, b: int) -> SelmerReport:
    """Selmer groups of the 2-isogeny E -> E' and its dual for y^2 = x^3 + ax^2 + bx."""
    a, b = int(a), int(b)
    ap, bp = isogenous_curve(a, b)
    places = [0] + sorted(set(prime_divisors(2 * b * bp)) | {2})
    dual = _isogeny_classes(a, b, places)
    direct = _isogeny_classes(ap, bp, places)
    for classes in (dual, direct):
        if 1 not in classes or not _is_subgroup(classes):
            raise InconsistentData(f"surviving classes {classes} do not form a group")
    return SelmerReport(
        dim_theta=_log2_exact(len(direct)),
        dim_theta_dual=_log2_exact(len(dual)),
        classes_theta=tuple(direct),
        classes_theta_dual=tuple(dual),
    )


# -- complete 2-descent ----------------------------------------------------

def _torsion_images(e) -> list:
    e1, e2, e3 = e
    return [
        ((e1 - e2) * (e1 - e3), e1 - e2),
        (e2 - e1, (e2 - e1) * (e2 - e3)),
        (e3 - e1, e3 - e2),
    ]


def _pair_key(c1, c2, p):
    return (qp_square_class(c1, p), qp_square_class(c2, p))


def kummer_local_image(e, p: int) -> frozenset:
    """Image of E(Q_p) in (Q_p*/Q_p*^2)^2 under P -> (x - e1, x - e2).

    ``e`` are the three distinct integer roots; ``p = 0`` is the real place.
    """
    e = tuple(int(x) for x in e)
    e1, e2, e3 = e
    image = {_pair_key(1, 1, p)}
    image.update(_pair_key(c1, c2, p) for c1, c2 in _torsion_images(e))
    if p == 0:
        expected = 2
        r = sorted(e)
        for x in (Fraction(r[0] + r[1], 2), Fraction(r[2] + 1)):
            image.add(_pair_key(x - e1, x - e2, p))
        if len(image) != expected:
            raise InconsistentData(f"real Kummer image has size {len(image)}")
        return frozenset(image)

    expected = 8 if p == 2 else 4
    e_need = _e_need(p)

    def record(diffs):
        if is_qp_square(diffs[0] * diffs[1] * diffs[2], p):
            image.add(_pair_key(diffs[0], diffs[1], p))

    # |x|_p > 1
    if p == 2:
        for m in (1, 2):
            for u in (1, 3, 5, 7):
                x = Fraction(u, 2**m)
                record([x - ei for ei in e])
    # x in Z_p
    stack = [(0, 0)]
    while stack and len(image) < expected:
        x0, k = stack.pop()
        if k > _MAX_DEPTH:
            raise LocalUndecided(p, e)
        step = p**k
        diffs = [x0 - ei for ei in e]
        inside = [i for i in range(3) if diffs[i] % step == 0]
        if not inside:
            if all(vp(d, p) + e_need <= k for d in diffs):
                record(diffs)
                continue
        elif len(inside) == 1:
            i = inside[0]
            if all(vp(e[i] - e[j], p) + e_need <= k for j in range(3) if j != i):
                continue  # only the 2-torsion image of e_i, already recorded
        stack.extend((x0 + i * step, k + 1) for i in range(p))
    if len(image) != expected:
        raise InconsistentData(
            f"Kummer image at {p} has size {len(image)}, expected {expected}"
        )
    return frozenset(image)


def complete_two_selmer(e1: int, e2: int, e3: int) -> SelmerReport:
    """2-Selmer group of y^2 = (x - e1)(x - e2)(x - e3) by complete 2-descent."""
    e = (int(e1), int(e2), int(e3))
    if len(set(e)) != 3:
        raise SingularCurveError("roots must be distinct")
    e1, e2, e3 = e
    places = [0] + sorted(set(prime_divisors(2 * (e1 - e2) * (e1 - e3) * (e2 - e3))))
    images = {p: kummer_local_image(e, p) for p in places}
    cand1 = squarefree_divisors((e1 - e2) * (e1 - e3))
    cand2 = squarefree_divisors((e2 - e1) * (e2 - e3))
    keys1 = {d: tuple(qp_square_class(d, p) for p in places) for d in cand1}
    keys2 = {d: tuple(qp_square_class(d, p) for p in places) for d in cand2}
    # first coordinates that occur in every local image
    firsts = [{c1 for c1, _ in images[p]} for p in places]
    cand1 = [d for d in cand1 if all(k in f for k, f in zip(keys1[d], firsts))]
    pairs = []
    for d1 in cand1:
        k1 = keys1[d1]
        for d2 in cand2:
            k2 = keys2[d2]
            if all((k1[i], k2[i]) in images[p] for i, p in enumerate(places)):
                pairs.append((d1, d2))
    s = set(pairs)
    if (1, 1) not in s or any(
        (squarefree_part(a1 * b1), squarefree_part(a2 * b2)) not in s
        for a1, a2 in s
        for b1, b2 in s
    ):
        raise InconsistentData("surviving pairs do not form a group")
    pairs.sort(key=lambda t: (abs(t[0]), t[0], abs(t[1]), t[1]))
    return SelmerReport(dim_two=_log2_exact(len(pairs)), pairs=tuple(pairs))


# -- rank bounds and bookkeeping -------------------------------------------

@dataclass(frozen=True)
class RankBound:
    bound: int
    equality_forces_trivial_sha2: bool = True


def thm23_bound(profile: ReductionProfile) -> RankBound:
    """rk E(Q) <= 2 alpha + mu - 1 for a curve with a rational 2-isogeny.

    If the rank attains the bound, the 2-primary part of Sha is trivial.
    """
    if not two_torsion_points(profile.model):
        raise NoTwoTorsion(f"{profile.model} has no rational 2-torsion point")
    return RankBound(2 * profile.additive + profile.multiplicative - 1)


@dataclass(frozen=True)
class InequalityReport:
    a: int
    b: int
    selmer_sum: int
    alpha: int
    mu: int

    @property
    def bound(self) -> int:
        return 2 * self.alpha + self.mu + 1

    @property
    def holds(self) -> bool:
        return self.selmer_sum <= self.bound


def selmer_inequality_check(a: int, b: int) -> InequalityReport:
    """dim S_theta + dim S_theta' <= 2 alpha + mu + 1, both sides computed."""
    rep = two_isogeny_selmer(a, b)
    prof = reduction_profile(WeierstrassModel(0, a, 0, b, 0))
    return InequalityReport(int(a), int(b), rep.dim_theta + rep.dim_theta_dual, prof.additive, prof.multiplicative)


def selmer_corpus(bound: int = 20) -> list:
    """Inequality reports for all |a|, |b| <= bound with b(a^2 - 4b) != 0."""
    out = []
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            if b == 0 or a * a - 4 * b == 0:
                continue
            out.append(selmer_inequality_check(a, b))
    return out


def sequence_dimension_check(roots, rank: int) -> int:
    """dim Sha(E)[2] = dim S_2(E) - rank - dim E(Q)[2] for full 2-torsion."""
    rep = complete_two_selmer(*roots)
    sha = rep.dim_two - rank - 2
    if sha < 0:
        raise InconsistentData(f"dim S_2 = {rep.dim_two} is below rank + 2 = {rank + 2}")
    return sha


# -- rank intervals --------------------------------------------------------

@dataclass(frozen=True)
class RankInterval:
    lower: int
    upper: int
    lower_method: str = "trivial"
    upper_method: str = ""
    bounds: tuple = ()  # (method, value) for every upper bound computed

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise InconsistentData(f"rank interval [{self.lower}, {self.upper}] is empty")

    @property
    def decided(self) -> bool:
        return self.lower == self.upper

    @property
    def tag(self) -> str:
        return "decided" if self.decided else "undecided"


def _f2_rank(vectors) -> int:
    basis = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


class _ClassEncoder:
    """Square classes of rationals as bit vectors over {-1, primes}."""

    def __init__(self):
        self.index = {-1: 0}

    def encode(self, x) -> int:
        x = Fraction(x)
        if x == 0:
            raise ValueError("zero has no square class")
        bits = 1 if x < 0 else 0
        for n in (abs(x.numerator), x.denominator):
            for p, e in factorize(n).factors:
                if e % 2:
                    i = self.index.setdefault(p, len(self.index))
                    bits ^= 1 << i
        return bits


def two_division_form(W: WeierstrassModel) -> tuple:
    """(integral model, derived model, transform) with derived model
    y^2 = x^3 + b2 x^2 + 8 b4 x + 16 b6 over the integers."""
    T1 = integral_transform(W)
    Wi = apply_transform(W, T1)
    T2 = Transform(1, 0, -Wi.a1 / 2, -Wi.a3 / 2).compose(Transform(Fraction(1, 4)))
    D = apply_transform(Wi, T2)
    return Wi, D, T2


def kummer_image(P: CurvePoint, e) -> tuple:
    """(x - e1, x - e2) with the usual values at 2-torsion points."""
    if P.is_infinity:
        return (1, 1)
    for (c1, c2), ei in zip(_torsion_images(e), e):
        if P.x == ei:
            return (c1, c2)
    return (P.x - e[0], P.x - e[1])


def descent_rank_interval(
    W: WeierstrassModel, H: int = 100, profile: Optional[ReductionProfile] = None
) -> RankInterval:
    """Interval certainly containing rk W(Q).

    Upper bounds: complete 2-descent when all 2-torsion is rational, else
    descent via 2-isogeny; also 2 alpha + mu - 1. Lower bound: the F_2-span
    of descent-map images of points found by naive search (the descent maps
    are injective on E(Q)/2E(Q) and E(Q)/psi(E'(Q)), so the span dimension
    minus the torsion contribution is a proven lower bound).
    ``profile`` may be passed to reuse a reduction profile of W.
    """
    Wi, D, T2 = two_division_form(W)
    A2, A4, A6 = int(D.a2), int(D.a4), int(D.a6)
    roots = integer_roots_cubic(A2, A4, A6)
    if not roots:
        raise NoTwoTorsion(f"{W} has no rational 2-torsion point")
    prof = profile if profile is not None else reduction_profile(Wi)
    bounds = [("2alpha+mu-1", 2 * prof.additive + prof.multiplicative - 1)]
    full = len(roots) == 3
    if full:
        e = tuple(roots)
        sel = complete_two_selmer(*e)
        bounds.append(("complete-2-descent", sel.two_rank_bound))
    else:
        r = roots[0]
        a, b = 3 * r + A2, 3 * r * r + 2 * A2 * r + A4
        sel = two_isogeny_selmer(a, b)
        bounds.append(("2-isogeny-descent", sel.isogeny_rank_bound))
    method, upper = min(bounds, key=lambda mb: (mb[1], mb[0]))
    if upper == 0:
        return RankInterval(0, 0, "trivial", method, tuple(bounds))

    enc = _ClassEncoder()
    points = [T2.map_point(P) for P in naive_point_search(Wi, H)]
    if full:
        vecs = []
        for P in points + [CurvePoint(x, 0) for x in e]:
            c1, c2 = kummer_image(P, e)
            vecs.append(enc.encode(c1) | (enc.encode(c2) << 64))
        lower = max(0, _f2_rank(vecs) - 2)
    else:
        shifted = [CurvePoint(P.x - r, P.y) for P in points]
        vec_e = [enc.encode(b)] + [enc.encode(P.x) for P in shifted if P.x != 0]
        ap, bp = isogenous_curve(a, b)
        dual_pts = naive_point_search(WeierstrassModel(0, ap, 0, bp, 0), H)
        vec_d = [enc.encode(bp)] + [enc.encode(P.x) for P in dual_pts if P.x != 0]
        lower = _f2_rank(vec_e) + _f2_rank(vec_d) - 2
        lower = max(lower, 0)
    if lower > upper:
        raise InconsistentData(f"lower bound {lower} exceeds upper bound {upper}")
    return RankInterval(lower, upper, "descent-image-span" if lower else "trivial", method, tuple(bounds))
