"""Root numbers of semistable curves and the parity comparison."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AdditiveUnsupported
from .local import ADDITIVE, GOOD, NONSPLIT, SPLIT, ReductionData, ReductionProfile

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"


def format_sign(w: int) -> str:
    return "+1" if w > 0 else "-1"


def parse_sign(text: str) -> int:
    if text not in ("+1", "-1"):
        raise ValueError(f"not a sign: {text!r}")
    return 1 if text == "+1" else -1


def local_root_number(rd: ReductionData) -> int:
    if rd.reduction in (GOOD, NONSPLIT):
        return 1
    if rd.reduction == SPLIT:
        return -1
    if rd.reduction == ADDITIVE:
        raise AdditiveUnsupported(f"additive reduction at {rd.place} ({rd.kodaira})")
    raise ValueError(f"unknown reduction class {rd.reduction!r}")


@dataclass(frozen=True)
class RootNumberReport:
    local_signs: tuple  # ((p, w_p), ...) over finite bad primes
    global_sign: int
    semistable: bool = True

    def to_dict(self) -> dict:
        return {
            "local_signs": {str(p): format_sign(w) for p, w in self.local_signs},
            "global_sign": format_sign(self.global_sign),
            "semistable": self.semistable,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RootNumberReport":
        signs = tuple(sorted((int(p), parse_sign(w)) for p, w in d["local_signs"].items()))
        return cls(signs, parse_sign(d["global_sign"]), d["semistable"])


def root_number_from_signs(local_signs) -> RootNumberReport:
    """w = -prod w_p; the leading minus is the archimedean factor."""
    signs = tuple(sorted(local_signs))
    w = -1
    for _, s in signs:
        w *= s
    return RootNumberReport(signs, w, True)


def global_root_number(profile: ReductionProfile) -> RootNumberReport:
    if not profile.semistable:
        raise AdditiveUnsupported(
            f"{profile.additive} additive place(s); only semistable curves are supported"
        )
    return root_number_from_signs((rd.place.prime, local_root_number(rd)) for rd in profile.places)


def parity_consistency(rank: int, w: int) -> str:
    return CONSISTENT if (-1) ** rank == w else INCONSISTENT
