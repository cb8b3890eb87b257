"""Deterministic JSON, CSV and text rendering of every report type."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

from .pipelines import (
    Confirmation,
    CurveSummary,
    MersenneReport,
    RankCertificate,
    ScanStatistics,
    SurfaceReport,
    SurveyRecord,
)

VERSION = "0.1.0"
FORMATS = ("json", "csv", "text")


class UnsupportedFormat(ValueError):
    pass


@dataclass(frozen=True)
class SurveyReport:
    limit: int
    records: tuple

    def to_dict(self) -> dict:
        return {"limit": self.limit, "records": [r.to_dict() for r in self.records]}

    @classmethod
    def from_dict(cls, d: dict) -> "SurveyReport":
        return cls(d["limit"], tuple(SurveyRecord.from_dict(r) for r in d["records"]))


_KINDS = {
    "certificate": RankCertificate,
    "confirmation": Confirmation,
    "scan": ScanStatistics,
    "surface-types": SurfaceReport,
    "neumann-setzer": SurveyReport,
    "mersenne": MersenneReport,
    "curve": CurveSummary,
}


@dataclass(frozen=True)
class Report:
    kind: str
    params: dict
    result: object
    timings: Optional[dict] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        doc = {"kind": self.kind, "params": dict(self.params), "version": VERSION}
        body = self.result.to_dict()
        if self.kind == "scan":
            doc.update(body)  # records[] and statistics at top level
        else:
            doc["result"] = body
        if self.timings is not None:
            doc["timings"] = dict(self.timings)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        kind = doc["kind"]
        body = doc if kind == "scan" else doc["result"]
        return cls(kind, dict(doc["params"]), _KINDS[kind].from_dict(body), doc.get("timings"))


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def parse_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))


_SCAN_COLUMNS = ("b", "height", "classification", "lower", "upper", "alpha", "mu", "root_number", "model", "note")
_SURVEY_COLUMNS = ("b", "p", "status", "torsion", "lower", "upper", "agrees", "note")


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: "" if row.get(k) is None else row[k] for k in columns})
    return buf.getvalue()


def to_csv(report: Report) -> str:
    if report.kind == "scan":
        return _csv([r.to_dict() for r in report.result.records], _SCAN_COLUMNS)
    if report.kind == "neumann-setzer":
        return _csv([r.to_dict() for r in report.result.records], _SURVEY_COLUMNS)
    if report.kind == "mersenne":
        return _csv([{"q": q} for q in report.result.exponents], ("q",))
    raise UnsupportedFormat(f"no CSV projection for {report.kind} reports")


def _interval(lo, hi) -> str:
    return "?" if lo is None else f"[{lo}, {hi}]"


def to_text(report: Report) -> str:
    r = report.result
    lines = []
    if report.kind == "certificate":
        lines.append(f"E_{r.q}: y^2 = x(x+1)(x+2^{r.q})  [{r.model}]")
        for p, k, red, v in r.local_types:
            lines.append(f"  {p}: {k} {red} v(disc)={v}")
        lines.append(f"  alpha={r.alpha} mu={r.mu} bound={r.bound} w={'+1' if r.root_number > 0 else '-1'}")
        for i, s in enumerate(r.steps):
            uses = f" <- {','.join(map(str, s.uses))}" if s.uses else ""
            lines.append(f"  [{i}] {s.claim} ({s.tag}){uses}")
        lines.append(f"rank = {r.concluded_rank}")
    elif report.kind == "confirmation":
        lines.append(f"q={r.q} dim S2={r.dim_two} rank={r.rank}")
        lines.append(f"points with naive height <= {r.height}: {' '.join(r.points)}")
        lines.append("only 2-torsion found" if r.only_torsion else "non-torsion points found")
    elif report.kind == "scan":
        lines.extend(
            f"{f.b} {f.classification} {_interval(f.lower, f.upper)} w={f.root_number}" for f in r.records
        )
        lines.append(" ".join(f"{k}={v}" for k, v in r.counts.items()))
        lines.append(f"mean w over {r.semistable_count} semistable fibres: {r.mean_root_number}")
    elif report.kind == "surface-types":
        claimed = set(r.claimed_places)
        for pl, k, red, deg, e in r.fibres:
            flag = "" if not claimed or pl in claimed else "  (not among the claimed places)"
            lines.append(f"{pl}: {k} {red}{flag}")
    elif report.kind == "neumann-setzer":
        for s in r.records:
            lines.append(
                f"b={s.b} p={s.p} {s.status} torsion={s.torsion} rank {_interval(s.lower, s.upper)}"
                f" agrees={s.agrees}"
            )
    elif report.kind == "mersenne":
        lines.extend(str(q) for q in r.exponents)
        for base, val in sorted(r.estimates.items()):
            lines.append(f"estimate(log base {base}) at x=2^{r.limit}: {val:.6f} (actual {len(r.exponents)})")
    elif report.kind == "curve":
        lines.append(f"model {r.model}  disc {r.discriminant}")
        for p, k, red in r.bad_places:
            lines.append(f"  {p}: {k} {red}")
        lines.append(f"  alpha={r.alpha} mu={r.mu} torsion={r.torsion} w={r.root_number}")
        if r.selmer:
            lines.append("  selmer " + " ".join(f"{k}={v}" for k, v in sorted(r.selmer.items())))
        lines.append(f"rank in {_interval(r.lower, r.upper)}" + (f"  ({r.note})" if r.note else ""))
    else:
        raise UnsupportedFormat(f"unknown report kind {report.kind}")
    if report.timings is not None:
        lines.append(f"elapsed {report.timings['seconds']:.3f}s")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return to_json(report).encode()
    if fmt == "csv":
        return to_csv(report).encode()
    if fmt == "text":
        return to_text(report).encode()
    raise UnsupportedFormat(f"unsupported format {fmt!r}")
