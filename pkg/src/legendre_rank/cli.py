"""Command-line front end.

Exit codes: 0 success, 1 failed precondition, 2 a computed value
contradicts the expected statement, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import pipelines
from .errors import LegendreRankError
from .local import LEGENDRE, NEUMANN_SETZER
from .reports import FORMATS, Report, SurveyReport, UnsupportedFormat, emit_report
from .weierstrass import WeierstrassModel

EXIT_OK = 0
EXIT_PRECONDITION = 1
EXIT_ASSERTION = 2
EXIT_USAGE = 64

_DEFAULT_FORMAT = {"surface-types": "text", "mersenne": "text"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    q: Optional[int] = None
    height: Optional[int] = None
    search_height: int = 50
    limit: Optional[int] = None
    estimate: bool = False
    log_base: str = "both"
    curve: Optional[str] = None
    family: str = LEGENDRE
    fmt: Optional[str] = None
    output: Optional[str] = None
    jobs: int = 1
    trial_limit: Optional[int] = None
    rho_iterations: Optional[int] = None
    timings: bool = False

    @property
    def format(self) -> str:
        return self.fmt or _DEFAULT_FORMAT.get(self.command, "json")

    def validate(self) -> "RunConfig":
        def positive(name, value, minimum=1):
            if value is not None and value < minimum:
                raise UsageError(f"--{name.replace('_', '-')} must be at least {minimum}")

        positive("q", self.q, 2)
        positive("height", self.height)
        positive("search_height", self.search_height)
        positive("jobs", self.jobs)
        positive("trial_limit", self.trial_limit, 2)
        positive("rho_iterations", self.rho_iterations)
        if self.command == "neumann-setzer":
            positive("limit", self.limit, 3)
        if self.command == "mersenne":
            positive("limit", self.limit, 2)
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        if self.command == "descend":
            try:
                WeierstrassModel.parse(self.curve)
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"bad --curve: {exc}") from None
        return self


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=FORMATS)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include wall-clock time (breaks byte-identity)")
    budgets = argparse.ArgumentParser(add_help=False)
    budgets.add_argument("--trial-limit", type=int)
    budgets.add_argument("--rho-iterations", type=int)

    parser = _Parser(prog="legendre-rank", description="Rank certificates and scans for the Legendre family.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prove", parents=[common], help="rank-zero certificate for y^2 = x(x+1)(x+2^q)")
    p.add_argument("--q", type=int, required=True)

    p = sub.add_parser("confirm", parents=[common], help="complete 2-descent and point search for E_q")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--height", type=int, default=1000)

    p = sub.add_parser("scan", parents=[common, budgets], help="classify Legendre fibres up to a height")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--search-height", type=int, default=50)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("surface-types", parents=[common], help="singular fibres of a family")
    p.add_argument("--family", choices=(LEGENDRE, NEUMANN_SETZER), default=LEGENDRE)

    p = sub.add_parser("neumann-setzer", parents=[common], help="survey y^2 = x^3 + bx^2 - 16x")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--search-height", type=int, default=50)

    p = sub.add_parser("mersenne", parents=[common], help="Mersenne exponents up to a limit")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--estimate", action="store_true")
    p.add_argument("--log-base", choices=("e", "2", "both"), default="both")

    p = sub.add_parser("descend", parents=[common, budgets], help="descent summary for one curve")
    p.add_argument("--curve", required=True, help="a1,a2,a3,a4,a6")
    p.add_argument("--height", type=int, default=100)
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if v is not None and k in RunConfig.__dataclass_fields__}
    return RunConfig(**fields).validate()


def run(cfg: RunConfig) -> Report:
    c = cfg.command
    if c == "prove":
        return Report("certificate", {"q": cfg.q}, pipelines.prove_rank_zero(cfg.q))
    if c == "confirm":
        return Report("confirmation", {"q": cfg.q, "height": cfg.height},
                      pipelines.independent_rank_check(cfg.q, cfg.height))
    if c == "scan":
        params = {"height": cfg.height, "search_height": cfg.search_height,
                  "trial_limit": cfg.trial_limit, "rho_iterations": cfg.rho_iterations}
        stats = pipelines.scan_legendre_fibres(cfg.height, cfg.search_height, cfg.jobs,
                                               cfg.trial_limit, cfg.rho_iterations)
        return Report("scan", params, stats)
    if c == "surface-types":
        return Report("surface-types", {"family": cfg.family}, pipelines.surface_report(cfg.family))
    if c == "neumann-setzer":
        recs = pipelines.neumann_setzer_survey(cfg.limit, cfg.search_height)
        return Report("neumann-setzer", {"limit": cfg.limit, "search_height": cfg.search_height},
                      SurveyReport(cfg.limit, tuple(recs)))
    if c == "mersenne":
        bases = () if not cfg.estimate else (("e", "2") if cfg.log_base == "both" else (cfg.log_base,))
        return Report("mersenne", {"limit": cfg.limit, "estimate": cfg.estimate, "log_base": cfg.log_base},
                      pipelines.mersenne_report(cfg.limit, bases))
    if c == "descend":
        W = WeierstrassModel.parse(cfg.curve)
        return Report("curve", {"curve": W.serialize(), "height": cfg.height},
                      pipelines.describe_curve(W, cfg.height, cfg.trial_limit, cfg.rho_iterations))
    raise UsageError(f"unknown command {c}")


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else list(argv))
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE

    start = time.perf_counter()
    try:
        report = run(cfg)
        if cfg.timings:
            report = Report(report.kind, report.params, report.result,
                            {"seconds": round(time.perf_counter() - start, 6)})
        data = emit_report(report, cfg.format)
    except UnsupportedFormat as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except AssertionError as exc:  # AssertionFailed, InconsistentData
        print(f"assertion failed: {exc}", file=stderr)
        return EXIT_ASSERTION
    except (LegendreRankError, ValueError) as exc:
        print(f"precondition failed: {exc}", file=stderr)
        return EXIT_PRECONDITION

    if cfg.output:
        with open(cfg.output, "wb") as fh:
            fh.write(data)
    else:
        out = getattr(stdout, "buffer", None)
        if out is not None:
            out.write(data)
            out.flush()
        else:
            stdout.write(data.decode())
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
