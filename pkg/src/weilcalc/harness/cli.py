"""``verify``: run verification suites from the command line."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..weil import FLOAT, RATIONAL, WeilError
from .fixtures import FixtureError
from .report import VerificationReport, config_echo, summary_lines, write_report
from .suites import SUITES, SuiteConfig, run_suite


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="verify", description="Seeded randomized checks of the microcube calculus identities.")
    ap.add_argument("--suite", default="all", help="comma-separated suite ids, or 'all'")
    ap.add_argument("--model-dim", type=int, dest="m", help="dimension m of the model space R^m")
    ap.add_argument("--degrees", help="form degrees p,q,r (fewer entries are allowed for two-degree suites)")
    ap.add_argument("--trials", type=int, help="random trials per degree combination")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, help="relative tolerance for float contexts")
    ap.add_argument("--coeff", choices=[RATIONAL, FLOAT], help="scalar kind of the sampled data")
    ap.add_argument("--fixtures", type=Path, help="directory with extra .alg / .json fixtures")
    ap.add_argument("--report", type=Path, help="write the JSON report here")
    ap.add_argument("--list-suites", action="store_true")
    ap.add_argument("-q", "--quiet", action="store_true", help="no per-suite summary on stdout")
    return ap


def parse_suites(text: str) -> list[str]:
    if text.strip() == "all":
        return list(SUITES)
    names = [s.strip() for s in text.split(",") if s.strip()]
    if not names:
        raise ConfigError("no suites selected")
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s): {', '.join(unknown)}")
    return names


def parse_degrees(text: str | None):
    if text is None:
        return None
    try:
        degs = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"--degrees expects integers like 1,1,0, got {text!r}") from None
    if not 1 <= len(degs) <= 3 or any(d < 0 for d in degs):
        raise ConfigError("--degrees takes one to three non-negative integers")
    return degs


def make_config(args) -> tuple[list[str], SuiteConfig]:
    suites = parse_suites(args.suite)
    if args.trials is not None and args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    if args.m is not None and args.m < 1:
        raise ConfigError("--model-dim must be at least 1")
    if args.tol is not None and args.tol <= 0 and args.coeff != RATIONAL:
        raise ConfigError("--tol must be positive for float contexts")
    if args.fixtures is not None and not args.fixtures.is_dir():
        raise ConfigError(f"fixture directory {args.fixtures} does not exist")
    cfg = SuiteConfig("", m=args.m, degrees=parse_degrees(args.degrees), trials=args.trials, seed=args.seed,
                      tol=args.tol, kind=args.coeff, fixtures=args.fixtures)
    return suites, cfg


def run(suites: list[str], cfg: SuiteConfig) -> VerificationReport:
    if not suites:
        raise ConfigError("no suites selected")
    report = VerificationReport(config_echo(suites, cfg))
    for name in suites:
        one = SuiteConfig(name, cfg.m, cfg.degrees, cfg.trials, cfg.seed, cfg.tol, cfg.kind, cfg.fixtures)
        report.suites.append(run_suite(one))
    return report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_suites:
        for name, (_, desc) in SUITES.items():
            print(f"{name:18s} {desc}")
        return 0
    try:
        suites, cfg = make_config(args)
        report = run(suites, cfg)
    except (ConfigError, FixtureError) as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return 2
    except WeilError as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return 2
    if args.report:
        try:
            write_report(report, args.report)
        except OSError as exc:
            print(f"verify: cannot write report: {exc}", file=sys.stderr)
            return 2
    if not args.quiet:
        print("\n".join(summary_lines(report)))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
