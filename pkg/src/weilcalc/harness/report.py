"""Verification reports: aggregation and deterministic JSON output."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .suites import SuiteConfig, SuiteResult

REPORT_VERSION = 1


@dataclass
class VerificationReport:
    config: dict
    suites: list[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.failures == 0 for s in self.suites)

    def to_json(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "config": self.config,
            "suites": [s.to_json() for s in self.suites],
            "pass": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def config_echo(suites: list[str], cfg: SuiteConfig) -> dict:
    echo = asdict(cfg)
    echo.pop("suite")
    echo["suites"] = list(suites)
    echo["degrees"] = list(cfg.degrees) if cfg.degrees else None
    echo["fixtures"] = str(cfg.fixtures) if cfg.fixtures else None
    return echo


def write_report(report: VerificationReport, path) -> None:
    Path(path).write_text(report.dumps())


def summary_lines(report: VerificationReport) -> list[str]:
    lines = []
    for s in report.suites:
        verdict = "PASS" if s.failures == 0 else "FAIL"
        lines.append(f"{verdict} {s.name:18s} trials={s.trials:<5d} failures={s.failures:<4d} "
                     f"max_residual={s.max_residual:.3g} elapsed={s.elapsed:.2f}s")
    lines.append("overall: " + ("PASS" if report.passed else "FAIL"))
    return lines
