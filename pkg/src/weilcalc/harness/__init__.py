"""Verification harness: seeded suites, fixtures and the ``verify`` command."""

from .suites import SUITES, SuiteConfig, SuiteResult, run_suite

__all__ = ["SUITES", "SuiteConfig", "SuiteResult", "run_suite"]
