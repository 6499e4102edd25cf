"""Document language and runner."""

from .grammar import SpecDocument, SpecError, parse_spec, render_spec
from .runner import CheckReport, CheckResult, run_checks

__all__ = ["SpecDocument", "SpecError", "parse_spec", "render_spec", "CheckReport", "CheckResult", "run_checks"]
