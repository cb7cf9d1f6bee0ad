"""Command-line harness: dataset synthesis, training, evaluation, line ingestion, reports and experiments."""

import sys

from .commands import UsageError, resolve
from .experiments import PRESETS, Plan, execute, make_plan
from .ingest import ingest_lines
from .main import build_parser, dispatch
from .main import main as _main
from .report import build_report

__all__ = ["main", "dispatch", "build_parser", "resolve", "UsageError", "PRESETS", "Plan", "make_plan", "execute",
           "ingest_lines", "build_report"]


def main(argv=None) -> None:
    sys.exit(_main(argv))
