"""Schema-stable JSON reports."""

from __future__ import annotations

import json
from typing import Iterable

from .. import __version__
from ..kernel.core import CheckReport, jsonable

SCHEMA_VERSION = 1


def report_document(reports: Iterable[CheckReport], suite: str = "", seed=None, config=None) -> dict:
    cases = [r.to_dict() for r in reports]
    doc = {
        "suite": suite,
        "passed": all(c["passed"] for c in cases),
        "cases": cases,
        "seed": seed,
        "versions": {"markovcats": __version__, "schema": SCHEMA_VERSION},
    }
    if config:
        doc["config"] = jsonable(config)
    return doc


def emit_report(reports: Iterable[CheckReport], suite: str = "", seed=None, config=None) -> str:
    """Serialize to JSON with sorted keys, so equal inputs give equal bytes."""
    return json.dumps(report_document(reports, suite, seed, config), sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"
