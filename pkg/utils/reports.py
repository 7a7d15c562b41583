"""
Reports - Derived Chronicles

This module handles the report documents every command produces and their
two renderings: a text form for people and a structured (JSON) form with
stable, versioned key names.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import pandas as pd

from utils.errors import ParseError

logger = logging.getLogger(__name__)

REPORT_VERSION = 1  # bump when structured key names change
TEXT = "text"
STRUCTURED = "structured"
FORMATS = (TEXT, STRUCTURED)


@dataclass
class Report:
    """
    Outcome of one command

    verdict is True/False for commands that decide something and None for
    pure computations. tables hold lists of row dicts.
    """

    command: str = ""
    verdict: Optional[bool] = None
    data: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def table(self, name):
        """A report table as a DataFrame"""
        rows = self.tables.get(name, [])
        return pd.DataFrame(rows)

    def to_dict(self):
        return {
            "version": REPORT_VERSION,
            "command": self.command,
            "verdict": self.verdict,
            "data": self.data,
            "tables": self.tables,
        }

    @classmethod
    def from_dict(cls, document):
        if document.get("version") != REPORT_VERSION:
            raise ParseError(1, f"unsupported report version {document.get('version')!r}")
        return cls(document.get("command", ""), document.get("verdict"),
                   document.get("data", {}), document.get("tables", {}))


def _verdict_label(verdict):
    if verdict is None:
        return "n/a"
    return "PASS" if verdict else "FAIL"


def _format_value(value):
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def render_text(report):
    header = f"derived-chronicles report v{REPORT_VERSION}"
    lines = [f"{header}: {report.command}" if report.command else header]
    if report.verdict is not None:
        lines.append(f"verdict: {_verdict_label(report.verdict)}")
    for key in sorted(report.data):
        lines.append(f"{key}: {_format_value(report.data[key])}")
    for name in sorted(report.tables):
        rows = report.tables[name]
        lines.append("")
        lines.append(f"[{name}]")
        lines.append(pd.DataFrame(rows).to_string(index=False) if rows else "(empty)")
    return "\n".join(lines) + "\n"


def render_structured(report):
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def emit_report(report, fmt=TEXT):
    """
    Serialize a report

    Args:
        report (Report): the report
        fmt (str): "text" or "structured"

    Returns:
        str: the document; identical input gives byte-identical output
    """
    if fmt == TEXT:
        return render_text(report)
    if fmt == STRUCTURED:
        return render_structured(report)
    raise ValueError(f"unknown report format {fmt!r}; expected one of {', '.join(FORMATS)}")


def parse_report(text):
    """Read a structured report back"""
    try:
        return Report.from_dict(json.loads(text))
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, f"bad report document: {str(e)}")
