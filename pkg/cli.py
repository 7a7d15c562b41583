"""
Command Line - Derived Chronicles

Entry point for `derived-chronicles`: loads a workspace, runs one command
and writes its report.

    derived-chronicles --workspace data/two_loop.ws mutate X=T2 M=T1 window=-3..3
    derived-chronicles example nakayama n=3 r=1 save=data/nakayama.ws

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 usage or parse error,
3 invariant violation.
"""

import argparse
import logging
import sys

from models.equivalence import DEFAULT_WINDOW
from models.resolutions import DEFAULT_LENGTH
from utils.commands import parse_args, parse_window, run_command
from utils.errors import EXIT_OK, EXIT_VERDICT_FAILED, ChroniclesError, UsageError
from utils.linalg import FieldSpec
from utils.reports import FORMATS, STRUCTURED, TEXT, emit_report
from utils.workspace import Workspace, load_workspace, save_workspace

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="derived-chronicles",
        description="Exact computations with complexes, dg algebras and derived equivalences",
    )
    parser.add_argument("--workspace", help="workspace file to load")
    parser.add_argument("--out", help="also write the structured report to this file")
    parser.add_argument("--format", choices=FORMATS, default=TEXT, help="report format on standard output")
    parser.add_argument("--window", help="default window a..b for shifts and degrees")
    parser.add_argument("--length", type=int, default=DEFAULT_LENGTH, help="default resolution length")
    parser.add_argument("--field", help="ground field Q or Fp:<p> for a fresh workspace")
    parser.add_argument("--save-workspace", help="write the workspace, with newly named objects, to this file")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
    parser.add_argument("command", help="command name; 'example <name>' for the worked examples")
    parser.add_argument("args", nargs=argparse.REMAINDER, help="key=value arguments")
    return parser


def _open_workspace(options):
    field = None
    if options.field:
        try:
            field = FieldSpec.parse(options.field)
        except ValueError as e:
            raise UsageError(str(e))
    if options.workspace:
        ws = load_workspace(options.workspace)
        if field is not None and field != ws.field:
            raise UsageError(f"--field {field} disagrees with the workspace field {ws.field}")
        return ws
    return Workspace(field) if field is not None else Workspace()


def main(argv=None):
    parser = build_parser()
    options = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, options.log_level),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    tokens = list(options.args)
    name = options.command
    try:
        if name == "example":
            if not tokens:
                raise UsageError("usage: example <two-loop|nakayama|apr-tilt> [key=value ...]")
            name = f"example {tokens.pop(0)}"
        window = parse_window(options.window) if options.window else DEFAULT_WINDOW
        ws = _open_workspace(options)
        report = run_command(ws, name, parse_args(tokens), window, options.length)
        sys.stdout.write(emit_report(report, options.format))
        if options.out:
            with open(options.out, "w", encoding="utf-8") as handle:
                handle.write(emit_report(report, STRUCTURED))
        if options.save_workspace:
            save_workspace(ws, options.save_workspace)
    except ChroniclesError as e:
        logger.error(f"Failed to run {name}: {str(e)}")
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return UsageError.exit_code
    return EXIT_VERDICT_FAILED if report.verdict is False else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
