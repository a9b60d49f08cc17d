"""Command line entry point: `workbench run <file> [--format lines] [--task NAME]`."""

import argparse
import sys

from .errors import WorkbenchError
from .workbench import emit_report, parse_spec, run_spec


def main(argv=None):
    parser = argparse.ArgumentParser(prog="workbench", description="Clone theory workbench.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the tasks of a definition file")
    run.add_argument("file")
    run.add_argument("--format", choices=("text", "lines"), default="text")
    run.add_argument("--task", default=None, help="run only the named task")
    args = parser.parse_args(argv)

    try:
        with open(args.file, encoding="utf-8") as fh:
            spec = parse_spec(fh.read())
        report = run_spec(spec, args.task)
    except (OSError, WorkbenchError, ValueError) as exc:
        print(f"workbench: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(emit_report(report, args.format))
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
