"""Command line: one subcommand per figure, --in CSV, --out image base."""

import argparse
import sys

from .csvin import PlotkitError
from .figures import RENDERERS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render the standard figures from experiment CSV files.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind, fn in RENDERERS.items():
        p = sub.add_parser(kind, help=fn.__doc__.splitlines()[0])
        p.add_argument("--in", dest="csv_path", required=True,
                       help="input CSV produced by the experiment CLI")
        p.add_argument("--out", dest="out_base", default=kind,
                       help="output base path; .png and .svg are appended")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = RENDERERS[args.kind](args.csv_path, args.out_base)
    except (OSError, PlotkitError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for path in result["files"]:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
