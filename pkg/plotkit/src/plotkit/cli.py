"""`plot <figure-spec-file>` entry point.

Exit codes: 0 success, 1 data/rendering failure, 2 malformed spec.
"""
from __future__ import annotations

import argparse
import sys

from .csvio import DataError
from .render import render
from .spec import SpecError, load_spec


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot")
    parser.add_argument("spec", help="YAML figure-spec file")
    args = parser.parse_args(argv)
    try:
        written = render(load_spec(args.spec))
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
