#!/usr/bin/env python3
"""Run the standard verification suite and print its summary table.

Usage:
    python3 scripts/run_verification.py [--seed N] [--report PATH]

Exit status is 0 when every check passes, 1 otherwise.
"""

import argparse
import sys

from etacalc.cli import write_report
from etacalc.verify import standard_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--report", help="write the JSON report here")
    args = ap.parse_args()

    report = standard_suite(args.seed)
    for line in report.summary_lines():
        print(line)
    if args.report:
        write_report(report, args.report)
        print(f"report written to {args.report}")
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
