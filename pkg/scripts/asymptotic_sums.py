"""Tabulate the deterministic prime and coefficient sums against their reference growth.

    python3 scripts/asymptotic_sums.py > sums.csv
"""

import sys

from lowmoments.cli import run

if __name__ == "__main__":
    x = "1000,10000,100000,1000000"
    code = 0
    for argv in (["mertens", "--x", x], ["rankin", "--x", x], ["smooth", "--x", "100000,1000000"]):
        code = code or run([*argv, "--table-limit", "1000000"])
    sys.exit(code)
