"""Sweep the character-sum moments over a ladder of prime moduli.

    python3 scripts/ladder_sweep.py --q 1009,10007,100003 --x sqrt --k 0.5,1 --out ladder.csv

Thin wrapper over `lowmoments ladder`; it also prints the k=1/2 normalized
mean |S|/sqrt(x) per modulus so the trend is visible without a plotting tool.
"""

import csv
import io
import sys
from contextlib import redirect_stdout

from lowmoments.cli import run


def main(argv):
    if "--out" in argv:
        return run(["ladder", *argv])
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(["ladder", *argv])
    if code:
        return code
    text = buf.getvalue()
    sys.stdout.write(text)
    seen = set()
    for row in csv.DictReader(io.StringIO(text)):
        if row["q"] not in seen:
            seen.add(row["q"])
            print(f"# q={row['q']} x={row['x']} mean|S|/sqrt(x)={float(row['mean_abs_over_sqrt_x']):.6f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:] or ["--q", "1009,10007,100003", "--x", "sqrt", "--k", "0.5,1"]))
