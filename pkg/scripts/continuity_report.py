"""Monte Carlo look at the grid-vs-integral continuity defect at one P.

    python3 scripts/continuity_report.py --P 10000 --draws 200

Prints the mean defect, its standard error and (log P)**0.99 for comparison.
"""

import argparse
import math

import numpy as np

from lowmoments import coefficients, eulerprod, randmult


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--P", type=int, default=10_000)
    ap.add_argument("--draws", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--order", type=int, default=16)
    args = ap.parse_args()

    lam = coefficients.lambda_table(max(args.P, 10**5))
    defects, avgs = [], []
    for trial in range(args.draws):
        ev = eulerprod.EulerEvaluator.build(args.P, lam, randmult.sample_phases(args.P, args.seed, trial))
        defects.append(eulerprod.continuity_defect(ev, args.order))
        avgs.append(eulerprod.discrete_grid_avg(ev))
    d, a = np.array(defects), np.array(avgs)
    ref = math.log(args.P) ** 0.99
    print(f"P={args.P} draws={args.draws} D={eulerprod.grid_spacing(args.P):.4f}")
    print(f"continuity defect: mean={d.mean():.6g} se={d.std(ddof=1) / math.sqrt(len(d)):.3g} max={d.max():.6g}")
    print(f"grid average:      mean={a.mean():.6g} se={a.std(ddof=1) / math.sqrt(len(a)):.3g}")
    print(f"(log P)^0.99 = {ref:.6g}; mean defect / (log P)^0.99 = {d.mean() / ref:.4g}")


if __name__ == "__main__":
    main()
