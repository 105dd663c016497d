"""Write the sum-DoF surface and the perfect/delayed CSIT tradeoff as CSV.

    python3 scripts/figure_data.py --out-dir results/
"""

import argparse
import csv
from fractions import Fraction
from pathlib import Path

from altcsit.cli import surface_rows, tradeoff_rows


def write(path, header, rows, as_float):
    with open(path, 'w', newline='') as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([f'{float(x):.6f}' if as_float else str(x) for x in r])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument('--out-dir', default='results')
    ap.add_argument('--surface-step', default='1/30')
    ap.add_argument('--tradeoff-step', default='1/60')
    ap.add_argument('--float', action='store_true', help='decimal output for plotting tools')
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    surface = surface_rows(Fraction(args.surface_step))
    tradeoff = tradeoff_rows(Fraction(args.tradeoff_step))
    write(out / 'surface.csv', ('lambda_d', 'lambda_p', 'sum_dof'), surface, args.float)
    write(out / 'tradeoff.csv', ('dof', 'lambda_p_min', 'lambda_d_min'), tradeoff, args.float)
    print(f'{len(surface)} surface points, {len(tradeoff)} tradeoff points -> {out}/')


if __name__ == '__main__':
    main()
