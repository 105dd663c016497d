"""Monte Carlo DoF slopes for every catalog scheme against its nominal pair.

    python3 scripts/slope_table.py --trials 2000 --seed 2026 --workers 4
"""

import argparse
import time

from altcsit.region import format_fraction
from altcsit.schemes import catalog
from altcsit.simulation import SweepConfig, dof_slope, rate_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument('--snr-from', type=float, default=20.0)
    ap.add_argument('--snr-to', type=float, default=60.0)
    ap.add_argument('--snr-step', type=float, default=5.0)
    ap.add_argument('--trials', type=int, default=2000)
    ap.add_argument('--seed', type=int, default=2026)
    ap.add_argument('--workers', type=int, default=None)
    args = ap.parse_args()

    cfg = SweepConfig.from_range(args.snr_from, args.snr_to, args.snr_step, args.trials, args.seed)
    print(f'{"scheme":8} {"states":22} {"nominal":>11} {"slope d1":>9} {"slope d2":>9} {"max err":>8}')
    t0 = time.perf_counter()
    worst = 0.0
    for spec in catalog():
        d1, d2 = dof_slope(rate_sweep(spec.id, cfg, workers=args.workers))
        n1, n2 = spec.dof_pair
        err = max(abs(d1 - float(n1)), abs(d2 - float(n2)))
        worst = max(worst, err)
        states = ','.join(str(s) for s in spec.states)
        nominal = f'({format_fraction(n1)},{format_fraction(n2)})'
        print(f'{spec.id:8} {states:22} {nominal:>11} {d1:9.4f} {d2:9.4f} {err:8.4f}')
    print(f'worst deviation {worst:.4f}; {time.perf_counter() - t0:.1f}s')


if __name__ == '__main__':
    main()
