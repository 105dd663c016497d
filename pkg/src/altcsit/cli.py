"""
Command-line front end.

    altcsit region    --pmf PD=1/2
    altcsit compose   --pmf DD=1/5,PN=2/5 --corner P0
    altcsit verify    --scheme S8/5 --trials 1000 --seed 1
    altcsit simulate  --scheme S8/5 --snr-from 20 --snr-to 60 --snr-step 5 --trials 2000 --seed 7
    altcsit surface   --grid-step 1/30
    altcsit tradeoff  --grid-step 1/60

Exit codes: 0 success, 1 usage or input error, 2 domain error (target outside
the region, corner not valid for the case), 3 simulation or verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from typing import List, Optional

from .composer import (Corner, compose_corner, compose_point, corner_value,
                       format_schedule, subcase_of, validate_schedule)
from .errors import DegenerateChannel, InvalidPmf, OutsideRegion, WrongCase
from .region import (DofPoint, DofRegion, LambdaPmf, Marginals, as_fraction,
                     case_of, corner_points, format_fraction, marginals,
                     min_csit, region_from_pmf, sum_dof)
from .schemes import build_trace, check_decodable, get_spec, interference_rank
from .simulation import SweepConfig, dof_slope, rate_sweep, trial_rng, write_sweep_csv
from .simulation import _draw

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_SIM = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def parse_pmf(text: str) -> LambdaPmf:
    """``"PD=1/2"`` or ``"DD=1/5, PN=2/5"``; asymmetric states are mirrored."""
    entries = {}
    for item in text.replace(',', ' ').split():
        if '=' not in item:
            raise UsageError(f'bad pmf entry {item!r}, expected STATE=num/den')
        key, val = item.split('=', 1)
        entries[key] = val
    try:
        return LambdaPmf.from_mapping(entries, mirror=True)
    except (ValueError, TypeError) as exc:
        raise UsageError(f'invalid pmf: {exc}') from exc


def parse_point(text: str) -> DofPoint:
    parts = text.strip().strip('()').split(',')
    if len(parts) != 2:
        raise UsageError(f'bad target {text!r}, expected d1,d2')
    try:
        return DofPoint(as_fraction(parts[0]), as_fraction(parts[1]))
    except (ValueError, TypeError) as exc:
        raise UsageError(f'bad target {text!r}: {exc}') from exc


def _fr(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# region document
# ---------------------------------------------------------------------------
#
#   region
#   pmf <STATE>=<num/den> ... (all nine)
#   marginals <lambda_p> <lambda_d> <lambda_n>
#   case <A|B>
#   subcase <A1..B3>
#   inequality <a> <b> <c>        meaning a*d1 + b*d2 <= c, one per line
#   corner (<d1>,<d2>)            one per line, sorted by d1 then d2
#   sum_dof <num/den>

def format_region_document(pmf: LambdaPmf) -> str:
    m = marginals(pmf)
    out = io.StringIO()
    out.write('region\n')
    out.write(f'pmf {pmf}\n')
    out.write('marginals ' + ' '.join(format_fraction(x) for x in (m.lambda_p, m.lambda_d, m.lambda_n)) + '\n')
    out.write(f'case {case_of(m)}\n')
    out.write(f'subcase {subcase_of(pmf)}\n')
    for a, b, c in region_from_pmf(pmf).inequalities:
        out.write(f'inequality {format_fraction(a)} {format_fraction(b)} {format_fraction(c)}\n')
    for p in corner_points(m):
        out.write(f'corner {p}\n')
    out.write(f'sum_dof {format_fraction(sum_dof(m))}\n')
    return out.getvalue()


def parse_region_document(text: str) -> dict:
    doc = {'inequalities': [], 'corners': []}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        key = parts[0]
        if key == 'pmf':
            doc['pmf'] = LambdaPmf.from_mapping(dict(p.split('=') for p in parts[1:]))
        elif key == 'marginals':
            doc['marginals'] = Marginals(*(as_fraction(x) for x in parts[1:4]))
        elif key in ('case', 'subcase'):
            doc[key] = parts[1]
        elif key == 'inequality':
            doc['inequalities'].append(tuple(as_fraction(x) for x in parts[1:4]))
        elif key == 'corner':
            d1, d2 = parts[1].strip('()').split(',')
            doc['corners'].append(DofPoint(as_fraction(d1), as_fraction(d2)))
        elif key == 'sum_dof':
            doc['sum_dof'] = as_fraction(parts[1])
    doc['region'] = DofRegion(tuple(doc.pop('inequalities')))
    return doc


# ---------------------------------------------------------------------------
# figure data
# ---------------------------------------------------------------------------

def surface_rows(step: Fraction) -> List[tuple]:
    """(lambda_D, lambda_P, sum-DoF) on the simplex lambda_D + lambda_P <= 1."""
    n = int(1 / step)
    if n * step != 1:
        raise UsageError('grid step must divide 1')
    rows = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            ld, lp = i * step, j * step
            rows.append((ld, lp, sum_dof(Marginals.from_pd(lp, ld))))
    return rows


def tradeoff_rows(step: Fraction) -> List[tuple]:
    """(DoF, lambda_P_min, lambda_D_min) for DoF on [0, 2]."""
    n = int(2 / step)
    if n * step != 2:
        raise UsageError('grid step must divide 2')
    return [(k * step, *min_csit(k * step)) for k in range(n + 1)]


def _write_csv(header, rows, out):
    w = csv.writer(out, lineterminator='\n')
    w.writerow(header)
    for r in rows:
        w.writerow([format_fraction(x) for x in r])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _schedule_for(args, pmf):
    if (args.corner is None) == (args.target is None):
        raise UsageError('give exactly one of --corner or --target')
    if args.corner is not None:
        try:
            corner = Corner.parse(args.corner)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return compose_corner(pmf, corner), corner_value(pmf, corner)
    target = parse_point(args.target)
    return compose_point(pmf, target), target


def cmd_region(args, out):
    out.write(format_region_document(parse_pmf(args.pmf)))
    return EXIT_OK


def cmd_compose(args, out):
    pmf = parse_pmf(args.pmf)
    schedule, target = _schedule_for(args, pmf)
    report = validate_schedule(pmf, schedule, target)
    out.write(format_schedule(schedule, pmf, report))
    return EXIT_OK if report.passed else EXIT_DOMAIN


def cmd_verify(args, out):
    try:
        spec = get_spec(args.scheme)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    ok1 = ok2 = 0
    interference = set()
    for trial in range(args.trials):
        ch = _draw(trial_rng(args.seed, trial), spec.slots)
        trace = build_trace(spec.id, ch, args.swapped)
        d1, d2 = check_decodable(trace)
        ok1 += d1
        ok2 += d2
        interference.add(interference_rank(trace))
    out.write(f'scheme {spec.id}{" swapped" if args.swapped else ""}\n')
    out.write(f'trials {args.trials}\n')
    out.write(f'rx1_decodable {ok1}/{args.trials}\n')
    out.write(f'rx2_decodable {ok2}/{args.trials}\n')
    out.write('interference_rank ' + ' '.join(f'({a},{b})' for a, b in sorted(interference)) + '\n')
    passed = ok1 == ok2 == args.trials
    out.write(f'result {"pass" if passed else "fail"}\n')
    return EXIT_OK if passed else EXIT_SIM


def cmd_simulate(args, out):
    if args.scheme:
        if args.pmf:
            raise UsageError('give either --scheme or --pmf, not both')
        try:
            get_spec(args.scheme)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        target, label, nominal = args.scheme, args.scheme, get_spec(args.scheme).dof_pair
    elif args.pmf:
        pmf = parse_pmf(args.pmf)
        schedule, point = _schedule_for(args, pmf)
        target, label, nominal = schedule, schedule.label, (point.d1, point.d2)
    else:
        raise UsageError('give --scheme or --pmf')
    try:
        cfg = SweepConfig.from_range(args.snr_from, args.snr_to, args.snr_step, args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    samples = rate_sweep(target, cfg, workers=args.workers)
    write_sweep_csv(samples, args.trials, label, out)
    d1, d2 = dof_slope(samples)
    print(f'slope {d1:.4f} {d2:.4f} nominal {format_fraction(nominal[0])} {format_fraction(nominal[1])}',
          file=sys.stderr)
    return EXIT_OK


def cmd_surface(args, out):
    _write_csv(('lambda_d', 'lambda_p', 'sum_dof'), surface_rows(_fr(args.grid_step)), out)
    return EXIT_OK


def cmd_tradeoff(args, out):
    _write_csv(('dof', 'lambda_p_min', 'lambda_d_min'), tradeoff_rows(_fr(args.grid_step)), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog='altcsit', description='DoF of the two-user MISO BC with alternating CSIT')
    sub = p.add_subparsers(dest='command', required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument('--out', help='write output to this file instead of stdout')
        return sp

    sp = add('region', cmd_region, 'region, case, corners and sum-DoF of a CSIT distribution')
    sp.add_argument('--pmf', required=True, help='e.g. "DD=1/5,PN=2/5" (PN implies NP)')

    sp = add('compose', cmd_compose, 'time-sharing schedule for a corner or target point')
    sp.add_argument('--pmf', required=True)
    sp.add_argument('--corner', help='P0, P1, P2, P1star or P2star')
    sp.add_argument('--target', help='d1,d2 as fractions, e.g. 3/4,3/4')

    sp = add('verify', cmd_verify, 'rank-check a scheme on random channel draws')
    sp.add_argument('--scheme', required=True)
    sp.add_argument('--trials', type=int, default=1000)
    sp.add_argument('--seed', type=int, required=True)
    sp.add_argument('--swapped', action='store_true', help='exchange receiver roles')

    sp = add('simulate', cmd_simulate, 'Monte Carlo rate sweep (CSV) and DoF slope')
    sp.add_argument('--scheme')
    sp.add_argument('--pmf')
    sp.add_argument('--corner')
    sp.add_argument('--target')
    sp.add_argument('--snr-from', type=float, default=20.0)
    sp.add_argument('--snr-to', type=float, default=60.0)
    sp.add_argument('--snr-step', type=float, default=5.0)
    sp.add_argument('--trials', type=int, default=2000)
    sp.add_argument('--seed', type=int, required=True)
    sp.add_argument('--workers', type=int, default=None)

    sp = add('surface', cmd_surface, 'sum-DoF over the (lambda_D, lambda_P) simplex')
    sp.add_argument('--grid-step', default='1/30')

    sp = add('tradeoff', cmd_tradeoff, 'minimum marginal CSIT per sum-DoF value')
    sp.add_argument('--grid-step', default='1/60')
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out = io.StringIO()
    try:
        code = args.func(args, out)
    except UsageError as exc:
        print(f'altcsit: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    except (InvalidPmf, ValueError) as exc:
        print(f'altcsit: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    except (OutsideRegion, WrongCase) as exc:
        print(f'altcsit: error: {exc}', file=sys.stderr)
        return EXIT_DOMAIN
    except DegenerateChannel as exc:
        print(f'altcsit: error: {exc}', file=sys.stderr)
        return EXIT_SIM
    if args.out:
        with open(args.out, 'w') as fh:
            fh.write(out.getvalue())
    else:
        sys.stdout.write(out.getvalue())
    return code


if __name__ == '__main__':
    sys.exit(main())
