"""
Time-sharing schedules of constituent schemes that achieve points of the region.

A schedule is a list of rows ``(scheme, fraction)``. Each row may override
the states its slots actually occupy, as long as every occupied state offers
at least the CSIT the scheme asks for in that slot (e.g. S3/2-1 run on PD, DP
uses the DP slot as an NN slot). The per-state usage of a schedule must equal
the input distribution exactly; that, plus the achieved DoF pair, is what
:func:`validate_schedule` checks.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import InfeasibleSystem, OutsideRegion, WrongCase
from .region import (STATES, Case, CsitState, DofPoint, LambdaPmf, as_fraction,
                     case_of, convex_order, format_fraction, marginals,
                     region_from_pmf)
from .schemes import SchemeRef

__all__ = [
    'Subcase', 'Corner', 'FreeVars', 'ScheduleRow', 'Schedule', 'CheckResult',
    'ValidationReport', 'subcase_of', 'solve_free_vars', 'free_var_residuals',
    'compose_corner', 'corner_value', 'compose_point', 'validate_schedule', 'realize_blocks',
    'slot_layout', 'format_schedule', 'parse_schedule',
]

S = CsitState
ZERO = Fraction(0)


class Subcase(enum.Enum):
    A1 = 'A1'
    A2 = 'A2'
    A3 = 'A3'
    B1 = 'B1'
    B2 = 'B2'
    B3 = 'B3'

    @property
    def case(self) -> Case:
        return Case(self.value[0])

    def __str__(self) -> str:
        return self.value


class Corner(enum.Enum):
    P0 = 'P0'
    P1 = 'P1'
    P2 = 'P2'
    P1STAR = 'P1star'
    P2STAR = 'P2star'

    @classmethod
    def parse(cls, label: Union[str, Corner]) -> Corner:
        if isinstance(label, Corner):
            return label
        key = label.strip().replace('*', 'star')
        for c in cls:
            if c.value.lower() == key.lower():
                return c
        raise ValueError(f'unknown corner {label!r}')

    def __str__(self) -> str:
        return self.value


def _terms(pmf: LambdaPmf):
    """(L1, L2, R1, R2) = (NN, PN, 2 DD, 2 PD + DN)."""
    return pmf[S.NN], pmf[S.PN], 2 * pmf[S.DD], 2 * pmf[S.PD] + pmf[S.DN]


def subcase_of(pmf: LambdaPmf) -> Subcase:
    L1, L2, R1, R2 = _terms(pmf)
    within = L1 + L2 <= R1 + R2
    if L1 <= R1 and L2 <= R2:
        return Subcase.A1
    if L1 <= R1:
        return Subcase.A2 if within else Subcase.B2
    if L2 <= R2:
        return Subcase.A3 if within else Subcase.B3
    return Subcase.B1


@dataclass(frozen=True)
class FreeVars:
    q1: Fraction = ZERO
    q2: Fraction = ZERO
    q3: Fraction = ZERO
    q4: Fraction = ZERO


def free_var_residuals(pmf: LambdaPmf, subcase: Subcase, fv: FreeVars) -> Dict[str, Fraction]:
    """Slack of each constraint: ``<=`` rows must be >= 0, ``==`` rows exactly 0."""
    PD, PN, DN, DD, NN = pmf[S.PD], pmf[S.PN], pmf[S.DN], pmf[S.DD], pmf[S.NN]
    q1, q2, q3, q4 = fv.q1, fv.q2, fv.q3, fv.q4
    if subcase is Subcase.A1:
        return {'q1<=PD': PD - q1, 'q2<=2DN': 2 * DN - q2, '2q1+q2/2==PN': 2 * q1 + q2 / 2 - PN}
    if subcase is Subcase.A3:
        return {'q1+q3/2<=PD': PD - q1 - q3 / 2,
                'q2+2q4<=2DN': 2 * DN - q2 - 2 * q4,
                '2q1+q2/2==PN': 2 * q1 + q2 / 2 - PN,
                'q3+q4==NN-2DD': q3 + q4 - (NN - 2 * DD)}
    if subcase is Subcase.B3:
        return {'q1<=3PD': 3 * PD - q1, 'q2<=2DN': 2 * DN - q2,
                '2q1/3+q2/2==PN': 2 * q1 / 3 + q2 / 2 - PN}
    return {}


def _feasible(fv: FreeVars, residuals: Dict[str, Fraction]) -> bool:
    if min(fv.q1, fv.q2, fv.q3, fv.q4) < 0:
        return False
    return all((r == 0) if '==' in name else (r >= 0) for name, r in residuals.items())


def solve_free_vars(pmf: LambdaPmf, subcase: Subcase) -> FreeVars:
    """Deterministic feasible choice of the free variables of A1, A3 and B3.

    The PD/DP pairing is used greedily first (it absorbs two units of PN or
    NN per unit of PD); the DN/ND pairing takes the rest. The other
    sub-cases have no free variables and get all zeros.
    """
    PD, PN, DD, NN = pmf[S.PD], pmf[S.PN], pmf[S.DD], pmf[S.NN]
    if subcase is Subcase.A1:
        q1 = min(PD, PN / 2)
        fv = FreeVars(q1, 2 * (PN - 2 * q1))
    elif subcase is Subcase.A3:
        q1 = min(PD, PN / 2)
        excess = NN - 2 * DD
        q3 = min(excess, 2 * (PD - q1))
        fv = FreeVars(q1, 2 * (PN - 2 * q1), q3, excess - q3)
    elif subcase is Subcase.B3:
        q1 = min(3 * PD, Fraction(3, 2) * PN)
        fv = FreeVars(q1, 2 * (PN - 2 * q1 / 3))
    else:
        return FreeVars()
    if not _feasible(fv, free_var_residuals(pmf, subcase, fv)):
        raise InfeasibleSystem(f'no feasible free variables for {subcase} at {pmf}')
    return fv


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleRow:
    """One time-sharing row.

    ``states`` lists the states the row's slots occupy, in slot order; its
    length must be a multiple of the scheme's slot count (the scheme repeats).
    ``None`` means the scheme's own states. ``discard`` drops the symbols of
    receiver 1 / receiver 2, used for points strictly inside the region.
    """

    scheme: SchemeRef
    fraction: Fraction
    states: Optional[tuple] = None
    discard: Tuple[bool, bool] = (False, False)

    def __post_init__(self):
        object.__setattr__(self, 'fraction', as_fraction(self.fraction))
        if self.states is not None:
            states = tuple(CsitState.parse(s) for s in self.states)
            object.__setattr__(self, 'states', None if states == self.scheme.spec.states else states)

    @property
    def occupied(self) -> tuple:
        return self.states if self.states is not None else self.scheme.spec.states

    @property
    def dof(self) -> Tuple[Fraction, Fraction]:
        d1, d2 = self.scheme.spec.dof_pair
        return (ZERO if self.discard[0] else d1, ZERO if self.discard[1] else d2)

    @property
    def usage(self) -> Dict[CsitState, Fraction]:
        occ = self.occupied
        out: Dict[CsitState, Fraction] = {}
        for s in occ:
            out[s] = out.get(s, ZERO) + Fraction(1, len(occ))
        return out

    def csit_sufficient(self) -> bool:
        need = self.scheme.spec.states
        occ = self.occupied
        if len(occ) % len(need):
            return False
        return all(have.dominates(need[i % len(need)]) for i, have in enumerate(occ))

    def role_swap(self) -> ScheduleRow:
        states = None if self.states is None else tuple(s.swap() for s in self.states)
        return ScheduleRow(self.scheme.role_swap(), self.fraction, states,
                           (self.discard[1], self.discard[0]))

    def scaled(self, w: Fraction) -> ScheduleRow:
        return ScheduleRow(self.scheme, self.fraction * w, self.states, self.discard)

    def key(self):
        return (self.scheme, self.occupied, self.discard)


@dataclass(frozen=True)
class Schedule:
    rows: tuple
    label: str = ''

    def state_usage(self) -> Dict[CsitState, Fraction]:
        usage = {s: ZERO for s in STATES}
        for row in self.rows:
            for s, f in row.usage.items():
                usage[s] += row.fraction * f
        return usage

    def achieved(self) -> Tuple[Fraction, Fraction]:
        """Exact DoF pair; not wrapped in DofPoint so that bad schedules can still be inspected."""
        d1 = sum((r.fraction * r.dof[0] for r in self.rows), ZERO)
        d2 = sum((r.fraction * r.dof[1] for r in self.rows), ZERO)
        return (d1, d2)

    def role_swap(self) -> Schedule:
        return Schedule(tuple(r.role_swap() for r in self.rows), self.label)


def _row(scheme_id, fraction, states=None, swapped=False):
    return ScheduleRow(SchemeRef(scheme_id, swapped), fraction,
                       None if states is None else tuple(S(x) for x in states.split()))


def _table_p1(pmf):
    g = pmf.__getitem__
    return [
        _row('S2', g('PP')),
        _row('S3/2-1', 2 * g('PD'), 'PD DP'),
        _row('S3/2-3', 2 * g('PN')),
        _row('S1', 2 * g('DN'), 'DN ND'),
        _row('S1', g('DD'), 'DD'),
        _row('S1', g('NN')),
    ]


def _table_a1(pmf, fv):
    g = pmf.__getitem__
    return [
        _row('S2', g('PP')),
        _row('S5/3-1', g('PD') - fv.q1),
        _row('S5/3-2', g('PD') - fv.q1),
        _row('S5/3-3', 3 * fv.q1),
        _row('S5/3-4', 3 * fv.q1),
        _row('S3/2-5', fv.q2),
        _row('S3/2-6', fv.q2),
        _row('S4/3-1', g('DD') - g('NN') / 2),
        _row('S4/3-2', Fraction(3, 2) * g('NN')),
        # DN/ND pair at (1/2, 1/2); a DN, ND, NN row here would overuse NN
        _row('S4/3-3', 2 * g('DN') - fv.q2),
    ]


def _table_a2(pmf):
    g = pmf.__getitem__
    surplus = g('PN') - 2 * g('PD') - g('DN')
    return [
        _row('S2', g('PP')),
        _row('S5/3-3', 3 * g('PD')),
        _row('S5/3-4', 3 * g('PD')),
        _row('S3/2-5', 2 * g('DN')),
        _row('S3/2-6', 2 * g('DN')),
        _row('S8/5', Fraction(5, 2) * surplus),
        _row('S4/3-2', Fraction(3, 2) * g('NN')),
        _row('S4/3-1', g('DD') - (g('NN') + surplus) / 2),
    ]


def _table_a3(pmf, fv):
    g = pmf.__getitem__
    pd_left = g('PD') - fv.q1 - fv.q3 / 2
    return [
        _row('S2', g('PP')),
        _row('S5/3-1', pd_left),
        _row('S5/3-2', pd_left),
        _row('S5/3-3', 3 * fv.q1),
        _row('S5/3-4', 3 * fv.q1),
        _row('S3/2-1', fv.q3),
        _row('S3/2-2', fv.q3),
        _row('S3/2-5', fv.q2),
        _row('S3/2-6', fv.q2),
        _row('S4/3-2', 3 * g('DD')),
        _row('S4/3-4', 3 * fv.q4),
        _row('S4/3-3', 2 * g('DN') - fv.q2 - 2 * fv.q4),
    ]


def _table_b1(pmf):
    g = pmf.__getitem__
    return [
        _row('S2', g('PP')),
        _row('S5/3-3', 3 * g('PD')),
        _row('S5/3-4', 3 * g('PD')),
        _row('S3/2-5', 2 * g('DN')),
        _row('S3/2-6', 2 * g('DN')),
        _row('S3/2-3', 2 * (g('PN') - 2 * g('PD') - g('DN'))),
        _row('S4/3-2', 3 * g('DD')),
        _row('S1', g('NN') - 2 * g('DD')),
    ]


def _table_b2(pmf):
    g = pmf.__getitem__
    return [
        _row('S2', g('PP')),
        _row('S5/3-3', 3 * g('PD')),
        _row('S5/3-4', 3 * g('PD')),
        _row('S3/2-5', 2 * g('DN')),
        _row('S3/2-6', 2 * g('DN')),
        _row('S4/3-2', Fraction(3, 2) * g('NN')),
        _row('S8/5', 5 * (g('DD') - g('NN') / 2)),
        _row('S3/2-3', 2 * (g('NN') + g('PN') - 2 * g('DD') - 2 * g('PD') - g('DN'))),
    ]


def _table_b3(pmf, fv):
    g = pmf.__getitem__
    return [
        _row('S2', g('PP')),
        _row('S5/3-3', fv.q1),
        _row('S5/3-4', fv.q1),
        _row('S3/2-5', fv.q2),
        _row('S3/2-6', fv.q2),
        _row('S3/2-1', 2 * (g('PD') - fv.q1 / 3)),
        _row('S3/2-2', 2 * (g('PD') - fv.q1 / 3)),
        _row('S4/3-2', 3 * g('DD')),
        _row('S4/3-4', 3 * (g('DN') - fv.q2 / 2)),
        _row('S1', g('NN') + g('PN') - 2 * g('DD') - 2 * g('PD') - g('DN')),
    ]


def compose_corner(pmf: LambdaPmf, corner: Union[str, Corner]) -> Schedule:
    """Schedule achieving one of the named corner points.

    P0 exists only in case A, P1*/P2* only in case B. P2 and P2* are the
    row-by-row role swap of P1 and P1*.
    """
    corner = Corner.parse(corner)
    case = case_of(marginals(pmf))
    if corner is Corner.P0 and case is not Case.A:
        raise WrongCase('P0 is a corner only in case A (lambda_N <= 2 lambda_D)')
    if corner in (Corner.P1STAR, Corner.P2STAR) and case is not Case.B:
        raise WrongCase(f'{corner} is a corner only in case B (lambda_N > 2 lambda_D)')
    if corner is Corner.P2:
        return Schedule(compose_corner(pmf, Corner.P1).role_swap().rows, 'P2')
    if corner is Corner.P2STAR:
        sub = compose_corner(pmf, Corner.P1STAR)
        return Schedule(sub.role_swap().rows, sub.label.replace('P1star', 'P2star'))
    if corner is Corner.P1:
        return Schedule(tuple(_table_p1(pmf)), 'P1')
    sub = subcase_of(pmf)
    fv = solve_free_vars(pmf, sub)
    rows = {
        Subcase.A1: lambda: _table_a1(pmf, fv),
        Subcase.A2: lambda: _table_a2(pmf),
        Subcase.A3: lambda: _table_a3(pmf, fv),
        Subcase.B1: lambda: _table_b1(pmf),
        Subcase.B2: lambda: _table_b2(pmf),
        Subcase.B3: lambda: _table_b3(pmf, fv),
    }[sub]()
    return Schedule(tuple(rows), f'{sub}:{corner}')


def corner_value(pmf: LambdaPmf, corner: Union[str, Corner]) -> DofPoint:
    """Closed-form DoF pair of a named corner."""
    corner = Corner.parse(corner)
    m = marginals(pmf)
    p, d = m.lambda_p, m.lambda_d
    value = {
        Corner.P0: ((2 + p) / 3, (2 + p) / 3),
        Corner.P1: (Fraction(1), p),
        Corner.P2: (p, Fraction(1)),
        Corner.P1STAR: (1 - d, p + 2 * d),
        Corner.P2STAR: (p + 2 * d, 1 - d),
    }[corner]
    return DofPoint(*value)


def _merge(rows: Sequence[ScheduleRow]) -> tuple:
    merged: Dict = {}
    order = []
    for r in rows:
        k = r.key()
        if k not in merged:
            merged[k] = r
            order.append(k)
        else:
            m = merged[k]
            merged[k] = ScheduleRow(m.scheme, m.fraction + r.fraction, m.states, m.discard)
    return tuple(merged[k] for k in order)


def _vertex_schedule(pmf: LambdaPmf, v: DofPoint) -> Schedule:
    case = case_of(marginals(pmf))
    named = [Corner.P1, Corner.P2] + ([Corner.P0] if case is Case.A else [Corner.P1STAR, Corner.P2STAR])
    for c in named:
        if corner_value(pmf, c) == v:
            return compose_corner(pmf, c)
    p1 = compose_corner(pmf, Corner.P1)
    if v == DofPoint(1, 0):
        discard = (False, True)
        base = p1
    elif v == DofPoint(0, 1):
        discard = (True, False)
        base = compose_corner(pmf, Corner.P2)
    elif v == DofPoint(0, 0):
        discard = (True, True)
        base = p1
    else:
        raise AssertionError(f'vertex {v} has no schedule')
    rows = tuple(ScheduleRow(r.scheme, r.fraction, r.states,
                             (r.discard[0] or discard[0], r.discard[1] or discard[1]))
                 for r in base.rows)
    return Schedule(rows, str(v))


def _barycentric(a: DofPoint, b: DofPoint, c: DofPoint, t: DofPoint):
    det = (b.d1 - a.d1) * (c.d2 - a.d2) - (c.d1 - a.d1) * (b.d2 - a.d2)
    wb = ((t.d1 - a.d1) * (c.d2 - a.d2) - (c.d1 - a.d1) * (t.d2 - a.d2)) / det
    wc = ((b.d1 - a.d1) * (t.d2 - a.d2) - (t.d1 - a.d1) * (b.d2 - a.d2)) / det
    return (1 - wb - wc, wb, wc)


def compose_point(pmf: LambdaPmf, target: DofPoint) -> Schedule:
    """Schedule achieving any point of the region by mixing vertex schedules.

    The polygon is fanned into triangles from its first vertex; the target's
    barycentric weights in the triangle containing it are the mixing weights.
    """
    if not region_from_pmf(pmf).contains(target):
        raise OutsideRegion(f'{target} is outside the DoF region')
    verts = convex_order(region_from_pmf(pmf).vertices())
    for i in range(1, len(verts) - 1):
        tri = (verts[0], verts[i], verts[i + 1])
        w = _barycentric(*tri, target)
        if min(w) >= 0:
            break
    else:
        raise AssertionError('target not covered by the triangle fan')
    rows: List[ScheduleRow] = []
    for weight, v in zip(w, tri):
        if weight:
            rows.extend(r.scaled(weight) for r in _vertex_schedule(pmf, v).rows if r.fraction)
    return Schedule(_merge(rows), f'point{target}')


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: object

    def __str__(self) -> str:
        return f'{self.name} {"pass" if self.passed else "fail"} {_fmt_residual(self.residual)}'


def _fmt_residual(res) -> str:
    if isinstance(res, Fraction):
        return format_fraction(res)
    if isinstance(res, tuple):
        return '(' + ','.join(_fmt_residual(x) for x in res) + ')'
    if isinstance(res, dict):
        return ','.join(f'{k}={_fmt_residual(v)}' for k, v in res.items()) or '0'
    return str(res)


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __str__(self) -> str:
        return '\n'.join(str(c) for c in self.checks)


def validate_schedule(pmf: LambdaPmf, schedule: Schedule, target) -> ValidationReport:
    """Exact checks; failures are reported with their residual, never raised.

    Residuals: most negative fraction; sum minus one; per-state usage minus
    pmf (only nonzero entries, plus ``max`` for the largest magnitude);
    achieved minus target; indices of rows whose occupied states lack the
    CSIT their scheme needs.
    """
    if isinstance(target, DofPoint):
        target = (target.d1, target.d2)
    target = tuple(as_fraction(x) for x in target)
    fracs = [r.fraction for r in schedule.rows]
    most_neg = min([ZERO] + fracs)
    total = sum(fracs, ZERO) - 1
    usage = schedule.state_usage()
    diff = {s: usage[s] - pmf[s] for s in STATES if usage[s] != pmf[s]}
    worst = max((abs(v) for v in diff.values()), default=ZERO)
    usage_res = {str(s): v for s, v in diff.items()}
    usage_res['max'] = worst
    ach = schedule.achieved()
    delta = (ach[0] - target[0], ach[1] - target[1])
    bad_rows = tuple(i for i, r in enumerate(schedule.rows) if not r.csit_sufficient())
    return ValidationReport((
        CheckResult('nonnegative', most_neg >= 0, most_neg),
        CheckResult('sum_to_one', total == 0, total),
        CheckResult('state_usage', not diff, usage_res),
        CheckResult('achieved', delta == (0, 0), delta),
        CheckResult('csit_sufficient', not bad_rows, bad_rows),
    ))


# ---------------------------------------------------------------------------
# block realization
# ---------------------------------------------------------------------------

def realize_blocks(schedule: Schedule) -> Tuple[int, List[Tuple[ScheduleRow, int]]]:
    """Integer block sizes: total slot count and, per row, how many times its
    occupied-state pattern repeats. Zero-fraction rows get zero repeats."""
    units = [r.fraction / len(r.occupied) for r in schedule.rows]
    n = 1
    for u in units:
        n = n * u.denominator // math.gcd(n, u.denominator)
    return n, [(r, int(u * n)) for r, u in zip(schedule.rows, units)]


def slot_layout(schedule: Schedule) -> tuple:
    """Concrete state sequence: each row as one contiguous block."""
    _, blocks = realize_blocks(schedule)
    seq = []
    for row, reps in blocks:
        seq.extend(row.occupied * reps)
    return tuple(seq)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------
#
#   schedule <label>
#   pmf <STATE>=<num/den> ... (all nine)
#   row <scheme_id> <normal|swapped> <num/den> states=<S,S,...> discard=<none|rx1|rx2|both>
#   usage <STATE>=<num/den> ... (all nine)
#   achieved <num/den> <num/den>
#   check <name> <pass|fail> <residual>
#
# ``pmf`` and ``check`` lines are optional. ``usage`` and ``achieved`` are
# derived and ignored by the parser.

_DISCARD = {(False, False): 'none', (True, False): 'rx1', (False, True): 'rx2', (True, True): 'both'}
_DISCARD_INV = {v: k for k, v in _DISCARD.items()}


def format_schedule(schedule: Schedule, pmf: Optional[LambdaPmf] = None,
                    report: Optional[ValidationReport] = None) -> str:
    out = io.StringIO()
    out.write(f'schedule {schedule.label or "-"}\n')
    if pmf is not None:
        out.write(f'pmf {pmf}\n')
    for r in schedule.rows:
        role = 'swapped' if r.scheme.swapped else 'normal'
        states = ','.join(str(s) for s in r.occupied)
        out.write(f'row {r.scheme.id} {role} {format_fraction(r.fraction)} '
                  f'states={states} discard={_DISCARD[r.discard]}\n')
    usage = schedule.state_usage()
    out.write('usage ' + ' '.join(f'{s}={format_fraction(usage[s])}' for s in STATES) + '\n')
    d1, d2 = schedule.achieved()
    out.write(f'achieved {format_fraction(d1)} {format_fraction(d2)}\n')
    if report is not None:
        for c in report.checks:
            out.write(f'check {c}\n')
    return out.getvalue()


def parse_schedule(text: str) -> Tuple[Schedule, Optional[LambdaPmf]]:
    label, pmf, rows = '', None, []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        kind = parts[0]
        if kind == 'schedule':
            label = '' if parts[1] == '-' else parts[1]
        elif kind == 'pmf':
            pmf = LambdaPmf.from_mapping(dict(p.split('=') for p in parts[1:]))
        elif kind == 'row':
            fields = dict(p.split('=', 1) for p in parts[4:])
            states = tuple(CsitState(s) for s in fields['states'].split(','))
            rows.append(ScheduleRow(SchemeRef(parts[1], parts[2] == 'swapped'),
                                    as_fraction(parts[3]), states,
                                    _DISCARD_INV[fields.get('discard', 'none')]))
    return Schedule(tuple(rows), label), pmf
