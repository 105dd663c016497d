"""
Exact DoF region of the two-user MISO broadcast channel with alternating CSIT.

Everything here works on :class:`fractions.Fraction`; there is no floating
point anywhere in this module. The region is a 2-D polygon described by at
most five half-planes plus the nonnegativity of both coordinates, so vertex
enumeration is done by brute force over pairs of constraint lines.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import InvalidPmf

Rational = Union[Fraction, int, str]

__all__ = [
    'CsitState', 'LambdaPmf', 'Marginals', 'DofPoint', 'DofRegion', 'Case',
    'as_fraction', 'marginals', 'region_from_pmf', 'region_from_marginals',
    'regions_equal', 'sum_dof', 'case_of', 'corner_points', 'contains',
    'min_csit', 'format_fraction',
]


def as_fraction(value: Rational) -> Fraction:
    """Convert ints, Fractions and "num/den" strings to a Fraction.

    Floats are rejected on purpose: a float such as 0.1 has no exact
    rational meaning that the caller is likely to intend.
    """
    if isinstance(value, bool):
        raise TypeError('booleans are not rationals')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ValueError(f'not a rational number: {value!r}') from exc
    raise TypeError(f'expected int, Fraction or "num/den" string, got {type(value).__name__}')


def format_fraction(x: Fraction) -> str:
    """'3/2' style string; integers print without denominator."""
    return str(Fraction(x))


class CsitState(enum.Enum):
    """Joint CSIT state I1I2: first letter for user 1, second for user 2."""

    PP = 'PP'
    PD = 'PD'
    DP = 'DP'
    PN = 'PN'
    NP = 'NP'
    DD = 'DD'
    DN = 'DN'
    ND = 'ND'
    NN = 'NN'

    @property
    def user1(self) -> str:
        return self.value[0]

    @property
    def user2(self) -> str:
        return self.value[1]

    def swap(self) -> CsitState:
        return CsitState(self.value[::-1])

    def dominates(self, other: CsitState) -> bool:
        """True if this state offers at least the CSIT of `other` for both users.

        Perfect CSIT implies delayed CSIT (an instantaneous estimate is still
        known later), and anything beats no CSIT.
        """
        rank = {'N': 0, 'D': 1, 'P': 2}
        return (rank[self.user1] >= rank[other.user1]
                and rank[self.user2] >= rank[other.user2])

    @classmethod
    def parse(cls, label: Union[str, CsitState]) -> CsitState:
        if isinstance(label, CsitState):
            return label
        try:
            return cls(label.strip().upper())
        except ValueError as exc:
            raise ValueError(f'unknown CSIT state {label!r}') from exc

    def __str__(self) -> str:
        return self.value


STATES = tuple(CsitState)


@dataclass(frozen=True)
class LambdaPmf:
    """Fraction of time spent in each of the nine CSIT states.

    Construct with :meth:`from_mapping`; the raw constructor expects a tuple
    of nine Fractions in ``STATES`` order.
    """

    fractions: tuple

    def __post_init__(self):
        if len(self.fractions) != len(STATES):
            raise InvalidPmf('need exactly nine state fractions')
        fr = tuple(as_fraction(x) for x in self.fractions)
        object.__setattr__(self, 'fractions', fr)
        if any(x < 0 for x in fr):
            raise InvalidPmf('state fractions must be nonnegative')
        if sum(fr) != 1:
            raise InvalidPmf(f'state fractions sum to {sum(fr)}, not 1')
        for s in (CsitState.PD, CsitState.PN, CsitState.DN):
            if self[s] != self[s.swap()]:
                raise InvalidPmf(f'lambda_{s} != lambda_{s.swap()}')

    @classmethod
    def from_mapping(cls, mapping: Mapping, mirror: bool = False) -> LambdaPmf:
        """Build from ``{state: fraction}``; missing states get zero.

        With ``mirror=True`` an asymmetric state given on one side only is
        copied to its swap (``PD=1/2`` implies ``DP=1/2``).
        """
        values = {s: Fraction(0) for s in STATES}
        given = set()
        for key, val in mapping.items():
            s = CsitState.parse(key)
            values[s] = as_fraction(val)
            given.add(s)
        if mirror:
            for s in list(given):
                t = s.swap()
                if t not in given:
                    values[t] = values[s]
                elif values[t] != values[s]:
                    raise InvalidPmf(f'lambda_{s}={values[s]} but lambda_{t}={values[t]}')
        return cls(tuple(values[s] for s in STATES))

    def __getitem__(self, state: Union[str, CsitState]) -> Fraction:
        return self.fractions[STATES.index(CsitState.parse(state))]

    def as_dict(self) -> dict:
        return dict(zip(STATES, self.fractions))

    def __str__(self) -> str:
        return ' '.join(f'{s}={format_fraction(x)}' for s, x in zip(STATES, self.fractions))


@dataclass(frozen=True)
class Marginals:
    """Total fraction of time a given user has perfect, delayed or no CSIT."""

    lambda_p: Fraction
    lambda_d: Fraction
    lambda_n: Fraction

    def __post_init__(self):
        for name in ('lambda_p', 'lambda_d', 'lambda_n'):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if min(self.lambda_p, self.lambda_d, self.lambda_n) < 0:
            raise InvalidPmf('marginals must be nonnegative')
        if self.lambda_p + self.lambda_d + self.lambda_n != 1:
            raise InvalidPmf('marginals must sum to 1')

    @classmethod
    def from_pd(cls, lambda_p: Rational, lambda_d: Rational) -> Marginals:
        p, d = as_fraction(lambda_p), as_fraction(lambda_d)
        return cls(p, d, 1 - p - d)


@dataclass(frozen=True, order=True)
class DofPoint:
    d1: Fraction
    d2: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'd1', as_fraction(self.d1))
        object.__setattr__(self, 'd2', as_fraction(self.d2))
        if self.d1 < 0 or self.d2 < 0:
            raise ValueError('DoF values are nonnegative')

    def swapped(self) -> DofPoint:
        return DofPoint(self.d2, self.d1)

    def __str__(self) -> str:
        return f'({format_fraction(self.d1)},{format_fraction(self.d2)})'


def _normalize_inequality(a: Fraction, b: Fraction, c: Fraction) -> tuple:
    lead = a if a != 0 else b
    if lead == 0:
        # 0 <= c: either vacuous or infeasible
        if c < 0:
            raise ValueError('inequality 0 <= c with c < 0 makes the region empty')
        return (Fraction(0), Fraction(0), Fraction(0))
    scale = abs(lead)
    return (a / scale, b / scale, c / scale)


@dataclass(frozen=True)
class DofRegion:
    """Polygon ``{(d1, d2) >= 0 : a*d1 + b*d2 <= c for each (a, b, c)}``.

    Inequalities are stored normalized: divided by the magnitude of their
    first nonzero coefficient, deduplicated and sorted.
    """

    inequalities: tuple

    def __post_init__(self):
        rows = set()
        for a, b, c in self.inequalities:
            row = _normalize_inequality(as_fraction(a), as_fraction(b), as_fraction(c))
            # d1 >= 0 and d2 >= 0 are implicit
            if row not in ((0, 0, 0), (-1, 0, 0), (0, -1, 0)):
                rows.add(row)
        object.__setattr__(self, 'inequalities', tuple(sorted(rows)))
        if not all(c >= 0 for _, _, c in self.inequalities):
            raise ValueError('region must contain the origin')

    def _all_constraints(self) -> tuple:
        return self.inequalities + ((Fraction(-1), Fraction(0), Fraction(0)),
                                    (Fraction(0), Fraction(-1), Fraction(0)))

    def contains(self, p: DofPoint) -> bool:
        return all(a * p.d1 + b * p.d2 <= c for a, b, c in self._all_constraints())

    def vertices(self) -> list:
        """All vertices, sorted by d1 then d2.

        Raises ValueError for an unbounded region.
        """
        return _vertices(self._all_constraints())

    def irredundant(self) -> DofRegion:
        """Keep only the inequalities that support an edge of the polygon.

        For a full-dimensional polygon that is exactly the set of rows tight
        at two or more vertices. Degenerate polygons fall back to dropping
        rows one at a time while the vertex set is unchanged.
        """
        reference = self.vertices()
        if len(reference) >= 3:
            return DofRegion(tuple(
                (a, b, c) for a, b, c in self.inequalities
                if sum(a * v.d1 + b * v.d2 == c for v in reference) >= 2))
        kept = list(self.inequalities)
        for row in list(kept):
            trial = [r for r in kept if r != row]
            try:
                verts = DofRegion(tuple(trial)).vertices()
            except ValueError:
                continue
            if verts == reference:
                kept = trial
        return DofRegion(tuple(kept))

    def swapped(self) -> DofRegion:
        return DofRegion(tuple((b, a, c) for a, b, c in self.inequalities))

    def __str__(self) -> str:
        return '; '.join(f'{format_fraction(a)}*d1 + {format_fraction(b)}*d2 <= {format_fraction(c)}'
                         for a, b, c in self.inequalities)


def _vertices(constraints) -> list:
    points = set()
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(constraints, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = (c1 * b2 - c2 * b1) / det
        y = (a1 * c2 - a2 * c1) / det
        if all(a * x + b * y <= c for a, b, c in constraints):
            points.add((x, y))
    # a bounded 2-D polygon has a vertex on each of its extreme directions
    if not points or not _bounded(constraints):
        raise ValueError('region is empty or unbounded')
    return [DofPoint(x, y) for x, y in sorted(points)]


def _bounded(constraints) -> bool:
    # Unbounded iff a nonzero ray r with a*r1 + b*r2 <= 0 for every row exists.
    # Extreme rays of that 2-D cone lie on the constraint lines, so it is
    # enough to test the direction along each line in both orientations.
    rays = set()
    for a, b, _ in constraints:
        rays.add((b, -a))
        rays.add((-b, a))
    for r in rays:
        if r != (0, 0) and all(a * r[0] + b * r[1] <= 0 for a, b, _ in constraints):
            return False
    return True


class Case(enum.Enum):
    """Shape of the region: A when the sum-DoF bound is inactive."""

    A = 'A'
    B = 'B'

    def __str__(self) -> str:
        return self.value


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def marginals(pmf: LambdaPmf) -> Marginals:
    S = CsitState
    lp = pmf[S.PP] + pmf[S.PD] + pmf[S.PN]
    ld = pmf[S.DD] + pmf[S.PD] + pmf[S.DN]
    ln = pmf[S.NN] + pmf[S.PN] + pmf[S.DN]
    return Marginals(lp, ld, ln)


def _region(weighted_bound: Fraction, sum_bound: Fraction) -> DofRegion:
    one = Fraction(1)
    return DofRegion((
        (one, 0, one),
        (0, one, one),
        (one, 2, weighted_bound),
        (2, one, weighted_bound),
        (one, one, sum_bound),
    ))


def region_from_pmf(pmf: LambdaPmf) -> DofRegion:
    """The five bounds written directly in the nine state fractions."""
    S = CsitState
    weighted = 2 + pmf[S.PP] + pmf[S.PD] + pmf[S.PN]
    total = 1 + pmf[S.PP] + 2 * pmf[S.PD] + pmf[S.DD] + pmf[S.PN] + pmf[S.DN]
    return _region(weighted, total)


def region_from_marginals(m: Marginals) -> DofRegion:
    return _region(2 + m.lambda_p, 1 + m.lambda_p + m.lambda_d)


def regions_equal(r1: DofRegion, r2: DofRegion) -> bool:
    return r1.irredundant().inequalities == r2.irredundant().inequalities


def sum_dof(m: Marginals) -> Fraction:
    return min((4 + 2 * m.lambda_p) / 3, 1 + m.lambda_p + m.lambda_d)


def case_of(m: Marginals) -> Case:
    # boundary lambda_N == 2 lambda_D belongs to A: both shapes coincide there
    return Case.A if m.lambda_n <= 2 * m.lambda_d else Case.B


def corner_points(m: Marginals) -> list:
    """Vertices of the region, deduplicated and sorted by (d1, d2)."""
    return region_from_marginals(m).vertices()


def contains(r: DofRegion, p: DofPoint) -> bool:
    return r.contains(p)


def min_csit(dof: Rational) -> tuple:
    """Smallest marginal pair (lambda_P, lambda_D) reaching sum-DoF `dof`."""
    dof = as_fraction(dof)
    if not 0 <= dof <= 2:
        raise ValueError(f'sum-DoF must lie in [0, 2], got {dof}')
    if dof >= Fraction(4, 3):
        return (Fraction(3, 2) * dof - 2, 1 - dof / 2)
    return (Fraction(0), max(dof - 1, Fraction(0)))


def convex_order(points: Iterable[DofPoint]) -> list:
    """Order polygon vertices counter-clockwise around their centroid (exact)."""
    pts = list(points)
    cx = sum(p.d1 for p in pts) / len(pts)
    cy = sum(p.d2 for p in pts) / len(pts)

    def half(p):
        dx, dy = p.d1 - cx, p.d2 - cy
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    def cmp(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        cross = (p.d1 - cx) * (q.d2 - cy) - (p.d2 - cy) * (q.d1 - cx)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(pts, key=functools.cmp_to_key(cmp))
