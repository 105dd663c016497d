"""
Constituent schemes and their symbol-level traces.

Each scheme sends ``m1`` symbols ``u1..`` to receiver 1 and ``m2`` symbols
``v1..`` to receiver 2 over a fixed number of slots, each slot tied to a CSIT
state. A trace records the transmit coefficient matrix ``X(t)`` (2 antennas by
``m1 + m2`` symbols) for a given channel draw, together with the noiseless
coefficient rows seen by each receiver:

    M1[t] = H(t) @ X(t),    M2[t] = G(t) @ X(t)

Decodability of a receiver is the rank condition
``rank(M) - rank(M_interference) == number of desired symbols``.

Power: every slot is a sum of streams with disjoint symbol support, each
stream scaled to unit Frobenius norm and then by ``1/sqrt(#streams)``, so the
slot's total transmit power is exactly 1.

Only a handful of schemes have their own builder. The mirror schemes
(S3/2-2, S3/2-4, S3/2-6, S5/3-2, S5/3-4) are produced by the generic role
swap: run the base builder with the two receivers' channels exchanged and
relabel the symbol groups.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import DegenerateChannel
from .region import CsitState, format_fraction

__all__ = [
    'SchemeSpec', 'SchemeRef', 'ChannelRealization', 'SchemeTrace', 'catalog',
    'get_spec', 'build_trace', 'check_decodable', 'interference_rank',
    'swap_roles', 'permitted_channels', 'format_trace', 'parse_trace',
    'ZERO_NORM', 'RANK_RTOL',
]

ZERO_NORM = 1e-12
RANK_RTOL = 1e-9

S = CsitState


@dataclass(frozen=True)
class SchemeSpec:
    id: str
    states: tuple
    m1: int
    m2: int
    mirror: str

    @property
    def slots(self) -> int:
        return len(self.states)

    @property
    def dof_pair(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(self.m1, self.slots), Fraction(self.m2, self.slots))

    @property
    def state_usage(self) -> Dict[CsitState, Fraction]:
        usage: Dict[CsitState, Fraction] = {}
        for s in self.states:
            usage[s] = usage.get(s, Fraction(0)) + Fraction(1, self.slots)
        return usage

    def role_swapped(self) -> SchemeSpec:
        """Spec of this scheme with the two receivers' roles exchanged."""
        return SchemeSpec(self.id, tuple(s.swap() for s in self.states),
                          self.m2, self.m1, self.mirror)


def _spec(id_, states, m1, m2, mirror=None):
    return SchemeSpec(id_, tuple(S(x) for x in states.split()), m1, m2, mirror or id_)


_CATALOG = (
    _spec('S1', 'NN', 1, 0),
    _spec('S2', 'PP', 1, 1),
    _spec('S4/3-1', 'DD DD DD', 2, 2),
    _spec('S4/3-2', 'DD NN NN', 2, 2),
    # two MAT blocks; the idle third slot of each block takes DN / ND to balance 3:3
    _spec('S4/3-3', 'ND DN DN ND DN ND', 4, 4),
    _spec('S4/3-4', 'ND DN NN', 2, 2),
    _spec('S3/2-1', 'PD NN', 2, 1, 'S3/2-2'),
    _spec('S3/2-2', 'DP NN', 1, 2, 'S3/2-1'),
    _spec('S3/2-3', 'PN NP', 2, 1, 'S3/2-4'),
    _spec('S3/2-4', 'NP PN', 1, 2, 'S3/2-3'),
    _spec('S3/2-5', 'ND PN', 2, 1, 'S3/2-6'),
    _spec('S3/2-6', 'DN NP', 1, 2, 'S3/2-5'),
    _spec('S5/3-1', 'PD PD DP', 3, 2, 'S5/3-2'),
    _spec('S5/3-2', 'DP DP PD', 2, 3, 'S5/3-1'),
    _spec('S5/3-3', 'PD PN NP', 3, 2, 'S5/3-4'),
    _spec('S5/3-4', 'DP NP PN', 2, 3, 'S5/3-3'),
    _spec('S8/5', 'DD PN NP PN NP', 4, 4),
)
_BY_ID = {s.id: s for s in _CATALOG}


def catalog() -> list:
    """All 17 constituent schemes."""
    return list(_CATALOG)


def get_spec(scheme_id: str) -> SchemeSpec:
    try:
        return _BY_ID[scheme_id]
    except KeyError:
        raise KeyError(f'unknown scheme {scheme_id!r}') from None


def swap_roles(scheme_id: str) -> str:
    """Catalog id of the role-swapped scheme (self-symmetric schemes map to themselves).

    S1 also maps to itself; its (0, 1) variant is ``SchemeRef('S1', swapped=True)``.
    """
    return get_spec(scheme_id).mirror


@dataclass(frozen=True)
class SchemeRef:
    """A scheme as used in a schedule, optionally with receiver roles exchanged."""

    id: str
    swapped: bool = False

    @property
    def spec(self) -> SchemeSpec:
        base = get_spec(self.id)
        return base.role_swapped() if self.swapped else base

    def role_swap(self) -> SchemeRef:
        mirror = swap_roles(self.id)
        if mirror != self.id:
            return SchemeRef(mirror, self.swapped)
        return SchemeRef(self.id, not self.swapped)

    def __str__(self) -> str:
        return f'{self.id}{"~" if self.swapped else ""}'


# ---------------------------------------------------------------------------
# channels and traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelRealization:
    """Per-slot channel rows: ``H[t]`` to receiver 1, ``G[t]`` to receiver 2.

    ``exact`` marks whether a consumer should treat outputs as noiseless
    (trace mode) or add unit-variance noise (simulation mode).
    """

    H: np.ndarray
    G: np.ndarray
    exact: bool = True

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        G = np.asarray(self.G, dtype=complex)
        if H.ndim != 2 or H.shape[1] != 2 or G.shape != H.shape:
            raise ValueError('H and G must both have shape (n_slots, 2)')
        object.__setattr__(self, 'H', H)
        object.__setattr__(self, 'G', G)
        norms = np.concatenate([np.linalg.norm(H, axis=1), np.linalg.norm(G, axis=1)])
        if np.any(norms < ZERO_NORM):
            raise DegenerateChannel('channel realization contains a zero vector')

    @property
    def n_slots(self) -> int:
        return self.H.shape[0]


@dataclass
class SchemeTrace:
    scheme_id: str
    swapped: bool
    states: tuple
    m1: int
    m2: int
    X: np.ndarray                 # (slots, 2, m1 + m2)
    M1: np.ndarray                # (slots, m1 + m2)
    M2: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        if not self.labels:
            self.labels = tuple(f'u{i + 1}' for i in range(self.m1)) + \
                tuple(f'v{j + 1}' for j in range(self.m2))

    @property
    def u_cols(self) -> slice:
        return slice(0, self.m1)

    @property
    def v_cols(self) -> slice:
        return slice(self.m1, self.m1 + self.m2)

    @property
    def slots(self) -> int:
        return len(self.states)


def permitted_channels(states, t: int) -> set:
    """Channel rows the transmitter may use when forming slot `t`.

    Returns ``{('H', s), ('G', s), ...}``: the current row of each receiver
    with perfect CSIT at `t`, and rows of earlier slots whose state gave that
    receiver delayed CSIT.
    """
    allowed = set()
    for s, state in enumerate(states[:t + 1]):
        for rx, form in (('H', state.user1), ('G', state.user2)):
            if (s == t and form == 'P') or (s < t and form == 'D'):
                allowed.add((rx, s))
    return allowed


def _zf(h: np.ndarray) -> np.ndarray:
    """Unit-norm b with h @ b == 0 for a 2-element row h."""
    nrm = np.linalg.norm(h)
    if nrm < ZERO_NORM:
        raise DegenerateChannel('zero-forcing against a zero channel vector')
    return np.array([h[1], -h[0]]) / nrm


class _Slots:
    """Small helper for writing scheme equations as stream sums."""

    def __init__(self, n_slots: int, n_symbols: int):
        self.k = n_symbols
        self.X = np.zeros((n_slots, 2, n_symbols), dtype=complex)

    def sym(self, j: int) -> np.ndarray:
        e = np.zeros(self.k, dtype=complex)
        e[j] = 1.0
        return e

    def set(self, t: int, *streams: np.ndarray):
        scale = 1.0 / np.sqrt(len(streams))
        out = np.zeros((2, self.k), dtype=complex)
        for st in streams:
            out = out + st * (scale / np.linalg.norm(st))
        self.X[t] = out

    @staticmethod
    def antenna1(row: np.ndarray) -> np.ndarray:
        return np.vstack([row, np.zeros_like(row)])

    @staticmethod
    def beam(b: np.ndarray, row: np.ndarray) -> np.ndarray:
        return np.outer(b, row)

    def pair(self, j1: int, j2: int) -> np.ndarray:
        """Symbols j1, j2 on antennas 1 and 2."""
        return np.vstack([self.sym(j1), self.sym(j2)])


def _heard(h: np.ndarray, stream: np.ndarray) -> np.ndarray:
    """Coefficient row a receiver with channel `h` sees from one stream."""
    return h @ stream


# Builders take (H, G) and return X with symbol columns [u..., v...].

def _build_s1(H, G):
    tx = _Slots(1, 1)
    tx.set(0, tx.antenna1(tx.sym(0)))
    return tx.X


def _build_s2(H, G):
    tx = _Slots(1, 2)
    tx.set(0, tx.beam(_zf(G[0]), tx.sym(0)), tx.beam(_zf(H[0]), tx.sym(1)))
    return tx.X


def _mat_block(tx, H, G, t0, u, v):
    # t0: u pair, overheard by rx2; t0+1: v pair, overheard by rx1;
    # t0+2: sum of both overheard combinations on one antenna.
    us, vs = tx.pair(*u), tx.pair(*v)
    tx.set(t0, us)
    tx.set(t0 + 1, vs)
    side2 = _heard(G[t0], us / np.linalg.norm(us))
    side1 = _heard(H[t0 + 1], vs / np.linalg.norm(vs))
    tx.set(t0 + 2, tx.antenna1(side2 + side1))


def _build_mat(H, G):
    tx = _Slots(3, 4)
    _mat_block(tx, H, G, 0, (0, 1), (2, 3))
    return tx.X


def _build_mat_two_blocks(H, G):
    tx = _Slots(6, 8)
    _mat_block(tx, H, G, 0, (0, 1), (4, 5))
    _mat_block(tx, H, G, 3, (2, 3), (6, 7))
    return tx.X


def _build_s43_2(H, G):
    # t1: u1+v1, u2+v2; t2: A2 (u part overheard by rx2); t3: B1 (v part overheard by rx1)
    tx = _Slots(3, 4)
    us, vs = tx.pair(0, 1), tx.pair(2, 3)
    tx.set(0, us, vs)
    a2 = _heard(G[0], us / np.linalg.norm(us))
    b1 = _heard(H[0], vs / np.linalg.norm(vs))
    tx.set(1, tx.antenna1(a2))
    tx.set(2, tx.antenna1(b1))
    return tx.X


def _build_s32_1(H, G):
    # PD then NN: u pair plus v zero-forced at rx1; then resend rx2's u interference
    tx = _Slots(2, 3)
    us = tx.pair(0, 1)
    tx.set(0, us, tx.beam(_zf(H[0]), tx.sym(2)))
    l2 = _heard(G[0], us / np.linalg.norm(us))
    tx.set(1, tx.antenna1(l2))
    return tx.X


def _build_s32_3(H, G):
    # PN: u1 on antenna 1, v zero-forced at rx1; NP: u1 again plus u2 zero-forced at rx2
    tx = _Slots(2, 3)
    tx.set(0, tx.antenna1(tx.sym(0)), tx.beam(_zf(H[0]), tx.sym(2)))
    tx.set(1, tx.antenna1(tx.sym(0)), tx.beam(_zf(G[1]), tx.sym(1)))
    return tx.X


def _build_s32_5(H, G):
    # ND: u pair; PN: rx2's overheard L2 on antenna 1 plus v zero-forced at rx1
    tx = _Slots(2, 3)
    us = tx.pair(0, 1)
    tx.set(0, us)
    l2 = _heard(G[0], us / np.linalg.norm(us))
    tx.set(1, tx.antenna1(l2), tx.beam(_zf(H[1]), tx.sym(2)))
    return tx.X


def _build_s53_3(H, G):
    # Also serves S5/3-1: PD at slot 2 acts as PN, DP at slot 3 acts as NP.
    tx = _Slots(3, 5)
    us = tx.pair(0, 1)
    tx.set(0, us, tx.beam(_zf(H[0]), tx.sym(3)))
    l2 = tx.antenna1(_heard(G[0], us / np.linalg.norm(us)))
    tx.set(1, l2, tx.beam(_zf(H[1]), tx.sym(4)))
    tx.set(2, l2, tx.beam(_zf(G[2]), tx.sym(2)))
    return tx.X


def _build_s85(H, G):
    # u1..u4 -> cols 0..3, v1..v4 -> cols 4..7
    tx = _Slots(5, 8)
    us, vs = tx.pair(0, 1), tx.pair(4, 5)
    tx.set(0, us, vs)
    b1 = tx.antenna1(_heard(H[0], vs / np.linalg.norm(vs)))
    a2 = tx.antenna1(_heard(G[0], us / np.linalg.norm(us)))
    tx.set(1, b1, tx.beam(_zf(H[1]), tx.sym(6)))    # PN: v3
    tx.set(2, a2, tx.beam(_zf(G[2]), tx.sym(2)))    # NP: u3
    tx.set(3, a2, tx.beam(_zf(H[3]), tx.sym(7)))    # PN: v4
    tx.set(4, b1, tx.beam(_zf(G[4]), tx.sym(3)))    # NP: u4
    return tx.X


_BUILDERS: Dict[str, Callable] = {
    'S1': _build_s1,
    'S2': _build_s2,
    'S4/3-1': _build_mat,
    'S4/3-2': _build_s43_2,
    'S4/3-3': _build_mat_two_blocks,
    'S4/3-4': _build_mat,
    'S3/2-1': _build_s32_1,
    'S3/2-3': _build_s32_3,
    'S3/2-5': _build_s32_5,
    'S5/3-1': _build_s53_3,
    'S5/3-3': _build_s53_3,
    'S8/5': _build_s85,
}


def _role_swapped_X(builder, H, G, m1, m2):
    # builder sends its own "u" (m1 symbols) to whoever sits at its H input
    X = builder(G, H)
    return np.concatenate([X[:, :, m1:], X[:, :, :m1]], axis=2)


def _transmit(scheme_id: str, H, G, swapped: bool) -> np.ndarray:
    spec = get_spec(scheme_id)
    if scheme_id in _BUILDERS:
        builder, m1, m2, base_swapped = _BUILDERS[scheme_id], spec.m1, spec.m2, False
    else:
        base = get_spec(spec.mirror)
        builder, m1, m2, base_swapped = _BUILDERS[base.id], base.m1, base.m2, True
    if base_swapped != swapped:
        return _role_swapped_X(builder, H, G, m1, m2)
    return builder(H, G)


def build_trace(scheme_id: str, channels: ChannelRealization, swapped: bool = False) -> SchemeTrace:
    """Execute a scheme on a channel draw and record all coefficients.

    Only the first ``slots`` rows of the realization are used.
    """
    spec = SchemeRef(scheme_id, swapped).spec
    n = spec.slots
    if channels.n_slots < n:
        raise ValueError(f'{scheme_id} needs {n} slots, realization has {channels.n_slots}')
    H, G = channels.H[:n], channels.G[:n]
    X = _transmit(scheme_id, H, G, swapped)
    M1 = np.einsum('ta,tak->tk', H, X)
    M2 = np.einsum('ta,tak->tk', G, X)
    return SchemeTrace(scheme_id, swapped, spec.states, spec.m1, spec.m2, X, M1, M2)


def _rank(A: np.ndarray, tol: float) -> int:
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sv > tol))


def _receiver_ranks(M: np.ndarray, interference: slice):
    # threshold is relative to the receiver's whole observation, so that
    # structural zeros from zero-forcing (~1e-17) never count as rank
    top = np.linalg.svd(M, compute_uv=False)[0] if M.size else 0.0
    tol = RANK_RTOL * top
    return _rank(M, tol), _rank(M[:, interference], tol)


def check_decodable(trace: SchemeTrace) -> Tuple[bool, bool]:
    r1, i1 = _receiver_ranks(trace.M1, trace.v_cols)
    r2, i2 = _receiver_ranks(trace.M2, trace.u_cols)
    return (r1 - i1 == trace.m1, r2 - i2 == trace.m2)


def interference_rank(trace: SchemeTrace) -> Tuple[int, int]:
    """Dimension occupied by interference at receiver 1 and receiver 2."""
    return (_receiver_ranks(trace.M1, trace.v_cols)[1],
            _receiver_ranks(trace.M2, trace.u_cols)[1])


# ---------------------------------------------------------------------------
# text export
# ---------------------------------------------------------------------------
#
#   trace <scheme_id> <normal|swapped> m1=<int> m2=<int>
#   symbols <label> ...
#   slot <t> <state> | x1: <c> ... | x2: <c> ... | rx1: <c> ... | rx2: <c> ...
#
# One slot per line, t counted from 1. Each <c> is a complex number written
# as ``<re>{+|-}<im>j`` with 12 significant digits in both parts.

def _fmt_c(z: complex) -> str:
    z = complex(z)
    return f'{z.real:.12g}{z.imag:+.12g}j'


def _fmt_row(row) -> str:
    return ' '.join(_fmt_c(z) for z in row)


def format_trace(trace: SchemeTrace) -> str:
    out = io.StringIO()
    role = 'swapped' if trace.swapped else 'normal'
    out.write(f'trace {trace.scheme_id} {role} m1={trace.m1} m2={trace.m2}\n')
    out.write('symbols ' + ' '.join(trace.labels) + '\n')
    for t in range(trace.slots):
        out.write(f'slot {t + 1} {trace.states[t]}'
                  f' | x1: {_fmt_row(trace.X[t, 0])}'
                  f' | x2: {_fmt_row(trace.X[t, 1])}'
                  f' | rx1: {_fmt_row(trace.M1[t])}'
                  f' | rx2: {_fmt_row(trace.M2[t])}\n')
    return out.getvalue()


def parse_trace(text: str) -> SchemeTrace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != 'trace':
        raise ValueError('not a trace document')
    scheme_id, swapped = head[1], head[2] == 'swapped'
    m1 = int(head[3].split('=')[1])
    m2 = int(head[4].split('=')[1])
    labels = tuple(lines[1].split()[1:])
    states, X, M1, M2 = [], [], [], []
    for ln in lines[2:]:
        parts = [p.strip() for p in ln.split('|')]
        _, _, state = parts[0].split()
        states.append(CsitState(state))
        fields = {}
        for p in parts[1:]:
            key, vals = p.split(':', 1)
            fields[key] = [complex(v) for v in vals.split()]
        X.append([fields['x1'], fields['x2']])
        M1.append(fields['rx1'])
        M2.append(fields['rx2'])
    return SchemeTrace(scheme_id, swapped, tuple(states), m1, m2,
                       np.array(X, dtype=complex), np.array(M1, dtype=complex),
                       np.array(M2, dtype=complex), labels)


def describe(spec: SchemeSpec) -> str:
    usage = ', '.join(f'{s}:{format_fraction(f)}' for s, f in spec.state_usage.items())
    d1, d2 = spec.dof_pair
    return f'{spec.id}: slots={spec.slots} [{usage}] dof=({format_fraction(d1)},{format_fraction(d2)})'
