"""
Finite-SNR evaluation of schemes and schedules.

A trace is a linear model per receiver, ``y = sqrt(P) (M_u u + M_v v) + z``
with unit-variance noise and unit-power Gaussian symbols. The rate credited
to receiver 1 is the Gaussian mutual information between its own symbols and
its observations, normalized by the number of slots:

    R1 = [log2 det(I + P M M^H) - log2 det(I + P M_v M_v^H)] / n

and symmetrically for receiver 2. Its slope in log2(P) is the rank
difference that :func:`altcsit.schemes.check_decodable` tests.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from .composer import Schedule
from .errors import DegenerateChannel
from .schemes import ZERO_NORM, ChannelRealization, SchemeRef, build_trace

__all__ = [
    'RateSample', 'SweepConfig', 'draw_channels', 'trial_rng', 'trace_rates',
    'rate_sweep', 'dof_slope', 'write_sweep_csv', 'read_sweep_csv',
    'MAX_REDRAWS',
]

MAX_REDRAWS = 8


@dataclass(frozen=True)
class RateSample:
    snr_db: float
    rate1: float
    rate2: float


@dataclass(frozen=True)
class SweepConfig:
    snr_grid_db: tuple
    trials_per_point: int
    seed: int

    def __post_init__(self):
        grid = tuple(float(x) for x in self.snr_grid_db)
        object.__setattr__(self, 'snr_grid_db', grid)
        if len(grid) < 2:
            raise ValueError('SNR grid needs at least two points')
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise ValueError('SNR grid must be strictly ascending')
        if not np.allclose(steps, steps[0], rtol=0, atol=1e-9):
            raise ValueError('SNR grid must be uniformly spaced')
        if self.trials_per_point < 1:
            raise ValueError('trials_per_point must be positive')
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError('seed must be a 64-bit unsigned integer')

    @classmethod
    def from_range(cls, start: float, stop: float, step: float, trials: int, seed: int) -> SweepConfig:
        n = int(round((stop - start) / step)) + 1
        return cls(tuple(start + i * step for i in range(n)), trials, seed)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, derived from the sweep seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(trial),)))


def _draw(rng: np.random.Generator, n_slots: int) -> ChannelRealization:
    for _ in range(MAX_REDRAWS + 1):
        z = rng.standard_normal((2, n_slots, 2)) + 1j * rng.standard_normal((2, n_slots, 2))
        z /= np.sqrt(2)
        norms = np.linalg.norm(z, axis=2)
        if np.all(norms >= ZERO_NORM):
            return ChannelRealization(z[0], z[1], exact=False)
    raise DegenerateChannel(f'zero channel vector after {MAX_REDRAWS} redraws')


def draw_channels(seed: int, n_slots: int) -> ChannelRealization:
    """i.i.d. CN(0, 1) channel rows for both receivers, deterministic in `seed`."""
    if n_slots < 1:
        raise ValueError('n_slots must be >= 1')
    return _draw(np.random.default_rng(seed), n_slots)


def _logdet_curve(M: np.ndarray, snr: np.ndarray) -> np.ndarray:
    if M.size == 0 or not M.shape[1]:
        return np.zeros_like(snr)
    eig = np.clip(np.linalg.eigvalsh(M @ M.conj().T), 0.0, None)
    return np.sum(np.log2(1.0 + np.outer(snr, eig)), axis=1)


def trace_rates(trace, snr: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-receiver rates (bits per channel use) of one trace at linear SNRs."""
    n = trace.slots
    r1 = (_logdet_curve(trace.M1, snr) - _logdet_curve(trace.M1[:, trace.v_cols], snr)) / n
    r2 = (_logdet_curve(trace.M2, snr) - _logdet_curve(trace.M2[:, trace.u_cols], snr)) / n
    # mutual information is nonnegative; clip eigen round-off
    return np.maximum(r1, 0.0), np.maximum(r2, 0.0)


Target = Union[str, SchemeRef, Schedule]


def _components(target: Target) -> List[Tuple[SchemeRef, float, Tuple[bool, bool]]]:
    if isinstance(target, str):
        target = SchemeRef(target)
    if isinstance(target, SchemeRef):
        return [(target, 1.0, (False, False))]
    return [(r.scheme, float(r.fraction), r.discard) for r in target.rows if r.fraction]


def _run_trials(args) -> np.ndarray:
    comps, snr, seed, trials = args
    out = np.empty((len(trials), 2, len(snr)))
    for k, trial in enumerate(trials):
        rng = trial_rng(seed, trial)
        acc = np.zeros((2, len(snr)))
        for ref, weight, discard in comps:
            spec = ref.spec
            trace = build_trace(ref.id, _draw(rng, spec.slots), ref.swapped)
            r1, r2 = trace_rates(trace, snr)
            if not discard[0]:
                acc[0] += weight * r1
            if not discard[1]:
                acc[1] += weight * r2
        out[k] = acc
    return out


def rate_sweep(target: Target, cfg: SweepConfig, workers: Optional[int] = None) -> List[RateSample]:
    """Average rates over `cfg.trials_per_point` channel draws at each SNR.

    A schedule is evaluated as the fraction-weighted sum of its rows, each row
    on its own channel draw within the trial; this is the per-slot average of
    the block-by-block realization. Trials run in `workers` processes when
    given; the result is identical to the sequential run.
    """
    comps = _components(target)
    snr = 10.0 ** (np.asarray(cfg.snr_grid_db) / 10.0)
    trials = list(range(cfg.trials_per_point))
    if workers and workers > 1:
        chunks = [trials[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_trials, [(comps, snr, cfg.seed, c) for c in chunks]))
        per_trial = np.empty((len(trials), 2, len(snr)))
        for c, part in zip(chunks, parts):
            per_trial[c] = part
    else:
        per_trial = _run_trials((comps, snr, cfg.seed, trials))
    mean = per_trial.mean(axis=0)
    return [RateSample(float(db), float(mean[0, i]), float(mean[1, i]))
            for i, db in enumerate(cfg.snr_grid_db)]


def dof_slope(samples: Sequence[RateSample]) -> Tuple[float, float]:
    """Least-squares slope of each rate against log2(P) over the upper half of the grid."""
    if len(samples) < 2:
        raise ValueError('need at least two samples for a slope')
    db = np.array([s.snr_db for s in samples])
    if np.any(np.diff(db) <= 0):
        raise ValueError('samples must be in ascending SNR order')
    k = max(2, math.ceil(len(samples) / 2))
    top = samples[-k:]
    x = np.array([s.snr_db for s in top]) / 10.0 * math.log2(10.0)
    slopes = []
    for attr in ('rate1', 'rate2'):
        y = np.array([getattr(s, attr) for s in top])
        slopes.append(float(np.polyfit(x, y, 1)[0]))
    return slopes[0], slopes[1]


CSV_COLUMNS = ('snr_db', 'rate1', 'rate2', 'trials', 'scheme_id')


def write_sweep_csv(samples: Iterable[RateSample], trials: int, scheme_id: str,
                    out: Optional[TextIO] = None) -> str:
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(CSV_COLUMNS)
    for s in samples:
        w.writerow([f'{s.snr_db:#.12g}', f'{s.rate1:#.12g}', f'{s.rate2:#.12g}', trials, scheme_id])
    return buf.getvalue() if out is None else ''


def read_sweep_csv(text: str) -> List[RateSample]:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f'expected header {",".join(CSV_COLUMNS)}')
    return [RateSample(float(r['snr_db']), float(r['rate1']), float(r['rate2'])) for r in rows]
