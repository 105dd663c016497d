import random
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from altcsit.region import LambdaPmf
from altcsit.schemes import ChannelRealization, build_trace, permitted_channels

# one-sided classes and how many of the nine states each one covers
CLASSES = (('PP', 1), ('PD', 2), ('PN', 2), ('DD', 1), ('DN', 2), ('NN', 1))


def pmf(**kw) -> LambdaPmf:
    """pmf(PD='1/2') with asymmetric entries mirrored."""
    return LambdaPmf.from_mapping(kw, mirror=True)


def _from_counts(counts, den) -> LambdaPmf:
    return LambdaPmf.from_mapping({k: Fraction(c, den) for k, c in counts.items()}, mirror=True)


def random_pmf(rng: random.Random, max_den: int = 60) -> LambdaPmf:
    """Symmetric rational pmf with denominator at most `max_den`.

    Each class is switched off with probability 0.3 so that boundary and
    sparse configurations (and hence every sub-case) show up often.
    """
    den = rng.randint(1, max_den)
    active = {k for k, _ in CLASSES if rng.random() > 0.3}
    budget = den
    counts = {}
    for k in rng.sample(['PD', 'PN', 'DN'], 3):
        counts[k] = rng.randint(0, budget // 2) if k in active else 0
        budget -= 2 * counts[k]
    singles = [k for k in ('PP', 'DD', 'NN') if k in active] or ['NN']
    cuts = sorted(rng.randint(0, budget) for _ in range(len(singles) - 1))
    for k, lo, hi in zip(singles, [0] + cuts, cuts + [budget]):
        counts[k] = hi - lo
    return _from_counts(counts, den)


@st.composite
def pmfs(draw, max_den: int = 60):
    den = draw(st.integers(1, max_den))
    budget = den
    counts = {}
    for k in ('PD', 'PN', 'DN'):
        counts[k] = draw(st.integers(0, budget // 2))
        budget -= 2 * counts[k]
    a = draw(st.integers(0, budget))
    b = draw(st.integers(0, budget - a))
    counts.update(PP=a, DD=b, NN=budget - a - b)
    return _from_counts(counts, den)


def random_channels(rng: np.random.Generator, n: int) -> ChannelRealization:
    z = rng.standard_normal((2, n, 2)) + 1j * rng.standard_normal((2, n, 2))
    return ChannelRealization(z[0], z[1])


def causality_violations(scheme_id: str, swapped: bool, rng: np.random.Generator, n: int):
    """Perturb every forbidden channel row, one at a time, and report any
    slot whose transmit coefficients change. Returns a list of
    (slot, receiver, row) triples; empty means causal."""
    ch = random_channels(rng, n)
    base = build_trace(scheme_id, ch, swapped)
    bad = []
    for t in range(base.slots):
        allowed = permitted_channels(base.states, t)
        for rx in ('H', 'G'):
            for s in range(base.slots):
                if (rx, s) in allowed:
                    continue
                H, G = ch.H.copy(), ch.G.copy()
                target = H if rx == 'H' else G
                target[s] += rng.standard_normal(2) + 1j * rng.standard_normal(2)
                moved = build_trace(scheme_id, ChannelRealization(H, G), swapped)
                if not np.array_equal(moved.X[t], base.X[t]):
                    bad.append((t, rx, s))
    return bad


# acceptance lines, echoed in the terminal summary so they survive output capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
