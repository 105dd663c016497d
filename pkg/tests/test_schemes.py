from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from altcsit.errors import DegenerateChannel
from altcsit.region import CsitState as S
from altcsit.schemes import (ChannelRealization, SchemeRef, SchemeTrace,
                             build_trace, catalog, check_decodable, describe,
                             format_trace, get_spec, interference_rank,
                             parse_trace, permitted_channels, swap_roles)
from conftest import causality_violations, random_channels

GOLDEN = Path(__file__).parent / 'golden'
IDS = [s.id for s in catalog()]


def rank(A, tol=1e-9):
    sv = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], 1e-300))) if A.size else 0


# --- catalog ----------------------------------------------------------------

def test_catalog_shape():
    specs = catalog()
    assert len(specs) == 17
    assert len(set(IDS)) == 17


def test_catalog_lookups():
    s2 = get_spec('S2')
    assert (s2.slots, s2.states, s2.dof_pair) == (1, (S.PP,), (1, 1))
    s = get_spec('S5/3-3')
    assert (s.slots, s.states, s.dof_pair) == (3, (S.PD, S.PN, S.NP), (1, F(2, 3)))
    s = get_spec('S8/5')
    assert (s.slots, s.m1, s.m2, s.dof_pair) == (5, 4, 4, (F(4, 5), F(4, 5)))
    assert s.states == (S.DD, S.PN, S.NP, S.PN, S.NP)


def test_unknown_scheme():
    with pytest.raises(KeyError):
        get_spec('S9')


@pytest.mark.parametrize('sid', IDS)
def test_dof_pair_and_usage(sid):
    s = get_spec(sid)
    assert s.dof_pair == (F(s.m1, s.slots), F(s.m2, s.slots))
    assert sum(s.state_usage.values()) == 1
    assert s.m1 + s.m2 <= 2 * s.slots or sid == 'S1'
    assert describe(s)


@pytest.mark.parametrize('sid, expected', [
    ('S3/2-1', 'S3/2-2'), ('S4/3-1', 'S4/3-1'), ('S5/3-3', 'S5/3-4'),
])
def test_swap_roles_examples(sid, expected):
    assert swap_roles(sid) == expected


@pytest.mark.parametrize('sid', IDS)
def test_swap_roles_involution(sid):
    assert swap_roles(swap_roles(sid)) == sid
    a, b = get_spec(sid), get_spec(swap_roles(sid))
    if sid != 'S1':
        assert b.dof_pair == a.dof_pair[::-1]
    ref = SchemeRef(sid)
    assert ref.role_swap().role_swap() == ref
    assert ref.role_swap().spec.dof_pair == a.dof_pair[::-1]


def test_s1_swap_uses_role_flag():
    ref = SchemeRef('S1').role_swap()
    assert ref.swapped and ref.spec.dof_pair == (0, 1)


# --- traces -----------------------------------------------------------------

def test_s2_zero_forcing():
    t = build_trace('S2', random_channels(np.random.default_rng(3), 1))
    assert abs(t.M1[0, 1]) < 1e-14 and abs(t.M2[0, 0]) < 1e-14
    assert abs(t.M1[0, 0]) > 1e-3 and abs(t.M2[0, 1]) > 1e-3
    assert check_decodable(t) == (True, True)


def test_s32_3_by_hand():
    # u1 on antenna 1 in both slots; v zero-forced at rx1 in slot 1;
    # u2 zero-forced at rx2 in slot 2; each slot splits power over two streams
    rng = np.random.default_rng(11)
    ch = random_channels(rng, 2)
    t = build_trace('S3/2-3', ch)
    h0, h1, g0, g1 = ch.H[0], ch.H[1], ch.G[0], ch.G[1]
    r = 1 / np.sqrt(2)
    det = lambda a, b: a[0] * b[1] - a[1] * b[0]
    assert t.M1.shape == (2, 3)
    # columns: u1, u2, v
    assert np.allclose(t.M1[0], [r * h0[0], 0, 0])
    assert np.isclose(abs(t.M2[0, 2]), r * abs(det(h0, g0)) / np.linalg.norm(h0))
    assert np.isclose(t.M2[0, 0], r * g0[0]) and t.M2[0, 1] == 0
    assert np.isclose(t.M1[1, 0], r * h1[0])
    assert np.isclose(abs(t.M1[1, 1]), r * abs(det(g1, h1)) / np.linalg.norm(g1))
    assert np.allclose(t.M2[1], [r * g1[0], 0, 0])
    assert check_decodable(t) == (True, True)


def test_s85_interference_rank_one():
    for seed in range(20):
        t = build_trace('S8/5', random_channels(np.random.default_rng(seed), 5))
        assert interference_rank(t) == (1, 1)
        assert rank(t.M1[:, t.v_cols]) == 1


def test_mat_side_information_structure():
    # rx2 sees the u-part only in slots 1 and 3, and both rows are the same
    # combination; dropping it leaves rx2's own symbols in slots 2 and 3
    for seed in range(20):
        t = build_trace('S4/3-1', random_channels(np.random.default_rng(seed), 3))
        u, v = t.u_cols, t.v_cols
        assert np.allclose(t.M2[1, u], 0)
        assert rank(t.M2[[0, 2]][:, u]) == 1
        a = t.M2[0, u]
        proj = t.M2[2] - (t.M2[2, u] @ a.conj() / (a @ a.conj())) * t.M2[0]
        assert rank(np.vstack([t.M2[1, v], proj[v]])) == 2
        # mirror image at rx1 with slots 2 and 3
        assert np.allclose(t.M1[0, v], 0)
        assert rank(t.M1[[1, 2]][:, v]) == 1


def test_mat_golden_by_hand():
    t = parse_trace((GOLDEN / 'mat_integer_channels.trace').read_text())
    r = 1 / np.sqrt(2)
    # slot 1: (u1, u2) on the two antennas, slot 2: (v1, v2)
    assert np.allclose(t.X[0], [[r, 0, 0, 0], [0, r, 0, 0]])
    assert np.allclose(t.X[1], [[0, 0, r, 0], [0, 0, 0, r]])
    # G(1)=(0,1) overhears u2, H(2)=(0,1) overhears v2; slot 3 sends their sum
    assert np.allclose(t.X[2], [[0, r, 0, r], [0, 0, 0, 0]])


@pytest.mark.parametrize('name, sid', [
    ('s85_integer_channels.trace', 'S8/5'), ('mat_integer_channels.trace', 'S4/3-1'),
])
def test_golden_traces(name, sid):
    golden = parse_trace((GOLDEN / name).read_text())
    fresh = build_trace(sid, _golden_channels(sid))
    assert golden.scheme_id == sid and golden.states == fresh.states
    assert golden.labels == fresh.labels
    for a in ('X', 'M1', 'M2'):
        assert np.allclose(getattr(golden, a), getattr(fresh, a), atol=1e-10)


def _golden_channels(sid):
    if sid == 'S8/5':
        H = [[1, 2], [2, -1], [1, 1j], [3, 1], [1, -2j]]
        G = [[2, 1], [1, 1], [-1, 2], [1j, 1], [2, 3]]
    else:
        H = [[1, 0], [0, 1], [1, 1]]
        G = [[0, 1], [1, 1], [1, -1]]
    return ChannelRealization(np.array(H), np.array(G))


@pytest.mark.parametrize('sid', IDS)
@pytest.mark.parametrize('swapped', [False, True])
def test_trace_text_round_trip(sid, swapped):
    t = build_trace(sid, random_channels(np.random.default_rng(5), 6), swapped)
    back = parse_trace(format_trace(t))
    assert (back.scheme_id, back.swapped, back.states, back.m1, back.m2) == \
        (t.scheme_id, t.swapped, t.states, t.m1, t.m2)
    assert np.allclose(back.X, t.X, atol=1e-11) and np.allclose(back.M2, t.M2, atol=1e-10)


@pytest.mark.parametrize('sid', IDS)
@pytest.mark.parametrize('swapped', [False, True])
def test_unit_power_per_slot(sid, swapped):
    t = build_trace(sid, random_channels(np.random.default_rng(9), 6), swapped)
    assert np.allclose(np.sum(np.abs(t.X) ** 2, axis=(1, 2)), 1.0)


@pytest.mark.parametrize('sid', IDS)
@pytest.mark.parametrize('swapped', [False, True])
def test_decodable_on_random_draws(sid, swapped):
    rng = np.random.default_rng(17)
    for _ in range(50):
        t = build_trace(sid, random_channels(rng, 6), swapped)
        assert check_decodable(t) == (True, True)


@given(st.sampled_from(IDS), st.booleans(), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_decodable_property(sid, swapped, seed):
    t = build_trace(sid, random_channels(np.random.default_rng(seed), 6), swapped)
    assert check_decodable(t) == (True, True)


def test_degenerate_trace_not_decodable():
    M1 = np.array([[1, 2, 3], [1, 2, 3]], dtype=complex)   # slot 2 repeats slot 1
    M2 = np.array([[0, 0, 1], [1, 0, 1]], dtype=complex)
    t = SchemeTrace('hand', False, (S.PP, S.PP), 2, 1, np.zeros((2, 2, 3)), M1, M2)
    assert check_decodable(t)[0] is False


def test_zero_channel_rejected():
    with pytest.raises(DegenerateChannel):
        ChannelRealization(np.zeros((1, 2)), np.ones((1, 2)))


def test_permitted_channels_strict():
    states = (S.PD, S.NN, S.DP)
    assert permitted_channels(states, 0) == {('H', 0)}
    assert permitted_channels(states, 1) == {('G', 0)}
    assert permitted_channels(states, 2) == {('G', 0), ('G', 2)}


@pytest.mark.parametrize('sid', IDS)
@pytest.mark.parametrize('swapped', [False, True])
def test_causality(sid, swapped):
    assert causality_violations(sid, swapped, np.random.default_rng(23), 6) == []


def test_causality_detector_catches_a_leak(monkeypatch):
    from altcsit import schemes

    def peeking(H, G):
        # zero-forces slot 1 against the *future* rx1 channel
        X = schemes._build_s32_3(H, G)
        X[0, :, 2] = schemes._zf(H[1]) / np.sqrt(2)
        return X

    monkeypatch.setitem(schemes._BUILDERS, 'S3/2-3', peeking)
    bad = causality_violations('S3/2-3', False, np.random.default_rng(2), 2)
    assert (0, 'H', 1) in bad
