import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from csimap.channel import draw_fast_fading
from csimap.downlink import (
    SINR_CAP,
    ColumnSource,
    HybridChannel,
    asymptotic_sinr,
    downlink_received,
    empirical_sinr,
    precode_conjugate,
    sum_rate,
)

betas = st.floats(1e-6, 1e3)


def test_precode_hand_cases():
    x = np.array([1.0, -2.0, 0.5])
    assert np.array_equal(precode_conjugate(np.eye(3), x), x)
    out = precode_conjugate(np.array([[1j], [0]]), np.array([1.0]))
    assert np.array_equal(out, np.array([-1j, 0]))
    rng = np.random.default_rng(0)
    assert np.all(precode_conjugate(draw_fast_fading(4, 3, rng), np.zeros(3)) == 0)
    with pytest.raises(ValueError):
        precode_conjugate(np.eye(3), np.ones(2))


def test_hybrid_channel_needs_one_tag_per_column():
    HybridChannel(np.zeros((4, 2)), [ColumnSource.ESTIMATED, ColumnSource.PREDICTED])
    with pytest.raises(ValueError):
        HybridChannel(np.zeros((4, 2)), [ColumnSource.STALE])


def test_received_matches_hardening_limit():
    rng = np.random.default_rng(1)
    M, K, P_d = 4096, 2, 4.0
    beta = np.array([1.0, 0.3])
    x = np.array([[1.0, -1.0]])
    errs = []
    for _ in range(50):
        G = draw_fast_fading(M, K, rng) * np.sqrt(beta)
        y = downlink_received(G[None, None], G[None], x, P_d, noise=False)
        target = math.sqrt(P_d) * M * beta * x[0]
        errs.append(np.abs(y[0] - target) / np.abs(target))
    assert np.mean(errs) < 0.1


def test_received_is_noise_without_signal():
    rng = np.random.default_rng(2)
    G = draw_fast_fading(8, 4, rng)[None, None]
    P = G[0]
    y0 = downlink_received(G, P, np.ones((1, 4)), 0.0, noise=False)
    assert np.all(y0 == 0)
    y1 = downlink_received(G, P, np.zeros((1, 4)), 5.0, noise=False)
    assert np.all(y1 == 0)
    y = np.concatenate([downlink_received(G, P, np.zeros((1, 4)), 5.0, rng=rng).ravel()
                        for _ in range(5000)])
    assert abs(np.mean(np.abs(y) ** 2) - 1.0) < 0.05


def test_received_dimension_errors():
    with pytest.raises(ValueError):
        downlink_received(np.zeros((1, 1, 4, 2)), np.zeros((1, 4, 3)), np.ones((1, 2)), 1.0,
                          noise=False)
    with pytest.raises(ValueError):
        downlink_received(np.zeros((1, 1, 4, 2)), np.zeros((1, 4, 2)), np.ones((1, 3)), 1.0,
                          noise=False)


def test_empirical_sinr_grows_with_m():
    rng = np.random.default_rng(3)
    beta = np.array([1.0, 0.5])
    wins = 0
    for _ in range(100):
        s = []
        for M in (64, 4096):
            G = draw_fast_fading(M, 2, rng) * np.sqrt(beta)
            s.append(empirical_sinr(G[None, None], G[None], 10.0)[0, 0])
        wins += s[1] > s[0]
    assert wins >= 95


def test_asymptotic_hand_values():
    assert asymptotic_sinr(1.0, [0.5]) == pytest.approx(4.0, rel=1e-15)
    assert asymptotic_sinr(0.3, [0.3] * 5) == pytest.approx(0.2, rel=1e-15)
    assert asymptotic_sinr(1.0, []) == SINR_CAP
    assert asymptotic_sinr(1.0, [1e-9]) == SINR_CAP
    with pytest.raises(ValueError):
        asymptotic_sinr(0.0, [0.0])
    with pytest.raises(ValueError):
        asymptotic_sinr(-1.0, [1.0])


@given(betas, st.lists(betas, min_size=1, max_size=6), st.floats(1e-3, 1e3))
def test_asymptotic_scale_invariant(own, ints, c):
    a = asymptotic_sinr(own, ints)
    b = asymptotic_sinr(own * c, [v * c for v in ints])
    assert b == pytest.approx(a, rel=1e-9)


@given(betas, st.lists(betas, min_size=1, max_size=6), st.data())
def test_removing_interferer_never_hurts(own, ints, data):
    k = data.draw(st.integers(0, len(ints) - 1))
    fewer = ints[:k] + ints[k + 1:]
    assert asymptotic_sinr(own, fewer) >= asymptotic_sinr(own, ints)


@pytest.mark.parametrize("sinr, total", [([1], 1.0), ([3, 3], 4.0), ([4, 0], math.log2(5))])
def test_sum_rate_hand_values(sinr, total):
    assert sum_rate(sinr).sum_rate == pytest.approx(total, rel=1e-15)


def test_sum_rate_rejects_negative():
    with pytest.raises(ValueError):
        sum_rate([1.0, -0.1])


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=5), st.data())
def test_sum_rate_strictly_increasing(sinr, data):
    k = data.draw(st.integers(0, len(sinr) - 1))
    bump = data.draw(st.floats(1e-3, 1e3))
    higher = list(sinr)
    higher[k] += bump
    assume(higher[k] > sinr[k])
    assert sum_rate(higher).sum_rate > sum_rate(sinr).sum_rate
