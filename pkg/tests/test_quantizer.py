import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csimap.quantizer import (
    Codebook,
    CodebookError,
    Qcsi,
    codebook_distortion,
    codebook_version,
    dequantize,
    design_codebook,
    dumps_codebook,
    lloyd_design,
    load_codebook,
    loads_codebook,
    quantize,
    quantize_many,
    save_codebook,
)

increasing = st.lists(st.floats(0.05, 50.0), min_size=1, max_size=5, unique=True).map(sorted)


@st.composite
def codebooks(draw):
    z = draw(increasing)
    r = draw(increasing)
    gamma = draw(st.floats(1.0, 4.0))
    return Codebook(z, r, gamma)


def test_single_cluster_fixed_point():
    book, hist = lloyd_design(np.full(10, 1.7), 1, 1, 3.8)
    assert book.power_grid[0, 0] == pytest.approx(1.7**2, rel=1e-12)
    assert hist[-1] == pytest.approx(0.0, abs=1e-20)


def test_two_point_set_recovers_both_levels():
    gains = np.sqrt([1.0, 9.0] * 20)
    book, hist = lloyd_design(gains, 2, 1, 2.0)
    assert np.allclose(np.sort(book.power_grid.ravel()), [1.0, 9.0], rtol=1e-12)
    assert hist[-1] < 1e-9


def test_design_errors():
    with pytest.raises(CodebookError):
        design_codebook([], 1, 1, 3.8)
    with pytest.raises(CodebookError, match="exceeds"):
        design_codebook(np.linspace(1, 2, 10), 4, 4, 3.8)


def test_quantize_hand_cases():
    book = Codebook([1.0, 4.0], [1.0], 2.0)
    assert quantize(np.sqrt(2.4), book) == Qcsi(0, 0)
    assert quantize(2.0, book) == Qcsi(1, 0)
    assert quantize(0.0, book) == Qcsi(0, 0)
    # exactly halfway between the two gains goes to the lower index
    assert quantize(1.0, Codebook([0.5, 1.5], [1.0], 2.0)) == Qcsi(0, 0)
    with pytest.raises(ValueError):
        quantize(-1.0, book)


def test_quantize_zero_picks_smallest_gain():
    book = Codebook([1.0, 2.0], [1.0, 3.0], 2.0)
    i, n = quantize(0.0, book)
    assert book.power_grid[i, n] == book.power_grid.min()


def test_dequantize_hand_cases():
    book = Codebook([4.0], [2.0], 2.0, version_id=7)
    assert dequantize((0, 0), book) == (1.0, 1.0)
    for gamma in (1.0, 3.8):
        assert dequantize((0, 0), Codebook([1.0], [1.0], gamma))[1] == 1.0
    with pytest.raises(CodebookError):
        dequantize((0, 0), book, version_id=8)
    with pytest.raises(CodebookError):
        dequantize((1, 0), book)


@given(codebooks())
def test_quantize_dequantize_idempotent(book):
    for i in range(book.I):
        for n in range(book.N):
            g, beta = dequantize((i, n), book)
            q = quantize(g, book)
            # equal induced powers (a degenerate grid) resolve to the lower index
            assert book.power_grid[q] == pytest.approx(beta, rel=1e-12)
            if np.sum(np.isclose(book.power_grid, beta, rtol=1e-12, atol=0)) == 1:
                assert q == (i, n)


@given(codebooks(), st.floats(0, 1))
def test_error_bound(book, u):
    p = np.sort(book.power_grid.ravel())
    x = p[0] + u * (p[-1] - p[0])
    q = quantize(np.sqrt(x), book)
    max_gap = np.max(np.diff(p)) if p.size > 1 else 0.0
    assert abs(x - book.power_grid[q]) <= max_gap / 2 + 1e-12 * p[-1]


@given(codebooks(), st.lists(st.floats(0, 10), min_size=1, max_size=20))
def test_quantize_many_matches_scalar(book, gains):
    ii, nn = quantize_many(gains, book)
    assert [tuple(q) for q in zip(ii, nn)] == [tuple(quantize(g, book)) for g in gains]


def _training(rng, n=2000):
    r = rng.uniform(1.0, 5.0, n)
    z = 10 ** (rng.normal(0, 0.8, n))
    return np.sqrt(z / r**3.8), r


def test_refinement_improves_fidelity():
    gains, dist = _training(np.random.default_rng(0))
    coarse = design_codebook(gains, 2, 2, 3.8, distances=dist)
    fine = design_codebook(gains, 8, 8, 3.8, distances=dist)
    assert codebook_distortion(gains, fine) <= codebook_distortion(gains, coarse)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6))
def test_lloyd_monotone(seed, I, N):
    rng = np.random.default_rng(seed)
    gains, dist = _training(rng, 300)
    _, hist = lloyd_design(gains, I, N, 3.8, distances=dist, rng=rng)
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_codebook_validation():
    with pytest.raises(CodebookError):
        Codebook([2.0, 1.0], [1.0], 2.0)
    with pytest.raises(CodebookError):
        Codebook([1.0, 1.0], [1.0], 2.0)
    with pytest.raises(CodebookError):
        Codebook([0.0], [1.0], 2.0)
    with pytest.raises(CodebookError):
        Codebook([], [1.0], 2.0)
    with pytest.raises(CodebookError):
        Codebook([1.0], [1.0], 0.0)


def test_version_tracks_content():
    a = Codebook([1.0, 2.0], [1.0], 2.0)
    b = Codebook([1.0, 2.5], [1.0], 2.0)
    assert codebook_version(a) != codebook_version(b)
    assert codebook_version(a) == codebook_version(Codebook([1.0, 2.0], [1.0], 2.0))


@given(codebooks(), st.integers(0, 2**32 - 1))
def test_text_round_trip_is_bit_exact(book, version):
    book.version_id = version
    back = loads_codebook(dumps_codebook(book))
    assert back == book
    assert dumps_codebook(back) == dumps_codebook(book)


def test_file_round_trip(tmp_path):
    gains, dist = _training(np.random.default_rng(1), 500)
    book = design_codebook(gains, 4, 3, 3.8, distances=dist)
    save_codebook(book, tmp_path / "cb.txt")
    back = load_codebook(tmp_path / "cb.txt")
    assert back == book
    assert back.version_id == codebook_version(book)


@pytest.mark.parametrize("text, msg", [
    ("", "empty"),
    ("2 1 2.0\n1\n2\n3\n", "header"),
    ("2 1 2.0 0\n1\n2\n", "expected 3"),
    ("2 1 2.0 0\n1\nx\n3\n", "line 3"),
    ("2 1 2.0 0\n2\n1\n3\n", "increasing"),
])
def test_malformed_codebook_text(text, msg):
    with pytest.raises(CodebookError, match=msg):
        loads_codebook(text)
