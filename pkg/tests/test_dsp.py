import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from iedefect.dsp import Spectrum, dominant_frequency, normalize, spectrum
from iedefect.errors import DataError, MethodError
from iedefect.slabdata import TimeSeries
from oracles import naive_dft_magnitudes


@pytest.mark.parametrize("amps, expected", [
    ([0, 5, 10], [0.0, 0.5, 1.0]),
    ([-1, 1], [0.0, 1.0]),
    ([3, 3, 3], [0.0, 0.0, 0.0]),
])
def test_normalize_examples(amps, expected):
    out = normalize(TimeSeries(10.0, amps))
    np.testing.assert_array_equal(out.amplitudes, expected)
    assert out.sample_rate == 10.0


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(arrays(np.float64, st.integers(2, 64), elements=finite))
def test_normalize_range_and_idempotence(x):
    y = normalize(TimeSeries(1.0, x)).amplitudes
    assert y.min() >= 0.0 and y.max() <= 1.0
    if np.ptp(x) > 0:
        assert y.min() == 0.0 and y.max() == 1.0
        np.testing.assert_allclose(normalize(TimeSeries(1.0, y)).amplitudes, y, rtol=0, atol=1e-15)


def test_spectrum_single_tone_matches_oracle():
    t = np.arange(8) / 1000.0
    sp = spectrum(TimeSeries(1000.0, np.cos(2 * np.pi * 250 * t)), detrend=True)
    np.testing.assert_array_equal(sp.freqs, [0, 125, 250, 375, 500])
    # naive DFT oracle: [0, 0, 4, 0, 0]
    np.testing.assert_allclose(sp.mags, [0, 0, 4, 0, 0], atol=1e-12)
    assert int(np.argmax(sp.mags)) == 2


def test_spectrum_constant_signal_is_dc_only():
    sp = spectrum(TimeSeries(100.0, np.full(10, 2.5)), detrend=False)
    assert sp.mags[0] == pytest.approx(25.0)
    np.testing.assert_allclose(sp.mags[1:], 0, atol=1e-12)
    assert np.all(spectrum(TimeSeries(100.0, np.full(10, 2.5)), detrend=True).mags == 0)


def test_spectrum_two_tones_on_bins():
    n = np.arange(16)
    x = np.sin(2 * np.pi * 200 * n / 1600) + 0.5 * np.cos(2 * np.pi * 500 * n / 1600)
    sp = spectrum(TimeSeries(1600.0, x))
    # naive DFT oracle: bin 2 -> 8, bin 5 -> 4, all else 0
    expected = np.zeros(9)
    expected[2], expected[5] = 8.0, 4.0
    np.testing.assert_allclose(sp.mags, expected, atol=1e-12)
    assert set(sp.freqs[sp.mags > 1e-9]) == {200.0, 500.0}


def test_spectrum_rejects_short_signal():
    with pytest.raises(DataError):
        spectrum(TimeSeries(1.0, [1.0]))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 600), seed=st.integers(0, 2**32 - 1), detrend=st.booleans())
def test_spectrum_matches_naive_dft(n, seed, detrend):
    x = np.random.default_rng(seed).normal(size=n)
    sp = spectrum(TimeSeries(1.0, x), detrend=detrend)
    ref = naive_dft_magnitudes(x - x.mean() if detrend else x)
    assert len(sp) == n // 2 + 1
    assert np.max(np.abs(sp.mags - ref)) <= 1e-9 * np.max(ref)
    np.testing.assert_array_equal(sp.freqs, np.arange(n // 2 + 1) / n)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 1000), seed=st.integers(0, 2**32 - 1))
def test_parseval(n, seed):
    x = np.random.default_rng(seed).normal(size=n)
    m = spectrum(TimeSeries(1.0, x), detrend=False).mags
    # expand the one-sided magnitudes back to the full transform
    full = m[0] ** 2 + 2 * np.sum(m[1:(n + 1) // 2] ** 2) + (m[-1] ** 2 if n % 2 == 0 else 0.0)
    assert full / n == pytest.approx(np.sum(x * x), rel=1e-9)


SP = Spectrum([0.0, 250.0, 500.0], [0.1, 2.0, 0.3])


def test_dominant_frequency_examples():
    assert dominant_frequency(SP, None, exclude_dc=True) == 250.0
    assert dominant_frequency(SP, (400, 600)) == 500.0
    assert dominant_frequency(Spectrum([0.0, 250.0, 500.0], [0.1, 2.0, 2.0])) == 250.0


def test_dominant_frequency_dc_handling():
    sp = Spectrum([0.0, 10.0, 20.0], [9.0, 1.0, 2.0])
    assert dominant_frequency(sp, exclude_dc=False) == 0.0
    assert dominant_frequency(sp) == 20.0


def test_dominant_frequency_band_is_closed():
    assert dominant_frequency(SP, (250.0, 250.0)) == 250.0


def test_dominant_frequency_empty_band():
    with pytest.raises(MethodError):
        dominant_frequency(SP, (300, 400))
    with pytest.raises(MethodError):
        dominant_frequency(SP, (0, 0), exclude_dc=True)


@given(mags=arrays(np.int64, 6, elements=st.integers(0, 10**6)), scale=st.integers(1, 1000))
def test_dominant_frequency_scale_invariant(mags, scale):
    # integer magnitudes and scales keep the products exact, so ties survive
    freqs = np.arange(6) * 10.0
    a = dominant_frequency(Spectrum(freqs, mags))
    b = dominant_frequency(Spectrum(freqs, mags * scale))
    assert a == b
