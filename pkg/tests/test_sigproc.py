import numpy as np
import pytest

from uaconvert.core import Signal
from uaconvert.errors import SignalError
from uaconvert.sigproc import (
    PreprocessSteps,
    butterworth_bandpass_zerophase,
    detrend,
    preprocess,
    resample,
    synth_quasiperiodic,
    znormalize,
)


def _sine(freq_hz: float, rate_hz: float, duration_s: float) -> Signal:
    t = np.arange(int(round(rate_hz * duration_s))) / rate_hz
    return Signal(np.sin(2 * np.pi * freq_hz * t), rate_hz)


def _middle(x: np.ndarray, frac: float = 0.2) -> np.ndarray:
    k = int(len(x) * frac)
    return x[k : len(x) - k]


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x**2)))


def test_resample_same_rate_is_identity():
    sig = _sine(3.0, 125.0, 2.0)
    assert resample(sig, 125.0) is sig


def test_resample_keeps_dc_and_length():
    sig = Signal(np.full(1000, 2.0), 500.0)
    out = resample(sig, 125.0)
    assert out.d == 250 and out.sample_rate_hz == 125.0
    assert np.allclose(out.values, 2.0, atol=1e-4)


def test_resample_preserves_a_sine():
    out = resample(_sine(5.0, 250.0, 4.0), 125.0)
    spectrum = np.abs(np.fft.rfft(out.values))
    freqs = np.fft.rfftfreq(out.d, 1.0 / out.sample_rate_hz)
    k = int(np.argmax(spectrum))
    assert abs(freqs[k] - 5.0) <= 0.1
    assert 2.0 * spectrum[k] / out.d == pytest.approx(1.0, rel=0.02)


def test_resample_refuses_large_upsampling():
    with pytest.raises(SignalError):
        resample(_sine(1.0, 10.0, 1.0), 100.0)


def test_bandpass_passes_10hz_without_phase_shift():
    sig = _sine(10.0, 125.0, 8.0)
    out = butterworth_bandpass_zerophase(sig)
    a, b = _middle(sig.values), _middle(out.values)
    gain_db = 20 * np.log10(_rms(b) / _rms(a))
    assert abs(gain_db) <= 1.0
    xcorr = np.correlate(b, a, mode="full")
    lag = int(np.argmax(xcorr)) - (len(a) - 1)
    assert abs(lag) <= 1


@pytest.mark.parametrize("freq_hz, duration_s", [(0.1, 200.0), (60.0, 8.0)])
def test_bandpass_stopbands(freq_hz, duration_s):
    sig = _sine(freq_hz, 125.0, duration_s)
    out = butterworth_bandpass_zerophase(sig)
    gain_db = 20 * np.log10(_rms(_middle(out.values)) / _rms(_middle(sig.values)))
    assert gain_db <= -20.0


def test_bandpass_validates_edges():
    with pytest.raises(SignalError):
        butterworth_bandpass_zerophase(_sine(1.0, 80.0, 2.0), 1.0, 47.0)
    with pytest.raises(SignalError):
        butterworth_bandpass_zerophase(_sine(1.0, 125.0, 2.0), 10.0, 5.0)


def test_detrend_removes_a_ramp():
    ramp = Signal(3.0 * np.arange(50) - 7.0, 10.0)
    assert np.allclose(detrend(ramp).values, 0.0, atol=1e-10)


def test_znormalize():
    out = znormalize(Signal([1.0, 2.0, 3.0, 4.0]))
    assert abs(out.values.mean()) < 1e-12
    assert abs(out.values.std() - 1.0) < 1e-12
    with pytest.raises(SignalError):
        znormalize(Signal([5.0, 5.0, 5.0]))


@pytest.mark.parametrize("kind", ["spiky", "smooth"])
def test_synth_without_jitter_is_periodic(kind, stream):
    sig = synth_quasiperiodic(kind, 100.0, 5.0, 1.0, 0.0, stream(1))
    assert sig.d == 500
    assert np.allclose(sig.values[100:300], sig.values[200:400], atol=1e-9)


def test_synth_is_reproducible_and_validates(stream):
    a = synth_quasiperiodic("spiky", 250.0, 3.0, 1.2, 0.02, stream(2), noise=0.05)
    b = synth_quasiperiodic("spiky", 250.0, 3.0, 1.2, 0.02, stream(2), noise=0.05)
    assert np.array_equal(a.values, b.values)
    with pytest.raises(ValueError):
        synth_quasiperiodic("square", 250.0, 3.0, 1.2, 0.0, stream(2))


def test_preprocess_pipeline(stream):
    raw = synth_quasiperiodic("smooth", 500.0, 10.0, 1.1, 0.01, stream(3), noise=0.02)
    out = preprocess(raw, PreprocessSteps())
    assert out.sample_rate_hz == 125.0 and out.d == 1250
    assert abs(out.values.mean()) < 1e-12
    assert abs(out.values.std() - 1.0) < 1e-12

    skipped = preprocess(raw, PreprocessSteps(target_rate_hz=None, bandpass=False))
    assert skipped.sample_rate_hz == 500.0
