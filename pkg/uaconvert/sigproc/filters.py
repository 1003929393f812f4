from __future__ import annotations

import logging
from fractions import Fraction
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import signal as sps

from ..core.schema import Signal
from ..errors import SignalError

logger = logging.getLogger(__name__)

MAX_UPSAMPLE = 4.0
SETTLE_DECAY = 1e-4


def resample(sig: Signal, target_rate_hz: float) -> Signal:
    """
    Band-limited rate change (polyphase windowed sinc, Kaiser window, cutoff at
    the lower Nyquist). Output length is round(d * target / source).
    """
    source = sig.sample_rate_hz
    if target_rate_hz <= 0:
        raise SignalError(f"target rate must be positive, got {target_rate_hz}")
    if target_rate_hz > MAX_UPSAMPLE * source:
        raise SignalError(
            f"target rate {target_rate_hz} Hz exceeds {MAX_UPSAMPLE:g}x the source rate {source} Hz"
        )
    if target_rate_hz == source:
        return sig
    ratio = Fraction(target_rate_hz / source).limit_denominator(1000)
    out = sps.resample_poly(
        sig.values, ratio.numerator, ratio.denominator, window=("kaiser", 5.0), padtype="line"
    )
    n_out = int(round(sig.d * target_rate_hz / source))
    if out.size >= n_out:
        out = out[:n_out]
    else:
        out = np.concatenate([out, np.full(n_out - out.size, out[-1])])
    return Signal(out, target_rate_hz)


def _settling_length(sos: np.ndarray) -> int:
    """Samples until the slowest pole's impulse response decays below SETTLE_DECAY."""
    _, poles, _ = sps.sos2zpk(sos)
    radius = float(np.max(np.abs(poles))) if poles.size else 0.0
    if radius <= 0.0:
        return 1
    return int(np.ceil(np.log(SETTLE_DECAY) / np.log(radius)))


def butterworth_bandpass_zerophase(
    sig: Signal, low_hz: float = 1.0, high_hz: float = 47.0, order: int = 3
) -> Signal:
    """
    Butterworth bandpass (bilinear transform, second-order sections) applied
    forward then backward. Edges are reflection-padded by three settling lengths.
    """
    nyquist = sig.sample_rate_hz / 2.0
    if not 0.0 < low_hz < high_hz < nyquist:
        raise SignalError(f"need 0 < low ({low_hz}) < high ({high_hz}) < Nyquist ({nyquist})")
    sos = sps.butter(
        order, [low_hz, high_hz], btype="bandpass", fs=sig.sample_rate_hz, output="sos"
    )
    pad = min(3 * _settling_length(sos), sig.d - 1)
    x = sig.values
    if pad > 0:
        x = np.pad(x, pad, mode="reflect")
    y = sps.sosfilt(sos, x)
    y = sps.sosfilt(sos, y[::-1])[::-1]
    if pad > 0:
        y = y[pad:-pad]
    return sig.with_values(y)


def detrend(sig: Signal) -> Signal:
    """Subtract the least-squares line."""
    if sig.d < 2:
        raise SignalError("detrend needs at least 2 samples")
    return sig.with_values(sps.detrend(sig.values, type="linear"))


def znormalize(sig: Signal) -> Signal:
    """Zero mean, unit population standard deviation."""
    x = sig.values
    std = float(np.std(x))
    if std == 0.0 or not np.isfinite(std):
        raise SignalError("cannot z-normalize a signal with zero variance")
    return sig.with_values((x - x.mean()) / std)


class PreprocessSteps(BaseModel):
    """Pipeline order: resample, bandpass, detrend, z-normalize; each step optional."""

    model_config = ConfigDict(extra="forbid")

    target_rate_hz: Optional[float] = Field(125.0, gt=0)
    bandpass: bool = True
    low_hz: float = Field(1.0, gt=0)
    high_hz: float = Field(47.0, gt=0)
    order: int = Field(3, ge=1, le=10)
    detrend: bool = True
    znormalize: bool = True


def preprocess(sig: Signal, steps: PreprocessSteps) -> Signal:
    out = sig
    if steps.target_rate_hz is not None:
        out = resample(out, steps.target_rate_hz)
    if steps.bandpass:
        out = butterworth_bandpass_zerophase(out, steps.low_hz, steps.high_hz, steps.order)
    if steps.detrend:
        out = detrend(out)
    if steps.znormalize:
        out = znormalize(out)
    return out
