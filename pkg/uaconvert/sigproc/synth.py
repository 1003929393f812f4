from __future__ import annotations

from typing import Literal

import numpy as np

from ..core.rng import RngStream
from ..core.schema import Signal

Kind = Literal["spiky", "smooth"]


def synth_quasiperiodic(
    kind: Kind,
    rate_hz: float,
    duration_s: float,
    beat_hz: float,
    jitter: float,
    stream: RngStream,
    noise: float = 0.0,
    width_s: float = 0.02,
    duty: float = 0.6,
) -> Signal:
    """
    Beat train at `beat_hz`: narrow Gaussian spikes ("spiky", ECG-like) or
    raised-cosine pulses covering `duty` of a beat ("smooth", PPG-like).
    Each beat onset is shifted by N(0, jitter) seconds; white noise of std `noise` is added.
    """
    if min(rate_hz, duration_s, beat_hz) <= 0:
        raise ValueError("rate, duration and beat frequency must be positive")
    if jitter < 0 or noise < 0:
        raise ValueError("jitter and noise must be non-negative")
    if not 0.0 < duty <= 1.0:
        raise ValueError(f"duty must lie in (0, 1], got {duty}")
    gen = stream.generator
    n = int(round(rate_hz * duration_s))
    t = np.arange(n) / rate_hz
    period = 1.0 / beat_hz
    n_beats = int(np.ceil(duration_s * beat_hz)) + 1
    onsets = np.arange(n_beats) * period
    if jitter > 0:
        onsets = onsets + jitter * gen.standard_normal(n_beats)

    x = np.zeros(n)
    for onset in onsets:
        if kind == "spiky":
            x += np.exp(-0.5 * ((t - onset) / width_s) ** 2)
        elif kind == "smooth":
            phase = (t - onset) / (duty * period)
            inside = (phase >= 0.0) & (phase < 1.0)
            x[inside] += 0.5 * (1.0 - np.cos(2.0 * np.pi * phase[inside]))
        else:
            raise ValueError(f"unknown waveform kind {kind!r}")
    if noise > 0:
        x = x + noise * gen.standard_normal(n)
    return Signal(x, rate_hz)
