"""Deterministic synthetic audio for the analog modulators.

Real program material is replaced by a seeded sum of sinusoids spanning a
voice/music-like band (the digital-frequency analog of roughly 50 Hz..8 kHz)
so AM/FM/SSB bursts are exactly reproducible from their seeds.
"""

import numpy as np

# ratio between the lowest and highest sinusoid frequency (~50 Hz : 8 kHz)
_LOW_FREQ_RATIO = 1.0 / 160.0
_N_TONES = 24


def synth_audio(n_samples: int, max_freq: float, rng: np.random.Generator) -> np.ndarray:
    """Generate a real program-like waveform, RMS 0.5, clipped to [-1, 1].

    max_freq is the highest sinusoid frequency in cycles/sample; energy rolls
    off mildly toward high frequencies but still reaches the band edge, the
    way program audio does.
    """
    freqs = np.exp(
        rng.uniform(np.log(max_freq * _LOW_FREQ_RATIO), np.log(max_freq), _N_TONES)
    )
    amps = (freqs / freqs.min()) ** -0.25 * (0.5 + rng.random(_N_TONES))
    amps[np.argmax(freqs)] *= 2.0
    phases = rng.uniform(0.0, 2.0 * np.pi, _N_TONES)
    t = np.arange(n_samples)
    audio = np.zeros(n_samples)
    for f, a, p in zip(freqs, amps, phases):
        audio += a * np.cos(2.0 * np.pi * f * t + p)
    rms = np.sqrt(np.mean(audio**2))
    if rms > 0:
        audio *= 0.5 / rms
    return np.clip(audio, -1.0, 1.0)
