import numpy as np
import pytest

from speclocate.errors import (
    InvalidArgumentError,
    LayoutError,
    UndefinedSnrError,
)
from speclocate.waveforms import (
    BandLayout,
    NoiseSpec,
    SignalBurst,
    add_awgn,
    measure_snr,
    modulate_burst,
    random_layout,
    snr_to_noise_std,
    synthesize_record,
)


def burst(mod="psk4", cf=0.0, bw=0.2, start=0, dur=1 << 15, amp=0.0, beta=0.3):
    return SignalBurst(modulation=mod, center_freq=cf, bandwidth=bw,
                       start_sample=start, duration_samples=dur,
                       amplitude_db=amp, rolloff=beta)


def test_empty_layout_all_zero():
    rec = synthesize_record(BandLayout(record_length_samples=4096))
    assert np.all(rec.samples == 0)
    assert rec.annotations == []


def test_single_full_band_burst_power():
    n = 1 << 15
    layout = BandLayout(n, [burst(bw=1.0, cf=0.0, dur=n)], rng_seed=3)
    rec = synthesize_record(layout)
    assert abs(np.mean(np.abs(rec.samples) ** 2) - 1.0) < 0.01


def test_two_disjoint_bursts_power_additivity():
    # oracle: Parseval - disjoint bands add in power
    n = 1 << 16
    b1 = burst(cf=-0.2, bw=0.1, dur=n, amp=0.0)
    b2 = burst(mod="qam16", cf=0.25, bw=0.12, dur=n, amp=-3.0)
    layout = BandLayout(n, [b1, b2], rng_seed=5)
    rec = synthesize_record(layout)
    p1 = np.mean(np.abs(modulate_burst(b1, np.random.SeedSequence([5, 0]))) ** 2)
    p2 = np.mean(np.abs(modulate_burst(b2, np.random.SeedSequence([5, 1]))) ** 2)
    p_rec = np.mean(np.abs(rec.samples) ** 2)
    assert abs(p_rec - (p1 + p2)) < 0.02 * (p1 + p2)


def test_power_additivity_many_disjoint_bands():
    n = 1 << 16
    bursts = [
        burst(mod=m, cf=cf, bw=0.08, dur=n, amp=a)
        for m, cf, a in [("psk2", -0.35, 0.0), ("fsk2", -0.15, -6.0),
                         ("qam64", 0.05, -3.0), ("gmsk", 0.3, -10.0)]
    ]
    layout = BandLayout(n, bursts, rng_seed=11)
    rec = synthesize_record(layout)
    expected = sum(10 ** (b.amplitude_db / 10.0) for b in bursts)
    p_rec = np.mean(np.abs(rec.samples) ** 2)
    assert abs(p_rec - expected) < 0.02 * expected


def test_annotations_mirror_bursts():
    n = 1 << 14
    b = burst(cf=0.1, bw=0.05, start=1000, dur=8000)
    rec = synthesize_record(BandLayout(n, [b], rng_seed=1))
    assert len(rec.annotations) == 1
    a = rec.annotations[0]
    assert a.sample_start == 1000
    assert a.sample_count == 8000
    assert abs(a.freq_lower_edge - 0.075) < 1e-12
    assert abs(a.freq_upper_edge - 0.125) < 1e-12
    assert a.label == "psk4"
    # burst placed only inside its window
    assert np.all(rec.samples[:1000] == 0)
    assert np.all(rec.samples[9000:] == 0)


def test_burst_beyond_bounds_is_layout_error():
    layout = BandLayout(4096, [burst(dur=8192)], rng_seed=1)
    with pytest.raises(LayoutError):
        synthesize_record(layout)


def test_synthesis_determinism():
    layout = random_layout(1 << 15, rng_seed=77)
    r1 = synthesize_record(layout)
    r2 = synthesize_record(layout)
    np.testing.assert_array_equal(r1.samples, r2.samples)


def test_add_awgn_zero_std_identity():
    x = np.ones(100, dtype=complex)
    assert add_awgn(x, NoiseSpec(0.0, 1)) is x


def test_add_awgn_power_and_determinism():
    n = 1_000_000
    zeros = np.zeros(n, dtype=complex)
    s = 0.003
    y1 = add_awgn(zeros, NoiseSpec(s, 42))
    y2 = add_awgn(zeros, NoiseSpec(s, 42))
    np.testing.assert_array_equal(y1, y2)
    p = np.mean(np.abs(y1) ** 2)
    assert abs(p - 2 * s * s) < 0.01 * 2 * s * s
    y3 = add_awgn(zeros, NoiseSpec(s, 43))
    assert not np.array_equal(y1, y3)


def test_measure_snr_cases():
    x = np.full(1000, 1.0 + 0.0j)
    assert abs(measure_snr(x, x)) < 1e-12
    sig = np.full(1000, np.sqrt(1e-9) + 0j)
    noi = np.full(1000, np.sqrt(1e-8) + 0j)
    assert abs(measure_snr(sig, noi) + 10.0) < 1e-9
    assert abs(measure_snr(10 * sig, noi) - measure_snr(sig, noi) - 20.0) < 1e-9
    with pytest.raises(UndefinedSnrError):
        measure_snr(x, np.zeros(10, dtype=complex))
    with pytest.raises(InvalidArgumentError):
        measure_snr(np.array([]), x)


def test_snr_to_noise_std_values():
    assert abs(snr_to_noise_std(1.0, 0.0) - np.sqrt(0.5)) < 1e-15
    assert abs(snr_to_noise_std(1e-9, -10.0) - np.sqrt(5e-9)) < 1e-20
    with pytest.raises(InvalidArgumentError):
        snr_to_noise_std(0.0, 0.0)


@pytest.mark.parametrize("target", [-15.0, -5.0, 0.0, 7.5, 15.0])
def test_snr_round_trip_within_tenth_db(target):
    # oracle: Monte Carlo round trip at 1e6 samples
    n = 1_000_000
    rng = np.random.default_rng(9)
    sig = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 0.1
    p_sig = float(np.mean(np.abs(sig) ** 2))
    std = snr_to_noise_std(p_sig, target)
    noise = add_awgn(np.zeros(n, dtype=complex), NoiseSpec(std, 123))
    assert abs(measure_snr(sig, noise) - target) < 0.1


def test_random_layout_reproducible_and_valid():
    a = random_layout(1 << 16, rng_seed=5)
    b = random_layout(1 << 16, rng_seed=5)
    assert a.to_dict() == b.to_dict()
    a.validate()
    for bu in a.bursts:
        assert -0.5 <= bu.freq_lo and bu.freq_hi <= 0.5
