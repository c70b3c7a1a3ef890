"""AWGN and Rayleigh block-fading channel bookkeeping."""

from __future__ import annotations

import math

import numpy as np
import pytest

from admlink.channel import FadingSpec, NoiseSpec, apply_awgn, apply_rayleigh_block


def test_noise_spec_relations():
    spec = NoiseSpec(snr_db=10.0)
    assert spec.gamma == pytest.approx(10.0, rel=1e-12)
    assert spec.sigma2 == pytest.approx(1.0 / 20.0, rel=1e-12)
    assert NoiseSpec(snr_db=math.inf).sigma2 == 0.0
    assert NoiseSpec(snr_db=0.0).sigma2 == pytest.approx(0.5)


def test_fading_spec_validation():
    with pytest.raises(ValueError):
        FadingSpec(avg_snr_db=10.0, coherence_len=1)
    spec = FadingSpec(avg_snr_db=20.0, coherence_len=4)
    assert spec.avg_gamma == pytest.approx(100.0)


def test_awgn_deterministic_and_noiseless():
    stream = np.exp(1j * np.linspace(0, 3, 50))
    a = apply_awgn(stream, NoiseSpec(snr_db=8.0), seed=5)
    b = apply_awgn(stream, NoiseSpec(snr_db=8.0), seed=5)
    c = apply_awgn(stream, NoiseSpec(snr_db=8.0), seed=6)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

    # noiseless: exactly a common rotation — magnitudes and differential
    # phases preserved
    out = apply_awgn(stream, NoiseSpec(snr_db=math.inf), seed=1)
    assert np.allclose(np.abs(out), 1.0)
    ratio = out / stream
    assert np.allclose(ratio, ratio[0])
    assert abs(ratio[0]) == pytest.approx(1.0, rel=1e-12)


def test_awgn_snr_bookkeeping_within_1pct():
    """Measured noise power per complex sample matches 1/gamma within 1%."""
    n = 2_000_000
    snr_db = 7.0
    gamma = 10.0 ** (snr_db / 10.0)
    zeros = np.zeros(n, dtype=np.complex128)
    noise = apply_awgn(zeros, NoiseSpec(snr_db=snr_db), seed=11)
    measured = float(np.mean(np.abs(noise) ** 2))
    assert measured == pytest.approx(1.0 / gamma, rel=0.01)
    # per-dimension split is symmetric
    assert float(np.var(noise.real)) == pytest.approx(1.0 / (2 * gamma), rel=0.01)
    assert float(np.var(noise.imag)) == pytest.approx(1.0 / (2 * gamma), rel=0.01)


def test_rayleigh_block_structure():
    """Gain is constant within each coherence block and changes across blocks."""
    coherence_len = 7
    n_symbols = 9 * coherence_len + 3  # ragged final block
    stream = np.ones(n_symbols, dtype=np.complex128)
    spec = FadingSpec(avg_snr_db=300.0, coherence_len=coherence_len)  # noise ~ 0
    out, inst_snr = apply_rayleigh_block(stream, spec, seed=2)
    assert inst_snr.shape == (10,)
    for block in range(10):
        seg = out[block * coherence_len : (block + 1) * coherence_len]
        assert np.allclose(seg, seg[0], rtol=1e-9, atol=1e-12)
        gain_power = abs(seg[0]) ** 2
        assert gain_power * spec.avg_gamma == pytest.approx(
            float(inst_snr[block]), rel=1e-9
        )
    gains = out[::coherence_len][:9]
    assert len(set(np.round(gains, 12))) == 9  # distinct across blocks


def test_rayleigh_average_power_within_1pct():
    """E[|h|^2] = 1: mean instantaneous SNR matches the configured average."""
    spec = FadingSpec(avg_snr_db=12.0, coherence_len=2)
    stream = np.ones(400_000, dtype=np.complex128)
    _, inst_snr = apply_rayleigh_block(stream, spec, seed=9)
    assert inst_snr.size == 200_000
    assert float(np.mean(inst_snr)) == pytest.approx(spec.avg_gamma, rel=0.01)


def test_rayleigh_noise_power_within_1pct():
    """Additive noise sits at the fixed variance implied by the average SNR."""
    spec = FadingSpec(avg_snr_db=10.0, coherence_len=2)
    zeros = np.zeros(1_000_000, dtype=np.complex128)
    out, _ = apply_rayleigh_block(zeros, spec, seed=4)
    measured = float(np.mean(np.abs(out) ** 2))
    assert measured == pytest.approx(1.0 / spec.avg_gamma, rel=0.01)


def test_rayleigh_deterministic_and_generator_passthrough():
    stream = np.ones(64, dtype=np.complex128)
    spec = FadingSpec(avg_snr_db=15.0, coherence_len=4)
    a = apply_rayleigh_block(stream, spec, seed=3)
    b = apply_rayleigh_block(stream, spec, seed=3)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    # a Generator may be passed in place of the integer seed; it is stateful
    gen = np.random.default_rng(3)
    c1, _ = apply_rayleigh_block(stream, spec, gen)
    c2, _ = apply_rayleigh_block(stream, spec, gen)
    assert not np.array_equal(c1, c2)
