"""AWGN and Rayleigh block-fading channels with reproducible randomness.

Conventions (used throughout the package):
    * Symbol streams have unit average energy.
    * ``sigma2`` is the noise variance **per dimension** (real/imaginary each),
      so the linear SNR is ``gamma = 1 / (2 * sigma2)``.
    * Differential detection never needs an absolute phase reference, so the
      AWGN channel applies a single random phase rotation per stream to keep
      receivers honest about the unknown-phase model.

Determinism: every public operation takes an integer seed and draws from a
``numpy.random.default_rng(seed)`` in a fixed order, so equal seeds give
bit-identical outputs.  Parallel Monte Carlo callers must split work into
fixed-size chunks seeded via ``SeedSequence(entropy=seed, spawn_key=(i,))``
(see analysis.monte_carlo_ber) so results are independent of worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NoiseSpec",
    "FadingSpec",
    "apply_awgn",
    "apply_rayleigh_block",
]


@dataclass(frozen=True)
class NoiseSpec:
    """AWGN level as Es/N0 in dB for unit-energy symbols.

    ``snr_db = math.inf`` is the noiseless sentinel (sigma2 = 0).
    """

    snr_db: float

    @property
    def gamma(self) -> float:
        """Linear SNR Es/N0."""
        return float(10.0 ** (self.snr_db / 10.0))

    @property
    def sigma2(self) -> float:
        """Noise variance per dimension, N0/2 = 1/(2*gamma)."""
        if math.isinf(self.snr_db) and self.snr_db > 0:
            return 0.0
        return 1.0 / (2.0 * self.gamma)


@dataclass(frozen=True)
class FadingSpec:
    """Rayleigh block fading: average SNR plus the coherence block length.

    The complex gain is constant over each block of ``coherence_len`` symbols;
    differential detection requires at least two symbols per block.
    """

    avg_snr_db: float
    coherence_len: int = 2

    def __post_init__(self) -> None:
        if self.coherence_len < 2:
            raise ValueError("coherence_len must be >= 2 (paired symbols share the gain)")

    @property
    def avg_gamma(self) -> float:
        """Linear average SNR."""
        return float(10.0 ** (self.avg_snr_db / 10.0))


def _complex_normal(rng: np.random.Generator, size: int, sigma2: float) -> np.ndarray:
    """Zero-mean circularly-symmetric complex Gaussian, sigma2 per dimension."""
    scale = math.sqrt(sigma2)
    draws = rng.normal(scale=scale, size=(size, 2)) if scale > 0 else np.zeros((size, 2))
    return draws[:, 0] + 1j * draws[:, 1]


def apply_awgn(stream: np.ndarray, spec: NoiseSpec, seed: int) -> np.ndarray:
    """Rotate the stream by one random common phase and add AWGN.

    Draw order (fixed for determinism): common phase, then noise samples.
    With ``spec.snr_db = inf`` the output is exactly the rotated input.
    """
    stream = np.asarray(stream, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-np.pi, np.pi)
    out = stream * np.exp(1j * theta)
    sigma2 = spec.sigma2
    if sigma2 > 0:
        out = out + _complex_normal(rng, stream.size, sigma2)
    return out


def apply_rayleigh_block(
    stream: np.ndarray, spec: FadingSpec, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Apply Rayleigh block fading plus AWGN at the configured average SNR.

    Each block of ``coherence_len`` symbols is multiplied by one complex
    Gaussian gain h with E[|h|^2] = 1 (uniform phase, Rayleigh magnitude);
    AWGN is added at the fixed variance implied by ``avg_snr_db``.  Returns
    the impaired stream and the realized instantaneous SNR
    ``gamma_inst = |h|^2 * avg_gamma`` per block, which the adaptive
    demodulation selector consumes as genie receiver CSI.

    Draw order (fixed for determinism): block gains, then noise samples.
    """
    stream = np.asarray(stream, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    n = stream.size
    n_blocks = -(-n // spec.coherence_len)  # ceil
    gains = _complex_normal(rng, n_blocks, 0.5)  # E[|h|^2] = 2 * 0.5 = 1
    inst_snr = (np.abs(gains) ** 2) * spec.avg_gamma
    per_symbol = np.repeat(gains, spec.coherence_len)[:n]
    sigma2 = 1.0 / (2.0 * spec.avg_gamma)
    out = stream * per_symbol + _complex_normal(rng, n, sigma2)
    return out, inst_snr
