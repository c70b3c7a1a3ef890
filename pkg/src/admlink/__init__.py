"""Link-level simulation of adaptive demodulation over differential links.

Differentially coherent 16-DPSK and 16-DAPSK with beta-decision
demodulation: each symbol pair carries four bits, of which the receiver
keeps the beta most reliable and erases the rest.  The package provides the
exact log-likelihood-ratio demodulators and their threshold-based
simplifications, analytic and Monte Carlo bit-error rates, operating
regions and spectral efficiency over Rayleigh fading, and an LT rateless
erasure code for end-to-end runs.
"""

from .analysis import (
    BerCurve,
    CurvePoint,
    OperatingRegions,
    QuadratureError,
    dapsk_ber_numeric,
    dpsk_ber,
    dpsk_symbol_error,
    monte_carlo_ber,
    operating_regions,
    pawula_tail,
    ring_ratio_study,
    spectral_efficiency,
)
from .channel import FadingSpec, NoiseSpec, apply_awgn, apply_rayleigh_block
from .constellation import (
    DapskMapping,
    DpskMapping,
    build_dapsk_mapping,
    build_dpsk_mapping,
    dapsk_decode,
    dapsk_encode,
    dpsk_decode,
    dpsk_encode,
)
from .dapsk_demod import (
    DapskObservation,
    ThresholdSet,
    delta0_estimate,
    optimal_rule_demod,
    simple_demod_beta,
    threshold_set,
)
from .dpsk_demod import BitVerdict, DpskObservation, demod_beta, rank_bits_high_snr
from .kernels import BACKEND, HAVE_COMPILED
from .rateless import (
    DegreeDistribution,
    EncodedBit,
    EndToEndResult,
    TranscriptRow,
    end_to_end_run,
    lt_encode,
    peel_decode,
    robust_soliton,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "HAVE_COMPILED",
    "BerCurve",
    "BitVerdict",
    "CurvePoint",
    "DapskMapping",
    "DapskObservation",
    "DegreeDistribution",
    "DpskMapping",
    "DpskObservation",
    "EncodedBit",
    "EndToEndResult",
    "FadingSpec",
    "NoiseSpec",
    "OperatingRegions",
    "QuadratureError",
    "ThresholdSet",
    "TranscriptRow",
    "apply_awgn",
    "apply_rayleigh_block",
    "build_dapsk_mapping",
    "build_dpsk_mapping",
    "dapsk_ber_numeric",
    "dapsk_decode",
    "dapsk_encode",
    "delta0_estimate",
    "demod_beta",
    "dpsk_ber",
    "dpsk_decode",
    "dpsk_encode",
    "dpsk_symbol_error",
    "end_to_end_run",
    "lt_encode",
    "monte_carlo_ber",
    "operating_regions",
    "optimal_rule_demod",
    "pawula_tail",
    "peel_decode",
    "rank_bits_high_snr",
    "ring_ratio_study",
    "robust_soliton",
    "simple_demod_beta",
    "spectral_efficiency",
    "threshold_set",
]
