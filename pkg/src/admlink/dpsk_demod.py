"""16-DPSK decision statistics and beta-decision-scheme demodulators.

A differential observation is a pair of received samples (y_prev, y_curr);
the sufficient statistic for differential phase detection with an unknown
common carrier phase is the pair phase difference ``phi_k`` together with the
two magnitudes.  The pair likelihood for a hypothesized differential phase
``delta_phi_m`` is

    Pr(y_k, y_{k-1} | delta_phi_m)
        = exp(-(2 + |y_k|^2 + |y_{k-1}|^2) / (2 sigma^2)) / (2 pi sigma^2)^2
          * I0(|y_k + y_{k-1} e^{j delta_phi_m}| / sigma^2)

(unit-energy symbol hypotheses; sigma^2 per dimension).  Bit LLRs are
log-sum-exp aggregates of these likelihoods over the label classes.

Two beta-decision-scheme variants are provided:

* ``exact``  — rank bits by |LLR|, decide the top beta by LLR sign.
* ``rule``   — the high-SNR rule: rank bit i by the circular distance from
  phi_k to the nearest constellation angle whose label differs in bit i
  (larger = more reliable), decide values from the nearest label.  As a
  function of phi_k this realizes the angular-region scheme: each beta's
  kept-set partitions the circle into finitely many arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import i0e, logsumexp

from .constellation import DpskMapping

__all__ = [
    "DpskObservation",
    "BitVerdict",
    "log_i0",
    "pair_likelihood",
    "exact_bit_llrs",
    "rank_bits_high_snr",
    "demod_beta",
]


@dataclass(frozen=True)
class DpskObservation:
    """One received 16-DPSK symbol pair plus the channel noise level."""

    y_prev: complex
    y_curr: complex
    sigma2: float

    def __post_init__(self) -> None:
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def phi_k(self) -> float:
        """Pair phase difference arg(y_curr) - arg(y_prev), in (-pi, pi]."""
        return float(np.angle(self.y_curr * np.conj(self.y_prev)))


@dataclass(frozen=True)
class BitVerdict:
    """Per-pair beta-decision output: four slots, each decided (0/1) or erased.

    ``slots[i]`` is the decided value of bit i, or None if bit i was erased.
    """

    slots: tuple[int | None, int | None, int | None, int | None]

    def __post_init__(self) -> None:
        for s in self.slots:
            if s not in (0, 1, None):
                raise ValueError("slots must contain 0, 1, or None")

    @property
    def beta(self) -> int:
        """Number of decided slots."""
        return sum(s is not None for s in self.slots)

    @property
    def decided_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.slots) if s is not None)


def _verdict_from_ranking(
    order: tuple[int, ...], values: tuple[int, int, int, int], beta: int
) -> BitVerdict:
    kept = set(order[:beta])
    return BitVerdict(
        slots=tuple(values[i] if i in kept else None for i in range(4))
    )


def log_i0(x):
    """log of the zeroth-order modified Bessel function, stable for any x >= 0.

    Uses the exponentially-scaled Bessel function: log(I0(x)) = log(i0e(x)) + x,
    which neither overflows at large arguments (I0(x) ~ e^x) nor loses
    accuracy at small ones.
    """
    x = np.asarray(x, dtype=np.float64)
    result = np.log(i0e(x)) + x
    return float(result) if result.ndim == 0 else result


def _bessel_argument(y_prev, y_curr, delta_phi):
    """|y_curr + y_prev * e^{j delta_phi}| (the pair-likelihood Bessel argument)."""
    return np.abs(y_curr + y_prev * np.exp(1j * np.asarray(delta_phi)))


def _log_pair_likelihood(y_prev, y_curr, sigma2, delta_phi):
    """Log of the pair likelihood; broadcasts over delta_phi."""
    arg = _bessel_argument(y_prev, y_curr, delta_phi) / sigma2
    const = (
        -(2.0 + abs(y_curr) ** 2 + abs(y_prev) ** 2) / (2.0 * sigma2)
        - 2.0 * math.log(2.0 * math.pi * sigma2)
    )
    return log_i0(arg) + const


def pair_likelihood(obs: DpskObservation, delta_phi_m: float) -> float:
    """Pr(y_curr, y_prev | delta_phi_m) including the common exponential prefactor.

    Evaluated in the log domain and exponentiated, so the value is finite for
    any SNR (it may underflow to 0.0 when the exponent is below ~-745).
    """
    return float(np.exp(_log_pair_likelihood(obs.y_prev, obs.y_curr, obs.sigma2, delta_phi_m)))


def _exact_llrs_core(
    phi: np.ndarray,
    mag_prev: np.ndarray,
    mag_curr: np.ndarray,
    sigma2: float,
    mapping: DpskMapping,
) -> np.ndarray:
    """Vectorized bit LLRs; inputs shape (n,), output shape (n, 4).

    Only phi and the two magnitudes enter the likelihood (common-rotation
    invariance), so the core works on those statistics directly:
    |y_k + y_{k-1} e^{j d}| = sqrt(mc^2 + mp^2 + 2 mc mp cos(phi - d)).
    """
    angles = np.arange(16) * mapping.step  # hypothesis angles
    cosdiff = np.cos(phi[:, None] - angles[None, :])
    amp = np.sqrt(
        np.maximum(
            mag_curr[:, None] ** 2
            + mag_prev[:, None] ** 2
            + 2.0 * (mag_curr * mag_prev)[:, None] * cosdiff,
            0.0,
        )
    )
    loglike = log_i0(amp / sigma2)  # per-hypothesis, up to a common constant
    llrs = np.empty((phi.size, 4), dtype=np.float64)
    labels = np.asarray(mapping.labels, dtype=np.uint8)
    for i in range(4):
        zero_set = labels[:, i] == 0
        llrs[:, i] = logsumexp(loglike[:, zero_set], axis=1) - logsumexp(
            loglike[:, ~zero_set], axis=1
        )
    return llrs


def exact_bit_llrs(obs: DpskObservation, mapping: DpskMapping) -> np.ndarray:
    """Exact bit log-likelihood ratios ln Pr(b_i=0 | obs) / Pr(b_i=1 | obs).

    Positive LLR favours bit value 0.  Computed with log-sum-exp over the
    sixteen hypothesis angles; the constant prefactor cancels in the ratio.
    """
    return _exact_llrs_core(
        np.array([obs.phi_k]),
        np.array([abs(obs.y_prev)]),
        np.array([abs(obs.y_curr)]),
        obs.sigma2,
        mapping,
    )[0]


def _rule_distances(phi_k: float, mapping: DpskMapping) -> tuple[int, np.ndarray]:
    """Nearest angle index and per-bit flip distances for the high-SNR rule."""
    step = mapping.step
    nearest = np.rint(phi_k / step)
    chi = phi_k - nearest * step
    m_star = int(nearest) % 16
    up = mapping.up_steps[m_star].astype(np.float64) * step - chi
    down = mapping.down_steps[m_star].astype(np.float64) * step + chi
    return m_star, np.minimum(up, down)


def rank_bits_high_snr(
    phi_k: float, mapping: DpskMapping
) -> tuple[tuple[int, int, int, int], tuple[int, int, int, int]]:
    """High-SNR reliability ranking of the four bits, plus their hard values.

    Bit i's reliability metric is the circular distance from phi_k to the
    nearest constellation angle whose label differs in bit i; larger distance
    = more reliable.  Ties break to the lower bit index.  Returns
    ``(order, values)`` where order lists bit indices most-reliable-first and
    values are the bits of the label nearest phi_k.
    """
    m_star, dist = _rule_distances(phi_k, mapping)
    order = tuple(sorted(range(4), key=lambda i: (-dist[i], i)))
    values = mapping.labels[m_star]
    return order, tuple(int(b) for b in values)


def demod_beta(
    obs: DpskObservation,
    beta: int,
    mapping: DpskMapping,
    variant: str = "rule",
) -> BitVerdict:
    """Decide the beta most reliable bits of one pair; erase the rest.

    variant="exact" ranks by |LLR| (values from LLR signs); variant="rule"
    uses the high-SNR ranking (values from the nearest label).  beta=4
    erases nothing.  Ties in either ranking break to the lower bit index.
    """
    if beta not in (1, 2, 3, 4):
        raise ValueError("beta must be in {1, 2, 3, 4}")
    if variant == "exact":
        llrs = exact_bit_llrs(obs, mapping)
        order = tuple(sorted(range(4), key=lambda i: (-abs(llrs[i]), i)))
        values = tuple(int(llrs[i] < 0) for i in range(4))
    elif variant == "rule":
        order, values = rank_bits_high_snr(obs.phi_k, mapping)
    else:
        raise ValueError(f"unknown variant {variant!r} (expected 'exact' or 'rule')")
    return _verdict_from_ranking(order, values, beta)
