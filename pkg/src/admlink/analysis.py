"""Analytic and Monte Carlo BER, operating regions, and spectral efficiency.

Analytic 16-DPSK BER uses the Gaussian-tail approximation of the pair
phase-difference tail integral

    tail(a, gamma) = 1/2 sqrt((1+cos a)/(2 cos a)) erfc(sqrt(gamma (1-cos a)))

(valid for cos a > 0), assembled per beta from the exact correct-decision
arcs of the rule-based demodulator.  The arcs are re-derived by sweeping the
shipped ranking code in the test suite; per transmitted symbol they are, in
units of pi/16 (left, right):

    beta=4: (-1, +1) for every symbol
    beta=3: (-2, +2) for every symbol
    beta=2: (-3, +5) / (-5, +3), alternating with symbol parity
    beta=1: (-11, +5), (-5, +11), (-7, +9), (-9, +7), cycling with m mod 4

Each arc edge at angle a contributes tail(a, gamma); edges at or beyond
pi/2 fall outside the approximation's domain (cos a <= 0) and are dropped —
their contribution is negligible at the SNRs where the approximation itself
is meaningful (under 1% of the total above ~8 dB).  The per-bit error rate
for a beta-decision scheme divides the symbol error rate by beta (each
symbol error flips one of the beta kept bits at high SNR).

16-DAPSK BER for the simplified scheme is computed by numeric quadrature of
the pair-statistic joint density over the complement of each bit's
correct-decision region (bands in r' x fixed angular sectors), exploiting
the scheme's cell structure: on each r'-band x quarter-sector cell the
decision is constant, so the error probability is a weighted sum of cell
masses.  The r > 1 half-plane folds onto r < 1 exactly (the density
satisfies f(1/r | d, alpha) = r^2 f(r | d|alpha|, 1/|alpha|), a hypothesis
permutation that preserves bit labels).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc

from . import kernels
from .channel import NoiseSpec, apply_awgn
from .constellation import (
    DapskMapping,
    build_dapsk_mapping,
    build_dpsk_mapping,
    dapsk_encode,
    dpsk_encode,
)
from .dapsk_demod import (
    HYBRID_SECTORS,
    _in_drop_sector,
    _phase_rule,
    delta0_estimate,
    threshold_set,
)
from .dapsk_demod import _exact_llrs_core as _dapsk_exact_llrs_core
from .dpsk_demod import _exact_llrs_core as _dpsk_exact_llrs_core

__all__ = [
    "BerCurve",
    "CurvePoint",
    "OperatingRegions",
    "QuadratureError",
    "pawula_tail",
    "dpsk_symbol_error",
    "dpsk_ber",
    "dapsk_ber_numeric",
    "monte_carlo_ber",
    "operating_regions",
    "spectral_efficiency",
    "ring_ratio_study",
    "db_to_linear",
    "linear_to_db",
]

#: bits set in each 4-bit value; used to count wrong decided bits.
_POPCOUNT4 = np.array([bin(v).count("1") for v in range(16)], dtype=np.uint8)

#: Monte Carlo chunk size in symbol pairs.  Results are summed over chunks,
#: each chunk seeded independently from (seed, chunk index), so estimates
#: depend only on (seed, trials) — never on the worker count.
_MC_CHUNK = 250_000


def db_to_linear(snr_db: float) -> float:
    """Convert dB to linear SNR."""
    return float(10.0 ** (np.asarray(snr_db) / 10.0))


def linear_to_db(gamma: float) -> float:
    """Convert linear SNR to dB."""
    return float(10.0 * np.log10(gamma))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    """One BER-curve sample; ci and trials are None for analytic points."""

    snr_db: float
    ber: float
    ci: float | None = None
    trials: int | None = None


@dataclass(frozen=True)
class BerCurve:
    """A BER-vs-SNR curve for one (scheme, variant, beta) combination."""

    scheme: str  # "dpsk" | "dapsk"
    beta: int
    method: str  # "analytic" | "monte_carlo"
    points: tuple[CurvePoint, ...]
    variant: str = "rule"
    ring_ratio: float | None = None

    def __post_init__(self) -> None:
        if self.scheme not in ("dpsk", "dapsk"):
            raise ValueError("scheme must be dpsk or dapsk")
        if self.method not in ("analytic", "monte_carlo"):
            raise ValueError("method must be analytic or monte_carlo")
        if self.scheme == "dapsk" and self.ring_ratio is None:
            raise ValueError("dapsk curves require a ring ratio")
        snrs = [p.snr_db for p in self.points]
        if any(b >= a for a, b in zip(snrs[1:], snrs)):
            raise ValueError("snr values must be strictly increasing")
        for p in self.points:
            if not 0.0 <= p.ber <= 0.5:
                raise ValueError(f"ber {p.ber} outside [0, 0.5]")
            if self.method == "monte_carlo" and p.trials is None:
                raise ValueError("Monte Carlo points must carry trial counts")


@dataclass(frozen=True)
class OperatingRegions:
    """Adaptive-demodulation SNR breakpoints for one scheme and target BER.

    ``breakpoints = (g1, g2, g3, g4)`` in linear SNR: instantaneous gamma
    below g1 erases everything (beta = 0); gamma in [g_b, g_{b+1}) uses the
    beta = b scheme; gamma at or above g4 uses beta = 4.  A collapsed region
    (equal consecutive breakpoints) means that beta is never selected.
    """

    scheme: str
    target_ber: float
    breakpoints: tuple[float, float, float, float]
    ring_ratio: float | None = None

    def __post_init__(self) -> None:
        g = self.breakpoints
        if any(b < a for a, b in zip(g, g[1:])):
            raise ValueError("breakpoints must be monotone non-decreasing")
        if not 0.0 < self.target_ber < 0.5:
            raise ValueError("target BER must lie in (0, 0.5)")

    def select_beta(self, gamma_inst):
        """beta to use at the given instantaneous linear SNR (vectorized)."""
        return np.searchsorted(
            np.asarray(self.breakpoints), np.asarray(gamma_inst), side="right"
        )


class QuadratureError(RuntimeError):
    """Numeric integration failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


# ---------------------------------------------------------------------------
# analytic 16-DPSK BER
# ---------------------------------------------------------------------------


def _tail_at_angle(gamma, angle: float):
    """Gaussian-tail approximation of the phase-difference tail beyond `angle`.

    Requires cos(angle) > 0 (the approximation family's domain).
    Vectorized over gamma.
    """
    c = math.cos(angle)
    if c <= 0.0:
        raise ValueError(f"tail angle {angle} outside domain (cos must be positive)")
    gamma = np.asarray(gamma, dtype=np.float64)
    out = 0.5 * math.sqrt((1.0 + c) / (2.0 * c)) * erfc(np.sqrt(gamma * (1.0 - c)))
    return float(out) if out.ndim == 0 else out


def pawula_tail(m_sectors: int, gamma):
    """Tail probability that the pair phase error exceeds pi/m_sectors.

    Args:
        m_sectors: integer >= 3 (domain of the approximation).
        gamma: linear SNR (scalar or array), > 0.
    """
    if int(m_sectors) != m_sectors or m_sectors < 3:
        raise ValueError("m_sectors must be an integer >= 3")
    if np.any(np.asarray(gamma) <= 0):
        raise ValueError("gamma must be positive")
    return _tail_at_angle(gamma, math.pi / int(m_sectors))


#: Correct-decision arc edges per beta, as (weight, angle in pi/16 units).
#: Weights average the per-symbol arcs over the 16 transmitted symbols.
#: Edges with units >= 8 (angle >= pi/2) lie outside the tail
#: approximation's domain and are skipped during evaluation.
_DPSK_TAIL_TERMS: dict[int, tuple[tuple[float, int], ...]] = {
    4: ((2.0, 1),),
    3: ((2.0, 2),),
    2: ((1.0, 3), (1.0, 5)),
    1: ((0.5, 5), (0.5, 7), (0.5, 9), (0.5, 11)),
}


def dpsk_symbol_error(beta: int, gamma):
    """Probability that any of the beta kept bits of a 16-DPSK pair is wrong.

    Sum of tail terms at the correct-decision arc edges (see module
    docstring); vectorized over gamma.
    """
    if beta not in (1, 2, 3, 4):
        raise ValueError("beta must be in {1, 2, 3, 4}")
    gamma = np.asarray(gamma, dtype=np.float64)
    total = np.zeros_like(gamma)
    for weight, units in _DPSK_TAIL_TERMS[beta]:
        if units >= 8:  # angle >= pi/2: outside the approximation's domain
            continue
        total = total + weight * _tail_at_angle(gamma, units * math.pi / 16.0)
    return float(total) if total.ndim == 0 else total


def dpsk_ber(beta: int, gamma):
    """Analytic per-bit error rate of the beta-decision 16-DPSK scheme."""
    return dpsk_symbol_error(beta, gamma) / beta


# ---------------------------------------------------------------------------
# numeric 16-DAPSK BER (simplified scheme)
# ---------------------------------------------------------------------------

#: quarter-sector edges relative to a sector center (width pi/16 each)
_QCELL_EDGES = (-math.pi / 8, -math.pi / 16, 0.0, math.pi / 16, math.pi / 8)
#: quadrature refinement levels (Gauss-Legendre points per panel)
_QUAD_LEVELS = (16, 24, 36, 54, 81)


def _dapsk_bands(beta: int, ring_ratio: float) -> list[tuple[float, float, str, int]]:
    """Non-empty r' bands as (lo, hi, mode, b0_hard); mode in keep/drop/hybrid/all."""
    delta0 = delta0_estimate(ring_ratio)
    if beta == 4:
        return [(0.0, delta0, "all", 1), (delta0, 1.0, "all", 0)]
    t = threshold_set(beta, ring_ratio)
    d1, d2, d3, d4 = t.delta
    raw = [
        (d1, 1.0, "keep"),
        (d2, d1, "hybrid"),
        (d3, d2, "drop"),
        (d4, d3, "hybrid"),
        (0.0, d4, "keep"),
    ]
    out = []
    for lo, hi, mode in raw:
        if hi - lo <= 1e-12:
            continue
        out.append((lo, hi, mode, 1 if hi <= delta0 + 1e-12 else 0))
    return out


def _cell_decisions(
    beta: int, bands, mapping: DapskMapping
) -> tuple[np.ndarray, np.ndarray]:
    """Per (band, sector, quarter): kept-bit mask and hard packed decision.

    The decision is constant on each cell: the phase ranking changes only at
    quarter-cell edges, and the transition sectors of every beta align with
    those edges.  Decisions are evaluated at cell centers through the same
    ranking helpers the demodulators use.
    """
    nb = len(bands)
    kept = np.zeros((nb, 8, 4), dtype=np.uint8)
    hard = np.zeros((nb, 8, 4), dtype=np.uint8)
    phase4 = (mapping.packed_phase_labels.astype(np.uint8) << 1).astype(np.uint8)
    for s in range(8):
        for q in range(4):
            chi_mid = 0.5 * (_QCELL_EDGES[q] + _QCELL_EDGES[q + 1])
            psi_mid = s * mapping.step + chi_mid
            m_star, dist = _phase_rule(psi_mid, mapping)
            porder = sorted((1, 2, 3), key=lambda i: (-dist[i - 1], i))
            for bi, (_lo, _hi, mode, b0_hard) in enumerate(bands):
                if mode == "all":
                    mask = 0b1111
                else:
                    keep_b0 = mode == "keep" or (
                        mode == "hybrid" and not _in_drop_sector(psi_mid, beta)
                    )
                    if keep_b0:
                        mask = 1
                        for i in porder[: beta - 1]:
                            mask |= 1 << i
                    else:
                        mask = 0
                        for i in porder[:beta]:
                            mask |= 1 << i
                kept[bi, s, q] = mask
                hard[bi, s, q] = phase4[m_star] | b0_hard
    return kept, hard


def _families(mapping: DapskMapping) -> list[tuple[float, float, int]]:
    """The four (|d|, |alpha|, b0) hypothesis families."""
    big_r = mapping.ring_ratio
    return [
        (mapping.a1, 1.0, 0),
        (mapping.a2, 1.0, 0),
        (mapping.a1, big_r, 1),
        (mapping.a2, 1.0 / big_r, 1),
    ]


def _log_density_grid(r, psi, d_abs, alpha_abs, sigma2):
    """log f(r, psi) at arg alpha = 0, broadcast over grids (duplicated here
    in array form to keep the quadrature self-contained)."""
    s = 2.0 * sigma2
    w2 = 1.0 + (alpha_abs * r) ** 2 + 2.0 * alpha_abs * r * np.cos(psi)
    q = (d_abs**2) * w2 / (s * (1.0 + r**2))
    p = (d_abs**2) * (1.0 + alpha_abs**2) / s
    return np.log(r) - math.log(math.pi) - 2.0 * np.log1p(r**2) + np.log1p(q) + (q - p)


def _cell_masses(
    mapping: DapskMapping, bands, sigma2: float, n: int
) -> np.ndarray:
    """Integral of each family's density over (band x cell), arg alpha = 0.

    Returns shape (4 families, n_bands, 8 sectors, 4 quarters).  Each band
    splits into two radial Gauss-Legendre panels; each quarter-sector cell
    gets one angular panel.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    # angular nodes per cell: (32, n)
    starts = np.array(
        [s * mapping.step + _QCELL_EDGES[q] for s in range(8) for q in range(4)]
    )
    half = math.pi / 32.0  # half-width of a pi/16 cell
    psi_nodes = starts[:, None] + half * (x[None, :] + 1.0)
    psi_w = half * w
    out = np.empty((4, len(bands), 8, 4), dtype=np.float64)
    for fi, (d_abs, alpha_abs, _b0) in enumerate(_families(mapping)):
        for bi, (lo, hi, _mode, _b0h) in enumerate(bands):
            mid = 0.5 * (lo + hi)
            r_nodes = np.concatenate(
                [
                    0.5 * (mid - lo) * (x + 1.0) + lo,
                    0.5 * (hi - mid) * (x + 1.0) + mid,
                ]
            )
            r_w = np.concatenate([0.5 * (mid - lo) * w, 0.5 * (hi - mid) * w])
            logf = _log_density_grid(
                r_nodes[:, None, None], psi_nodes[None, :, :], d_abs, alpha_abs, sigma2
            )
            cells = np.einsum("i,ijk,k->j", r_w, np.exp(logf), psi_w)
            out[fi, bi] = cells.reshape(8, 4)
    return out


def _dapsk_ber_at_level(
    beta: int, mapping: DapskMapping, bands, kept, hard, sigma2: float, n: int
) -> float:
    masses = _cell_masses(mapping, bands, sigma2, n)
    phase4 = mapping.packed_phase_labels.astype(np.uint8) << 1
    families = _families(mapping)
    total = 0.0
    for fi, (_d, _a, b0_true) in enumerate(families):
        for bi in range(len(bands)):
            mass = masses[fi, bi]  # (8, 4) indexed by relative sector
            for m_h in range(8):
                true_packed = np.uint8(phase4[m_h] | b0_true)
                wrong = _POPCOUNT4[kept[bi] & (hard[bi] ^ true_packed)]
                total += float(np.sum(wrong * np.roll(mass, m_h, axis=0)))
    return total / (16.0 * beta)


def dapsk_ber_numeric(beta: int, gamma: float, ring_ratio: float, rel_tol: float = 1e-4) -> float:
    """Per-bit error rate of the simplified beta-decision 16-DAPSK scheme.

    2D quadrature of the pair-statistic density over the scheme's
    band-by-sector cells, averaged over the 32 equally likely transmitted
    hypotheses; beta=4 is standard hard detection.  Refines until two
    successive quadrature levels agree to ``rel_tol`` (relative, with a tiny
    absolute floor); raises :class:`QuadratureError` with the achieved
    tolerance if the finest level still disagrees.
    """
    if beta not in (1, 2, 3, 4):
        raise ValueError("beta must be in {1, 2, 3, 4}")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    mapping = build_dapsk_mapping(ring_ratio)
    sigma2 = 1.0 / (2.0 * gamma)
    bands = _dapsk_bands(beta, ring_ratio)
    kept, hard = _cell_decisions(beta, bands, mapping)
    prev = None
    achieved = math.inf
    for n in _QUAD_LEVELS:
        value = _dapsk_ber_at_level(beta, mapping, bands, kept, hard, sigma2, n)
        if prev is not None:
            achieved = abs(value - prev)
            if achieved <= max(rel_tol * abs(value), 1e-16):
                return value
        prev = value
    raise QuadratureError(
        f"quadrature did not converge to rel_tol={rel_tol} "
        f"(achieved absolute change {achieved:.3e} at {_QUAD_LEVELS[-1]} points)",
        achieved=achieved,
    )


# ---------------------------------------------------------------------------
# Monte Carlo BER
# ---------------------------------------------------------------------------

_DPSK_MAPPING = build_dpsk_mapping()
_DAPSK_CACHE: dict[float, DapskMapping] = {}


def _dapsk_mapping(ring_ratio: float) -> DapskMapping:
    key = float(ring_ratio)
    if key not in _DAPSK_CACHE:
        _DAPSK_CACHE[key] = build_dapsk_mapping(key)
    return _DAPSK_CACHE[key]


def _ranking_errors(order: np.ndarray, hard_packed: np.ndarray, true_packed: np.ndarray, betas) -> dict[int, int]:
    """Errors per beta from a (n, 4) most-reliable-first order matrix."""
    prefix = np.bitwise_or.accumulate((1 << order).astype(np.uint8), axis=1)
    diff = hard_packed ^ true_packed
    return {
        b: int(_POPCOUNT4[prefix[:, b - 1] & diff].sum(dtype=np.int64)) for b in betas
    }


def _mc_chunk(scheme, variant, gamma, ring_ratio, seed, chunk_index, n_pairs, betas):
    """Simulate one seeded chunk; returns {beta: error count} over n_pairs pairs."""
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    )
    spec = NoiseSpec(snr_db=linear_to_db(gamma))
    bits = rng.integers(0, 2, size=4 * n_pairs, dtype=np.uint8)
    groups = bits.reshape(-1, 4)
    true_packed = (
        groups[:, 0] | (groups[:, 1] << 1) | (groups[:, 2] << 2) | (groups[:, 3] << 3)
    ).astype(np.uint8)

    if scheme == "dpsk":
        mapping = _DPSK_MAPPING
        y = apply_awgn(dpsk_encode(bits, mapping), spec, rng)
        phi = np.angle(y[1:] * np.conj(y[:-1]))
        if variant == "exact":
            llrs = _dpsk_exact_llrs_core(
                phi, np.abs(y[:-1]), np.abs(y[1:]), spec.sigma2, mapping
            )
            order = np.argsort(-np.abs(llrs), axis=1, kind="stable")
            hard_bits = (llrs < 0).astype(np.uint8)
            hard = (
                hard_bits[:, 0]
                | (hard_bits[:, 1] << 1)
                | (hard_bits[:, 2] << 2)
                | (hard_bits[:, 3] << 3)
            ).astype(np.uint8)
            return _ranking_errors(order, hard, true_packed, betas)
        # "rule" (and its alias "simple": the banded simplification is a
        # DAPSK concept; for DPSK the rule ranking IS the simple scheme)
        hard, masks = kernels.dpsk_rule(
            phi, mapping.up_steps, mapping.down_steps, mapping.packed_labels
        )
        diff = hard ^ true_packed
        return {
            b: int(_POPCOUNT4[masks[:, b - 1] & diff].sum(dtype=np.int64))
            for b in betas
        }

    # dapsk
    mapping = _dapsk_mapping(ring_ratio)
    z = apply_awgn(dapsk_encode(bits, mapping), spec, rng)
    mags = np.abs(z)
    ratio = mags[1:] / mags[:-1]
    r_prime = np.minimum(ratio, 1.0 / ratio)
    psi = np.angle(z[1:] * np.conj(z[:-1]))
    phase4 = (mapping.packed_phase_labels.astype(np.uint8) << 1).astype(np.uint8)
    delta0 = delta0_estimate(mapping.ring_ratio)

    if variant == "exact":
        llrs = _dapsk_exact_llrs_core(ratio, psi, spec.sigma2, mapping)
        order = np.argsort(-np.abs(llrs), axis=1, kind="stable")
        hard_bits = (llrs < 0).astype(np.uint8)
        hard = (
            hard_bits[:, 0]
            | (hard_bits[:, 1] << 1)
            | (hard_bits[:, 2] << 2)
            | (hard_bits[:, 3] << 3)
        ).astype(np.uint8)
        return _ranking_errors(order, hard, true_packed, betas)
    if variant == "rule":
        hard, masks = kernels.dapsk_rule(
            r_prime,
            psi,
            mapping.up_steps,
            mapping.down_steps,
            phase4,
            delta0,
            mapping.ring_ratio,
        )
        diff = hard ^ true_packed
        return {
            b: int(_POPCOUNT4[masks[:, b - 1] & diff].sum(dtype=np.int64))
            for b in betas
        }
    # simplified scheme: one kernel pass per requested beta
    out = {}
    for b in betas:
        if b == 4:  # beta=4 is standard detection in both schemes
            hard, masks = kernels.dapsk_rule(
                r_prime,
                psi,
                mapping.up_steps,
                mapping.down_steps,
                phase4,
                delta0,
                mapping.ring_ratio,
            )
            keep = masks[:, 3]
        else:
            t = threshold_set(b, mapping.ring_ratio)
            center0, period, halfwidth = HYBRID_SECTORS[b]
            hard, keep = kernels.dapsk_simple(
                r_prime,
                psi,
                mapping.up_steps,
                mapping.down_steps,
                phase4,
                delta0,
                *t.delta,
                center0,
                period,
                halfwidth,
                b,
            )
        out[b] = int(_POPCOUNT4[keep & (hard ^ true_packed)].sum(dtype=np.int64))
    return out


def _mc_chunk_star(args):
    return _mc_chunk(*args)


def mc_error_counts(
    scheme: str,
    variant: str,
    betas,
    gamma: float,
    ring_ratio: float | None,
    trials: int,
    seed: int,
    workers: int = 1,
) -> dict[int, tuple[int, int]]:
    """Monte Carlo error counts {beta: (errors, decided)} over `trials` pairs.

    Work splits into fixed-size chunks, each independently seeded from
    (seed, chunk index); sums are identical for any worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    betas = tuple(sorted(set(betas)))
    for b in betas:
        if b not in (1, 2, 3, 4):
            raise ValueError("beta must be in {1, 2, 3, 4}")
    if scheme not in ("dpsk", "dapsk"):
        raise ValueError("scheme must be dpsk or dapsk")
    if scheme == "dapsk" and ring_ratio is None:
        raise ValueError("dapsk requires a ring ratio")
    if variant not in ("exact", "rule", "simple"):
        raise ValueError("variant must be exact, rule, or simple")

    sizes = [_MC_CHUNK] * (trials // _MC_CHUNK)
    if trials % _MC_CHUNK:
        sizes.append(trials % _MC_CHUNK)
    jobs = [
        (scheme, variant, gamma, ring_ratio, seed, idx, size, betas)
        for idx, size in enumerate(sizes)
    ]
    errors = {b: 0 for b in betas}
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_mc_chunk_star, jobs))
    else:
        results = [_mc_chunk(*job) for job in jobs]
    for res in results:
        for b in betas:
            errors[b] += res[b]
    return {b: (errors[b], b * trials) for b in betas}


def monte_carlo_ber(
    scheme: str,
    variant: str,
    beta: int,
    gamma: float,
    ring_ratio: float | None = None,
    trials: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> tuple[float, float]:
    """Estimate decided-bit error rate by simulation.

    Errors are counted among decided bits only (both schemes decide exactly
    beta bits per pair, so the denominator is beta * trials).  Returns
    (ber, 95% confidence half-width).
    """
    counts = mc_error_counts(
        scheme, variant, (beta,), gamma, ring_ratio, trials, seed, workers
    )
    errors, decided = counts[beta]
    p = errors / decided
    half = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / decided)
    return p, half


# ---------------------------------------------------------------------------
# operating regions and spectral efficiency
# ---------------------------------------------------------------------------

_BRACKET = (1e-3, 1e9)  # linear SNR search bracket for threshold crossings


def _analytic_ber(scheme: str, beta: int, gamma: float, ring_ratio: float | None) -> float:
    if scheme == "dpsk":
        return float(dpsk_ber(beta, gamma))
    return dapsk_ber_numeric(beta, gamma, ring_ratio)


def operating_regions(
    scheme: str, ring_ratio: float | None, target_ber: float
) -> OperatingRegions:
    """SNR breakpoints where each beta-decision scheme meets the target BER.

    Root-finds BER_beta(gamma) = target_ber on the analytic curve per beta
    (bisection-based bracketing on log-SNR), then enforces monotone
    breakpoints: a beta whose threshold falls below a smaller beta's is
    dominated and its region collapses to empty.
    """
    if not 0.0 < target_ber < 0.5:
        raise ValueError("target BER must lie in (0, 0.5)")
    lo, hi = _BRACKET
    roots = []
    for beta in (1, 2, 3, 4):
        f = lambda u, b=beta: _analytic_ber(scheme, b, math.exp(u), ring_ratio) - target_ber
        f_lo, f_hi = f(math.log(lo)), f(math.log(hi))
        if f_lo < 0 or f_hi > 0:
            raise ValueError(
                f"target BER {target_ber} unattainable for beta={beta} within "
                f"the SNR bracket [{lo:g}, {hi:g}] (endpoint BERs "
                f"{f_lo + target_ber:.3e}, {f_hi + target_ber:.3e})"
            )
        u = brentq(f, math.log(lo), math.log(hi), xtol=1e-10, rtol=8.9e-16)
        roots.append(math.exp(u))
    # dominated regions collapse (running maximum)
    breakpoints = []
    running = 0.0
    for g in roots:
        running = max(running, g)
        breakpoints.append(running)
    regions = OperatingRegions(
        scheme=scheme,
        target_ber=target_ber,
        breakpoints=tuple(breakpoints),
        ring_ratio=ring_ratio,
    )
    # residual check on non-collapsed regions
    for beta, g in zip((1, 2, 3, 4), regions.breakpoints):
        if g == roots[beta - 1]:
            resid = abs(_analytic_ber(scheme, beta, g, ring_ratio) - target_ber)
            if resid / target_ber >= 1e-3:
                raise RuntimeError(
                    f"root residual {resid:.3e} too large for beta={beta}"
                )
    return regions


def spectral_efficiency(
    scheme: str,
    ring_ratio: float | None,
    target_ber: float,
    avg_snr_db: float,
    regions: OperatingRegions | None = None,
) -> float:
    """Average decided bits per symbol over Rayleigh fading.

    The instantaneous SNR is exponential with mean ``avg_snr_db`` (Rayleigh
    power); each fading state contributes the beta of its operating region:

        SE = sum_beta beta * (exp(-g_beta / avg) - exp(-g_{beta+1} / avg))

    Pass a precomputed ``regions`` to amortize the root-finding across a
    curve.
    """
    if regions is None:
        regions = operating_regions(scheme, ring_ratio, target_ber)
    avg = db_to_linear(avg_snr_db)
    edges = list(regions.breakpoints) + [math.inf]
    se = 0.0
    for beta in (1, 2, 3, 4):
        upper = 0.0 if math.isinf(edges[beta]) else math.exp(-edges[beta] / avg)
        se += beta * (math.exp(-edges[beta - 1] / avg) - upper)
    return se


def ring_ratio_study(
    beta: int, snrs_db, ring_ratios, rel_tol: float = 1e-4
) -> list[tuple[int, float, float, float]]:
    """Tabulate simplified-scheme 16-DAPSK BER over (R, SNR) grids.

    Returns rows (beta, ring_ratio, snr_db, ber) in grid order, ready for
    CSV export.
    """
    rows = []
    for ring_ratio in ring_ratios:
        if not 1.0 < ring_ratio <= 3.0:
            raise ValueError("ring ratios must lie in (1, 3]")
        for snr_db in snrs_db:
            ber = dapsk_ber_numeric(beta, db_to_linear(snr_db), ring_ratio, rel_tol)
            rows.append((beta, float(ring_ratio), float(snr_db), ber))
    return rows
