"""16-DAPSK per-pair demodulation: joint density, LLRs, thresholds, schemes."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from admlink import kernels
from admlink.channel import NoiseSpec, apply_awgn
from admlink.constellation import build_dapsk_mapping, dapsk_encode
from admlink.dapsk_demod import (
    HYBRID_SECTORS,
    DapskObservation,
    ThresholdSet,
    _exact_llrs_core,
    delta0_estimate,
    enumerate_hypotheses,
    exact_bit_llrs,
    joint_density,
    log_joint_density,
    optimal_rule_demod,
    simple_demod_beta,
    threshold_set,
)

GAMMA_25DB = 10.0**2.5
SIGMA2_25DB = 1.0 / (2.0 * GAMMA_25DB)


def obs(r: float, psi: float, sigma2: float) -> DapskObservation:
    return DapskObservation(
        z_prev=1.0 + 0.0j, z_curr=r * np.exp(1j * psi), sigma2=sigma2
    )


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


def test_band_thresholds_r2_three_decimals():
    """Frozen R=2 threshold table, 3 decimal places."""
    expected = {
        3: (0.818, 0.745, 0.509, 0.364),
        2: (1.0, 0.910, 0.179, 0.0),
        1: (1.0, 1.0, 0.0, 0.0),
    }
    for beta, values in expected.items():
        ts = threshold_set(beta, 2.0)
        got = tuple(round(d, 3) for d in ts.delta)
        assert got == values, f"beta={beta}: {got} != {values}"
        assert round(ts.delta0, 3) == 0.667


def test_delta0_estimate():
    assert delta0_estimate(2.0) == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert delta0_estimate(1.5) == pytest.approx(0.8, rel=1e-12)
    for bad in (1.0, 0.9, 0.0):
        with pytest.raises(ValueError):
            delta0_estimate(bad)


def test_threshold_ordering_over_ring_ratio_grid():
    """0 <= d4 <= d3 <= delta0 <= d2 <= d1 <= 1 for R across (1, 3]."""
    for ring_ratio in np.linspace(1.02, 3.0, 100):
        delta0 = delta0_estimate(float(ring_ratio))
        for beta in (1, 2, 3):
            ts = threshold_set(beta, float(ring_ratio))
            d1, d2, d3, d4 = ts.delta
            assert 0.0 <= d4 <= d3 <= delta0 <= d2 <= d1 <= 1.0, (
                f"R={ring_ratio}, beta={beta}: {ts.delta}"
            )


def test_threshold_set_validation():
    with pytest.raises(ValueError):
        threshold_set(4, 2.0)
    with pytest.raises(ValueError):
        threshold_set(0, 2.0)
    with pytest.raises(ValueError):
        ThresholdSet(beta=2, delta=(0.2, 0.9, 0.1, 0.0), delta0=0.5, ring_ratio=2.0)


def test_bands_partition_unit_interval():
    """Every r' in (0, 1] lands in exactly one of the four band classes."""
    rng = np.random.default_rng(8)
    for ring_ratio in (1.3, 2.0, 2.7):
        for beta in (1, 2, 3):
            d1, d2, d3, d4 = threshold_set(beta, ring_ratio).delta
            r = rng.uniform(1e-9, 1.0, size=2000)
            keep = (r > d1) | (r <= d4)
            drop = ~keep & (r > d3) & (r <= d2)
            hybrid_hi = (r > d2) & (r <= d1)
            hybrid_lo = (r > d4) & (r <= d3)
            total = (
                keep.astype(int) + drop.astype(int) + hybrid_hi.astype(int)
                + hybrid_lo.astype(int)
            )
            # hybrid bands are subsets of "not keep and not drop"
            assert np.all((~keep & ~drop) == (hybrid_hi | hybrid_lo))
            assert np.all(total == 1)


# ---------------------------------------------------------------------------
# joint density
# ---------------------------------------------------------------------------


def test_density_normalizes_to_one():
    """Total probability over r in (0, inf), psi in (-pi, pi] is 1.

    The ratio density has a 1/r^3 tail, so the r axis is compactified with
    r = tan(u) to integrate the full half-line.
    """
    mapping = build_dapsk_mapping(2.0)
    sigma2 = 0.05
    for hyp in (
        (mapping.a1, 1.0, 0.0),  # stay inner
        (mapping.a1, mapping.ring_ratio, math.pi / 4),  # inner -> outer
    ):
        total, _ = dblquad(
            lambda psi, u: joint_density(math.tan(u), psi, hyp, sigma2, mapping)
            / math.cos(u) ** 2,
            1e-9,
            math.pi / 2 - 1e-9,
            -math.pi,
            math.pi,
            epsabs=1e-6,
            epsrel=1e-6,
        )
        assert total == pytest.approx(1.0, abs=1e-4)


def test_density_peak_location():
    """At high SNR the density concentrates at (r, psi) = (|alpha|, arg alpha)."""
    mapping = build_dapsk_mapping(2.0)
    sigma2 = 0.005
    hyp = (mapping.a1, mapping.ring_ratio, math.pi / 2)
    rs = np.linspace(0.05, 4.0, 400)
    psis = np.linspace(-math.pi, math.pi, 361)
    grid = np.array(
        [[log_joint_density(r, p, hyp, sigma2, mapping) for p in psis] for r in rs]
    )
    i, j = np.unravel_index(np.argmax(grid), grid.shape)
    assert abs(rs[i] - mapping.ring_ratio) < 0.15
    assert abs(psis[j] - math.pi / 2) < 0.05


def test_density_input_validation():
    mapping = build_dapsk_mapping(2.0)
    with pytest.raises(ValueError):
        joint_density(0.0, 0.1, (mapping.a1, 1.0, 0.0), 0.05, mapping)
    with pytest.raises(ValueError):
        joint_density(1.0, 0.1, (mapping.a1, 2.5, 0.0), 0.05, mapping)  # bad alpha
    with pytest.raises(ValueError):
        joint_density(1.0, 0.1, (0.77, 1.0, 0.0), 0.05, mapping)  # bad d


def test_enumerate_hypotheses_structure():
    mapping = build_dapsk_mapping(2.0)
    hyps = enumerate_hypotheses(mapping)
    assert len(hyps) == 32
    bits = np.array([h.bits for h in hyps])
    for i in range(4):
        assert int(np.sum(bits[:, i] == 0)) == 16  # balanced bit classes
    combos = {(round(h.d_abs, 12), round(h.alpha_abs, 12)) for h in hyps}
    assert combos == {
        (round(mapping.a1, 12), 1.0),
        (round(mapping.a2, 12), 1.0),
        (round(mapping.a1, 12), round(mapping.ring_ratio, 12)),
        (round(mapping.a2, 12), round(1.0 / mapping.ring_ratio, 12)),
    }


# ---------------------------------------------------------------------------
# exact LLRs
# ---------------------------------------------------------------------------


def test_observation_properties():
    o = DapskObservation(z_prev=2.0 + 0.0j, z_curr=1.0 + 1.0j, sigma2=0.1)
    assert o.r_k == pytest.approx(math.sqrt(2) / 2)
    assert o.r_prime == pytest.approx(math.sqrt(2) / 2)
    assert o.psi_k == pytest.approx(math.pi / 4)
    o2 = DapskObservation(z_prev=1.0, z_curr=3.0, sigma2=0.1)
    assert o2.r_prime == pytest.approx(1.0 / 3.0)  # folded ratio
    with pytest.raises(ValueError):
        DapskObservation(z_prev=0.0, z_curr=1.0, sigma2=0.1)
    with pytest.raises(ValueError):
        DapskObservation(z_prev=1.0, z_curr=1.0, sigma2=0.0)


def test_llr_invariant_under_ratio_inversion():
    """All four LLRs are identical at (r, psi) and (1/r, psi): 1e4 points."""
    rng = np.random.default_rng(42)
    n = 10_000
    r = rng.uniform(0.15, 1.0, size=n)
    psi = rng.uniform(-math.pi, math.pi, size=n)
    mapping = build_dapsk_mapping(2.0)
    sigma2 = 1.0 / (2.0 * 10.0**2.0)  # 20 dB
    a = _exact_llrs_core(r, psi, sigma2, mapping)
    b = _exact_llrs_core(1.0 / r, psi, sigma2, mapping)
    scale = np.maximum(np.abs(a), 1.0)
    assert np.max(np.abs(a - b) / scale) < 1e-9


def test_llr_sign_pattern_matches_brute_force():
    """Exact LLR signs at (r=1, psi=pi/4+0.01) equal direct probability sums."""
    mapping = build_dapsk_mapping(2.0)
    sigma2 = 0.01
    o = obs(1.0, math.pi / 4 + 0.01, sigma2)
    llrs = exact_bit_llrs(o, mapping)

    # brute force: sum the plain (non-log) densities per bit class
    hyps = enumerate_hypotheses(mapping)
    dens = np.array(
        [joint_density(o.r_k, o.psi_k, h, sigma2, mapping) for h in hyps]
    )
    bits = np.array([h.bits for h in hyps])
    for i in range(4):
        p0 = float(dens[bits[:, i] == 0].sum())
        p1 = float(dens[bits[:, i] == 1].sum())
        brute = math.log(p0 / p1)
        assert np.sign(llrs[i]) == np.sign(brute)
        assert llrs[i] == pytest.approx(brute, rel=1e-9)


def test_numeric_delta0_root_within_2pct_at_30db():
    """The r' where the bit-0 LLR changes sign at psi=0 sits within 2% of
    the closed-form estimate 2/(1+R) at 30 dB."""
    mapping = build_dapsk_mapping(2.0)
    sigma2 = 1.0 / (2.0 * 10.0**3.0)

    def llr_b0(r):
        return _exact_llrs_core(
            np.array([r]), np.array([0.0]), sigma2, mapping
        )[0, 0]

    lo, hi = 0.5, 0.9
    assert llr_b0(lo) < 0 < llr_b0(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if llr_b0(mid) < 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    estimate = delta0_estimate(2.0)
    assert abs(estimate - root) / root <= 0.02


# ---------------------------------------------------------------------------
# optimal-rule scheme
# ---------------------------------------------------------------------------


def test_rule_demod_validation():
    mapping = build_dapsk_mapping(2.0)
    with pytest.raises(ValueError):
        optimal_rule_demod(obs(0.9, 0.1, 0.01), 0, mapping)
    with pytest.raises(ValueError):
        optimal_rule_demod(obs(0.9, 0.1, 0.01), 5, mapping)


def test_rule_b0_last_at_delta0():
    """At r' exactly delta0 the amplitude bit is the least reliable bit."""
    mapping = build_dapsk_mapping(2.0)
    delta0 = delta0_estimate(2.0)
    for psi in (0.05, 1.3, -2.0):
        verdict = optimal_rule_demod(obs(delta0, psi, 0.01), 3, mapping)
        assert verdict.slots[0] is None  # erased at beta=3
        assert verdict.beta == 3
        v1 = optimal_rule_demod(obs(delta0, psi, 0.01), 4, mapping)
        assert v1.beta == 4  # beta=4 still decides everything


def test_rule_kept_sets_nested():
    mapping = build_dapsk_mapping(2.0)
    rng = np.random.default_rng(77)
    for _ in range(300):
        o = obs(rng.uniform(0.05, 1.0), rng.uniform(-math.pi, math.pi), 0.02)
        kept_prev: set[int] = set()
        for beta in (1, 2, 3, 4):
            kept = set(optimal_rule_demod(o, beta, mapping).decided_indices)
            assert len(kept) == beta
            assert kept_prev <= kept
            kept_prev = kept


def _kernel_inputs(mapping):
    phase4 = (mapping.packed_phase_labels.astype(np.uint8) << 1).astype(np.uint8)
    return mapping.up_steps, mapping.down_steps, phase4


def test_rule_demod_matches_kernel():
    """The per-observation rule demod and the vectorized kernel agree."""
    mapping = build_dapsk_mapping(2.0)
    up, down, phase4 = _kernel_inputs(mapping)
    delta0 = delta0_estimate(2.0)
    rng = np.random.default_rng(5)
    r_prime = rng.uniform(0.05, 1.0, size=500)
    psi = rng.uniform(-math.pi, math.pi, size=500)
    hard, masks = kernels.dapsk_rule(
        r_prime, psi, up, down, phase4, delta0, mapping.ring_ratio
    )
    for i in range(500):
        o = obs(float(r_prime[i]), float(psi[i]), 0.01)
        for beta in (1, 2, 3, 4):
            verdict = optimal_rule_demod(o, beta, mapping)
            mask = sum(1 << j for j in verdict.decided_indices)
            assert mask == int(masks[i, beta - 1]), (i, beta)
        packed = sum(
            (optimal_rule_demod(o, 4, mapping).slots[j] or 0) << j for j in range(4)
        )
        assert packed == int(hard[i])


def test_rule_ranking_matches_exact_llrs_95pct_at_25db():
    """Full-order agreement between the rule and exact LLRs at 25 dB.

    Observations are sampled from the actual channel (256^2 pairs at 25 dB)
    so the comparison is weighted the way the demodulator sees the world.
    """
    mapping = build_dapsk_mapping(2.0)
    up, down, phase4 = _kernel_inputs(mapping)
    delta0 = delta0_estimate(2.0)
    rng = np.random.default_rng(314)
    n = 256 * 256
    bits = rng.integers(0, 2, size=4 * n, dtype=np.uint8)
    z = apply_awgn(dapsk_encode(bits, mapping), NoiseSpec(snr_db=25.0), seed=27)
    mags = np.abs(z)
    ratio = mags[1:] / mags[:-1]
    r_prime = np.minimum(ratio, 1.0 / ratio)
    psi = np.angle(z[1:] * np.conj(z[:-1]))

    _, rule_masks = kernels.dapsk_rule(
        r_prime, psi, up, down, phase4, delta0, mapping.ring_ratio
    )
    llrs = _exact_llrs_core(ratio, psi, SIGMA2_25DB, mapping)
    order = np.argsort(-np.abs(llrs), axis=1, kind="stable")
    exact_masks = np.bitwise_or.accumulate((1 << order).astype(np.uint8), axis=1)
    agree = np.all(rule_masks[:, :3] == exact_masks[:, :3], axis=1)
    fraction = float(np.mean(agree))
    assert fraction >= 0.95, f"ranking agreement {fraction:.4f}"


# ---------------------------------------------------------------------------
# simplified scheme
# ---------------------------------------------------------------------------


def test_simple_demod_validation():
    mapping = build_dapsk_mapping(2.0)
    ts3 = threshold_set(3, 2.0)
    with pytest.raises(ValueError):
        simple_demod_beta(obs(0.9, 0.1, 0.01), 4, ts3, mapping)
    with pytest.raises(ValueError):
        simple_demod_beta(obs(0.9, 0.1, 0.01), 2, ts3, mapping)  # beta mismatch


def test_simple_demod_band_examples_beta3():
    """Outer band keeps b0; middle band drops it; transition bands use psi."""
    mapping = build_dapsk_mapping(2.0)
    ts = threshold_set(3, 2.0)
    psi = math.pi / 8 - 0.01

    # r' above delta_1: keep b0 plus the two best phase bits
    verdict = simple_demod_beta(obs(0.9, psi, 0.01), 3, ts, mapping)
    assert set(verdict.decided_indices) == {0, 1, 2}

    # r' in the drop band (delta_3, delta_2]: the three phase bits survive
    verdict = simple_demod_beta(obs(0.6, psi, 0.01), 3, ts, mapping)
    assert set(verdict.decided_indices) == {1, 2, 3}

    # transition band (delta_2, delta_1]: psi decides
    verdict = simple_demod_beta(obs(0.8, 0.0, 0.01), 3, ts, mapping)
    assert set(verdict.decided_indices) == {1, 2, 3}  # sector centre: drop b0
    verdict = simple_demod_beta(obs(0.8, math.pi / 8, 0.01), 3, ts, mapping)
    assert 0 in verdict.decided_indices  # between sectors: keep b0


def test_simple_demod_boundary_ties():
    """Band membership is half-open downward; sector edges keep b0."""
    mapping = build_dapsk_mapping(2.0)
    ts = threshold_set(3, 2.0)
    d1, d2, d3, d4 = ts.delta

    # r' exactly at delta_2 belongs to the drop band (delta_3, delta_2]
    verdict = simple_demod_beta(obs(d2, 0.7, 0.01), 3, ts, mapping)
    assert 0 not in verdict.decided_indices
    # r' exactly at delta_1 belongs to the transition band (delta_2, delta_1]
    verdict = simple_demod_beta(obs(d1, 0.0, 0.01), 3, ts, mapping)
    assert 0 not in verdict.decided_indices  # psi = 0 is a sector centre
    # just past the sector edge keeps b0; just inside drops it
    halfwidth = HYBRID_SECTORS[3][2]
    verdict = simple_demod_beta(obs(d1, halfwidth + 1e-9, 0.01), 3, ts, mapping)
    assert 0 in verdict.decided_indices
    verdict = simple_demod_beta(obs(d1, halfwidth - 1e-9, 0.01), 3, ts, mapping)
    assert 0 not in verdict.decided_indices
    # r' exactly at delta_3 falls into the lower transition band
    verdict = simple_demod_beta(obs(d3, halfwidth + 1e-9, 0.01), 3, ts, mapping)
    assert 0 in verdict.decided_indices


def test_sector_edge_tie_keeps_b0_at_kernel_level():
    """psi exactly on a transition-sector edge (strict inequality) keeps b0.

    The complex round trip through an observation cannot represent the edge
    exactly, so the tie semantics is pinned where psi enters as a plain
    float: the banded kernel.
    """
    mapping = build_dapsk_mapping(2.0)
    up, down, phase4 = _kernel_inputs(mapping)
    delta0 = delta0_estimate(2.0)
    for beta in (1, 2, 3):
        ts = threshold_set(beta, 2.0)
        d1, d2, _, _ = ts.delta
        if d1 == d2:  # no transition band at this ring ratio
            continue
        center0, period, halfwidth = HYBRID_SECTORS[beta]
        r_mid = 0.5 * (d2 + d1)
        psi_edge = center0 + halfwidth
        _, keep = kernels.dapsk_simple(
            np.array([r_mid, r_mid]),
            np.array([psi_edge, center0]),
            up, down, phase4, delta0,
            *ts.delta, center0, period, halfwidth, beta,
        )
        assert keep[0] & 1  # on the edge: keep b0
        assert not (keep[1] & 1)  # at the centre: drop b0


def test_simple_beta1_r2_never_keeps_amplitude_bit():
    """At R=2 the beta=1 banded scheme always keeps a phase bit, never b0."""
    mapping = build_dapsk_mapping(2.0)
    ts = threshold_set(1, 2.0)
    rng = np.random.default_rng(12)
    for _ in range(1000):
        o = obs(rng.uniform(1e-6, 1.0), rng.uniform(-math.pi, math.pi), 0.01)
        verdict = simple_demod_beta(o, 1, ts, mapping)
        assert verdict.beta == 1
        assert 0 not in verdict.decided_indices


def test_simple_demod_matches_kernel():
    mapping = build_dapsk_mapping(2.0)
    up, down, phase4 = _kernel_inputs(mapping)
    delta0 = delta0_estimate(2.0)
    rng = np.random.default_rng(6)
    r_prime = rng.uniform(0.05, 1.0, size=400)
    psi = rng.uniform(-math.pi, math.pi, size=400)
    for beta in (1, 2, 3):
        ts = threshold_set(beta, 2.0)
        center0, period, halfwidth = HYBRID_SECTORS[beta]
        _, keep = kernels.dapsk_simple(
            r_prime, psi, up, down, phase4, delta0,
            *ts.delta, center0, period, halfwidth, beta,
        )
        for i in range(400):
            verdict = simple_demod_beta(
                obs(float(r_prime[i]), float(psi[i]), 0.01), beta, ts, mapping
            )
            mask = sum(1 << j for j in verdict.decided_indices)
            assert mask == int(keep[i]), (i, beta)


def test_simple_vs_rule_kept_sets_90pct_at_25db():
    """Channel-sampled kept-set agreement per beta at 25 dB."""
    mapping = build_dapsk_mapping(2.0)
    up, down, phase4 = _kernel_inputs(mapping)
    delta0 = delta0_estimate(2.0)
    rng = np.random.default_rng(2025)
    bits = rng.integers(0, 2, size=4 * 100_000, dtype=np.uint8)
    z = apply_awgn(dapsk_encode(bits, mapping), NoiseSpec(snr_db=25.0), seed=99)
    mags = np.abs(z)
    ratio = mags[1:] / mags[:-1]
    r_prime = np.minimum(ratio, 1.0 / ratio)
    psi = np.angle(z[1:] * np.conj(z[:-1]))

    _, rule_masks = kernels.dapsk_rule(
        r_prime, psi, up, down, phase4, delta0, mapping.ring_ratio
    )
    for beta in (1, 2, 3):
        ts = threshold_set(beta, 2.0)
        center0, period, halfwidth = HYBRID_SECTORS[beta]
        _, keep = kernels.dapsk_simple(
            r_prime, psi, up, down, phase4, delta0,
            *ts.delta, center0, period, halfwidth, beta,
        )
        agreement = float(np.mean(keep == rule_masks[:, beta - 1]))
        assert agreement >= 0.90, f"beta={beta}: kept-set agreement {agreement:.4f}"
