"""Rateless erasure code: degree distribution, encoder, decoder, end-to-end."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from admlink.analysis import operating_regions, spectral_efficiency
from admlink.rateless import (
    DegreeDistribution,
    EncodedBit,
    end_to_end_run,
    lt_encode,
    peel_decode,
    robust_soliton,
)

# ---------------------------------------------------------------------------
# degree distribution
# ---------------------------------------------------------------------------


def soliton_reference(k: int, c: float, delta: float) -> np.ndarray:
    """Independent in-test construction of the normalized distribution."""
    d = np.arange(1, k + 1, dtype=np.float64)
    rho = np.where(d == 1, 1.0 / k, 1.0 / (d * np.maximum(d - 1.0, 1.0)))
    s = c * math.log(k / delta) * math.sqrt(k)
    spike = min(max(round(k / s), 1), k)
    tau = np.zeros(k)
    tau[: spike - 1] = s / (d[: spike - 1] * k)
    tau[spike - 1] = max(s * math.log(s / delta) / k, 0.0)
    total = rho + tau
    return total / total.sum()


def test_robust_soliton_matches_reference():
    dist = robust_soliton(100, 0.1, 0.5)
    ref = soliton_reference(100, 0.1, 0.5)
    assert dist.probabilities.shape == (100,)
    np.testing.assert_allclose(dist.probabilities, ref, rtol=1e-12)
    # spike lands at round(k/S) = 19 for these parameters and shows as a bump
    s = 0.1 * math.log(100 / 0.5) * 10.0
    assert round(100 / s) == 19
    assert dist.probabilities[18] > dist.probabilities[17]
    assert dist.probabilities[19] < dist.probabilities[18]


def test_robust_soliton_k1_degenerates_to_degree_one():
    dist = robust_soliton(1, 0.1, 0.5)
    np.testing.assert_allclose(dist.probabilities, [1.0])


def test_robust_soliton_validation():
    with pytest.raises(ValueError):
        robust_soliton(0, 0.1, 0.5)
    with pytest.raises(ValueError):
        robust_soliton(10, 0.0, 0.5)
    with pytest.raises(ValueError):
        robust_soliton(10, 0.1, 1.0)
    with pytest.raises(ValueError):
        robust_soliton(10, 0.1, 0.0)


def test_degree_distribution_validation():
    ok = np.array([0.5, 0.25, 0.25])
    DegreeDistribution(k=3, c=0.1, delta=0.5, probabilities=ok)
    with pytest.raises(ValueError):
        DegreeDistribution(k=4, c=0.1, delta=0.5, probabilities=ok)
    with pytest.raises(ValueError):
        DegreeDistribution(
            k=3, c=0.1, delta=0.5, probabilities=np.array([0.75, 0.5, -0.25])
        )
    with pytest.raises(ValueError):
        DegreeDistribution(
            k=3, c=0.1, delta=0.5, probabilities=np.array([0.5, 0.25, 0.2])
        )
    with pytest.raises(ValueError):
        DegreeDistribution(
            k=3, c=0.1, delta=0.5, probabilities=np.array([0.0, 0.5, 0.5])
        )


def test_sample_degree_frequencies():
    dist = robust_soliton(100, 0.1, 0.5)
    rng = np.random.default_rng(7)
    n = 30_000
    samples = np.array([dist.sample_degree(rng) for _ in range(n)])
    assert samples.min() >= 1 and samples.max() <= 100
    for degree in (1, 2, 19):
        p = dist.probabilities[degree - 1]
        emp = float(np.mean(samples == degree))
        tol = 4.0 * math.sqrt(p * (1 - p) / n)
        assert abs(emp - p) < tol, f"degree {degree}: {emp} vs {p}"


# ---------------------------------------------------------------------------
# encoder
# ---------------------------------------------------------------------------


def test_encoded_bit_validation():
    EncodedBit(sequence_index=0, value=1, neighbor_set=(3, 1))
    with pytest.raises(ValueError):
        EncodedBit(sequence_index=0, value=2, neighbor_set=(1,))
    with pytest.raises(ValueError):
        EncodedBit(sequence_index=0, value=0, neighbor_set=())
    with pytest.raises(ValueError):
        EncodedBit(sequence_index=0, value=0, neighbor_set=(1, 1))


def test_lt_encode_values_are_neighbor_xor():
    dist = robust_soliton(50, 0.1, 0.5)
    msg = np.random.default_rng(5).integers(0, 2, 50).astype(np.uint8)
    encoded = lt_encode(msg, 300, 11, dist)
    assert [e.sequence_index for e in encoded] == list(range(300))
    degree_one = 0
    for e in encoded:
        expected = int(msg[list(e.neighbor_set)].sum()) & 1
        assert e.value == expected
        if len(e.neighbor_set) == 1:
            degree_one += 1
            assert e.value == msg[e.neighbor_set[0]]
    assert degree_one > 0


def test_lt_encode_deterministic_and_linear():
    dist = robust_soliton(40, 0.1, 0.5)
    rng = np.random.default_rng(3)
    a = rng.integers(0, 2, 40).astype(np.uint8)
    b = rng.integers(0, 2, 40).astype(np.uint8)
    enc_a = lt_encode(a, 120, 7, dist)
    enc_a2 = lt_encode(a, 120, 7, dist)
    assert enc_a == enc_a2
    enc_b = lt_encode(b, 120, 7, dist)
    enc_ab = lt_encode(a ^ b, 120, 7, dist)
    for ea, eb, eab in zip(enc_a, enc_b, enc_ab):
        assert ea.neighbor_set == eb.neighbor_set == eab.neighbor_set
        assert eab.value == ea.value ^ eb.value


def test_lt_encode_validation():
    dist = robust_soliton(10, 0.1, 0.5)
    msg = np.zeros(10, dtype=np.uint8)
    with pytest.raises(ValueError):
        lt_encode(msg, 0, 1, dist)
    with pytest.raises(ValueError):
        lt_encode(np.zeros(9, dtype=np.uint8), 5, 1, dist)
    with pytest.raises(ValueError):
        lt_encode(np.full(10, 2, dtype=np.uint8), 5, 1, dist)


# ---------------------------------------------------------------------------
# decoder
# ---------------------------------------------------------------------------


def _as_received(encoded):
    return [(e.sequence_index, e.value) for e in encoded]


def test_peel_decode_degree_one_cover():
    """With a degree-1-only distribution, decoding is plain coverage."""
    dist = DegreeDistribution(
        k=5, c=0.1, delta=0.5, probabilities=np.array([1.0, 0, 0, 0, 0])
    )
    msg = np.array([1, 0, 1, 1, 0], dtype=np.uint8)
    encoded = lt_encode(msg, 60, 13, dist)
    assert all(len(e.neighbor_set) == 1 for e in encoded)
    covered = {e.neighbor_set[0] for e in encoded}
    assert covered == set(range(5))
    out = peel_decode(_as_received(encoded), 5, 13, dist)
    np.testing.assert_array_equal(out, msg)
    # drop everything that touches bit 0: decode must fail
    partial = [e for e in encoded if e.neighbor_set[0] != 0]
    assert peel_decode(_as_received(partial), 5, 13, dist) is None


def test_peel_decode_k1():
    dist = robust_soliton(1, 0.1, 0.5)
    msg = np.array([1], dtype=np.uint8)
    encoded = lt_encode(msg, 3, 2, dist)
    out = peel_decode(_as_received(encoded[:1]), 1, 2, dist)
    np.testing.assert_array_equal(out, msg)


def test_peel_decode_empty_and_duplicates():
    dist = robust_soliton(8, 0.1, 0.5)
    assert peel_decode([], 8, 0, dist) is None
    with pytest.raises(ValueError):
        peel_decode([(0, 1), (0, 1)], 8, 0, dist)


def test_peel_decode_order_invariance():
    dist = robust_soliton(120, 0.1, 0.5)
    msg = np.random.default_rng(21).integers(0, 2, 120).astype(np.uint8)
    encoded = lt_encode(msg, 160, 44, dist)
    received = _as_received(encoded)
    base = peel_decode(received, 120, 44, dist)
    shuffled = list(received)
    random.Random(9).shuffle(shuffled)
    for variant in (list(reversed(received)), shuffled):
        out = peel_decode(variant, 120, 44, dist)
        if base is None:
            assert out is None
        else:
            np.testing.assert_array_equal(out, base)
    # underdetermined case: fewer equations than unknowns always fails
    for variant in (received[:100], list(reversed(received[:100]))):
        assert peel_decode(variant, 120, 44, dist) is None


def test_peel_decode_reencode_identity():
    dist = robust_soliton(90, 0.1, 0.5)
    msg = np.random.default_rng(2).integers(0, 2, 90).astype(np.uint8)
    for count in (110, 130, 150):
        encoded = lt_encode(msg, count, 17, dist)
        out = peel_decode(_as_received(encoded), 90, 17, dist)
        if out is None:
            continue
        np.testing.assert_array_equal(out, msg)
        again = lt_encode(out, count, 17, dist)
        assert [e.value for e in again] == [e.value for e in encoded]


def ge_solve(equations, k):
    """Straight GF(2) Gaussian elimination oracle; rows are Python ints."""
    pivots = {}
    for mask, bit in equations:
        row, b = mask, bit
        while row:
            low = (row & -row).bit_length() - 1
            if low in pivots:
                p_row, p_bit = pivots[low]
                row ^= p_row
                b ^= p_bit
            else:
                pivots[low] = (row, b)
                break
    if len(pivots) < k:
        return None
    values = [0] * k
    for col in sorted(pivots, reverse=True):
        row, b = pivots[col]
        row ^= 1 << col
        while row:
            low = (row & -row).bit_length() - 1
            b ^= values[low]
            row ^= 1 << low
        values[col] = b
    return np.array(values, dtype=np.uint8)


def test_peel_decode_is_maximum_likelihood():
    """The decoder must succeed exactly when elimination over all received
    equations succeeds, and recover the same (unique) message."""
    k = 80
    dist = robust_soliton(k, 0.1, 0.5)
    successes = failures = 0
    for t in range(100):
        msg = np.random.default_rng(500 + t).integers(0, 2, k).astype(np.uint8)
        if t % 5 == 4:
            count = k - 7  # guaranteed underdetermined
        else:
            count = k + 4 + (t % 30)
        encoded = lt_encode(msg, count, 900 + t, dist)
        if t % 2 == 1:
            encoded = [e for i, e in enumerate(encoded) if i % 7 != 3]
        equations = [
            (sum(1 << v for v in e.neighbor_set), e.value) for e in encoded
        ]
        oracle = ge_solve(equations, k)
        out = peel_decode(_as_received(encoded), k, 900 + t, dist)
        if oracle is None:
            assert out is None, f"instance {t}: decoder succeeded, oracle failed"
            failures += 1
        else:
            assert out is not None, f"instance {t}: decoder failed, oracle solved"
            np.testing.assert_array_equal(out, oracle)
            np.testing.assert_array_equal(out, msg)
            successes += 1
    assert successes >= 20 and failures >= 20


# ---------------------------------------------------------------------------
# end-to-end pipeline
# ---------------------------------------------------------------------------


def test_end_to_end_noiseless():
    msg = np.random.default_rng(100).integers(0, 2, 2000).astype(np.uint8)
    result = end_to_end_run(
        msg, "dpsk", avg_snr_db=150.0, coherence_len=2, seed=11
    )
    assert result.outcome == "success"
    assert result.buffer_target == math.ceil(1.15 * 2000) == 2300
    assert result.pairs_transmitted == 575  # ceil(2300 / 4)
    assert result.decode_attempts == 1
    assert result.message_bit_errors == 0
    np.testing.assert_array_equal(result.decoded, msg)
    assert all(row.beta_used == 4 for row in result.rows)
    assert all(row.bits_decided == 4 for row in result.rows)
    assert result.erasures == 0


def test_end_to_end_noiseless_dapsk():
    msg = np.random.default_rng(200).integers(0, 2, 300).astype(np.uint8)
    result = end_to_end_run(
        msg, "dapsk", ring_ratio=2.0, avg_snr_db=150.0, coherence_len=2, seed=1
    )
    assert result.outcome == "success"
    assert result.message_bit_errors == 0
    np.testing.assert_array_equal(result.decoded, msg)


def test_end_to_end_faded_link_throughput_and_transcript():
    msg = np.random.default_rng(300).integers(0, 2, 2000).astype(np.uint8)
    regions = operating_regions("dpsk", None, 1e-4)
    result = end_to_end_run(
        msg, "dpsk", avg_snr_db=15.0, coherence_len=2, seed=3, regions=regions
    )
    assert result.outcome == "success"
    assert result.message_bit_errors is not None and result.message_bit_errors < 50
    se = spectral_efficiency("dpsk", None, 1e-4, 15.0, regions=regions)
    assert abs(result.realized_bits_per_pair - se) / se < 0.10
    # transcript invariants
    rows = result.rows
    assert len(rows) == result.pairs_transmitted
    assert [r.pair_index for r in rows] == list(range(len(rows)))
    fills = [r.buffer_fill for r in rows]
    assert all(b >= a for a, b in zip(fills, fills[1:]))
    assert fills[-1] == result.bits_decided
    assert sum(r.bits_decided for r in rows) == result.bits_decided
    assert result.erasures + result.bits_decided == 4 * result.pairs_transmitted
    assert result.bits_sent == 4 * result.pairs_transmitted
    assert all(r.bits_decided in (0, r.beta_used) for r in rows)
    assert result.realized_bits_per_pair == pytest.approx(
        result.bits_decided / result.pairs_transmitted
    )


def test_end_to_end_deep_fade_times_out():
    msg = np.random.default_rng(400).integers(0, 2, 500).astype(np.uint8)
    result = end_to_end_run(
        msg, "dpsk", avg_snr_db=-20.0, coherence_len=2, seed=5, max_pairs=2000
    )
    assert result.outcome == "timeout"
    assert result.decoded is None
    assert result.message_bit_errors is None
    assert result.pairs_transmitted == 2000
    assert result.bits_decided == 0
    assert result.decode_attempts == 0
    assert result.erasures == 8000
    assert all(row.beta_used == 0 for row in result.rows)


def test_end_to_end_validation():
    msg = np.zeros(10, dtype=np.uint8)
    with pytest.raises(ValueError):
        end_to_end_run(np.zeros(0, dtype=np.uint8), "dpsk", avg_snr_db=15.0)
    with pytest.raises(ValueError):
        end_to_end_run(msg, "dpsk", avg_snr_db=15.0, coherence_len=1)
    with pytest.raises(ValueError):
        end_to_end_run(msg, "psk", avg_snr_db=15.0)
    with pytest.raises(ValueError):
        end_to_end_run(msg, "dapsk", avg_snr_db=15.0)
