"""LT rateless erasure code and the end-to-end adaptive-demodulation pipeline.

The transmitter LT-encodes a k-bit message into a potentially limitless
stream of encoded bits; every symbol pair carries four of them.  The
receiver's beta-decision demodulator decides the beta most reliable bits of
each pair and erases the rest; erased encoded bits are dropped entirely
(their indices never reach the decoder).  Because the LT code only needs
*some* (1+epsilon)k encoded bits — any of them — erasures cost throughput
but not correctness, which is what makes adaptive demodulation work without
a feedback channel.

Encoded bit ``index`` determines its neighbor set: the sampler is seeded by
(stream seed, index), so the decoder regenerates neighbor sets for exactly
the indices that survived, in any arrival order.

The decoder is peeling with deferral: it resolves degree-1 equations and
substitutes (the sum-product fixed point over an erasure channel), and when
no degree-1 equation remains it defers one still-unknown bit — removing it
from every equation while carrying its contribution symbolically — and
resumes peeling.  The deferred bits are recovered at the end by dense
elimination over GF(2) and substituted back.  This recovers the message
whenever the received equations determine it at all (maximum-likelihood
erasure decoding), while keeping near-linear cost on the typical path where
few or no deferrals occur.  Failure — the system genuinely underdetermines
the message — is a normal outcome, not an error.  Residual bit errors among
decided bits are not modeled inside the decoder (it assumes non-erased bits
are correct); the end-to-end result reports post-decode message errors so
the effect of the raw-BER target stays visible.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .analysis import OperatingRegions, operating_regions
from .channel import FadingSpec, apply_rayleigh_block
from .constellation import (
    build_dapsk_mapping,
    build_dpsk_mapping,
    dapsk_encode,
    dpsk_encode,
)
from .dapsk_demod import HYBRID_SECTORS, delta0_estimate, threshold_set

__all__ = [
    "DegreeDistribution",
    "EncodedBit",
    "robust_soliton",
    "lt_encode",
    "peel_decode",
    "EndToEndResult",
    "TranscriptRow",
    "end_to_end_run",
]


@dataclass(frozen=True)
class DegreeDistribution:
    """Robust-soliton degree distribution over degrees 1..k."""

    k: int
    c: float
    delta: float
    probabilities: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self) -> None:
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.shape != (self.k,):
            raise ValueError("probabilities must cover degrees 1..k")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        if not p[0] > 0:
            raise ValueError("degree-1 probability must be positive")
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "_cumulative", np.cumsum(p))

    def sample_degree(self, rng: np.random.Generator) -> int:
        """Draw one degree in 1..k."""
        # searchsorted on the cumulative distribution
        u = rng.random()
        return int(np.searchsorted(self._cumulative, u, side="right")) + 1


@dataclass(frozen=True)
class EncodedBit:
    """One LT-encoded bit: XOR of the message bits in its neighbor set."""

    sequence_index: int
    value: int
    neighbor_set: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise ValueError("value must be 0 or 1")
        if len(self.neighbor_set) == 0:
            raise ValueError("neighbor set must be non-empty")
        if len(set(self.neighbor_set)) != len(self.neighbor_set):
            raise ValueError("neighbor indices must be distinct")


def robust_soliton(k: int, c: float, delta: float) -> DegreeDistribution:
    """Normalized robust-soliton distribution.

    Ideal-soliton base rho(1) = 1/k, rho(i) = 1/(i(i-1)); spike/boost term
    tau(i) = S/(i k) for i below the spike, tau(spike) = S ln(S/delta)/k,
    with S = c ln(k/delta) sqrt(k) and the spike at round(k/S) (clamped to
    [1, k]; a non-positive boost, possible at very small k, is clamped to 0).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not c > 0:
        raise ValueError("c must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    degrees = np.arange(1, k + 1, dtype=np.float64)
    rho = np.zeros(k)
    rho[0] = 1.0 / k
    if k > 1:
        rho[1:] = 1.0 / (degrees[1:] * (degrees[1:] - 1.0))
    s = c * math.log(k / delta) * math.sqrt(k)
    spike = min(max(int(round(k / s)), 1), k)
    tau = np.zeros(k)
    tau[: spike - 1] = s / (degrees[: spike - 1] * k)
    tau[spike - 1] = max(s * math.log(s / delta) / k, 0.0) if s > 0 else 0.0
    total = rho + tau
    return DegreeDistribution(k=k, c=c, delta=delta, probabilities=total / total.sum())


def _neighbor_set(
    k: int, dist: DegreeDistribution, seed: int, index: int
) -> np.ndarray:
    """Regenerate the neighbor set of encoded bit `index` for stream `seed`."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    degree = dist.sample_degree(rng)
    return rng.choice(k, size=degree, replace=False)


def _encode_range(
    msg: np.ndarray, start: int, stop: int, seed: int, dist: DegreeDistribution
) -> list[EncodedBit]:
    out = []
    for index in range(start, stop):
        neighbors = _neighbor_set(dist.k, dist, seed, index)
        value = int(msg[neighbors].sum(dtype=np.int64) & 1)
        out.append(
            EncodedBit(
                sequence_index=index,
                value=value,
                neighbor_set=tuple(int(i) for i in neighbors),
            )
        )
    return out


def lt_encode(
    message, count: int, seed: int, dist: DegreeDistribution
) -> list[EncodedBit]:
    """Encode `count` bits (indices 0..count-1) of the LT stream for `message`."""
    if count < 1:
        raise ValueError("count must be >= 1")
    msg = np.asarray(message, dtype=np.uint8).ravel()
    if msg.size != dist.k:
        raise ValueError(f"message must have k={dist.k} bits")
    if msg.size and int(msg.max(initial=0)) > 1:
        raise ValueError("message bits must be 0/1")
    return _encode_range(msg, 0, count, seed, dist)


def peel_decode(received, k: int, seed: int, dist: DegreeDistribution):
    """Peeling decoder with deferral (maximum-likelihood erasure decoding).

    Degree-1 equations are resolved and substituted repeatedly; when none
    remains, one unknown bit from a minimum-degree equation is deferred
    (dropped from every equation, its contribution carried as a bitmask)
    and peeling resumes.  The deferred bits are then solved by dense GF(2)
    elimination and substituted back.  The decode therefore succeeds
    exactly when the received equations determine the message, and the
    outcome depends only on the *set* of received indices, not their order.

    Args:
        received: iterable of (sequence_index, value) pairs; indices distinct.
        k, seed, dist: stream parameters used to regenerate neighbor sets.

    Returns:
        The recovered k-bit message as a uint8 array on success, or None on
        Failure (the received equations underdetermine the message).
        Failure is a normal outcome.
    """
    pairs = list(received)
    indices = [int(i) for i, _v in pairs]
    if len(set(indices)) != len(indices):
        raise ValueError("received sequence indices must be distinct")

    n_eqs = len(pairs)
    # equation state: remaining unknown neighbors, current value bit, and the
    # XOR-mask of deferred slots folded into the equation so far
    eq_neighbors: list[set[int]] = []
    eq_bit: list[int] = []
    eq_mask: list[int] = [0] * n_eqs
    consumed = [False] * n_eqs  # equations spent defining a solved bit
    by_var: dict[int, list[int]] = {}
    for eq_id, (index, value) in enumerate(pairs):
        neighbors = set(int(x) for x in _neighbor_set(k, dist, seed, int(index)))
        eq_neighbors.append(neighbors)
        eq_bit.append(int(value) & 1)
        for var in neighbors:
            by_var.setdefault(var, []).append(eq_id)

    # Solved bits are affine in the deferred slots: value = bit XOR mask.slots
    sol_bit: dict[int, int] = {}
    sol_mask: dict[int, int] = {}
    deferred_slot: dict[int, int] = {}
    # lazily invalidated min-degree heap (degrees only ever decrease)
    heap = [(len(s), eq_id) for eq_id, s in enumerate(eq_neighbors)]
    heapq.heapify(heap)
    n_pending = k

    def _solve(eq_id: int) -> None:
        nonlocal n_pending
        var = next(iter(eq_neighbors[eq_id]))
        eq_neighbors[eq_id].clear()
        consumed[eq_id] = True
        bit, mask = eq_bit[eq_id], eq_mask[eq_id]
        sol_bit[var] = bit
        sol_mask[var] = mask
        n_pending -= 1
        for other in by_var.get(var, ()):
            neigh = eq_neighbors[other]
            if var in neigh:
                neigh.discard(var)
                eq_bit[other] ^= bit
                eq_mask[other] ^= mask
                heapq.heappush(heap, (len(neigh), other))

    while n_pending > 0:
        # peel: pop entries until a live degree-1 equation or a stall
        stalled_eq = -1
        acted = False
        while heap:
            degree, eq_id = heapq.heappop(heap)
            if len(eq_neighbors[eq_id]) != degree:
                continue  # stale entry
            if degree == 0:
                continue  # fully consumed; nothing to peel or defer
            if degree == 1:
                _solve(eq_id)
                acted = True
            else:
                stalled_eq = eq_id  # live minimum-degree equation, >= 2
            break
        if acted:
            continue
        if stalled_eq < 0:
            return None  # remaining bits appear in no equation
        # defer one bit from the minimum-degree equation and resume peeling
        var = min(eq_neighbors[stalled_eq])
        heapq.heappush(heap, (len(eq_neighbors[stalled_eq]), stalled_eq))
        slot = len(deferred_slot)
        deferred_slot[var] = slot
        slot_bit = 1 << slot
        n_pending -= 1
        for other in by_var.get(var, ()):
            neigh = eq_neighbors[other]
            if var in neigh:
                neigh.discard(var)
                eq_mask[other] ^= slot_bit
                heapq.heappush(heap, (len(neigh), other))

    # every non-consumed equation is now a parity constraint on the deferred
    # slots; eliminate over GF(2)
    n_deferred = len(deferred_slot)
    pivot_rows: dict[int, tuple[int, int]] = {}
    rank = 0
    for eq_id in range(n_eqs):
        if consumed[eq_id]:
            continue
        row, bit = eq_mask[eq_id], eq_bit[eq_id]
        while row:
            low = (row & -row).bit_length() - 1
            if low in pivot_rows:
                p_row, p_bit = pivot_rows[low]
                row ^= p_row
                bit ^= p_bit
            else:
                pivot_rows[low] = (row, bit)
                rank += 1
                break
    if rank < n_deferred:
        return None
    slot_value = [0] * n_deferred
    for col in sorted(pivot_rows, reverse=True):
        row, bit = pivot_rows[col]
        row ^= 1 << col
        while row:
            low = (row & -row).bit_length() - 1
            bit ^= slot_value[low]
            row ^= 1 << low
        slot_value[col] = bit

    out = np.zeros(k, dtype=np.uint8)
    for var, slot in deferred_slot.items():
        out[var] = slot_value[slot]
    for var, bit in sol_bit.items():
        mask = sol_mask[var]
        while mask:
            low = (mask & -mask).bit_length() - 1
            bit ^= slot_value[low]
            mask ^= 1 << low
        out[var] = bit
    return out


# ---------------------------------------------------------------------------
# end-to-end pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TranscriptRow:
    """Per-pair record of the end-to-end run."""

    pair_index: int
    instantaneous_snr: float
    beta_used: int
    bits_decided: int
    buffer_fill: int


@dataclass(frozen=True)
class EndToEndResult:
    """Outcome of one end-to-end adaptive-demodulation transmission."""

    outcome: str  # "success" | "timeout"
    pairs_transmitted: int
    bits_sent: int  # encoded bits consumed (4 per pair)
    bits_decided: int
    erasures: int
    decode_attempts: int
    buffer_target: int
    realized_bits_per_pair: float
    message_bit_errors: int | None  # None unless decode succeeded
    decoded: np.ndarray | None
    rows: tuple[TranscriptRow, ...]


def _block_demod(scheme, beta, y_block, mapping, phase4, delta0):
    """Kernel pass over one fading block; returns (hard, keep) per pair."""
    if scheme == "dpsk":
        phi = np.angle(y_block[1:] * np.conj(y_block[:-1]))
        hard, masks = kernels.dpsk_rule(
            phi, mapping.up_steps, mapping.down_steps, mapping.packed_labels
        )
        return hard, masks[:, beta - 1]
    mags = np.abs(y_block)
    ratio = mags[1:] / mags[:-1]
    r_prime = np.minimum(ratio, 1.0 / ratio)
    psi = np.angle(y_block[1:] * np.conj(y_block[:-1]))
    if beta == 4:
        hard, masks = kernels.dapsk_rule(
            r_prime,
            psi,
            mapping.up_steps,
            mapping.down_steps,
            phase4,
            delta0,
            mapping.ring_ratio,
        )
        return hard, masks[:, 3]
    t = threshold_set(beta, mapping.ring_ratio)
    center0, period, halfwidth = HYBRID_SECTORS[beta]
    return kernels.dapsk_simple(
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
        beta,
    )


def end_to_end_run(
    message,
    scheme: str,
    *,
    ring_ratio: float | None = None,
    avg_snr_db: float,
    coherence_len: int = 21,
    target_ber: float = 1e-4,
    epsilon: float = 0.15,
    c: float = 0.1,
    delta: float = 0.5,
    max_pairs: int = 1_000_000,
    seed: int = 0,
    regions: OperatingRegions | None = None,
) -> EndToEndResult:
    """Stream an LT-encoded message through the adaptive link until decoded.

    Each fading block carries one reference symbol plus ``coherence_len - 1``
    data pairs; the demodulator beta for the block comes from the operating
    regions at the block's instantaneous SNR (beta = 0 erases the whole
    block).  Every pair consumes four encoded bits; decided bits accumulate
    in the decoder buffer.  Once the buffer reaches ceil((1+epsilon) k) bits
    the peeling decoder runs; on Failure the target grows by 2% of k and
    streaming continues, up to the ``max_pairs`` budget ("timeout").
    """
    msg = np.asarray(message, dtype=np.uint8).ravel()
    k = int(msg.size)
    if k < 1:
        raise ValueError("message must be non-empty")
    if coherence_len < 2:
        raise ValueError("coherence_len must be >= 2")
    if scheme not in ("dpsk", "dapsk"):
        raise ValueError("scheme must be dpsk or dapsk")
    if scheme == "dapsk" and ring_ratio is None:
        raise ValueError("dapsk requires a ring ratio")
    if regions is None:
        regions = operating_regions(scheme, ring_ratio, target_ber)

    dist = robust_soliton(k, c, delta)
    if scheme == "dpsk":
        mapping = build_dpsk_mapping()
        phase4 = None
        delta0 = 0.0
        encode = dpsk_encode
    else:
        mapping = build_dapsk_mapping(ring_ratio)
        phase4 = (mapping.packed_phase_labels.astype(np.uint8) << 1).astype(np.uint8)
        delta0 = delta0_estimate(mapping.ring_ratio)
        encode = dapsk_encode

    # channel RNG: spawn key disjoint from the LT per-index keys (length 2)
    channel_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(0, 0))
    )
    fading = FadingSpec(avg_snr_db=avg_snr_db, coherence_len=coherence_len)

    pairs_per_block = coherence_len - 1
    buffer_target = math.ceil((1.0 + epsilon) * k)
    retry_step = max(1, math.ceil(0.02 * k))

    buffer: list[tuple[int, int]] = []
    rows: list[TranscriptRow] = []
    next_index = 0  # next encoded-bit sequence index
    pair_index = 0
    erasures = 0
    decode_attempts = 0
    decoded = None
    outcome = "timeout"
    batch_blocks = 128

    while pair_index < max_pairs and decoded is None:
        budget_pairs = max_pairs - pair_index
        n_blocks = min(batch_blocks, math.ceil(budget_pairs / pairs_per_block))
        # encoded bits for this batch
        n_bits = 4 * pairs_per_block * n_blocks
        encoded = _encode_range(msg, next_index, next_index + n_bits, seed, dist)
        enc_vals = np.array([e.value for e in encoded], dtype=np.uint8)

        # modulate per block (fresh reference symbol each block), then fade
        streams = [
            encode(
                enc_vals[b * 4 * pairs_per_block : (b + 1) * 4 * pairs_per_block],
                mapping,
            )
            for b in range(n_blocks)
        ]
        tx = np.concatenate(streams)
        y, inst_snr = apply_rayleigh_block(tx, fading, channel_rng)

        for b in range(n_blocks):
            if pair_index >= max_pairs or decoded is not None:
                break
            y_block = y[b * coherence_len : (b + 1) * coherence_len]
            gamma_inst = float(inst_snr[b])
            beta = int(regions.select_beta(gamma_inst))
            block_pairs = min(pairs_per_block, max_pairs - pair_index)
            base = next_index + b * 4 * pairs_per_block
            if beta > 0:
                hard, keep = _block_demod(
                    scheme, beta, y_block, mapping, phase4, delta0
                )
            else:
                hard = keep = None
            for p in range(block_pairs):
                decided_here = 0
                if beta > 0:
                    km = int(keep[p])
                    h = int(hard[p])
                    for j in range(4):
                        if (km >> j) & 1:
                            buffer.append((base + 4 * p + j, (h >> j) & 1))
                            decided_here += 1
                erasures += 4 - decided_here
                rows.append(
                    TranscriptRow(
                        pair_index=pair_index,
                        instantaneous_snr=gamma_inst,
                        beta_used=beta,
                        bits_decided=decided_here,
                        buffer_fill=len(buffer),
                    )
                )
                pair_index += 1
                if len(buffer) >= buffer_target and decoded is None:
                    decode_attempts += 1
                    result = peel_decode(buffer, k, seed, dist)
                    if result is not None:
                        decoded = result
                        outcome = "success"
                        break
                    buffer_target += retry_step
        next_index += n_bits

    bits_decided = len(buffer)
    errors = int(np.sum(decoded != msg)) if decoded is not None else None
    return EndToEndResult(
        outcome=outcome,
        pairs_transmitted=pair_index,
        bits_sent=4 * pair_index,
        bits_decided=bits_decided,
        erasures=erasures,
        decode_attempts=decode_attempts,
        buffer_target=buffer_target,
        realized_bits_per_pair=bits_decided / pair_index if pair_index else 0.0,
        message_bit_errors=errors,
        decoded=decoded,
        rows=tuple(rows),
    )
