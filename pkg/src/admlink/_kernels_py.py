"""Pure-NumPy demodulation kernels (fallback when the compiled core is absent).

Signatures match the compiled versions in ``admlink._kernels`` exactly; the
test suite checks bit-exact parity between the two backends.  All kernels
consume the sufficient statistics (pair phase difference, folded magnitude
ratio) as flat float64 arrays and return per-pair hard decisions plus
kept-bit masks, so a single pass serves every beta at once:

* ``masks[t, b-1]`` is the bitmask (bit j set = bit j kept) of the b most
  reliable bits of pair t; prefixes are nested by construction.
* ``hard[t]`` packs the four hard bit values as b0 | b1<<1 | b2<<2 | b3<<3.
"""

from __future__ import annotations

import numpy as np

__all__ = ["dpsk_rule", "dapsk_rule", "dapsk_simple"]


def _prefix_masks(order: np.ndarray) -> np.ndarray:
    """Cumulative kept-bit masks from a (n, k) most-reliable-first ordering."""
    bits = (1 << order).astype(np.uint8)
    return np.bitwise_or.accumulate(bits, axis=1)


def _flip_distances(
    stat: np.ndarray, step: float, n_angles: int, up: np.ndarray, down: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Nearest angle index and per-bit flip distances for the high-SNR rule."""
    nearest = np.rint(stat / step)
    chi = stat - nearest * step
    m = nearest.astype(np.int64) % n_angles
    d = np.minimum(
        up[m] * step - chi[:, None], down[m] * step + chi[:, None]
    )
    return m, d


def dpsk_rule(
    phi: np.ndarray, up: np.ndarray, down: np.ndarray, packed: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """16-DPSK rule-based ranking kernel.

    Args:
        phi: pair phase differences, shape (n,).
        up/down: flip-step tables, shape (16, 4), uint8.
        packed: packed labels per angle index, shape (16,), uint8.

    Returns:
        (hard, masks): hard packed decisions (n,) uint8 and nested kept-bit
        masks (n, 4) uint8, most reliable bit first.  Reliability ties break
        to the lower bit index.
    """
    phi = np.asarray(phi, dtype=np.float64)
    m, d = _flip_distances(phi, np.pi / 8.0, 16, up, down)
    order = np.argsort(-d, axis=1, kind="stable")
    return packed[m], _prefix_masks(order)


def _phase_stage(
    psi: np.ndarray, up: np.ndarray, down: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shared 16-DAPSK phase stage: angle index, distances, sorted phase bits."""
    m, d = _flip_distances(np.asarray(psi, np.float64), np.pi / 4.0, 8, up, down)
    porder = np.argsort(-d, axis=1, kind="stable") + 1  # bit indices 1..3
    return m, d, porder


def dapsk_rule(
    r_prime: np.ndarray,
    psi: np.ndarray,
    up: np.ndarray,
    down: np.ndarray,
    phase_packed4: np.ndarray,
    delta0: float,
    ring_ratio: float,
) -> tuple[np.ndarray, np.ndarray]:
    """16-DAPSK full-rule ranking kernel.

    Phase bits rank by flip distance; b0 ranks against each phase bit via the
    closed-form r' crossovers (upper family above delta0, lower below; at
    r' == delta0 b0 loses all comparisons).  ``phase_packed4`` holds the
    phase labels already shifted to bit positions 1..3.
    """
    r_prime = np.asarray(r_prime, dtype=np.float64)
    m, d, porder = _phase_stage(psi, up, down)
    denom = ring_ratio**2 - 1.0
    t_big = 2.0 * (ring_ratio - np.cos(d)) / denom
    t_small = 2.0 * (ring_ratio * np.cos(d) - 1.0) / denom
    rp = r_prime[:, None]
    beats = np.where(rp > delta0, rp > t_big, (rp < delta0) & (rp < t_small))
    losses = 3 - beats.sum(axis=1)
    col = np.arange(4)[None, :]
    src = np.clip(np.where(col < losses[:, None], col, col - 1), 0, 2)
    order = np.take_along_axis(porder, src, axis=1)
    order[col == losses[:, None]] = 0
    hard = (phase_packed4[m] | (r_prime < delta0)).astype(np.uint8)
    return hard, _prefix_masks(order)


def dapsk_simple(
    r_prime: np.ndarray,
    psi: np.ndarray,
    up: np.ndarray,
    down: np.ndarray,
    phase_packed4: np.ndarray,
    delta0: float,
    d1: float,
    d2: float,
    d3: float,
    d4: float,
    center0: float,
    period: float,
    halfwidth: float,
    beta: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Simplified 16-DAPSK banded kernel for one beta in {1, 2, 3}.

    r' bands (half-open downward: r' equal to a threshold falls in the lower
    band): above d1 or at/below d4 keep b0; in (d3, d2] erase b0; in the two
    transition bands erase b0 exactly when psi lies strictly inside a
    drop-b0 sector (centers center0 + k*period, half-width halfwidth).

    Returns (hard, keep): packed hard decisions and a single kept-bit mask
    per pair (always exactly beta bits set).
    """
    r_prime = np.asarray(r_prime, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    m, d, porder = _phase_stage(psi, up, down)

    band_keep = (r_prime > d1) | (r_prime <= d4)
    band_drop = ~band_keep & (r_prime > d3) & (r_prime <= d2)
    hybrid = ~band_keep & ~band_drop
    off = np.mod(psi - center0, period)
    in_sector = np.minimum(off, period - off) < halfwidth
    keep_b0 = band_keep | (hybrid & ~in_sector)

    cum = np.bitwise_or.accumulate((1 << porder).astype(np.uint8), axis=1)
    with_b0 = np.uint8(1) | (cum[:, beta - 2] if beta >= 2 else np.uint8(0))
    without_b0 = cum[:, beta - 1]
    keep = np.where(keep_b0, with_b0, without_b0).astype(np.uint8)
    hard = (phase_packed4[m] | (r_prime < delta0)).astype(np.uint8)
    return hard, keep
