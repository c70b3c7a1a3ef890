"""Command-line front end: experiment configuration, orchestration, CSV output.

Configuration is a flat ``key=value`` text file (``#`` comments allowed) with
explicit units in key names (``snr_db``, not ``snr``); any flag given on the
command line overrides the file.  Unknown or duplicate keys are rejected
before anything runs.  Every CSV starts with comment lines carrying the tool
version, a sha256 hash of the fully resolved configuration, and the resolved
values themselves — two runs with the same hash produce byte-identical files
(``out`` and ``workers`` are excluded from the hash because they cannot
affect content).  Files are written atomically (temp file + rename).

Exit codes: 0 success, 1 configuration error, 2 runtime error.

Columns holding a bare ``gamma`` or ``instantaneous_snr`` are linear SNR;
``*_db`` columns are decibels.
"""

from __future__ import annotations

import hashlib
import math
import os
import sys
import tempfile
from importlib import resources

import click
import numpy as np

from . import __version__, analysis, rateless
from .constellation import DPSK_LABELS, DAPSK_PHASE_LABELS
from .dapsk_demod import delta0_estimate, threshold_set

__all__ = ["main", "ConfigError"]


class ConfigError(Exception):
    """Invalid configuration (unknown key, bad value, missing input)."""


_DEFAULTS: dict[str, str] = {
    "scheme": "dpsk",
    "schemes": "",
    "variant": "rule",
    "method": "analytic",
    "betas": "1,2,3,4",
    "ring_ratio": "2.0",
    "ring_ratio_grid": "",
    "channel": "",
    "snr_db_grid": "",
    "avg_snr_db_grid": "",
    "avg_snr_db": "15.0",
    "target_ber": "1e-4",
    "trials": "1000000",
    "seed": "0",
    "workers": "1",
    "k": "1000",
    "c": "0.1",
    "delta": "0.5",
    "epsilon": "0.15",
    "coherence_len": "21",
    "max_pairs": "1000000",
    "rel_tol": "1e-4",
    "out": "",
}

_HASH_EXCLUDED = ("out", "workers")


def _read_config_file(path: str) -> dict[str, str]:
    """Parse a flat key=value config; resolve bare preset names from the package."""
    if not os.path.exists(path):
        candidate = resources.files("admlink").joinpath("presets").joinpath(f"{path}.cfg")
        if candidate.is_file():
            text = candidate.read_text()
        else:
            raise ConfigError(f"config not found: {path!r} (not a file or preset name)")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _resolve(config_path, seed, trials, out, workers) -> dict[str, str]:
    resolved = dict(_DEFAULTS)
    if config_path:
        resolved.update(_read_config_file(config_path))
    if seed is not None:
        resolved["seed"] = str(seed)
    if trials is not None:
        resolved["trials"] = str(trials)
    if out is not None:
        resolved["out"] = out
    if workers is not None:
        resolved["workers"] = str(workers)
    return resolved


def _config_hash(resolved: dict[str, str]) -> str:
    lines = [
        f"{key}={value}"
        for key, value in sorted(resolved.items())
        if key not in _HASH_EXCLUDED
    ]
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def _parse_int(resolved, key, minimum=None) -> int:
    try:
        value = int(resolved[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {resolved[key]!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    return value


def _parse_float(resolved, key) -> float:
    try:
        return float(resolved[key])
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {resolved[key]!r}") from None


def _parse_float_list(resolved, key) -> list[float]:
    raw = resolved[key]
    if not raw:
        return []
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"{key} must be comma-separated numbers, got {raw!r}") from None


def _parse_enum(resolved, key, allowed) -> str:
    value = resolved[key]
    if value not in allowed:
        raise ConfigError(f"{key} must be one of {sorted(allowed)}, got {value!r}")
    return value


def _parse_betas(resolved) -> list[int]:
    raw = resolved["betas"]
    try:
        betas = [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"betas must be comma-separated integers, got {raw!r}") from None
    if not betas or any(b not in (1, 2, 3, 4) for b in betas):
        raise ConfigError(f"betas must be a non-empty subset of 1,2,3,4, got {raw!r}")
    if len(set(betas)) != len(betas):
        raise ConfigError("betas must not repeat")
    return betas


def _parse_schemes(resolved) -> list[str]:
    raw = resolved["schemes"] or resolved["scheme"]
    schemes = [tok.strip() for tok in raw.split(",") if tok.strip()]
    if not schemes or any(s not in ("dpsk", "dapsk") for s in schemes):
        raise ConfigError(f"schemes must list dpsk and/or dapsk, got {raw!r}")
    if len(set(schemes)) != len(schemes):
        raise ConfigError("schemes must not repeat")
    return schemes


def _parse_target_ber(resolved) -> float:
    target = _parse_float(resolved, "target_ber")
    if not 0.0 < target < 0.5:
        raise ConfigError(f"target_ber must lie in (0, 0.5), got {target}")
    return target


def _parse_ring_ratio(resolved) -> float:
    ring_ratio = _parse_float(resolved, "ring_ratio")
    if not ring_ratio > 1.0:
        raise ConfigError(f"ring_ratio must exceed 1, got {ring_ratio}")
    return ring_ratio


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(resolved: dict[str, str], columns: list[str], rows) -> str:
    """Atomically write header + rows to resolved['out']; return the path."""
    out = resolved["out"]
    lines = [f"# admlink {__version__}", f"# config_hash={_config_hash(resolved)}"]
    lines.extend(
        f"# {key}={value}"
        for key, value in sorted(resolved.items())
        if key not in _HASH_EXCLUDED
    )
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    payload = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(out))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp_path, out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return out


def _common_options(fn):
    fn = click.option("--config", "config_path", default=None, help="Config file or preset name.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override seed.")(fn)
    fn = click.option("--trials", type=int, default=None, help="Override Monte Carlo trials.")(fn)
    fn = click.option("--out", default=None, help="Output CSV path.")(fn)
    fn = click.option("--workers", type=int, default=None, help="Monte Carlo worker processes.")(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="admlink")
def cli() -> None:
    """Adaptive-demodulation link simulator."""


# ---------------------------------------------------------------------------
# ber
# ---------------------------------------------------------------------------


@cli.command("ber")
@_common_options
def cmd_ber(config_path, seed, trials, out, workers) -> None:
    """Analytic and/or Monte Carlo BER curves -> ber_curve.csv."""
    resolved = _resolve(config_path, seed, trials, out, workers)
    resolved["out"] = resolved["out"] or "ber_curve.csv"
    scheme = _parse_enum(resolved, "scheme", ("dpsk", "dapsk"))
    variant = _parse_enum(resolved, "variant", ("exact", "rule", "simple"))
    method = _parse_enum(resolved, "method", ("analytic", "mc", "both"))
    betas = _parse_betas(resolved)
    snrs_db = _parse_float_list(resolved, "snr_db_grid")
    if not snrs_db:
        raise ConfigError("ber requires a non-empty snr_db_grid")
    if resolved["channel"] not in ("", "awgn"):
        raise ConfigError("ber curves are per-instantaneous-SNR; channel must be awgn")
    trials_n = _parse_int(resolved, "trials", minimum=0)
    workers_n = _parse_int(resolved, "workers", minimum=1)
    seed_n = _parse_int(resolved, "seed")
    rel_tol = _parse_float(resolved, "rel_tol")
    if scheme == "dapsk":
        ring_ratios = _parse_float_list(resolved, "ring_ratio_grid") or [
            _parse_ring_ratio(resolved)
        ]
        if any(not r > 1.0 for r in ring_ratios):
            raise ConfigError("every ring ratio must exceed 1")
    else:
        ring_ratios = [None]
    if method in ("mc", "both") and trials_n < 1:
        raise ConfigError("Monte Carlo runs need trials >= 1")

    rows = []
    for ring_ratio in ring_ratios:
        for snr_db in snrs_db:
            gamma = analysis.db_to_linear(snr_db)
            if method in ("analytic", "both"):
                for beta in betas:
                    if scheme == "dpsk":
                        ber = float(analysis.dpsk_ber(beta, gamma))
                    else:
                        ber = analysis.dapsk_ber_numeric(
                            beta, gamma, ring_ratio, rel_tol=rel_tol
                        )
                    rows.append(
                        (scheme, "analytic", beta, ring_ratio, snr_db, ber, None)
                    )
            if method in ("mc", "both"):
                counts = analysis.mc_error_counts(
                    scheme,
                    variant,
                    tuple(betas),
                    gamma,
                    ring_ratio,
                    trials_n,
                    seed_n,
                    workers=workers_n,
                )
                for beta in betas:
                    errors, decided = counts[beta]
                    p = errors / decided
                    ci = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / decided)
                    rows.append((scheme, variant, beta, ring_ratio, snr_db, p, ci))
    path = _write_csv(
        resolved, ["scheme", "variant", "beta", "R", "snr_db", "ber", "ci"], rows
    )
    click.echo(f"wrote {len(rows)} rows to {path}")


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


@cli.command("thresholds")
@_common_options
def cmd_thresholds(config_path, seed, trials, out, workers) -> None:
    """Ring-decision thresholds for one ring ratio -> thresholds.csv."""
    resolved = _resolve(config_path, seed, trials, out, workers)
    resolved["out"] = resolved["out"] or "thresholds.csv"
    ring_ratio = _parse_ring_ratio(resolved)
    delta0 = delta0_estimate(ring_ratio)
    rows = []
    for beta in (3, 2, 1):
        t = threshold_set(beta, ring_ratio)
        rows.append((ring_ratio, beta, *t.delta, delta0))
    path = _write_csv(
        resolved,
        ["R", "beta", "delta_1", "delta_2", "delta_3", "delta_4", "delta_0"],
        rows,
    )
    click.echo(f"wrote {len(rows)} rows to {path}")


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------


@cli.command("regions")
@_common_options
def cmd_regions(config_path, seed, trials, out, workers) -> None:
    """Operating-region SNR breakpoints (linear gamma) -> regions.csv."""
    resolved = _resolve(config_path, seed, trials, out, workers)
    resolved["out"] = resolved["out"] or "regions.csv"
    schemes = _parse_schemes(resolved)
    target = _parse_target_ber(resolved)
    ring_ratio = _parse_ring_ratio(resolved) if "dapsk" in schemes else None
    rows = []
    for scheme in schemes:
        r = ring_ratio if scheme == "dapsk" else None
        regions = analysis.operating_regions(scheme, r, target)
        rows.append((scheme, r, target, *regions.breakpoints))
    path = _write_csv(
        resolved,
        ["scheme", "R", "target", "gamma1", "gamma2", "gamma3", "gamma4"],
        rows,
    )
    click.echo(f"wrote {len(rows)} rows to {path}")


# ---------------------------------------------------------------------------
# spec-eff
# ---------------------------------------------------------------------------


@cli.command("spec-eff")
@_common_options
def cmd_spec_eff(config_path, seed, trials, out, workers) -> None:
    """Average spectral efficiency over Rayleigh fading -> spec_eff.csv."""
    resolved = _resolve(config_path, seed, trials, out, workers)
    resolved["out"] = resolved["out"] or "spec_eff.csv"
    schemes = _parse_schemes(resolved)
    target = _parse_target_ber(resolved)
    ring_ratio = _parse_ring_ratio(resolved) if "dapsk" in schemes else None
    grid = _parse_float_list(resolved, "avg_snr_db_grid")
    if not grid:
        raise ConfigError("spec-eff requires a non-empty avg_snr_db_grid")
    rows = []
    for scheme in schemes:
        r = ring_ratio if scheme == "dapsk" else None
        regions = analysis.operating_regions(scheme, r, target)
        for avg_snr_db in grid:
            se = analysis.spectral_efficiency(
                scheme, r, target, avg_snr_db, regions=regions
            )
            rows.append((scheme, r, target, avg_snr_db, se))
    path = _write_csv(
        resolved, ["scheme", "R", "target", "avg_snr_db", "se"], rows
    )
    click.echo(f"wrote {len(rows)} rows to {path}")


# ---------------------------------------------------------------------------
# e2e
# ---------------------------------------------------------------------------


@cli.command("e2e")
@_common_options
def cmd_e2e(config_path, seed, trials, out, workers) -> None:
    """One end-to-end rateless transmission -> per-pair transcript CSV."""
    resolved = _resolve(config_path, seed, trials, out, workers)
    resolved["out"] = resolved["out"] or "e2e_transcript.csv"
    scheme = _parse_enum(resolved, "scheme", ("dpsk", "dapsk"))
    if resolved["channel"] not in ("", "rayleigh"):
        raise ConfigError("e2e runs over the rayleigh channel")
    ring_ratio = _parse_ring_ratio(resolved) if scheme == "dapsk" else None
    target = _parse_target_ber(resolved)
    k = _parse_int(resolved, "k", minimum=1)
    c = _parse_float(resolved, "c")
    delta = _parse_float(resolved, "delta")
    epsilon = _parse_float(resolved, "epsilon")
    if not c > 0 or not 0.0 < delta < 1.0 or not epsilon > 0:
        raise ConfigError("need c > 0, delta in (0, 1), epsilon > 0")
    coherence_len = _parse_int(resolved, "coherence_len", minimum=2)
    max_pairs = _parse_int(resolved, "max_pairs", minimum=1)
    avg_snr_db = _parse_float(resolved, "avg_snr_db")
    seed_n = _parse_int(resolved, "seed")

    message_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=seed_n, spawn_key=(1, 1))
    )
    message = message_rng.integers(0, 2, size=k, dtype=np.uint8)
    result = rateless.end_to_end_run(
        message,
        scheme,
        ring_ratio=ring_ratio,
        avg_snr_db=avg_snr_db,
        coherence_len=coherence_len,
        target_ber=target,
        epsilon=epsilon,
        c=c,
        delta=delta,
        max_pairs=max_pairs,
        seed=seed_n,
    )
    rows = [
        (r.pair_index, r.instantaneous_snr, r.beta_used, r.bits_decided, r.buffer_fill)
        for r in result.rows
    ]
    path = _write_csv(
        resolved,
        ["pair_index", "instantaneous_snr", "beta_used", "bits_decided", "buffer_fill"],
        rows,
    )
    click.echo(
        f"outcome={result.outcome} pairs={result.pairs_transmitted}"
        f" bits_decided={result.bits_decided} erasures={result.erasures}"
        f" decode_attempts={result.decode_attempts}"
        f" bits_per_pair={result.realized_bits_per_pair:.4f}"
        f" message_bit_errors={result.message_bit_errors}"
    )
    click.echo(f"wrote {len(rows)} rows to {path}")


# ---------------------------------------------------------------------------
# mapping-dump
# ---------------------------------------------------------------------------


@cli.command("mapping-dump")
@_common_options
def cmd_mapping_dump(config_path, seed, trials, out, workers) -> None:
    """Constellation bit labels (index order around the circle) -> mapping.csv."""
    resolved = _resolve(config_path, seed, trials, out, workers)
    resolved["out"] = resolved["out"] or "mapping.csv"
    rows = []
    for index, bits in enumerate(DPSK_LABELS):
        rows.append(("dpsk", index, *bits))
    for index, bits in enumerate(DAPSK_PHASE_LABELS):
        rows.append(("dapsk", index, None, *bits))
    path = _write_csv(resolved, ["scheme", "index", "b0", "b1", "b2", "b3"], rows)
    click.echo(f"wrote {len(rows)} rows to {path}")


def main(argv=None) -> int:
    """Console entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except ValueError as exc:
        # precondition violations from library calls are configuration errors
        click.echo(f"config error: {exc}", err=True)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        click.echo(f"runtime error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
