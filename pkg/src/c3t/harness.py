"""End-to-end experiment orchestration.

Sweeps Monte Carlo SDR over (profile, decoder, SNR) cells, exports tube
geometry point clouds for the low-dimensional figures, and reproduces the
published parameter and block-length tables with pass/fail bookkeeping.

Every cell derives its own random stream from the experiment seed and the
cell's position in the expansion order, so results are bit-identical no
matter how many workers execute the sweep or in which order cells finish.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reference
from .bounds import required_source_samples
from .codec import (
    SOURCE_VARIANCE,
    ChannelSpec,
    FeatureMode,
    angles_features,
    angles_map_decode,
    awgn_channel,
    encode,
    map_decode,
    repetition_code,
    torus_projection,
)
from .curves import evaluate_curve, frenet_frame
from .mlp import load_weights, mlp_forward
from .profiles import CodeProfile
from .spsa import SpsaConfig, optimize_radii_multistart
from .tube import PackingObjective, global_circumradius, packing_density

DECODERS = ("raw_map", "tp_map", "ao_map", "mlp_raw", "mlp_tp", "mlp_ao", "repetition")


@dataclass(frozen=True)
class SweepRecord:
    """One Monte Carlo result row."""

    profile_id: str
    decoder: str
    snr_db: float
    trials: int
    sdr_db: float
    seed: int
    error: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep layout: profiles x decoders x SNR grid."""

    profiles: tuple  # paths, or (profile_id, CodeProfile) pairs
    snr_grid_db: tuple = tuple(float(v) for v in range(-10, 11))
    decoders: tuple = ("raw_map", "repetition")
    trials: int = 100000
    seed: int = 0
    grid_points: int = 10000
    mlp_weights: dict = field(default_factory=dict)  # feature mode -> path

    def __post_init__(self):
        if not self.profiles or not self.snr_grid_db or not self.decoders:
            raise ValueError("profiles, snr_grid_db, and decoders must be nonempty")
        unknown = set(self.decoders) - set(DECODERS)
        if unknown:
            raise ValueError(f"unknown decoders: {sorted(unknown)}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def to_dict(self):
        return {
            "profiles": [p if isinstance(p, str) else p[0] for p in self.profiles],
            "snr_grid_db": list(self.snr_grid_db),
            "decoders": list(self.decoders),
            "trials": self.trials,
            "seed": self.seed,
            "grid_points": self.grid_points,
            "mlp_weights": {str(k): str(v) for k, v in self.mlp_weights.items()},
        }


def sdr_db_from_errors(s, s_hat):
    """SDR in dB from the total squared error over all trials."""
    distortion = float(np.mean((np.asarray(s_hat) - np.asarray(s)) ** 2))
    if distortion == 0.0:
        return math.inf
    return 10.0 * math.log10(SOURCE_VARIANCE / distortion)


def _load_profiles(entries):
    loaded = []
    for entry in entries:
        if isinstance(entry, (str, Path)):
            loaded.append((Path(entry).stem, CodeProfile.load(entry)))
        else:
            pid, profile = entry
            loaded.append((str(pid), profile))
    return loaded


def _cell_seed(base_seed, cell_index):
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(cell_index,))
    return int(ss.generate_state(1, np.uint64)[0])


def _decode_cell(profile, decoder, y, noise_var, grid_points, mlp_cache):
    if decoder == "raw_map":
        return map_decode(profile, y, grid_points)
    if decoder == "tp_map":
        return map_decode(profile, torus_projection(profile, y).data, grid_points)
    if decoder == "ao_map":
        eta = angles_features(y).data
        return angles_map_decode(profile, eta, noise_var, grid_points)
    mode = FeatureMode(decoder.split("_", 1)[1])
    arch, weights, weight_mode = mlp_cache[mode]
    if weight_mode != mode:
        raise ValueError(
            f"weights file trained for {weight_mode.value!r} features, "
            f"cell wants {mode.value!r}"
        )
    if mode == FeatureMode.RAW:
        feats = y
    elif mode == FeatureMode.TORUS_PROJECTION:
        feats = torus_projection(profile, y).data
    else:
        feats = angles_features(y).data
    return mlp_forward(weights, feats)


def run_sweep(
    config: ExperimentConfig,
    workers: int = 1,
    out_csv=None,
):
    """Monte Carlo SDR for every (profile, decoder, SNR) cell.

    Per-cell failures become records with an ``error`` message and NaN SDR;
    the sweep continues.  When ``out_csv`` is given, rows are appended in
    cell order and a JSON sidecar captures the full configuration.
    """
    profiles = _load_profiles(config.profiles)
    mlp_cache = {}
    for mode_key, path in config.mlp_weights.items():
        mode = FeatureMode(mode_key)
        mlp_cache[mode] = load_weights(path)

    cells = []
    for pid, profile in profiles:
        for decoder in config.decoders:
            for snr_db in config.snr_grid_db:
                cells.append((len(cells), pid, profile, decoder, float(snr_db)))

    def run_cell(cell):
        index, pid, profile, decoder, snr_db = cell
        seed = _cell_seed(config.seed, index)
        rng = np.random.default_rng(seed)
        try:
            spec = ChannelSpec.for_profile(profile, snr_db)
            s = rng.uniform(-1.0, 1.0, config.trials)
            if decoder == "repetition":
                s_hat = repetition_code(profile.n, s, spec, rng)
            else:
                y = awgn_channel(encode(profile, s), spec, rng)
                s_hat = _decode_cell(
                    profile, decoder, y, spec.noise_var, config.grid_points, mlp_cache
                )
            record = SweepRecord(
                profile_id=pid,
                decoder=decoder,
                snr_db=snr_db,
                trials=config.trials,
                sdr_db=sdr_db_from_errors(s, s_hat),
                seed=seed,
            )
        except Exception as exc:  # error rows keep the sweep going
            record = SweepRecord(
                profile_id=pid,
                decoder=decoder,
                snr_db=snr_db,
                trials=config.trials,
                sdr_db=math.nan,
                seed=seed,
                error=f"{type(exc).__name__}: {exc}",
            )
        return index, record

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            indexed = list(pool.map(run_cell, cells))
    else:
        indexed = [run_cell(cell) for cell in cells]
    records = [rec for _, rec in sorted(indexed, key=lambda item: item[0])]

    if out_csv is not None:
        write_records_csv(out_csv, records)
        sidecar = Path(str(out_csv) + ".config.json")
        sidecar.write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    return records


def write_records_csv(path, records, append=False):
    """Append-only CSV with full-precision floats."""
    path = Path(path)
    fresh = not (append and path.exists())
    mode = "w" if fresh else "a"
    with path.open(mode, newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(
                ["profile_id", "decoder", "snr_db", "trials", "sdr_db", "seed", "error"]
            )
        for rec in records:
            writer.writerow(
                [
                    rec.profile_id,
                    rec.decoder,
                    repr(rec.snr_db),
                    rec.trials,
                    repr(rec.sdr_db),
                    rec.seed,
                    rec.error,
                ]
            )


# ---------------------------------------------------------------------------
# geometry export


def _fibonacci_sphere(count):
    """Deterministic quasi-uniform directions on the 2-sphere."""
    k = np.arange(count, dtype=float)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    z = 1.0 - 2.0 * (k + 0.5) / count
    rad = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([rad * np.cos(phi), rad * np.sin(phi), z], axis=1)


def export_tube_geometry(profile: CodeProfile, samples: int = 256, slab: float = 0.02):
    """Centerline and tube-surface point clouds for n in {2, 3, 4}.

    Returns a dict with ``centerline`` (samples x n) and ``surface``
    (points x n); for n=4 also ``slice``: surface points within ``slab`` of
    the hyperplane x_4 = 0, projected to their first three coordinates.
    """
    n = profile.n
    if n not in (2, 3, 4):
        raise ValueError("geometry export supports n in {2, 3, 4}")
    if samples < 8:
        raise ValueError("need at least 8 centerline samples")
    rho = global_circumradius(profile, 1e-4).rho
    alphas = np.linspace(-math.pi, math.pi, samples)
    centerline = evaluate_curve(profile, alphas)

    surface = []
    if n == 2:
        for alpha, point in zip(alphas, centerline):
            frame = frenet_frame(profile, float(alpha), 2)
            normal = frame.vectors[1]
            surface.append(point + rho * normal)
            surface.append(point - rho * normal)
    elif n == 3:
        ring = np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False)
        for alpha, point in zip(alphas, centerline):
            frame = frenet_frame(profile, float(alpha), 3)
            e2, e3 = frame.vectors[1], frame.vectors[2]
            for phi in ring:
                surface.append(point + rho * (math.cos(phi) * e2 + math.sin(phi) * e3))
    else:
        directions = _fibonacci_sphere(64)
        for alpha, point in zip(alphas, centerline):
            frame = frenet_frame(profile, float(alpha), 4)
            normals = frame.vectors[1:]  # (3, 4)
            surface.append(point + rho * directions @ normals)
    surface = np.vstack([np.atleast_2d(p) for p in surface])

    out = {"centerline": centerline, "surface": surface, "rho_global": rho}
    if n == 4:
        mask = np.abs(surface[:, 3]) <= slab
        out["slice"] = surface[mask][:, :3]
    return out


# ---------------------------------------------------------------------------
# table reproduction


#: per-dimension iteration budgets for the reproduction runs
_TABLE1_MAX_ITERS = {4: 20000, 6: 50000, 8: 100000}

#: tolerance used for reproduction runs: the budget governs; see the
#: optimizer docs for why a consecutive-value test at the published 1e-3
#: scale stops immediately
_TABLE1_TOLERANCE = 1e-300


def _scaled_step_gain(n, grid_step=1e-3):
    """Step gain normalized by the objective magnitude.

    The packing objective shrinks roughly 4x per added pair while the
    published step gain is a fixed 0.01, so higher dimensions would crawl.
    Scaling a0 by the starting-objective ratio relative to n=4 (where the
    published gains converge as-is) keeps the per-iteration motion
    comparable across dimensions; for n=4 the factor is exactly 1.
    """
    start = PackingObjective(n, grid_step)(
        np.full(n // 2, math.sqrt(2.0 / n))
    )
    reference = PackingObjective(4, grid_step)(np.full(2, math.sqrt(0.5)))
    return 0.01 * reference / start

#: derived (grid-oracle) tube radius for the published n=4 radii; the
#: published 0.8339 is inconsistent with its own density column
DERIVED_N4_RHO = 0.8165

TABLE1_RADII_TOL = 0.02  # n=4 per-component radii window
TABLE1_DENSITY_TOL = 0.01
TABLE1_RHO_TOL = 0.02


def reproduce_tables(
    seeds: int = 10,
    seed: int = 0,
    grid_step: float = 1e-4,
    workers: int = 1,
    dimensions=(4, 6, 8),
    max_iters: dict = None,
):
    """Re-derive the published tables and diff against the golden values.

    Returns a report dict with one entry per check; ``pass`` is strict,
    ``flags`` carry known inconsistencies of the published values (these do
    not fail the report).  Deterministic given ``seed``.
    """
    report = {
        "seed": seed,
        "config": {
            "seeds": seeds,
            "grid_step": grid_step,
            "dimensions": list(dimensions),
        },
        "table1": [],
        "circumradius_oracle": None,
        "table2": [],
    }
    budgets = dict(_TABLE1_MAX_ITERS)
    if max_iters:
        budgets.update(max_iters)

    for n in dimensions:
        radii_pub, rho_pub, density_pub = reference.TABLE1[n]
        t0 = time.perf_counter()
        cfg = SpsaConfig(
            seed=seed,
            max_iters=budgets[n],
            tolerance=_TABLE1_TOLERANCE,
            a0=_scaled_step_gain(n),
        )
        profile, trace, all_j = optimize_radii_multistart(
            n, cfg, seeds=seeds, workers=workers
        )
        rho = global_circumradius(profile, grid_step).rho
        density = packing_density(profile, grid_step, rho_global=rho)
        elapsed = time.perf_counter() - t0

        entry = {
            "n": n,
            "radii": list(profile.radii),
            "objective": trace.best_objective,
            "max_iters": budgets[n],
            "step_gain": cfg.a0,
            "rho_global": rho,
            "density": density,
            "seconds": elapsed,
            "golden": {
                "radii": {"value": list(radii_pub), "source": "published"},
                "rho_global": {"value": rho_pub, "source": "published"},
                "density": {
                    "value": density_pub,
                    "source": "published",
                    "tolerance": TABLE1_DENSITY_TOL,
                },
            },
            "flags": [],
        }
        checks = {
            "density": abs(density - density_pub) <= TABLE1_DENSITY_TOL,
        }
        if n == 4:
            checks["radii"] = all(
                abs(r - rp) <= TABLE1_RADII_TOL
                for r, rp in zip(profile.radii, radii_pub)
            )
            entry["golden"]["radii"]["tolerance"] = TABLE1_RADII_TOL
            entry["flags"].append(
                "published rho_global 0.8339 is inconsistent with the published "
                f"density {density_pub}; the grid oracle gives {DERIVED_N4_RHO}"
            )
        else:
            checks["rho_global"] = abs(rho - rho_pub) <= TABLE1_RHO_TOL
            entry["golden"]["rho_global"]["tolerance"] = TABLE1_RHO_TOL
        entry["checks"] = checks
        entry["pass"] = all(checks.values())
        report["table1"].append(entry)

    # grid-oracle check on the published n=4 radii
    t0 = time.perf_counter()
    oracle_profile = reference.table1_profile(4)
    oracle_rho = global_circumradius(oracle_profile, grid_step).rho
    report["circumradius_oracle"] = {
        "n": 4,
        "rho_global": oracle_rho,
        "expected": {"value": DERIVED_N4_RHO, "source": "derived", "tolerance": 5e-4},
        "published_value_flagged": reference.TABLE1[4][1],
        "flag": (
            "published value 0.8339 disagrees with the separation-grid minimum; "
            "the published density column is consistent with the derived value"
        ),
        "pass": abs(oracle_rho - DERIVED_N4_RHO) <= 5e-4,
        "seconds": time.perf_counter() - t0,
    }

    t0 = time.perf_counter()
    for n, snr_db, sdr_db, ns_1e3, ns_1e6 in reference.TABLE2:
        for eps, ns_pub in ((1e-3, ns_1e3), (1e-6, ns_1e6)):
            comp = required_source_samples(n, snr_db, sdr_db, eps)
            tol = (
                reference.TABLE2_TOLERANCE_R_GT_C
                if comp.rate_exceeds_capacity
                else reference.TABLE2_TOLERANCE
            )
            rel_err = abs(comp.source_samples - ns_pub) / ns_pub
            row = comp.to_row()
            row.update(
                {
                    "N_s_published": ns_pub,
                    "rel_err": rel_err,
                    "tolerance": tol,
                    "source": "published",
                    "pass": rel_err <= tol,
                }
            )
            report["table2"].append(row)
    report["table2_seconds"] = time.perf_counter() - t0

    report["overall_pass"] = (
        all(e["pass"] for e in report["table1"])
        and report["circumradius_oracle"]["pass"]
        and all(r["pass"] for r in report["table2"])
    )
    return report


def format_report(report):
    """Human-readable pass/fail lines for the reproduction report."""
    lines = []
    for entry in report["table1"]:
        status = "PASS" if entry["pass"] else "FAIL"
        lines.append(
            f"[{status}] table1 n={entry['n']}: density={entry['density']:.4f} "
            f"(published {entry['golden']['density']['value']}), "
            f"rho={entry['rho_global']:.4f} "
            f"(published {entry['golden']['rho_global']['value']}), "
            f"{entry['seconds']:.1f}s"
        )
        for flag in entry["flags"]:
            lines.append(f"    flagged: {flag}")
    oracle = report["circumradius_oracle"]
    status = "PASS" if oracle["pass"] else "FAIL"
    lines.append(
        f"[{status}] circumradius oracle n=4: rho={oracle['rho_global']:.5f} "
        f"(derived {oracle['expected']['value']}, published "
        f"{oracle['published_value_flagged']} flagged)"
    )
    fails = [r for r in report["table2"] if not r["pass"]]
    status = "PASS" if not fails else "FAIL"
    worst = max(r["rel_err"] for r in report["table2"])
    lines.append(
        f"[{status}] table2: {len(report['table2'])} rows, "
        f"worst relative error {worst:.4f}"
    )
    lines.append(
        f"[{'PASS' if report['overall_pass'] else 'FAIL'}] overall"
    )
    return "\n".join(lines)
