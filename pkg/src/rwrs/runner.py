"""Experiment orchestration: deterministic replicate scheduling and reports.

Workers consume replicate indices whose seeds are derived from the master
seed alone, and results are reduced in index order, so CSV outputs are
byte-identical for any worker count.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_hash, serialize_config
from .diagnostics import (
    LimitConfig,
    bickel_wichura_modulus,
    empirical_sheet_replicate,
    fdd_discrete_samples,
    holder_norm_estimate,
    limit_quadratic_samples,
    limit_sheet_replicate,
    limit_sheet_samples,
    limit_scale,
    moment_scaling,
    self_similarity_factor,
    self_similarity_test,
    verify_fdd,
    verify_lemma1,
)
from .io import envelope_json, report_entry, reports_json, rows_to_csv, sheet_to_csv
from .randomness import Alpha, IncrementLaw, SeedScheme, StreamKind
from .walk import EmpiricalSheet, GridSpec

OUTPUT_DIR_ENV = "RWRS_OUTPUT_DIR"

_EXPERIMENT_STREAMS = {
    "simulate-rwrs": (StreamKind.WALK, StreamKind.SCENERY),
    "simulate-limit": (StreamKind.LEVY, StreamKind.KIEFER),
    "verify-lemma1": (StreamKind.WALK, StreamKind.LEVY),
    "verify-fdd": (StreamKind.WALK, StreamKind.SCENERY,
                   StreamKind.LEVY, StreamKind.KIEFER),
    "verify-moments": (StreamKind.WALK,),
    "verify-holder": (StreamKind.LEVY, StreamKind.KIEFER),
    "verify-selfsim": (StreamKind.LEVY, StreamKind.KIEFER),
    "modulus-sweep": (StreamKind.WALK, StreamKind.SCENERY),
}

_SLOPE_CHECKS = {
    # functional -> (target exponent as function of alpha, tolerance)
    "sumN2": (lambda a: 2.0 - 1.0 / a, 0.10),
    "sumN3": (lambda a: 3.0 - 2.0 / a, 0.15),
    "sumN4": (lambda a: 4.0 - 3.0 / a, 0.20),
    "sumN2_sq": (lambda a: 4.0 - 2.0 / a, 0.20),
}

_MOMENT_FUNCTIONALS = ("sumN2", "sumN3", "sumN4", "maxN_scaled")


@dataclass
class RunManifest:
    config_hash: str
    code_version: str
    experiment: str
    config_text: str
    replicate_seeds: list
    started_at: str
    finished_at: str | None = None
    status: str = "incomplete"
    outputs: list[str] = field(default_factory=list)
    passed: bool | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "experiment": self.experiment,
            "config_text": self.config_text,
            "replicate_seeds": self.replicate_seeds,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "status": self.status,
            "outputs": self.outputs,
            "passed": self.passed,
            "error": self.error,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _replicate_seeds(config: ExperimentConfig) -> list:
    streams = _EXPERIMENT_STREAMS[config.experiment]
    out = []
    for r in range(config.replicates):
        entry = {"replicate": r}
        for kind in streams:
            key = SeedScheme(config.master_seed, kind, r).philox_key()
            entry[kind.value] = f"{key:032x}"
        out.append(entry)
    return out


def _limit_config(config: ExperimentConfig) -> LimitConfig:
    return LimitConfig(steps=config.K, cells=config.cells,
                       n_calib=config.n_calib,
                       calib_replicates=config.calib_replicates)


def _base_name(config: ExperimentConfig, n: int | None = None) -> str:
    size = config.n if n is None else n
    if config.experiment == "simulate-limit":
        size = config.K
    return f"{config.experiment}_{repr(float(config.alpha))}_{size}"


class _SummaryLine:
    def __init__(self, label: str, passed: bool, detail: str) -> None:
        self.label = label
        self.passed = passed
        self.detail = detail

    def render(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return f"{word}: {self.label}: {self.detail}"


def run_experiment(config: ExperimentConfig) -> RunManifest:
    """Run the configured experiment and write manifest, CSVs and summary."""
    out_dir = config.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
    out_path = Path(out_dir)
    if not out_path.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {out_dir}")

    manifest = RunManifest(
        config_hash=config_hash(config),
        code_version=__version__,
        experiment=config.experiment,
        config_text=serialize_config(config),
        replicate_seeds=_replicate_seeds(config),
        started_at=_now(),
    )
    manifest_path = out_path / "manifest.json"
    _write_manifest(manifest_path, manifest)

    written: list[Path] = []
    executor = None
    try:
        if config.workers > 1:
            executor = ProcessPoolExecutor(max_workers=config.workers)

            def map_fn(fn, it):
                items = list(it)
                chunk = max(1, len(items) // (config.workers * 4))
                return executor.map(fn, items, chunksize=chunk)
        else:
            map_fn = map

        files, summary = _EXPERIMENT_IMPL[config.experiment](config, map_fn)

        for name, text in files.items():
            path = out_path / name
            path.write_text(text)
            written.append(path)
        summary_text = "\n".join(line.render() for line in summary) + "\n"
        summary_path = out_path / "summary.txt"
        summary_path.write_text(summary_text)
        written.append(summary_path)

        manifest.finished_at = _now()
        manifest.status = "complete"
        manifest.passed = all(line.passed for line in summary)
        manifest.outputs = sorted(p.name for p in written) + ["manifest.json"]
        _write_manifest(manifest_path, manifest)
        return manifest
    except Exception as exc:
        for path in written:
            path.unlink(missing_ok=True)
        manifest.finished_at = _now()
        manifest.status = "failed"
        manifest.error = f"{type(exc).__name__}: {exc}"
        _write_manifest(manifest_path, manifest)
        raise
    finally:
        if executor is not None:
            executor.shutdown()


def _write_manifest(path: Path, manifest: RunManifest) -> None:
    path.write_text(json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n")


def _report_meta(config: ExperimentConfig) -> dict:
    return {"alpha": config.alpha, "n": config.n,
            "master_seed": config.master_seed,
            "config_hash": config_hash(config)}


# ---------------------------------------------------------------------------
# Experiment implementations. Each returns (files, summary lines).

def _exp_simulate_rwrs(config, map_fn):
    law = IncrementLaw.for_alpha(config.alpha)
    grid = GridSpec(np.asarray(config.s_grid), np.asarray(config.t_grid))
    fn = partial(empirical_sheet_replicate, alpha=Alpha.of(config.alpha),
                 n=config.n, s_grid=config.s_grid, t_grid=config.t_grid,
                 master_seed=config.master_seed, law=law, scaled=False)
    files: dict[str, str] = {}
    for r, values in enumerate(map_fn(fn, range(config.replicates))):
        suffix = f"_rep{r:03d}" if config.replicates > 1 else ""
        base = _base_name(config) + suffix
        sheet = EmpiricalSheet(
            values=values, grid=grid, n=config.n, alpha=Alpha.of(config.alpha),
            scaled=False,
            walk_seed=SeedScheme(config.master_seed, StreamKind.WALK, r),
            scenery_seed=SeedScheme(config.master_seed, StreamKind.SCENERY, r))
        files[base + ".csv"] = sheet_to_csv(values, grid.s, grid.t)
        files[base + ".json"] = envelope_json(sheet)
    summary = [_SummaryLine("simulate-rwrs", True,
                            f"wrote {config.replicates} sheet(s), n={config.n}")]
    return files, summary


def _exp_simulate_limit(config, map_fn):
    scale = limit_scale(config.alpha, config=_limit_config(config))
    fn = partial(limit_sheet_replicate, alpha=Alpha.of(config.alpha),
                 s_cuts=config.s_grid, t_grid=config.t_grid, scale=scale,
                 config=_limit_config(config), master_seed=config.master_seed)
    files: dict[str, str] = {}
    for r, sheet in enumerate(map_fn(fn, range(config.replicates))):
        suffix = f"_rep{r:03d}" if config.replicates > 1 else ""
        base = _base_name(config) + suffix
        files[base + ".csv"] = sheet_to_csv(sheet.values, sheet.s_cuts, sheet.t_grid)
        files[base + ".json"] = envelope_json(sheet)
    summary = [_SummaryLine("simulate-limit", True,
                            f"wrote {config.replicates} sheet(s), K={config.K}")]
    return files, summary


def _exp_verify_lemma1(config, map_fn):
    reports = verify_lemma1(
        config.alpha, config.s_vec, config.n, config.replicates,
        _limit_config(config), master_seed=config.master_seed,
        permutations=config.permutations, map_fn=map_fn)
    header = ["alpha", "n", "entry_i", "entry_j", "s_i", "s_j",
              "statistic_name", "statistic", "p_value", "n_a", "n_b"]
    rows, summary = [], []
    for (i, j), rep in sorted(reports.items()):
        rows.append([config.alpha, config.n, i, j, config.s_vec[i],
                     config.s_vec[j], rep.statistic_name, rep.statistic,
                     rep.p_value, rep.sample_sizes[0], rep.sample_sizes[1]])
        ok = rep.p_value > config.p_value_min
        summary.append(_SummaryLine(
            f"lemma1 entry ({i},{j})", ok,
            f"ks={rep.statistic:.4f} p={rep.p_value:.4f} "
            f"threshold p>{config.p_value_min}"))
    files = {
        _base_name(config) + ".csv": rows_to_csv(header, rows),
        _base_name(config) + "_reports.json": reports_json(
            [report_entry(k, r) for k, r in sorted(reports.items())],
            _report_meta(config)),
    }
    return files, summary


def _exp_verify_fdd(config, map_fn):
    reports = verify_fdd(
        config.alpha, config.points, config.n, config.replicates,
        _limit_config(config), master_seed=config.master_seed,
        permutations=config.permutations, map_fn=map_fn)
    header = ["alpha", "n", "kind", "point_a", "point_b", "theta",
              "statistic_name", "statistic", "p_value", "n_a", "n_b"]
    rows, summary = [], []
    for key in sorted(reports, key=repr):
        rep = reports[key]
        if key[0] == "point":
            label, pa, pb, theta = "point", key[1], "", ""
        else:
            label, pa, pb, theta = "pair", key[1], key[2], key[3]
        rows.append([config.alpha, config.n, label, f"{pa}", f"{pb}", f"{theta}",
                     rep.statistic_name, rep.statistic, rep.p_value,
                     rep.sample_sizes[0], rep.sample_sizes[1]])
        ok = rep.p_value > config.p_value_min
        summary.append(_SummaryLine(
            f"fdd {label} {pa}{pb}{theta}", ok,
            f"ks={rep.statistic:.4f} p={rep.p_value:.4f} "
            f"threshold p>{config.p_value_min}"))

    # variance cross-check at points on the terminal section s = 1
    terminal = [p for p in config.points if p[0] == 1.0]
    if terminal and config.alpha == 2.0:
        s, t = terminal[0]
        discrete = fdd_discrete_samples(config.alpha, [(s, t)], config.n,
                                        config.replicates, config.master_seed,
                                        map_fn=map_fn)
        quad = limit_quadratic_samples(config.alpha, (1.0,), config.replicates,
                                       _limit_config(config),
                                       config.master_seed, map_fn=map_fn)
        var_d = float(np.var(discrete[:, 0], ddof=1))
        var_limit = float(t * (1.0 - t) * quad[:, 0, 0].mean())
        rel = abs(var_d - var_limit) / var_limit
        ok = rel <= config.var_tol
        rows.append([config.alpha, config.n, "variance", f"({s}, {t})", "",
                     "", "relative_error", rel, "", config.replicates,
                     config.replicates])
        summary.append(_SummaryLine(
            f"fdd variance at ({s},{t})", ok,
            f"discrete={var_d:.4f} limit={var_limit:.4f} "
            f"rel={rel:.3f} tol={config.var_tol}"))
    files = {
        _base_name(config) + ".csv": rows_to_csv(header, rows),
        _base_name(config) + "_reports.json": reports_json(
            [report_entry(k, reports[k]) for k in sorted(reports, key=repr)],
            _report_meta(config)),
    }
    return files, summary


def _exp_verify_moments(config, map_fn):
    alpha = config.alpha
    header = ["alpha", "functional", "n", "level", "slope", "stderr",
              "target", "tol", "passed"]
    rows, summary = [], []
    for functional in _MOMENT_FUNCTIONALS:
        if functional == "maxN_scaled":
            n_list = config.n_list or (1024, 2048, 4096, 8192, 16384, 32768, 65536)
        else:
            n_list = config.n_list or (4096, 8192, 16384, 32768, 65536, 131072)
        fit = moment_scaling(alpha, n_list, functional, config.replicates,
                             master_seed=config.master_seed, map_fn=map_fn)
        if functional == "maxN_scaled":
            medians = np.exp(np.asarray(fit.ys))
            ok = bool(np.all(np.diff(medians) < 0.0))
            for n, level in zip(n_list, medians):
                rows.append([alpha, functional, n, level, fit.slope,
                             fit.stderr, "", "", ok])
            summary.append(_SummaryLine(
                "moments maxN_scaled", ok,
                "medians strictly decreasing" if ok else
                f"medians not decreasing: {medians.tolist()}"))
        else:
            target_fn, tol = _SLOPE_CHECKS[functional]
            target = target_fn(alpha)
            ok = abs(fit.slope - target) <= tol
            for n, level in zip(n_list, np.exp(np.asarray(fit.ys))):
                rows.append([alpha, functional, n, level, fit.slope,
                             fit.stderr, target, tol, ok])
            summary.append(_SummaryLine(
                f"moments {functional}", ok,
                f"slope={fit.slope:.3f} target={target:.3f} tol={tol}"))
    files = {_base_name(config, n=config.n) + ".csv": rows_to_csv(header, rows)}
    return files, summary


def _exp_verify_holder(config, map_fn):
    header = ["alpha", "grid_points", "gamma", "gamma_prime", "median_estimate"]
    rows, summary = [], []
    medians = {}
    for points in (config.grid_points, 2 * config.grid_points):
        axis = tuple(np.linspace(0.0, 1.0, points + 1))
        sheets = limit_sheet_samples(
            config.alpha, axis, axis, config.replicates,
            _limit_config(config), config.master_seed, map_fn=map_fn)
        estimates = [holder_norm_estimate(sheet, config.gamma, config.gamma_prime)
                     for sheet in sheets]
        medians[points] = float(np.median(estimates))
        rows.append([config.alpha, points, config.gamma, config.gamma_prime,
                     medians[points]])
    ratio = medians[2 * config.grid_points] / medians[config.grid_points]
    critical = 1.0 - 1.0 / (2.0 * config.alpha)
    if config.gamma < critical:
        ok = 1.0 / config.holder_ratio_max <= ratio <= config.holder_ratio_max
        detail = (f"estimate ratio {ratio:.3f} within factor "
                  f"{config.holder_ratio_max} under refinement")
    else:
        ok = ratio > 1.0
        detail = f"estimate ratio {ratio:.3f} grows under refinement"
    summary = [_SummaryLine(
        f"holder gamma={config.gamma} gamma'={config.gamma_prime}", ok, detail)]
    files = {_base_name(config) + ".csv": rows_to_csv(header, rows)}
    return files, summary


def _exp_verify_selfsim(config, map_fn):
    rep = self_similarity_test(
        config.alpha, config.a, config.s0, config.t0, config.replicates,
        _limit_config(config), master_seed=config.master_seed,
        permutations=config.permutations, map_fn=map_fn)
    factor = self_similarity_factor(config.alpha, config.a)
    header = ["alpha", "a", "s0", "t0", "factor", "statistic_name",
              "statistic", "p_value", "n_a", "n_b"]
    rows = [[config.alpha, config.a, config.s0, config.t0, factor,
             rep.statistic_name, rep.statistic, rep.p_value,
             rep.sample_sizes[0], rep.sample_sizes[1]]]
    ok = rep.p_value > config.p_value_min
    summary = [_SummaryLine(
        "self-similarity", ok,
        f"a={config.a} factor={factor:.5f} ks={rep.statistic:.4f} "
        f"p={rep.p_value:.4f} threshold p>{config.p_value_min}")]
    files = {
        _base_name(config) + ".csv": rows_to_csv(header, rows),
        _base_name(config) + "_reports.json": reports_json(
            [report_entry(("selfsim", config.a, config.s0, config.t0), rep)],
            _report_meta(config)),
    }
    return files, summary


def _exp_modulus_sweep(config, map_fn):
    law = IncrementLaw.for_alpha(config.alpha)
    n_values = config.n_list or (config.n,)
    header = ["alpha", "n", "delta", "median_modulus"]
    rows, summary = [], []
    grid = GridSpec(np.asarray(config.s_grid), np.asarray(config.t_grid))
    for n in n_values:
        fn = partial(empirical_sheet_replicate, alpha=Alpha.of(config.alpha),
                     n=int(n), s_grid=config.s_grid, t_grid=config.t_grid,
                     master_seed=config.master_seed, law=law, scaled=True)
        all_values = list(map_fn(fn, range(config.replicates)))
        medians = []
        for delta in config.deltas:
            mods = [bickel_wichura_modulus(
                EmpiricalSheet(values=v, grid=grid, n=int(n),
                               alpha=Alpha.of(config.alpha), scaled=True), delta)
                for v in all_values]
            medians.append(float(np.median(mods)))
            rows.append([config.alpha, int(n), delta, medians[-1]])
        ok = bool(np.all(np.diff(medians) >= -1e-12))
        summary.append(_SummaryLine(
            f"modulus sweep n={n}", ok,
            f"medians nondecreasing in delta: {[round(m, 6) for m in medians]}"))
    files = {_base_name(config) + ".csv": rows_to_csv(header, rows)}
    return files, summary


_EXPERIMENT_IMPL = {
    "simulate-rwrs": _exp_simulate_rwrs,
    "simulate-limit": _exp_simulate_limit,
    "verify-lemma1": _exp_verify_lemma1,
    "verify-fdd": _exp_verify_fdd,
    "verify-moments": _exp_verify_moments,
    "verify-holder": _exp_verify_holder,
    "verify-selfsim": _exp_verify_selfsim,
    "modulus-sweep": _exp_modulus_sweep,
}
