"""Command-line front end: JSON config in, CSV out, reproducible seeds.

Every subcommand writes a CSV report with a header row plus a sibling
`<out>.meta.json` that echoes the fully resolved configuration (defaults
filled).  Re-running with that meta file as --config reproduces the output
byte for byte; numeric fields are printed with 17 significant digits so
nothing is lost to formatting.  Seed precedence is --seed flag, then the
config key, then 0.

Exit codes: 0 success, 1 I/O failure, 2 config/flag validation failure
(the message names the offending key), 3 domain error (the message names
the error class, e.g. ResonantDetuning).

The optional --plot flag additionally renders a PNG next to each CSV; the
CSV remains the machine-readable contract.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from .diamond import DiamondParams
from .errors import IselectError
from .hydrogen import HydrogenRamanParams, find_antiresonance, scan_raman_spectrum
from .subrecoil import (
    SubrecoilParams,
    simulate_ensemble,
    trapped_fraction_growth,
    trapping_statistics,
)
from .two_mode import coherence_series
from .velocity import (
    CompetitionParams,
    VelocityEnsemble,
    competition_mc,
    filter_evolve,
    selected_velocity,
)

__all__ = ["run", "main", "ConfigError"]


class ConfigError(Exception):
    """Config or flag validation failure; message names the offending key."""


_MISSING = object()


def _fmt(x) -> str:
    """Full-precision decimal for CSV fields (17 significant digits)."""
    return format(float(x), ".17g")


def _atomic_write(path: str, text: str):
    """Write text to path via a temp file + rename, creating parent dirs."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _write_csv(path: str, header: list, rows: list) -> int:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")
    return len(rows)


def _write_meta(out_path: str, resolved: dict):
    _atomic_write(out_path + ".meta.json",
                  json.dumps(resolved, indent=2, sort_keys=True) + "\n")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            cfg = json.load(f)
    except OSError as e:
        raise ConfigError(f"config: cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config: invalid JSON in {path}: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    return cfg


def _take(cfg: dict, key: str, default=_MISSING, where: str | None = None):
    if key in cfg:
        return cfg.pop(key)
    if default is _MISSING:
        raise ConfigError(f"{where or key}: required key missing")
    return default


def _float_of(val, key: str) -> float:
    try:
        return float(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {val!r}")


def _int_of(val, key: str) -> int:
    if isinstance(val, bool) or (not isinstance(val, int) and float(val) != int(val)):
        raise ConfigError(f"{key}: expected an integer, got {val!r}")
    try:
        return int(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected an integer, got {val!r}")


def _float_list(val, key: str) -> list:
    if not isinstance(val, (list, tuple)) or not val:
        raise ConfigError(f"{key}: expected a non-empty array of numbers")
    return [_float_of(x, key) for x in val]


def _check_consumed(cfg: dict, where: str = "config"):
    if cfg:
        raise ConfigError(f"{where}: unknown key {sorted(cfg)[0]!r}")


def _common_prologue(args) -> tuple:
    """Load config, resolve format_version / seed / output path."""
    cfg = _load_config(args.config)
    version = str(_take(cfg, "format_version", "1"))
    if version != "1":
        raise ConfigError(f"format_version: unrecognized value {version!r}")
    cfg_seed = _take(cfg, "seed", 0)
    seed = args.seed if args.seed is not None else _int_of(cfg_seed, "seed")
    if seed < 0:
        raise ConfigError("seed: must be non-negative")
    cfg_out = _take(cfg, "output_path", None)
    out = args.out if args.out is not None else cfg_out
    if not out:
        raise ConfigError("output_path: required (config key or --out flag)")
    return cfg, seed, str(out)


def _diamond_from(cfg: dict) -> DiamondParams:
    d = _take(cfg, "params")
    if not isinstance(d, dict):
        raise ConfigError("params: must be a JSON object")
    try:
        return DiamondParams.from_dict(d)
    except KeyError as e:
        raise ConfigError(f"params.{e.args[0]}: required key missing")
    except (ValueError, TypeError) as e:
        raise ConfigError(f"params: {e}")


def _png_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".png"


# ---------------------------------------------------------------- two-mode

def _resolve_times(cfg: dict) -> list:
    """Explicit `times` list, or a `time_grid` spec, or the default grid."""
    times = _take(cfg, "times", None)
    grid = _take(cfg, "time_grid", None)
    if times is not None and grid is not None:
        raise ConfigError("time_grid: give either times or time_grid, not both")
    if times is not None:
        return _float_list(times, "times")
    spec = {"tmin": 1e-2, "tmax": 1e2, "points": 64, "spacing": "log"}
    if grid is not None:
        if not isinstance(grid, dict):
            raise ConfigError("time_grid: must be a JSON object")
        unknown = set(grid) - set(spec)
        if unknown:
            raise ConfigError(f"time_grid: unknown key {sorted(unknown)[0]!r}")
        spec.update(grid)
    tmin = _float_of(spec["tmin"], "time_grid.tmin")
    tmax = _float_of(spec["tmax"], "time_grid.tmax")
    points = _int_of(spec["points"], "time_grid.points")
    if points < 1:
        raise ConfigError("time_grid.points: must be at least 1")
    if not tmax > tmin:
        raise ConfigError("time_grid.tmax: must exceed time_grid.tmin")
    if spec["spacing"] == "log":
        if tmin <= 0:
            raise ConfigError("time_grid.tmin: must be positive for log spacing")
        return [float(t) for t in np.geomspace(tmin, tmax, points)]
    if spec["spacing"] == "linear":
        return [float(t) for t in np.linspace(tmin, tmax, points)]
    raise ConfigError(f"time_grid.spacing: expected 'log' or 'linear', got {spec['spacing']!r}")


def _cmd_two_mode(args) -> tuple:
    cfg, seed, out = _common_prologue(args)
    p = _diamond_from(cfg)
    nbar1 = _float_of(_take(cfg, "nbar1"), "nbar1")
    nbar2 = _float_of(_take(cfg, "nbar2"), "nbar2")
    for key, val in (("nbar1", nbar1), ("nbar2", nbar2)):
        if val < 0:
            raise ConfigError(f"{key}: mean photon number must be non-negative")
    times = _resolve_times(cfg)
    nmax1 = _take(cfg, "nmax1", None)
    nmax2 = _take(cfg, "nmax2", None)
    nmax1 = None if nmax1 is None else _int_of(nmax1, "nmax1")
    nmax2 = None if nmax2 is None else _int_of(nmax2, "nmax2")
    _check_consumed(cfg)
    try:
        line, r_db, pop, state = coherence_series(p, nbar1, nbar2, times, nmax1, nmax2)
    except ValueError as e:
        raise ConfigError(f"times: {e}")

    rows = [[_fmt(t), _fmt(r), _fmt(g)] for t, r, g in zip(times, r_db, pop)]
    n = _write_csv(out, ["gamma0_t", "R_dB", "ground_population"], rows)
    _write_meta(out, {
        "format_version": "1",
        "output_path": out,
        "seed": seed,
        "params": p.to_dict(),
        "nbar1": nbar1,
        "nbar2": nbar2,
        "nmax1": state.nmax1,
        "nmax2": state.nmax2,
        "times": times,
    })
    if args.plot:
        from . import plots
        plots.coherence_figure(times, r_db, pop, _png_path(out))
    return n, out


# ---------------------------------------------------------- velocity-select

def _resolve_ensemble(spec) -> tuple:
    """Build a VelocityEnsemble from its config block; echo resolved spec."""
    if not isinstance(spec, dict):
        raise ConfigError("ensemble: must be a JSON object")
    spec = dict(spec)
    known = {"velocities", "vmin", "vmax", "points", "weights", "sigma", "center"}
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"ensemble: unknown key {sorted(unknown)[0]!r}")
    if "velocities" in spec:
        if {"vmin", "vmax", "points"} & set(spec):
            raise ConfigError("ensemble.velocities: exclusive with vmin/vmax/points")
        v = np.array(_float_list(spec.pop("velocities"), "ensemble.velocities"))
        echo_grid = {"velocities": [float(x) for x in v]}
    else:
        vmin = _float_of(_take(spec, "vmin", where="ensemble.vmin"), "ensemble.vmin")
        vmax = _float_of(_take(spec, "vmax", where="ensemble.vmax"), "ensemble.vmax")
        points = _int_of(_take(spec, "points", where="ensemble.points"), "ensemble.points")
        if points < 2:
            raise ConfigError("ensemble.points: must be at least 2")
        if not vmax > vmin:
            raise ConfigError("ensemble.vmax: must exceed ensemble.vmin")
        v = np.linspace(vmin, vmax, points)
        echo_grid = {"vmin": vmin, "vmax": vmax, "points": points}
    if "weights" in spec:
        if "sigma" in spec or "center" in spec:
            raise ConfigError("ensemble.weights: exclusive with sigma/center")
        w = _float_list(spec.pop("weights"), "ensemble.weights")
        if len(w) != v.size:
            raise ConfigError("ensemble.weights: length must match the velocity grid")
        try:
            e = VelocityEnsemble.normalized(v, np.array(w))
        except ValueError as err:
            raise ConfigError(f"ensemble.weights: {err}")
        return e, {**echo_grid, "weights": w}
    sigma = _float_of(_take(spec, "sigma", where="ensemble.sigma"), "ensemble.sigma")
    center = _float_of(_take(spec, "center", 0.0), "ensemble.center")
    if sigma <= 0:
        raise ConfigError("ensemble.sigma: must be positive")
    try:
        e = VelocityEnsemble.gaussian(v, sigma=sigma, center=center)
    except ValueError as err:
        raise ConfigError(f"ensemble: {err}")
    return e, {**echo_grid, "sigma": sigma, "center": center}


def _cmd_velocity_select(args) -> tuple:
    cfg, seed, out = _common_prologue(args)
    p = _diamond_from(cfg)
    n1 = _int_of(_take(cfg, "n1"), "n1")
    n2 = _int_of(_take(cfg, "n2"), "n2")
    for key, val in (("n1", n1), ("n2", n2)):
        if val < 0:
            raise ConfigError(f"{key}: photon number must be non-negative")
    times = _float_list(_take(cfg, "times"), "times")
    if times[0] < 0 or times[-1] < times[0]:
        raise ConfigError("times: must be non-negative with last >= first")
    ensemble, echo = _resolve_ensemble(_take(cfg, "ensemble"))
    _check_consumed(cfg)

    e0 = filter_evolve(ensemble, p, n1, n2, times[0])
    ef = filter_evolve(ensemble, p, n1, n2, times[-1])
    rows = [[_fmt(v), _fmt(w0), _fmt(wf)]
            for v, w0, wf in zip(ensemble.velocities, e0.weights, ef.weights)]
    n = _write_csv(out, ["v", "weight_t0", "weight_tf"], rows)
    _write_meta(out, {
        "format_version": "1",
        "output_path": out,
        "seed": seed,
        "params": p.to_dict(),
        "n1": n1,
        "n2": n2,
        "times": times,
        "ensemble": echo,
    })
    if args.plot:
        from . import plots
        try:
            v_star = selected_velocity(p)
        except IselectError:
            v_star = None
        plots.velocity_filter_figure(ensemble.velocities, e0.weights, ef.weights,
                                     v_star, _png_path(out))
    return n, out


# ------------------------------------------------------------ cool-compete

def _competition_base(cfg: dict) -> dict:
    d = _take(cfg, "params")
    if not isinstance(d, dict):
        raise ConfigError("params: must be a JSON object")
    d = dict(d)
    if "g" in d:
        raise ConfigError("params.g: swept via the top-level g_values list")
    if "seed" in d:
        raise ConfigError("params.seed: use the top-level seed key")
    floats = {"friction", "diffusion", "dt", "t_total", "v_selected", "v_start"}
    known = floats | {"n_traj"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"params: unknown key {sorted(unknown)[0]!r}")
    base = {}
    for key in ("friction", "diffusion", "dt", "t_total"):
        base[key] = _float_of(_take(d, key, where=f"params.{key}"), f"params.{key}")
    base["n_traj"] = _int_of(_take(d, "n_traj", where="params.n_traj"), "params.n_traj")
    base["v_selected"] = _float_of(_take(d, "v_selected", 0.0), "params.v_selected")
    base["v_start"] = _float_of(_take(d, "v_start", 0.0), "params.v_start")
    return base


def _cmd_cool_compete(args) -> tuple:
    cfg, seed, out = _common_prologue(args)
    base = _competition_base(cfg)
    g_values = _float_list(_take(cfg, "g_values"), "g_values")
    if any(g < 0 for g in g_values):
        raise ConfigError("g_values: entries must be non-negative")
    _check_consumed(cfg)

    rows = []
    ratios, fractions = [], []
    for g in g_values:
        try:
            c = CompetitionParams(g=g, seed=seed, **base)
        except ValueError as e:
            raise ConfigError(f"params: {e}")
        res = competition_mc(c)
        ratios.append(res.temperature_ratio)
        fractions.append(res.surviving_fraction)
        rows.append([_fmt(g), _fmt(res.temperature_ratio), _fmt(res.surviving_fraction)])
    n = _write_csv(out, ["g", "T_over_TD", "surviving_fraction"], rows)
    _write_meta(out, {
        "format_version": "1",
        "output_path": out,
        "seed": seed,
        "params": base,
        "g_values": g_values,
    })
    if args.plot:
        from . import plots
        plots.competition_figure(g_values, np.array(ratios), np.array(fractions),
                                 _png_path(out))
    return n, out


# ------------------------------------------------------------ hydrogen-scan

def _flag_or_cfg(args, cfg, key, default, conv):
    flag = getattr(args, key)
    if flag is not None:
        return flag
    return conv(_take(cfg, key, default), key)


def _cmd_hydrogen_scan(args) -> tuple:
    cfg, seed, out = _common_prologue(args)
    qmin = _flag_or_cfg(args, cfg, "qmin", 1.5, _float_of)
    qmax = _flag_or_cfg(args, cfg, "qmax", 10.5, _float_of)
    steps = _flag_or_cfg(args, cfg, "steps", 1801, _int_of)
    nmax = _flag_or_cfg(args, cfg, "nmax", 100, _int_of)
    _check_consumed(cfg)
    if qmin <= 1.0:
        raise ConfigError("qmin: must exceed 1")
    if not qmax > qmin:
        raise ConfigError("qmax: must exceed qmin")
    if steps < 2:
        raise ConfigError("steps: must be at least 2")
    try:
        p = HydrogenRamanParams(n_max=nmax)
    except ValueError as e:
        raise ConfigError(f"nmax: {e}")

    spec = scan_raman_spectrum(np.linspace(qmin, qmax, steps), p)
    rows = []
    for q, s, rate, res in zip(spec.q_values, spec.amplitudes, spec.rates, spec.resonant):
        if res:
            rows.append([_fmt(q), "", "", "1"])
        else:
            rows.append([_fmt(q), _fmt(s), _fmt(rate), "0"])
    n = _write_csv(out, ["q", "S", "Q", "resonance"], rows)
    _write_meta(out, {
        "format_version": "1",
        "output_path": out,
        "seed": seed,
        "qmin": qmin,
        "qmax": qmax,
        "steps": steps,
        "nmax": nmax,
    })
    if args.plot:
        from . import plots
        plots.hydrogen_scan_figure(spec.q_values, spec.rates, spec.resonant,
                                   _png_path(out))
    return n, out


def _cmd_antiresonance(args) -> tuple:
    cfg, seed, out = _common_prologue(args)
    between = args.between if args.between is not None else _take(cfg, "between", None)
    if between is None:
        raise ConfigError("between: required (config key or --between flag)")
    between = _int_of(between, "between")
    nmax = _flag_or_cfg(args, cfg, "nmax", 100, _int_of)
    _check_consumed(cfg)
    try:
        p = HydrogenRamanParams(n_max=nmax)
    except ValueError as e:
        raise ConfigError(f"nmax: {e}")
    if between < 2:
        raise ConfigError("between: must be at least 2")

    q_star = find_antiresonance(between, p)
    n = _write_csv(out, ["n_low", "q_star"], [[str(between), _fmt(q_star)]])
    _write_meta(out, {
        "format_version": "1",
        "output_path": out,
        "seed": seed,
        "between": between,
        "nmax": nmax,
    })
    if args.plot:
        from . import plots
        qs = np.linspace(between + 0.01, between + 0.99, 197)
        sp = scan_raman_spectrum(qs, p)
        plots.antiresonance_figure(qs, sp.amplitudes, q_star, _png_path(out))
    return n, out


# ----------------------------------------------------------------- cool-mc

def _subrecoil_base(cfg: dict, seed: int) -> dict:
    d = _take(cfg, "params")
    if not isinstance(d, dict):
        raise ConfigError("params: must be a JSON object")
    d = dict(d)
    if "seed" in d:
        raise ConfigError("params.seed: use the top-level seed key")
    if "rate_table" in d:
        raise ConfigError("params.rate_table: use the top-level rate_csv block")
    floats = {"v_r", "t_total", "rate_at_recoil", "rate_exponent_cap",
              "raman_kick", "v_init_span"}
    ints = {"repump_recoils", "n_traj"}
    unknown = set(d) - floats - ints
    if unknown:
        raise ConfigError(f"params: unknown key {sorted(unknown)[0]!r}")
    base = {"seed": seed}
    for key in ("v_r", "t_total"):
        base[key] = _float_of(_take(d, key, where=f"params.{key}"), f"params.{key}")
    for key, dflt in (("rate_at_recoil", 1.0), ("rate_exponent_cap", 100.0)):
        base[key] = _float_of(_take(d, key, dflt), f"params.{key}")
    for key in ("raman_kick", "v_init_span"):
        val = _take(d, key, None)
        base[key] = None if val is None else _float_of(val, f"params.{key}")
    base["repump_recoils"] = _int_of(_take(d, "repump_recoils", 2), "params.repump_recoils")
    base["n_traj"] = _int_of(_take(d, "n_traj", 1), "params.n_traj")
    return base


def _rate_table_from_csv(block, q_star_hint: str = "rate_csv") -> tuple | None:
    """Sampled-rate plugin: map a q-scan CSV onto a (velocity, rate) table.

    The scan samples Q(q); the Doppler map q(v) = sqrt(omega_scale /
    (omega_1 + k_eff*v)) with omega_1 = omega_scale/q_star^2 converts the
    branch q <= q_star to v >= 0.  Resonant (empty-field) rows are dropped.
    """
    if block is None:
        return None
    if not isinstance(block, dict):
        raise ConfigError("rate_csv: must be a JSON object")
    block = dict(block)
    path = _take(block, "path", where="rate_csv.path")
    q_star = _float_of(_take(block, "q_star", where="rate_csv.q_star"), "rate_csv.q_star")
    k_eff = _float_of(_take(block, "k_eff", where="rate_csv.k_eff"), "rate_csv.k_eff")
    omega_scale = _float_of(_take(block, "omega_scale", where="rate_csv.omega_scale"),
                            "rate_csv.omega_scale")
    _check_consumed(block, "rate_csv")
    if q_star <= 1:
        raise ConfigError("rate_csv.q_star: must exceed 1")
    if k_eff <= 0:
        raise ConfigError("rate_csv.k_eff: must be positive")
    if omega_scale <= 0:
        raise ConfigError("rate_csv.omega_scale: must be positive")
    try:
        with open(path, encoding="utf-8") as f:
            header = f.readline().strip().split(",")
            body = [line.strip().split(",") for line in f if line.strip()]
    except OSError as e:
        raise ConfigError(f"rate_csv.path: cannot read {path}: {e}")
    try:
        iq, irate = header.index("q"), header.index("Q")
        imark = header.index("resonance")
    except ValueError:
        raise ConfigError("rate_csv.path: CSV must have q, Q and resonance columns")
    qs, rates = [], []
    for cells in body:
        if cells[imark] == "1" or cells[irate] == "":
            continue
        qs.append(float(cells[iq]))
        rates.append(float(cells[irate]))
    if len(qs) < 2:
        raise ConfigError("rate_csv.path: fewer than 2 usable scan rows")
    q = np.array(qs)
    rate = np.array(rates)
    omega_1 = omega_scale / (q_star * q_star)
    v = (omega_scale / (q * q) - omega_1) / k_eff
    keep = v >= 0.0  # the q <= q_star branch
    v, rate = v[keep], rate[keep]
    if v.size < 2:
        raise ConfigError("rate_csv.path: scan does not cover q <= q_star")
    order = np.argsort(v)
    v, rate = v[order], rate[order]
    # collapse duplicate grid points (the scan can hit v = 0 twice)
    uniq = np.concatenate(([True], np.diff(v) > 0))
    return v[uniq], rate[uniq]


def _cmd_cool_mc(args) -> tuple:
    cfg, seed, out = _common_prologue(args)
    base = _subrecoil_base(cfg, seed)
    rate_block = _take(cfg, "rate_csv", None)
    table = _rate_table_from_csv(rate_block)
    v_trap = _take(cfg, "v_trap", None)
    n_bins = _int_of(_take(cfg, "n_bins", 12), "n_bins")
    flagged = _take(cfg, "flagged_trajectory", None)
    flagged = None if flagged is None else _int_of(flagged, "flagged_trajectory")
    _check_consumed(cfg)
    try:
        p = SubrecoilParams(rate_table=table, **base)
    except ValueError as e:
        raise ConfigError(f"params: {e}")
    v_trap = p.v_r if v_trap is None else _float_of(v_trap, "v_trap")
    if v_trap <= 0:
        raise ConfigError("v_trap: must be positive")
    if flagged is not None and not 0 <= flagged < p.n_traj:
        raise ConfigError("flagged_trajectory: index out of range")

    trajs = simulate_ensemble(p)
    stats = trapping_statistics(trajs, v_trap)
    growth = trapped_fraction_growth(trajs, v_trap, n_bins=n_bins)
    if flagged is None:
        longest = [float(np.max(tr.episode_bounds()[1] - tr.episode_bounds()[0]))
                   for tr in trajs]
        flagged = int(np.argmax(longest))
    tr = trajs[flagged]

    vr = p.v_r
    t_rows = [[_fmt(0.0), _fmt(tr.v_init / vr)]]
    t_rows += [[_fmt(t), _fmt(v / vr)] for t, v in zip(tr.times, tr.velocities)]
    last_v = tr.velocities[-1] if tr.n_events else tr.v_init
    t_rows.append([_fmt(tr.t_total), _fmt(last_v / vr)])
    n1 = _write_csv(os.path.join(out, "trajectory.csv"),
                    ["omega0_t", "v_over_vr"], t_rows)

    s_rows = [[_fmt(stats.tail_exponent), _fmt(stats.longest_fraction), _fmt(t), _fmt(f)]
              for t, f in zip(growth.times, growth.fractions)]
    n2 = _write_csv(os.path.join(out, "stats.csv"),
                    ["tail_exponent", "longest_fraction", "bin_time", "trapped_fraction"],
                    s_rows)
    _write_meta(out, {
        "format_version": "1",
        "output_path": out,
        "seed": seed,
        "params": {
            "v_r": p.v_r,
            "rate_at_recoil": p.rate_at_recoil,
            "rate_exponent_cap": p.rate_exponent_cap,
            "raman_kick": p.raman_kick,
            "repump_recoils": p.repump_recoils,
            "t_total": p.t_total,
            "n_traj": p.n_traj,
            "v_init_span": p.v_init_span,
        },
        "rate_csv": rate_block,
        "v_trap": v_trap,
        "n_bins": n_bins,
        "flagged_trajectory": flagged,
    })
    if args.plot:
        from . import plots
        stair_t = [float(r[0]) for r in t_rows]
        stair_v = [float(r[1]) for r in t_rows]
        plots.trajectory_figure(stair_t, stair_v, os.path.join(out, "trajectory.png"))
        plots.trapped_fraction_figure(growth.times, growth.fractions,
                                      os.path.join(out, "stats.png"))
    return n1 + n2, out


# ------------------------------------------------------------------ driver

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iselect",
        description="Interference-induced state selection: simulation reports as CSV.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output path (overrides config output_path)")
    common.add_argument("--seed", type=int, help="seed override (flag > config > 0)")
    common.add_argument("--plot", action="store_true",
                        help="also render a PNG figure next to the CSV")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("two-mode", parents=[common],
                       help="coherence generation on the two-mode photon grid")
    s.set_defaults(func=_cmd_two_mode)

    s = sub.add_parser("velocity-select", parents=[common],
                       help="filter a velocity distribution by interference-tuned loss")
    s.set_defaults(func=_cmd_velocity_select)

    s = sub.add_parser("cool-compete", parents=[common],
                       help="two-photon filtering against Doppler heating (g sweep)")
    s.set_defaults(func=_cmd_cool_compete)

    s = sub.add_parser("hydrogen-scan", parents=[common],
                       help="hydrogen Raman amplitude/rate scan over q")
    s.add_argument("--qmin", type=float, help="scan start (q > 1)")
    s.add_argument("--qmax", type=float, help="scan end")
    s.add_argument("--steps", type=int, help="number of scan points")
    s.add_argument("--nmax", type=int, help="highest intermediate level in the sum")
    s.set_defaults(func=_cmd_hydrogen_scan)

    s = sub.add_parser("antiresonance", parents=[common],
                       help="locate the dark point between two Raman resonances")
    s.add_argument("--between", type=int,
                   help="lower resonance n; search interval is (n, n+1)")
    s.add_argument("--nmax", type=int, help="highest intermediate level in the sum")
    s.set_defaults(func=_cmd_antiresonance)

    s = sub.add_parser("cool-mc", parents=[common],
                       help="subrecoil cooling Monte Carlo (writes a directory)")
    s.set_defaults(func=_cmd_cool_mc)
    return parser


def run(argv=None) -> int:
    """Parse argv, dispatch, map failures to exit codes (see module docstring)."""
    args = _build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        rows, out = args.func(args)
    except ConfigError as e:
        print(f"iselect {args.command}: config error: {e}", file=sys.stderr)
        return 2
    except IselectError as e:
        print(f"iselect {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"iselect {args.command}: i/o error: {e}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t0
    print(f"iselect {args.command}: wrote {rows} rows to {out} in {elapsed:.2f}s",
          file=sys.stderr)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
