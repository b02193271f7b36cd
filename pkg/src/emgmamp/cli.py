"""Command-line front end.

    python -m emgmamp.cli recover --signal bg --n 1000 --m 500 --k 100 --snr 25 --seed 7
    python -m emgmamp.cli ptc --preset desk-bg --out ptc.csv
    python -m emgmamp.cli sweep --preset desk-br --out sweep.csv
    python -m emgmamp.cli scaling --preset desk-scaling-dense
    python -m emgmamp.cli mos-demo --seed 3
    python -m emgmamp.cli plot ptc.json --out-dir figs

Settings are resolved as preset < config file section < flags. Config files
are INI-style: one ``[subcommand]`` section per subcommand, ``key = value``
lines, keys spelled like the flags (``m-over-n`` or ``m_over_n``), lists
separated by commas or spaces.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import harness
from .em import MODES, EmConfig
from .harness import ExperimentGrid, SolverConfig, fmt
from .mos import MosConfig, mos_select
from .signals import MATRIX_KINDS, SIGNAL_ALIASES, SIGNAL_KINDS, MatrixSpec, SignalSpec, add_noise, gen_matrix, gen_signal

JOBS_ENV = "EMGMAMP_JOBS"

log = logging.getLogger("emgmamp")


class ConfigError(ValueError):
    """Invalid settings; reported before any computation starts."""


def _float(s):
    s = str(s).strip().lower()
    return math.inf if s in ("inf", "+inf", "infinity", "none") else float(s)


def _opt_int(s):
    s = str(s).strip().lower()
    return None if s in ("", "none", "default") else int(s)


def _opt_float(s):
    s = str(s).strip().lower()
    return None if s in ("", "none") else float(s)


def _bool(s):
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {s!r}")


def _signal(s):
    s = str(s).strip()
    if SIGNAL_ALIASES.get(s, s) not in SIGNAL_KINDS:
        raise argparse.ArgumentTypeError(f"unknown signal {s!r}")
    return SIGNAL_ALIASES.get(s, s)


def _matrix(s):
    s = str(s).strip()
    if s not in MATRIX_KINDS:
        raise argparse.ArgumentTypeError(f"unknown matrix ensemble {s!r}")
    return s


def _mode(s):
    s = str(s).strip().replace("-", "_")
    if s not in MODES:
        raise argparse.ArgumentTypeError(f"unknown mode {s!r}")
    return s


def _solver_spec(s):
    """``mode:L`` or ``mos:mode``, e.g. ``sparse:3``, ``heavy_tailed:4``, ``mos:sparse``."""
    a, _, b = str(s).strip().partition(":")
    try:
        if a == "mos":
            return SolverConfig(algorithm="mos", mode=_mode(b or "sparse"))
        return SolverConfig(mode=_mode(a), L=int(b) if b else None)
    except (ValueError, argparse.ArgumentTypeError) as err:
        raise argparse.ArgumentTypeError(f"bad solver spec {s!r}: {err}")


# name -> (converter, default, is_list, help)
SIGNAL_OPTS = {
    "signal": (_signal, "bernoulli_gaussian", False, "signal family (bg, bernoulli, br, tri, students_t, ln)"),
    "matrix": (_matrix, "iid_gaussian", False, "measurement-matrix ensemble"),
    "lam-a": (float, 1.0, False, "activity rate of Bernoulli matrix ensembles"),
    "snr": (_float, math.inf, False, "SNR in dB (inf for noiseless)"),
    "seed": (int, 0, False, "base seed"),
}
SOLVER_OPTS = {
    "algorithm": (str, "em-gm-amp", False, "em-gm-amp or mos"),
    "mode": (_mode, "sparse", False, "sparse or heavy_tailed"),
    "L": (_opt_int, None, False, "mixture order (mode default when unset)"),
    "i-max": (int, 20, False, "maximum EM iterations"),
    "em-tol": (float, 1e-5, False, "EM stopping tolerance"),
    "t-max": (int, 20, False, "maximum GAMP iterations per EM iteration"),
    "gamp-tol": (float, 1e-5, False, "GAMP stopping tolerance"),
    "damping": (float, 1.0, False, "GAMP damping factor in (0, 1]"),
    "snr0": (float, 100.0, False, "SNR guess used for initialisation"),
}
# noiseless grids need stop rules well below the success threshold
_NS = harness.NOISELESS_SOLVER
PTC_SOLVER_OPTS = {
    **SOLVER_OPTS,
    **{name: (conv, getattr(_NS, name.replace("-", "_")), lst, help_)
       for name, (conv, _, lst, help_) in SOLVER_OPTS.items() if name in ("i-max", "em-tol", "t-max", "gamp-tol")},
}
OUTPUT_OPTS = {
    "out": (str, None, False, "output path (CSV for grids, JSON for single runs)"),
    "json": (str, None, False, "also write the full result table as JSON"),
}

SUBCOMMANDS = {
    "recover": {
        **SIGNAL_OPTS, **SOLVER_OPTS, **OUTPUT_OPTS,
        "n": (int, 1000, False, "signal length N"),
        "m": (int, 500, False, "measurements M"),
        "k": (_opt_int, 100, False, "nonzeros K"),
        "lam": (_opt_float, None, False, "i.i.d activity rate (instead of K)"),
    },
    "ptc": {
        **SIGNAL_OPTS, **PTC_SOLVER_OPTS, **OUTPUT_OPTS,
        "n": (int, 500, False, "signal length N"),
        "grid-size": (int, 8, False, "points per axis of the uniform grid"),
        "m-over-n": (_float, None, True, "explicit M/N values (overrides grid-size)"),
        "k-over-m": (_float, None, True, "explicit K/M values (overrides grid-size)"),
        "realizations": (int, 25, False, "realisations per grid point"),
        "success-nmse": (float, harness.SUCCESS_NMSE, False, "success threshold on NMSE"),
        "contour": (str, None, False, "write the 50% contour as CSV"),
        "full": (_bool, False, False, "full-scale 30x30 grid at N=1000 with R=100"),
    },
    "sweep": {
        **SIGNAL_OPTS, **OUTPUT_OPTS,
        "n": (int, 1000, False, "signal length N"),
        "k": (int, 100, False, "nonzeros K"),
        "m-over-n": (_float, (0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6), True, "M/N values"),
        "realizations": (int, 50, False, "realisations per point"),
        "solvers": (_solver_spec, (SolverConfig(),), True, "solver specs such as sparse:3 sparse:1 mos:sparse"),
    },
    "scaling": {
        **OUTPUT_OPTS,
        "signal": (_signal, "bernoulli_rademacher", False, "signal family"),
        "matrix": (_matrix, "iid_gaussian", False, "iid_gaussian or row_sampled_dct"),
        "snr": (_float, 25.0, False, "SNR in dB"),
        "seed": (int, 0, False, "base seed"),
        "n-list": (int, (512, 1024, 2048, 4096), True, "signal lengths"),
        "m-over-n": (float, 0.5, False, "M/N"),
        "k-over-n": (float, 0.1, False, "K/N"),
        "realizations": (int, 3, False, "timed runs per length"),
        "i-max": (int, harness.FIXED_WORK_SOLVER.i_max, False, "EM iterations (all executed)"),
        "t-max": (int, harness.FIXED_WORK_SOLVER.t_max, False, "GAMP iterations (all executed)"),
    },
    "mos-demo": {
        **OUTPUT_OPTS,
        "signal": (_signal, "triangular_mixture", False, "signal family"),
        "matrix": (_matrix, "iid_gaussian", False, "measurement-matrix ensemble"),
        "mode": (_mode, "sparse", False, "sparse or heavy_tailed"),
        "n": (int, 1000, False, "signal length N"),
        "m": (int, 500, False, "measurements M"),
        "lam": (float, 0.1, False, "i.i.d activity rate"),
        "snr": (_float, 20.0, False, "SNR in dB"),
        "seed": (int, 0, False, "seed"),
        "L0": (int, 1, False, "initial mixture order"),
        "j-max": (int, 5, False, "maximum model-order iterations"),
        "L-max": (int, 8, False, "largest order tried"),
    },
}


def _grid(signal="bernoulli_gaussian", **kw):
    return {"signal": signal, "snr": math.inf, "em-tol": _NS.em_tol, "gamp-tol": _NS.gamp_tol,
            "i-max": _NS.i_max, "t-max": _NS.t_max, **kw}


def _sweep_point(signal, **kw):
    return {"signal": signal, "n": 1000, "k": 100, "snr": 25.0, "realizations": 50, **kw}


# every acceptance experiment, by name
PRESETS = {
    "desk-bg": ("ptc", _grid(signal="bernoulli_gaussian")),
    "desk-bernoulli": ("ptc", _grid(signal="bernoulli")),
    "desk-br": ("sweep", _sweep_point("bernoulli_rademacher", **{
        "m-over-n": (0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6),
        "solvers": (SolverConfig(mode="sparse", L=3), SolverConfig(mode="sparse", L=1))})),
    "desk-br-advantage": ("sweep", _sweep_point("bernoulli_rademacher", **{
        "m-over-n": (0.5,), "solvers": (SolverConfig(mode="sparse", L=3), SolverConfig(mode="sparse", L=1))})),
    "desk-bg-noisy": ("sweep", _sweep_point("bernoulli_gaussian", **{
        "m-over-n": (0.5,), "solvers": (SolverConfig(mode="sparse", L=3),)})),
    "desk-heavy": ("sweep", {"signal": "students_t", "n": 1000, "k": 1000, "snr": 25.0, "realizations": 50,
                             "m-over-n": (0.5,),
                             "solvers": (SolverConfig(mode="heavy_tailed", L=4), SolverConfig(mode="sparse", L=3))}),
    "desk-mos": ("mos-demo", {"signal": "triangular_mixture", "n": 1000, "m": 500, "lam": 0.1, "snr": 20.0, "L0": 1}),
    "desk-scaling-dense": ("scaling", {"matrix": "iid_gaussian", "n-list": (512, 1024, 2048, 4096)}),
    "desk-scaling-dct": ("scaling", {"matrix": "row_sampled_dct", "n-list": (2**14, 2**15, 2**16, 2**17)}),
}
for _ens in ("iid_gaussian", "iid_uniform", "iid_bernoulli_rademacher", "row_sampled_dct", "iid_cauchy"):
    PRESETS[f"desk-ensemble-{_ens.replace('_', '-')}"] = (
        "ptc", _grid(matrix=_ens, **{"m-over-n": (0.5,), "k-over-m": (0.3,)}))


def _key(name):
    return name.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emgmamp", description="EM-tuned Gaussian-mixture AMP experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for cmd, opts in SUBCOMMANDS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", help="INI file with a [%s] section" % cmd)
        presets = sorted(k for k, v in PRESETS.items() if v[0] == cmd)
        if presets:
            sp.add_argument("--preset", choices=presets)
        if cmd in ("ptc", "sweep"):
            sp.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                            help=f"worker processes (default from ${JOBS_ENV}, else 1)")
        for name, (conv, default, is_list, help_) in opts.items():
            shown = " ".join(s.name for s in default) if name == "solvers" else repr(default)
            # argparse %-formats help strings
            help_ = f"{help_} (default {shown})".replace("%", "%%")
            kw = {"type": conv, "default": argparse.SUPPRESS, "help": help_}
            if is_list:
                kw["nargs"] = "+"
            sp.add_argument(f"--{name}", dest=_key(name), **kw)
    pl = sub.add_parser("plot", help="write gnuplot scripts for saved JSON results")
    pl.add_argument("inputs", nargs="+")
    pl.add_argument("--out-dir", default=".")
    return p


def read_config_file(path, cmd) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path}")
    if not cp.has_section(cmd):
        return {}
    opts = {_key(k): v for k, v in SUBCOMMANDS[cmd].items()}
    out = {}
    for raw_key, text in cp.items(cmd):
        key = _key(raw_key)
        if key == "jobs":
            out[key] = int(text)
            continue
        if key not in opts:
            raise ConfigError(f"unknown key {raw_key!r} in section [{cmd}] of {path}")
        conv, _, is_list, _ = opts[key]
        try:
            if is_list:
                out[key] = tuple(conv(t) for t in text.replace(",", " ").split())
            else:
                out[key] = conv(text)
        except (ValueError, argparse.ArgumentTypeError) as err:
            raise ConfigError(f"bad value for {raw_key!r} in {path}: {err}")
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, preset, config file and flags (later wins)."""
    cmd = args.command
    params = {_key(k): v[1] for k, v in SUBCOMMANDS[cmd].items()}
    if cmd in ("ptc", "sweep"):
        params["jobs"] = int(os.environ.get(JOBS_ENV, "1"))
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "preset", "verbose")}
    preset = flags.pop("preset", None) or getattr(args, "preset", None)
    if preset:
        pcmd, pvals = PRESETS[preset]
        if pcmd != cmd:
            raise ConfigError(f"preset {preset} belongs to the {pcmd} subcommand")
        params.update({_key(k): v for k, v in pvals.items()})
    if getattr(args, "config", None):
        params.update(read_config_file(args.config, cmd))
    params.update({k: tuple(v) if isinstance(v, list) else v for k, v in flags.items()})
    return params


def solver_from(p: dict) -> SolverConfig:
    try:
        return SolverConfig(algorithm=p["algorithm"], mode=p["mode"], L=p["L"], i_max=p["i_max"],
                            em_tol=p["em_tol"], t_max=p["t_max"], gamp_tol=p["gamp_tol"],
                            snr0=p["snr0"], damping=p["damping"])
    except ValueError as err:
        raise ConfigError(f"solver settings: {err}")


def _check(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _check_dims(n, m, k):
    _check(n >= 1, f"N >= 1 violated: N={n}")
    _check(1 <= m, f"M >= 1 violated: M={m}")
    _check(m <= n, f"M <= N violated: M={m} > N={n}")
    if k is not None:
        _check(k >= 0, f"K >= 0 violated: K={k}")
        _check(k <= m, f"K <= M violated: K={k} > M={m}")


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(text)


# subcommands -------------------------------------------------------------------

def cmd_recover(p: dict) -> int:
    n, m, k, lam = p["n"], p["m"], p["k"], p["lam"]
    if lam is not None:
        k = None
    _check_dims(n, m, k)
    solver = solver_from(p)
    try:
        sig = SignalSpec(p["signal"], n, k=k, lam=lam)
        mat = MatrixSpec(p["matrix"], m, n, p["lam_a"])
    except ValueError as err:
        raise ConfigError(str(err))
    task = harness.Task(0, 0, sig, mat, p["snr"], solver, p["seed"])
    x, op, y = problem_instance(task)
    if not np.any(y):
        raise ConfigError("the measurements are all zero; nothing to recover")
    x_hat = solver.solve(y, op)
    summary = {"nmse_db": harness.nmse_db(x, x_hat) if np.any(x) else None,
               "signal": sig.to_dict(), "matrix": mat.to_dict(), "snr_db": p["snr"],
               "solver": asdict(solver), "seed": p["seed"]}
    out = p["out"]
    if out:
        doc = {"payload": {**summary, "x_hat": x_hat.tolist()}}
        _write(out, json.dumps(doc, indent=1) + "\n")
    print(f"NMSE {fmt(summary['nmse_db'])} dB" if summary["nmse_db"] is not None else "NMSE undefined (zero signal)")
    return 0


def problem_instance(task: harness.Task):
    """The (x, A, y) that the harness would generate for ``task``."""
    s_sig, s_mat, s_noise = harness.realization_seeds(task.base_seed, task.index, task.r)
    x = gen_signal(task.signal, s_sig)
    op = gen_matrix(task.matrix, s_mat)
    z = op.forward(x)
    y = add_noise(z, task.snr_db, s_noise)[0] if np.any(z) else z
    return x, op, y


def cmd_ptc(p: dict) -> int:
    solver = solver_from(p)
    if p["full"]:
        kw = dict(n=1000, size=30, realizations=100)
    else:
        kw = dict(n=p["n"], size=p["grid_size"], realizations=p["realizations"])
    axis = tuple(np.linspace(0.05, 0.95, kw["size"]))
    deltas = p["m_over_n"] if p["m_over_n"] is not None else axis
    rhos = p["k_over_m"] if p["k_over_m"] is not None else axis
    n = kw["n"]
    for d in deltas:
        M = int(round(d * n))
        _check(1 <= M <= n, f"M <= N violated: M/N={d} gives M={M} for N={n}")
        for r in rhos:
            _check(0 <= r <= 1, f"K <= M violated: K/M={r}")
    try:
        grid = ExperimentGrid(n=n, m_over_n=deltas, k_over_m=rhos, realizations=kw["realizations"],
                              base_seed=p["seed"], signal=p["signal"], matrix=p["matrix"], lam_a=p["lam_a"],
                              snr_db=p["snr"], solver=solver, success_nmse=p["success_nmse"])
    except ValueError as err:
        raise ConfigError(str(err))
    table = harness.run_ptc(grid, jobs=p["jobs"])
    table.extra["kind"] = "ptc"
    _emit_table(table, p)
    if p["contour"]:
        harness.contour_csv(table, p["contour"])
    print(f"ptc: {len(table.rows)} grid points x {grid.realizations} realisations, "
          f"mean success {fmt(float(np.mean(table.column('success_rate'))))}")
    return 0


def cmd_sweep(p: dict) -> int:
    n, k = p["n"], p["k"]
    ms = [int(round(d * n)) for d in p["m_over_n"]]
    for M in ms:
        _check_dims(n, M, k)
    try:
        sig = SignalSpec(p["signal"], n, k=k)
        MatrixSpec(p["matrix"], 1, n, p["lam_a"])
    except ValueError as err:
        raise ConfigError(str(err))
    table = harness.run_nmse_sweep(sig, ms, p["snr"], p["realizations"], p["solvers"],
                                   matrix=p["matrix"], base_seed=p["seed"], jobs=p["jobs"])
    table.extra["kind"] = "sweep"
    _emit_table(table, p)
    bps = ", ".join(f"{name} {fmt(v)}" for name, v in table.extra["breakpoint"].items())
    print(f"sweep: {len(table.rows)} points; breakpoints {bps}")
    return 0


def cmd_scaling(p: dict) -> int:
    for n in p["n_list"]:
        _check_dims(n, int(round(p["m_over_n"] * n)), int(round(p["k_over_n"] * n)))
    solver = replace(harness.FIXED_WORK_SOLVER, i_max=p["i_max"], t_max=p["t_max"])
    table = harness.run_scaling(p["n_list"], p["m_over_n"], p["k_over_n"], p["realizations"], p["matrix"],
                                p["signal"], p["snr"], solver, p["seed"])
    table.extra["kind"] = "scaling"
    _emit_table(table, p)
    print(f"scaling: {len(table.rows)} lengths, log-log slope {fmt(table.extra['slope'])}")
    return 0


def cmd_mos_demo(p: dict) -> int:
    _check_dims(p["n"], p["m"], None)
    try:
        sig = SignalSpec(p["signal"], p["n"], lam=p["lam"])
        mat = MatrixSpec(p["matrix"], p["m"], p["n"])
        mos_cfg = MosConfig(L0=p["L0"], j_max=p["j_max"], L_max=p["L_max"])
    except ValueError as err:
        raise ConfigError(str(err))
    task = harness.Task(0, 0, sig, mat, p["snr"], SolverConfig(mode=p["mode"]), p["seed"])
    x, op, y = problem_instance(task)
    if not np.any(x):
        raise ConfigError("the drawn signal is all zero; increase lam")
    res = mos_select(y, op, EmConfig(mode=p["mode"]), mos_cfg, x_true=x)
    for rec in res.trace:
        db = 10 * math.log10(rec["nmse"]) if rec["nmse"] > 0 else harness.NMSE_FLOOR_DB
        scores = " ".join(f"L={c['L']}:{c['score']:.1f}" for c in rec["candidates"])
        print(f"j={rec['j']} L={rec['L']} NMSE {db:.2f} dB {scores}")
    print(f"selected L={res.L} after {res.n_iter - 1} model-order iterations")
    if p["out"]:
        doc = {"payload": {"L": res.L, "trace": res.trace, "signal": sig.to_dict(), "snr_db": p["snr"],
                           "seed": p["seed"], "kind": "mos"}}
        _write(p["out"], json.dumps(doc, indent=1, default=float) + "\n")
    return 0


def _emit_table(table: harness.ResultTable, p: dict):
    if p["out"]:
        _write(p["out"], table.to_csv())
    if p["json"]:
        _write(p["json"], table.to_json())


# plots --------------------------------------------------------------------------

def emit_plots(inputs, out_dir) -> list[Path]:
    """Write gnuplot scripts (plus the data they read) for saved JSON tables.

    Everything is validated before any file is written.
    """
    docs = []
    for path in inputs:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"missing result file {path}")
        try:
            doc = json.loads(path.read_text())
            payload = doc["payload"]
            rows = payload["rows"]
            kind = payload["extra"]["kind"]
        except (ValueError, KeyError, TypeError):
            raise ConfigError(f"{path} is not a result table")
        if not rows:
            raise ConfigError(f"{path} holds no results")
        if kind not in ("ptc", "sweep", "scaling"):
            raise ConfigError(f"no plot recipe for {kind!r} results in {path}")
        docs.append((path, kind, payload, doc.get("metadata", {})))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for path, kind, payload, meta in docs:
        stem = out_dir / path.stem
        rows = payload["rows"]
        if kind == "ptc":
            grid_file = stem.with_suffix(".grid.dat")
            contour_file = stem.with_suffix(".contour.csv")
            lines = [f"{fmt(r['m_over_n'])} {fmt(r['k_over_m'])} {fmt(r['success_rate'])}" for r in rows]
            grid_file.write_text("\n".join(lines) + "\n")
            cont = ["m_over_n,k_over_m,lasso_k_over_m"] + [
                f"{fmt(c['m_over_n'])},{fmt(c['k_over_m'])},{fmt(c['lasso_k_over_m'])}"
                for c in payload["extra"]["contour"]]
            contour_file.write_text("\n".join(cont) + "\n")
            script = [
                "set datafile separator ','",
                f"set output '{path.stem}.ptc.png'",
                "set terminal pngcairo size 640,480",
                "set xlabel 'M/N'", "set ylabel 'K/M'", "set xrange [0:1]", "set yrange [0:1]",
                f"plot '{contour_file.name}' using 1:2 with linespoints title 'empirical 50% contour', \\",
                f"     '{contour_file.name}' using 1:3 with lines title 'LASSO theory'",
            ]
            written += [grid_file, contour_file]
        elif kind == "sweep":
            plots = []
            for name in dict.fromkeys(r["solver"] for r in rows):
                dat = stem.with_suffix(f".{name}.dat")
                dat.write_text("\n".join(f"{fmt(r['m_over_n'])} {fmt(r['median_nmse_db'])}"
                                         for r in rows if r["solver"] == name) + "\n")
                written.append(dat)
                plots.append(f"'{dat.name}' using 1:2 with linespoints title '{name}'")
            script = [
                f"set output '{path.stem}.nmse.png'", "set terminal pngcairo size 640,480",
                "set xlabel 'M/N'", "set ylabel 'median NMSE [dB]'",
                "plot " + ", \\\n     ".join(plots),
            ]
        else:
            dat = stem.with_suffix(".scaling.dat")
            timing = meta.get("row_timing") or [{}] * len(rows)
            dat.write_text("\n".join(f"{r['n']} {fmt(t.get('median_runtime_s', math.nan))}"
                                     for r, t in zip(rows, timing)) + "\n")
            written.append(dat)
            script = [
                f"set output '{path.stem}.scaling.png'", "set terminal pngcairo size 640,480",
                "set logscale xy", "set xlabel 'N'", "set ylabel 'runtime [s]'",
                f"plot '{dat.name}' using 1:2 with linespoints title 'median runtime'",
            ]
        gp = stem.with_suffix(".gp")
        gp.write_text("\n".join(script) + "\n")
        written.append(gp)
    return written


# entry point ---------------------------------------------------------------------

COMMANDS = {"recover": cmd_recover, "ptc": cmd_ptc, "sweep": cmd_sweep, "scaling": cmd_scaling,
            "mos-demo": cmd_mos_demo}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "plot":
            for f in emit_plots(args.inputs, args.out_dir):
                print(f)
            return 0
        return COMMANDS[args.command](resolve(args))
    except ConfigError as err:
        print(f"emgmamp {args.command}: error: {err}", file=sys.stderr)
        return 2
    except (FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"emgmamp {args.command}: numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
