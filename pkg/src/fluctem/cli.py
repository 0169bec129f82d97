"""Command-line runner that writes CSV tables for each capability.

Every subcommand accepts ``--config FILE`` (INI-style ``key = value`` lines,
optionally under a ``[run]`` or ``[<subcommand>]`` section) and explicit
flags, which take precedence over the file.  Output starts with ``#``
metadata lines echoing the resolved configuration.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import subprocess
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .drag import DragConfig, drag_force
from .errors import ConvergenceError, FluctuationError
from .friction import ShearSystem, friction_force, friction_grid, growth_rate, pendry_force, pendry_force_double, quanta_trace
from .materials import DriftParams, DrudeParams, ParticleParams, PlasmaParams, drude_epsilon, kk_grid, kk_residual, plasma_epsilon
from .spectra import MediumPoint, ThermalState, field_spectral_density, lossless_limit_trace, vacuum_spectral_density

EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3

HBAR_EV_S = 6.582119569e-16
C_M_S = 299792458.0


def reduced_frequency(omega_ev: float, omega_ref_ev: float) -> float:
    """Frequency given as a photon energy in eV, in units of ``omega_ref``."""
    return omega_ev / omega_ref_ev


def reduced_length(length_m: float, omega_ref_ev: float) -> float:
    """Length in metres, in units of ``c / omega_ref``."""
    return length_m * (omega_ref_ev / HBAR_EV_S) / C_M_S


class ConfigError(Exception):
    pass


def _parse_list(text: str):
    """``a,b,c``, ``lin:start:stop:n`` or ``geom:start:stop:n``."""
    text = text.strip()
    if not text:
        return []
    if text.startswith(("lin:", "geom:")):
        kind, a, b, n = text.split(":")
        fn = np.linspace if kind == "lin" else np.geomspace
        return [float(x) for x in fn(float(a), float(b), int(n))]
    return [float(x) for x in text.split(",") if x.strip()]


# name -> (converter, default, help)
_COMMON = {
    "tol": (float, 1e-6, "relative quadrature tolerance"),
    "threads": (int, 1, "worker processes for sweeps"),
}

_SCHEMAS = {
    "spectra": {
        "mode": (str, "trace", "trace: sweep Im eps -> 0; profile: sweep R"),
        "omega": (float, 1.0, "frequency"),
        "R": (float, 1.0, "separation (trace mode)"),
        "temperature": (float, 0.0, "temperature"),
        "eps_real": (float, 1.0, "Re eps (profile mode)"),
        "eps_imag": (float, 0.0, "Im eps (profile mode)"),
        "deltas": (_parse_list, "1e-2,1e-3,1e-4,1e-5", "Im eps values, descending (trace mode)"),
        "r_values": (_parse_list, "lin:0.1:10:100", "separations (profile mode)"),
    },
    "friction-dynamics": {
        "omega_sp": (float, 1.0, "surface plasmon frequency"),
        "v": (float, 1.0, "shear speed"),
        "d": (_parse_list, "0.6,1.15,1.75", "gap distances"),
        "t_max": (float, 0.0, "final time; 0 means 10 / peak growth rate per d"),
        "n_t": (int, 101, "number of time samples"),
        "grid_n": (int, 32, "k-grid points per axis for the force; 0 disables"),
        "area": (float, 1.0, "plate area"),
    },
    "pendry-force": {
        "omega_sp": (float, 1.0, "surface plasmon frequency"),
        "v": (float, 0.5, "shear speed"),
        "d": (float, 1.0, "gap distance"),
        "sweep": (str, "v", "swept parameter: v or d"),
        "values": (_parse_list, "lin:0.2:1.0:9", "sweep values"),
        "check": (int, 1, "also evaluate the double integral (1/0)"),
    },
    "drag-force": {
        "omega_p": (float, 1.414, "plasma frequency of the plate"),
        "gamma": (float, 0.05, "electron relaxation rate"),
        "eps_L": (float, 1.0, "lattice permittivity (real)"),
        "v0": (float, 0.1, "drift speed along x"),
        "alpha0": (float, 1.0, "static polarizability"),
        "omega0": (float, 1.0, "particle resonance"),
        "eta": (float, 0.1, "particle damping"),
        "z0": (float, 1.0, "particle height"),
        "T_el": (float, 0.0, "electron temperature"),
        "T_p": (float, 0.0, "particle temperature"),
        "T_L": (float, 0.0, "lattice temperature (recorded only)"),
        "sweep": (str, "v0", "swept parameter: v0 or z0"),
        "values": (_parse_list, "geom:0.01:0.1:5", "sweep values"),
    },
    "kk-check": {
        "model": (str, "drude", "drude or plasma"),
        "omega_p": (float, 1.0, "plasma frequency"),
        "gamma": (float, 0.2, "relaxation rate (drude)"),
        "omega_max": (float, 100.0, "upper end of the frequency grid"),
        "n_grid": (int, 4001, "grid points"),
        "omega_test": (_parse_list, "0.5", "test frequencies"),
    },
}


def _git_hash() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 and out.stdout.strip() else "unknown"


def _read_config_file(path: str, command: str) -> dict:
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    values = {}
    for section in ("run", command):
        if parser.has_section(section):
            values.update(parser.items(section))
    return values


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags; convert and validate every field."""
    schema = {**_SCHEMAS[command], **_COMMON}
    raw = {name: default for name, (_, default, _) in schema.items()}
    if args.config:
        try:
            from_file = _read_config_file(args.config, command)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
        unknown = set(from_file) - set(schema)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        raw.update(from_file)
    for name in schema:
        flag = getattr(args, name, None)
        if flag is not None:
            raw[name] = flag
    cfg = {}
    for name, (conv, _, _) in schema.items():
        value = raw[name]
        try:
            cfg[name] = conv(value) if isinstance(value, str) else value
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field '{name}': cannot parse {value!r} ({exc})") from exc
    _validate(command, cfg)
    return cfg


def _require(cfg, name, ok, what):
    if not ok:
        raise ConfigError(f"field '{name}': {what}, got {cfg[name]!r}")


def _validate(command: str, cfg: dict):
    _require(cfg, "tol", cfg["tol"] > 0, "must be > 0")
    _require(cfg, "threads", cfg["threads"] >= 1, "must be >= 1")
    if command == "spectra":
        _require(cfg, "mode", cfg["mode"] in ("trace", "profile"), "must be 'trace' or 'profile'")
        _require(cfg, "omega", cfg["omega"] > 0, "must be > 0")
        _require(cfg, "R", cfg["R"] > 0, "must be > 0")
        _require(cfg, "temperature", cfg["temperature"] >= 0, "must be >= 0")
        _require(cfg, "eps_imag", cfg["eps_imag"] >= 0, "Im eps must be >= 0")
        d = cfg["deltas"]
        _require(cfg, "deltas", all(x >= 0 for x in d), "must be >= 0")
        _require(cfg, "deltas", all(a >= b for a, b in zip(d, d[1:])), "must be descending")
        _require(cfg, "r_values", all(r > 0 for r in cfg["r_values"]), "separations must be > 0")
    elif command == "friction-dynamics":
        _require(cfg, "omega_sp", cfg["omega_sp"] > 0, "must be > 0")
        _require(cfg, "v", cfg["v"] > 0, "must be > 0")
        _require(cfg, "d", len(cfg["d"]) > 0 and all(x > 0 for x in cfg["d"]), "gaps must be > 0")
        _require(cfg, "t_max", cfg["t_max"] >= 0, "must be >= 0")
        _require(cfg, "n_t", cfg["n_t"] >= 2, "must be >= 2")
        _require(cfg, "grid_n", cfg["grid_n"] == 0 or cfg["grid_n"] >= 2, "must be 0 or >= 2")
        _require(cfg, "area", cfg["area"] > 0, "must be > 0")
    elif command == "pendry-force":
        _require(cfg, "sweep", cfg["sweep"] in ("v", "d"), "must be 'v' or 'd'")
        _require(cfg, "omega_sp", cfg["omega_sp"] > 0, "must be > 0")
        _require(cfg, "v", cfg["v"] > 0, "must be > 0")
        _require(cfg, "d", cfg["d"] > 0, "must be > 0")
        _require(cfg, "values", all(x > 0 for x in cfg["values"]), "must be > 0")
    elif command == "drag-force":
        _require(cfg, "sweep", cfg["sweep"] in ("v0", "z0"), "must be 'v0' or 'z0'")
        for name in ("omega_p", "alpha0", "omega0", "eta", "z0"):
            _require(cfg, name, cfg[name] > 0, "must be > 0")
        for name in ("gamma", "T_el", "T_p", "T_L"):
            _require(cfg, name, cfg[name] >= 0, "must be >= 0")
        if cfg["sweep"] == "z0":
            _require(cfg, "values", all(x > 0 for x in cfg["values"]), "z0 values must be > 0")
    elif command == "kk-check":
        _require(cfg, "model", cfg["model"] in ("drude", "plasma"), "must be 'drude' or 'plasma'")
        _require(cfg, "omega_p", cfg["omega_p"] > 0, "must be > 0")
        _require(cfg, "gamma", cfg["gamma"] >= 0, "must be >= 0")
        _require(cfg, "n_grid", cfg["n_grid"] >= 3, "must be >= 3")
        _require(cfg, "omega_max", cfg["omega_max"] > 0, "must be > 0")
        _require(
            cfg,
            "omega_test",
            all(1e-4 < w < cfg["omega_max"] for w in cfg["omega_test"]),
            "must lie inside the frequency grid",
        )


class _Table:
    def __init__(self, command: str, cfg: dict, columns):
        self.buf = io.StringIO()
        self.buf.write(f"# fluctem {__version__}\n# git {_git_hash()}\n# command {command}\n")
        for key in sorted(cfg):
            value = cfg[key]
            if isinstance(value, list):
                value = ",".join(repr(x) for x in value)
            self.buf.write(f"# {key} = {value}\n")
        self.writer = csv.writer(self.buf, lineterminator="\n")
        self.writer.writerow(columns)

    def row(self, *values):
        self.writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in values])

    def text(self) -> str:
        return self.buf.getvalue()


def run_spectra(cfg: dict) -> str:
    if cfg["mode"] == "trace":
        table = _Table("spectra", cfg, ["delta", "density", "vacuum_limit"])
        if cfg["deltas"]:
            trace = lossless_limit_trace(cfg["omega"], cfg["R"], cfg["deltas"])
            for dl, val in zip(trace.deltas, trace.density):
                table.row(dl, val, trace.limit)
        return table.text()
    table = _Table("spectra", cfg, ["R", "density", "vacuum"])
    T = ThermalState(cfg["temperature"])
    eps = complex(cfg["eps_real"], cfg["eps_imag"])
    for R in cfg["r_values"]:
        val = field_spectral_density(MediumPoint(eps, R), cfg["omega"], T)
        table.row(R, val, vacuum_spectral_density(cfg["omega"], R))
    return table.text()


def run_friction(cfg: dict) -> str:
    table = _Table("friction-dynamics", cfg, ["d", "t", "N", "dN_dt", "F_per_area"])
    for d in cfg["d"]:
        sys_ = ShearSystem(cfg["omega_sp"], d, cfg["v"])
        k = sys_.peak_wave_vector()
        rate = growth_rate(sys_, k, exact=True)
        t_max = cfg["t_max"] or 10.0 / rate
        times = np.linspace(0.0, t_max, cfg["n_t"])
        trace = quanta_trace(sys_, k, times)
        if cfg["grid_n"]:
            grid = friction_grid(sys_, cfg["grid_n"], cfg["grid_n"])
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                force = friction_force(sys_, grid, times, cfg["area"])
            for w in caught:
                print(f"warning (d={d}): {w.message}", file=sys.stderr)
        else:
            force = np.full_like(times, math.nan)
        for t, n, r, f in zip(times, trace.N, trace.dNdt, force):
            table.row(d, t, n, r, f)
    return table.text()


def _pendry_row(args):
    w, v, d, check = args
    s = ShearSystem(w, d, v)
    return pendry_force(s), (pendry_force_double(s) if check else math.nan)


def run_pendry(cfg: dict) -> str:
    table = _Table("pendry-force", cfg, [cfg["sweep"], "F_per_area", "F_per_area_double"])
    jobs = []
    for x in cfg["values"]:
        v, d = (x, cfg["d"]) if cfg["sweep"] == "v" else (cfg["v"], x)
        jobs.append((cfg["omega_sp"], v, d, bool(cfg["check"])))
    for x, (F, F2) in zip(cfg["values"], _map(_pendry_row, jobs, cfg["threads"])):
        table.row(x, F, F2)
    return table.text()


def _drag_row(args):
    dcfg, tol = args
    try:
        r = drag_force(dcfg, tol=tol)
        return r.F_x, r.abs_error_estimate, "ok"
    except ConvergenceError as exc:
        return math.nan, math.nan, f"nonconverged: {exc}"


def run_drag(cfg: dict):
    """Returns the CSV text and whether every row converged."""
    base = DragConfig(
        DriftParams(DrudeParams(cfg["omega_p"], cfg["gamma"], cfg["eps_L"]), (cfg["v0"], 0.0, 0.0)),
        ParticleParams(cfg["alpha0"], cfg["omega0"], cfg["eta"]),
        cfg["z0"],
        cfg["T_el"],
        cfg["T_p"],
        cfg["T_L"],
    )
    values = sorted(cfg["values"])
    jobs = [((base.with_v0(x) if cfg["sweep"] == "v0" else base.with_z0(x)), cfg["tol"]) for x in values]
    table = _Table("drag-force", cfg, [cfg["sweep"], "F_x", "abs_error", "status"])
    ok = True
    for x, (F, err, status) in zip(values, _map(_drag_row, jobs, cfg["threads"])):
        ok &= status == "ok"
        table.row(x, F, err, status)
    return table.text(), ok


def run_kk(cfg: dict) -> str:
    table = _Table("kk-check", cfg, ["omega_test", "residual"])
    if cfg["model"] == "drude":
        p = DrudeParams(cfg["omega_p"], cfg["gamma"])

        def model(w):
            return drude_epsilon(w, p)

    else:
        pp = PlasmaParams(cfg["omega_p"])

        def model(w):
            return plasma_epsilon(w, pp) + 0j

    grid = kk_grid(cfg["omega_max"], cfg["n_grid"])
    for wt in cfg["omega_test"]:
        table.row(wt, kk_residual(model, grid, wt))
    return table.text()


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fluctem", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fluctem {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, schema in _SCHEMAS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", help="INI-style key = value file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        for name, (conv, default, helptext) in {**schema, **_COMMON}.items():
            flag = "--" + name.replace("_", "-")
            p.add_argument(flag, dest=name, type=str, default=None, help=f"{helptext} (default: {default})")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    status = 0
    try:
        if args.command == "spectra":
            text = run_spectra(cfg)
        elif args.command == "friction-dynamics":
            text = run_friction(cfg)
        elif args.command == "pendry-force":
            text = run_pendry(cfg)
        elif args.command == "drag-force":
            text, ok = run_drag(cfg)
            status = 0 if ok else EXIT_NONCONVERGED
        else:
            text = run_kk(cfg)
    except ConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (FluctuationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
