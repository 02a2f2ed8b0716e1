"""Command-line entry point: ``wdqm <command> [options]``.

Every option can also come from a ``key = value`` config file passed with
``--config``; command-line flags win over the file, and unknown keys are
rejected. Output goes to ``--output`` (stdout by default) as CSV with ``#``
metadata lines or as a JSON object with ``meta`` and ``data``.

Exit codes: 0 success, 1 failed checks, 2 config error, 3 domain error,
4 I/O error. Failures also print a one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .checks import SUITES, format_table, run_suite
from .dynamics import CausticError, MassTime, evolve_gaussian, free_propagator, ho_propagator
from .quadrature import full_line_grid
from .specfun import DomainError, dunkl_kernel
from .stochastic import dunkl_heat_kernel, feynman_kac_mc, feynman_kac_refinement, heat_pairing_quadrature, ho_heat_kernel
from .tables import format_csv, format_json, parse_csv
from .transform import QuadratureError, SampledFunction, TruncationError, dunkl_transform, inverse_dunkl_transform
from .trotter import SCHEMES, GridMismatchError, SliceConfig, dispersion_half_width, ho_convergence_table, trotter_grid

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


def _bool(text: str) -> bool:
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


def _opt_float(text: str) -> float | None:
    return None if str(text).strip().lower() in ("", "none") else float(text)


def _opt_int(text: str) -> int | None:
    return None if str(text).strip().lower() in ("", "none") else int(text)


@dataclass(frozen=True)
class Param:
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str
    choices: tuple | None = None


def _range_params(prefix: str, lo: float, hi: float, n: int) -> list[Param]:
    return [
        Param(f"{prefix}_min", float, lo, f"smallest {prefix}"),
        Param(f"{prefix}_max", float, hi, f"largest {prefix}"),
        Param(f"n_{prefix}", int, n, f"number of {prefix} points"),
    ]


MASS = [Param("mass", float, 1.0, "particle mass"), Param("hbar", float, 1.0, "Planck constant")]

PARAMS: dict[str, list[Param]] = {
    "kernel": [
        Param("nu", float, 0.5, "deformation parameter"),
        Param("axis", str, "real", "evaluate E_nu(x) or E_nu(ix)", ("real", "imaginary")),
        *_range_params("x", -10.0, 10.0, 201),
    ],
    "transform": [
        Param("nu", float, 0.5, "deformation parameter"),
        Param("function", str, "gaussian", "built-in input function", ("gaussian", "odd_gaussian")),
        Param("alpha", float, 1.0, "Gaussian exponent: exp(-alpha x^2/2)"),
        Param("input", str, None, "CSV of samples (node, re, im) written on a quadrature grid"),
        Param("inverse", _bool, False, "apply the inverse transform"),
        Param("grid", str, "uniform", "output points: uniform range or quadrature grid", ("uniform", "quadrature")),
        *_range_params("k", 0.0, 5.0, 51),
        Param("half_width", float, 12.0, "quadrature grid half-width"),
        Param("panels", int, 24, "quadrature panels per half-line"),
        Param("order", int, 16, "nodes per panel"),
        Param("tol", float, 1e-12, "allowed truncation tail"),
    ],
    "evolve": [
        Param("nu", float, 0.5, "deformation parameter"),
        Param("beta", float, 1.0, "initial width parameter"),
        Param("t", _float_list, [1.0], "comma-separated times"),
        *MASS,
        *_range_params("x", -6.0, 6.0, 121),
    ],
    "propagate": [
        Param("nu", float, 0.5, "deformation parameter"),
        Param("t", float, 1.0, "time"),
        Param("omega", _opt_float, None, "oscillator frequency (free particle when omitted)"),
        *MASS,
        Param("eps_m", float, 0.0, "imaginary mass regulariser"),
        *_range_params("x", -2.0, 2.0, 21),
        *_range_params("y", -2.0, 2.0, 21),
    ],
    "trotter": [
        Param("nu", float, 0.5, "deformation parameter"),
        Param("omega", float, 1.0, "oscillator frequency"),
        Param("t", float, 1.0, "total time"),
        *MASS,
        Param("eps_m", float, 0.25, "imaginary mass regulariser"),
        Param("n_nodes", int, 384, "grid nodes (multiple of 2*order)"),
        Param("order", int, 16, "nodes per panel"),
        Param("half_width", _opt_float, None, "grid half-width (default: dispersion width)"),
        Param("inner", float, 2.0, "error is measured on |x|,|y| <= inner"),
        Param("n_schedule", _int_list, [8, 16, 32, 64], "comma-separated slice counts"),
        Param("scheme", str, "exact_dunkl", "short-time kernel", SCHEMES),
        Param("centrifugal", str, "derived", "naive centrifugal coefficient", ("derived", "printed")),
    ],
    "heat": [
        Param("nu", float, 0.5, "deformation parameter"),
        Param("tau", float, 1.0, "Euclidean time"),
        Param("y", float, 0.5, "start point"),
        Param("omega", _opt_float, None, "oscillator frequency (free when omitted)"),
        *_range_params("x", -4.0, 4.0, 81),
    ],
    "mc": [
        Param("potential", str, "ho", "potential", ("free", "ho")),
        Param("omega", float, 1.0, "oscillator frequency"),
        Param("nu", float, 0.5, "deformation parameter"),
        Param("tau", float, 0.8, "Euclidean time"),
        Param("y", float, 0.7, "start point"),
        Param("center", float, 0.5, "test function exp(-(x-center)^2/(2 width^2))"),
        Param("width", float, 1.0, "test function width"),
        Param("paths", int, 100_000, "paths per sector"),
        Param("steps", _opt_int, None, "time steps (default 64 per unit tau)"),
        Param("seed", int, 0, "random seed"),
        Param("workers", _opt_int, None, "worker threads (default: available CPUs)"),
        Param("refine", _bool, False, "also report the estimate with doubled steps"),
        Param("reference", _bool, True, "compare with the quadrature pairing"),
    ],
    "check": [
        Param("suite", str, "all", "property suite", (*SUITES, "all")),
    ],
}

DEFAULT_FORMAT = {"mc": "json"}


def read_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wdqm", description="Wigner-Dunkl quantum mechanics computations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for command, params in PARAMS.items():
        sp = sub.add_parser(command)
        sp.add_argument("--config", help="key = value config file; flags override it")
        sp.add_argument("--output", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        for prm in params:
            flag = "--" + prm.name.replace("_", "-")
            kw = {"dest": prm.name, "default": None, "help": f"{prm.help} (default: {prm.default})"}
            if prm.choices:
                kw["choices"] = prm.choices
            sp.add_argument(flag, **kw)
    return parser


def resolve_config(command: str, flags: dict[str, str | None], file_values: dict[str, str]) -> dict[str, Any]:
    """Defaults, then config-file values, then flags; values are parsed per key."""
    params = {p.name: p for p in PARAMS[command]}
    unknown = sorted(set(file_values) - set(params) - {"format", "output"})
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
    resolved = {}
    for name, prm in params.items():
        raw = flags.get(name)
        if raw is None:
            raw = file_values.get(name)
        if raw is None:
            resolved[name] = prm.default
            continue
        if prm.choices and raw not in prm.choices:
            raise ConfigError(f"{name} must be one of {prm.choices}, got {raw!r}")
        try:
            resolved[name] = prm.parse(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {name}: {raw!r} ({exc})") from exc
    return resolved


def _linspace(cfg: dict, prefix: str) -> np.ndarray:
    n = cfg[f"n_{prefix}"]
    if n < 1:
        raise ConfigError(f"n_{prefix} must be positive")
    return np.linspace(cfg[f"{prefix}_min"], cfg[f"{prefix}_max"], n)


# --- commands ------------------------------------------------------------------


def _cmd_kernel(cfg):
    x = _linspace(cfg, "x")
    z = 1j * x if cfg["axis"] == "imaginary" else x
    vals = np.asarray(dunkl_kernel(z, cfg["nu"]), dtype=complex)
    return ["x", "re", "im"], np.column_stack([x, vals.real, vals.imag])


def _builtin_function(cfg) -> Callable:
    a = cfg["alpha"]
    if cfg["function"] == "gaussian":
        return lambda x: np.exp(-a * x * x / 2.0)
    return lambda x: x * np.exp(-a * x * x / 2.0)


def _quadrature_grid(cfg):
    return full_line_grid(cfg["nu"], cfg["half_width"], cfg["panels"], cfg["order"])


def _read_input_samples(cfg) -> SampledFunction:
    with open(cfg["input"]) as fh:
        meta, columns, rows = parse_csv(fh.read())
    if columns[:3] != ["node", "re", "im"]:
        raise ConfigError("input CSV needs columns node, re, im")
    src = meta.get("config", {})
    if src.get("grid") != "quadrature":
        raise ConfigError("input samples must lie on a quadrature grid (write them with grid = quadrature)")
    if float(src.get("nu")) != cfg["nu"]:
        raise ConfigError(f"input was sampled for nu={src.get('nu')}, not nu={cfg['nu']}")
    grid = full_line_grid(src["nu"], src["half_width"], src["panels"], src["order"])
    return SampledFunction(rows[:, 0], rows[:, 1] + 1j * rows[:, 2], grid=grid)


def _cmd_transform(cfg):
    f = _read_input_samples(cfg) if cfg["input"] else _builtin_function(cfg)
    targets = _quadrature_grid(cfg) if cfg["grid"] == "quadrature" else _linspace(cfg, "k")
    op = inverse_dunkl_transform if cfg["inverse"] else dunkl_transform
    out = op(f, cfg["nu"], targets, tol=cfg["tol"], order=cfg["order"])
    return ["node", "re", "im"], np.column_stack([out.nodes, out.values.real, out.values.imag])


def _cmd_evolve(cfg):
    x = _linspace(cfg, "x")
    mt = MassTime(cfg["mass"], cfg["hbar"])
    rows = []
    for t in cfg["t"]:
        ps = evolve_gaussian(cfg["beta"], t, cfg["nu"], mt)
        rows.append(np.column_stack([x, np.full_like(x, t), ps.density(x)]))
    return ["x", "t", "density"], np.vstack(rows)


def _cmd_propagate(cfg):
    x, y = np.meshgrid(_linspace(cfg, "x"), _linspace(cfg, "y"), indexing="ij")
    x, y = x.ravel(), y.ravel()
    mt = MassTime(cfg["mass"], cfg["hbar"], cfg["eps_m"])
    t = cfg["t"]
    if cfg["omega"] is None:
        k = free_propagator(x, y, t, cfg["nu"], mt)
    else:
        k = ho_propagator(x, y, t, cfg["omega"], cfg["nu"], mt)
    k = np.asarray(k, dtype=complex)
    return ["x", "y", "t", "re", "im"], np.column_stack([x, y, np.full_like(x, t), k.real, k.imag])


def _cmd_trotter(cfg):
    mt = MassTime(cfg["mass"], cfg["hbar"], cfg["eps_m"])
    hw = cfg["half_width"]
    if hw is None:
        hw = dispersion_half_width(cfg["t"], mt, cfg["inner"])
        cfg["half_width"] = hw
    grid = trotter_grid(cfg["nu"], hw, cfg["n_nodes"], cfg["order"])
    sc = SliceConfig(cfg["n_schedule"][0], cfg["t"], grid, mt)
    rows = ho_convergence_table(sc, cfg["nu"], cfg["omega"], cfg["n_schedule"], cfg["scheme"], cfg["inner"], cfg["centrifugal"])
    return ["n_slices", "grid_size", "rel_error"], [(r.n_slices, r.grid_size, r.rel_error) for r in rows]


def _cmd_heat(cfg):
    x = _linspace(cfg, "x")
    y, tau = cfg["y"], cfg["tau"]
    if cfg["omega"] is None:
        d = dunkl_heat_kernel(x, y, tau, cfg["nu"])
    else:
        d = ho_heat_kernel(x, y, tau, cfg["omega"], cfg["nu"])
    return ["x", "y", "tau", "density"], np.column_stack([x, np.full_like(x, y), np.full_like(x, tau), d])


def _cmd_mc(cfg):
    if cfg["workers"] is None:
        cfg["workers"] = os.cpu_count() or 1
    if cfg["workers"] < 1:
        raise ConfigError("workers must be positive")
    c, w = cfg["center"], cfg["width"]
    if not w > 0:
        raise DomainError("test function width must be positive")
    f = lambda x: np.exp(-((x - c) ** 2) / (2.0 * w * w))  # noqa: E731
    omega = cfg["omega"] if cfg["potential"] == "ho" else None
    V = None if omega is None else (lambda x: 0.5 * omega**2 * x * x)
    args = (V, cfg["y"], cfg["tau"], cfg["nu"], f, cfg["paths"], cfg["steps"], cfg["seed"], cfg["workers"])
    if cfg["refine"]:
        est, fine = feynman_kac_refinement(*args)
    else:
        est, fine = feynman_kac_mc(*args), None
    cfg["steps"] = est.n_steps
    data = {
        "estimate": est.mean,
        "std_error": est.std_error,
        "n_paths": est.n_samples,
        "n_steps": est.n_steps,
        "seed": est.seed,
        "workers": cfg["workers"],
        "clamp_rate": est.clamp_rate,
    }
    if fine is not None:
        data["refined_estimate"] = fine.mean
        data["refined_std_error"] = fine.std_error
        data["refined_n_steps"] = fine.n_steps
    if cfg["reference"]:
        ref = heat_pairing_quadrature(f, cfg["y"], cfg["tau"], cfg["nu"], omega)
        data["reference"] = ref
        data["z_score"] = (est.mean - ref) / est.std_error
    return data


def _cmd_check(cfg):
    results = run_suite(cfg["suite"])
    print(format_table(results))
    return results


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w") as fh:
        fh.write(text)


def _render(command: str, cfg: dict, fmt: str, payload) -> str:
    if isinstance(payload, dict):
        if fmt == "json":
            return format_json(command, cfg, payload)
        keys = list(payload)
        return format_csv(command, cfg, keys, [[payload[k] for k in keys]])
    columns, rows = payload
    rows = rows.tolist() if isinstance(rows, np.ndarray) else [list(r) for r in rows]
    if fmt == "json":
        return format_json(command, cfg, {c: [r[i] for r in rows] for i, c in enumerate(columns)})
    return format_csv(command, cfg, columns, rows)


COMMANDS = {
    "kernel": _cmd_kernel,
    "transform": _cmd_transform,
    "evolve": _cmd_evolve,
    "propagate": _cmd_propagate,
    "trotter": _cmd_trotter,
    "heat": _cmd_heat,
    "mc": _cmd_mc,
}


def run(argv: list[str] | None = None) -> int:
    """Run one command; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        file_values = read_config_file(args.config) if args.config else {}
        flags = {p.name: getattr(args, p.name) for p in PARAMS[command]}
        cfg = resolve_config(command, flags, file_values)
        fmt = args.format or file_values.get("format") or DEFAULT_FORMAT.get(command, "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {fmt!r}")
        output = args.output or file_values.get("output")
        if command == "check":
            results = _cmd_check(cfg)
            if output:
                payload = (["residual", "tolerance", "passed"], [(r.residual, r.tolerance, int(r.passed)) for r in results])
                _emit(_render(command, cfg, fmt, payload), output)
            return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED
        payload = COMMANDS[command](cfg)
        _emit(_render(command, cfg, fmt, payload), output)
        return EXIT_OK
    except ConfigError as exc:
        return _fail("config_error", exc, EXIT_CONFIG)
    except OSError as exc:
        return _fail("io_error", exc, EXIT_IO)
    except (DomainError, CausticError, TruncationError, QuadratureError, GridMismatchError, ValueError, ArithmeticError) as exc:
        return _fail("domain_error", exc, EXIT_DOMAIN)


def _fail(kind: str, exc: Exception, code: int) -> int:
    record = {"error": kind, "type": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
