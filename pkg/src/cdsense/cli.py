"""Command-line front end: ``cdsense {bounds,ratio,sweep,simulate,validate}``.

Every command writes CSV (to ``--out`` or stdout) whose ``#`` header records
the fully resolved configuration. Settings are resolved as command-line flag,
then ``--config`` file (flat ``key = value`` lines), then built-in default.

Exit codes: 0 success, 1 failed validation, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import __version__, bounds, checks, estimation, pnrd
from .errors import CDSenseError
from .model import PhotonBudget, Scenario

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

NORMALIZATION_NOTE = "normalized difference nd_A_B = (A - B) / B; 0 when A == B"

# name -> (type, default, help); the type also parses config-file values
OPTIONS = {
    "tl": (float, 0.5, "analyte transmittance T_L"),
    "tr": (float, 0.45, "analyte transmittance T_R"),
    "eta_l": (float, 0.8, "excess-loss transmittance of the L arm"),
    "eta_r": (float, 0.8, "excess-loss transmittance of the R arm"),
    "n_tot": (float, 2.0, "total mean photon number N_L + N_R"),
    "ratio": (float, None, "input ratio N_L / N_tot (default: optimal, or 0.5 for simulate)"),
    "probe": (str, "fock", "probe state: coherent, fock or tmsv"),
    "grid": (int, 21, "grid points per axis"),
    "grid_min": (float, 0.0, "lower transmittance of the sweep grid"),
    "grid_max": (float, 1.0, "upper transmittance of the sweep grid"),
    "mode": (str, "classical", "optimal-ratio family: classical or uql"),
    "x_min": (float, -3.0, "log10 of the smallest x"),
    "x_max": (float, 3.0, "log10 of the largest x"),
    "points": (int, 61, "number of x values"),
    "seed": (int, 0, "first seed"),
    "seeds": (int, 200, "number of consecutive seeds (experiments)"),
    "nu": (int, 10_000, "shots per experiment"),
    "cutoff": (int, None, "photon-number cutoff for twin-beam series"),
    "degenerate": (str, "raise", "all-vacuum twin-beam batches: raise or boundary"),
    "workers": (int, 1, "worker processes"),
    "out": (str, None, "output path (default stdout)"),
}

COMMAND_OPTIONS = {
    "bounds": ("tl", "tr", "eta_l", "eta_r", "n_tot", "ratio", "out"),
    "ratio": ("mode", "x_min", "x_max", "points", "out"),
    "sweep": ("eta_l", "eta_r", "n_tot", "grid", "grid_min", "grid_max", "cutoff", "workers", "out"),
    "simulate": (
        "tl", "tr", "eta_l", "eta_r", "n_tot", "ratio", "probe", "nu", "seed", "seeds",
        "cutoff", "degenerate", "workers", "out",
    ),
    "validate": ("out",),
}

CHOICES = {
    "probe": [p.value for p in estimation.Probe],
    "mode": ["classical", "uql"],
    "degenerate": ["raise", "boundary"],
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Twelve significant digits with ``inf``/``nan`` literals."""
    if isinstance(x, (str, bool)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "nan"
    return f"{float(x):.12g}"


def normalized_difference(a: float, b: float) -> float:
    """``(a - b) / b``, exactly zero when the bounds coincide (both ``inf`` included)."""
    if a == b:
        return 0.0
    if b == 0:
        return math.copysign(math.inf, a)
    if math.isinf(b):
        return -1.0  # finite a against a divergent reference
    return (a - b) / b


def _ratio(a: float, b: float) -> float:
    """``a / b`` for enhancement columns; ``inf/inf`` and ``0/0`` give ``nan``."""
    if b == 0:
        return math.nan if a == 0 else math.inf
    if math.isinf(b):
        return math.nan if math.isinf(a) else 0.0
    return a / b


def write_csv(path, command: str, config: dict, columns, rows, notes=()) -> None:
    buf = io.StringIO(newline="")
    buf.write(f"# cdsense {__version__} {command}\n")
    for key in sorted(config):
        buf.write(f"# {key} = {fmt(config[key]) if config[key] is not None else 'none'}\n")
    for note in notes:
        buf.write(f"# {note}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def read_config(path: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for number, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{number}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OPTIONS:
                raise UsageError(f"{path}:{number}: unknown key {key!r}")
            kind = OPTIONS[key][0]
            try:
                values[key] = kind(value)
            except ValueError:
                raise UsageError(f"{path}:{number}: bad value {value!r} for {key}") from None
    return values


def resolve(command: str, args: argparse.Namespace) -> dict:
    file_values = read_config(args.config) if args.config else {}
    config = {}
    for name in COMMAND_OPTIONS[command]:
        cli = getattr(args, name)
        if cli is not None:
            config[name] = cli
        elif name in file_values:
            config[name] = file_values[name]
        else:
            config[name] = OPTIONS[name][1]
        if name in CHOICES and config[name] not in CHOICES[name]:
            raise UsageError(f"{name} must be one of {CHOICES[name]}, got {config[name]!r}")
    return config


def _scenario(cfg) -> Scenario:
    return Scenario(cfg["tl"], cfg["tr"], cfg["eta_l"], cfg["eta_r"])


def cmd_bounds(cfg) -> int:
    s = _scenario(cfg)
    n_tot = cfg["n_tot"]
    if not n_tot > 0:
        raise UsageError("n_tot must be positive")
    cb = bounds.classical_benchmark(s, n_tot)
    reports = [
        ("CB", bounds.coherent_report(s, n_tot)),
        ("UQL", bounds.uql_report(s, n_tot)),
        ("TMSV-direct", bounds.tmsv_direct_report(s, n_tot)),
        ("TMSV-large-N", bounds.tmsv_large_n_report(s)),
    ]
    rows = []
    for name, rep in reports:
        h = rep.qfim
        entries = (h.h_ll, h.h_lr, h.h_rr) if h is not None else (math.nan,) * 3
        rows.append((name, rep.var_gamma, *entries, rep.optimal_ratio, _ratio(cb, rep.var_gamma)))
    if cfg["ratio"] is not None:
        b = PhotonBudget.from_ratio(n_tot, cfg["ratio"])
        for name, var, h in (
            ("CB-fixed-ratio", bounds.var_coherent(s, b), bounds.qfim_coherent(s, b)),
            ("UQL-fixed-ratio", bounds.var_uql(s, b), bounds.qfim_max(s, b)),
        ):
            rows.append((name, var, h.h_ll, h.h_lr, h.h_rr, cfg["ratio"], _ratio(cb, var)))
    write_csv(
        cfg["out"],
        "bounds",
        cfg,
        ["bound", "var_gamma", "h_ll", "h_lr", "h_rr", "ratio", "enhancement_cb_over_bound"],
        rows,
        notes=["per-shot variance bounds on T_L - T_R; large-N row has no finite QFIM"],
    )
    return EXIT_OK


def cmd_ratio(cfg) -> int:
    if cfg["points"] < 2:
        raise UsageError("points must be >= 2")
    log_x = np.linspace(cfg["x_min"], cfg["x_max"], cfg["points"])
    rows = [(lx, 1.0 / (1.0 + math.sqrt(10.0**lx))) for lx in log_x]
    if cfg["mode"] == "classical":
        x_def = "x = eta_L T_R / (eta_R T_L)"
    else:
        x_def = "x = eta_L T_R (1 - eta_R T_R) / (eta_R T_L (1 - eta_L T_L))"
    write_csv(cfg["out"], "ratio", cfg, ["log10_x", "r_opt"], rows, notes=[x_def, "r_opt = 1 / (1 + sqrt(x))"])
    return EXIT_OK


SWEEP_COLUMNS = [
    "t_l", "t_r", "cb", "uql", "var_tmsv", "cr_tmsv_pnrd",
    "enh_cb_over_tmsv", "enh_cb_over_uql",
    "nd_tmsv_uql", "nd_cr_uql", "nd_cr_tmsv",
]


def sweep_row(t_l, t_r, eta_l, eta_r, n_tot, cutoff):
    s = Scenario(t_l, t_r, eta_l, eta_r)
    cb = bounds.classical_benchmark(s, n_tot)
    uql = bounds.uql_optimal(s, n_tot)
    tmsv = bounds.var_tmsv_direct(s, n_tot / 2)
    cr = pnrd.cr_bound_gamma(pnrd.tmsv_direct_pnrd(s, n_tot / 2, cutoff))
    return (
        t_l, t_r, cb, uql, tmsv, cr,
        _ratio(cb, tmsv), _ratio(cb, uql),
        normalized_difference(tmsv, uql),
        normalized_difference(cr, uql),
        normalized_difference(cr, tmsv),
    )


def sweep_rows(cfg):
    if cfg["grid"] < 2:
        raise UsageError("grid must be >= 2")
    lo, hi = cfg["grid_min"], cfg["grid_max"]
    if not 0 <= lo < hi <= 1:
        raise UsageError("need 0 <= grid_min < grid_max <= 1")
    if not cfg["n_tot"] > 0:
        raise UsageError("n_tot must be positive")
    Scenario(lo, hi, cfg["eta_l"], cfg["eta_r"])  # validates the losses
    axis = np.linspace(lo, hi, cfg["grid"])
    cells = [(float(a), float(b)) for a in axis for b in axis]
    job = partial(
        _sweep_cell, eta_l=cfg["eta_l"], eta_r=cfg["eta_r"], n_tot=cfg["n_tot"], cutoff=cfg["cutoff"]
    )
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(cfg["workers"]) as pool:
            return list(pool.map(job, cells, chunksize=max(1, len(cells) // (4 * cfg["workers"]))))
    return [job(cell) for cell in cells]


def _sweep_cell(cell, eta_l, eta_r, n_tot, cutoff):
    return sweep_row(cell[0], cell[1], eta_l, eta_r, n_tot, cutoff)


def cmd_sweep(cfg) -> int:
    rows = sweep_rows(cfg)
    notes = [
        "grid in row-major order over (t_l, t_r); twin beam uses n = n_tot / 2 per mode",
        NORMALIZATION_NOTE,
    ]
    write_csv(cfg["out"], "sweep", cfg, SWEEP_COLUMNS, rows, notes=notes)
    return EXIT_OK


def _simulation_resources(cfg, probe):
    n_tot = cfg["n_tot"]
    if probe is estimation.Probe.TMSV:
        return n_tot / 2
    ratio = 0.5 if cfg["ratio"] is None else cfg["ratio"]
    b = PhotonBudget.from_ratio(n_tot, ratio)
    if probe is estimation.Probe.FOCK:
        n_l, n_r = round(b.n_l), round(b.n_r)
        if abs(n_l - b.n_l) > 1e-9 or abs(n_r - b.n_r) > 1e-9:
            raise UsageError("Fock probe needs integer N_L = ratio * n_tot and N_R")
        b = PhotonBudget(n_l, n_r)
    return b


def cmd_simulate(cfg) -> int:
    probe = estimation.Probe(cfg["probe"])
    s = _scenario(cfg)
    if cfg["seeds"] < 2 or cfg["nu"] < 1:
        raise UsageError("need seeds >= 2 and nu >= 1")
    resources = _simulation_resources(cfg, probe)
    options = {}
    if probe is estimation.Probe.TMSV:
        options = {"cutoff": cfg["cutoff"], "degenerate": cfg["degenerate"]}
    seeds = range(cfg["seed"], cfg["seed"] + cfg["seeds"])
    rep = estimation.saturation_report(probe, s, resources, cfg["nu"], seeds, cfg["workers"], **options)
    rows = [
        (seed, t_l, t_r, t_l - t_r) for seed, (t_l, t_r) in zip(rep.seeds, rep.estimates)
    ]
    notes = [
        f"rng = {rep.rng}",
        f"gamma_true = {fmt(rep.gamma_true)}",
        f"gamma_hat_mean = {fmt(rep.gamma_hat_mean)}",
        f"bias = {fmt(rep.bias)}",
        f"gamma_hat_var = {fmt(rep.gamma_hat_var)}",
        f"cr_bound_per_nu = {fmt(rep.cr_bound_per_nu)}",
        f"ratio = {fmt(rep.ratio)}",
        f"ratio_stderr = {fmt(rep.ratio_stderr)}",
    ]
    write_csv(cfg["out"], "simulate", cfg, ["seed", "t_l_hat", "t_r_hat", "gamma_hat"], rows, notes)
    return EXIT_OK


def cmd_validate(cfg) -> int:
    results = checks.run_all(print)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if cfg["out"] is not None:
        rows = [(r.name, r.tolerance, r.worst, "pass" if r.passed else "fail", r.seconds) for r in results]
        write_csv(cfg["out"], "validate", cfg, ["check", "tolerance", "worst", "status", "seconds"], rows)
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    "bounds": (cmd_bounds, "variance bounds at one scenario"),
    "ratio": (cmd_ratio, "optimal input ratio against log10 x"),
    "sweep": (cmd_sweep, "bounds over a (T_L, T_R) grid"),
    "simulate": (cmd_simulate, "Monte-Carlo estimation against the Cramer-Rao bound"),
    "validate": (cmd_validate, "run every numerical cross-check"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdsense", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cdsense {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", metavar="FILE", help="flat key = value settings file")
        for opt in COMMAND_OPTIONS[name]:
            kind, default, text = OPTIONS[opt]
            flag = "--" + opt.replace("_", "-")
            extra = {"choices": CHOICES[opt]} if opt in CHOICES else {}
            if default is not None:
                text = f"{text} (default {default})"
            p.add_argument(flag, dest=opt, type=kind, default=None, help=text, **extra)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        return func(resolve(args.command, args))
    except (UsageError, ValueError, CDSenseError, OSError) as exc:
        print(f"cdsense {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
