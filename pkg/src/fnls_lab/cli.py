"""Command-line driver: ``fnls-lab <subcommand> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Flags may also come from ``--config run.json`` whose keys mirror the flag
names (dashes or underscores); explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, SimConfig
from .dynamics import NumericalFailure
from .parallel import THREADS_ENV, worker_count

log = logging.getLogger("fnls_lab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
LEMMA_CHECKS = ("zeros", "orthonormality", "counting", "weak", "product-norms", "convtail")


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


# (flag, type, default, help) per subcommand; defaults are applied after the config merge
COMMON = [
    ("config", str, None, "JSON file with flag values"),
    ("out", str, None, "output CSV path"),
    ("output-dir", str, ".", "directory for outputs with relative paths"),
    ("workers", int, 1, f"worker processes (overridden by {THREADS_ENV})"),
]
SIM_FLAGS = [
    ("alpha", float, 1.0, "fractional power in (0, 1]"),
    ("s", float, 0.9, "data regularity"),
    ("n-max", int, 32, "retained modes"),
    ("quad-order", int, None, "radial quadrature nodes (default 4*n_max)"),
    ("dt", float, 1e-4, "time step"),
    ("seed", int, 0, "random seed"),
    ("init", str, "random_hs", "random_hs | single_mode | coefficients"),
    ("init-mode", int, 1, "mode for init=single_mode"),
    ("init-file", str, None, "coefficients (.npy or JSON pairs) for init=coefficients"),
    ("amplitude", float, 1.0, "H^s norm (random_hs) or coefficient (single_mode)"),
    ("nonlinear", str, "midpoint", "cubic substep: midpoint | phase"),
    ("epsilon", float, 1e-3, "epsilon for +/- exponents"),
    ("b", float, 0.55, "Bourgain-space exponent b"),
]
SUBCOMMANDS = {
    "simulate": SIM_FLAGS
    + [
        ("t-end", float, 1.0, "final time"),
        ("record-every", int, 100, "steps between diagnostics rows"),
        ("N", float, None, "cutoff for the modified-energy column"),
        ("svg", str, None, "optional drift plot"),
    ],
    "imethod": SIM_FLAGS
    + [
        ("N-list", _floats, "8,16,32,64", "comma-separated cutoffs"),
        ("windows", int, 8, "windows per cutoff"),
    ],
    "lemmas": [
        ("check", str, None, "|".join(LEMMA_CHECKS)),
        ("n-max", int, 1000, "zeros: table size; orthonormality: modes"),
        ("quad-order", int, None, "orthonormality: quadrature nodes (default 8*n_max)"),
        ("alpha-list", _floats, "0.5,0.75,1.0", "counting: powers"),
        ("N1-list", _floats, "64,128,256", "counting: high blocks"),
        ("N2-list", _floats, "8,16,32", "counting: low blocks"),
        ("tau-resolution", float, 0.25, "counting: sweep spacing"),
        ("full", bool, False, "counting: write every tau of the sweep"),
        ("n0-max", int, 512, "weak: largest n0 (scan 32, 64, ..., n0-max)"),
        ("symmetric", bool, False, "weak: symmetric variant"),
        ("n-list", _ints, "8,16,32,64,128,256", "product-norms: modes"),
        ("p-list", _floats, "3,4,6", "product-norms: exponents"),
        ("gamma", float, 1.1, "convtail: decay exponent"),
        ("separations", _floats, "10,30,100,300,1000,3000,10000", "convtail: |k1-k2| values"),
    ],
    "bilinear": [
        ("alpha", float, 1.0, "fractional power"),
        ("N1", float, 32.0, "high-frequency block"),
        ("N2-list", _floats, "2,4,8,16,32", "dyadic low blocks"),
        ("seeds", int, 20, "seeds per point"),
        ("seed", int, 0, "first seed"),
        ("derivative", bool, False, "apply sqrt(-Delta) to the high-frequency factor"),
    ],
    "thresholds": [
        ("alpha-min", float, 0.67, "grid start"),
        ("alpha-max", float, 1.0, "grid end"),
        ("steps", int, 100, "grid intervals (rows = steps + 1)"),
        ("epsilon", float, 0.0, "epsilon in the growth exponent"),
        ("svg", str, None, "optional curve plot"),
    ],
}
DEFAULT_OUT = {
    "simulate": "diagnostics.csv",
    "imethod": "increments.csv",
    "bilinear": "bilinear.csv",
    "thresholds": "thresholds.csv",
}


def _dest(flag):
    return flag.replace("-", "_")


def build_parser():
    parser = argparse.ArgumentParser(prog="fnls-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")
    for name, flags in SUBCOMMANDS.items():
        p = sub.add_parser(name)
        for flag, typ, default, help_ in COMMON + flags:
            shown = "" if default is None else f" (default {default})"
            if typ is bool:
                p.add_argument(f"--{flag}", dest=_dest(flag), action="store_const", const=True, default=None, help=help_)
            else:
                p.add_argument(f"--{flag}", dest=_dest(flag), type=typ, default=None, help=help_ + shown)
    return parser


def resolve(args):
    """Merge explicit flags over ``--config`` values over defaults."""
    flags = COMMON + SUBCOMMANDS[args.command]
    spec = {_dest(f): (t, d) for f, t, d, _ in flags}
    from_file = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        from_file = {_dest(k): v for k, v in raw.items()}
        unknown = sorted(set(from_file) - set(spec) - {"command"})
        if unknown:
            raise ConfigError(f"unknown config keys for {args.command}: {unknown}")
    out = {}
    for key, (typ, default) in spec.items():
        val = getattr(args, key)
        if val is None and key in from_file:
            val = from_file[key]
            if typ in (_floats, _ints) and isinstance(val, list):
                val = [float(x) if typ is _floats else int(x) for x in val]
            elif val is not None and typ not in (bool, str):
                try:
                    val = typ(val)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"bad value for {key}: {val!r}") from exc
        if val is None:
            val = typ(default) if typ in (_floats, _ints) and default is not None else default
        out[key] = val
    out.pop("config")
    out["workers"] = worker_count(out["workers"])
    return out


# ---------------------------------------------------------------- output


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def atomic_write(path, text):
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_csv(path, columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    atomic_write(path, buf.getvalue())


def write_manifest(csv_path, command, params, extra=None):
    data = {
        "tool": "fnls_lab",
        "version": __version__,
        "command": command,
        "seed": params.get("seed"),
        "config": {k: v for k, v in sorted(params.items()) if k not in ("workers", "output_dir", "out")},
        "output": Path(csv_path).name,
    }
    if extra:
        data["results"] = extra
    path = Path(csv_path).with_suffix(".manifest.json")
    atomic_write(path, json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _out_path(params, default):
    p = Path(params["out"] or default)
    return p if p.is_absolute() else Path(params["output_dir"]) / p


# ------------------------------------------------------------ subcommands


def _sim_config(params, **extra):
    keys = {
        "alpha", "s", "n_max", "quad_order", "dt", "seed", "init", "init_mode",
        "init_file", "amplitude", "nonlinear", "epsilon", "b",
    }
    data = {k: params[k] for k in keys}
    data.update(extra)
    return SimConfig.from_dict(data)


def cmd_simulate(params):
    from .basis import build_basis
    from .dynamics import DiagnosticsRecord, simulate
    from .imethod import MultiplierParams, modified_energy

    cfg = _sim_config(params, t_end=params["t_end"], record_every=params["record_every"])
    params["quad_order"] = cfg.quad_order
    basis = build_basis(cfg.n_max, cfg.quad_order)
    modified = None
    if params["N"] is not None:
        mp = MultiplierParams(params["N"], cfg.s, cfg.alpha)
        modified = lambda f: modified_energy(f, mp, basis)  # noqa: E731
    records = simulate(cfg, basis, modified)
    out = _out_path(params, DEFAULT_OUT["simulate"])
    write_csv(out, DiagnosticsRecord.COLUMNS, [r.row() for r in records])
    m0, e0 = records[0].mass, records[0].energy
    summary = {
        "mass_drift": abs(records[-1].mass - m0) / m0 if m0 else 0.0,
        "energy_drift": abs(records[-1].energy - e0) / abs(e0) if e0 else 0.0,
        "t_final": records[-1].t,
    }
    write_manifest(out, "simulate", params, summary)
    if params["svg"]:
        _drift_svg(records, params["svg"])
    print(
        f"simulate: {len(records)} rows -> {out}; mass drift {summary['mass_drift']:.3e}, "
        f"energy drift {summary['energy_drift']:.3e}"
    )


def _drift_svg(records, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = [r.t for r in records]
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in ("mass", "energy"):
        v = np.array([getattr(r, name) for r in records])
        ax.semilogy(t, np.abs(v - v[0]) / abs(v[0]) + 1e-18, label=f"relative {name} drift")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_imethod(params):
    from .basis import build_basis
    from .estimates import loglog_slope
    from .imethod import IncrementRecord, increment_experiment, max_increment

    N_list = params["N_list"]
    n_need = params["n_max"]
    cfg = _sim_config(params, windows=params["windows"], N_list=N_list, t_end=0.0)
    params["quad_order"] = cfg.quad_order
    basis = build_basis(cfg.n_max, cfg.quad_order)
    records = increment_experiment(cfg, basis, N_list, workers=params["workers"])
    out = _out_path(params, DEFAULT_OUT["imethod"])
    write_csv(out, IncrementRecord.COLUMNS, [r.row() for r in records])
    peaks = [max_increment(records, N) for N in N_list]
    slope = loglog_slope(N_list, peaks) if len(N_list) > 1 else None
    write_manifest(out, "imethod", params, {"max_increment": dict(zip(map(str, N_list), peaks)), "slope": slope})
    tail = f"; log-log slope {slope:.3f}" if slope is not None else ""
    print(f"imethod: {len(records)} windows over N={N_list} (n_max={n_need}) -> {out}{tail}")


def cmd_lemmas(params):
    check = params["check"]
    if check not in LEMMA_CHECKS:
        raise ConfigError(f"--check must be one of {LEMMA_CHECKS}")
    out = _out_path(params, f"{check.replace('-', '_')}.csv")
    columns, rows, summary = _LEMMAS[check](params)
    write_csv(out, columns, rows)
    write_manifest(out, f"lemmas/{check}", params, summary)
    print(f"lemmas {check}: {len(rows)} rows -> {out}; " + ", ".join(f"{k}={_fmt(v)}" for k, v in summary.items()))


def _lemma_zeros(params):
    from .special_fn import BesselZeroTable, mcmahon

    table = BesselZeroTable.build(params["n_max"])
    n = np.arange(1, table.n_max + 1)
    approx = mcmahon(n)
    beta = (n - 0.25) * np.pi
    two_term = beta + 1.0 / (8.0 * beta)
    rows = list(zip(n, table.z, approx, table.z - two_term))
    bound_ok = bool(np.all(np.abs(table.z - two_term) <= 0.5 / n**3))
    return ("n", "z", "mcmahon", "two_term_residual"), rows, {"n_max": table.n_max, "two_term_bound": bound_ok}


def _lemma_orthonormality(params):
    from .basis import build_basis

    n = params["n_max"]
    q = params["quad_order"] or 8 * n
    dev = build_basis(n, q, check=False).gram_deviation()
    return ("n_max", "quad_order", "gram_deviation"), [(n, q, dev)], {"gram_deviation": dev}


def _counting_task(args):
    from .estimates import counting_scan

    alpha, N1, N2, zeros, res, full = args
    scan, taus, counts = counting_scan(alpha, N1, N2, zeros, res, return_counts=True)
    if full:
        rows = [(alpha, N1, N2, t, c) for t, c in zip(taus, counts)]
    else:
        rows = [(alpha, N1, N2, scan.tau_at_max, scan.max_count)]
    return scan, rows


def _lemma_counting(params):
    from .parallel import ordered_map
    from .special_fn import BesselZeroTable

    top = 2 * max(params["N1_list"] + params["N2_list"])
    n_zeros = int(top / np.pi) + 4
    zeros = BesselZeroTable.build(n_zeros)
    tasks = [
        (a, N1, N2, zeros, params["tau_resolution"], params["full"])
        for a in params["alpha_list"]
        for N1 in params["N1_list"]
        for N2 in params["N2_list"]
        if N2 <= N1
    ]
    results = ordered_map(_counting_task, tasks, params["workers"])
    rows = [r for _, rs in results for r in rs]
    summary = {
        "max_ratio": max(s.ratio for s, _ in results),
        "max_fiber": max(s.fiber_max for s, _ in results),
    }
    return ("alpha", "N1", "N2", "tau", "count"), rows, summary


def _lemma_weak(params):
    from .basis import build_basis
    from .estimates import WeakInteraction, loglog_slope, weak_interaction_scan

    n0_max = params["n0_max"]
    n0_list = [32 * 2**k for k in range(20) if 32 * 2**k <= n0_max]
    if not n0_list:
        raise ConfigError("--n0-max must be >= 32")
    basis = build_basis(n0_max, 4 * n0_max)
    rows = weak_interaction_scan(n0_list, basis, symmetric=params["symmetric"])
    slope = loglog_slope([r.n0 for r in rows], [r.ratio for r in rows]) if len(rows) > 1 else None
    return WeakInteraction.COLUMNS, [r.row() for r in rows], {"slope": slope}


def _lemma_product_norms(params):
    from .basis import build_basis
    from .estimates import ProductNorm, product_norm_scan

    n_list = params["n_list"]
    basis = build_basis(max(n_list), 4 * max(n_list))
    rows = product_norm_scan(n_list, params["p_list"], basis)
    return ProductNorm.COLUMNS, [r.row() for r in rows], {"max_ratio": max(r.ratio for r in rows)}


def _lemma_convtail(params):
    from .estimates import convolution_tail_scan

    g = params["gamma"]
    pairs = convolution_tail_scan(g, params["separations"])
    rows = [(g, 0.0, d, r) for d, r in pairs]
    ratios = [r for _, r in pairs]
    summary = {
        "max_ratio": max(ratios),
        "nonincreasing": all(b <= a * 1.05 for a, b in zip(ratios, ratios[1:])),
    }
    return ("gamma", "k1", "k2", "ratio"), rows, summary


_LEMMAS = {
    "zeros": _lemma_zeros,
    "orthonormality": _lemma_orthonormality,
    "counting": _lemma_counting,
    "weak": _lemma_weak,
    "product-norms": _lemma_product_norms,
    "convtail": _lemma_convtail,
}


def bilinear_basis(N1):
    """Smallest basis holding the block ``[N1, 2 N1]``."""
    from .basis import build_basis
    from .special_fn import BesselZeroTable

    probe = BesselZeroTable.build(int(2 * N1 / np.pi) + 4)
    n_max = int(np.count_nonzero(probe.z <= 2 * N1)) + 1
    return build_basis(n_max, 4 * n_max)


def cmd_bilinear(params):
    from .estimates import BilinearSample, bilinear_exponent_fit

    basis = bilinear_basis(params["N1"])
    fit = bilinear_exponent_fit(
        params["alpha"],
        params["N1"],
        params["N2_list"],
        basis,
        samples_per_point=params["seeds"],
        seed=params["seed"],
        derivative=params["derivative"],
        workers=params["workers"],
    )
    out = _out_path(params, DEFAULT_OUT["bilinear"])
    write_csv(out, BilinearSample.COLUMNS, [s.row() for s in fit.samples])
    write_manifest(out, "bilinear", params, {"slope": fit.slope, "mean_slope": fit.mean_slope})
    print(f"bilinear: {len(fit.samples)} samples -> {out}; worst-case slope {fit.slope:.4f}, mean slope {fit.mean_slope:.4f}")


def cmd_thresholds(params):
    from . import thresholds as th

    grid = th.alpha_grid(params["alpha_min"], params["alpha_max"], params["steps"])
    rows = th.threshold_curve(grid)
    out = _out_path(params, DEFAULT_OUT["thresholds"])
    write_csv(out, th.CSV_COLUMNS, [r.row() for r in rows])
    inside = [r for r in rows if r.in_theory]
    summary = {
        "rows": len(rows),
        "s_star_below_alpha": all(r.s_star < r.alpha for r in inside),
        "s_star_at_alpha_max": rows[-1].s_star,
    }
    write_manifest(out, "thresholds", params, summary)
    if params["svg"]:
        th.write_svg(rows, params["svg"])
    print(f"thresholds: {len(rows)} rows -> {out}; s_*({rows[-1].alpha:g}) = {rows[-1].s_star:.10f}")


COMMANDS = {
    "simulate": cmd_simulate,
    "imethod": cmd_imethod,
    "lemmas": cmd_lemmas,
    "bilinear": cmd_bilinear,
    "thresholds": cmd_thresholds,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        params = resolve(args)
        COMMANDS[args.command](params)
    except NumericalFailure as exc:
        print(f"error: numerical failure, last good t={exc.t_last_good:.6g}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
