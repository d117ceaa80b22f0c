"""Command-line front end.

Subcommands ``series``, ``spectrum``, ``bifurcation``, ``lyapunov`` and
``selftest``, plus presets ``fig1`` .. ``fig8`` for the published parameter
sets.  Settings resolve as defaults < ``--config`` file < command-line flags.
Output is CSV preceded by ``#`` comment lines holding the fully resolved
configuration.  Exit codes: 0 success, 1 invalid configuration, 2 runtime or
I/O failure.
"""

import argparse
import json
import logging
import sys
import time
import warnings
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import classical, config as cfgmod, qmap, selftest, spectra
from .config import RunConfig
from .errors import ConfigError, KerrKLDError

log = logging.getLogger("kerrkld")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

# epsilon, indicator, pulses, and whether a spectrum panel is produced
PRESETS = {
    "fig2": dict(epsilon=0.1, indicator="k1", pulses=10_000, spectrum=False),
    "fig3": dict(epsilon=0.46, indicator="k1", pulses=80_000, spectrum=False),
    "fig4": dict(epsilon=0.7, indicator="k1", pulses=10_000, spectrum=True),
    "fig5": dict(epsilon=0.1, indicator="k2", pulses=10_000, spectrum=True),
    "fig6": dict(epsilon=0.36, indicator="k2", pulses=10_000, spectrum=True),
    "fig7": dict(epsilon=0.46, indicator="k2", pulses=10_000, spectrum=True),
    "fig8": dict(epsilon=0.7, indicator="k2", pulses=10_000, spectrum=True),
}
PRESET_WINDOW = (1500, 10_000)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _header(command, cfg: RunConfig, extra=()):
    lines = [f"# kerrkld {__version__} {command}"]
    for key, value in asdict(cfg).items():
        lines.append(f"# {key} = {_fmt(value) if value is not None else 'none'}")
    lines.extend(f"# {e}" for e in extra)
    return lines


def _write(path, lines):
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_sidecar(cfg: RunConfig, path, summary):
    if not cfg.json or path in (None, "-"):
        return
    doc = {"config": asdict(cfg), "summary": summary}
    Path(str(path) + ".json").write_text(json.dumps(doc, indent=2, default=_fmt) + "\n")


def _compute_series(cfg: RunConfig, params):
    run = qmap.run_indicators(params, [cfg.indicator], q=cfg.q, dense=cfg.dense)
    if run.leaked:
        log.warning(
            "truncation leakage: population above %g in the top Fock levels from pulse %d "
            "(max %.3g); consider a larger dim",
            qmap.LEAKAGE_THRESHOLD,
            run.first_leak,
            run.max_leakage,
        )
    return run


def _leak_lines(run):
    return [f"leakage_max = {_fmt(run.max_leakage)}", f"leakage_first_pulse = {run.first_leak}"]


def run_series(cfg: RunConfig) -> int:
    params = cfgmod.validate_series(cfg)
    run = _compute_series(cfg, params)
    ts = run.series[cfg.indicator]
    lines = _header("series", cfg, _leak_lines(run))
    lines.append(f"n,{cfg.indicator}")
    lines.extend(f"{n},{_fmt(v)}" for n, v in zip(ts.indices, ts.values))
    _write(cfg.output, lines)
    _write_sidecar(cfg, cfg.output, {
        "indicator": cfg.indicator,
        "min": float(ts.values.min()),
        "max": float(ts.values.max()),
        "mean": float(ts.values.mean()),
        "leakage_max": run.max_leakage,
        "leakage_first_pulse": run.first_leak,
    })
    return EXIT_OK


def read_series_file(path) -> spectra.TimeSeries:
    """Read a two-column ``n,value`` file written by ``series``."""
    idx, vals = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split(",")[:2]
            try:
                idx.append(int(a))
                vals.append(float(b))
            except ValueError:
                continue  # column header
    if not idx:
        raise ValueError(f"{path}: no data rows")
    if np.any(np.diff(idx) != 1):
        raise ValueError(f"{path}: pulse numbers are not consecutive")
    return spectra.TimeSeries(np.array(vals), start_index=idx[0])


def _spectrum_lines(cfg, spec, extra=()):
    peaks = spectra.dominant_peaks(spec, 10)
    try:
        conc = spectra.spectral_concentration(spec, min(5, len(spec) - int(spec.remove_mean)))
    except KerrKLDError:
        conc = float("nan")
    lines = _header("spectrum", cfg, extra)
    lines.append("frequency,power")
    lines.extend(f"{_fmt(f)},{_fmt(p)}" for f, p in zip(spec.frequencies, spec.power))
    lines.append("# peak_summary: rank,bin,frequency,power")
    for r, (b, p) in enumerate(peaks, 1):
        lines.append(f"# peak {r},{b},{_fmt(b * spec.bin_width)},{_fmt(p)}")
    lines.append(f"# concentration_k5 = {_fmt(conc)}")
    summary = {
        "peaks": [{"bin": b, "frequency": b * spec.bin_width, "power": p} for b, p in peaks],
        "concentration_k5": conc,
    }
    return lines, summary


def run_spectrum(cfg: RunConfig) -> int:
    params = cfgmod.validate_spectrum(cfg)
    extra = []
    if cfg.input is not None:
        ts = read_series_file(cfg.input)
    else:
        run = _compute_series(cfg, params)
        ts = run.series[cfg.indicator]
        extra = _leak_lines(run)
    try:
        spec = spectra.power_spectrum(
            ts, cfg.window_start, cfg.window_end, cfg.remove_mean, cfg.normalization, cfg.taper
        )
    except ValueError as exc:
        raise ConfigError("window_start", str(exc)) from None
    lines, summary = _spectrum_lines(cfg, spec, extra)
    _write(cfg.output, lines)
    _write_sidecar(cfg, cfg.output, summary)
    return EXIT_OK


def run_bifurcation(cfg: RunConfig) -> int:
    alpha0 = cfgmod.validate_scan(cfg)
    scan = classical.bifurcation_scan(
        cfg.eps_min, cfg.eps_max, cfg.n_eps, cfg.transient, cfg.samples, cfg.chi, cfg.period, alpha0
    )
    lines = _header("bifurcation", cfg)
    lines.append("epsilon,re_alpha,im_alpha")
    lines.extend(
        f"{_fmt(e)},{_fmt(x)},{_fmt(y)}"
        for e, x, y in zip(scan.epsilon, scan.re_alpha, scan.im_alpha)
    )
    _write(cfg.output, lines)
    _write_sidecar(cfg, cfg.output, {"rows": len(scan)})
    return EXIT_OK


def run_lyapunov_sweep(cfg: RunConfig) -> int:
    alpha0 = cfgmod.validate_scan(cfg, lyapunov=True)
    eps = classical.epsilon_grid(cfg.eps_min, cfg.eps_max, cfg.n_eps)
    lam = classical.lyapunov_sweep(eps, cfg.chi, cfg.period, alpha0, cfg.transient, cfg.iterations)
    lines = _header("lyapunov", cfg)
    lines.append("epsilon,exponent,flag")
    n_bad = 0
    for e, v in zip(eps, lam):
        if np.isfinite(v):
            flag = "chaotic" if classical.is_chaotic(v) else "regular"
        else:
            flag = "divergent"
            n_bad += 1
        lines.append(f"{_fmt(e)},{_fmt(v)},{flag}")
    if n_bad:
        log.warning("%d grid point(s) produced a non-finite orbit", n_bad)
    _write(cfg.output, lines)
    _write_sidecar(cfg, cfg.output, {"divergent": n_bad, "rows": int(eps.size)})
    return EXIT_OK


def run_selftest(corrupt=False) -> int:
    t0 = time.perf_counter()
    results = selftest.run_selftest(corrupt=corrupt)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.group:<24} worst={r.worst:.3e} tol={r.tolerance:.1e}")
    print(f"selftest finished in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


def run_preset(name, cfg: RunConfig, explicit: dict) -> int:
    if name == "fig1":
        if cfg.output is None:
            cfg.output = "fig1_bifurcation.csv"
        return run_bifurcation(cfg)
    preset = PRESETS[name]
    for key in ("epsilon", "indicator", "pulses"):
        if key not in explicit:
            setattr(cfg, key, preset[key])
    prefix = cfg.output or name
    series_cfg = replace(cfg, output=f"{prefix}_series.csv")
    status = run_series(series_cfg)
    if status or not preset["spectrum"]:
        return status
    spec_cfg = replace(cfg, output=f"{prefix}_spectrum.csv", input=series_cfg.output)
    if "window_start" not in explicit:
        spec_cfg.window_start = PRESET_WINDOW[0]
    if "window_end" not in explicit:
        spec_cfg.window_end = min(PRESET_WINDOW[1], cfg.pulses)
    return run_spectrum(spec_cfg)


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="flat key=value configuration file")
    for key in cfgmod.KEYS:
        names = [f"--{key}"]
        if "_" in key:
            names.append(f"--{key.replace('_', '-')}")
        g.add_argument(*names, dest=key, default=None, metavar=key.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kerrkld", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "series": "indicator time series (n, value)",
        "spectrum": "power spectrum of an indicator series",
        "bifurcation": "classical bifurcation scan",
        "lyapunov": "classical Lyapunov exponent sweep",
    }
    for name, text in helps.items():
        _add_config_flags(sub.add_parser(name, help=text))
    st = sub.add_parser("selftest", help="run the fast invariant suite")
    st.add_argument("--corrupt-tolerance", action="store_true", help=argparse.SUPPRESS)
    _add_config_flags(sub.add_parser("fig1", help="preset: bifurcation diagram"))
    for name, pr in PRESETS.items():
        _add_config_flags(sub.add_parser(
            name, help=f"preset: {pr['indicator']} at epsilon={pr['epsilon']}"
        ))
    return parser


def resolve_config(args) -> tuple:
    file_layer = cfgmod.read_config_file(args.config) if args.config else {}
    flag_layer = {
        key: cfgmod.convert(key, getattr(args, key))
        for key in cfgmod.KEYS
        if getattr(args, key, None) is not None
    }
    explicit = {**file_layer, **flag_layer}
    return cfgmod.resolve(file_layer, flag_layer), explicit


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "selftest":
        return run_selftest(corrupt=args.corrupt_tolerance)
    try:
        cfg, explicit = resolve_config(args)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot read configuration: %s", exc)
        return EXIT_RUNTIME
    handlers = {
        "series": run_series,
        "spectrum": run_spectrum,
        "bifurcation": run_bifurcation,
        "lyapunov": run_lyapunov_sweep,
    }
    try:
        with warnings.catch_warnings():
            # leakage is reported through the logger instead
            warnings.simplefilter("ignore", qmap.LeakageWarning)
            if args.command in handlers:
                return handlers[args.command](cfg)
            return run_preset(args.command, cfg, explicit)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except (OSError, KerrKLDError, ValueError, ArithmeticError) as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
