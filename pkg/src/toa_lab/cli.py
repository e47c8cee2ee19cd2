"""``toa-lab`` command line: figures and limit checks as CSV (and optional SVG).

Exit codes: 0 success, 2 config error, 3 numerical non-convergence,
4 degenerate normalization.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotics as asy
from . import distributions as dist
from . import packet as pk
from .config import ExperimentConfig, load_config, parse_float_list, with_overrides
from .errors import (AliasingError, ConfigError, DegenerateNormalizationError, DomainError,
                     NonConvergenceError)
from .output import format_value, render_svg, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_DEGENERATE = 0, 2, 3, 4

BOUNDED_FLAG = "bounded denominator — no divergence"
DIVERGENT_FLAG = "logarithmic divergence"


def _header(command: str, cfg: ExperimentConfig, plot: str, results: dict) -> list[str]:
    lines = [f"toa-lab {__version__} {command}", f"plot: {plot}"]
    lines += [f"config: {line}" for line in cfg.resolved_lines()]
    for key, value in results.items():
        if isinstance(value, (float, np.floating)):
            value = format_value(value)
        lines.append(f"result: {key} = {value}")
    return lines


def cmd_fig1(cfg: ExperimentConfig) -> str:
    """Π_SC, Π_F, Π_K and Π_QC for every window length on the configured time grid."""
    spec = cfg.packet_spec()
    point = cfg.point_detector()
    qc_detector = cfg.detector_obj()
    t_out = np.linspace(cfg.t_min, cfg.t_max if cfg.t_max is not None else cfg.t_min, cfg.t_n)
    t = cfg.t_grid()
    per_time = 1.0 / cfg.time_unit
    curves = {
        "Pi_SC": dist.pi_semiclassical(t, point, spec) * per_time,
        "Pi_F": dist.pi_flux(t, point, spec) * per_time,
        "Pi_K": dist.pi_kijowski(t, point, spec) * per_time,
    }
    results = {f"peak_{name}": float(t_out[np.argmax(v)]) for name, v in curves.items()}
    if cfg.T_values:
        T = cfg.T_dimensionless()
        denominators = dist.qc_denominators(spec, qc_detector, T, cfg.tol)
        rho = pk.detector_density(t, qc_detector, spec)
        for T_cfg, T_i, n_qc in zip(cfg.T_values, T, denominators):
            if not n_qc > 0:
                raise DegenerateNormalizationError(f"QC window T={T_cfg:g} sees no probability")
            inside = np.abs(t) <= 0.5 * T_i
            curves[f"Pi_QC_T={format(T_cfg, '.6g')}"] = np.where(inside, rho / n_qc, np.nan) * per_time
            results[f"N_QC(T={format(T_cfg, '.6g')})"] = float(n_qc)
    columns = [f"t_{cfg.time_label}"] + list(curves)
    rows = np.column_stack([t_out] + list(curves.values()))
    plot = "x=linear, title=Arrival-time densities"
    return write_csv(_header("fig1", cfg, plot, results), columns, rows)


def cmd_fig2(cfg: ExperimentConfig) -> str:
    """Non-arrival probabilities against the window length / cutoff T."""
    spec = cfg.packet_spec()
    detector = cfg.detector_obj()
    point = cfg.point_detector()
    T = cfg.T_dimensionless()
    p_qc = dist.nonarrival_qc(spec, detector, T, tol=cfg.tol)
    cols = {"P_na_QC": p_qc}
    for kind in dist.KFSC:
        cols[f"P_na_{kind}"] = dist.nonarrival_kfsc(kind, spec, point, T, tol=cfg.tol)
    i_min = int(np.argmin(p_qc))
    results = {"T_min_P_na_QC": float(T[i_min]), "min_P_na_QC": float(p_qc[i_min])}
    rows = np.column_stack([T] + list(cols.values()))
    plot = "x=log, title=Non-arrival probability"
    return write_csv(_header("fig2", cfg, plot, results), ["T_dimensionless"] + list(cols), rows)


def cmd_asymptote(cfg: ExperimentConfig) -> str:
    """N_QC(T) with a ln T fit and the closed-form slope."""
    spec = cfg.packet_spec()
    detector = cfg.detector_obj()
    T = cfg.T_dimensionless()
    if np.log10(T[-1] / T[0]) < 3:
        raise ConfigError("asymptote needs T_values spanning at least 3 decades")
    if cfg.synthetic_slope is not None:
        N = cfg.synthetic_slope * np.log(T) + cfg.synthetic_intercept
    else:
        N = dist.qc_denominators(spec, detector, T, cfg.tol)
    sweep = asy.WindowSweep(T, N)
    predicted = asy.predicted_slope(spec, detector)
    onset = asy.asymptotic_onset(sweep)
    if onset is not None and np.count_nonzero(T >= onset) >= 4:
        fit_range = (onset, T[-1])
    else:
        fit_range = (T[-1] / 10, T[-1])
    fit = asy.fit_log(sweep, fit_range)
    bounded = asy.is_bounded(sweep)
    if predicted == 0.0:
        status = BOUNDED_FLAG
    elif onset is None:
        status = f"{DIVERGENT_FLAG} (asymptotic regime not reached in sweep)"
    else:
        status = DIVERGENT_FLAG
    results = {
        "status": status,
        "fitted_slope": fit.slope,
        "fitted_intercept": fit.intercept,
        "residual_rms": fit.residual_rms,
        "fit_T_min": fit.fit_range[0],
        "fit_T_max": fit.fit_range[1],
        "asymptotic_onset": float(onset) if onset is not None else "none",
        "phi0_squared": pk.zero_momentum_density(spec),
        "predicted_slope": predicted,
        "relative_deviation": abs(fit.slope - predicted) / predicted if predicted > 0 else float("nan"),
        "last_decade_bounded": bounded,
    }
    local = np.concatenate([[np.nan], asy.local_slopes(sweep)])
    rows = np.column_stack([T, N, fit(T), local])
    plot = "x=log, title=Window normalization"
    return write_csv(_header("asymptote", cfg, plot, results),
                     ["T_dimensionless", "N_QC", "N_fit", "local_slope"], rows)


def cmd_sweep(cfg: ExperimentConfig) -> str:
    """P_QC(arrival in [t1, t2]) as the window grows."""
    if cfg.sweep_t1 is None or cfg.sweep_t2 is None:
        raise ConfigError("sweep needs sweep_t1 and sweep_t2")
    if not cfg.sweep_t1 < cfg.sweep_t2:
        raise ConfigError("sweep needs sweep_t1 < sweep_t2")
    if not cfg.T_values:
        raise ConfigError("T_values is empty")
    if cfg.sweep_t2 >= min(cfg.T_values) / 2:
        raise ConfigError(f"sweep_t2 = {cfg.sweep_t2:g} must be below min(T)/2 = {min(cfg.T_values) / 2:g}")
    spec = cfg.packet_spec()
    detector = cfg.detector_obj()
    T = cfg.T_dimensionless()
    prob = dist.qc_arrival_probability(spec, detector, cfg.sweep_t1 / cfg.time_unit,
                                       cfg.sweep_t2 / cfg.time_unit, T, tol=cfg.tol)
    results = {"strictly_decreasing": bool(np.all(np.diff(prob) < 0))}
    rows = np.column_stack([np.asarray(cfg.T_values, dtype=float), prob])
    plot = "x=log, title=Arrival probability in a fixed interval"
    return write_csv(_header("sweep", cfg, plot, results), [f"T_{cfg.time_label}", "P_arrival"], rows)


COMMANDS = {"fig1": cmd_fig1, "fig2": cmd_fig2, "asymptote": cmd_asymptote, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toa-lab",
        description="Time-of-arrival distributions for free Gaussian packets.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True,
                        help="config file, or a bundled preset: fig1, fig2, gaussian, odd_pair")
    parser.add_argument("--csv", help="write the CSV here (default: stdout)")
    parser.add_argument("--svg", help="also render an SVG plot to this path")
    parser.add_argument("--T", dest="T_values", help="comma-separated window lengths / cutoffs")
    parser.add_argument("--delta-l", type=float, help="use an interval detector of this length")
    parser.add_argument("--tol", type=float, help="absolute tolerance for time integrals")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = with_overrides(
            cfg,
            T_values=parse_float_list(args.T_values) if args.T_values else None,
            detector="interval" if args.delta_l is not None else None,
            delta_l=args.delta_l,
            tol=args.tol,
            csv=args.csv,
            svg=args.svg,
        )
        text = COMMANDS[args.command](cfg)
        if cfg.csv:
            Path(cfg.csv).write_text(text)
        else:
            sys.stdout.write(text)
        if cfg.svg:
            Path(cfg.svg).write_text(render_svg(text))
    except (ConfigError, DomainError) as exc:
        print(f"toa-lab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"toa-lab: config error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergenceError, AliasingError) as exc:
        print(f"toa-lab: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except DegenerateNormalizationError as exc:
        print(f"toa-lab: degenerate normalization: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
