"""Command-line interface: ``vpl simulate|fit|compare|analyze``.

Exit codes: 0 success, 1 usage or configuration error, 2 input data error,
3 numerical failure (degenerate fit). On any failure the files the command
had started writing are removed.

Examples::

    vpl simulate --speed-kmh 70 --eta1 41.51 --eta2 9.92 --sigma-db 0 --seed 1 --out in70.csv
    vpl fit --in in70.csv --out in70_fit.json
    vpl compare --in in70.csv --weights 0.1,0.9 --out in70_gof.json
    vpl analyze --table2 --out table2.json
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import crossing, plotting, report, traceio
from .crossing import KMH, ScenarioConfig
from .estimation import Direction, FitError, fit_all
from .gof import GofWeights, rank_models
from .propagation import (
    LITERATURE_PARAMS,
    MODEL_FAMILIES,
    AbgParams,
    CiParams,
    FiParams,
    ProposedParams,
    ThreeGppParams,
    eval_median,
)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _pair(text):
    return _floats(text, 2)


def _positive(args, *names):
    for name in names:
        value = getattr(args, name)
        if value is not None and not (np.isfinite(value) and value > 0):
            raise ConfigError(f"--{name.replace('_', '-')} must be > 0, got {value}")


# ---------------------------------------------------------------- simulate

def _generator(args, away: bool = False):
    sfx = "_away" if away else ""
    sigma = getattr(args, "sigma_db" + sfx)
    if sigma is not None and sigma < 0:
        raise ConfigError(f"--sigma-db{sfx.replace('_', '-')} must be >= 0, got {sigma}")
    model = args.model
    if model == "proposed":
        eta1 = getattr(args, "eta1" + sfx)
        eta2 = getattr(args, "eta2" + sfx)
        if away and eta1 is None and eta2 is None and sigma is None:
            return None
        base = crossing.TABLE2[(Direction.MOVING_AWAY if away else Direction.MOVING_IN, 50)]
        return ProposedParams(base.eta1_db if eta1 is None else eta1,
                              base.eta2 if eta2 is None else eta2,
                              6.0 if sigma is None else sigma)
    if away:
        if any(getattr(args, n) is not None for n in ("eta1_away", "eta2_away", "sigma_db_away")):
            raise ConfigError("--*-away flags apply to --model proposed only")
        return None
    if model == "fi":
        if args.alpha is None or args.beta is None:
            raise ConfigError("--model fi needs --alpha (intercept dB) and --beta (exponent)")
        return FiParams(args.alpha, args.beta, 0.0 if sigma is None else sigma)
    if model == "ci":
        lit = LITERATURE_PARAMS["ci"]
        return CiParams(lit.beta if args.beta is None else args.beta,
                        lit.sigma_db if sigma is None else sigma)
    if model == "abg":
        lit = LITERATURE_PARAMS["abg"]
        return AbgParams(lit.alpha if args.alpha is None else args.alpha,
                         lit.beta_db if args.beta is None else args.beta,
                         args.gamma,
                         lit.sigma_db if sigma is None else sigma)
    return ThreeGppParams(3.0 if sigma is None else sigma)


def cmd_simulate(args, out: report.Outputs) -> None:
    _positive(args, "speed_kmh", "separation_m", "interval_ms", "freq_ghz", "depart_m")
    if args.lateral_offset_m < 0:
        raise ConfigError(f"--lateral-offset-m must be >= 0, got {args.lateral_offset_m}")
    try:
        cfg = ScenarioConfig(
            generator=_generator(args),
            generator_away=_generator(args, away=True),
            seed=args.seed,
            initial_separation_m=args.separation_m,
            relative_speed_mps=args.speed_kmh * KMH,
            lateral_offset_m=args.lateral_offset_m,
            sample_interval_s=args.interval_ms / 1000.0,
            frequency_ghz=args.freq_ghz,
            depart_m=args.depart_m,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    trace = crossing.simulate_crossing(cfg)
    out.write_text(args.out, traceio.format_trace(trace))
    log.info("wrote %d samples (%d below 1 m) to %s",
             len(trace), int(trace.below_reference.sum()), args.out)


# ---------------------------------------------------------------- fit / compare

def _load_halves(args):
    try:
        ct = traceio.read_trace(args.inp, None if args.speed_kmh is None else args.speed_kmh * KMH,
                                args.freq_ghz)
    except (traceio.TraceFormatError, UnicodeDecodeError) as exc:
        raise DataError(str(exc)) from None
    except ValueError as exc:
        raise DataError(f"{args.inp}: {exc}") from None
    s = ct.signed_distance_m
    if (s < 0).any() and (s >= 0).any():
        return list(crossing.split_at_rendezvous(ct))
    return [crossing.one_sided(ct)]


def _families(text: str) -> list[str]:
    if text == "all":
        return list(MODEL_FAMILIES)
    fams = [f.strip().lower() for f in text.split(",")]
    bad = [f for f in fams if f not in MODEL_FAMILIES]
    if bad:
        raise ConfigError(f"--model: unknown families {bad}; choose from {','.join(MODEL_FAMILIES)}")
    return fams


def _run_config(args, drop=("out", "inp", "func", "verbose", "no_figures")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in drop}


def _fit_like(args, out: report.Outputs, with_gof: bool) -> None:
    _positive(args, "speed_kmh", "freq_ghz")
    families = _families(args.model)
    weights = None
    if with_gof:
        try:
            weights = GofWeights(*args.weights)
        except ValueError as exc:
            raise ConfigError(f"--weights: {exc}") from None
    halves = _load_halves(args)
    blocks, panels = [], []
    for trace in halves:
        if not trace.fit_mask().any():
            raise DataError(f"{args.inp}: no {trace.direction.value} samples at d >= 1 m")
        fits = fit_all(trace, families, gamma_fixed=args.gamma)
        gof = None
        if with_gof:
            try:
                gof = rank_models(fits, trace, weights)
            except ValueError as exc:
                raise FitError(f"GoF evaluation failed: {exc}") from None
        blocks.append(report.scenario_block(trace, fits, gof))
        panels.append((trace, fits))
    rep = {
        "report": "compare" if with_gof else "fit",
        "provenance": report.provenance(_run_config(args), args.seed, [args.inp]),
        "scenarios": blocks,
    }
    if with_gof:
        rep["provenance"]["weights"] = {"alpha": weights.alpha, "beta": weights.beta}
    _write_report(out, args.out, rep)
    if not args.no_figures:
        plotting.plot_fits(panels, out.claim(Path(args.out).with_suffix(".png")))


def _write_report(out: report.Outputs, path, rep: dict) -> None:
    out.write_text(path, report.dumps(rep))
    out.write_text(Path(path).with_suffix(".txt"), report.render_text(rep))


def cmd_fit(args, out):
    _fit_like(args, out, with_gof=False)


def cmd_compare(args, out):
    _fit_like(args, out, with_gof=True)


# ---------------------------------------------------------------- analyze

def _collect_params(args) -> tuple[dict, dict]:
    """Proposed params and measured spans keyed by (direction, speed km/h)."""
    params, spans = {}, {}
    if args.table2:
        for (direction, kmh), p in crossing.TABLE2.items():
            params[(direction, kmh)] = p
    for path in args.inp or []:
        try:
            entries = report.proposed_entries(report.load(path))
        except (OSError, report.ReportFormatError, KeyError, ValueError) as exc:
            raise DataError(f"{path}: {exc}") from None
        for direction, v, p, span in entries:
            key = (direction, int(round(v * 3.6)))
            params[key] = p
            if span is not None:
                spans[key] = tuple(span)
    if args.eta1 is not None or args.eta2 is not None:
        if args.eta1 is None or args.eta2 is None:
            raise ConfigError("--eta1 and --eta2 must be given together as IN,AWAY")
        sig = args.sigma_db or [0.0, 0.0]
        kmh = int(round(args.speed_kmh if args.speed_kmh is not None else 70))
        try:
            for i, direction in enumerate((Direction.MOVING_IN, Direction.MOVING_AWAY)):
                params[(direction, kmh)] = ProposedParams(args.eta1[i], args.eta2[i], sig[i])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    for flag, direction in (("span_in", Direction.MOVING_IN), ("span_away", Direction.MOVING_AWAY)):
        span = getattr(args, flag)
        if span is not None:
            for (dr, kmh) in list(params):
                if dr is direction:
                    spans[(dr, kmh)] = tuple(span)
    return params, spans


def cmd_analyze(args, out: report.Outputs) -> None:
    _positive(args, "freq_ghz", "speed_kmh")
    if not (1.0 <= args.d_lo < args.d_hi):
        raise ConfigError(f"need 1 <= --d-lo < --d-hi, got [{args.d_lo}, {args.d_hi}]")
    if args.grid_points < 2:
        raise ConfigError("--grid-points must be >= 2")
    params, spans = _collect_params(args)
    speeds = sorted({k for (_, k) in params})
    paired = [k for k in speeds
              if (Direction.MOVING_IN, k) in params and (Direction.MOVING_AWAY, k) in params]
    if not paired:
        raise DataError("no speed has Proposed parameters for both moving_in and moving_away")

    stem = Path(args.out).with_suffix("")
    grid = np.linspace(args.d_lo, args.d_hi, args.grid_points)
    analyses, curves = [], []
    for kmh in paired:
        p_in = params[(Direction.MOVING_IN, kmh)]
        p_away = params[(Direction.MOVING_AWAY, kmh)]
        a = crossing.analyze(p_in, p_away, args.d_lo, args.d_hi)
        plot_files, series = {}, {}
        for direction, p in ((Direction.MOVING_IN, p_in), (Direction.MOVING_AWAY, p_away)):
            pl = eval_median(p, args.freq_ghz, grid)
            span = spans.get((direction, kmh))
            extra = (np.zeros(grid.size, bool) if span is None
                     else (grid < span[0]) | (grid > span[1]))
            name = f"{stem.name}_{direction.value}_{kmh}kmh.csv"
            rows = ["distance_m,pl_db,extrapolated"] + [
                f"{d!r},{v!r},{int(e)}" for d, v, e in zip(grid.tolist(), pl.tolist(), extra.tolist())]
            out.write_text(stem.parent / name, "\n".join(rows) + "\n")
            plot_files[direction.value] = name
            series[direction.value] = (grid, pl, extra)
        analyses.append({
            "speed_kmh": kmh,
            "moving_in": report.params_to_dict(p_in),
            "moving_away": report.params_to_dict(p_away),
            "crossover_distance_m": a.crossover_distance_m,
            "extrapolated": a.extrapolated,
            "note": a.note,
            "max_delta_pl_db": a.max_delta_pl_db,
            "interval": list(a.interval),
            "plot_data": plot_files,
        })
        curves.append({"speed_kmh": kmh, "crossover_m": a.crossover_distance_m, "series": series})

    averages = {}
    for direction in Direction:
        ks = sorted(k for (dr, k) in params if dr is direction)
        if len(ks) == 2:
            m = crossing.average_model(params[(direction, ks[0])], params[(direction, ks[1])])
            averages[direction.value] = {"speeds_kmh": ks, **report.params_to_dict(m)}
        elif len(ks) > 2:
            log.warning("%s: %d speeds present; average model needs exactly two",
                        direction.value, len(ks))

    rep = {
        "report": "analyze",
        "provenance": report.provenance(_run_config(args), args.seed, args.inp or []),
        "analyses": analyses,
        "average_models": averages,
    }
    _write_report(out, args.out, rep)
    if not args.no_figures:
        plotting.plot_crossing(curves, out.claim(Path(args.out).with_suffix(".png")))


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vpl", description="mmWave V2V crossing-cars path-loss toolkit",
                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="synthesize a crossing trace CSV",
                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sim.add_argument("--speed-kmh", type=float, default=50.0, help="relative speed")
    sim.add_argument("--separation-m", type=float, default=35.0, help="initial Tx-Rx separation")
    sim.add_argument("--depart-m", type=float, default=None,
                     help="departing span if different from --separation-m")
    sim.add_argument("--lateral-offset-m", type=float, default=0.0, help="lane offset")
    sim.add_argument("--interval-ms", type=float, default=5.0, help="sampling interval")
    sim.add_argument("--freq-ghz", type=float, default=59.6, help="carrier frequency")
    sim.add_argument("--model", choices=MODEL_FAMILIES, default="proposed",
                     help="generating model family")
    sim.add_argument("--eta1", type=float, help="proposed constant term (dB)")
    sim.add_argument("--eta2", type=float, help="proposed log-distance coefficient")
    sim.add_argument("--sigma-db", type=float, help="shadowing std (dB)")
    sim.add_argument("--eta1-away", type=float, help="eta1 for the departing half")
    sim.add_argument("--eta2-away", type=float, help="eta2 for the departing half")
    sim.add_argument("--sigma-db-away", type=float, help="sigma for the departing half")
    sim.add_argument("--alpha", type=float, help="FI intercept (dB) or ABG distance exponent")
    sim.add_argument("--beta", type=float, help="FI/CI exponent or ABG intercept (dB)")
    sim.add_argument("--gamma", type=float, default=2.0, help="ABG frequency exponent")
    sim.add_argument("--seed", type=int, required=True, help="random seed (mandatory)")
    sim.add_argument("--out", required=True, help="output trace CSV")
    sim.set_defaults(func=cmd_simulate)

    for name, func, helptext in (("fit", cmd_fit, "fit path-loss models to a trace"),
                                 ("compare", cmd_compare, "fit and rank models by GoF")):
        p = sub.add_parser(name, help=helptext,
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.add_argument("--in", dest="inp", required=True, help="trace CSV")
        p.add_argument("--out", required=True, help="report JSON (.txt and .png written alongside)")
        p.add_argument("--model", default="all", help="comma list of families, or 'all'")
        p.add_argument("--gamma", type=float, default=2.0, help="pinned ABG frequency exponent")
        p.add_argument("--speed-kmh", type=float, default=None,
                       help="relative speed; inferred from the trace when omitted")
        p.add_argument("--freq-ghz", type=float, default=59.6, help="carrier frequency")
        if name == "compare":
            p.add_argument("--weights", type=_pair, default=[0.1, 0.9],
                           help="similarity,MAPE weights")
        p.add_argument("--seed", type=int, default=None, help="recorded in provenance only")
        p.add_argument("--no-figures", action="store_true", help="skip the PNG figure")
        p.set_defaults(func=func)

    an = sub.add_parser("analyze", help="moving-in vs moving-away comparison",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    an.add_argument("--in", dest="inp", action="append",
                    help="fit/compare report JSON (repeatable)")
    an.add_argument("--table2", action="store_true",
                    help="include the published proposed-model parameters")
    an.add_argument("--eta1", type=_pair, help="IN,AWAY constant terms")
    an.add_argument("--eta2", type=_pair, help="IN,AWAY log-distance coefficients")
    an.add_argument("--sigma-db", type=_pair, help="IN,AWAY shadowing std")
    an.add_argument("--speed-kmh", type=float, default=None,
                    help="speed label for --eta1/--eta2 (default 70)")
    an.add_argument("--d-lo", type=float, default=1.0, help="gap interval start (m)")
    an.add_argument("--d-hi", type=float, default=30.0, help="gap interval end (m)")
    an.add_argument("--span-in", type=_pair, help="measured moving-in span LO,HI (m)")
    an.add_argument("--span-away", type=_pair, help="measured moving-away span LO,HI (m)")
    an.add_argument("--grid-points", type=int, default=300, help="plot-data resolution")
    an.add_argument("--freq-ghz", type=float, default=59.6, help="carrier frequency")
    an.add_argument("--seed", type=int, default=None, help="recorded in provenance only")
    an.add_argument("--out", required=True, help="analysis JSON")
    an.add_argument("--no-figures", action="store_true", help="skip the PNG figure")
    an.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        with report.output_set() as out:
            args.func(args, out)
    except ConfigError as exc:
        print(f"vpl {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"vpl {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FitError as exc:
        print(f"vpl {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"vpl {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
