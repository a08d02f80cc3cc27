"""Structured reports: JSON for machines, fixed-width text for people.

Every report carries a provenance block (package version, seed, a SHA-256
of the canonical run configuration and of each input file) and contains no
timestamps or absolute paths, so identical runs produce identical bytes.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .estimation import Direction, FitResult, Trace
from .gof import GofReport
from .propagation import (
    AbgParams,
    CiParams,
    FiParams,
    ModelParams,
    ProposedParams,
    ThreeGppParams,
)

PARAM_TYPES = {cls.family: cls for cls in
               (FiParams, CiParams, AbgParams, ThreeGppParams, ProposedParams)}
LABELS = {"fi": "FI", "ci": "CI", "abg": "ABG", "3gpp": "3GPP", "proposed": "Proposed"}


class ReportFormatError(ValueError):
    """Report file missing required content."""


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def provenance(config: dict, seed=None, inputs: Iterable = ()) -> dict:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return {
        "version": __version__,
        "seed": seed,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "config": config,
        "inputs": [{"name": Path(p).name, "sha256": sha256_file(p)} for p in inputs],
    }


def params_to_dict(p: ModelParams) -> dict:
    return {"family": p.family, **dataclasses.asdict(p)}


def params_from_dict(d: dict) -> ModelParams:
    try:
        cls = PARAM_TYPES[d["family"]]
        fields = {f.name: float(d[f.name]) for f in dataclasses.fields(cls) if f.name in d}
        return cls(**fields)
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportFormatError(f"bad model parameters {d!r}: {exc}") from None


def scenario_block(trace: Trace, fits: Sequence[FitResult],
                   gof: GofReport | None = None) -> dict:
    mask = trace.fit_mask()
    d = trace.distance_m[mask]
    block = {
        "direction": trace.direction.value,
        "relative_speed_mps": trace.relative_speed_mps,
        "relative_speed_kmh": trace.relative_speed_mps * 3.6,
        "frequency_ghz": trace.frequency_ghz,
        "n_samples": int(mask.sum()),
        "n_excluded": int((~mask).sum()),
        "distance_span_m": [float(d.min()), float(d.max())] if d.size else None,
        "fits": {
            f.family: {"params": params_to_dict(f.params),
                       "sigma_db": f.params.sigma_db,
                       "rmse_db": f.rmse_db}
            for f in fits
        },
    }
    if gof is not None:
        block["gof"] = {
            "weights": {"alpha": gof.weights.alpha, "beta": gof.weights.beta},
            "scores": {s.family: {"rmse_db": s.rmse_db, "grg_mape": s.grg_mape,
                                  "pcc_mape": s.pcc_mape, "mape": s.mape}
                       for s in gof.scores},
            "ranking": gof.ranking,
            "ranks": gof.ranks,
        }
    return block


def proposed_entries(report: dict) -> list[tuple[Direction, float, ProposedParams, list | None]]:
    """(direction, speed m/s, params, measured span) for each Proposed fit in a report."""
    out = []
    for sc in report.get("scenarios", []):
        fit = sc.get("fits", {}).get("proposed")
        if fit is None:
            continue
        p = params_from_dict(fit["params"])
        out.append((Direction(sc["direction"]), float(sc["relative_speed_mps"]), p,
                    sc.get("distance_span_m")))
    return out


def _fmt(x, nd=2) -> str:
    return "-" if x is None else f"{x:.{nd}f}"


def _params_text(p: dict) -> str:
    skip = {"family", "sigma_db"}
    return ", ".join(f"{k}={v:.4f}" for k, v in p.items() if k not in skip) or "(fixed)"


def render_text(report: dict) -> str:
    lines = [f"# {report['report']} report (v2vpl {report['provenance']['version']})",
             f"config_hash: {report['provenance']['config_hash']}",
             f"seed: {report['provenance']['seed']}", ""]
    for sc in report.get("scenarios", []):
        head = (f"{sc['direction']} @ {sc['relative_speed_kmh']:.2f} km/h, "
                f"{sc['frequency_ghz']:g} GHz: {sc['n_samples']} samples used, "
                f"{sc['n_excluded']} excluded (< 1 m)")
        lines += [head, ""]
        lines.append(f"  {'Model':<9}{'Parameters':<44}{'sigma dB':>9}{'RMSE dB':>9}")
        for fam, fit in sc["fits"].items():
            lines.append(f"  {LABELS[fam]:<9}{_params_text(fit['params']):<44}"
                         f"{_fmt(fit['sigma_db']):>9}{_fmt(fit['rmse_db']):>9}")
        if "gof" in sc:
            g = sc["gof"]
            w = g["weights"]
            lines += ["", f"  GoF (alpha={w['alpha']:g}, beta={w['beta']:g})",
                      f"  {'Model':<9}{'RMSE':>8}{'GRG-MAPE':>10}{'PCC-MAPE':>10}   ranks (RMSE/GRG/PCC)"]
            for fam, s in g["scores"].items():
                r = [g["ranks"][m][fam] for m in ("rmse_db", "grg_mape", "pcc_mape")]
                lines.append(f"  {LABELS[fam]:<9}{s['rmse_db']:>8.2f}{s['grg_mape']:>10.4f}"
                             f"{s['pcc_mape']:>10.4f}   {r[0]}/{r[1]}/{r[2]}")
        lines.append("")
    for a in report.get("analyses", []):
        dx = a["crossover_distance_m"]
        lines.append(f"{a['speed_kmh']:g} km/h: crossover "
                     f"{_fmt(dx) + ' m' if dx is not None else a['note']}"
                     f"{' (extrapolated)' if a['extrapolated'] else ''}; "
                     f"max gap over [{a['interval'][0]:g}, {a['interval'][1]:g}] m = "
                     f"{a['max_delta_pl_db']:.2f} dB")
    for direction, m in report.get("average_models", {}).items():
        lines.append(f"average {direction}: eta1={m['eta1_db']:.3f}, eta2={m['eta2']:.3f}, "
                     f"sigma={m['sigma_db']:.3f} dB")
    return "\n".join(lines).rstrip() + "\n"


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def load(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ReportFormatError(f"{path}: not a JSON report ({exc})") from None
    if not isinstance(data, dict):
        raise ReportFormatError(f"{path}: not a JSON report")
    return data


class Outputs:
    """Tracks files written by one command so a failure can remove them."""

    def __init__(self):
        self.paths: list[Path] = []

    def write_text(self, path, text: str) -> Path:
        path = Path(path)
        self.paths.append(path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return path

    def claim(self, path) -> Path:
        path = Path(path)
        self.paths.append(path)
        return path

    def discard(self) -> None:
        for p in self.paths:
            try:
                os.remove(p)
            except FileNotFoundError:
                pass


@contextmanager
def output_set():
    out = Outputs()
    try:
        yield out
    except BaseException:
        out.discard()
        raise
