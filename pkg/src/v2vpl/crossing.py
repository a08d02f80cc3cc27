"""Crossing-car kinematics, trace synthesis and moving-in/moving-away analysis.

Signed separation is negative while the cars approach, zero at the
rendezvous and positive while they depart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .estimation import Direction, Trace
from .propagation import (
    REFERENCE_DISTANCE_M,
    ModelParams,
    ProposedParams,
    eval_median,
    sample_shadowing,
)

KMH = 1 / 3.6

# Fitted proposed-model parameters, keyed by (direction, relative speed km/h).
TABLE2: dict[tuple[Direction, int], ProposedParams] = {
    (Direction.MOVING_IN, 50): ProposedParams(40.42, 10.59, 6.34),
    (Direction.MOVING_IN, 70): ProposedParams(41.51, 9.92, 5.98),
    (Direction.MOVING_AWAY, 50): ProposedParams(42.31, 7.99, 5.99),
    (Direction.MOVING_AWAY, 70): ProposedParams(42.53, 8.26, 6.13),
}
SPEEDS_MPS = {50: 13.89, 70: 19.44}


class ParallelCurvesError(ValueError):
    """The two median curves share a slope and never intersect."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Geometry, sampling and generating model of one simulated pass.

    ``generator_away``, when given, produces the path loss on the departing
    half so that direction-specific models can be simulated in one pass.
    ``depart_m`` sets an asymmetric departing span (default: symmetric).
    """

    generator: ModelParams
    seed: int
    initial_separation_m: float = 35.0
    relative_speed_mps: float = 13.89
    lateral_offset_m: float = 0.0
    sample_interval_s: float = 0.005
    frequency_ghz: float = 59.6
    generator_away: Optional[ModelParams] = None
    depart_m: Optional[float] = None

    def __post_init__(self):
        checks = {
            "initial_separation_m": self.initial_separation_m > 0,
            "relative_speed_mps": self.relative_speed_mps > 0,
            "lateral_offset_m": self.lateral_offset_m >= 0,
            "sample_interval_s": self.sample_interval_s > 0,
            "frequency_ghz": self.frequency_ghz > 0,
        }
        for name, ok in checks.items():
            if not (ok and math.isfinite(getattr(self, name))):
                raise ValueError(f"{name} is invalid: {getattr(self, name)!r}")
        if self.depart_m is not None and not self.depart_m > 0:
            raise ValueError(f"depart_m is invalid: {self.depart_m!r}")
        if self.sample_interval_s * self.relative_speed_mps >= self.initial_separation_m:
            raise ValueError("sample_interval_s * relative_speed_mps must be below initial_separation_m")
        if not isinstance(self.seed, (int, np.integer)):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")

    @property
    def end_m(self) -> float:
        return self.initial_separation_m if self.depart_m is None else self.depart_m

    @property
    def n_samples(self) -> int:
        step = self.relative_speed_mps * self.sample_interval_s
        span = self.initial_separation_m + self.end_m
        # tolerance absorbs km/h -> m/s round-off on exact grids
        return int(math.floor(span / step + 1e-9)) + 1


@dataclass(frozen=True, eq=False)
class CrossingTrace:
    time_s: np.ndarray
    signed_distance_m: np.ndarray
    distance_m: np.ndarray
    pl_db: np.ndarray
    relative_speed_mps: float
    frequency_ghz: float = 59.6

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in
                  (self.time_s, self.signed_distance_m, self.distance_m, self.pl_db)]
        n = arrays[0].shape
        if arrays[0].ndim != 1 or any(a.shape != n for a in arrays):
            raise ValueError("crossing trace columns must be 1-D and equally long")
        if arrays[0].size == 0:
            raise ValueError("crossing trace is empty")
        if np.any(np.diff(arrays[0]) <= 0):
            raise ValueError("time_s must be strictly increasing")
        if np.any(np.diff(arrays[1]) <= 0):
            raise ValueError("signed_distance_m must be strictly increasing")
        if not all(np.all(np.isfinite(a)) for a in arrays) or np.any(arrays[2] < 0):
            raise ValueError("crossing trace holds non-finite or negative distances")
        for name, a in zip(("time_s", "signed_distance_m", "distance_m", "pl_db"), arrays):
            object.__setattr__(self, name, a)

    def __len__(self) -> int:
        return self.time_s.size

    @property
    def below_reference(self) -> np.ndarray:
        """Samples closer than 1 m; excluded by every fit."""
        return self.distance_m < REFERENCE_DISTANCE_M


def simulate_crossing(cfg: ScenarioConfig) -> CrossingTrace:
    """Synthesize one crossing pass.

    Path loss below the 1 m reference is generated from the model evaluated
    at 1 m; such samples are flagged by ``below_reference``.
    """
    k = np.arange(cfg.n_samples)
    t = k * cfg.sample_interval_s
    s = -cfg.initial_separation_m + cfg.relative_speed_mps * t
    d = np.hypot(s, cfg.lateral_offset_m)
    d_eval = np.maximum(d, REFERENCE_DISTANCE_M)

    rng = np.random.default_rng(cfg.seed)
    pl = np.empty_like(d)
    away = s >= 0
    gen_away = cfg.generator if cfg.generator_away is None else cfg.generator_away
    pl[~away] = eval_median(cfg.generator, cfg.frequency_ghz, d_eval[~away])
    pl[away] = eval_median(gen_away, cfg.frequency_ghz, d_eval[away])
    # one draw per sample in time order, whichever half it belongs to
    sig = np.where(away, gen_away.sigma_db, cfg.generator.sigma_db)
    if np.any(sig > 0):
        pl += sig * sample_shadowing(1.0, rng, d.size)
    return CrossingTrace(t, s, d, pl, cfg.relative_speed_mps, cfg.frequency_ghz)


def split_at_rendezvous(trace: CrossingTrace) -> tuple[Trace, Trace]:
    """Partition into (moving-in, moving-away); a zero sample goes away."""
    away = trace.signed_distance_m >= 0
    if away.all() or not away.any():
        raise ValueError("trace does not span the rendezvous point")

    def part(mask, direction):
        return Trace(trace.time_s[mask], trace.distance_m[mask], trace.pl_db[mask],
                     direction, trace.relative_speed_mps, trace.frequency_ghz)

    return part(~away, Direction.MOVING_IN), part(away, Direction.MOVING_AWAY)


def one_sided(trace: CrossingTrace) -> Trace:
    """Wrap a trace lying entirely on one side of the rendezvous."""
    away = trace.signed_distance_m >= 0
    if away.all():
        direction = Direction.MOVING_AWAY
    elif not away.any():
        direction = Direction.MOVING_IN
    else:
        raise ValueError("trace spans the rendezvous point; split it first")
    return Trace(trace.time_s, trace.distance_m, trace.pl_db, direction,
                 trace.relative_speed_mps, trace.frequency_ghz)


def crossover_distance(p_in: ProposedParams, p_away: ProposedParams) -> float:
    """Distance at which the moving-in and moving-away medians coincide."""
    slope_gap = p_in.eta2 - p_away.eta2
    if slope_gap == 0:
        raise ParallelCurvesError("parallel/identical curves: eta2 values are equal")
    return 10.0 ** ((p_away.eta1_db - p_in.eta1_db) / slope_gap)


def pl_gap(p_in: ProposedParams, p_away: ProposedParams, d_m):
    """Signed median difference moving-in minus moving-away (frequency cancels)."""
    return (p_in.eta1_db - p_away.eta1_db) + (p_in.eta2 - p_away.eta2) * np.log10(d_m)


def max_pl_gap(p_in: ProposedParams, p_away: ProposedParams,
               d_lo: float = 1.0, d_hi: float = 30.0) -> float:
    """Largest absolute median difference over ``[d_lo, d_hi]``.

    The gap is affine in ``log10(d)``, so its magnitude peaks at an endpoint.
    """
    if not (REFERENCE_DISTANCE_M <= d_lo < d_hi and math.isfinite(d_hi)):
        raise ValueError(f"invalid interval [{d_lo}, {d_hi}]; need 1 <= d_lo < d_hi")
    return float(max(abs(pl_gap(p_in, p_away, d_lo)), abs(pl_gap(p_in, p_away, d_hi))))


def average_model(p_a: ProposedParams, p_b: ProposedParams) -> ProposedParams:
    """Speed-independent model: arithmetic mean of eta1, eta2 and sigma."""
    return ProposedParams((p_a.eta1_db + p_b.eta1_db) / 2,
                          (p_a.eta2 + p_b.eta2) / 2,
                          (p_a.sigma_db + p_b.sigma_db) / 2)


@dataclass(frozen=True)
class CrossoverAnalysis:
    crossover_distance_m: Optional[float]
    max_delta_pl_db: float
    interval: tuple[float, float]
    extrapolated: bool = False
    note: str = ""


def analyze(p_in: ProposedParams, p_away: ProposedParams,
            d_lo: float = 1.0, d_hi: float = 30.0) -> CrossoverAnalysis:
    gap = max_pl_gap(p_in, p_away, d_lo, d_hi)
    try:
        dx = crossover_distance(p_in, p_away)
    except ParallelCurvesError as exc:
        return CrossoverAnalysis(None, gap, (d_lo, d_hi), False, str(exc))
    inside = d_lo < dx < d_hi
    note = "" if inside else "crossover lies outside the analysis interval"
    return CrossoverAnalysis(dx, gap, (d_lo, d_hi), not inside, note)
