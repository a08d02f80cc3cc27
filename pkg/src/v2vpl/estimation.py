"""Least-squares estimation of path-loss model parameters from traces.

All fits are ordinary least squares in the dB domain. Samples closer than
the 1 m reference distance are dropped before fitting and counted in
``FitResult.n_excluded``. The shadowing deviation of every fit is the
N-1 sample standard deviation of its residuals.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .propagation import (
    FREQUENCY_SLOPE,
    REFERENCE_DISTANCE_M,
    AbgParams,
    CiParams,
    FiParams,
    ModelParams,
    ProposedParams,
    ThreeGppParams,
    eval_median,
    fspl,
)


class FitError(ValueError):
    """Raised when a trace cannot identify the requested parameters."""


class Direction(str, enum.Enum):
    MOVING_IN = "moving_in"
    MOVING_AWAY = "moving_away"


class Sample(NamedTuple):
    time_s: float
    distance_m: float
    pl_db: float


@dataclass(frozen=True, eq=False)
class Trace:
    """Time-ordered (distance, path loss) samples of one scenario.

    Distances may be anywhere in ``[0, inf)`` so that the rendezvous sample
    of a crossing survives partitioning; fitting only uses ``d >= 1 m``.
    """

    time_s: np.ndarray
    distance_m: np.ndarray
    pl_db: np.ndarray
    direction: Direction
    relative_speed_mps: float
    frequency_ghz: float = 59.6

    def __post_init__(self):
        t = np.asarray(self.time_s, dtype=float)
        d = np.asarray(self.distance_m, dtype=float)
        pl = np.asarray(self.pl_db, dtype=float)
        if t.ndim != 1 or t.shape != d.shape or t.shape != pl.shape:
            raise ValueError("time_s, distance_m and pl_db must be 1-D and equally long")
        if t.size == 0:
            raise ValueError("trace is empty")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time_s must be strictly increasing")
        if not (np.all(np.isfinite(d)) and np.all(d >= 0)):
            raise ValueError("distance_m must be finite and >= 0")
        if not np.all(np.isfinite(pl)):
            raise ValueError("pl_db must be finite")
        if not self.relative_speed_mps > 0:
            raise ValueError("relative_speed_mps must be > 0")
        if not self.frequency_ghz > 0:
            raise ValueError("frequency_ghz must be > 0")
        object.__setattr__(self, "time_s", t)
        object.__setattr__(self, "distance_m", d)
        object.__setattr__(self, "pl_db", pl)
        object.__setattr__(self, "direction", Direction(self.direction))

    def __len__(self) -> int:
        return self.time_s.size

    @property
    def samples(self) -> list[Sample]:
        return [Sample(*row) for row in zip(self.time_s.tolist(),
                                            self.distance_m.tolist(),
                                            self.pl_db.tolist())]

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], **meta) -> "Trace":
        arr = np.asarray(samples, dtype=float).reshape(-1, 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], **meta)

    def fit_mask(self) -> np.ndarray:
        return self.distance_m >= REFERENCE_DISTANCE_M


@dataclass(frozen=True, eq=False)
class FitResult:
    params: ModelParams
    residuals_db: np.ndarray  # measured minus fitted median, one per used sample
    rmse_db: float
    n_excluded: int = 0
    distance_m: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def family(self) -> str:
        return self.params.family


def estimate_sigma(residuals_db) -> float:
    """Sample standard deviation with the N-1 denominator."""
    x = np.asarray(residuals_db, dtype=float)
    if x.size < 2:
        raise ValueError("estimate_sigma needs at least 2 values")
    return float(np.sqrt(np.sum((x - x.mean()) ** 2) / (x.size - 1)))


def _usable(trace: Trace) -> tuple[np.ndarray, np.ndarray, int]:
    if trace is None or len(trace) == 0:
        raise FitError("trace is empty")
    mask = trace.fit_mask()
    d, pl = trace.distance_m[mask], trace.pl_db[mask]
    if d.size < 2:
        raise FitError(f"need at least 2 samples at d >= 1 m, got {d.size}")
    if np.unique(d).size < 2:
        raise FitError("degenerate design: all usable samples share one distance")
    return d, pl, int(mask.size - d.size)


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Intercept and slope of y on x by centered simple regression."""
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise FitError("degenerate design: regressor has zero variance")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    return float(ym - slope * xm), slope


def _finish(params, d, pl, f_ghz, n_excluded) -> FitResult:
    resid = pl - eval_median(params, f_ghz, d)
    sigma = estimate_sigma(resid)
    params = dataclasses.replace(params, sigma_db=sigma)
    rmse = float(np.sqrt(np.mean(resid ** 2)))
    return FitResult(params, resid, rmse, n_excluded, d)


def fit_fi(trace: Trace) -> FitResult:
    d, pl, n_excl = _usable(trace)
    alpha, beta = _line_fit(10.0 * np.log10(d), pl)
    return _finish(FiParams(alpha, beta), d, pl, trace.frequency_ghz, n_excl)


def fit_ci(trace: Trace) -> FitResult:
    d, pl, n_excl = _usable(trace)
    x = 10.0 * np.log10(d)
    sxx = np.sum(x ** 2)
    if sxx == 0:
        raise FitError("degenerate design: every usable sample is at the 1 m reference")
    beta = float(np.sum((pl - fspl(trace.frequency_ghz)) * x) / sxx)
    return _finish(CiParams(beta), d, pl, trace.frequency_ghz, n_excl)


def fit_abg(trace: Trace, gamma_fixed: float = 2.0) -> FitResult:
    """ABG fit with the frequency exponent pinned.

    On a single-frequency trace ``beta`` and ``gamma`` are not separately
    identifiable, so ``gamma_fixed`` is subtracted and only the intercept
    and distance exponent are estimated.
    """
    d, pl, n_excl = _usable(trace)
    y = pl - 10.0 * gamma_fixed * math.log10(trace.frequency_ghz)
    beta_db, alpha = _line_fit(10.0 * np.log10(d), y)
    return _finish(AbgParams(alpha, beta_db, gamma_fixed), d, pl, trace.frequency_ghz, n_excl)


def fit_3gpp(trace: Trace) -> FitResult:
    """Fixed-form 3GPP model; only the shadowing deviation is estimated."""
    d, pl, n_excl = _usable(trace)
    return _finish(ThreeGppParams(), d, pl, trace.frequency_ghz, n_excl)


def fit_proposed(trace: Trace) -> FitResult:
    d, pl, n_excl = _usable(trace)
    y = pl - FREQUENCY_SLOPE * math.log10(trace.frequency_ghz)
    # regressor is log10(d), not 10*log10(d)
    eta1, eta2 = _line_fit(np.log10(d), y)
    return _finish(ProposedParams(eta1, eta2), d, pl, trace.frequency_ghz, n_excl)


FITTERS = {
    "fi": fit_fi,
    "ci": fit_ci,
    "abg": fit_abg,
    "3gpp": fit_3gpp,
    "proposed": fit_proposed,
}


def fit_all(trace: Trace, families: Sequence[str] | None = None,
            gamma_fixed: float = 2.0) -> list[FitResult]:
    """Fit every requested family (all five by default) in declaration order."""
    families = list(FITTERS) if families is None else list(families)
    unknown = set(families) - set(FITTERS)
    if unknown:
        raise ValueError(f"unknown model families: {sorted(unknown)}")
    out = []
    for name in FITTERS:
        if name not in families:
            continue
        if name == "abg":
            out.append(fit_abg(trace, gamma_fixed))
        else:
            out.append(FITTERS[name](trace))
    return out


def proposed_covariance(distance_m, sigma_db: float) -> np.ndarray:
    """OLS covariance of (eta1, eta2) for the given design and noise level."""
    d = np.asarray(distance_m, dtype=float)
    X = np.column_stack([np.ones_like(d), np.log10(d)])
    return sigma_db ** 2 * np.linalg.inv(X.T @ X)
