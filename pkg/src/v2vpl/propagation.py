"""Closed-form path-loss models for line-of-sight V2V links.

Five model families are provided, all in dB:

* ``FiParams``       floating intercept: ``alpha + 10*beta*log10(d)``
* ``CiParams``       close-in: ``FSPL(f, 1 m) + 10*beta*log10(d / 1 m)``
* ``AbgParams``      alpha-beta-gamma (standard convention):
                     ``10*alpha*log10(d) + beta + 10*gamma*log10(f / 1 GHz)``
* ``ThreeGppParams`` 3GPP Rel-15 urban LOS sidelink:
                     ``38.77 + 16.7*log10(d) + 18.2*log10(f)``
* ``ProposedParams`` crossing-cars model:
                     ``eta1 + 18.2*log10(f) + eta2*log10(d)``

Frequencies are in GHz and distances in meters throughout. Every family
carries a shadow-fading standard deviation ``sigma_db``; the median
functions ignore it, :func:`evaluate` adds a zero-mean Gaussian draw.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s
REFERENCE_DISTANCE_M = 1.0

THREEGPP_INTERCEPT_DB = 38.77
THREEGPP_DISTANCE_SLOPE = 16.7
FREQUENCY_SLOPE = 18.2  # shared by the 3GPP and proposed models


def _check_sigma(sigma_db: float) -> None:
    if not sigma_db >= 0:
        raise ValueError(f"sigma_db must be >= 0, got {sigma_db!r}")


@dataclass(frozen=True)
class FiParams:
    alpha_db: float
    beta: float
    sigma_db: float = 0.0

    family: ClassVar[str] = "fi"

    def __post_init__(self):
        _check_sigma(self.sigma_db)


@dataclass(frozen=True)
class CiParams:
    beta: float
    sigma_db: float = 0.0

    family: ClassVar[str] = "ci"

    def __post_init__(self):
        _check_sigma(self.sigma_db)


@dataclass(frozen=True)
class AbgParams:
    """ABG parameters in the standard convention.

    ``alpha`` multiplies ``10*log10(d)``, ``beta_db`` is the intercept and
    ``gamma`` multiplies ``10*log10(f / 1 GHz)``.
    """

    alpha: float
    beta_db: float
    gamma: float = 2.0
    sigma_db: float = 0.0

    family: ClassVar[str] = "abg"

    def __post_init__(self):
        _check_sigma(self.sigma_db)


@dataclass(frozen=True)
class ThreeGppParams:
    sigma_db: float = 3.0

    family: ClassVar[str] = "3gpp"

    def __post_init__(self):
        _check_sigma(self.sigma_db)


@dataclass(frozen=True)
class ProposedParams:
    eta1_db: float
    eta2: float
    sigma_db: float = 0.0

    family: ClassVar[str] = "proposed"

    def __post_init__(self):
        _check_sigma(self.sigma_db)


ModelParams = Union[FiParams, CiParams, AbgParams, ThreeGppParams, ProposedParams]

# Declaration order; also the deterministic tie-break order in rankings.
MODEL_FAMILIES: tuple[str, ...] = ("fi", "ci", "abg", "3gpp", "proposed")

# Reference parameters quoted for the standard models (LOS).
LITERATURE_PARAMS: dict[str, ModelParams] = {
    "ci": CiParams(beta=2.0, sigma_db=4.1),
    "abg": AbgParams(alpha=2.1, beta_db=31.7, gamma=2.0, sigma_db=3.9),
    "3gpp": ThreeGppParams(sigma_db=3.0),
}


def _check_frequency(f_ghz: float) -> None:
    if not f_ghz > 0:
        raise ValueError(f"frequency must be > 0 GHz, got {f_ghz!r}")


def fspl(f_ghz: float, d0_m: float = REFERENCE_DISTANCE_M) -> float:
    """Free-space path loss at the 1 m reference distance, in dB.

    Args:
        f_ghz: carrier frequency in GHz.
        d0_m: reference distance; only 1 m is accepted.

    Returns:
        ``20*log10(4*pi*f/c)`` with ``f`` in Hz.
    """
    _check_frequency(f_ghz)
    if d0_m != REFERENCE_DISTANCE_M:
        raise ValueError(f"reference distance must be 1 m, got {d0_m!r}")
    return 20.0 * math.log10(4.0 * math.pi * f_ghz * 1e9 / SPEED_OF_LIGHT)


def _log10_distance(d_m):
    d = np.asarray(d_m, dtype=float)
    if np.any(~np.isfinite(d)) or np.any(d < REFERENCE_DISTANCE_M):
        raise ValueError("distance must be >= 1 m for path-loss evaluation")
    return np.log10(d)


def eval_median(model: ModelParams, f_ghz: float, d_m):
    """Median path loss (no shadowing) in dB.

    ``d_m`` may be a scalar or an array; the result has the same shape.
    Distances below the 1 m reference raise ``ValueError``.
    """
    _check_frequency(f_ghz)
    logd = _log10_distance(d_m)
    logf = math.log10(f_ghz)
    if isinstance(model, FiParams):
        pl = model.alpha_db + 10.0 * model.beta * logd
    elif isinstance(model, CiParams):
        pl = fspl(f_ghz) + 10.0 * model.beta * logd
    elif isinstance(model, AbgParams):
        pl = 10.0 * model.alpha * logd + model.beta_db + 10.0 * model.gamma * logf
    elif isinstance(model, ThreeGppParams):
        pl = THREEGPP_INTERCEPT_DB + THREEGPP_DISTANCE_SLOPE * logd + FREQUENCY_SLOPE * logf
    elif isinstance(model, ProposedParams):
        pl = model.eta1_db + FREQUENCY_SLOPE * logf + model.eta2 * logd
    else:
        raise TypeError(f"unknown model parameters: {type(model).__name__}")
    if np.ndim(pl) == 0:
        return float(pl)
    return pl


def distance_slope(model: ModelParams) -> float:
    """Path-loss increase per decade of distance, in dB."""
    if isinstance(model, (FiParams, CiParams)):
        return 10.0 * model.beta
    if isinstance(model, AbgParams):
        return 10.0 * model.alpha
    if isinstance(model, ThreeGppParams):
        return THREEGPP_DISTANCE_SLOPE
    if isinstance(model, ProposedParams):
        return model.eta2
    raise TypeError(f"unknown model parameters: {type(model).__name__}")


def sample_shadowing(sigma_db: float, rng: np.random.Generator, size=None):
    """Draw zero-mean Gaussian shadow fading in dB.

    ``sigma_db == 0`` returns exact zeros and leaves ``rng`` untouched.
    """
    _check_sigma(sigma_db)
    if sigma_db == 0:
        return 0.0 if size is None else np.zeros(size)
    draw = rng.normal(0.0, sigma_db, size)
    return float(draw) if size is None else draw


def evaluate(model: ModelParams, f_ghz: float, d_m, rng: np.random.Generator):
    """Median path loss plus one shadowing draw per distance."""
    median = eval_median(model, f_ghz, d_m)
    size = None if np.ndim(median) == 0 else np.shape(median)
    return median + sample_shadowing(model.sigma_db, rng, size)
