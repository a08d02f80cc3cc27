"""Goodness-of-fit metrics and model ranking.

Conventions: ``measured`` is the reference series and ``predicted`` the
model output. The combined scores weight a similarity term (grey relational
grade or rescaled Pearson correlation) against the MAPE complement
``|1 - MAPE|``, with default weights 0.1 and 0.9.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .estimation import FitResult, Trace
from .propagation import MODEL_FAMILIES, eval_median

# Absolute deviations at or below this (dB) count as an exact match. Keeps
# the scale-free grey relational grade from amplifying round-off noise.
EXACT_MATCH_DB = 1e-9


@dataclass(frozen=True)
class GofWeights:
    alpha: float = 0.1  # similarity term
    beta: float = 0.9  # MAPE term

    def __post_init__(self):
        if not (self.alpha >= 0 and self.beta >= 0):
            raise ValueError(f"weights must be >= 0, got ({self.alpha}, {self.beta})")


def _pair(measured, predicted) -> tuple[np.ndarray, np.ndarray]:
    x0 = np.asarray(measured, dtype=float)
    xi = np.asarray(predicted, dtype=float)
    if x0.ndim != 1 or x0.shape != xi.shape:
        raise ValueError("measured and predicted must be 1-D and equally long")
    if x0.size < 1:
        raise ValueError("series are empty")
    return x0, xi


def rmse(measured, predicted) -> float:
    x0, xi = _pair(measured, predicted)
    return float(np.sqrt(np.mean((xi - x0) ** 2)))


def mape(measured, predicted) -> float:
    """Mean absolute percentage error as a fraction (0.1 means 10%)."""
    x0, xi = _pair(measured, predicted)
    if np.any(x0 == 0):
        raise ValueError("measured series contains zeros; MAPE is undefined")
    return float(np.mean(np.abs(xi - x0) / x0))


def rho_mape(measured, predicted) -> float:
    """``|1 - MAPE|``; the outer absolute value folds errors above 200% back."""
    return abs(1.0 - mape(measured, predicted))


def rho_grg(measured, predicted, distinguishing_coeff: float = 0.5) -> float:
    """Deng's grey relational grade of ``predicted`` against ``measured``.

    No normalization is applied; both series are assumed to share units.
    """
    if not 0 < distinguishing_coeff <= 1:
        raise ValueError("distinguishing_coeff must lie in (0, 1]")
    x0, xi = _pair(measured, predicted)
    delta = np.abs(x0 - xi)
    dmax = delta.max()
    if dmax <= EXACT_MATCH_DB:
        return 1.0
    dmin = delta.min()
    xi_k = (dmin + distinguishing_coeff * dmax) / (delta + distinguishing_coeff * dmax)
    return float(np.mean(xi_k))


def rho_pcc(measured, predicted) -> float:
    """Pearson correlation rescaled from [-1, 1] to [0, 1] by ``(r + 1) / 2``."""
    x0, xi = _pair(measured, predicted)
    a, b = x0 - x0.mean(), xi - xi.mean()
    saa, sbb = np.dot(a, a), np.dot(b, b)
    if saa == 0 or sbb == 0:
        raise ValueError("Pearson correlation needs both series to vary")
    r = float(np.dot(a, b) / np.sqrt(saa * sbb))
    r = min(1.0, max(-1.0, r))
    return (r + 1.0) / 2.0


def combine(similarity: float, rho_mape_value: float, w: GofWeights = GofWeights()) -> float:
    return abs(w.alpha * similarity + w.beta * rho_mape_value)


def grg_mape(measured, predicted, w: GofWeights = GofWeights(),
             distinguishing_coeff: float = 0.5) -> float:
    return combine(rho_grg(measured, predicted, distinguishing_coeff),
                   rho_mape(measured, predicted), w)


def pcc_mape(measured, predicted, w: GofWeights = GofWeights()) -> float:
    return combine(rho_pcc(measured, predicted), rho_mape(measured, predicted), w)


@dataclass(frozen=True)
class ModelScore:
    family: str
    rmse_db: float
    grg_mape: float
    pcc_mape: float
    mape: float  # raw error fraction, before the |1 - .| fold


METRICS = ("rmse_db", "grg_mape", "pcc_mape")


@dataclass(frozen=True)
class GofReport:
    """Per-family scores plus per-metric rankings.

    ``ranking[metric]`` lists families best first (ties in declaration
    order); ``ranks[metric][family]`` is the competition rank, so families
    whose scores agree to within ``EXACT_MATCH_DB``-scale tolerance share it.
    """

    scores: list[ModelScore]
    weights: GofWeights
    ranking: dict[str, list[str]] = field(default_factory=dict)
    ranks: dict[str, dict[str, int]] = field(default_factory=dict)

    def score(self, family: str) -> ModelScore:
        for s in self.scores:
            if s.family == family:
                return s
        raise KeyError(family)


def _rank(scores: Sequence[ModelScore], metric: str, tol: float):
    order = {f: i for i, f in enumerate(MODEL_FAMILIES)}
    sign = 1.0 if metric == "rmse_db" else -1.0
    by_value = sorted(scores, key=lambda s: (sign * getattr(s, metric), order[s.family]))
    # groups of scores within tol of the group's best value
    groups: list[list[ModelScore]] = []
    for s in by_value:
        if groups and abs(getattr(s, metric) - getattr(groups[-1][0], metric)) <= tol:
            groups[-1].append(s)
        else:
            groups.append([s])
    ordered, ranks = [], {}
    for group in groups:
        rank = len(ordered) + 1
        for s in sorted(group, key=lambda s: order[s.family]):
            ordered.append(s.family)
            ranks[s.family] = rank
    return ordered, ranks


def rank_models(fits: Sequence[FitResult], trace: Trace,
                w: GofWeights = GofWeights(), tol: float = EXACT_MATCH_DB) -> GofReport:
    """Score every fitted model against the trace and rank the families.

    Each fit's median curve is evaluated at the trace distances usable for
    fitting (``d >= 1 m``). RMSE ranks ascending, the combined scores
    descending.
    """
    if not fits:
        raise ValueError("rank_models needs at least one fit")
    mask = trace.fit_mask()
    d, measured = trace.distance_m[mask], trace.pl_db[mask]
    scores = []
    for fit in fits:
        predicted = eval_median(fit.params, trace.frequency_ghz, d)
        scores.append(ModelScore(
            family=fit.family,
            rmse_db=rmse(measured, predicted),
            grg_mape=grg_mape(measured, predicted, w),
            pcc_mape=pcc_mape(measured, predicted, w),
            mape=mape(measured, predicted),
        ))
    ranking, ranks = {}, {}
    for metric in METRICS:
        ranking[metric], ranks[metric] = _rank(scores, metric, tol)
    return GofReport(scores, w, ranking, ranks)
