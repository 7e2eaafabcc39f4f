"""Population-level summaries of per-respondent estimates.

Quantiles interpolate linearly between order statistics and dispersion is
the population standard deviation, so a table rebuilt from the same fits
reproduces byte-identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .core import GridWeighting, classify_weighting
from .errors import ZeroBandwidth
from .fitting import FitResult
from .probit import (
    ExtendedGiniModel,
    NonParametricModel,
    UtilitarianModel,
)

GRID_ABSCISSAE = (0.2, 0.4, 0.6, 0.8)
GRID_COLUMNS = ("f02", "f04", "f06", "f08")


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float
    median: float
    q1: float
    q3: float


def summarize(values: Sequence[float]) -> SummaryStats:
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("nothing to summarize")
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
    return SummaryStats(n=int(arr.size), mean=float(arr.mean()),
                        sd=float(arr.std(ddof=0)), median=float(med),
                        q1=float(q1), q3=float(q3))


def _fit_parameters(fit: FitResult) -> dict:
    """Flat parameter dict for one fit, with the fits.csv column names."""
    out = {"alpha": fit.params.alpha, "tau1": fit.params.tau1,
           "tau2": fit.params.tau2}
    model = fit.params.model
    if isinstance(model, UtilitarianModel):
        out["epsilon"] = model.epsilon
    elif isinstance(model, ExtendedGiniModel):
        out["eta"] = model.eta
    elif isinstance(model, NonParametricModel):
        out.update(zip(GRID_COLUMNS, model.grid))
    return out


def fit_record(fit: FitResult) -> dict:
    """One flat output row per fit; absent parameters stay blank."""
    row = {"session_id": fit.session_id, "model": fit.model,
           "optimizer": fit.optimizer}
    params = _fit_parameters(fit)
    for column in ("alpha", "epsilon", "eta") + GRID_COLUMNS \
            + ("tau1", "tau2"):
        value = params.get(column)
        row[column] = "" if value is None else repr(float(value))
    row["loglik"] = repr(float(fit.log_likelihood))
    row["converged"] = "true" if fit.converged else "false"
    return row


FITS_CSV_COLUMNS = ("session_id", "model", "optimizer", "alpha", "epsilon",
                    "eta", "f02", "f04", "f06", "f08", "tau1", "tau2",
                    "loglik", "converged")


def population_summary(fits: Sequence[FitResult]) -> dict:
    """SummaryStats per parameter over every fit that has it."""
    values: dict = {}
    for fit in fits:
        for name, value in _fit_parameters(fit).items():
            values.setdefault(name, []).append(value)
        values.setdefault("loglik", []).append(fit.log_likelihood)
    return {name: summarize(vals) for name, vals in sorted(values.items())}


@dataclass(frozen=True)
class MedianWeightingProfile:
    abscissae: tuple
    median: tuple
    q1: tuple
    q3: tuple
    gini_gap: tuple           # median f(w) minus w^2, pointwise
    membership: object        # classes of the median grid

    @property
    def grid(self) -> GridWeighting:
        return GridWeighting(self.median)


def grids_of(fits: Sequence[FitResult]) -> List[tuple]:
    """Extract the weighting grids; rejects parametric fits."""
    grids = []
    for fit in fits:
        if not isinstance(fit.params.model, NonParametricModel):
            raise ValueError("median profile needs grid estimates")
        grids.append(fit.params.model.grid)
    return grids


def median_weighting_profile(grids: Sequence[Sequence[float]],
                             class_tol: float = 1e-6) \
        -> MedianWeightingProfile:
    """Pointwise median weighting function across grid estimates."""
    grids = list(grids)
    if not grids:
        raise ValueError("nothing to summarize")
    stacked = np.asarray(grids, dtype=float)
    q1, med, q3 = np.quantile(stacked, [0.25, 0.5, 0.75], axis=0)
    med_sorted = tuple(float(v) for v in np.maximum.accumulate(med))
    gaps = tuple(float(m - w * w)
                 for m, w in zip(med_sorted, GRID_ABSCISSAE))
    membership = classify_weighting(GridWeighting(med_sorted),
                                    len(med_sorted) + 1, tol=class_tol)
    return MedianWeightingProfile(
        abscissae=GRID_ABSCISSAE, median=med_sorted,
        q1=tuple(float(v) for v in q1), q3=tuple(float(v) for v in q3),
        gini_gap=gaps, membership=membership)


def marginal_weight_table(grids: Sequence[Sequence[float]]) -> List[dict]:
    """Median rank-by-rank marginal weights f(i/n) - f((i-1)/n).

    The marginals of one estimate sum to one, so the rows read as the
    median share of welfare weight put on each rank, poorest first.
    """
    marginals = []
    for grid in grids:
        padded = np.concatenate(([0.0], np.asarray(grid, dtype=float),
                                 [1.0]))
        marginals.append(np.diff(padded))
    if not marginals:
        raise ValueError("nothing to summarize")
    stacked = np.asarray(marginals)
    q1, med, q3 = np.quantile(stacked, [0.25, 0.5, 0.75], axis=0)
    rows = []
    for i in range(stacked.shape[1]):
        rows.append({"rank": i + 1, "median": float(med[i]),
                     "q1": float(q1[i]), "q3": float(q3[i])})
    return rows


def silverman_bandwidth(values: np.ndarray) -> float:
    arr = np.asarray(values, dtype=float)
    sd = float(arr.std(ddof=0))
    q1, q3 = np.quantile(arr, [0.25, 0.75])
    spread = min(sd, float(q3 - q1) / 1.34)
    bandwidth = 0.9 * spread * arr.size ** (-1.0 / 5.0)
    if not bandwidth > 0:
        raise ZeroBandwidth("sample has no spread for a kernel density")
    return bandwidth


def kernel_density(values: Sequence[float],
                   points: Optional[Sequence[float]] = None,
                   bandwidth: Optional[float] = None):
    """Gaussian kernel density of the values; returns (points, density, h)."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("nothing to summarize")
    h = float(bandwidth) if bandwidth is not None \
        else silverman_bandwidth(arr)
    if not h > 0:
        raise ZeroBandwidth("bandwidth must be positive")
    if points is None:
        points = np.linspace(arr.min() - 3 * h, arr.max() + 3 * h, 256)
    pts = np.asarray(points, dtype=float)
    z = (pts[:, None] - arr[None, :]) / h
    density = np.exp(-0.5 * z * z).sum(axis=1) \
        / (arr.size * h * math.sqrt(2.0 * math.pi))
    return pts, density, h
