"""Per-respondent maximum-likelihood fitting of the probit welfare models.

Two optimizers: BFGS with analytic gradients (scipy), and a hand-rolled
simulated-annealing loop with geometric cooling.  Annealing runs all chains
in lockstep on stacked arrays: one respondent gives `restarts` chains, a
population gives respondents x restarts, and every chain consumes its own
seeded proposal stream, so the estimate for a respondent is identical whether
they are fitted alone or inside a batch.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DataMismatch, NotParametric
from .probit import (
    MODEL_GINI,
    MODEL_NONPARAM,
    MODEL_UTIL,
    BatchData,
    ExtendedGiniModel,
    ProbitParams,
    RespondentData,
    UtilitarianModel,
    batch_nll,
    initial_theta,
    n_free_params,
    stack_batch,
    theta_to_params,
)

OPT_BFGS = "BFGS"
OPT_SANN = "SANN"

_SHAPE_TOL = 1e-6
_AIC_TIE_TOL = 1e-9


@dataclass(frozen=True)
class SannConfig:
    iterations: int = 20000
    restarts: int = 5
    t0: float = 1.0
    cooling: float = 0.995
    t_floor: float = 1e-12
    step_sd: float = 0.1
    chunk: int = 1000


@dataclass(frozen=True)
class FitResult:
    params: ProbitParams
    log_likelihood: float
    converged: bool
    optimizer: str
    iterations: int
    model: str
    session_id: str = ""
    n_obs: int = 0
    alpha_free: bool = False

    def __post_init__(self):
        # probabilities never exceed 1, so the optimum cannot either
        assert self.log_likelihood <= 1e-9, "positive log-likelihood"


_FULL_PROTOCOL_QUESTIONS = 40


def _warn_if_short(data: RespondentData) -> None:
    if data.n_questions < _FULL_PROTOCOL_QUESTIONS:
        warnings.warn(
            f"respondent {data.session_id!r} answered "
            f"{data.n_questions} of {_FULL_PROTOCOL_QUESTIONS} "
            "comparison questions; fitting on the partial record",
            RuntimeWarning, stacklevel=3)


def compress_rank_data(data: RespondentData) -> RespondentData:
    """Merge questions with identical rank-gap changes.

    The Gini and non-parametric deltas depend on a pair only through d, and
    the catalog reuses the same ten transfers in every block, so a full
    protocol collapses to at most ten distinct likelihood rows.  Not valid
    for the utilitarian family, whose delta needs the raw incomes.
    """
    uniq, inverse = np.unique(np.round(data.D, 9), axis=0, return_inverse=True)
    counts = np.zeros((uniq.shape[0], 3))
    np.add.at(counts, inverse, data.counts)
    first = np.zeros(uniq.shape[0], dtype=int)
    first[inverse[::-1]] = np.arange(data.D.shape[0])[::-1]
    return RespondentData(
        session_id=data.session_id,
        X=data.X[first],
        Y=data.Y[first],
        D=data.D[first],
        counts=counts,
        seed=data.seed,
    )


def _fit_bfgs(family: str, data: RespondentData, alpha_free: bool,
              alpha_value: float) -> FitResult:
    batch = stack_batch([data])
    theta0 = initial_theta(family, batch.D.shape[2], alpha_free)

    def objective(theta):
        nll, grad = batch_nll(family, theta[None, :], batch, alpha_free,
                              alpha_value, want_grad=True)
        return nll[0], grad[0]

    res = minimize(objective, theta0, jac=True, method="BFGS",
                   options={"gtol": 1e-6, "maxiter": 500})
    converged = bool(res.success) or float(np.max(np.abs(res.jac))) < 1e-6
    params = theta_to_params(family, res.x, batch.D.shape[2], alpha_free,
                             alpha_value)
    return FitResult(params=params, log_likelihood=-float(res.fun),
                     converged=converged, optimizer=OPT_BFGS,
                     iterations=int(res.nit), model=family,
                     session_id=data.session_id, n_obs=data.n_obs,
                     alpha_free=alpha_free)


def _sann_chains(family: str, datasets: Sequence[RespondentData],
                 alpha_free: bool, alpha_value: float, config: SannConfig):
    """Run restarts x respondents annealing chains in lockstep.

    Returns (best_theta (R, p), best_nll (R,)) with the best restart kept
    per respondent.
    """
    restarts = config.restarts
    R = len(datasets)
    B = R * restarts
    base = stack_batch(list(datasets))
    rep = lambda a: np.repeat(a, restarts, axis=0)
    batch = BatchData(X=rep(base.X), Y=rep(base.Y), D=rep(base.D),
                      counts=rep(base.counts), LX=rep(base.LX),
                      LY=rep(base.LY))
    n = base.D.shape[2]
    p = n_free_params(family, n, alpha_free)
    theta0 = initial_theta(family, n, alpha_free)

    rngs = [np.random.default_rng(np.random.SeedSequence([int(d.seed), r]))
            for d in datasets for r in range(restarts)]
    theta = np.tile(theta0, (B, 1))
    for i, rng in enumerate(rngs):
        # restart 0 keeps the deterministic start, the rest jitter around it
        if i % restarts:
            theta[i] += rng.standard_normal(p) * 0.5

    nll, _ = batch_nll(family, theta, batch, alpha_free, alpha_value)
    nll = np.nan_to_num(nll, nan=np.inf)
    best_nll = nll.copy()
    best_theta = theta.copy()

    k = 0
    while k < config.iterations:
        m = min(config.chunk, config.iterations - k)
        steps = np.empty((B, m, p))
        unif = np.empty((B, m))
        for i, rng in enumerate(rngs):
            steps[i] = rng.standard_normal((m, p)) * config.step_sd
            unif[i] = rng.random(m)
        temps = np.maximum(config.t0 * config.cooling ** np.arange(k, k + m),
                           config.t_floor)
        for j in range(m):
            prop = theta + steps[:, j]
            nll_prop, _ = batch_nll(family, prop, batch, alpha_free,
                                    alpha_value)
            nll_prop = np.nan_to_num(nll_prop, nan=np.inf)
            accept = unif[:, j] < np.exp(
                np.minimum((nll - nll_prop) / temps[j], 0.0))
            theta[accept] = prop[accept]
            nll[accept] = nll_prop[accept]
            improved = nll < best_nll
            best_nll[improved] = nll[improved]
            best_theta[improved] = theta[improved]
        k += m

    winner_nll = np.empty(R)
    winner_theta = np.empty((R, p))
    for r in range(R):
        chains = slice(r * restarts, (r + 1) * restarts)
        pick = int(np.argmin(best_nll[chains])) + r * restarts
        winner_nll[r] = best_nll[pick]
        winner_theta[r] = best_theta[pick]
    return winner_theta, winner_nll


def _fit_sann_batch(family: str, datasets: Sequence[RespondentData],
                    alpha_free: bool, alpha_value: float,
                    config: SannConfig) -> list:
    thetas, nlls = _sann_chains(family, datasets, alpha_free, alpha_value,
                                config)
    n = datasets[0].D.shape[1]
    out = []
    for d, theta, nll in zip(datasets, thetas, nlls):
        params = theta_to_params(family, theta, n, alpha_free, alpha_value)
        out.append(FitResult(params=params, log_likelihood=-float(nll),
                             converged=True, optimizer=OPT_SANN,
                             iterations=config.iterations, model=family,
                             session_id=d.session_id, n_obs=d.n_obs,
                             alpha_free=alpha_free))
    return out


def _prepared(family: str, data: RespondentData) -> RespondentData:
    return data if family == MODEL_UTIL else compress_rank_data(data)


def fit_mle(model_kind: str, data: RespondentData, optimizer: str = "bfgs",
            alpha_free: bool = False, alpha_value: float = 1.0,
            sann_config: Optional[SannConfig] = None) -> FitResult:
    """Maximum-likelihood fit of one respondent under one model family."""
    if model_kind not in (MODEL_UTIL, MODEL_GINI, MODEL_NONPARAM):
        raise ValueError(f"unknown model kind {model_kind!r}")
    _warn_if_short(data)
    prepared = _prepared(model_kind, data)
    opt = optimizer.upper()
    if opt == OPT_BFGS:
        return _fit_bfgs(model_kind, prepared, alpha_free, alpha_value)
    if opt == OPT_SANN:
        return _fit_sann_batch(model_kind, [prepared], alpha_free,
                               alpha_value, sann_config or SannConfig())[0]
    raise ValueError(f"unknown optimizer {optimizer!r}")


def fit_population(datasets: Sequence[RespondentData], model_kind: str,
                   optimizer: str = "bfgs", alpha_free: bool = False,
                   alpha_value: float = 1.0,
                   sann_config: Optional[SannConfig] = None) -> list:
    """Fit every respondent; annealing chains run batched in lockstep."""
    for d in datasets:
        _warn_if_short(d)
    prepared = [_prepared(model_kind, d) for d in datasets]
    if optimizer.upper() == OPT_SANN:
        return _fit_sann_batch(model_kind, prepared, alpha_free, alpha_value,
                               sann_config or SannConfig())
    return [_fit_bfgs(model_kind, d, alpha_free, alpha_value)
            for d in prepared]


SHAPE_CONCAVE = "concave"
SHAPE_LINEAR = "linear"
SHAPE_CONVEX = "convex"


def classify_shape(fit: FitResult) -> str:
    """Shape of the fitted parametric function: u_eps or f_eta against 1.

    Concave utility means eps < 1; a weighting function is convex when
    eta > 1 (more weight concentrated on the poor).
    """
    model = fit.params.model
    if isinstance(model, UtilitarianModel):
        v = model.epsilon
    elif isinstance(model, ExtendedGiniModel):
        v = model.eta
    else:
        raise NotParametric("shape classification needs a parametric fit")
    if v < 1 - _SHAPE_TOL:
        return SHAPE_CONCAVE
    if v > 1 + _SHAPE_TOL:
        return SHAPE_CONVEX
    return SHAPE_LINEAR


def aic(fit: FitResult) -> float:
    """2k - 2 loglik; k counts alpha, the core parameters and both taus."""
    if fit.model == MODEL_NONPARAM:
        k = len(fit.params.model.betas) + 3
    else:
        k = 4
    return 2.0 * k - 2.0 * fit.log_likelihood


def aic_compare(fit_u: FitResult, fit_g: FitResult) -> str:
    """Pick the parametric model with the lower AIC; tie within 1e-9."""
    if (fit_u.session_id != fit_g.session_id
            or fit_u.n_obs != fit_g.n_obs):
        raise DataMismatch("fits compare different data")
    a_u = aic(fit_u)
    a_g = aic(fit_g)
    if abs(a_u - a_g) <= _AIC_TIE_TOL:
        return "tie"
    return "Utilitarian" if a_u < a_g else "ExtendedGini"
