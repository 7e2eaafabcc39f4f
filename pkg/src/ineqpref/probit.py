"""Ordered-probit likelihood for three social-welfare models.

A respondent compares pre-transfer A with post-transfer B.  The latent
judgement is Delta + z with z ~ N(0,1), where Delta is the welfare gain of B
under the respondent's model, scaled by alpha:

* utilitarian:    Delta = (alpha/n) sum_i [u_eps(x_i) - u_eps(y_i)]
* extended Gini:  Delta = alpha sum_{i>=2} [w_i^eta - w_i] d_i
* non-parametric: Delta = alpha sum_{i>=2} beta_i d_i

with w_i = (n-i+1)/n, d_i the change in the i-th rank gap, and
beta_i = f(w_i) - w_i.  Choices: A if the latent value falls below tau1,
Equivalent between the thresholds, B above tau2.

Two likelihood implementations coexist on purpose: a plain per-question
reference (`ordered_probit_loglik`) and a vectorised batch engine used by the
optimizers; tests pin them to each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import ndtr

from .core import PowerWeighting, welfare_extended_gini
from .errors import (
    ConstraintViolation,
    InvalidThresholds,
    MeanMismatch,
    NonPositiveIncome,
)

PROB_FLOOR = 1e-300
_CONSTRAINT_TOL = 1e-9
# |series| switchover for the (x^eps - y^eps)/eps forms near eps = 0
_EPS_SERIES = 1e-4
_CLIP = 40.0  # exp argument clip; keeps SANN excursions finite

CHOICE_A, CHOICE_EQUIVALENT, CHOICE_B = 0, 1, 2
CHOICE_CODES = {"A": CHOICE_A, "Equivalent": CHOICE_EQUIVALENT, "B": CHOICE_B}
CHOICE_NAMES = {v: k for k, v in CHOICE_CODES.items()}


# -- model parameter containers -------------------------------------------------

@dataclass(frozen=True)
class UtilitarianModel:
    epsilon: float


@dataclass(frozen=True)
class ExtendedGiniModel:
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ConstraintViolation("eta must be positive")


@dataclass(frozen=True)
class NonParametricModel:
    """Deviations beta_i = f(w_i) - w_i for i = 2..n (w descending)."""

    betas: tuple

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        object.__setattr__(self, "betas", betas)
        m = len(betas)
        w = np.arange(m, 0, -1) / (m + 1)  # w_i descending, i = 2..n
        f = np.asarray(betas) + w
        if np.any(f < -_CONSTRAINT_TOL) or np.any(f > 1 + _CONSTRAINT_TOL):
            raise ConstraintViolation("implied grid leaves [0, 1]")
        if np.any(np.diff(f[::-1]) < -_CONSTRAINT_TOL):
            raise ConstraintViolation("implied grid not non-decreasing")

    @property
    def grid(self) -> tuple:
        """Grid values f(1/n), ..., f((n-1)/n) in ascending abscissa order."""
        m = len(self.betas)
        w = np.arange(m, 0, -1) / (m + 1)
        return tuple((np.asarray(self.betas) + w)[::-1])


ModelParams = Union[UtilitarianModel, ExtendedGiniModel, NonParametricModel]

MODEL_UTIL = "util"
MODEL_GINI = "egini"
MODEL_NONPARAM = "nonparam"


def model_kind(model: ModelParams) -> str:
    if isinstance(model, UtilitarianModel):
        return MODEL_UTIL
    if isinstance(model, ExtendedGiniModel):
        return MODEL_GINI
    return MODEL_NONPARAM


@dataclass(frozen=True)
class ProbitParams:
    alpha: float
    model: ModelParams
    tau1: float
    tau2: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConstraintViolation("alpha must be positive")
        if self.tau1 > _CONSTRAINT_TOL or self.tau2 < -_CONSTRAINT_TOL:
            raise InvalidThresholds("thresholds must satisfy tau1 <= 0 <= tau2")
        if self.tau1 > self.tau2:
            raise InvalidThresholds("tau1 exceeds tau2")


# -- per-question welfare differences -------------------------------------------

def rank_gap_changes(x, y) -> np.ndarray:
    """d_i = (x_i - x_{i-1}) - (y_i - y_{i-1}) with x_0 = y_0 = 0."""
    xs = np.sort(np.asarray(x, dtype=float))
    ys = np.sort(np.asarray(y, dtype=float))
    if xs.size != ys.size:
        raise MeanMismatch("distributions must have equal length")
    if abs(xs.sum() - ys.sum()) > 1e-9 * max(1.0, abs(ys.sum())):
        raise MeanMismatch("rank-gap decomposition requires equal means")
    return np.diff(xs, prepend=0.0) - np.diff(ys, prepend=0.0)


@dataclass(frozen=True)
class QuestionDelta:
    """Pre-computed rank-gap decomposition of one catalog pair."""

    question_id: str
    x: tuple  # post-transfer (B)
    y: tuple  # pre-transfer (A)
    d: tuple

    @classmethod
    def from_pair(cls, question_id: str, a, b) -> "QuestionDelta":
        d = rank_gap_changes(b, a)
        return cls(question_id=question_id, x=tuple(float(v) for v in b),
                   y=tuple(float(v) for v in a), d=tuple(d))


def _descending_weights(n: int) -> np.ndarray:
    """w_i = (n-i+1)/n for i = 1..n."""
    return (np.arange(n, 0, -1, dtype=float)) / n


def delta_utilitarian(x, y, alpha: float, epsilon: float) -> float:
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if epsilon <= 0 and (np.any(xs <= 0) or np.any(ys <= 0)):
        raise NonPositiveIncome("delta requires positive incomes when eps <= 0")
    if epsilon == 0:
        s = float(np.sum(np.log(xs)) - np.sum(np.log(ys)))
    else:
        s = float((np.sum(xs ** epsilon) - np.sum(ys ** epsilon)) / epsilon)
    return alpha * s / xs.size


def delta_extended_gini(x, y, alpha: float, eta: float) -> float:
    """Rank-gap form; asserted against the welfare-difference form.

    The equality uses the mean-preservation of (x, y): the sum over i of
    w_i d_i telescopes to mu(x) - mu(y) = 0.
    """
    d = rank_gap_changes(x, y)
    n = d.size
    w = _descending_weights(n)
    by_gaps = alpha * float(((w ** eta - w) @ d))
    f = PowerWeighting(float(eta))
    by_welfare = alpha * (welfare_extended_gini(x, f) - welfare_extended_gini(y, f))
    assert abs(by_gaps - by_welfare) <= 1e-12 * max(1.0, abs(by_gaps)), \
        "rank-gap and welfare forms disagree"
    return by_gaps


def delta_nonparametric(x, y, alpha: float, betas) -> float:
    model = betas if isinstance(betas, NonParametricModel) else NonParametricModel(tuple(betas))
    d = rank_gap_changes(x, y)
    if len(model.betas) != d.size - 1:
        raise ConstraintViolation("betas arity must be n - 1")
    return alpha * float(np.asarray(model.betas) @ d[1:])


def question_delta(params: ProbitParams, q: QuestionDelta) -> float:
    """Latent welfare difference of one question under `params`."""
    m = params.model
    if isinstance(m, UtilitarianModel):
        return delta_utilitarian(q.x, q.y, params.alpha, m.epsilon)
    if isinstance(m, ExtendedGiniModel):
        d = np.asarray(q.d)
        w = _descending_weights(d.size)
        return params.alpha * float((w ** m.eta - w) @ d)
    return delta_nonparametric(q.x, q.y, params.alpha, m)


def ordered_probit_loglik(params: ProbitParams, deltas_and_choices) -> float:
    """Reference log-likelihood: sum over (question, choice) observations.

    Entries are (QuestionDelta, choice) or (precomputed delta, choice);
    choices are category codes 0/1/2 or the strings A/Equivalent/B.
    """
    if params.tau1 > params.tau2:
        raise InvalidThresholds("tau1 exceeds tau2")
    total = 0.0
    for q, choice in deltas_and_choices:
        gamma = CHOICE_CODES[choice] if isinstance(choice, str) else int(choice)
        delta = q if isinstance(q, (int, float)) else question_delta(params, q)
        p0 = ndtr(params.tau1 - delta)
        p1 = ndtr(params.tau2 - delta) - p0
        p2 = ndtr(delta - params.tau2)
        p = (p0, p1, p2)[gamma]
        total += math.log(max(p, PROB_FLOOR))
    return total


# -- batched likelihood engine ---------------------------------------------------

@dataclass
class RespondentData:
    """Grouped observations of one respondent on non-test catalog pairs.

    counts[q, gamma] is the number of times question q received choice gamma;
    replicated presentations therefore cost nothing in the likelihood.
    """

    session_id: str
    X: np.ndarray        # (Q, n) post-transfer
    Y: np.ndarray        # (Q, n) pre-transfer
    D: np.ndarray        # (Q, n) rank-gap changes
    counts: np.ndarray   # (Q, 3)
    seed: int = 0

    @property
    def n_obs(self) -> int:
        return int(self.counts.sum())

    @property
    def n_questions(self) -> int:
        return self.X.shape[0]

    def degenerate(self) -> bool:
        """All observations in a single choice category."""
        return int(np.count_nonzero(self.counts.sum(axis=0))) <= 1


def respondent_data(session_id: str, records, catalog_index, seed: int = 0
                    ) -> RespondentData:
    """Build grouped data from response records (dicts or (qid, choice) pairs).

    Test questions are skipped: they carry no welfare-difference information.
    """
    tally = {}
    for rec in records:
        if isinstance(rec, dict):
            qid, choice = rec["question_id"], rec["choice"]
        else:
            qid, choice = rec
        q = catalog_index[qid]
        if q.transfer is None:
            continue
        gamma = CHOICE_CODES[choice] if isinstance(choice, str) else int(choice)
        tally.setdefault(qid, np.zeros(3))[gamma] += 1
    qids = sorted(tally)
    X, Y, D, counts = [], [], [], []
    for qid in qids:
        q = catalog_index[qid]
        X.append(q.b)
        Y.append(q.a)
        D.append(rank_gap_changes(q.b, q.a))
        counts.append(tally[qid])
    return RespondentData(
        session_id=session_id,
        X=np.asarray(X, dtype=float).reshape(len(qids), -1),
        Y=np.asarray(Y, dtype=float).reshape(len(qids), -1),
        D=np.asarray(D, dtype=float).reshape(len(qids), -1),
        counts=np.asarray(counts, dtype=float).reshape(len(qids), 3),
        seed=seed,
    )


@dataclass
class BatchData:
    """Respondent data stacked along a batch axis (zero-count padding)."""

    X: np.ndarray       # (B, Q, n)
    Y: np.ndarray       # (B, Q, n)
    D: np.ndarray       # (B, Q, n)
    counts: np.ndarray  # (B, Q, 3)
    LX: np.ndarray      # (B, Q, n) log incomes, for the utilitarian family
    LY: np.ndarray


def stack_batch(datasets: Sequence[RespondentData]) -> BatchData:
    q_max = max(d.n_questions for d in datasets)
    n = datasets[0].X.shape[1]
    B = len(datasets)
    X = np.ones((B, q_max, n))
    Y = np.ones((B, q_max, n))
    D = np.zeros((B, q_max, n))
    counts = np.zeros((B, q_max, 3))
    for b, d in enumerate(datasets):
        q = d.n_questions
        X[b, :q] = d.X
        Y[b, :q] = d.Y
        D[b, :q] = d.D
        counts[b, :q] = d.counts
    with np.errstate(divide="ignore"):
        LX = np.log(X)
        LY = np.log(Y)
    return BatchData(X=X, Y=Y, D=D, counts=counts, LX=LX, LY=LY)


def n_free_params(family: str, n: int, alpha_free: bool) -> int:
    base = {MODEL_UTIL: 1, MODEL_GINI: 1, MODEL_NONPARAM: n}[family]
    return base + 2 + (1 if alpha_free else 0)


def initial_theta(family: str, n: int, alpha_free: bool) -> np.ndarray:
    core = {
        MODEL_UTIL: [0.5],
        MODEL_GINI: [math.log(2.0)],
        MODEL_NONPARAM: [0.0] * n,
    }[family]
    theta = ([0.0] if alpha_free else []) + core + [math.log(0.1)] * 2
    return np.asarray(theta, dtype=float)


def _clip_exp(v: np.ndarray) -> np.ndarray:
    return np.exp(np.clip(v, -_CLIP, _CLIP))


def _pow_sum_diff(LX, LY, eps, want_grad: bool):
    """S(eps) = sum_i (x_i^eps - y_i^eps)/eps per question, and dS/deps.

    `eps` has shape (B, 1); returns (B, Q) arrays.  Near eps = 0 a 4-term
    series in the log-income moments avoids cancellation.
    """
    small = np.abs(eps) < _EPS_SERIES
    eps_safe = np.where(small, 1.0, eps)[..., None]  # (B,1,1)
    ex = np.exp(np.clip(eps[..., None] * LX, -700, 700))
    ey = np.exp(np.clip(eps[..., None] * LY, -700, 700))
    s_exact = (ex.sum(-1) - ey.sum(-1)) / eps_safe[..., 0]
    moments = [((LX ** k).sum(-1) - (LY ** k).sum(-1)) for k in range(1, 5)]
    e = eps  # (B,1)
    s_series = (moments[0] + e * moments[1] / 2
                + e ** 2 * moments[2] / 6 + e ** 3 * moments[3] / 24)
    s = np.where(small, s_series, s_exact)
    if not want_grad:
        return s, None
    ds_exact = ((LX * ex).sum(-1) - (LY * ey).sum(-1)) / eps_safe[..., 0] \
        - s_exact / eps_safe[..., 0]
    ds_series = (moments[1] / 2 + e * moments[2] / 3 + e ** 2 * moments[3] / 8)
    return s, np.where(small, ds_series, ds_exact)


def batch_nll(family: str, theta: np.ndarray, batch: BatchData,
              alpha_free: bool, alpha_value: float = 1.0,
              want_grad: bool = False):
    """Negative log-likelihood (and gradient) over a batch of respondents.

    theta has shape (B, p) with layout [a?] + model core + [s1, s2] and the
    smooth reparameterization alpha = e^a, eta = e^g, tau1 = -e^s1,
    tau2 = e^s2.
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    B = theta.shape[0]
    n = batch.D.shape[2]
    o = 1 if alpha_free else 0
    alpha = _clip_exp(theta[:, 0])[:, None] if alpha_free \
        else np.full((B, 1), float(alpha_value))
    s1 = theta[:, -2]
    s2 = theta[:, -1]
    tau1 = -_clip_exp(s1)[:, None]
    tau2 = _clip_exp(s2)[:, None]
    w = _descending_weights(n)

    d_core = None  # dDelta/d(core params), per family
    if family == MODEL_UTIL:
        eps = theta[:, o:o + 1]
        S, dS = _pow_sum_diff(batch.LX, batch.LY, eps, want_grad)
        delta = alpha * S / n
        if want_grad:
            d_core = (alpha * dS / n)[..., None]  # (B, Q, 1)
    elif family == MODEL_GINI:
        g = theta[:, o:o + 1]
        eta = _clip_exp(g)
        weta = np.power(w[None, 1:], eta)        # (B, n-1)
        beta = weta - w[1:]
        delta = alpha * np.einsum("bi,bqi->bq", beta, batch.D[:, :, 1:])
        if want_grad:
            dbeta_dg = weta * np.log(w[None, 1:]) * eta  # chain through e^g
            d_core = (alpha * np.einsum(
                "bi,bqi->bq", dbeta_dg, batch.D[:, :, 1:]))[..., None]
    elif family == MODEL_NONPARAM:
        c = theta[:, o:o + n]
        c_shift = c - c.max(axis=1, keepdims=True)
        p = np.exp(c_shift)
        p /= p.sum(axis=1, keepdims=True)
        F = np.cumsum(p, axis=1)                 # F_k = f(k/n), k = 1..n
        fgrid = F[:, :n - 1][:, ::-1]            # f(w_i) for i = 2..n
        beta = fgrid - w[1:]
        delta = alpha * np.einsum("bi,bqi->bq", beta, batch.D[:, :, 1:])
    else:
        raise ValueError(f"unknown model family {family!r}")

    z1 = tau1 - delta
    z2 = tau2 - delta
    p0 = np.maximum(ndtr(z1), PROB_FLOOR)
    p2 = np.maximum(ndtr(-z2), PROB_FLOOR)
    p1 = np.maximum(ndtr(z2) - ndtr(z1), PROB_FLOOR)
    c0 = batch.counts[:, :, 0]
    c1 = batch.counts[:, :, 1]
    c2 = batch.counts[:, :, 2]
    nll = -(c0 * np.log(p0) + c1 * np.log(p1) + c2 * np.log(p2)).sum(axis=1)
    if not want_grad:
        return nll, None

    phi1 = np.exp(-0.5 * z1 ** 2) / math.sqrt(2 * math.pi)
    phi2 = np.exp(-0.5 * z2 ** 2) / math.sqrt(2 * math.pi)
    a0 = c0 / p0
    a1 = c1 / p1
    a2 = c2 / p2
    t1_term = phi1 * (a0 - a1)
    t2_term = phi2 * (a1 - a2)
    d_delta = t1_term + t2_term                  # dNLL/dDelta_q
    grad = np.zeros_like(theta)
    grad[:, -2] = -(t1_term.sum(axis=1)) * tau1[:, 0]   # dtau1/ds1 = tau1
    grad[:, -1] = -(t2_term.sum(axis=1)) * tau2[:, 0]   # dtau2/ds2 = tau2
    if alpha_free:
        grad[:, 0] = (d_delta * delta).sum(axis=1)      # dDelta/da = Delta
    if family in (MODEL_UTIL, MODEL_GINI):
        grad[:, o] = (d_delta[..., None] * d_core).sum(axis=(1, 2))
    else:
        # softmax chain: dF_k/dc_j = p_j (1{j<=k} - F_k)
        k_of_i = np.arange(n - 1, 0, -1)         # F index per i = 2..n
        ind = (np.arange(1, n + 1)[:, None] <= k_of_i[None, :]).astype(float)
        M = p[:, :, None] * (ind[None] - F[:, k_of_i - 1][:, None, :])
        T = np.einsum("bq,bqi->bi", d_delta, batch.D[:, :, 1:])
        grad[:, o:o + n] = alpha * np.einsum("bi,bji->bj", T, M)
    return nll, grad


def theta_to_params(family: str, theta: np.ndarray, n: int,
                    alpha_free: bool, alpha_value: float = 1.0) -> ProbitParams:
    theta = np.asarray(theta, dtype=float)
    o = 1 if alpha_free else 0
    alpha = float(_clip_exp(theta[0])) if alpha_free else float(alpha_value)
    tau1 = -float(_clip_exp(theta[-2]))
    tau2 = float(_clip_exp(theta[-1]))
    if family == MODEL_UTIL:
        model: ModelParams = UtilitarianModel(float(theta[o]))
    elif family == MODEL_GINI:
        model = ExtendedGiniModel(float(_clip_exp(theta[o])))
    else:
        c = theta[o:o + n] - np.max(theta[o:o + n])
        p = np.exp(c)
        p /= p.sum()
        F = np.cumsum(p)
        w = _descending_weights(n)
        fgrid = F[:n - 1][::-1]
        model = NonParametricModel(tuple(fgrid - w[1:]))
    return ProbitParams(alpha=alpha, model=model, tau1=tau1, tau2=tau2)
