"""Synthetic respondents with known welfare preferences.

Respondents draw choices from the exact generative model the estimator
inverts: latent judgement Delta + z with z ~ N(0,1) against the thresholds.
The module produces in-memory records for recovery experiments and CSV files
in the survey export schema, both deterministic in the respondent seeds.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtr

from . import records
from .core import (
    GridWeighting,
    PowerWeighting,
    classify_weighting,
    welfare_extended_gini,
    welfare_utilitarian,
)
from .fitting import FitResult, SannConfig, fit_population
from .probit import (
    MODEL_GINI,
    MODEL_NONPARAM,
    MODEL_UTIL,
    ExtendedGiniModel,
    NonParametricModel,
    ProbitParams,
    QuestionDelta,
    UtilitarianModel,
    model_kind,
    question_delta,
    respondent_data,
)
from .sessions import draw_session_orders
from .transfers import QuestionPair, build_catalog


@dataclass(frozen=True)
class SyntheticRespondent:
    id: str
    true_model: object
    true_alpha: float
    true_tau1: float
    true_tau2: float
    seed: int

    def __post_init__(self):
        # delegate constraint checking to the parameter container
        ProbitParams(self.true_alpha, self.true_model, self.true_tau1,
                     self.true_tau2)

    def params(self) -> ProbitParams:
        return ProbitParams(self.true_alpha, self.true_model,
                            self.true_tau1, self.true_tau2)

    def weighting(self):
        """The implied weighting function, or None for utilitarian truths."""
        if isinstance(self.true_model, ExtendedGiniModel):
            return PowerWeighting(self.true_model.eta)
        if isinstance(self.true_model, NonParametricModel):
            return GridWeighting(self.true_model.grid)
        return None


def _welfare_delta(params: ProbitParams, a, b) -> float:
    """Latent difference via welfare levels; valid for unequal means too."""
    m = params.model
    if isinstance(m, UtilitarianModel):
        return params.alpha * (welfare_utilitarian(b, m.epsilon)
                               - welfare_utilitarian(a, m.epsilon))
    if isinstance(m, ExtendedGiniModel):
        f = PowerWeighting(m.eta)
    else:
        f = GridWeighting(m.grid)
    return params.alpha * (welfare_extended_gini(b, f)
                           - welfare_extended_gini(a, f))


def pair_delta(params: ProbitParams, q: QuestionPair) -> float:
    if q.transfer is None:
        return _welfare_delta(params, q.a, q.b)
    return question_delta(params, QuestionDelta.from_pair(q.id, q.a, q.b))


def choice_probabilities(params: ProbitParams, q: QuestionPair) -> tuple:
    """Closed-form (P_A, P_Equivalent, P_B) for one catalog pair."""
    delta = pair_delta(params, q)
    p0 = float(ndtr(params.tau1 - delta))
    p1 = float(ndtr(params.tau2 - delta)) - p0
    p2 = float(ndtr(delta - params.tau2))
    return p0, p1, p2


def _draw_choice(latent: float, tau1: float, tau2: float) -> str:
    if latent < tau1:
        return "A"
    if latent > tau2:
        return "B"
    return "Equivalent"


def simulate_responses(r: SyntheticRespondent, catalog,
                       replicates: int = 1,
                       noise_on_tests: bool = False) -> list:
    """Choice records for every catalog question, `replicates` times over.

    Test questions get the error-free answer B unless `noise_on_tests`
    routes them through the same latent draw as real comparisons.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    params = r.params()
    rng = np.random.default_rng(np.random.SeedSequence([int(r.seed)]))
    deltas = {q.id: (None if q.transfer is None and not noise_on_tests
                     else pair_delta(params, q)) for q in catalog}
    out = []
    for rep in range(replicates):
        zs = rng.standard_normal(len(catalog))
        for q, z in zip(catalog, zs):
            delta = deltas[q.id]
            if delta is None:
                choice = "B"
            else:
                choice = _draw_choice(delta + z, params.tau1, params.tau2)
            out.append({"question_id": q.id, "choice": choice,
                        "replicate": rep})
    return out


def draw_profile(rng) -> dict:
    """One demographic profile drawn from the published sample shares."""
    profile = {}
    for fieldname in records.PROFILE_FIELDS:
        labels = records.category_labels(fieldname)
        shares = records.category_shares(fieldname)
        profile[fieldname] = labels[rng.choice(len(labels), p=shares)]
    return profile


def text_answers_for(r: SyntheticRespondent) -> dict:
    """Likert answers implied by the true preferences.

    Class members agree strongly with their class statements; utilitarian
    respondents have no weighting function and answer 'no opinion'.
    """
    f = r.weighting()
    if f is None:
        levels = {code: 3 for code in ("PT", "UL", "UR", "URL")}
    else:
        member = classify_weighting(f, 5)
        flags = {"URL": member.in_URL, "UR": member.in_UR,
                 "UL": member.in_UL, "PT": member.in_PT}
        levels = {code: 5 if flags[code] else 2 for code in flags}
    levels["Clarity"] = 4
    return levels


def class_signature(f, n: int = 5, tol: float = None) -> str:
    """Compact membership key like 'URL,UR,UL' or 'none'."""
    member = (classify_weighting(f, n) if tol is None
              else classify_weighting(f, n, tol=tol))
    parts = [name for name, ok in (("URL", member.in_URL),
                                   ("UR", member.in_UR),
                                   ("UL", member.in_UL),
                                   ("PT", member.in_PT)) if ok]
    return ",".join(parts) if parts else "none"


# -- populations -----------------------------------------------------------

def _derived_seed(master_seed: int, i: int) -> int:
    return int(np.random.SeedSequence([int(master_seed), i])
               .generate_state(1, np.uint64)[0])


def _model_from_group(group: dict):
    kind = group["model"]
    if kind == MODEL_UTIL:
        return UtilitarianModel(float(group["epsilon"]))
    if kind == MODEL_GINI:
        return ExtendedGiniModel(float(group["eta"]))
    if kind == MODEL_NONPARAM:
        grid = [float(v) for v in group["grid"]]
        w = np.arange(len(grid), 0, -1) / (len(grid) + 1)
        betas = tuple(np.asarray(grid)[::-1] - w)
        return NonParametricModel(betas)
    raise ValueError(f"unknown model kind {kind!r}")


def build_population(spec: dict) -> list:
    """Expand a population spec into respondents with derived seeds.

    Spec layout: {"seed": int, "groups": [{"count": int, "model": kind,
    <model params>, "alpha": a, "tau1": t1, "tau2": t2}, ...]}.
    """
    master = int(spec.get("seed", 0))
    out = []
    i = 0
    for group in spec["groups"]:
        model = _model_from_group(group)
        for _ in range(int(group["count"])):
            out.append(SyntheticRespondent(
                id=f"s{i:05d}",
                true_model=model,
                true_alpha=float(group.get("alpha", 1.0)),
                true_tau1=float(group.get("tau1", -0.1)),
                true_tau2=float(group.get("tau2", 0.1)),
                seed=_derived_seed(master, i)))
            i += 1
    return out


def load_population_spec(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return build_population(json.load(fh))


# -- export-shaped simulation ----------------------------------------------

def simulate_session_rows(r: SyntheticRespondent, catalog_index,
                          block_questions, replicates: int = 1,
                          noise_on_tests: bool = False):
    """Response rows and the session row for one respondent.

    The respondent walks a real protocol draw: y1 first, three shuffled
    blocks after it, questions shuffled within blocks, tests answered B.
    """
    params = r.params()
    block_order, question_order = draw_session_orders(int(r.seed),
                                                      block_questions)
    rng = np.random.default_rng(np.random.SeedSequence([int(r.seed), 1]))
    rows = []
    errors = 0
    for rep in range(replicates):
        for block in block_order:
            for qid in question_order[block]:
                q = catalog_index[qid]
                if q.transfer is None and not noise_on_tests:
                    choice = "B"
                else:
                    z = float(rng.standard_normal())
                    choice = _draw_choice(pair_delta(params, q) + z,
                                          params.tau1, params.tau2)
                if q.transfer is None and choice != "B" and rep == 0:
                    errors += 1
                rows.append({"session_id": r.id, "block": q.block,
                             "question_id": qid, "label": q.label,
                             "choice": choice, "revised": "false"})
    profile = draw_profile(
        np.random.default_rng(np.random.SeedSequence([int(r.seed), 2])))
    session_row = {"session_id": r.id, "error_count": str(errors)}
    session_row.update(profile)
    text = text_answers_for(r)
    for code, col in zip(records.TEXT_STATEMENTS, records.TEXT_COLUMNS):
        session_row[col] = str(text[code])
    return rows, session_row


def simulate_population_files(respondents: Sequence[SyntheticRespondent],
                              out_dir, replicates: int = 1,
                              catalog=None,
                              noise_on_tests: bool = False) -> tuple:
    """responses.csv + sessions.csv in the survey export schema."""
    catalog = list(catalog) if catalog is not None else build_catalog()
    index = {q.id: q for q in catalog}
    block_questions = {}
    for q in catalog:
        block_questions.setdefault(q.block, []).append(q.id)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    responses_path = out_dir / "responses.csv"
    sessions_path = out_dir / "sessions.csv"
    with responses_path.open("w", newline="", encoding="utf-8") as rfh, \
            sessions_path.open("w", newline="", encoding="utf-8") as sfh:
        rw = csv.DictWriter(rfh, fieldnames=records.RESPONSES_CSV_COLUMNS)
        sw = csv.DictWriter(sfh, fieldnames=records.SESSIONS_CSV_COLUMNS)
        rw.writeheader()
        sw.writeheader()
        for r in respondents:
            rows, session_row = simulate_session_rows(
                r, index, block_questions, replicates=replicates,
                noise_on_tests=noise_on_tests)
            rw.writerows(rows)
            sw.writerow(session_row)
    return responses_path, sessions_path


# -- recovery experiments ----------------------------------------------------

@dataclass
class RecoveryConfig:
    respondents: Sequence[SyntheticRespondent]
    replicates: int = 25
    optimizers: tuple = ("bfgs",)
    fit_true_family: bool = True
    classify_nonparametric: bool = True
    sann_config: Optional[SannConfig] = None
    catalog: Optional[list] = None


@dataclass
class RecoveryReport:
    n_respondents: int
    parameter_stats: dict           # (optimizer, param) -> stats dict
    confusion: dict                 # (optimizer, true_sig, est_sig) -> count
    nonconverged: dict              # optimizer -> count
    estimates: dict                 # (optimizer, model, respondent) -> FitResult


_PARAM_OF_FAMILY = {MODEL_UTIL: "epsilon", MODEL_GINI: "eta"}


def _true_param(r: SyntheticRespondent):
    if isinstance(r.true_model, UtilitarianModel):
        return "epsilon", r.true_model.epsilon
    if isinstance(r.true_model, ExtendedGiniModel):
        return "eta", r.true_model.eta
    return None, None


def _fitted_param(fit: FitResult):
    m = fit.params.model
    if isinstance(m, UtilitarianModel):
        return m.epsilon
    if isinstance(m, ExtendedGiniModel):
        return m.eta
    return None


def recovery_experiment(config: RecoveryConfig) -> RecoveryReport:
    catalog = (list(config.catalog) if config.catalog is not None
               else build_catalog())
    index = {q.id: q for q in catalog}
    respondents = list(config.respondents)
    if not respondents:
        return RecoveryReport(0, {}, {}, {}, {})

    datasets = []
    for r in respondents:
        recs = simulate_responses(r, catalog, replicates=config.replicates)
        datasets.append(respondent_data(r.id, recs, index, seed=r.seed))

    estimates = {}
    nonconverged = {}
    errors_by_param = {}
    confusion = {}
    for optimizer in config.optimizers:
        families = set()
        if config.fit_true_family:
            families.update(model_kind(r.true_model) for r in respondents)
        if config.classify_nonparametric:
            families.add(MODEL_NONPARAM)
        fits_by_family = {}
        for family in sorted(families):
            subset = [d for d, r in zip(datasets, respondents)
                      if family == MODEL_NONPARAM
                      or model_kind(r.true_model) == family]
            fits = fit_population(subset, family, optimizer=optimizer,
                                  sann_config=config.sann_config)
            fits_by_family[family] = {f.session_id: f for f in fits}
        for r in respondents:
            family = model_kind(r.true_model)
            if config.fit_true_family:
                fit = fits_by_family[family][r.id]
                estimates[(optimizer, family, r.id)] = fit
                if not fit.converged:
                    nonconverged[optimizer] = nonconverged.get(optimizer,
                                                               0) + 1
                name, truth = _true_param(r)
                if name is not None and fit.converged:
                    errors_by_param.setdefault((optimizer, name), []).append(
                        _fitted_param(fit) - truth)
            if config.classify_nonparametric:
                fit = fits_by_family[MODEL_NONPARAM][r.id]
                estimates[(optimizer, MODEL_NONPARAM, r.id)] = fit
                truth_f = r.weighting()
                if truth_f is not None:
                    true_sig = class_signature(truth_f)
                    est_sig = class_signature(
                        GridWeighting(fit.params.model.grid), tol=1e-6)
                    key = (optimizer, true_sig, est_sig)
                    confusion[key] = confusion.get(key, 0) + 1

    parameter_stats = {}
    for key, errs in errors_by_param.items():
        arr = np.asarray(errs)
        parameter_stats[key] = {
            "bias": float(arr.mean()),
            "rmse": float(np.sqrt((arr ** 2).mean())),
            "medae": float(np.median(np.abs(arr))),
            "n": int(arr.size),
        }
    return RecoveryReport(len(respondents), parameter_stats, confusion,
                          nonconverged, estimates)
