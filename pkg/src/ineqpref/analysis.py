"""Acceptance-rate tables and equality tests on exported survey data.

Inputs are the export rows (responses.csv, sessions.csv) as lists of string
dicts.  Choices map to verdicts: B accepts the transfer, A rejects it, and
Equivalent is neutral.  Chi-square p-values are computed from a hand-rolled
regularized incomplete gamma and cross-checked against scipy on every call;
the two routes are kept separate deliberately.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as _scipy_stats

from . import records
from .errors import DegenerateTable, EmptyStratum

VERDICTS = ("Accepted", "Rejected", "Neutrality")
_CHOICE_COLUMN = {"B": 0, "A": 1, "Equivalent": 2}

LABEL_ORDER = ("PT", "UR", "UL", "URL", "NotEqualising")
LABEL_DESCRIPTIONS = {
    "PT": "Two-individual progressive transfers",
    "UR": "Transfers taken from the richest",
    "UL": "Transfers given to the poorest",
    "URL": "Composite progressive transfers",
    "NotEqualising": "Transfers outside the equalising classes",
}
ALL_TRANSFERS = "All transfers"
TEST_LABEL = "TEST"

SMALL_STRATUM = 5


# -- ingestion ---------------------------------------------------------------

def load_responses_csv(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_sessions_csv(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def restricted_sample(responses: Sequence[dict],
                      sessions: Sequence[dict]) -> Tuple[list, list]:
    """Keep only sessions that answered every test question correctly."""
    keep = {row["session_id"] for row in sessions
            if row.get("error_count") == "0"}
    return ([r for r in responses if r["session_id"] in keep],
            [s for s in sessions if s["session_id"] in keep])


def _session_lookup(sessions: Optional[Sequence[dict]]) -> Dict[str, dict]:
    return {row["session_id"]: row for row in sessions or ()}


def _group_of(row: dict, stratify_by: Optional[str],
              lookup: Dict[str, dict]) -> Optional[str]:
    if stratify_by is None:
        return "All respondents"
    if stratify_by == "block":
        return row["block"]
    session = lookup.get(row["session_id"])
    if session is None:
        return None
    value = session.get(stratify_by, "")
    return value if value else "(missing)"


# -- acceptance tables -------------------------------------------------------

@dataclass(frozen=True)
class AcceptanceRow:
    group: str
    label: str
    n: int
    accepted: float
    rejected: float
    neutral: float


@dataclass
class AcceptanceTable:
    rows: List[AcceptanceRow]
    stratify_by: Optional[str] = None
    warnings: List[str] = field(default_factory=list)

    def row(self, group: str, label: str) -> AcceptanceRow:
        for r in self.rows:
            if r.group == group and r.label == label:
                return r
        raise KeyError((group, label))


def _percent_row(group: str, label: str, counts: np.ndarray) -> AcceptanceRow:
    n = int(counts.sum())
    pct = counts * 100.0 / n
    return AcceptanceRow(group=group, label=label, n=n,
                         accepted=float(pct[0]), rejected=float(pct[1]),
                         neutral=float(pct[2]))


def acceptance_table(responses: Sequence[dict],
                     sessions: Optional[Sequence[dict]] = None,
                     stratify_by: Optional[str] = None,
                     expected_strata: Optional[Sequence[str]] = None,
                     strict_strata: bool = False) -> AcceptanceTable:
    """Percent Accepted/Rejected/Neutrality per transfer class and stratum.

    Pass a profile field name or "block" to stratify.  Expected strata with
    no data are reported in `warnings` (or raised when `strict_strata`).
    Test rows never enter the table.
    """
    lookup = _session_lookup(sessions)
    if stratify_by not in (None, "block") and not lookup:
        raise ValueError("profile stratification needs the session rows")
    counts: Dict[str, Dict[str, np.ndarray]] = {}
    for row in responses:
        if row["label"] == TEST_LABEL:
            continue
        group = _group_of(row, stratify_by, lookup)
        if group is None:
            continue
        per_label = counts.setdefault(group, {})
        for key in (row["label"], ALL_TRANSFERS):
            per_label.setdefault(key, np.zeros(3))[
                _CHOICE_COLUMN[row["choice"]]] += 1

    warnings: List[str] = []
    if expected_strata is None and stratify_by in records.PROFILE_FIELDS:
        expected_strata = records.category_labels(stratify_by)
    for stratum in expected_strata or ():
        if stratum not in counts:
            message = f"empty stratum: {stratify_by}={stratum!r}"
            if strict_strata:
                raise EmptyStratum(message)
            warnings.append(message)

    rows = []
    for group in sorted(counts):
        per_label = counts[group]
        total = int(per_label[ALL_TRANSFERS].sum())
        if total < SMALL_STRATUM:
            warnings.append(
                f"stratum {group!r} has only {total} responses")
        for label in LABEL_ORDER:
            if label in per_label:
                rows.append(_percent_row(group, label, per_label[label]))
        rows.append(_percent_row(group, ALL_TRANSFERS,
                                 per_label[ALL_TRANSFERS]))
    return AcceptanceTable(rows=rows, stratify_by=stratify_by,
                           warnings=warnings)


def text_acceptance_table(sessions: Sequence[dict],
                          clarity_filter: bool = False) -> AcceptanceTable:
    """Agreement shares for the four principle statements.

    Levels 4-5 count as acceptance, 1-2 as rejection, 3 as neutral.  With
    `clarity_filter` only sessions that found the questions clear (4-5 on
    the clarity item) are kept.
    """
    kept = []
    for row in sessions:
        if clarity_filter and row.get("text_clarity") not in ("4", "5"):
            continue
        kept.append(row)
    rows = []
    warnings: List[str] = []
    for code, column in zip(records.TEXT_STATEMENTS, records.TEXT_COLUMNS):
        if code == "Clarity":
            continue
        counts = np.zeros(3)
        for row in kept:
            level = row.get(column)
            if not level:
                continue
            level = int(level)
            counts[0 if level >= 4 else (1 if level <= 2 else 2)] += 1
        if counts.sum() == 0:
            warnings.append(f"no answers for statement {code}")
            continue
        rows.append(_percent_row("All respondents", code, counts))
    return AcceptanceTable(rows=rows, stratify_by="statement",
                           warnings=warnings)


# -- chi-square equality tests ----------------------------------------------

def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).

    Series expansion of the lower function below the a + 1 switchover,
    modified Lentz continued fraction above it.
    """
    if a <= 0 or x < 0 or not (math.isfinite(a) and math.isfinite(x)):
        raise ValueError("need a > 0 and finite x >= 0")
    if x == 0.0:
        return 1.0
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        rank = a
        for _ in range(1000):
            rank += 1.0
            term *= x / rank
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return 1.0 - total * math.exp(log_prefactor)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(log_prefactor)


def chi2_sf(statistic: float, df: int) -> float:
    return regularized_gamma_q(df / 2.0, statistic / 2.0)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float
    expected: np.ndarray
    groups: tuple
    pooled: bool = False


def pearson_chi_square(observed: np.ndarray, groups: Sequence[str],
                       pooled: bool = False) -> ChiSquareResult:
    """Pearson test of homogeneity on a groups x verdicts count table."""
    obs = np.asarray(observed, dtype=float)
    if obs.ndim != 2 or obs.shape[0] < 2 or obs.shape[1] < 2:
        raise DegenerateTable("need at least a 2 x 2 table")
    if np.any(obs < 0):
        raise ValueError("counts must be non-negative")
    row_sums = obs.sum(axis=1)
    col_sums = obs.sum(axis=0)
    if np.any(row_sums == 0) or np.any(col_sums == 0):
        raise DegenerateTable("a table margin is zero")
    expected = np.outer(row_sums, col_sums) / obs.sum()
    statistic = float(((obs - expected) ** 2 / expected).sum())
    df = (obs.shape[0] - 1) * (obs.shape[1] - 1)
    p_value = chi2_sf(statistic, df)
    p_check = float(_scipy_stats.chi2.sf(statistic, df))
    assert abs(p_value - p_check) <= 1e-10 + 1e-8 * p_check
    return ChiSquareResult(statistic=statistic, df=df, p_value=p_value,
                           expected=expected, groups=tuple(groups),
                           pooled=pooled)


def verdict_counts(responses: Sequence[dict],
                   stratify_by: str,
                   sessions: Optional[Sequence[dict]] = None,
                   label: Optional[str] = None) -> Tuple[list, np.ndarray]:
    """Group names and their Accepted/Rejected/Neutrality counts."""
    lookup = _session_lookup(sessions)
    if stratify_by != "block" and not lookup:
        raise ValueError("profile stratification needs the session rows")
    counts: Dict[str, np.ndarray] = {}
    for row in responses:
        if row["label"] == TEST_LABEL:
            continue
        if label is not None and row["label"] != label:
            continue
        group = _group_of(row, stratify_by, lookup)
        if group is None:
            continue
        counts.setdefault(group, np.zeros(3))[
            _CHOICE_COLUMN[row["choice"]]] += 1
    groups = sorted(counts)
    return groups, np.array([counts[g] for g in groups])


def equality_test(responses: Sequence[dict], stratify_by: str,
                  sessions: Optional[Sequence[dict]] = None,
                  label: Optional[str] = None) -> ChiSquareResult:
    """Global homogeneity of verdict shares across all strata."""
    groups, counts = verdict_counts(responses, stratify_by, sessions, label)
    return pearson_chi_square(counts, groups)


def pairwise_equality_tests(responses: Sequence[dict], stratify_by: str,
                            sessions: Optional[Sequence[dict]] = None,
                            label: Optional[str] = None) -> dict:
    """Acceptance-vs-rest 2 x 2 tests for every pair of strata (df = 1)."""
    groups, counts = verdict_counts(responses, stratify_by, sessions, label)
    pooled = np.stack([counts[:, 0], counts[:, 1] + counts[:, 2]], axis=1)
    out = {}
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            pair = (groups[i], groups[j])
            out[pair] = pearson_chi_square(pooled[[i, j]], pair, pooled=True)
    return out
