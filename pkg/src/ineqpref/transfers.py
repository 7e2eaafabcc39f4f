"""Transfer vectors, their taxonomy, and the 55-question catalog.

A transfer t acts on a sorted base distribution y as x = y + t.  The four
shapes of equalising transfers are distinguished by who participates:

* URL: every individual poorer than the recipient receives the same amount
  and every individual richer than the donor gives the same amount,
* UR: single recipient, uniform giving by everyone richer than the donor,
* UL: uniform receiving by everyone poorer than the recipient, single donor,
* PT: plain progressive transfer between one recipient and one richer donor.

Labels follow the strict partition used by the questionnaire tables:
URL / UR-not-URL / UL-not-URL / PT-neither.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .core import IncomeDistribution, as_sorted_array
from .errors import (
    LengthMismatch,
    NegativeIncome,
    RankReversal,
    TiedIncomes,
    UnsupportedArity,
)

_TOL = 1e-9


@dataclass(frozen=True)
class TransferVector:
    """Mean-preserving, not-all-zero vector of per-rank income changes."""

    deltas: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.deltas)
        if len(vals) < 2:
            raise ValueError("transfer needs at least two positions")
        if all(abs(v) <= _TOL for v in vals):
            raise ValueError("all-zero vector is not a transfer")
        if abs(math.fsum(vals)) > _TOL:
            raise ValueError("transfer must be mean-preserving (sum zero)")
        object.__setattr__(self, "deltas", vals)

    @property
    def n(self) -> int:
        return len(self.deltas)


class TransferLabel(Enum):
    URL = "URL"
    UR_STRICT = "UR"
    UL_STRICT = "UL"
    PT_STRICT = "PT"
    NOT_EQUALISING = "NotEqualising"

    def __str__(self) -> str:  # CSV/table display
        return self.value


def apply_transfer(y, t: TransferVector) -> IncomeDistribution:
    """Return y + t, refusing rank reversals and negative incomes."""
    ys = as_sorted_array(y)
    if ys.size != t.n:
        raise LengthMismatch("transfer arity differs from distribution size")
    xs = ys + np.asarray(t.deltas)
    if np.any(xs < -_TOL):
        raise NegativeIncome("transfer drives an income below zero")
    if np.any(np.diff(xs) < -_TOL):
        raise RankReversal("transfer does not preserve the income ranks")
    return IncomeDistribution(tuple(np.maximum(xs, 0.0)))


def _uniform(values: Sequence[float]) -> bool:
    return max(values) - min(values) <= _TOL


def _shape_tests(t: TransferVector) -> dict:
    """Structural tests of Definitions 2-4 against the rank positions.

    Zero-sum makes the balance conditions (h*delta = (n-k+1)*eps etc.)
    automatic, so only the participation pattern is examined.
    """
    d = t.deltas
    n = t.n
    pos = [i for i, v in enumerate(d) if v > _TOL]
    neg = [i for i, v in enumerate(d) if v < -_TOL]
    prefix = pos == list(range(len(pos))) and pos and _uniform([d[i] for i in pos])
    suffix = (neg == list(range(n - len(neg), n)) and neg
              and _uniform([d[i] for i in neg]))
    progressive = bool(pos and neg and max(pos) < min(neg))
    return {
        "URL": bool(prefix and suffix and progressive),
        "UR": bool(len(pos) == 1 and suffix and progressive),
        "UL": bool(prefix and len(neg) == 1 and progressive),
        "PT": bool(len(pos) == 1 and len(neg) == 1 and progressive),
    }


def classify_transfer(y, t: TransferVector) -> TransferLabel:
    """Strict Table-7 label of t on base distribution y.

    Requires a strictly increasing y (catalog distributions are; ties would
    make rank positions ambiguous) and a rank-preserving application.
    """
    ys = as_sorted_array(y)
    if np.any(np.diff(ys) <= _TOL):
        raise TiedIncomes("classification requires strictly increasing incomes")
    apply_transfer(ys, t)  # precondition: raises on rank reversal / negativity
    shape = _shape_tests(t)
    if shape["URL"]:
        return TransferLabel.URL
    if shape["UR"]:
        return TransferLabel.UR_STRICT
    if shape["UL"]:
        return TransferLabel.UL_STRICT
    if shape["PT"]:
        return TransferLabel.PT_STRICT
    return TransferLabel.NOT_EQUALISING


# Recipient/donor rank pairs (0-based) of the ten unit transfers, in
# questionnaire order t1..t10.
_UNIT_PAIRS = (
    (0, 4),                    # t1   URL
    (1, 4), (2, 4), (3, 4),    # t2-4 UR
    (0, 3), (0, 2), (0, 1),    # t5-7 UL
    (2, 3), (1, 2), (1, 3),    # t8-10 PT
)


def enumerate_unit_transfers(y) -> list:
    """The ten single-unit two-person transfers with their strict labels."""
    ys = as_sorted_array(y)
    if ys.size != 5:
        raise UnsupportedArity("unit-transfer enumeration is defined for n = 5")
    if np.any(np.diff(ys) <= _TOL):
        raise TiedIncomes("enumeration requires strictly increasing incomes")
    out = []
    for recipient, donor in _UNIT_PAIRS:
        deltas = [0.0] * 5
        deltas[recipient] = 1.0
        deltas[donor] = -1.0
        t = TransferVector(tuple(deltas))
        out.append((t, classify_transfer(ys, t)))
    return out


# -- question catalog ----------------------------------------------------------

INITIAL_DISTRIBUTIONS = {
    "y1": (2, 6, 10, 14, 18),
    "y2": (2, 4, 14, 16, 18),
    "y3": (2, 4, 6, 16, 18),
    "y4": (2, 8, 10, 12, 18),
    "y5": (2, 4, 10, 16, 18),
}

BLOCK_IDS = tuple(INITIAL_DISTRIBUTIONS)

EGALITARIAN = (10, 10, 10, 10, 10)

TEST_LABEL = "TEST"


@dataclass(frozen=True)
class QuestionPair:
    """One questionnaire item: compare pre-transfer A with post-transfer B.

    Transfer pairs preserve the block mean (B = A + t, t zero-sum).  Test
    items always present the flat (10,...,10) vector as B, which matches the
    questionnaire even for the two blocks whose mean is not 10.
    """

    id: str
    block: str
    a: tuple
    b: tuple
    transfer: Optional[TransferVector]
    label: str

    @property
    def is_test(self) -> bool:
        return self.transfer is None


def build_catalog() -> list:
    """All 55 questions: 10 unit transfers plus one test item per block."""
    catalog = []
    for block, base in INITIAL_DISTRIBUTIONS.items():
        for k, (t, lab) in enumerate(enumerate_unit_transfers(base), start=1):
            b = tuple(int(v) for v in apply_transfer(base, t).incomes)
            catalog.append(QuestionPair(
                id=f"{block}+t{k}", block=block, a=base, b=b,
                transfer=t, label=lab.value,
            ))
        catalog.append(QuestionPair(
            id=f"TEST-{block}", block=block, a=base, b=EGALITARIAN,
            transfer=None, label=TEST_LABEL,
        ))
    return catalog


def catalog_by_id(catalog=None) -> dict:
    return {q.id: q for q in (catalog if catalog is not None else build_catalog())}


CATALOG_CSV_COLUMNS = (
    ["id", "block"]
    + [f"A{i}" for i in range(1, 6)]
    + [f"B{i}" for i in range(1, 6)]
    + [f"t{i}" for i in range(1, 6)]
    + ["label"]
)


def catalog_csv_rows(catalog=None) -> list:
    """Rows for the catalog CSV contract (test rows leave t1..t5 blank)."""
    rows = []
    for q in (catalog if catalog is not None else build_catalog()):
        deltas = (
            [str(int(v)) for v in q.transfer.deltas] if q.transfer else [""] * 5
        )
        rows.append(
            [q.id, q.block]
            + [str(v) for v in q.a]
            + [str(v) for v in q.b]
            + deltas
            + [q.label]
        )
    return rows


def catalog_to_json(catalog=None) -> str:
    items = []
    for q in (catalog if catalog is not None else build_catalog()):
        items.append({
            "id": q.id,
            "block": q.block,
            "a": list(q.a),
            "b": list(q.b),
            "transfer": list(int(v) for v in q.transfer.deltas) if q.transfer else None,
            "label": q.label,
        })
    return json.dumps(items, indent=2)


def catalog_from_json(text: str) -> list:
    out = []
    for item in json.loads(text):
        transfer = (TransferVector(tuple(item["transfer"]))
                    if item.get("transfer") else None)
        out.append(QuestionPair(
            id=item["id"], block=item["block"], a=tuple(item["a"]),
            b=tuple(item["b"]), transfer=transfer, label=item["label"],
        ))
    return out
