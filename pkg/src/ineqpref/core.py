"""Income distributions, social welfare functions, and weighting-function classes.

Welfare is evaluated two ways: a utilitarian average of individual utilities
u_eps, and a rank-weighted ("extended Gini") sum driven by a weighting
function f on [0, 1].  Both induce an equally-distributed-equivalent income
and a relative inequality index; f(t) = t^2 recovers the classical Gini.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    GridArityMismatch,
    LengthMismatch,
    MeanMismatch,
    NonPositiveIncome,
    NonPositiveMean,
)

# Absolute tolerance for all class/dominance comparisons; catalog incomes are
# small integers and estimated grids are O(1), so an absolute scale is safe.
CLASS_TOL = 1e-9

# Required agreement between the two algebraic forms of the rank-weighted sum.
_FORM_TOL = 1e-12


@dataclass(frozen=True)
class IncomeDistribution:
    """Non-decreasingly ordered income vector for n >= 2 individuals.

    Inputs are sorted on construction (anonymity: only the multiset of
    incomes matters); ``order`` records the stable argsort permutation that
    produced the canonical ordering.
    """

    incomes: tuple
    order: tuple = field(default=(), compare=False)

    def __post_init__(self):
        vals = [float(v) for v in self.incomes]
        if len(vals) < 2:
            raise ValueError("a distribution needs at least two individuals")
        if any(not math.isfinite(v) for v in vals):
            raise ValueError("incomes must be finite")
        if any(v < 0 for v in vals):
            raise ValueError("incomes must be non-negative")
        perm = tuple(int(i) for i in np.argsort(vals, kind="stable"))
        object.__setattr__(self, "incomes", tuple(vals[i] for i in perm))
        object.__setattr__(self, "order", perm)

    @property
    def n(self) -> int:
        return len(self.incomes)


Incomes = Union[IncomeDistribution, Sequence[float]]


def as_sorted_array(x: Incomes) -> np.ndarray:
    """Coerce to a sorted float array, validating via IncomeDistribution."""
    if isinstance(x, IncomeDistribution):
        return np.asarray(x.incomes, dtype=float)
    return np.asarray(IncomeDistribution(tuple(x)).incomes, dtype=float)


def mean(x: Incomes) -> float:
    return float(np.mean(as_sorted_array(x)))


@dataclass(frozen=True)
class UtilityParam:
    """Inequality-aversion parameter of the utilitarian utility u_eps."""

    epsilon: float

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")


def _epsilon_of(p) -> float:
    return p.epsilon if isinstance(p, UtilityParam) else float(p)


def utility(values: np.ndarray, epsilon: float) -> np.ndarray:
    """u_eps(x) = x^eps / eps for eps != 0, ln x for eps = 0."""
    if epsilon <= 0 and np.any(values <= 0):
        raise NonPositiveIncome(
            "u_eps requires strictly positive incomes when eps <= 0"
        )
    if epsilon == 0:
        return np.log(values)
    return np.power(values, epsilon) / epsilon


def welfare_utilitarian(x: Incomes, p) -> float:
    """Average utility (1/n) sum u_eps(x_i)."""
    xs = as_sorted_array(x)
    return float(np.mean(utility(xs, _epsilon_of(p))))


@dataclass(frozen=True)
class PowerWeighting:
    """f(t) = t^eta, eta > 0.  eta = 2 characterises the Gini index."""

    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError("eta must be finite and > 0")


@dataclass(frozen=True)
class GridWeighting:
    """f given by its values at the interior abscissae 1/n, ..., (n-1)/n.

    Endpoints f(0) = 0 and f(1) = 1 are implicit; evaluation between grid
    points is by linear interpolation.
    """

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("grid needs at least one interior value")
        if vals[0] < -CLASS_TOL or vals[-1] > 1 + CLASS_TOL:
            raise ValueError("grid values must lie within [0, 1]")
        if any(b - a < -CLASS_TOL for a, b in zip(vals, vals[1:])):
            raise ValueError("grid values must be non-decreasing")
        object.__setattr__(self, "values", vals)

    @property
    def arity(self) -> int:
        return len(self.values) + 1


WeightingFunction = Union[PowerWeighting, GridWeighting]


def weighting_values(f: WeightingFunction, n: int) -> np.ndarray:
    """f sampled on the augmented grid {0, 1/n, ..., (n-1)/n, 1}."""
    if isinstance(f, GridWeighting):
        if f.arity != n:
            raise GridArityMismatch(
                f"grid has {f.arity - 1} interior points, expected {n - 1}"
            )
        return np.concatenate(([0.0], np.asarray(f.values, dtype=float), [1.0]))
    t = np.arange(n + 1, dtype=float) / n
    return np.power(t, f.eta)


def evaluate_weighting(f: WeightingFunction, t) -> np.ndarray:
    """Evaluate f pointwise on [0, 1] (linear interpolation for grids)."""
    t = np.asarray(t, dtype=float)
    if isinstance(f, PowerWeighting):
        return np.power(t, f.eta)
    knots = np.linspace(0.0, 1.0, f.arity + 1)
    return np.interp(t, knots, np.concatenate(([0.0], f.values, [1.0])))


def welfare_extended_gini(x: Incomes, f: WeightingFunction) -> float:
    """Rank-weighted welfare sum_i [f((n-i+1)/n) - f((n-i)/n)] x_i.

    Also evaluated in the equivalent increments form
    sum_i f((n-i+1)/n) (x_i - x_{i-1}) with x_0 = 0; the two must agree.
    """
    xs = as_sorted_array(x)
    n = xs.size
    fv = weighting_values(f, n)
    weights = np.diff(fv)[::-1]           # weight on x_i is f((n-i+1)/n)-f((n-i)/n)
    by_weights = float(weights @ xs)
    coefs = fv[1:][::-1]                  # coefficient of (x_i - x_{i-1})
    by_increments = float(coefs @ np.diff(xs, prepend=0.0))
    assert abs(by_weights - by_increments) <= _FORM_TOL * max(1.0, abs(by_weights)), \
        "weights and increments forms disagree"
    return by_weights


def ede_income(x: Incomes, spec) -> float:
    """Equally distributed equivalent income: W(x) = W(Xi, ..., Xi)."""
    xs = as_sorted_array(x)
    if isinstance(spec, (PowerWeighting, GridWeighting)):
        # W_f of a constant vector equals that constant.
        return welfare_extended_gini(xs, spec)
    eps = _epsilon_of(spec)
    if eps == 0:
        return float(np.exp(np.mean(np.log(xs))))
    if eps <= 0 and np.any(xs <= 0):
        raise NonPositiveIncome("EDE undefined at zero income for eps <= 0")
    return float(np.mean(np.power(xs, eps)) ** (1.0 / eps))


def relative_index(x: Incomes, spec) -> float:
    """Relative inequality index I(x) = 1 - Xi(x) / mu(x)."""
    mu = mean(x)
    if mu <= 0:
        raise NonPositiveMean("relative index requires a positive mean")
    return 1.0 - ede_income(x, spec) / mu


def gini_index(x: Incomes) -> float:
    """Classical Gini index, the relative index under f(t) = t^2."""
    return relative_index(x, PowerWeighting(2.0))


def lorenz_dominates(x: Incomes, y: Incomes) -> bool:
    """True iff x Lorenz-dominates y at equal means.

    Criterion: (1/n) sum_{i<=h} x_i >= (1/n) sum_{i<=h} y_i for h = 1..n-1.
    """
    xs = as_sorted_array(x)
    ys = as_sorted_array(y)
    if xs.size != ys.size:
        raise LengthMismatch("distributions must have equal length")
    n = xs.size
    if abs(xs.mean() - ys.mean()) > CLASS_TOL:
        raise MeanMismatch("Lorenz comparison requires equal means")
    cx = np.cumsum(xs)[:-1] / n
    cy = np.cumsum(ys)[:-1] / n
    return bool(np.all(cx >= cy - CLASS_TOL))


@dataclass(frozen=True)
class WeightingClassMembership:
    """Membership of f in the four transfer-consistent classes.

    Nesting invariant: in_PT implies in_UR and in_UL, either of which
    implies in_URL.
    """

    in_URL: bool
    in_UL: bool
    in_UR: bool
    in_PT: bool

    def __post_init__(self):
        if self.in_PT and not (self.in_UR and self.in_UL):
            raise ValueError("class nesting violated: PT outside UR/UL")
        if (self.in_UR or self.in_UL) and not self.in_URL:
            raise ValueError("class nesting violated: UR/UL outside URL")


def _non_decreasing(seq: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.diff(seq) >= -tol))


def classify_weighting(f: WeightingFunction, n: int,
                       tol: float = CLASS_TOL) -> WeightingClassMembership:
    """Test f on the grid {0, 1/n, ..., 1} against the four classes.

    URL: f below the diagonal.  UR: f(t)/t non-decreasing (star-shaped from
    above at 0).  UL: (1-f(t))/(1-t) non-decreasing (star-shaped at 1).
    PT: successive chord slopes non-decreasing (convexity on the grid).
    Only grid points enter the tests: for estimated functions the grid is
    the only available information.
    """
    fv = weighting_values(f, n)
    t = np.arange(n + 1, dtype=float) / n
    in_url = bool(np.all(fv <= t + tol))
    in_ur = _non_decreasing(fv[1:] / t[1:], tol)
    in_ul = _non_decreasing((1.0 - fv[:-1]) / (1.0 - t[:-1]), tol)
    in_pt = _non_decreasing(np.diff(fv) * n, tol)
    # Closure guards tolerance edge cases; with exact arithmetic the raw
    # tests already nest (the UR/UL ratio sequences start resp. end at 1).
    if in_pt:
        in_ur = in_ul = True
    if in_ur or in_ul:
        in_url = True
    return WeightingClassMembership(in_URL=in_url, in_UL=in_ul,
                                    in_UR=in_ur, in_PT=in_pt)
