"""Estimand catalog: target functionals, their influence functions, and
exact nuisances on finite-support laws.

Each estimand is a small frozen dataclass exposing three pure operations:

* ``plugin_value(law)``: the functional evaluated exactly on an explicit
  finite-support law.
* ``nuisance_requirements()``: the named nuisance slots its influence
  function consumes.
* ``eif_values(cols, nuis, psi)``: the influence function evaluated at a
  batch of observations given fitted or exact nuisances and a candidate
  parameter value.

For every estimand except the quantile the influence function is affine in
psi, phi(o; psi) = u(o) - s(o) * psi, and ``eif_terms`` returns the (u, s)
arrays; estimators build plug-in, one-step, estimating-equation, and
targeted updates from them.  Two point-evaluation functionals (density at
a point, regression function at a point of a continuous regressor) are
deliberately constructible but every operation on them raises: they admit
no finite-variance influence function, so no root-n estimator exists.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, ClassVar, Optional, Sequence

import numpy as np

from .distributions import Dataset, DiscreteDistribution, Observation, Schema
from .errors import (
    NotPathwiseDifferentiableError,
    NuisanceError,
    PositivityError,
    SchemaError,
    ValidationError,
)

CENTERING_TOL = 1e-10


# ---------------------------------------------------------------------------
# observation batches and nuisance containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnSet:
    """Role-indexed column views of a batch of observations."""

    n: int
    y: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None
    Z: Optional[np.ndarray] = None
    M: Optional[np.ndarray] = None

    @staticmethod
    def from_matrix(schema: Schema, values: np.ndarray) -> "ColumnSet":
        values = np.atleast_2d(np.asarray(values, dtype=float))
        out_idx = schema.indices_with_role("outcome")
        exp_idx = schema.indices_with_role("exposure")
        cov_idx = schema.indices_with_role("covariate")
        med_idx = schema.indices_with_role("mediator")
        return ColumnSet(
            n=values.shape[0],
            y=values[:, out_idx[0]] if out_idx else None,
            x=values[:, exp_idx[0]] if exp_idx else None,
            Z=values[:, list(cov_idx)],
            M=values[:, list(med_idx)],
        )

    @staticmethod
    def from_dataset(dataset: Dataset) -> "ColumnSet":
        return ColumnSet.from_matrix(dataset.schema, dataset.values)

    def require(self, **roles: bool) -> None:
        for role, needed in roles.items():
            if not needed:
                continue
            if role == "outcome" and self.y is None:
                raise SchemaError("estimand needs an outcome column")
            if role == "exposure" and self.x is None:
                raise SchemaError("estimand needs an exposure column")
            if role == "mediator" and (self.M is None or self.M.shape[1] == 0):
                raise SchemaError("estimand needs at least one mediator column")


@dataclass(frozen=True)
class NuisanceSet:
    """Named nuisance slots consumed by influence functions.

    Function-valued slots take numpy arrays and return arrays of the same
    length.  Scalar slots hold pooled quantities (sample means, a residual
    variance) that are root-n estimable without cross-fitting.
    """

    outcome_mean: Optional[Callable] = None          # (x, Z) -> E[Y | X=x, Z]
    outcome_mean_grad: Optional[Callable] = None     # (x, Z) -> d/dx E[Y | X=x, Z]
    propensity: Optional[Callable] = None            # (Z,) -> P(X=1 | Z)
    conditional_mean_y: Optional[Callable] = None    # (Z,) -> E[Y | Z]
    conditional_mean_x: Optional[Callable] = None    # (Z,) -> E[X | Z]
    marginal_density: Optional[Callable] = None      # (y,) -> f(y)
    density_at_quantile: Optional[Callable] = None   # (y,) -> f(y)
    outcome_cdf: Optional[Callable] = None           # (y,) -> F(y)
    exposure_prob: Optional[Callable] = None         # (x,) -> P(X = x)
    joint_density: Optional[Callable] = None         # (x, Z) -> f(x, Z)
    joint_density_grad: Optional[Callable] = None    # (x, Z) -> df/dx
    mediator_law: Optional[Callable] = None          # (M, x, Z) -> f(M | x, Z)
    mediated_outcome: Optional[Callable] = None      # (M, x, Z) -> E[Y | M, x, Z]
    mediator_support: Optional[tuple] = None         # tuple of mediator value tuples
    mean_y: Optional[float] = None
    mean_x: Optional[float] = None
    exposure_residual_var: Optional[float] = None    # E[(X - E[X|Z])^2]

    def require(self, *slots: str) -> None:
        missing = [s for s in slots if getattr(self, s) is None]
        if missing:
            raise NuisanceError(f"missing nuisance slots: {', '.join(missing)}")


# ---------------------------------------------------------------------------
# estimand base
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Estimand:
    """Base class for target functionals."""

    name: ClassVar[str] = ""
    affine: ClassVar[bool] = True
    discrete_oracle: ClassVar[bool] = True

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"name": self.name, "params": self.params()}

    def validate_schema(self, schema: Schema) -> None:
        """Check declared roles and kinds against this estimand's needs."""

    def nuisance_requirements(self) -> frozenset:
        raise NotImplementedError

    def plugin_value(self, law: DiscreteDistribution) -> float:
        raise NotImplementedError

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        raise NotImplementedError

    def eif_values(self, cols: ColumnSet, nuis: NuisanceSet, psi: float) -> np.ndarray:
        u, s = self.eif_terms(cols, nuis)
        return u - s * psi

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        """Plug-in estimate on data given fitted nuisances."""
        raise NotImplementedError


def plugin_value(spec: Estimand, law: DiscreteDistribution) -> float:
    return spec.plugin_value(law)


def nuisance_requirements(spec: Estimand) -> frozenset:
    return spec.nuisance_requirements()


def eif_at(spec: Estimand, obs: Observation, nuis: NuisanceSet, psi: float) -> float:
    cols = ColumnSet.from_matrix(obs.schema, np.asarray([obs.values]))
    return float(spec.eif_values(cols, nuis, psi)[0])


def eif_array(
    spec: Estimand, schema: Schema, values: np.ndarray, nuis: NuisanceSet, psi: float
) -> np.ndarray:
    return spec.eif_values(ColumnSet.from_matrix(schema, values), nuis, psi)


# ---------------------------------------------------------------------------
# grouping helpers for finite-support laws
# ---------------------------------------------------------------------------


def _role_columns(law: DiscreteDistribution):
    schema = law.schema
    V = law.values
    out_idx = schema.indices_with_role("outcome")
    exp_idx = schema.indices_with_role("exposure")
    cov_idx = schema.indices_with_role("covariate")
    med_idx = schema.indices_with_role("mediator")
    return (
        V[:, out_idx[0]] if out_idx else None,
        V[:, exp_idx[0]] if exp_idx else None,
        V[:, list(cov_idx)],
        V[:, list(med_idx)],
    )


def _keys(arr2d: np.ndarray):
    return [tuple(row) for row in arr2d]


class _CellTable:
    """Weighted group sums over atoms, keyed by exact value tuples."""

    def __init__(self):
        self.weight: dict = {}
        self.weighted_sum: dict = {}

    def add(self, key, p: float, value: float = 0.0) -> None:
        self.weight[key] = self.weight.get(key, 0.0) + p
        self.weighted_sum[key] = self.weighted_sum.get(key, 0.0) + p * value

    def mean(self, key, what: str):
        w = self.weight.get(key, 0.0)
        if w <= 0.0:
            raise PositivityError(f"conditioning cell {key!r} has zero probability ({what})")
        return self.weighted_sum[key] / w

    def mean_table(self, what: str) -> dict:
        out = {}
        for key, w in self.weight.items():
            if w > 0.0:
                out[key] = self.weighted_sum[key] / w
        return out


def _marginal(keys, probs) -> dict:
    out: dict = {}
    for key, p in zip(keys, probs):
        out[key] = out.get(key, 0.0) + float(p)
    return out


def _lookup(table: dict, what: str, default=None):
    def call(keys):
        out = np.empty(len(keys), dtype=float)
        for i, key in enumerate(keys):
            if key in table:
                out[i] = table[key]
            elif default is not None:
                out[i] = default
            else:
                raise PositivityError(f"{what} undefined at cell {key!r} (zero probability)")
        return out

    return call


# ---------------------------------------------------------------------------
# concrete estimands
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PopulationMean(Estimand):
    """Mean of the outcome, E[Y]."""

    name: ClassVar[str] = "population_mean"

    def nuisance_requirements(self) -> frozenset:
        return frozenset()

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, _, _, _ = _role_columns(law)
        _need_outcome(y)
        return float(np.dot(law.probs, y))

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True)
        return cols.y.astype(float), np.ones(cols.n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(outcome=True)
        return float(np.mean(cols.y))


@dataclass(frozen=True)
class AverageDensity(Estimand):
    """Integral of the squared marginal outcome density, E[f(Y)].

    On a finite-support law the marginal density is the probability mass
    function, so the plug-in is the sum of squared atom masses.  The
    influence function is 2 * (f(y) - psi).
    """

    name: ClassVar[str] = "average_density"

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"marginal_density"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, _, _, _ = _role_columns(law)
        _need_outcome(y)
        pmf = _marginal([(v,) for v in y], law.probs)
        return float(sum(p * p for p in pmf.values()))

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True)
        nuis.require("marginal_density")
        f = np.asarray(nuis.marginal_density(cols.y), dtype=float)
        return 2.0 * f, np.full(cols.n, 2.0)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(outcome=True)
        nuis.require("marginal_density")
        return integrated_squared_density(nuis.marginal_density, cols.y)


def integrated_squared_density(density, sample_y: np.ndarray, points: int = 4096) -> float:
    """Trapezoid integral of a fitted density squared over the sample range
    extended by five bandwidths on each side."""
    h = getattr(density, "bandwidth", None)
    if h is None:
        raise NuisanceError(
            "integrated squared density needs a kernel density fit with a bandwidth"
        )
    lo = float(np.min(sample_y)) - 5.0 * h
    hi = float(np.max(sample_y)) + 5.0 * h
    grid = np.linspace(lo, hi, points)
    vals = np.asarray(density(grid), dtype=float)
    return float(np.trapezoid(vals * vals, grid))


@dataclass(frozen=True)
class Covariance(Estimand):
    """Covariance between outcome and exposure, E[(Y - EY)(X - EX)]."""

    name: ClassVar[str] = "covariance"

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"mean_y", "mean_x"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, x, _, _ = _role_columns(law)
        _need_outcome(y)
        _need_exposure(x)
        p = law.probs
        return float(np.dot(p, (y - np.dot(p, y)) * (x - np.dot(p, x))))

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True, exposure=True)
        nuis.require("mean_y", "mean_x")
        u = (cols.y - nuis.mean_y) * (cols.x - nuis.mean_x)
        return u, np.ones(cols.n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        u, _ = self.eif_terms(cols, nuis)
        return float(np.mean(u))


def _pom_terms(cols: ColumnSet, nuis: NuisanceSet, arm: int):
    """Uncentered augmented inverse-probability terms for one exposure arm."""
    cols.require(outcome=True, exposure=True)
    nuis.require("outcome_mean", "propensity")
    pi = np.asarray(nuis.propensity(cols.Z), dtype=float)
    bad = (pi <= 0.0) | (pi >= 1.0)
    if np.any(bad):
        raise PositivityError(
            f"propensity outside (0, 1) at {int(bad.sum())} rows; "
            "trim or bound the propensity model"
        )
    arm_prob = pi if arm == 1 else 1.0 - pi
    m_arm = np.asarray(nuis.outcome_mean(np.full(cols.n, float(arm)), cols.Z), dtype=float)
    indicator = (cols.x == float(arm)).astype(float)
    return indicator / arm_prob * (cols.y - m_arm) + m_arm, m_arm


@dataclass(frozen=True)
class PotentialOutcomeMean(Estimand):
    """Mean outcome with the exposure set to a fixed arm, E[E[Y | X=x, Z]]."""

    x: int = 1
    name: ClassVar[str] = "potential_outcome_mean"

    def __post_init__(self) -> None:
        if self.x not in (0, 1):
            raise ValidationError(f"potential outcome arm must be 0 or 1, got {self.x!r}")

    def params(self) -> dict:
        return {"x": self.x}

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"outcome_mean", "propensity"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        table = _arm_means(law, (float(self.x),))
        pz = table["pz"]
        m = table["m"]
        total = 0.0
        for zkey, w in pz.items():
            if w <= 0.0:
                continue
            cell = (float(self.x),) + zkey
            if cell not in m:
                raise PositivityError(
                    f"cell X={self.x}, Z={zkey!r} has zero probability but P(Z={zkey!r}) > 0"
                )
            total += w * m[cell]
        return float(total)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        u, _ = _pom_terms(cols, nuis, self.x)
        return u, np.ones(cols.n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(exposure=True)
        nuis.require("outcome_mean")
        m_arm = np.asarray(
            nuis.outcome_mean(np.full(cols.n, float(self.x)), cols.Z), dtype=float
        )
        return float(np.mean(m_arm))


@dataclass(frozen=True)
class Ate(Estimand):
    """Average treatment effect, E[E[Y|X=1,Z] - E[Y|X=0,Z]]."""

    name: ClassVar[str] = "ate"

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"outcome_mean", "propensity"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        table = _arm_means(law, (1.0, 0.0))
        pz = table["pz"]
        m = table["m"]
        total = 0.0
        for zkey, w in pz.items():
            if w <= 0.0:
                continue
            for arm, sign in ((1.0, 1.0), (0.0, -1.0)):
                cell = (arm,) + zkey
                if cell not in m:
                    raise PositivityError(
                        f"cell X={int(arm)}, Z={zkey!r} has zero probability "
                        f"but P(Z={zkey!r}) > 0"
                    )
                total += sign * w * m[cell]
        return float(total)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        u1, _ = _pom_terms(cols, nuis, 1)
        u0, _ = _pom_terms(cols, nuis, 0)
        return u1 - u0, np.ones(cols.n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(exposure=True)
        nuis.require("outcome_mean")
        m1 = np.asarray(nuis.outcome_mean(np.ones(cols.n), cols.Z), dtype=float)
        m0 = np.asarray(nuis.outcome_mean(np.zeros(cols.n), cols.Z), dtype=float)
        return float(np.mean(m1 - m0))


@dataclass(frozen=True)
class ExpectedConditionalCovariance(Estimand):
    """E[(Y - E[Y|Z])(X - E[X|Z])], covariance net of measured covariates."""

    name: ClassVar[str] = "expected_conditional_covariance"

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"conditional_mean_y", "conditional_mean_x"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, x, Z, _ = _role_columns(law)
        _need_outcome(y)
        _need_exposure(x)
        gy, gx = _z_means(law, y, x, Z)
        zkeys = _keys(Z)
        total = 0.0
        for i, p in enumerate(law.probs):
            if p <= 0.0:
                continue
            total += p * (y[i] - gy[zkeys[i]]) * (x[i] - gx[zkeys[i]])
        return float(total)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True, exposure=True)
        nuis.require("conditional_mean_y", "conditional_mean_x")
        gy = np.asarray(nuis.conditional_mean_y(cols.Z), dtype=float)
        gx = np.asarray(nuis.conditional_mean_x(cols.Z), dtype=float)
        return (cols.y - gy) * (cols.x - gx), np.ones(cols.n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        u, _ = self.eif_terms(cols, nuis)
        return float(np.mean(u))


@dataclass(frozen=True)
class PartiallyLinearCoefficient(Estimand):
    """Slope of the exposure in a partially linear outcome model.

    Defined as E[(X - E[X|Z])(Y - E[Y|Z])] / E[(X - E[X|Z])^2]; the
    influence function is
    [(x - gx)(y - gy) - (x - gx)^2 * psi] / E[(X - gx)^2].
    """

    name: ClassVar[str] = "partially_linear_coefficient"

    def nuisance_requirements(self) -> frozenset:
        return frozenset(
            {"conditional_mean_y", "conditional_mean_x", "exposure_residual_var"}
        )

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, x, Z, _ = _role_columns(law)
        _need_outcome(y)
        _need_exposure(x)
        gy, gx = _z_means(law, y, x, Z)
        zkeys = _keys(Z)
        num = 0.0
        den = 0.0
        for i, p in enumerate(law.probs):
            if p <= 0.0:
                continue
            rx = x[i] - gx[zkeys[i]]
            num += p * rx * (y[i] - gy[zkeys[i]])
            den += p * rx * rx
        if den <= 0.0:
            raise PositivityError("exposure has no residual variance given covariates")
        return float(num / den)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True, exposure=True)
        nuis.require("conditional_mean_y", "conditional_mean_x", "exposure_residual_var")
        den = float(nuis.exposure_residual_var)
        if den <= 0.0:
            raise PositivityError("exposure has no residual variance given covariates")
        gy = np.asarray(nuis.conditional_mean_y(cols.Z), dtype=float)
        gx = np.asarray(nuis.conditional_mean_x(cols.Z), dtype=float)
        rx = cols.x - gx
        return rx * (cols.y - gy) / den, rx * rx / den

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(outcome=True, exposure=True)
        nuis.require("conditional_mean_y", "conditional_mean_x")
        gy = np.asarray(nuis.conditional_mean_y(cols.Z), dtype=float)
        gx = np.asarray(nuis.conditional_mean_x(cols.Z), dtype=float)
        rx = cols.x - gx
        den = float(np.mean(rx * rx))
        if den <= 0.0:
            raise PositivityError("exposure has no residual variance given covariates")
        return float(np.mean(rx * (cols.y - gy)) / den)


@dataclass(frozen=True)
class AverageDerivativeEffect(Estimand):
    """Weighted average derivative of E[Y | X=x, Z] in a continuous exposure.

    With weight w the target is E[w(X) * d/dx E[Y | X, Z]] and the influence
    function is l(x, z)(y - m(x, z)) + w(x) m'(x, z) - psi, where
    l = -w'(x) - w(x) * (df/dx) / f and f is the joint density of (X, Z).
    The unit weight gives l = -(df/dx)/f.  Only continuous exposures are
    supported; finite-support laws are rejected.
    """

    weight_kind: str = "unit"
    weight_coefficients: tuple = ()
    name: ClassVar[str] = "average_derivative_effect"
    discrete_oracle: ClassVar[bool] = False

    def __post_init__(self) -> None:
        if self.weight_kind not in ("unit", "polynomial"):
            raise ValidationError(
                f"weight_kind must be 'unit' or 'polynomial', got {self.weight_kind!r}"
            )
        if self.weight_kind == "polynomial" and not self.weight_coefficients:
            raise ValidationError("polynomial weight needs at least one coefficient")
        object.__setattr__(
            self, "weight_coefficients", tuple(float(c) for c in self.weight_coefficients)
        )

    def params(self) -> dict:
        out = {"weight_kind": self.weight_kind}
        if self.weight_kind == "polynomial":
            out["weight_coefficients"] = list(self.weight_coefficients)
        return out

    def validate_schema(self, schema: Schema) -> None:
        idx = schema.sole_index("exposure")
        if schema.columns[idx].kind != "continuous":
            raise ValidationError(
                "average derivative effect needs a continuous exposure; "
                f"column {schema.columns[idx].name!r} is {schema.columns[idx].kind}"
            )

    def weight_at(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        if self.weight_kind == "unit":
            return np.ones_like(x), np.zeros_like(x)
        coef = self.weight_coefficients
        w = np.zeros_like(x)
        wprime = np.zeros_like(x)
        for k, c in enumerate(coef):
            w += c * x**k
            if k >= 1:
                wprime += k * c * x ** (k - 1)
        return w, wprime

    def nuisance_requirements(self) -> frozenset:
        return frozenset(
            {"outcome_mean", "outcome_mean_grad", "joint_density", "joint_density_grad"}
        )

    def plugin_value(self, law: DiscreteDistribution) -> float:
        raise ValidationError(
            "average derivative effect requires a continuous exposure; "
            "a finite-support law has no derivative in x"
        )

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True, exposure=True)
        nuis.require(
            "outcome_mean", "outcome_mean_grad", "joint_density", "joint_density_grad"
        )
        f = np.asarray(nuis.joint_density(cols.x, cols.Z), dtype=float)
        if np.any(f <= 0.0):
            raise PositivityError("joint exposure density vanished at an observation")
        fprime = np.asarray(nuis.joint_density_grad(cols.x, cols.Z), dtype=float)
        m = np.asarray(nuis.outcome_mean(cols.x, cols.Z), dtype=float)
        mprime = np.asarray(nuis.outcome_mean_grad(cols.x, cols.Z), dtype=float)
        w, wprime = self.weight_at(cols.x)
        score = -wprime - w * fprime / f
        return score * (cols.y - m) + w * mprime, np.ones(cols.n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(exposure=True)
        nuis.require("outcome_mean_grad")
        mprime = np.asarray(nuis.outcome_mean_grad(cols.x, cols.Z), dtype=float)
        w, _ = self.weight_at(cols.x)
        return float(np.mean(w * mprime))


@dataclass(frozen=True)
class Quantile(Estimand):
    """The tau-th quantile of the outcome distribution.

    The influence function [Theta(y - psi) + tau - 1] / f(psi) is not
    affine in psi (Theta is the right-continuous step function), so the
    estimating-equation solver uses bisection for this estimand and the
    numerical verification runs on smooth families instead of
    finite-support laws.
    """

    tau: float = 0.5
    name: ClassVar[str] = "quantile"
    affine: ClassVar[bool] = False
    discrete_oracle: ClassVar[bool] = False

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValidationError(f"quantile level must be in (0, 1), got {self.tau!r}")

    def params(self) -> dict:
        return {"tau": self.tau}

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"density_at_quantile"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, _, _, _ = _role_columns(law)
        _need_outcome(y)
        pmf = _marginal([(v,) for v in y], law.probs)
        points = sorted(pmf.keys())
        acc = 0.0
        for (value,) in points:
            acc += pmf[(value,)]
            if acc >= self.tau - 1e-15:
                return float(value)
        return float(points[-1][0])

    def eif_values(self, cols: ColumnSet, nuis: NuisanceSet, psi: float) -> np.ndarray:
        cols.require(outcome=True)
        nuis.require("density_at_quantile")
        dens = float(np.asarray(nuis.density_at_quantile(np.asarray([psi])), dtype=float)[0])
        if dens <= 0.0:
            raise PositivityError(f"outcome density at the quantile is {dens!r}; need > 0")
        theta = (cols.y - psi >= 0.0).astype(float)
        return (theta + self.tau - 1.0) / dens

    def ee_residual(self, cols: ColumnSet, psi: float) -> float:
        """Mean of the unscaled estimating function at psi."""
        theta = (cols.y - psi >= 0.0).astype(float)
        return float(np.mean(theta) + self.tau - 1.0)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(outcome=True)
        ys = np.sort(cols.y)
        k = int(np.ceil(self.tau * cols.n)) - 1
        return float(ys[min(max(k, 0), cols.n - 1)])


@dataclass(frozen=True)
class TailConditionalExpectation(Estimand):
    """E[Y | Y <= threshold], the mean of the lower tail.

    The influence function Theta(threshold - y) * (y - psi) / F(threshold)
    is exactly zero for observations above the threshold.
    """

    threshold: float = 0.0
    name: ClassVar[str] = "tail_conditional_expectation"

    def __post_init__(self) -> None:
        if not np.isfinite(self.threshold):
            raise ValidationError(f"threshold must be finite, got {self.threshold!r}")

    def params(self) -> dict:
        return {"threshold": self.threshold}

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"outcome_cdf"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, _, _, _ = _role_columns(law)
        _need_outcome(y)
        inside = y <= self.threshold
        mass = float(np.dot(law.probs, inside))
        if mass <= 0.0:
            raise PositivityError(
                f"no outcome mass at or below threshold {self.threshold!r}"
            )
        return float(np.dot(law.probs, y * inside) / mass)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True)
        nuis.require("outcome_cdf")
        F = float(np.asarray(nuis.outcome_cdf(np.asarray([self.threshold])), dtype=float)[0])
        if F <= 0.0:
            raise PositivityError(
                f"outcome distribution puts no mass at or below {self.threshold!r}"
            )
        inside = (cols.y <= self.threshold).astype(float)
        return inside * cols.y / F, inside / F

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(outcome=True)
        inside = cols.y <= self.threshold
        if not np.any(inside):
            raise PositivityError(
                f"no observations at or below threshold {self.threshold!r}"
            )
        return float(np.mean(cols.y[inside]))


@dataclass(frozen=True)
class ConditionalCdf(Estimand):
    """P(Y <= y | X = x) for a discrete exposure level x.

    The influence function is 1{X = x} (Theta(y - Y) - psi) / P(X = x).
    """

    y: float = 0.0
    x: float = 0.0

    name: ClassVar[str] = "conditional_cdf"

    def __post_init__(self) -> None:
        if not np.isfinite(self.y) or not np.isfinite(self.x):
            raise ValidationError("conditional cdf needs finite y and x")

    def params(self) -> dict:
        return {"y": self.y, "x": self.x}

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"exposure_prob"})

    def validate_schema(self, schema: Schema) -> None:
        idx = schema.sole_index("exposure")
        if schema.columns[idx].kind == "continuous":
            raise ValidationError(
                "conditional cdf conditions on X = x, which has probability zero "
                "for a continuous exposure; declare the exposure binary or discrete"
            )

    def plugin_value(self, law: DiscreteDistribution) -> float:
        self.validate_schema(law.schema)
        y, x, _, _ = _role_columns(law)
        _need_outcome(y)
        _need_exposure(x)
        at_level = x == self.x
        px = float(np.dot(law.probs, at_level))
        if px <= 0.0:
            raise PositivityError(f"exposure level {self.x!r} has zero probability")
        return float(np.dot(law.probs, at_level * (y <= self.y)) / px)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True, exposure=True)
        nuis.require("exposure_prob")
        px = float(np.asarray(nuis.exposure_prob(np.asarray([self.x])), dtype=float)[0])
        if px <= 0.0:
            raise PositivityError(f"exposure level {self.x!r} has zero probability")
        at_level = (cols.x == self.x).astype(float)
        below = (cols.y <= self.y).astype(float)
        return at_level * below / px, at_level / px

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(outcome=True, exposure=True)
        at_level = cols.x == self.x
        if not np.any(at_level):
            raise PositivityError(f"no observations with exposure level {self.x!r}")
        return float(np.mean(cols.y[at_level] <= self.y))


@dataclass(frozen=True)
class InterventionalDirectEffect(Estimand):
    """Mean outcome when the exposure is set to x1 but the mediator is drawn
    from its law under x0: E_Z[ sum_m E[Y | M=m, X=x1, Z] f(m | x0, Z) ].

    Requires a mediator with finite support.
    """

    x1: int = 1
    x0: int = 0
    name: ClassVar[str] = "interventional_direct_effect"

    def __post_init__(self) -> None:
        if self.x1 not in (0, 1) or self.x0 not in (0, 1):
            raise ValidationError("interventional direct effect arms must be 0 or 1")

    def params(self) -> dict:
        return {"x1": self.x1, "x0": self.x0}

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"mediated_outcome", "mediator_law", "propensity", "mediator_support"})

    def validate_schema(self, schema: Schema) -> None:
        med = schema.indices_with_role("mediator")
        if not med:
            raise SchemaError("interventional direct effect needs a mediator column")
        for i in med:
            if schema.columns[i].kind == "continuous":
                raise ValidationError(
                    "interventional direct effect sums over the mediator support; "
                    f"column {schema.columns[i].name!r} must be binary or discrete"
                )

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, x, Z, M = _role_columns(law)
        _need_outcome(y)
        _need_exposure(x)
        if M.shape[1] == 0:
            raise SchemaError("interventional direct effect needs a mediator column")
        p = law.probs
        zkeys = _keys(Z)
        mkeys = _keys(M)
        pz = _marginal(zkeys, p)
        # cell tables keyed by (z, x) and (z, x, m)
        zx = _marginal([(zk, xv) for zk, xv in zip(zkeys, x)], p)
        zxm = _marginal([(zk, xv, mk) for zk, xv, mk in zip(zkeys, x, mkeys)], p)
        b_table = _CellTable()
        for i, pi in enumerate(p):
            b_table.add((zkeys[i], x[i], mkeys[i]), float(pi), float(y[i]))
        x1, x0 = float(self.x1), float(self.x0)
        total = 0.0
        for zkey, wz in pz.items():
            if wz <= 0.0:
                continue
            w_x0 = zx.get((zkey, x0), 0.0)
            if w_x0 <= 0.0:
                raise PositivityError(
                    f"cell X={self.x0}, Z={zkey!r} has zero probability"
                )
            inner = 0.0
            for (zk, xv, mk), w_cell in zxm.items():
                if zk != zkey or xv != x0 or w_cell <= 0.0:
                    continue
                f_m_given_x0 = w_cell / w_x0
                inner += b_table.mean((zkey, x1, mk), "mediated outcome") * f_m_given_x0
            total += wz * inner
        return float(total)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True, exposure=True, mediator=True)
        nuis.require("mediated_outcome", "mediator_law", "propensity", "mediator_support")
        n = cols.n
        pi = np.asarray(nuis.propensity(cols.Z), dtype=float)
        if np.any((pi <= 0.0) | (pi >= 1.0)):
            raise PositivityError("propensity outside (0, 1); trim or bound the model")
        x1, x0 = float(self.x1), float(self.x0)
        p_x1 = pi if self.x1 == 1 else 1.0 - pi
        p_x0 = pi if self.x0 == 1 else 1.0 - pi
        x1_vec = np.full(n, x1)
        f_m_x1 = np.asarray(nuis.mediator_law(cols.M, x1_vec, cols.Z), dtype=float)
        f_m_x0 = np.asarray(nuis.mediator_law(cols.M, np.full(n, x0), cols.Z), dtype=float)
        if np.any(f_m_x1 <= 0.0):
            raise PositivityError("mediator law vanished under the x1 arm")
        b_obs = np.asarray(nuis.mediated_outcome(cols.M, x1_vec, cols.Z), dtype=float)
        # a(z) = sum_m b(m, x1, z) f(m | x0, z) over the mediator support
        a = np.zeros(n)
        for m_point in nuis.mediator_support:
            M_rep = np.tile(np.asarray(m_point, dtype=float), (n, 1))
            b_m = np.asarray(nuis.mediated_outcome(M_rep, x1_vec, cols.Z), dtype=float)
            f_m = np.asarray(
                nuis.mediator_law(M_rep, np.full(n, x0), cols.Z), dtype=float
            )
            a += b_m * f_m
        at_x1 = (cols.x == x1).astype(float)
        at_x0 = (cols.x == x0).astype(float)
        u = (
            at_x1 * f_m_x0 / (f_m_x1 * p_x1) * (cols.y - b_obs)
            + at_x0 / p_x0 * (b_obs - a)
            + a
        )
        return u, np.ones(n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(exposure=True, mediator=True)
        nuis.require("mediated_outcome", "mediator_law", "mediator_support")
        n = cols.n
        x1_vec = np.full(n, float(self.x1))
        x0_vec = np.full(n, float(self.x0))
        a = np.zeros(n)
        for m_point in nuis.mediator_support:
            M_rep = np.tile(np.asarray(m_point, dtype=float), (n, 1))
            b_m = np.asarray(nuis.mediated_outcome(M_rep, x1_vec, cols.Z), dtype=float)
            f_m = np.asarray(nuis.mediator_law(M_rep, x0_vec, cols.Z), dtype=float)
            a += b_m * f_m
        return float(np.mean(a))


@dataclass(frozen=True)
class IncrementalPropensity(Estimand):
    """Mean outcome after multiplying the odds of exposure by epsilon.

    The shifted propensity is g(z) = eps * pi(z) / (eps * pi(z) + 1 - pi(z))
    and the target is E[m(1, Z) g(Z) + m(0, Z)(1 - g(Z))].  At eps = 1 the
    target reduces to E[Y].
    """

    epsilon: float = 2.0
    name: ClassVar[str] = "incremental_propensity"

    def __post_init__(self) -> None:
        if not (np.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValidationError(f"epsilon must be positive, got {self.epsilon!r}")

    def params(self) -> dict:
        return {"epsilon": self.epsilon}

    def nuisance_requirements(self) -> frozenset:
        return frozenset({"outcome_mean", "propensity"})

    def plugin_value(self, law: DiscreteDistribution) -> float:
        y, x, Z, _ = _role_columns(law)
        _need_outcome(y)
        _need_exposure(x)
        p = law.probs
        zkeys = _keys(Z)
        pz = _marginal(zkeys, p)
        zx = _marginal([(zk, xv) for zk, xv in zip(zkeys, x)], p)
        m_table = _CellTable()
        for i, pi_atom in enumerate(p):
            m_table.add((zkeys[i], x[i]), float(pi_atom), float(y[i]))
        eps = self.epsilon
        total = 0.0
        for zkey, wz in pz.items():
            if wz <= 0.0:
                continue
            pi_z = zx.get((zkey, 1.0), 0.0) / wz
            g1 = eps * pi_z / (eps * pi_z + 1.0 - pi_z)
            term = 0.0
            if g1 > 0.0:
                term += g1 * m_table.mean((zkey, 1.0), "outcome mean, arm 1")
            if g1 < 1.0:
                term += (1.0 - g1) * m_table.mean((zkey, 0.0), "outcome mean, arm 0")
            total += wz * term
        return float(total)

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        cols.require(outcome=True, exposure=True)
        nuis.require("outcome_mean", "propensity")
        pi = np.asarray(nuis.propensity(cols.Z), dtype=float)
        if np.any((pi <= 0.0) | (pi >= 1.0)):
            raise PositivityError("propensity outside (0, 1); trim or bound the model")
        eps = self.epsilon
        denom = eps * pi + 1.0 - pi
        g1 = eps * pi / denom
        g0 = 1.0 - g1
        m1 = np.asarray(nuis.outcome_mean(np.ones(cols.n), cols.Z), dtype=float)
        m0 = np.asarray(nuis.outcome_mean(np.zeros(cols.n), cols.Z), dtype=float)
        at1 = (cols.x == 1.0).astype(float)
        at0 = 1.0 - at1
        u = (
            g1 * (at1 / pi * (cols.y - m1) + m1)
            + g0 * (at0 / (1.0 - pi) * (cols.y - m0) + m0)
            + g1 * g0 / (pi * (1.0 - pi)) * (cols.x - pi) * (m1 - m0)
        )
        return u, np.ones(cols.n)

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        cols.require(exposure=True)
        nuis.require("outcome_mean", "propensity")
        pi = np.asarray(nuis.propensity(cols.Z), dtype=float)
        eps = self.epsilon
        g1 = eps * pi / (eps * pi + 1.0 - pi)
        m1 = np.asarray(nuis.outcome_mean(np.ones(cols.n), cols.Z), dtype=float)
        m0 = np.asarray(nuis.outcome_mean(np.zeros(cols.n), cols.Z), dtype=float)
        return float(np.mean(g1 * m1 + (1.0 - g1) * m0))


# ---------------------------------------------------------------------------
# rejected functionals
# ---------------------------------------------------------------------------


_POINT_EVAL_MESSAGE = (
    "{what} is a point-evaluation functional: under a nonparametric model its "
    "pathwise derivative is unbounded, so it admits no finite-variance influence "
    "function and no root-n estimator. Target a smoothed functional instead "
    "(for densities, the integrated squared density; for regression functions, "
    "an average over a region)."
)


@dataclass(frozen=True)
class DensityAtPoint(Estimand):
    """Rejected: the density evaluated at a single point."""

    y: float = 0.0
    name: ClassVar[str] = "density_at_point"
    discrete_oracle: ClassVar[bool] = False

    def params(self) -> dict:
        return {"y": self.y}

    def _reject(self):
        raise NotPathwiseDifferentiableError(
            _POINT_EVAL_MESSAGE.format(what="the density at a point")
        )

    def nuisance_requirements(self) -> frozenset:
        self._reject()

    def plugin_value(self, law: DiscreteDistribution) -> float:
        self._reject()

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        self._reject()

    def eif_values(self, cols: ColumnSet, nuis: NuisanceSet, psi: float) -> np.ndarray:
        self._reject()

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        self._reject()


@dataclass(frozen=True)
class ConditionalMeanAt(Estimand):
    """Rejected: E[Y | X = x] at a point of a continuous exposure."""

    x: float = 0.0
    name: ClassVar[str] = "conditional_mean_at"
    discrete_oracle: ClassVar[bool] = False

    def params(self) -> dict:
        return {"x": self.x}

    def _reject(self):
        raise NotPathwiseDifferentiableError(
            _POINT_EVAL_MESSAGE.format(
                what="the regression function at a point of a continuous exposure"
            )
        )

    def nuisance_requirements(self) -> frozenset:
        self._reject()

    def plugin_value(self, law: DiscreteDistribution) -> float:
        self._reject()

    def eif_terms(self, cols: ColumnSet, nuis: NuisanceSet):
        self._reject()

    def eif_values(self, cols: ColumnSet, nuis: NuisanceSet, psi: float) -> np.ndarray:
        self._reject()

    def plugin_estimate(self, cols: ColumnSet, nuis: NuisanceSet) -> float:
        self._reject()


# ---------------------------------------------------------------------------
# shared discrete-law helpers
# ---------------------------------------------------------------------------


def _need_outcome(y) -> None:
    if y is None:
        raise SchemaError("estimand needs an outcome column")


def _need_exposure(x) -> None:
    if x is None:
        raise SchemaError("estimand needs an exposure column")


def _arm_means(law: DiscreteDistribution, arms) -> dict:
    """Marginal covariate weights and per-(arm, z) outcome means."""
    y, x, Z, _ = _role_columns(law)
    _need_outcome(y)
    _need_exposure(x)
    zkeys = _keys(Z)
    pz = _marginal(zkeys, law.probs)
    table = _CellTable()
    for i, p in enumerate(law.probs):
        table.add((x[i],) + zkeys[i], float(p), float(y[i]))
    return {"pz": pz, "m": table.mean_table("outcome mean")}


def _z_means(law: DiscreteDistribution, y, x, Z):
    zkeys = _keys(Z)
    ty = _CellTable()
    tx = _CellTable()
    for i, p in enumerate(law.probs):
        ty.add(zkeys[i], float(p), float(y[i]))
        tx.add(zkeys[i], float(p), float(x[i]))
    return ty.mean_table("conditional outcome mean"), tx.mean_table("conditional exposure mean")


# ---------------------------------------------------------------------------
# exact nuisances on a finite-support law
# ---------------------------------------------------------------------------


def exact_nuisances(spec: Estimand, law: DiscreteDistribution) -> NuisanceSet:
    """Exact nuisance functions computed from an explicit finite-support law.

    Conditional means and laws are cell sums; looking one up at a cell the
    law gives zero probability raises ``PositivityError``.  Estimands
    without a finite-support analogue of a slot (a continuous density at
    the quantile, a joint density in a continuous exposure) cannot be
    served and raise ``ValidationError``.
    """
    needs = spec.nuisance_requirements()
    unsupported = needs & {
        "density_at_quantile",
        "joint_density",
        "joint_density_grad",
        "outcome_mean_grad",
    }
    if unsupported:
        raise ValidationError(
            f"finite-support laws cannot provide {sorted(unsupported)}; "
            "use a smooth family for this estimand"
        )
    y, x, Z, M = _role_columns(law)
    p = law.probs
    zkeys = _keys(Z)
    fills: dict = {}

    if "outcome_mean" in needs:
        table = _CellTable()
        for i, pi in enumerate(p):
            table.add((x[i],) + zkeys[i], float(pi), float(y[i]))
        means = table.mean_table("outcome mean")
        lookup = _lookup(means, "outcome mean")
        fills["outcome_mean"] = lambda xv, Zv, _f=lookup: _f(
            [(float(a),) + tuple(r) for a, r in zip(np.asarray(xv), np.atleast_2d(Zv))]
        )
    if "propensity" in needs:
        pz = _marginal(zkeys, p)
        zx = _marginal([(zk, xv) for zk, xv in zip(zkeys, x)], p)
        table = {
            zk: zx.get((zk, 1.0), 0.0) / w for zk, w in pz.items() if w > 0.0
        }
        lookup = _lookup(table, "propensity")
        fills["propensity"] = lambda Zv, _f=lookup: _f([tuple(r) for r in np.atleast_2d(Zv)])
    if "conditional_mean_y" in needs or "conditional_mean_x" in needs:
        gy, gx = _z_means(law, y, x, Z)
        if "conditional_mean_y" in needs:
            lookup_y = _lookup(gy, "conditional outcome mean")
            fills["conditional_mean_y"] = lambda Zv, _f=lookup_y: _f(
                [tuple(r) for r in np.atleast_2d(Zv)]
            )
        if "conditional_mean_x" in needs:
            lookup_x = _lookup(gx, "conditional exposure mean")
            fills["conditional_mean_x"] = lambda Zv, _f=lookup_x: _f(
                [tuple(r) for r in np.atleast_2d(Zv)]
            )
    if "exposure_residual_var" in needs:
        _, gx = _z_means(law, y, x, Z)
        var = 0.0
        for i, pi in enumerate(p):
            if pi > 0.0:
                var += pi * (x[i] - gx[zkeys[i]]) ** 2
        fills["exposure_residual_var"] = float(var)
    if "marginal_density" in needs:
        pmf = _marginal([(v,) for v in y], p)
        lookup = _lookup(pmf, "outcome mass", default=0.0)
        fills["marginal_density"] = lambda yv, _f=lookup: _f(
            [(float(v),) for v in np.asarray(yv)]
        )
    if "outcome_cdf" in needs:
        pmf = _marginal([(v,) for v in y], p)
        points = np.array(sorted(v for (v,) in pmf.keys()))
        cum = np.cumsum([pmf[(v,)] for v in points])

        def _cdf(yv, _pts=points, _cum=cum):
            pos = np.searchsorted(_pts, np.asarray(yv, dtype=float), side="right")
            out = np.zeros(len(np.atleast_1d(pos)))
            pos = np.atleast_1d(pos)
            nonzero = pos > 0
            out[nonzero] = _cum[pos[nonzero] - 1]
            return out

        fills["outcome_cdf"] = _cdf
    if "exposure_prob" in needs:
        px = _marginal([(v,) for v in x], p)
        lookup = _lookup(px, "exposure probability", default=0.0)
        fills["exposure_prob"] = lambda xv, _f=lookup: _f(
            [(float(v),) for v in np.asarray(xv)]
        )
    if "mean_y" in needs:
        fills["mean_y"] = float(np.dot(p, y))
    if "mean_x" in needs:
        fills["mean_x"] = float(np.dot(p, x))
    if needs & {"mediated_outcome", "mediator_law", "mediator_support"}:
        mkeys = _keys(M)
        b_table = _CellTable()
        zxm = _marginal(
            [(zk, xv, mk) for zk, xv, mk in zip(zkeys, x, mkeys)], p
        )
        zx = _marginal([(zk, xv) for zk, xv in zip(zkeys, x)], p)
        for i, pi in enumerate(p):
            b_table.add((zkeys[i], x[i], mkeys[i]), float(pi), float(y[i]))
        b_means = b_table.mean_table("mediated outcome mean")
        blookup = _lookup(b_means, "mediated outcome mean")
        fills["mediated_outcome"] = lambda Mv, xv, Zv, _f=blookup: _f(
            [
                (tuple(zr), float(a), tuple(mr))
                for mr, a, zr in zip(np.atleast_2d(Mv), np.asarray(xv), np.atleast_2d(Zv))
            ]
        )
        law_table = {}
        for (zk, xv, mk), w in zxm.items():
            wx = zx.get((zk, xv), 0.0)
            if wx > 0.0 and w > 0.0:
                law_table[(zk, xv, mk)] = w / wx
        mlookup = _lookup(law_table, "mediator law", default=0.0)
        fills["mediator_law"] = lambda Mv, xv, Zv, _f=mlookup: _f(
            [
                (tuple(zr), float(a), tuple(mr))
                for mr, a, zr in zip(np.atleast_2d(Mv), np.asarray(xv), np.atleast_2d(Zv))
            ]
        )
        fills["mediator_support"] = tuple(sorted({mk for mk in mkeys}))
    return NuisanceSet(**fills)


# ---------------------------------------------------------------------------
# catalog registry
# ---------------------------------------------------------------------------


CATALOG = {
    cls.name: cls
    for cls in (
        PopulationMean,
        AverageDensity,
        Covariance,
        PotentialOutcomeMean,
        Ate,
        ExpectedConditionalCovariance,
        PartiallyLinearCoefficient,
        AverageDerivativeEffect,
        Quantile,
        TailConditionalExpectation,
        ConditionalCdf,
        InterventionalDirectEffect,
        IncrementalPropensity,
        DensityAtPoint,
        ConditionalMeanAt,
    )
}

_PARAM_TYPES = {
    "x": float,
    "x1": int,
    "x0": int,
    "y": float,
    "tau": float,
    "threshold": float,
    "epsilon": float,
    "weight_kind": str,
    "weight_coefficients": tuple,
}


def from_config(name: str, params: Optional[dict] = None) -> Estimand:
    """Build a catalog estimand from its name and keyword parameters."""
    if name not in CATALOG:
        raise ValidationError(
            f"unknown estimand {name!r}; available: {', '.join(sorted(CATALOG))}"
        )
    cls = CATALOG[name]
    params = dict(params or {})
    fields = getattr(cls, "__dataclass_fields__", {})
    unknown = set(params) - set(fields)
    if unknown:
        raise ValidationError(
            f"estimand {name!r} does not accept parameters {sorted(unknown)}"
        )
    coerced = {}
    for key, value in params.items():
        want = _PARAM_TYPES.get(key)
        try:
            if want is tuple:
                coerced[key] = tuple(float(v) for v in value)
            elif want is int:
                coerced[key] = int(value)
            elif want is float:
                coerced[key] = float(value)
            else:
                coerced[key] = value
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"estimand parameter {key}={value!r} is invalid") from exc
    if name == "potential_outcome_mean" and "x" in coerced:
        coerced["x"] = int(coerced["x"])
    return cls(**coerced)
