"""Numerical verification of influence functions.

The central identity being checked: along the mixture path
P_t = (1 - t) P + t Q, the derivative of the functional at t = 0 equals
the mean of the influence function under the contaminating law Q,

    d/dt Psi(P_t) |_{t=0} = E_Q[ phi(O, P) ],

and at the other end of the path

    d/dt Psi(P_t) |_{t=1} = - E_P[ phi(O, Q) ].

Derivatives are one-sided finite differences accelerated by Richardson
extrapolation; influence-function means use exact nuisances computed from
the finite-support laws, so any disagreement beyond tolerance indicts the
analytic influence function (or the plug-in), not the arithmetic.

The module also computes von Mises remainders
R(P, Q) = Psi(Q) - Psi(P) + E_P[ phi(O, Q) ] (second order in Q - P) and
runs the same derivative check on smooth location families for the
estimands that have no finite-support analogue (quantiles and average
derivatives need densities).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .distributions import (
    DiscreteDistribution,
    MixturePath,
    Observation,
    Schema,
    Column,
    mixture_at,
    point_mass,
)
from .errors import (
    DerivativeUnstableError,
    IntegrationError,
    PositivityError,
    ValidationError,
    VerificationError,
)
from .estimands import (
    Ate,
    AverageDensity,
    AverageDerivativeEffect,
    ColumnSet,
    ConditionalCdf,
    Covariance,
    Estimand,
    ExpectedConditionalCovariance,
    IncrementalPropensity,
    InterventionalDirectEffect,
    NuisanceSet,
    PartiallyLinearCoefficient,
    PopulationMean,
    PotentialOutcomeMean,
    Quantile,
    TailConditionalExpectation,
    exact_nuisances,
)
from ._smooth import (
    GaussianRegressionFamily,
    NormalMixture,
    derivative_path_functions,
    quantile_path_functions,
    tail_path_functions,
)

FIRST_STEP = 1e-2
RICHARDSON_ORDER = 4
MAX_HALVINGS = 12
CONVERGENCE_RTOL = 1e-9
DEFAULT_TOLERANCE = 1e-6
MIN_CELL_PROB = 1e-6
REMAINDER_DECAY_STEPS = (0.2, 0.1, 0.05)
REMAINDER_DECAY_RTOL = 0.2


# ---------------------------------------------------------------------------
# Richardson-extrapolated one-sided derivative
# ---------------------------------------------------------------------------


def richardson_derivative(
    g: Callable[[float], float],
    at: float = 0.0,
    direction: float = 1.0,
    first_step: float = FIRST_STEP,
) -> tuple[float, int]:
    """One-sided derivative of g at ``at`` by successive halving.

    Forward differences D(h) = (g(at + direction * h) - g(at)) / (direction * h)
    carry an error expansion in powers of h; a Richardson table of order
    ``RICHARDSON_ORDER`` cancels the leading terms.  Returns the stabilized
    derivative and the number of step halvings used; raises
    ``DerivativeUnstableError`` when successive extrapolants fail to agree to
    ``CONVERGENCE_RTOL`` (relative) within ``MAX_HALVINGS`` halvings.
    """
    g0 = g(at)
    table: list[list[float]] = []
    previous: Optional[float] = None
    for k in range(MAX_HALVINGS + 1):
        h = first_step / (2.0**k)
        d = (g(at + direction * h) - g0) / (direction * h)
        row = [d]
        if table:
            last = table[-1]
            for j in range(1, min(len(last) + 1, RICHARDSON_ORDER + 1)):
                factor = 2.0**j
                row.append((factor * row[j - 1] - last[j - 1]) / (factor - 1.0))
        table.append(row)
        current = row[-1]
        if previous is not None:
            if abs(current - previous) <= CONVERGENCE_RTOL * max(1.0, abs(current)):
                return current, k
        previous = current
    raise DerivativeUnstableError(
        f"one-sided derivative did not stabilize after {MAX_HALVINGS} halvings "
        f"(last extrapolants {table[-2][-1]!r}, {table[-1][-1]!r})"
    )


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateauxReport:
    """Outcome of one derivative-versus-influence-function comparison."""

    spec: Estimand
    at_t: float
    numerical_derivative: float
    analytic_value: float
    halvings: int
    contaminant_label: str = ""
    skipped: bool = False
    skip_reason: str = ""

    @property
    def abs_error(self) -> float:
        return abs(self.numerical_derivative - self.analytic_value)

    @property
    def rel_error(self) -> float:
        return self.abs_error / max(1.0, abs(self.analytic_value))

    def to_json(self) -> dict:
        return {
            "estimand": self.spec.describe(),
            "at_t": self.at_t,
            "numerical_derivative": self.numerical_derivative,
            "analytic_value": self.analytic_value,
            "abs_error": self.abs_error,
            "rel_error": self.rel_error,
            "halvings": self.halvings,
            "contaminant": self.contaminant_label,
            "skipped": self.skipped,
            "skip_reason": self.skip_reason,
        }


@dataclass(frozen=True)
class RemainderReport:
    """Von Mises expansion terms for a (base, contaminant) pair.

    The expansion reads Psi(Q) = Psi(P) + drift - remainder with
    ``drift`` = -E_P[phi(O, Q)], so

        remainder R(P, Q) = -E_P[phi(O, Q)] - (Psi(Q) - Psi(P)).

    The identity Psi(Q) - Psi(P) - drift + remainder = 0 holds by
    construction; the informative fields are the remainder itself and any
    estimand-specific bound on it.
    """

    spec: Estimand
    psi_base: float
    psi_contaminant: float
    drift: float
    remainder: float
    bound: Optional[float] = None
    bound_kind: str = ""

    def to_json(self) -> dict:
        return {
            "estimand": self.spec.describe(),
            "psi_base": self.psi_base,
            "psi_contaminant": self.psi_contaminant,
            "drift": self.drift,
            "remainder": self.remainder,
            "bound": self.bound,
            "bound_kind": self.bound_kind,
        }


# ---------------------------------------------------------------------------
# expectation of the influence function under a finite-support law
# ---------------------------------------------------------------------------


def eif_mean_under(
    spec: Estimand,
    evaluation_law: DiscreteDistribution,
    nuisance_law: DiscreteDistribution,
    psi: Optional[float] = None,
) -> float:
    """E_Q[phi(O, P)] with Q the evaluation law and P the nuisance law."""
    if psi is None:
        psi = spec.plugin_value(nuisance_law)
    nuis = exact_nuisances(spec, nuisance_law)
    cols = ColumnSet.from_matrix(evaluation_law.schema, evaluation_law.values)
    values = spec.eif_values(cols, nuis, psi)
    return float(np.dot(evaluation_law.probs, values))


def numerical_gateaux(spec: Estimand, path: MixturePath, at_t: float = 0.0) -> tuple[float, int]:
    """Richardson derivative of t -> Psi(P_t) at an endpoint of the path."""
    if at_t not in (0.0, 1.0):
        raise ValidationError(f"derivative endpoint must be 0 or 1, got {at_t!r}")
    direction = 1.0 if at_t == 0.0 else -1.0

    def g(t: float) -> float:
        return spec.plugin_value(mixture_at(path, t))

    return richardson_derivative(g, at=at_t, direction=direction)


def _min_conditioning_cell(spec: Estimand, law: DiscreteDistribution) -> float:
    """Smallest probability among the cells the estimand conditions on."""
    needs = spec.nuisance_requirements()
    V = law.values
    p = law.probs
    schema = law.schema
    cov = list(schema.indices_with_role("covariate"))
    exp_idx = schema.indices_with_role("exposure")
    cells: dict = {}
    if {"outcome_mean", "propensity", "conditional_mean_y", "conditional_mean_x",
        "mediated_outcome", "mediator_law"} & needs:
        keys = []
        for row in V:
            zkey = tuple(row[j] for j in cov)
            keys.append(zkey)
        for key, prob in zip(keys, p):
            cells[key] = cells.get(key, 0.0) + prob
        if {"outcome_mean", "propensity", "mediated_outcome", "mediator_law"} & needs and exp_idx:
            xcol = V[:, exp_idx[0]]
            finer: dict = {}
            for row, prob, xv in zip(V, p, xcol):
                key = (tuple(row[j] for j in cov), xv)
                finer[key] = finer.get(key, 0.0) + prob
            cells.update(finer)
    if not cells:
        return 1.0
    return float(min(cells.values()))


def verify_eif(
    spec: Estimand,
    base: DiscreteDistribution,
    contaminants: Optional[Sequence[DiscreteDistribution]] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[GateauxReport]:
    """Check d/dt Psi(P_t)|_0 = E_Q[phi(O, P)] for each contaminant Q.

    By default every atom of the base support becomes a point-mass
    contaminant.  Paths whose base law has a conditioning cell below
    ``MIN_CELL_PROB`` are reported as skipped rather than silently passed.
    """
    if not spec.discrete_oracle:
        raise ValidationError(
            f"estimand {spec.name!r} has no finite-support oracle; "
            "use smooth_path_check instead"
        )
    if contaminants is None:
        labeled = [
            (point_mass(Observation(atom, base.schema)), f"atom:{i}")
            for i, atom in enumerate(base.support)
        ]
    else:
        labeled = [(q, f"law:{i}") for i, q in enumerate(contaminants)]
    psi0 = spec.plugin_value(base)
    min_cell = _min_conditioning_cell(spec, base)
    reports = []
    for contaminant, label in labeled:
        if min_cell < MIN_CELL_PROB:
            reports.append(
                GateauxReport(
                    spec=spec, at_t=0.0, numerical_derivative=math.nan,
                    analytic_value=math.nan, halvings=0, contaminant_label=label,
                    skipped=True,
                    skip_reason=(
                        f"a conditioning cell has probability {min_cell:.2e} "
                        f"< {MIN_CELL_PROB}"
                    ),
                )
            )
            continue
        path = MixturePath(base, contaminant)
        derivative, halvings = numerical_gateaux(spec, path, at_t=0.0)
        analytic = eif_mean_under(spec, contaminant, base, psi=psi0)
        reports.append(
            GateauxReport(
                spec=spec, at_t=0.0, numerical_derivative=derivative,
                analytic_value=analytic, halvings=halvings, contaminant_label=label,
            )
        )
    return reports


def check_t1_identity(
    spec: Estimand,
    base: DiscreteDistribution,
    contaminant: DiscreteDistribution,
) -> GateauxReport:
    """Check d/dt Psi(P_t)|_1 = -E_P[phi(O, Q)] on one path."""
    if not spec.discrete_oracle:
        raise ValidationError(
            f"estimand {spec.name!r} has no finite-support oracle; "
            "use smooth_path_check instead"
        )
    min_cell = _min_conditioning_cell(spec, contaminant)
    if min_cell < MIN_CELL_PROB:
        return GateauxReport(
            spec=spec, at_t=1.0, numerical_derivative=math.nan,
            analytic_value=math.nan, halvings=0, contaminant_label="law",
            skipped=True,
            skip_reason=(
                f"a conditioning cell of the contaminant has probability "
                f"{min_cell:.2e} < {MIN_CELL_PROB}"
            ),
        )
    path = MixturePath(base, contaminant)
    derivative, halvings = numerical_gateaux(spec, path, at_t=1.0)
    analytic = -eif_mean_under(spec, base, contaminant)
    return GateauxReport(
        spec=spec, at_t=1.0, numerical_derivative=derivative,
        analytic_value=analytic, halvings=halvings, contaminant_label="law",
    )


# ---------------------------------------------------------------------------
# von Mises remainder
# ---------------------------------------------------------------------------


def von_mises_remainder(
    spec: Estimand,
    base: DiscreteDistribution,
    contaminant: DiscreteDistribution,
    nuisance_override: Optional[NuisanceSet] = None,
) -> RemainderReport:
    """Remainder of the first-order expansion of Psi at the contaminant.

    R(P, Q) = -E_P[phi(O, Q)] - (Psi(Q) - Psi(P)).  ``nuisance_override``
    replaces the exact nuisances of the contaminant when evaluating phi,
    which is how a correctly specified single nuisance (a known propensity,
    say) is expressed.

    Estimand-specific bounds attached to the report:

    * ``Ate`` and ``PotentialOutcomeMean``: per-arm Cauchy-Schwarz bound
      sqrt(E_P[(pi_arm/q_arm - 1)^2]) * sqrt(E_P[(m_arm - m_arm_q)^2]),
      summed over the arms involved.
    * ``AverageDensity``: the remainder equals sum_y (p(y) - q(y))^2
      exactly; the bound field carries that sum for comparison.
    """
    psi_p = spec.plugin_value(base)
    psi_q = spec.plugin_value(contaminant)
    if nuisance_override is None:
        nuis_q = exact_nuisances(spec, contaminant)
    else:
        nuis_q = nuisance_override
    cols = ColumnSet.from_matrix(base.schema, base.values)
    phi_q = spec.eif_values(cols, nuis_q, psi_q)
    drift = -float(np.dot(base.probs, phi_q))
    remainder = drift - (psi_q - psi_p)
    bound = None
    bound_kind = ""
    if isinstance(spec, (Ate, PotentialOutcomeMean)):
        arms = (1, 0) if isinstance(spec, Ate) else (spec.x,)
        bound = 0.0
        nuis_p = exact_nuisances(spec, base)
        pi_p = np.asarray(nuis_p.propensity(cols.Z), dtype=float)
        pi_q = np.asarray(nuis_q.propensity(cols.Z), dtype=float)
        for arm in arms:
            arm_vec = np.full(cols.n, float(arm))
            m_p = np.asarray(nuis_p.outcome_mean(arm_vec, cols.Z), dtype=float)
            m_q = np.asarray(nuis_q.outcome_mean(arm_vec, cols.Z), dtype=float)
            pa_p = pi_p if arm == 1 else 1.0 - pi_p
            pa_q = pi_q if arm == 1 else 1.0 - pi_q
            ratio_sq = float(np.dot(base.probs, (pa_p / pa_q - 1.0) ** 2))
            diff_sq = float(np.dot(base.probs, (m_p - m_q) ** 2))
            bound += math.sqrt(ratio_sq) * math.sqrt(diff_sq)
        bound_kind = "cauchy_schwarz"
    elif isinstance(spec, AverageDensity):
        iy = base.schema.sole_index("outcome")
        pmf_p: dict = {}
        for row, prob in zip(base.values, base.probs):
            pmf_p[row[iy]] = pmf_p.get(row[iy], 0.0) + prob
        pmf_q: dict = {}
        for row, prob in zip(contaminant.values, contaminant.probs):
            pmf_q[row[iy]] = pmf_q.get(row[iy], 0.0) + prob
        keys = set(pmf_p) | set(pmf_q)
        bound = float(
            sum((pmf_p.get(k, 0.0) - pmf_q.get(k, 0.0)) ** 2 for k in keys)
        )
        bound_kind = "exact_squared_mass"
    return RemainderReport(
        spec=spec, psi_base=psi_p, psi_contaminant=psi_q,
        drift=drift, remainder=remainder, bound=bound, bound_kind=bound_kind,
    )


def remainder_decay_check(
    spec: Estimand,
    base: DiscreteDistribution,
    contaminant: DiscreteDistribution,
    steps: Sequence[float] = REMAINDER_DECAY_STEPS,
) -> list[float]:
    """R(P, P_t) / t^2 along the path; second-order behavior means the
    ratios stabilize.  Returns the ratios for the given steps."""
    path = MixturePath(base, contaminant)
    ratios = []
    for t in steps:
        mixed = mixture_at(path, t)
        report = von_mises_remainder(spec, base, mixed)
        ratios.append(report.remainder / t**2)
    return ratios


# ---------------------------------------------------------------------------
# random law generators for verification sweeps
# ---------------------------------------------------------------------------


OUTCOME_ONLY = Schema((Column("y", "outcome", "continuous"),))
EXPOSURE_OUTCOME = Schema(
    (Column("x", "exposure", "discrete"), Column("y", "outcome", "continuous"))
)
FULL_SCHEMA = Schema(
    (
        Column("z", "covariate", "discrete"),
        Column("x", "exposure", "binary"),
        Column("y", "outcome", "continuous"),
    )
)
MEDIATION_SCHEMA = Schema(
    (
        Column("z", "covariate", "binary"),
        Column("x", "exposure", "binary"),
        Column("m", "mediator", "binary"),
        Column("y", "outcome", "continuous"),
    )
)


def _distinct_values(rng: np.random.Generator, count: int) -> list[float]:
    values: set = set()
    while len(values) < count:
        values.add(round(float(rng.normal()), 3))
    return sorted(values)


def random_law(
    rng: np.random.Generator, schema: Schema, max_support: int = 20
) -> DiscreteDistribution:
    """Random finite-support law with every conditioning cell positive.

    Cell structures follow the schema: covariate and exposure levels form a
    full product so conditional means exist everywhere, and outcome values
    within each cell are drawn fresh.  Dirichlet(1) weights over atoms.
    """
    if schema is OUTCOME_ONLY or [c.role for c in schema.columns] == ["outcome"]:
        k = int(rng.integers(3, min(max_support, 12) + 1))
        support = [(v,) for v in _distinct_values(rng, k)]
    elif schema is EXPOSURE_OUTCOME:
        levels = [0.0, 1.0, 2.0][: int(rng.integers(2, 4))]
        per_cell = max(2, min(3, max_support // len(levels)))
        support = []
        for lev in levels:
            for v in _distinct_values(rng, per_cell):
                support.append((lev, v))
    elif schema is FULL_SCHEMA:
        z_levels = [0.0, 1.0] if rng.random() < 0.7 else [0.0, 1.0, 2.0]
        per_cell = 2 if len(z_levels) == 3 else int(rng.integers(2, 4))
        support = []
        for z in z_levels:
            for x in (0.0, 1.0):
                for v in _distinct_values(rng, per_cell):
                    support.append((z, x, v))
    elif schema is MEDIATION_SCHEMA:
        support = []
        for z in (0.0, 1.0):
            for x in (0.0, 1.0):
                for m in (0.0, 1.0):
                    for v in _distinct_values(rng, 2):
                        support.append((z, x, m, v))
    else:
        raise ValidationError(f"no random-law generator for schema {schema!r}")
    if len(support) > max(max_support, 32):
        support = support[: max(max_support, 32)]
    probs = rng.dirichlet(np.ones(len(support)))
    # keep every cell comfortably above the skip threshold
    probs = 0.9 * probs + 0.1 / len(support)
    probs = probs / probs.sum()
    return DiscreteDistribution(schema, support, probs)


def contaminant_law(
    rng: np.random.Generator, base: DiscreteDistribution
) -> DiscreteDistribution:
    """Random full-support law on the same atoms as the base."""
    probs = rng.dirichlet(np.ones(base.n_atoms))
    probs = 0.9 * probs + 0.1 / base.n_atoms
    probs = probs / probs.sum()
    return DiscreteDistribution(base.schema, base.support, probs)


def _sweep_spec_for(rng: np.random.Generator, name: str, law: DiscreteDistribution):
    """Instantiate a sweep estimand with parameters that fit the law."""
    iy = law.schema.indices_with_role("outcome")[0]
    ys = sorted(set(law.values[:, iy]))
    if name == "tail_conditional_expectation":
        return TailConditionalExpectation(threshold=float(ys[len(ys) // 2]))
    if name == "conditional_cdf":
        ix = law.schema.sole_index("exposure")
        xs = sorted(set(law.values[:, ix]))
        return ConditionalCdf(y=float(ys[len(ys) // 2]), x=float(xs[0]))
    if name == "incremental_propensity":
        return IncrementalPropensity(epsilon=float(rng.uniform(0.5, 3.0)))
    raise ValidationError(f"unknown sweep estimand {name!r}")


SWEEP_PLAN: tuple[tuple[str, Schema], ...] = (
    ("population_mean", OUTCOME_ONLY),
    ("average_density", OUTCOME_ONLY),
    ("tail_conditional_expectation", OUTCOME_ONLY),
    ("covariance", EXPOSURE_OUTCOME),
    ("conditional_cdf", EXPOSURE_OUTCOME),
    ("potential_outcome_mean:1", FULL_SCHEMA),
    ("potential_outcome_mean:0", FULL_SCHEMA),
    ("ate", FULL_SCHEMA),
    ("expected_conditional_covariance", FULL_SCHEMA),
    ("partially_linear_coefficient", FULL_SCHEMA),
    ("incremental_propensity", FULL_SCHEMA),
    ("interventional_direct_effect", MEDIATION_SCHEMA),
)


def _build_sweep_spec(rng, entry: str, law: DiscreteDistribution) -> Estimand:
    if entry == "population_mean":
        return PopulationMean()
    if entry == "average_density":
        return AverageDensity()
    if entry == "covariance":
        return Covariance()
    if entry == "potential_outcome_mean:1":
        return PotentialOutcomeMean(1)
    if entry == "potential_outcome_mean:0":
        return PotentialOutcomeMean(0)
    if entry == "ate":
        return Ate()
    if entry == "expected_conditional_covariance":
        return ExpectedConditionalCovariance()
    if entry == "partially_linear_coefficient":
        return PartiallyLinearCoefficient()
    if entry == "interventional_direct_effect":
        return InterventionalDirectEffect(x1=1, x0=0)
    return _sweep_spec_for(rng, entry, law)


@dataclass(frozen=True)
class SweepResult:
    """Aggregate of a randomized verification sweep."""

    reports: tuple[GateauxReport, ...]
    worst_rel_error: float
    checked: int
    skipped: int

    def failures(self, tolerance: float = DEFAULT_TOLERANCE) -> list[GateauxReport]:
        return [
            r for r in self.reports if not r.skipped and r.rel_error > tolerance
        ]


def oracle_sweep(
    trials: int = 50,
    seed: int = 20250815,
    max_support: int = 20,
    at_t: float = 0.0,
    tolerance: float = DEFAULT_TOLERANCE,
    raise_on_failure: bool = False,
    keep: str = "all",
    only: Optional[str] = None,
) -> SweepResult:
    """Randomized verification sweep over the finite-support catalog.

    For each estimand with a finite-support oracle, draws ``trials`` random
    laws.  At t = 0 every atom of the law becomes a point-mass contaminant
    and the derivative is compared with phi at that atom; at t = 1 the
    contaminant is a random full-support law on the same atoms (point
    masses would put zero mass on conditioning cells of the estimands that
    condition, leaving their nuisances undefined).

    ``keep="worst"`` records only the largest-error report of each
    (estimand, trial) pair; the checks run either way.  ``only`` restricts
    the plan to one estimand name.
    """
    if keep not in ("all", "worst"):
        raise ValidationError(f"keep must be 'all' or 'worst', got {keep!r}")
    plan = SWEEP_PLAN
    if only is not None:
        plan = tuple(
            (entry, schema)
            for entry, schema in plan
            if entry.split(":")[0] == only
        )
        if not plan:
            names = sorted({entry.split(":")[0] for entry, _ in SWEEP_PLAN})
            raise ValidationError(
                f"no sweep entry for estimand {only!r}; available: {', '.join(names)}"
            )
    rng = np.random.default_rng(seed)
    reports: list[GateauxReport] = []
    for entry, schema in plan:
        for _ in range(trials):
            law = random_law(rng, schema, max_support=max_support)
            spec = _build_sweep_spec(rng, entry, law)
            if at_t == 0.0:
                batch = verify_eif(spec, law, tolerance=tolerance)
            else:
                contaminant = contaminant_law(rng, law)
                batch = [check_t1_identity(spec, law, contaminant)]
            live_batch = [r for r in batch if not r.skipped]
            if keep == "worst" and live_batch:
                reports.append(max(live_batch, key=lambda r: r.rel_error))
            else:
                reports.extend(batch)
    live = [r for r in reports if not r.skipped]
    worst = max((r.rel_error for r in live), default=0.0)
    result = SweepResult(
        reports=tuple(reports),
        worst_rel_error=worst,
        checked=len(live),
        skipped=len(reports) - len(live),
    )
    if raise_on_failure and result.failures(tolerance):
        worst_report = max(result.failures(tolerance), key=lambda r: r.rel_error)
        raise VerificationError(
            f"influence-function check failed for {worst_report.spec.name} "
            f"(rel error {worst_report.rel_error:.3e} > {tolerance})"
        )
    return result


# ---------------------------------------------------------------------------
# smooth-family checks
# ---------------------------------------------------------------------------

SMOOTH_TOLERANCE = 1e-5


def smooth_path_check(spec: Estimand, base, contaminant) -> GateauxReport:
    """Derivative check on closed-form Gaussian families.

    Quantiles, tail means, and average derivatives have influence functions
    involving densities, so the finite-support oracle does not apply.  This
    check differentiates t -> psi(P_t) along the mixture of two closed-form
    families and compares with the mean of the influence function at the base
    family under the contaminant, computed by quadrature from the exact
    nuisances of the base family.

    ``base`` and ``contaminant`` are ``NormalMixture`` objects for quantile
    and tail specs, ``GaussianRegressionFamily`` objects for the average
    derivative.
    """
    if isinstance(spec, Quantile):
        expected = NormalMixture
        builder = quantile_path_functions
    elif isinstance(spec, TailConditionalExpectation):
        expected = NormalMixture
        builder = tail_path_functions
    elif isinstance(spec, AverageDerivativeEffect):
        expected = GaussianRegressionFamily
        builder = derivative_path_functions
    else:
        raise ValidationError(
            f"no smooth-family check for estimand {spec.name!r}; "
            "use verify_eif on a finite-support law"
        )
    if not isinstance(base, expected) or not isinstance(contaminant, expected):
        raise ValidationError(
            f"{spec.name} requires {expected.__name__} base and contaminant families"
        )
    psi_at, analytic = builder(spec, base, contaminant)
    value, halvings = richardson_derivative(psi_at, 0.0, 1.0)
    return GateauxReport(
        spec=spec,
        at_t=0.0,
        numerical_derivative=value,
        analytic_value=analytic,
        halvings=halvings,
        contaminant_label=f"{expected.__name__} contaminant",
    )


def smooth_sweep(
    tolerance: float = SMOOTH_TOLERANCE, raise_on_failure: bool = False
) -> SweepResult:
    """Fixed battery of smooth-family derivative checks.

    Runs ``smooth_path_check`` for quantiles at several levels, tail means at
    several thresholds, and average derivatives with unit and polynomial
    weights, on bimodal base families against shifted contaminants.

    Every contaminant is chosen with strictly smaller spread than its base so
    the likelihood ratio stays bounded.  That keeps t -> psi(P_t) analytic at
    t = 0; a heavier-tailed contaminant makes higher t-derivatives diverge
    (the ratio enters the derivative formulas with increasing powers) and the
    extrapolation stalls even though the first derivative exists.
    """
    outcome_base = NormalMixture(
        weights=(0.6, 0.4), means=(-0.5, 1.5), sds=(0.8, 1.2)
    )
    outcome_cont = NormalMixture(
        weights=(0.5, 0.5), means=(0.7, -1.8), sds=(1.0, 0.6)
    )
    regression_base = GaussianRegressionFamily(
        mu_z=0.3,
        sd_z=1.0,
        a0=0.2,
        a1=0.5,
        sd_x=0.9,
        coef=(0.4, 1.1, -0.7, 0.35, -0.25),
    )
    regression_cont = GaussianRegressionFamily(
        mu_z=-0.2,
        sd_z=0.7,
        a0=-0.1,
        a1=0.3,
        sd_x=0.6,
        coef=(-0.2, 0.6, 0.5, -0.15, 0.4),
    )
    cases: list[tuple[Estimand, object, object]] = [
        (Quantile(tau=0.25), outcome_base, outcome_cont),
        (Quantile(tau=0.5), outcome_base, outcome_cont),
        (Quantile(tau=0.9), outcome_base, outcome_cont),
        (TailConditionalExpectation(threshold=0.0), outcome_base, outcome_cont),
        (TailConditionalExpectation(threshold=1.0), outcome_base, outcome_cont),
        (AverageDerivativeEffect(), regression_base, regression_cont),
        (
            AverageDerivativeEffect(
                weight_kind="polynomial", weight_coefficients=(1.0, 0.5)
            ),
            regression_base,
            regression_cont,
        ),
    ]
    reports = [smooth_path_check(spec, base, cont) for spec, base, cont in cases]
    worst = max(r.rel_error for r in reports)
    result = SweepResult(
        reports=tuple(reports),
        worst_rel_error=worst,
        checked=len(reports),
        skipped=0,
    )
    if raise_on_failure and result.failures(tolerance):
        worst_report = max(result.failures(tolerance), key=lambda r: r.rel_error)
        raise VerificationError(
            f"smooth-family check failed for {worst_report.spec.name} "
            f"(rel error {worst_report.rel_error:.3e} > {tolerance})"
        )
    return result
