"""Observation schemas, datasets, finite-support laws, and mixture paths.

Everything in this module is immutable and pure.  A schema declares, for
each column, a role (outcome, exposure, covariate, mediator) and a kind
(continuous, binary, discrete); roles are never inferred from data.  A
``DiscreteDistribution`` is an explicit finite-support law used by the
verification oracle: atoms are identified by exact float equality and
duplicates are merged by summing probability.  ``MixturePath`` represents
the line segment (1 - t) * base + t * contaminant, the paths along which
functionals are differentiated.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import CsvParseError, SchemaError

ROLES = ("outcome", "exposure", "covariate", "mediator")
KINDS = ("continuous", "binary", "discrete")

PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Column:
    """Declared name, role, and kind of one observation coordinate."""

    name: str
    role: str
    kind: str

    def __post_init__(self) -> None:
        if not self.name:
            raise SchemaError("column name must be non-empty")
        if self.role not in ROLES:
            raise SchemaError(
                f"column {self.name!r}: unknown role {self.role!r}; expected one of {ROLES}"
            )
        if self.kind not in KINDS:
            raise SchemaError(
                f"column {self.name!r}: unknown kind {self.kind!r}; expected one of {KINDS}"
            )


@dataclass(frozen=True)
class Schema:
    """Ordered collection of columns with unique names.

    At most one outcome and one exposure column are allowed; covariates and
    mediators may repeat.  Index helpers return positions into the value
    tuples of observations that use this schema.
    """

    columns: tuple[Column, ...]

    def __post_init__(self) -> None:
        if not self.columns:
            raise SchemaError("schema must declare at least one column")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate column names in schema: {names}")
        for role in ("outcome", "exposure"):
            if sum(c.role == role for c in self.columns) > 1:
                raise SchemaError(f"schema declares more than one {role} column")

    @property
    def arity(self) -> int:
        return len(self.columns)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def index_of(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise SchemaError(f"no column named {name!r} in schema {self.names}")

    def indices_with_role(self, role: str) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.columns) if c.role == role)

    def sole_index(self, role: str) -> int:
        idx = self.indices_with_role(role)
        if len(idx) != 1:
            raise SchemaError(f"schema has {len(idx)} {role} columns; exactly one required")
        return idx[0]

    def validate_values(self, values: Sequence[float]) -> tuple[float, ...]:
        """Check one row against column kinds and return it as a float tuple."""
        if len(values) != self.arity:
            raise SchemaError(
                f"row has {len(values)} values but schema has {self.arity} columns"
            )
        out = []
        for col, v in zip(self.columns, values):
            v = float(v)
            if not np.isfinite(v):
                raise SchemaError(f"column {col.name!r}: non-finite value {v!r}")
            if col.kind == "binary" and v not in (0.0, 1.0):
                raise SchemaError(f"column {col.name!r} is binary but saw value {v!r}")
            if col.kind == "discrete" and v != int(v):
                raise SchemaError(f"column {col.name!r} is discrete but saw value {v!r}")
            out.append(v)
        return tuple(out)


@dataclass(frozen=True)
class Observation:
    """A single data point: one float per schema column."""

    values: tuple[float, ...]
    schema: Schema

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", self.schema.validate_values(self.values))

    def value_of(self, name: str) -> float:
        return self.values[self.schema.index_of(name)]


class Dataset:
    """Immutable n-row collection of observations sharing one schema.

    Rows are stored as a read-only float array of shape (n, arity); the
    per-row ``Observation`` view is materialized on demand.
    """

    def __init__(self, schema: Schema, values: np.ndarray | Sequence[Sequence[float]]):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != schema.arity:
            raise SchemaError(
                f"dataset values must have shape (n, {schema.arity}); got {arr.shape}"
            )
        if arr.shape[0] == 0:
            raise SchemaError("dataset must contain at least one row")
        if not np.all(np.isfinite(arr)):
            raise SchemaError("dataset contains non-finite values")
        for j, col in enumerate(schema.columns):
            colvals = arr[:, j]
            if col.kind == "binary" and not np.all((colvals == 0.0) | (colvals == 1.0)):
                raise SchemaError(f"column {col.name!r} is binary but has other values")
            if col.kind == "discrete" and not np.all(colvals == np.round(colvals)):
                raise SchemaError(f"column {col.name!r} is discrete but has non-integer values")
        arr = arr.copy()
        arr.setflags(write=False)
        self._schema = schema
        self._values = arr

    @property
    def schema(self) -> Schema:
        return self._schema

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return self._values.shape[0]

    def row(self, i: int) -> Observation:
        return Observation(tuple(self._values[i]), self._schema)

    def observations(self) -> Iterator[Observation]:
        for i in range(self.n):
            yield self.row(i)

    def column(self, name: str) -> np.ndarray:
        return self._values[:, self._schema.index_of(name)]


class DiscreteDistribution:
    """Finite-support probability law over observation tuples.

    Duplicate support points (exact float equality of the whole tuple) are
    merged by summing their probabilities.  Probabilities must be
    nonnegative and sum to one within ``PROB_SUM_TOL``; they are stored as
    given, never renormalized.
    """

    def __init__(
        self,
        schema: Schema,
        support: Sequence[Sequence[float]],
        probs: Sequence[float],
    ):
        if len(support) != len(probs):
            raise SchemaError(
                f"support has {len(support)} atoms but {len(probs)} probabilities"
            )
        if len(support) == 0:
            raise SchemaError("discrete distribution needs at least one atom")
        merged: dict[tuple[float, ...], float] = {}
        for point, p in zip(support, probs):
            p = float(p)
            if p < 0.0:
                raise SchemaError(f"negative probability {p!r} for atom {tuple(point)!r}")
            key = schema.validate_values(point)
            merged[key] = merged.get(key, 0.0) + p
        total = sum(merged.values())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise SchemaError(f"probabilities sum to {total!r}, not 1")
        self._schema = schema
        self._support = tuple(merged.keys())
        self._probs = np.array(list(merged.values()), dtype=float)
        self._probs.setflags(write=False)
        self._index = {pt: i for i, pt in enumerate(self._support)}
        values = np.array(self._support, dtype=float)
        values.setflags(write=False)
        self._values = values

    @property
    def schema(self) -> Schema:
        return self._schema

    @property
    def support(self) -> tuple[tuple[float, ...], ...]:
        return self._support

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def values(self) -> np.ndarray:
        """Support atoms stacked as a (k, arity) float array."""
        return self._values

    @property
    def n_atoms(self) -> int:
        return len(self._support)

    def prob_of(self, point: Sequence[float]) -> float:
        key = tuple(float(v) for v in point)
        i = self._index.get(key)
        return float(self._probs[i]) if i is not None else 0.0

    def sample(self, n: int, rng: np.random.Generator) -> Dataset:
        """Draw n i.i.d. rows from this law."""
        idx = rng.choice(self.n_atoms, size=n, p=self._probs / self._probs.sum())
        return Dataset(self._schema, self._values[idx])


@dataclass(frozen=True)
class MixturePath:
    """The segment of laws (1 - t) * base + t * contaminant, for t in [0, 1]."""

    base: DiscreteDistribution
    contaminant: DiscreteDistribution

    def __post_init__(self) -> None:
        if self.base.schema != self.contaminant.schema:
            raise SchemaError("mixture path requires base and contaminant to share a schema")


def mixture_at(path: MixturePath, t: float) -> DiscreteDistribution:
    """Law of the path at parameter t.

    The support is the union of both supports (base atoms first, then new
    contaminant atoms); each atom's probability is the affine combination
    (1 - t) * p_base + t * p_contaminant.
    """
    if not 0.0 <= t <= 1.0:
        raise SchemaError(f"mixture parameter t={t!r} outside [0, 1]")
    base, cont = path.base, path.contaminant
    support = list(base.support)
    probs = [(1.0 - t) * p for p in base.probs]
    for i, atom in enumerate(cont.support):
        j = base._index.get(atom)
        if j is None:
            support.append(atom)
            probs.append(t * cont.probs[i])
        else:
            probs[j] += t * cont.probs[i]
    return DiscreteDistribution(base.schema, support, probs)


def point_mass(obs: Observation) -> DiscreteDistribution:
    """Degenerate law placing probability one on a single observation."""
    return DiscreteDistribution(obs.schema, [obs.values], [1.0])


def empirical(dataset: Dataset) -> DiscreteDistribution:
    """Empirical law of a dataset; duplicate rows merge with weight count/n."""
    n = dataset.n
    return DiscreteDistribution(
        dataset.schema, dataset.values, np.full(n, 1.0 / n)
    )


def load_csv(path: str, roles: Mapping[str, tuple[str, str]]) -> Dataset:
    """Load a CSV file into a Dataset under a declared roles mapping.

    ``roles`` maps column names to (role, kind) pairs and fixes the schema
    column order.  Columns present in the file but absent from ``roles``
    are ignored.  Distinct failure modes raise ``CsvParseError`` naming the
    offending row and column: missing header column, non-numeric cell, and
    binary or discrete violations.
    """
    if not roles:
        raise CsvParseError(f"{path}: roles mapping is empty; no columns to load")
    try:
        columns = tuple(Column(name, role, kind) for name, (role, kind) in roles.items())
        schema = Schema(columns)
    except SchemaError as exc:
        raise CsvParseError(f"{path}: invalid roles mapping: {exc}") from exc
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        positions = []
        for col in schema.columns:
            if col.name not in header:
                raise CsvParseError(
                    f"{path}: required column {col.name!r} not found in header {header}"
                )
            positions.append(header.index(col.name))
        rows = []
        for rownum, record in enumerate(reader, start=2):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            if len(record) < len(header):
                raise CsvParseError(
                    f"{path}: row {rownum} has {len(record)} cells; header has {len(header)}"
                )
            parsed = []
            for col, pos in zip(schema.columns, positions):
                cell = record[pos].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise CsvParseError(
                        f"{path}: row {rownum}, column {col.name!r}: "
                        f"cannot parse {cell!r} as a number"
                    ) from None
                if col.kind == "binary" and value not in (0.0, 1.0):
                    raise CsvParseError(
                        f"{path}: row {rownum}, column {col.name!r}: "
                        f"binary column has value {cell!r}"
                    )
                if col.kind == "discrete" and value != int(value):
                    raise CsvParseError(
                        f"{path}: row {rownum}, column {col.name!r}: "
                        f"discrete column has non-integer value {cell!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise CsvParseError(f"{path}: no data rows")
    return Dataset(schema, np.asarray(rows, dtype=float))
