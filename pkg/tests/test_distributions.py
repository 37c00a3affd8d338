"""Schemas, datasets, finite-support laws, mixture paths, and CSV loading."""
import numpy as np
import pytest

from influence_lab import (
    Column,
    CsvParseError,
    Dataset,
    DiscreteDistribution,
    MixturePath,
    Observation,
    Schema,
    SchemaError,
    empirical,
    load_csv,
    mixture_at,
    point_mass,
)

YX = Schema(
    (Column("x", "exposure", "binary"), Column("y", "outcome", "continuous"))
)
Y_ONLY = Schema((Column("y", "outcome", "continuous"),))


class TestSchema:
    def test_duplicate_names_rejected(self):
        with pytest.raises(SchemaError, match="duplicate"):
            Schema((Column("y", "outcome", "continuous"),
                    Column("y", "covariate", "continuous")))

    def test_two_outcomes_rejected(self):
        with pytest.raises(SchemaError, match="more than one outcome"):
            Schema((Column("a", "outcome", "continuous"),
                    Column("b", "outcome", "continuous")))

    def test_unknown_role_and_kind_rejected(self):
        with pytest.raises(SchemaError, match="role"):
            Column("y", "response", "continuous")
        with pytest.raises(SchemaError, match="kind"):
            Column("y", "outcome", "categorical")

    def test_index_helpers(self):
        schema = Schema((
            Column("z1", "covariate", "continuous"),
            Column("z2", "covariate", "continuous"),
            Column("x", "exposure", "binary"),
            Column("y", "outcome", "continuous"),
        ))
        assert schema.indices_with_role("covariate") == (0, 1)
        assert schema.sole_index("outcome") == 3
        assert schema.index_of("x") == 2
        with pytest.raises(SchemaError):
            schema.index_of("missing")
        with pytest.raises(SchemaError, match="0 mediator"):
            schema.sole_index("mediator")

    def test_validate_values_enforces_kinds(self):
        with pytest.raises(SchemaError, match="binary"):
            YX.validate_values((0.5, 1.0))
        with pytest.raises(SchemaError, match="non-finite"):
            Y_ONLY.validate_values((float("nan"),))
        assert YX.validate_values((1, 2.5)) == (1.0, 2.5)


class TestDataset:
    def test_shape_and_kind_validation(self):
        with pytest.raises(SchemaError, match="shape"):
            Dataset(YX, np.zeros((3, 3)))
        with pytest.raises(SchemaError, match="binary"):
            Dataset(YX, [[2.0, 1.0]])

    def test_values_are_read_only(self):
        data = Dataset(YX, [[0.0, 1.0], [1.0, 2.0]])
        with pytest.raises(ValueError):
            data.values[0, 0] = 9.0
        assert data.n == 2

    def test_row_and_column_access(self):
        data = Dataset(YX, [[0.0, 1.5], [1.0, 2.5]])
        assert data.row(1).value_of("y") == 2.5
        assert np.array_equal(data.column("x"), [0.0, 1.0])
        assert [obs.values for obs in data.observations()] == [(0.0, 1.5), (1.0, 2.5)]


class TestDiscreteDistribution:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(SchemaError, match="sum"):
            DiscreteDistribution(Y_ONLY, [[0.0], [1.0]], [0.5, 0.4])
        with pytest.raises(SchemaError, match="negative"):
            DiscreteDistribution(Y_ONLY, [[0.0], [1.0]], [-0.1, 1.1])

    def test_duplicate_atoms_merge(self):
        law = DiscreteDistribution(Y_ONLY, [[1.0], [1.0], [2.0]], [0.2, 0.3, 0.5])
        assert law.n_atoms == 2
        assert law.prob_of((1.0,)) == pytest.approx(0.5)
        assert law.prob_of((3.0,)) == 0.0

    def test_sample_is_seeded_and_valid(self):
        law = DiscreteDistribution(Y_ONLY, [[-1.0], [4.0]], [0.25, 0.75])
        a = law.sample(100, np.random.default_rng(3))
        b = law.sample(100, np.random.default_rng(3))
        assert np.array_equal(a.values, b.values)
        assert set(np.unique(a.values)) <= {-1.0, 4.0}

    def test_empirical_weights(self):
        data = Dataset(Y_ONLY, [[1.0], [1.0], [2.0], [3.0]])
        law = empirical(data)
        assert law.prob_of((1.0,)) == pytest.approx(0.5)
        assert law.probs.sum() == pytest.approx(1.0)


class TestMixturePath:
    def test_endpoints_and_affine_probabilities(self):
        base = DiscreteDistribution(Y_ONLY, [[0.0], [1.0]], [0.6, 0.4])
        cont = DiscreteDistribution(Y_ONLY, [[1.0], [2.0]], [0.5, 0.5])
        path = MixturePath(base, cont)
        mid = mixture_at(path, 0.5)
        assert mid.prob_of((0.0,)) == pytest.approx(0.3)
        assert mid.prob_of((1.0,)) == pytest.approx(0.45)
        assert mid.prob_of((2.0,)) == pytest.approx(0.25)
        # endpoint laws keep the union support; base atoms get weight zero at t=1
        start = mixture_at(path, 0.0)
        assert [start.prob_of(a) for a in base.support] == [0.6, 0.4]
        end = mixture_at(path, 1.0)
        assert end.prob_of((0.0,)) == 0.0
        assert end.prob_of((2.0,)) == pytest.approx(0.5)

    def test_parameter_and_schema_validation(self):
        base = DiscreteDistribution(Y_ONLY, [[0.0]], [1.0])
        with pytest.raises(SchemaError, match="outside"):
            mixture_at(MixturePath(base, base), 1.5)
        other = DiscreteDistribution(YX, [[0.0, 0.0]], [1.0])
        with pytest.raises(SchemaError, match="schema"):
            MixturePath(base, other)

    def test_point_mass(self):
        obs = Observation((1.0, 2.0), YX)
        law = point_mass(obs)
        assert law.n_atoms == 1
        assert law.prob_of((1.0, 2.0)) == 1.0


class TestLoadCsv:
    def _write(self, tmp_path, text):
        path = tmp_path / "data.csv"
        path.write_text(text)
        return str(path)

    def test_round_trip_with_extra_column_ignored(self, tmp_path):
        path = self._write(tmp_path, "id,y,x\n1,2.5,0\n2,3.5,1\n")
        data = load_csv(path, {"x": ("exposure", "binary"), "y": ("outcome", "continuous")})
        assert data.schema.names == ("x", "y")
        assert np.array_equal(data.values, [[0.0, 2.5], [1.0, 3.5]])

    def test_missing_column_names_it(self, tmp_path):
        path = self._write(tmp_path, "y\n1.0\n")
        with pytest.raises(CsvParseError, match="'x' not found"):
            load_csv(path, {"x": ("exposure", "binary"), "y": ("outcome", "continuous")})

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        path = self._write(tmp_path, "y\n1.0\noops\n")
        with pytest.raises(CsvParseError, match="row 3"):
            load_csv(path, {"y": ("outcome", "continuous")})

    def test_binary_violation_is_a_parse_error(self, tmp_path):
        path = self._write(tmp_path, "x,y\n0.5,1.0\n")
        with pytest.raises(CsvParseError, match="binary"):
            load_csv(path, {"x": ("exposure", "binary"), "y": ("outcome", "continuous")})

    def test_empty_roles_rejected(self, tmp_path):
        path = self._write(tmp_path, "y\n1.0\n")
        with pytest.raises(CsvParseError, match="roles"):
            load_csv(path, {})
