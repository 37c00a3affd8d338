"""Config parsing and the command-line surface, exercised in subprocesses."""

import json
import subprocess
import sys

import pytest

from influence_lab import (
    ConfigError,
    NotPathwiseDifferentiableError,
    ValidationError,
    parse_config,
    parse_config_file,
)
from influence_lab.config import METHOD_ALIASES

MINIMAL = """\
[data]
dgp = normal-mean
n = 120

[estimand]
name = population_mean
"""

FULL = """\
[data]
path = obs.csv
role.y = outcome,continuous
role.x = exposure,binary
role.z = covariate,continuous

[estimand]
name = quantile
tau = 0.25

[learners]
outcome_model = kernel
bandwidth = auto
trim = 0.02

[run]
method = ee
folds = 3
seed = 11
alpha = 0.1
out = run.json
"""


def run_cli(*argv, timeout=180):
    return subprocess.run(
        [sys.executable, "-m", "influence_lab.cli", *argv],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


def write_config(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestParseConfig:
    def test_minimal_config_fills_every_default(self):
        cfg = parse_config(MINIMAL)
        assert cfg.dgp_name == "normal-mean"
        assert cfg.n == 120
        assert cfg.data_path is None
        assert cfg.roles == {}
        assert cfg.spec.name == "population_mean"
        assert cfg.method == "one_step"
        assert cfg.folds == 5
        assert cfg.seed == 0
        assert cfg.alpha == 0.05
        assert cfg.out is None

    def test_resolved_echo_contains_defaults(self):
        resolved = parse_config(MINIMAL).resolved()
        assert resolved["data"] == {"dgp": "normal-mean", "n": 120}
        assert resolved["estimand"]["name"] == "population_mean"
        assert resolved["run"] == {
            "method": "one_step",
            "folds": 5,
            "seed": 0,
            "alpha": 0.05,
            "out": None,
        }
        assert resolved["learners"]["trim"] == 0.01

    def test_full_config_round_trip(self):
        cfg = parse_config(FULL)
        assert cfg.data_path == "obs.csv"
        assert cfg.roles == {
            "y": ("outcome", "continuous"),
            "x": ("exposure", "binary"),
            "z": ("covariate", "continuous"),
        }
        assert cfg.spec.name == "quantile"
        assert cfg.spec.tau == 0.25
        assert cfg.settings.outcome_model == "kernel"
        assert cfg.settings.bandwidth == "auto"
        assert cfg.settings.trim == 0.02
        assert cfg.method == "estimating_equation"
        assert cfg.folds == 3
        assert cfg.seed == 11
        assert cfg.alpha == 0.1
        assert cfg.out == "run.json"
        assert cfg.resolved()["data"]["roles"]["x"] == ["exposure", "binary"]

    @pytest.mark.parametrize("alias,canonical", sorted(METHOD_ALIASES.items()))
    def test_method_aliases(self, alias, canonical):
        cfg = parse_config(MINIMAL + f"\n[run]\nmethod = {alias}\n")
        assert cfg.method == canonical

    def test_comments_and_blank_lines_ignored(self):
        text = (
            "# leading comment\n\n[data]\n; another comment\ndgp = normal-mean\n"
            "n = 50\n\n[estimand]\nname = population_mean\n"
        )
        assert parse_config(text).n == 50

    def test_unknown_section_names_line(self):
        text = "[data]\ndgp = normal-mean\nn = 5\n[extras]\n"
        with pytest.raises(ConfigError, match=r"line 4: unknown section \[extras\]"):
            parse_config(text)

    def test_key_outside_section_names_line(self):
        with pytest.raises(ConfigError, match=r"line 1: key outside any \[section\]"):
            parse_config("dgp = normal-mean\n")

    def test_line_without_equals_sign(self):
        with pytest.raises(ConfigError, match="line 2: expected 'key = value'"):
            parse_config("[data]\njust words\n")

    def test_empty_key(self):
        with pytest.raises(ConfigError, match="line 2: empty key"):
            parse_config("[data]\n= 3\n")

    def test_duplicate_key_reports_both_lines(self):
        text = "[data]\ndgp = normal-mean\ndgp = ate-linear\n"
        with pytest.raises(
            ConfigError,
            match=r"line 3: duplicate key 'dgp' in \[data\] \(first set on line 2\)",
        ):
            parse_config(text)

    @pytest.mark.parametrize(
        "section,entry,message",
        [
            ("run", "folds = five", "folds must be an integer"),
            ("run", "alpha = wide", "alpha must be a number"),
            ("learners", "bandwidth = wide", "bandwidth must be 'auto' or a number"),
        ],
    )
    def test_coercion_errors(self, section, entry, message):
        with pytest.raises(ConfigError, match=message):
            parse_config(MINIMAL + f"\n[{section}]\n{entry}\n")

    @pytest.mark.parametrize(
        "data_lines,message",
        [
            ("path = a.csv\ndgp = normal-mean\nrole.y = outcome,continuous",
             "either path or dgp, not both"),
            ("", "must set a csv path or a dgp name"),
            ("path = a.csv", "csv path needs role.<column> entries"),
            ("dgp = normal-mean", "with a dgp needs n"),
            ("dgp = normal-mean\nn = 10\nrole.y = outcome,continuous",
             "roles come from the dgp"),
            ("path = a.csv\nn = 10\nrole.y = outcome,continuous",
             "n only applies when drawing from a dgp"),
        ],
    )
    def test_data_section_rules(self, data_lines, message):
        text = f"[data]\n{data_lines}\n\n[estimand]\nname = population_mean\n"
        with pytest.raises(ConfigError, match=message):
            parse_config(text)

    @pytest.mark.parametrize(
        "entry,message",
        [
            ("role. = outcome,continuous", "role key needs a column name"),
            ("role.y = outcome", "must be '<role>,<kind>'"),
            ("role.y = target,continuous", "unknown role 'target'"),
            ("role.y = outcome,complex", "unknown kind 'complex'"),
            ("weights = w", r"unknown key 'weights' in \[data\]"),
        ],
    )
    def test_role_entry_errors(self, entry, message):
        text = f"[data]\npath = a.csv\n{entry}\n\n[estimand]\nname = population_mean\n"
        with pytest.raises(ConfigError, match=message):
            parse_config(text)

    def test_missing_estimand_name(self):
        with pytest.raises(ConfigError, match="missing the required key 'name'"):
            parse_config("[data]\ndgp = normal-mean\nn = 5\n[estimand]\ntau = 0.5\n")

    def test_unknown_estimand_lists_catalog(self):
        text = "[data]\ndgp = normal-mean\nn = 5\n[estimand]\nname = shapley\n"
        with pytest.raises(ConfigError, match="unknown estimand 'shapley'.*available:"):
            parse_config(text)

    @pytest.mark.parametrize(
        "name,required",
        [
            ("quantile", "tau"),
            ("tail_conditional_expectation", "threshold"),
            ("conditional_cdf", "threshold"),
        ],
    )
    def test_missing_required_estimand_param(self, name, required):
        text = f"[data]\ndgp = normal-mean\nn = 5\n[estimand]\nname = {name}\n"
        with pytest.raises(ConfigError, match=f"requires the key '{required}'"):
            parse_config(text)

    def test_point_evaluation_target_rejected_at_parse_time(self):
        text = "[data]\ndgp = normal-mean\nn = 5\n[estimand]\nname = density_at_point\n"
        with pytest.raises(NotPathwiseDifferentiableError, match="point-evaluation"):
            parse_config(text)

    @pytest.mark.parametrize(
        "section,key", [("learners", "solver"), ("run", "threads")]
    )
    def test_unknown_keys_name_section_and_line(self, section, key):
        with pytest.raises(ConfigError, match=f"unknown key '{key}' in \\[{section}\\]"):
            parse_config(MINIMAL + f"\n[{section}]\n{key} = 1\n")

    def test_unknown_method(self):
        with pytest.raises(ConfigError, match="unknown method 'bayes'"):
            parse_config(MINIMAL + "\n[run]\nmethod = bayes\n")

    def test_folds_and_alpha_ranges(self):
        with pytest.raises(ConfigError, match="folds must be at least 1"):
            parse_config(MINIMAL + "\n[run]\nfolds = 0\n")
        with pytest.raises(ConfigError, match=r"alpha must be inside \(0, 1\)"):
            parse_config(MINIMAL + "\n[run]\nalpha = 1.5\n")

    def test_config_file_must_exist(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config"):
            parse_config_file(str(tmp_path / "missing.ini"))


class TestEstimateCommand:
    CSV = "y\n1.0\n2.0\n3.0\n6.0\n"
    CSV_CONFIG = """\
[data]
path = {path}
role.y = outcome,continuous

[estimand]
name = population_mean

[run]
method = one-step
folds = 1
"""

    def _csv_setup(self, tmp_path, csv_text=CSV):
        data = tmp_path / "obs.csv"
        data.write_text(csv_text)
        return write_config(tmp_path, self.CSV_CONFIG.format(path=data))

    def test_population_mean_from_csv(self, tmp_path):
        proc = run_cli("estimate", "--config", self._csv_setup(tmp_path), "--emit-eif")
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(proc.stdout)
        assert set(payload) == {
            "tool", "version", "command", "config", "seed",
            "wall_clock_seconds", "result",
        }
        assert payload["command"] == "estimate"
        assert payload["config"]["run"]["method"] == "one_step"
        result = payload["result"]
        # The one-step population mean of {1, 2, 3, 6} is the sample mean.
        assert result["psi_hat"] == 3.0
        assert result["n"] == 4
        assert result["eif_values"] == [-2.0, -1.0, 0.0, 3.0]
        assert result["ci"][0] < 3.0 < result["ci"][1]

    def test_data_and_seed_overrides(self, tmp_path):
        cfg = self._csv_setup(tmp_path)
        other = tmp_path / "other.csv"
        other.write_text("y\n2.0\n3.0\n4.0\n7.0\n")
        proc = run_cli(
            "estimate", "--config", cfg, "--data", str(other), "--seed", "9"
        )
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(proc.stdout)
        assert payload["seed"] == 9
        assert payload["result"]["psi_hat"] == 4.0
        assert "eif_values" not in payload["result"]

    def test_data_override_requires_roles(self, tmp_path):
        cfg = write_config(tmp_path, MINIMAL)
        proc = run_cli("estimate", "--config", cfg, "--data", "whatever.csv")
        assert proc.returncode == 1
        assert "--data needs role.<column> entries" in proc.stderr

    def test_dgp_run_is_deterministic_and_writes_out(self, tmp_path):
        text = (
            "[data]\ndgp = ate-linear\nn = 250\n\n[estimand]\nname = ate\n\n"
            "[run]\nmethod = one-step\nfolds = 2\nseed = 4\n"
        )
        cfg = write_config(tmp_path, text)
        out_a, out_b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        proc_a = run_cli("estimate", "--config", cfg, "--out", out_a)
        proc_b = run_cli("estimate", "--config", cfg, "--out", out_b)
        assert proc_a.returncode == 0, proc_a.stderr
        assert proc_b.returncode == 0, proc_b.stderr
        assert proc_a.stdout == ""
        with open(out_a) as fh:
            payload_a = json.load(fh)
        with open(out_b) as fh:
            payload_b = json.load(fh)
        assert payload_a["result"] == payload_b["result"]
        assert payload_a["config"] == payload_b["config"]
        assert payload_a["result"]["se"] > 0.0

    @pytest.mark.parametrize("name", ["density_at_point", "conditional_mean_at"])
    def test_point_evaluation_targets_exit_1(self, tmp_path, name):
        text = f"[data]\ndgp = normal-mean\nn = 50\n\n[estimand]\nname = {name}\n"
        cfg = write_config(tmp_path, text)
        proc = run_cli("estimate", "--config", cfg)
        assert proc.returncode == 1
        assert "point-evaluation" in proc.stderr

    def test_missing_required_param_exits_1(self, tmp_path):
        text = "[data]\ndgp = normal-mean\nn = 50\n\n[estimand]\nname = quantile\n"
        cfg = write_config(tmp_path, text)
        proc = run_cli("estimate", "--config", cfg)
        assert proc.returncode == 1
        assert "requires the key 'tau'" in proc.stderr


class TestSimulateAndReport:
    def _simulate(self, tmp_path):
        out = tmp_path / "sim.json"
        proc = run_cli(
            "simulate", "--dgp", "normal-mean", "--estimand", "population_mean",
            "--n", "80", "--reps", "12", "--seed", "3", "--folds", "2",
            "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        return out

    def test_simulate_envelope_and_draws(self, tmp_path):
        out = self._simulate(tmp_path)
        payload = json.loads(out.read_text())
        assert payload["command"] == "simulate"
        assert payload["config"]["dgp"] == "normal-mean"
        assert "dgp_params" in payload["config"]
        result = payload["result"]
        assert result["completed"] == 12
        assert len(result["psi_hats"]) == 12
        assert len(result["ses"]) == 12
        assert result["excluded"] == []

    def test_report_renders_aligned_table(self, tmp_path):
        out = self._simulate(tmp_path)
        proc = run_cli("report", "--in", str(out))
        assert proc.returncode == 0, proc.stderr
        lines = proc.stdout.splitlines()
        for label in ("dgp", "estimand", "bias", "coverage", "rmse"):
            assert label in lines[0]
        assert set(lines[1]) <= {"-", " "}
        assert "normal-mean" in lines[2]
        assert "population_mean" in lines[2]

    def test_report_writes_table_file_and_svg(self, tmp_path):
        out = self._simulate(tmp_path)
        table = tmp_path / "table.txt"
        svg = tmp_path / "hist.svg"
        proc = run_cli(
            "report", "--in", str(out), "--out", str(table), "--svg", str(svg)
        )
        assert proc.returncode == 0, proc.stderr
        assert "rmse" in table.read_text()
        drawing = svg.read_text()
        assert drawing.startswith("<svg")
        assert "<rect" in drawing
        assert "<polyline" in drawing
        assert "(estimate - truth) / estimated se" in drawing

    def test_report_rejects_non_simulation_payload(self, tmp_path):
        bogus = tmp_path / "other.json"
        bogus.write_text('{"tool": "other"}\n')
        proc = run_cli("report", "--in", str(bogus))
        assert proc.returncode == 1
        assert "not a simulation result payload" in proc.stderr

    def test_report_rejects_invalid_and_missing_input(self, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        proc = run_cli("report", "--in", str(broken))
        assert proc.returncode == 1
        assert "not valid JSON" in proc.stderr
        proc = run_cli("report", "--in", str(tmp_path / "absent.json"))
        assert proc.returncode == 1
        assert "cannot read report input" in proc.stderr

    def test_report_svg_needs_embedded_draws(self, tmp_path):
        out = self._simulate(tmp_path)
        payload = json.loads(out.read_text())
        del payload["result"]["psi_hats"]
        stripped = tmp_path / "stripped.json"
        stripped.write_text(json.dumps(payload))
        proc = run_cli(
            "report", "--in", str(stripped), "--svg", str(tmp_path / "h.svg")
        )
        assert proc.returncode == 1
        assert "re-run simulate" in proc.stderr

    def test_simulate_unknown_dgp_exits_1(self):
        proc = run_cli("simulate", "--dgp", "nope", "--reps", "1", "--n", "10")
        assert proc.returncode == 1
        assert "choose from" in proc.stderr

    def test_simulate_unknown_method_exits_1(self):
        proc = run_cli(
            "simulate", "--dgp", "normal-mean", "--method", "bayes",
            "--reps", "1", "--n", "10",
        )
        assert proc.returncode == 1
        assert "unknown method 'bayes'" in proc.stderr

    def test_arms_require_the_nonlinear_process(self):
        proc = run_cli(
            "simulate", "--dgp", "normal-mean", "--arms", "both_correct",
            "--reps", "1", "--n", "10",
        )
        assert proc.returncode == 1
        assert "defined on the ate-nonlinear process" in proc.stderr


class TestVerifyCommand:
    def test_smooth_only_estimand_passes(self, tmp_path):
        out = tmp_path / "verify.json"
        proc = run_cli("verify-eif", "--spec", "quantile", "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(out.read_text())
        result = payload["result"]
        assert result["point_mass_t0"]["checked"] == 0
        assert result["smooth_families"]["checked"] >= 1
        assert result["smooth_families"]["skipped"] == 0
        assert result["failures"] == 0

    def test_impossible_tolerance_exits_3_after_emitting(self):
        proc = run_cli(
            "verify-eif", "--spec", "ate", "--trials", "2", "--seed", "1",
            "--tolerance", "1e-18",
        )
        assert proc.returncode == 3
        payload = json.loads(proc.stdout)
        assert payload["result"]["failures"] > 0
        assert "exceeded tolerance" in proc.stderr

    def test_unknown_name_lists_coverage(self):
        proc = run_cli("verify-eif", "--spec", "made_up")
        assert proc.returncode == 1
        assert "no verification case covers estimand 'made_up'" in proc.stderr

    def test_max_support_is_wired_through(self):
        proc = run_cli(
            "verify-eif", "--spec", "ate", "--trials", "1", "--max-support", "6"
        )
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(proc.stdout)
        assert payload["config"]["max_support"] == 6
        assert payload["result"]["point_mass_t0"]["checked"] > 0


class TestArgumentErrors:
    def test_unrecognized_flag_exits_1(self):
        proc = run_cli("simulate", "--dgp", "normal-mean", "--frobnicate")
        assert proc.returncode == 1
        assert "unrecognized arguments" in proc.stderr

    def test_missing_required_flag_exits_1(self):
        proc = run_cli("estimate")
        assert proc.returncode == 1
        assert "--config" in proc.stderr

    def test_version_flag(self):
        proc = run_cli("--version")
        assert proc.returncode == 0
        assert proc.stdout.startswith("influence-lab ")
