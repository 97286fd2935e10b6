"""End-to-end CLI coverage: every subcommand, every exit code."""

import csv
import io
import json
import subprocess
import sys
from types import SimpleNamespace

import pytest

from testscore import (
    Distribution,
    Scenario,
    ValueFunction,
    save_scenario,
    scenario_from_dict,
)
from testscore import cli
from testscore.cli import (
    EXIT_BUDGET,
    EXIT_OK,
    EXIT_PROPERTY,
    EXIT_USAGE,
    EXIT_VALIDATION,
    main,
)


def coin(v, p=0.5):
    return Distribution.from_pairs(((0.0, 1.0 - p), (v, p)))


@pytest.fixture
def bestshot_file(tmp_path):
    scn = Scenario(
        dists=(
            (Distribution.point(1.0),),
            (coin(3.0, 0.4),),
            (coin(2.0, 0.9),),
            (Distribution.point(0.5),),
        ),
        value_fns=(ValueFunction.best_shot(),),
        cardinalities=(2,),
    )
    path = tmp_path / "bestshot.json"
    save_scenario(path, scn, agent_names=["ann", "bob", "cat", "dan"])
    return str(path)


@pytest.fixture
def welfare_file(tmp_path):
    scn = Scenario(
        dists=(
            (Distribution.point(2.0), coin(1.0)),
            (coin(3.0, 0.5), Distribution.point(1.0)),
            (Distribution.point(1.0), coin(2.0, 0.25)),
        ),
        value_fns=(ValueFunction.best_shot(), ValueFunction.ces(1.0)),
        cardinalities=(1, 2),
    )
    path = tmp_path / "welfare.json"
    save_scenario(
        path, scn, agent_names=["ann", "bob", "cat"], project_names=["api", "ui"]
    )
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSelect:
    def test_happy_path(self, capsys, bestshot_file):
        code, out, _ = run(capsys, ["select", bestshot_file])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["scores"] == "replication"
        assert doc["k"] == 2
        assert len(doc["selected"]) == 2
        assert set(doc["selected"]) <= {"ann", "bob", "cat", "dan"}

    def test_oracle_ratio(self, capsys, bestshot_file):
        code, out, _ = run(capsys, ["select", bestshot_file, "--oracle"])
        assert code == EXIT_OK
        doc = json.loads(out)
        ratio = doc["approximation"]["ratio"]
        assert doc["approximation"]["bound"] <= ratio <= 1.0 + 1e-12
        assert len(doc["oracle_selected"]) == 2

    def test_quantile_scores(self, capsys, bestshot_file):
        code, out, _ = run(capsys, ["select", bestshot_file, "--scores", "quantile:0.5"])
        assert code == EXIT_OK
        assert json.loads(out)["scores"] == "quantile:0.5"

    def test_mean_scores_and_explicit_k(self, capsys, bestshot_file):
        code, out, _ = run(capsys, ["select", bestshot_file, "--scores", "mean", "--k", "3"])
        assert code == EXIT_OK
        assert len(json.loads(out)["selected"]) == 3

    def test_unknown_scores_kind(self, capsys, bestshot_file):
        code, _, err = run(capsys, ["select", bestshot_file, "--scores", "median"])
        assert code == EXIT_VALIDATION
        assert "median" in err

    def test_bad_quantile_cut(self, capsys, bestshot_file):
        assert run(capsys, ["select", bestshot_file, "--scores", "quantile:x"])[0] == EXIT_VALIDATION
        assert run(capsys, ["select", bestshot_file, "--scores", "quantile:1.5"])[0] == EXIT_VALIDATION

    def test_k_beyond_agents(self, capsys, bestshot_file):
        code, _, err = run(capsys, ["select", bestshot_file, "--k", "5"])
        assert code == EXIT_VALIDATION

    def test_multi_project_needs_project(self, capsys, welfare_file):
        code, _, err = run(capsys, ["select", welfare_file])
        assert code == EXIT_VALIDATION
        assert "--project" in err

    def test_project_by_name_and_index(self, capsys, welfare_file):
        code, out, _ = run(capsys, ["select", welfare_file, "--project", "ui"])
        assert code == EXIT_OK
        assert json.loads(out)["project"] == "ui"
        code, out, _ = run(capsys, ["select", welfare_file, "--project", "0"])
        assert code == EXIT_OK
        assert json.loads(out)["project"] == "api"

    def test_unknown_project(self, capsys, welfare_file):
        assert run(capsys, ["select", welfare_file, "--project", "nope"])[0] == EXIT_VALIDATION
        assert run(capsys, ["select", welfare_file, "--project", "9"])[0] == EXIT_VALIDATION

    def test_out_file(self, capsys, tmp_path, bestshot_file):
        dest = tmp_path / "report.json"
        code, out, _ = run(capsys, ["select", bestshot_file, "--out", str(dest)])
        assert code == EXIT_OK
        assert out == ""
        assert json.loads(dest.read_text())["k"] == 2

    def test_budget_exhaustion_exits_3(self, capsys, monkeypatch, bestshot_file):
        monkeypatch.setenv("TESTSCORE_BUDGET", "3")
        code, _, err = run(capsys, ["select", bestshot_file, "--oracle"])
        assert code == EXIT_BUDGET
        assert "budget" in err


class TestAssign:
    def test_happy_path(self, capsys, welfare_file):
        code, out, _ = run(capsys, ["assign", welfare_file])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["tie"] == "det"
        assert len(doc["assignment"]["api"]) == 1
        assert len(doc["assignment"]["ui"]) == 2
        names = doc["assignment"]["api"] + doc["assignment"]["ui"]
        assert len(set(names)) == 3

    def test_oracle_bound(self, capsys, welfare_file):
        code, out, _ = run(capsys, ["assign", welfare_file, "--oracle"])
        assert code == EXIT_OK
        doc = json.loads(out)
        approx = doc["approximation"]
        assert approx["bound"] - 1e-12 <= approx["ratio"] <= 1.0 + 1e-12

    def test_random_ties_are_seeded(self, capsys, welfare_file):
        a = run(capsys, ["assign", welfare_file, "--tie", "random", "--seed", "5"])
        b = run(capsys, ["assign", welfare_file, "--tie", "random", "--seed", "5"])
        assert a == b

    def test_single_project_matches_select(self, capsys, bestshot_file):
        code, out, _ = run(capsys, ["assign", bestshot_file])
        assert code == EXIT_OK
        assigned = set(json.loads(out)["assignment"]["p0"])
        code, out, _ = run(capsys, ["select", bestshot_file])
        assert code == EXIT_OK
        assert set(json.loads(out)["selected"]) == assigned


class TestCheck:
    @pytest.mark.parametrize(
        "suite,trials",
        [("submodularity", "6"), ("bsp", "50"), ("sketch", "5"), ("goodness", "5")],
    )
    def test_suites_pass(self, capsys, suite, trials):
        code, out, _ = run(capsys, ["check", "--suite", suite, "--trials", trials])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["ok"] is True
        assert doc["suite"] == suite

    def test_bsp_reports_counterexample(self, capsys):
        code, out, _ = run(capsys, ["check", "--suite", "bsp", "--trials", "10"])
        assert code == EXIT_OK
        fixture = json.loads(out)["top_r_counterexample"]
        assert fixture["violates_as_expected"] is True
        assert fixture["lhs"] == 3.0 and fixture["rhs"] == 2.0

    def test_property_failure_exits_4(self, capsys, monkeypatch):
        monkeypatch.setitem(
            cli._SUITES, "bsp", (lambda seed, trials: {"suite": "bsp", "ok": False}, 1)
        )
        assert run(capsys, ["check", "--suite", "bsp"])[0] == EXIT_PROPERTY

    def test_bad_trials(self, capsys):
        assert run(capsys, ["check", "--suite", "bsp", "--trials", "0"])[0] == EXIT_VALIDATION

    def test_unknown_suite(self, capsys):
        assert run(capsys, ["check", "--suite", "nope"])[0] == EXIT_USAGE


class TestIngest:
    CSV = "coder_id,task_id,rating\n" + "".join(
        f"c{i},t{j},{60 + 5 * i}\n" for i in range(3) for j in range(4)
    )

    def test_csv_to_scenario(self, capsys, tmp_path):
        src = tmp_path / "r.csv"
        src.write_text(self.CSV)
        code, out, err = run(capsys, ["ingest", str(src), "--min-solutions", "4"])
        assert code == EXIT_OK
        loaded = scenario_from_dict(json.loads(out))
        assert loaded.agent_names == ("c0", "c1", "c2")
        assert loaded.scenario.value_fns[0].kind == "best_shot"
        assert "kept 3 coders" in err

    def test_min_solutions_filter(self, capsys, tmp_path):
        src = tmp_path / "r.csv"
        src.write_text(self.CSV + "extra,t0,50\n")
        code, out, err = run(capsys, ["ingest", str(src), "--min-solutions", "4"])
        assert code == EXIT_OK
        assert "extra" not in json.loads(out)["agents"]
        assert "from 4 total" in err

    def test_sample_flag(self, capsys):
        code, out, err = run(capsys, ["ingest", "--sample"])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert len(doc["agents"]) >= 20
        assert "kept" in err

    def test_malformed_row_number(self, capsys, tmp_path):
        src = tmp_path / "r.csv"
        src.write_text("coder_id,task_id,rating\nc0,t0,80\nc0,t1,banana\n")
        code, _, err = run(capsys, ["ingest", str(src)])
        assert code == EXIT_VALIDATION
        assert "row 3" in err

    def test_source_is_required_and_exclusive(self, capsys, tmp_path):
        src = tmp_path / "r.csv"
        src.write_text(self.CSV)
        assert run(capsys, ["ingest"])[0] == EXIT_USAGE
        assert run(capsys, ["ingest", str(src), "--sample"])[0] == EXIT_USAGE

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, ["ingest", str(tmp_path / "nope.csv")])[0] == EXIT_USAGE


class TestExperiment:
    def rows_of(self, text):
        return list(csv.reader(io.StringIO(text)))

    def test_csv_shape(self, capsys, bestshot_file):
        code, out, _ = run(
            capsys,
            ["experiment", bestshot_file, "--n", "3", "--k", "2,3", "--trials", "4"],
        )
        assert code == EXIT_OK
        rows = self.rows_of(out)
        assert rows[0] == ["trial", "k", "greedy", "opt", "ratio"]
        assert len(rows) == 1 + 4 * 2 + 2 * 2 + 2
        summary_labels = {r[0] for r in rows[9:]}
        assert summary_labels == {"mean", "min"}
        assert rows[-1][1] == "all"

    def test_k_equal_n_means_ratio_one(self, capsys, bestshot_file):
        code, out, _ = run(
            capsys,
            ["experiment", bestshot_file, "--n", "3", "--k", "3", "--trials", "5"],
        )
        assert code == EXIT_OK
        for row in self.rows_of(out)[1:6]:
            assert row[4] == "1.0"

    def test_same_seed_is_bit_identical(self, capsys, tmp_path, bestshot_file):
        args = ["experiment", bestshot_file, "--n", "3", "--k", "2", "--trials", "6",
                "--seed", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, args + ["--out", str(a)])[0] == EXIT_OK
        assert run(capsys, args + ["--out", str(b)])[0] == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_sample_smoke(self, capsys):
        code, out, _ = run(
            capsys, ["experiment", "--sample", "--n", "4", "--k", "2", "--trials", "3"]
        )
        assert code == EXIT_OK
        rows = self.rows_of(out)
        assert len(rows) == 1 + 3 + 2 + 2
        for row in rows[1:4]:
            assert 0.0 < float(row[4]) <= 1.0 + 1e-12

    def test_validation_failures(self, capsys, bestshot_file, welfare_file):
        bad = [
            ["experiment", bestshot_file, "--k", "0"],
            ["experiment", bestshot_file, "--k", "abc"],
            ["experiment", bestshot_file, "--n", "9"],
            ["experiment", bestshot_file, "--n", "2", "--k", "3"],
            ["experiment", bestshot_file, "--trials", "0"],
            ["experiment", welfare_file],
        ]
        for argv in bad:
            assert run(capsys, argv)[0] == EXIT_VALIDATION, argv

    def test_source_exclusive(self, capsys, bestshot_file):
        assert run(capsys, ["experiment", bestshot_file, "--sample"])[0] == EXIT_USAGE
        assert run(capsys, ["experiment"])[0] == EXIT_USAGE


class TestWorstcase:
    @pytest.mark.parametrize("name", sorted(cli._GEN_PARAMS))
    def test_emits_instance(self, capsys, name):
        code, out, _ = run(capsys, ["worstcase", name])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["name"] == name
        assert {"params", "citation", "expected", "scenario"} <= set(doc)
        assert "validation" not in doc

    def test_run_validates(self, capsys):
        code, out, _ = run(capsys, ["worstcase", "mean_bestshot", "--run"])
        assert code == EXIT_OK
        assert json.loads(out)["validation"]["ok"] is True

    def test_run_with_params(self, capsys):
        code, out, _ = run(capsys, ["worstcase", "welfare_ex1", "--r", "2", "--run"])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["params"] == {"r": 2}
        assert doc["validation"]["ok"] is True

    def test_unknown_name(self, capsys):
        code, _, err = run(capsys, ["worstcase", "nope"])
        assert code == EXIT_USAGE
        assert "welfare_ex1" in err  # choices are listed

    def test_inapplicable_flag(self, capsys):
        code, _, err = run(capsys, ["worstcase", "welfare_ex1", "--k", "3"])
        assert code == EXIT_USAGE
        assert "--k does not apply" in err
        assert "--r" in err

    def test_integer_params_enforced(self, capsys):
        assert run(capsys, ["worstcase", "welfare_ex1", "--r", "2.5"])[0] == EXIT_USAGE
        assert run(capsys, ["worstcase", "mean_bestshot", "--k", "2.5"])[0] == EXIT_USAGE

    def test_validation_mismatch_exits_4(self, capsys, monkeypatch):
        fake = SimpleNamespace(ok=False, to_json=lambda: {"ok": False, "rows": []})
        monkeypatch.setattr(cli, "validate_instance", lambda inst: fake)
        code, out, _ = run(capsys, ["worstcase", "welfare_ex1", "--r", "2", "--run"])
        assert code == EXIT_PROPERTY
        assert json.loads(out)["validation"]["ok"] is False


class TestMainPlumbing:
    def test_no_command(self, capsys):
        assert run(capsys, [])[0] == EXIT_USAGE

    def test_help_exits_clean(self, capsys):
        assert run(capsys, ["--help"])[0] == EXIT_OK

    def test_unknown_flag(self, capsys, bestshot_file):
        assert run(capsys, ["select", bestshot_file, "--frobnicate"])[0] == EXIT_USAGE

    def test_console_script(self):
        proc = subprocess.run(
            [sys.executable, "-c", "import sys; from testscore.cli import main; sys.exit(main(sys.argv[1:]))",
             "worstcase", "quantile_linear"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["name"] == "quantile_linear"
