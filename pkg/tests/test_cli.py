"""End-to-end tests of the command-line interface.

Commands run in process through ``cli_main`` so exit codes, stdout, and
stderr are all observable.  The pipeline tests drive the real artifacts:
train writes a model and vocabulary, classify consumes them, check reads
recorded tracker fixtures, and report renders the check output.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from onhold import datasetio
from onhold.cli import DEFAULT_SEED, cli_main, load_project_config
from onhold.errors import ConfigError
from onhold.issues import TrackerKind
from onhold.learn import Label

from conftest import FIXTURE_DIR

ON_HOLD_TEXTS = [
    "TODO remove this workaround after HADOOP-101 is fixed",
    "remove this workaround after HADOOP-102 is fixed",
    "disable until HADOOP-103 is fixed upstream",
    "waiting for HADOOP-104 before enabling this path",
    "temporary hack until HADOOP-105 is fixed",
    "TODO remove this hack when HADOOP-106 is resolved",
    "remove this once HADOOP-107 lands",
    "waiting until HADOOP-108 is fixed to remove this",
]

CROSS_TEXTS = [
    "see HADOOP-201 for background",
    "see HADOOP-202 for details on this format",
    "this mirrors the parser described in HADOOP-203",
    "test for HADOOP-204",
    "added for HADOOP-205 compatibility",
    "the algorithm follows HADOOP-206",
    "format documented in HADOOP-207",
    "see the discussion in HADOOP-208",
]


@pytest.fixture
def dataset_path(tmp_path) -> Path:
    rows = []
    for i, text in enumerate(ON_HOLD_TEXTS):
        rows.append(
            datasetio.DatasetRow(text, f"src/H{i}.java", 10 + i,
                                 f"HADOOP-{101 + i}", Label.ON_HOLD)
        )
    for i, text in enumerate(CROSS_TEXTS):
        rows.append(
            datasetio.DatasetRow(text, f"src/C{i}.java", 10 + i,
                                 f"HADOOP-{201 + i}", Label.CROSS_REFERENCE)
        )
    path = tmp_path / "dataset.tsv"
    datasetio.save_dataset(rows, path)
    return path


def read_table(path: Path):
    header, numbered = datasetio.load_table(path)
    return header, [fields for _, fields in numbered]


class TestExitCodes:
    def test_no_arguments_prints_usage(self, capsys):
        assert cli_main([]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert cli_main(["frobnicate"]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert cli_main(["detect", "--dump-patterns", "--bogus"]) == 1
        assert "error" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        assert cli_main(["--help"]) == 0
        assert "usage" in capsys.readouterr().out

    def test_missing_input_file_is_a_user_error(self, tmp_path, capsys):
        code = cli_main(
            ["train", "--dataset", str(tmp_path / "absent.tsv"),
             "--model", str(tmp_path / "m.json"), "--vocab", str(tmp_path / "v.tsv")]
        )
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_malformed_json_report_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert cli_main(["report", "--input", str(bad)]) == 1
        assert "not valid JSON" in capsys.readouterr().err

    def test_auth_failure_is_an_environment_error(self, tmp_path, capsys):
        fixtures = tmp_path / "fixtures"
        fixtures.mkdir()
        (fixtures / "jira_HADOOP-1.json").write_text(
            json.dumps({"_http_status": 401}), encoding="utf-8"
        )
        table = datasetio.format_table(
            ("comment_text", "issue_key", "label"),
            [["remove after HADOOP-1 is fixed", "HADOOP-1", "OnHold"]],
        )
        source = tmp_path / "comments.tsv"
        source.write_text(table, encoding="utf-8")
        code = cli_main(
            ["check", "--input", str(source), "--fixtures", str(fixtures),
             "--out", str(tmp_path / "check.json")]
        )
        assert code == 2
        err = capsys.readouterr().err
        assert "environment error" in err
        assert "ITS_JIRA_TOKEN" in err


class TestProjectConfig:
    def test_loads_all_fields(self, tmp_path):
        path = tmp_path / "project.json"
        path.write_text(
            json.dumps(
                {
                    "repo_path": "/srv/repo",
                    "branch": "trunk",
                    "tracker": "jira",
                    "project_key": "HADOOP",
                    "base_url": "https://issues.example.org",
                    "cache_dir": "/tmp/cache",
                    "seed": 7,
                }
            ),
            encoding="utf-8",
        )
        config = load_project_config(path)
        assert config.repo_path == "/srv/repo"
        assert config.branch == "trunk"
        assert config.tracker is TrackerKind.JIRA
        assert config.project_key == "HADOOP"
        assert config.seed == 7

    def test_defaults(self, tmp_path):
        path = tmp_path / "project.json"
        path.write_text("{}", encoding="utf-8")
        config = load_project_config(path)
        assert config.branch == "HEAD"
        assert config.tracker is None
        assert config.seed == DEFAULT_SEED

    @pytest.mark.parametrize(
        "key", ["api_token", "jira_token", "secret", "password", "apiKey"]
    )
    def test_secret_looking_keys_are_refused(self, tmp_path, key):
        path = tmp_path / "project.json"
        path.write_text(json.dumps({key: "hunter2"}), encoding="utf-8")
        with pytest.raises(ConfigError) as excinfo:
            load_project_config(path)
        message = str(excinfo.value)
        assert "ITS_GITHUB_TOKEN" in message
        assert "ITS_JIRA_TOKEN" in message
        assert "ITS_BUGZILLA_TOKEN" in message

    def test_secret_key_exits_one_via_cli(self, tmp_path, capsys):
        path = tmp_path / "project.json"
        path.write_text(json.dumps({"api_token": "x"}), encoding="utf-8")
        code = cli_main(["mine", "--repo", "ignored", "--config", str(path)])
        assert code == 1
        assert "ITS_JIRA_TOKEN" in capsys.readouterr().err

    def test_unknown_key_is_rejected(self, tmp_path):
        path = tmp_path / "project.json"
        path.write_text(json.dumps({"colour": "blue"}), encoding="utf-8")
        with pytest.raises(ConfigError, match="colour"):
            load_project_config(path)

    def test_invalid_json_is_rejected(self, tmp_path):
        path = tmp_path / "project.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON"):
            load_project_config(path)


class TestDetect:
    def test_dump_patterns_lists_every_rule(self, capsys):
        assert cli_main(["detect", "--dump-patterns"]) == 0
        out = capsys.readouterr().out
        assert "[bugzilla]" in out
        assert "[github]" in out
        assert "detect\t" in out

    def test_detect_finds_references(self, tmp_path, capsys):
        table = datasetio.format_table(
            ("comment_text", "file_path", "line_number"),
            [
                ["see Bug 34383 for the root cause", "A.java", "3"],
                ["nothing to see here", "B.java", "9"],
            ],
        )
        source = tmp_path / "comments.tsv"
        source.write_text(table, encoding="utf-8")
        out = tmp_path / "refs.tsv"
        assert cli_main(["detect", "--input", str(source), "--out", str(out)]) == 0
        header, rows = read_table(out)
        assert header == [
            "row", "file_path", "line_number", "issue_key", "tracker",
            "matched_text", "char_start", "char_end",
        ]
        assert rows == [["2", "A.java", "3", "34383", "bugzilla", "Bug 34383", "4", "13"]]

    def test_detect_without_input_is_a_usage_error(self, capsys):
        assert cli_main(["detect"]) == 1
        assert "--input" in capsys.readouterr().err

    def test_jira_patterns_need_a_project(self, capsys):
        assert cli_main(["detect", "--dump-patterns", "--tracker", "jira"]) == 1
        assert "project" in capsys.readouterr().err.lower()


class TestPipeline:
    def train(self, dataset_path, tmp_path, *extra):
        model = tmp_path / "model.json"
        vocab = tmp_path / "vocab.tsv"
        code = cli_main(
            ["train", "--dataset", str(dataset_path), "--model", str(model),
             "--vocab", str(vocab), "--algorithm", "NaiveBayes", "--seed", "0",
             *extra]
        )
        assert code == 0
        return model, vocab

    def test_train_writes_model_and_vocabulary(self, dataset_path, tmp_path, capsys):
        model, vocab = self.train(dataset_path, tmp_path)
        assert model.exists()
        assert vocab.exists()
        err = capsys.readouterr().err
        assert "trained NaiveBayes" in err
        assert "16 comments" in err

    def test_classify_appends_prediction_columns(self, dataset_path, tmp_path):
        model, vocab = self.train(dataset_path, tmp_path)
        out = tmp_path / "predictions.tsv"
        code = cli_main(
            ["classify", "--model", str(model), "--vocab", str(vocab),
             "--input", str(dataset_path), "--out", str(out)]
        )
        assert code == 0
        header, rows = read_table(out)
        assert header[-2:] == ["predicted_label", "score"]
        assert len(rows) == 16
        predicted = {fields[0]: fields[-2] for fields in rows}
        assert predicted["remove this workaround after HADOOP-102 is fixed"] == "OnHold"
        assert predicted["see HADOOP-201 for background"] == "CrossReference"

    def test_classify_rejects_a_mismatched_vocabulary(self, dataset_path, tmp_path, capsys):
        model, _ = self.train(dataset_path, tmp_path)
        other_dir = tmp_path / "other"
        other_dir.mkdir()
        _, other_vocab = self.train(dataset_path, other_dir, "--bow")
        code = cli_main(
            ["classify", "--model", str(model), "--vocab", str(other_vocab),
             "--input", str(dataset_path), "--out", str(tmp_path / "p.tsv")]
        )
        assert code == 1
        assert "vocabulary" in capsys.readouterr().err

    def check_input(self, tmp_path) -> Path:
        table = datasetio.format_table(
            ("comment_text", "file_path", "line_number", "issue_key", "label",
             "introduced_commit", "introduced_date", "removed_commit",
             "removed_date"),
            [
                ["remove this workaround after HADOOP-6223 is fixed",
                 "src/A.java", "10", "HADOOP-6223", "OnHold",
                 "abcdef012345", "2019-07-01T09:30:00Z", "", ""],
                ["see HADOOP-6223 for details", "src/B.java", "5",
                 "HADOOP-6223", "CrossReference", "abcdef012345",
                 "2019-07-01T09:30:00Z", "", ""],
                ["remove after HADOOP-6223", "src/C.java", "3",
                 "HADOOP-6223", "OnHold", "abcdef012345",
                 "2019-01-01T00:00:00Z", "ddd999", "2020-01-01T00:00:00Z"],
            ],
        )
        source = tmp_path / "remaining.tsv"
        source.write_text(table, encoding="utf-8")
        return source

    def test_check_reports_ready_comments_from_fixtures(self, tmp_path, capsys):
        source = self.check_input(tmp_path)
        out = tmp_path / "check.json"
        code = cli_main(
            ["check", "--input", str(source), "--fixtures", str(FIXTURE_DIR),
             "--out", str(out)]
        )
        assert code == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert payload["total"] == 1
        assert payload["ready_count"] == 1
        (finding,) = payload["findings"]
        assert finding["issue_key"] == "HADOOP-6223"
        assert finding["file_path"] == "src/A.java"
        assert finding["ready"] is True
        assert "1 ready to be removed" in capsys.readouterr().err

    def test_check_makes_no_network_calls(self, tmp_path, monkeypatch):
        import requests

        def boom(*args, **kwargs):
            raise AssertionError("network call attempted")

        monkeypatch.setattr(requests, "get", boom)
        monkeypatch.setattr(requests, "Session", boom, raising=False)
        source = self.check_input(tmp_path)
        code = cli_main(
            ["check", "--input", str(source), "--fixtures", str(FIXTURE_DIR),
             "--out", str(tmp_path / "check.json")]
        )
        assert code == 0

    def test_report_renders_the_check_output(self, tmp_path):
        source = self.check_input(tmp_path)
        check_out = tmp_path / "check.json"
        assert cli_main(
            ["check", "--input", str(source), "--fixtures", str(FIXTURE_DIR),
             "--out", str(check_out)]
        ) == 0
        report_out = tmp_path / "report.md"
        code = cli_main(
            ["report", "--input", str(check_out), "--format", "markdown",
             "--out", str(report_out)]
        )
        assert code == 0
        text = report_out.read_text(encoding="utf-8")
        assert "HADOOP-6223" in text
        assert "ready to be removed" in text
        assert "src/A.java" in text


class TestEvaluate:
    def test_results_table_shape(self, dataset_path, tmp_path):
        out = tmp_path / "results.tsv"
        code = cli_main(
            ["evaluate", "--dataset", str(dataset_path), "--k", "3",
             "--variants", "ngram-nb,ngram-svm", "--seed", "0",
             "--out", str(out)]
        )
        assert code == 0
        header, rows = read_table(out)
        assert header == ["variant", "fold", "precision", "recall", "f1", "auc"]
        assert len(rows) == 6
        assert {fields[0] for fields in rows} == {"ngram-nb", "ngram-svm"}
        assert [fields[1] for fields in rows if fields[0] == "ngram-nb"] == ["0", "1", "2"]
        for fields in rows:
            for cell in fields[2:]:
                assert 0.0 <= float(cell) <= 1.0

    def test_comparisons_table_shape(self, dataset_path, tmp_path):
        out = tmp_path / "results.tsv"
        comparisons = tmp_path / "comparisons.tsv"
        code = cli_main(
            ["evaluate", "--dataset", str(dataset_path), "--k", "3",
             "--variants", "ngram-nb,ngram-svm", "--seed", "0",
             "--out", str(out), "--compare", "--comparisons-out", str(comparisons)]
        )
        assert code == 0
        header, rows = read_table(comparisons)
        assert header == ["pair", "metric", "p", "adjusted_p", "cliffs_delta", "magnitude"]
        assert [fields[1] for fields in rows] == ["precision", "recall", "f1", "auc"]
        assert all(fields[0] == "ngram-nb vs ngram-svm" for fields in rows)

    def test_unknown_variant_is_rejected(self, dataset_path, capsys):
        assert cli_main(
            ["evaluate", "--dataset", str(dataset_path), "--variants", "magic"]
        ) == 1
        assert "magic" in capsys.readouterr().err


class TestMine:
    JAVA = (
        "class Server {\n"
        "    // TODO remove this workaround after HADOOP-1 is fixed\n"
        "    int x;\n"
        "    // plain note without any reference\n"
        "}\n"
    )

    def mine(self, git_sandbox, out: Path) -> int:
        return cli_main(
            ["mine", "--repo", str(git_sandbox.root), "--tracker", "jira",
             "--project", "HADOOP", "--out", str(out)]
        )

    def test_mined_lifecycle_row(self, git_sandbox, tmp_path, capsys):
        git_sandbox.write("src/Server.java", self.JAVA)
        git_sandbox.commit("add server")
        out = tmp_path / "mined.tsv"
        assert self.mine(git_sandbox, out) == 0
        header, rows = read_table(out)
        assert header[:6] == [
            "comment_text", "file_path", "line_number", "end_line",
            "issue_key", "tracker",
        ]
        (row,) = rows
        assert row[0] == "TODO remove this workaround after HADOOP-1 is fixed"
        assert row[1] == "src/Server.java"
        assert row[2] == "2"
        assert row[4] == "HADOOP-1"
        assert row[5] == "jira"
        assert row[7] == "2021-01-01T12:00:00Z"
        assert row[8] == ""
        assert row[10] == "false"

    def test_removed_comment_gets_removal_fields(self, git_sandbox, tmp_path):
        git_sandbox.write("src/Server.java", self.JAVA)
        git_sandbox.commit("add server")
        git_sandbox.write("src/Server.java", "class Server {\n    int x;\n}\n")
        git_sandbox.commit("drop the workaround")
        out = tmp_path / "mined.tsv"
        assert self.mine(git_sandbox, out) == 0
        (row,) = read_table(out)[1]
        assert row[8] != ""
        assert row[9] == "2021-01-02T12:00:00Z"

    def test_mining_is_byte_identical_across_runs(self, git_sandbox, tmp_path):
        git_sandbox.write("src/Server.java", self.JAVA)
        git_sandbox.commit("add server")
        first = tmp_path / "a.tsv"
        second = tmp_path / "b.tsv"
        assert self.mine(git_sandbox, first) == 0
        assert self.mine(git_sandbox, second) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_non_repository_exits_one(self, tmp_path, capsys):
        empty = tmp_path / "not-a-repo"
        empty.mkdir()
        code = cli_main(["mine", "--repo", str(empty)])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_repo_is_required(self, capsys):
        assert cli_main(["mine"]) == 1
        assert "--repo" in capsys.readouterr().err


def ts(day: str):
    from datetime import datetime, timezone

    return datetime.fromisoformat(day).replace(tzinfo=timezone.utc)


class TestLifecycleCommand:
    def dataset(self, tmp_path) -> Path:
        rows = [
            datasetio.DatasetRow(
                "remove after HADOOP-1 is fixed", "A.java", 1, "HADOOP-1",
                Label.ON_HOLD,
                introduced_commit="a1", introduced_date=ts("2021-01-01"),
                removed_commit="a2", removed_date=ts("2021-01-10"),
                issue_status="Resolved", issue_resolution="Fixed",
                issue_resolved_date=ts("2021-01-05"),
            ),
            datasetio.DatasetRow(
                "remove after HADOOP-2 is fixed", "B.java", 2, "HADOOP-2",
                Label.ON_HOLD,
                introduced_commit="b1", introduced_date=ts("2021-01-01"),
                removed_commit="b2", removed_date=ts("2021-01-03"),
            ),
            datasetio.DatasetRow(
                "see HADOOP-3", "C.java", 3, "HADOOP-3",
                Label.CROSS_REFERENCE,
                introduced_commit="c1", introduced_date=ts("2021-01-02"),
                removed_commit="c2", removed_date=ts("2021-01-04"),
            ),
            datasetio.DatasetRow(
                "remove after HADOOP-4 is fixed", "D.java", 4, "HADOOP-4",
                Label.ON_HOLD,
                introduced_commit="d1", introduced_date=ts("2021-01-02"),
            ),
        ]
        path = tmp_path / "lifecycles.tsv"
        datasetio.save_dataset(rows, path)
        return path

    def test_summary_cells(self, tmp_path):
        out = tmp_path / "summary.tsv"
        code = cli_main(
            ["lifecycle", "--dataset", str(self.dataset(tmp_path)),
             "--out", str(out)]
        )
        assert code == 0
        _, rows = read_table(out)
        cells = {(r[0], r[1], r[2]): r[3] for r in rows}
        assert cells[("lifespan", "OnHold", "count")] == "2"
        assert float(cells[("lifespan", "OnHold", "median_days")]) == 5.5
        assert cells[("lifespan", "CrossReference", "count")] == "1"
        assert float(cells[("lifespan", "CrossReference", "median_days")]) == 2.0
        assert cells[("resolution_delay", "OnHold", "removed_after_fix")] == "1"
        assert cells[("resolution_delay", "OnHold", "removed_before_fix")] == "0"
        assert cells[("resolution_delay", "OnHold", "open_or_wontfix")] == "1"
        assert float(cells[("resolution_delay", "OnHold", "median_delay_days")]) == 5.0


class TestDeterminism:
    def test_training_twice_is_byte_identical(self, dataset_path, tmp_path):
        outputs = []
        for name in ("one", "two"):
            subdir = tmp_path / name
            subdir.mkdir()
            model = subdir / "model.json"
            vocab = subdir / "vocab.tsv"
            assert cli_main(
                ["train", "--dataset", str(dataset_path), "--model", str(model),
                 "--vocab", str(vocab), "--algorithm", "ExtraTrees", "--seed", "3"]
            ) == 0
            outputs.append((model.read_bytes(), vocab.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_evaluation_twice_is_byte_identical(self, dataset_path, tmp_path):
        first = tmp_path / "a.tsv"
        second = tmp_path / "b.tsv"
        for out in (first, second):
            assert cli_main(
                ["evaluate", "--dataset", str(dataset_path), "--k", "3",
                 "--variants", "ngram-nb", "--seed", "5", "--out", str(out)]
            ) == 0
        assert first.read_bytes() == second.read_bytes()
