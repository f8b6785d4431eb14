import json

import pytest

from textsiege.cli import main as cli_main
from textsiege.errors import ConfigError, EmptyRun, LabelOutOfRange, ParseError
from textsiege.harness import (
    RunConfig,
    SIDECAR_URL_ENV,
    emit_report,
    load_dataset,
    run_campaign,
)


def write_corpus(tmp_path, rows_attack=6):
    """Small self-contained corpus + resources + config, all under tmp_path."""
    train = tmp_path / "train.csv"
    train.write_text(
        "text,label\n"
        + "".join(
            f"{text},{label}\n"
            for text, label in [
                ("good movie fine story", 1),
                ("bad movie poor story", 0),
                ("good film great plot", 1),
                ("bad film awful plot", 0),
                ("great acting good pacing", 1),
                ("awful acting poor pacing", 0),
            ]
        ),
        encoding="utf-8",
    )
    attack_rows = [
        ("good movie fine story", 1),
        ("bad movie poor story", 0),
        ("good film great plot", 1),
        ("bad film awful plot", 0),
        ("great acting good movie", 1),
        ("awful acting poor movie", 0),
    ][:rows_attack]
    attack = tmp_path / "attack.csv"
    attack.write_text(
        "text,label\n" + "".join(f"{t},{l}\n" for t, l in attack_rows),
        encoding="utf-8",
    )
    (tmp_path / "synonyms.tsv").write_text(
        "good\tbad,goodx\nbad\tgood,badx\ngreat\tawful\nawful\tgreat\n"
        "fine\tpoor\npoor\tfine\n",
        encoding="utf-8",
    )
    (tmp_path / "stopwords.txt").write_text("the\nand\n", encoding="utf-8")
    (tmp_path / "antonyms.tsv").write_text("good\tbad\n", encoding="utf-8")
    config = {
        "dataset": {"path": "attack.csv", "format": "csv", "labels": [0, 1]},
        "attack": "pwws",
        "victim": {"kind": "naive_bayes", "train": "train.csv"},
        "providers": {"synonyms": "synonyms.tsv"},
        "lexicon": {"stopwords": "stopwords.txt", "antonyms": "antonyms.tsv"},
        "pwws": {"top": 10},
        "sample_limit": rows_attack,
        "seed": 11,
        "record_timing": False,
        "output": "out/report",
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(config), encoding="utf-8")
    return cfg_path, config


class TestLoadDataset:
    def test_csv_limit(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("text,label\naa,0\nbb,1\ncc,0\n", encoding="utf-8")
        got = load_dataset(path, "csv", (0, 1), limit=2)
        assert [s.text for s in got] == ["aa", "bb"]

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("text,label\naa,5\n", encoding="utf-8")
        with pytest.raises(LabelOutOfRange):
            load_dataset(path, "csv", (1, 2, 3, 4))

    def test_csv_and_jsonl_equivalent(self, tmp_path):
        rows = [("hello there", 1), ("goodbye now", 0)]
        csv_path = tmp_path / "d.csv"
        csv_path.write_text(
            "text,label\n" + "".join(f"{t},{l}\n" for t, l in rows), encoding="utf-8"
        )
        jsonl_path = tmp_path / "d.jsonl"
        jsonl_path.write_text(
            "".join(json.dumps({"text": t, "label": l}) + "\n" for t, l in rows),
            encoding="utf-8",
        )
        a = load_dataset(csv_path, "csv", (0, 1))
        b = load_dataset(jsonl_path, "jsonl", (0, 1))
        assert [(s.text, s.label) for s in a] == [(s.text, s.label) for s in b]

    def test_missing_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("body,tag\naa,0\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_dataset(path, "csv", (0, 1))

    def test_bad_jsonl_line_number(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"text": "ok", "label": 0}\nnot-json\n', encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_dataset(path, "jsonl", (0, 1))
        assert err.value.line == 2

    def test_zero_limit_gives_empty(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("text,label\naa,0\n", encoding="utf-8")
        assert load_dataset(path, "csv", (0, 1), limit=0) == []


class TestRunConfig:
    def test_missing_key(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"attack": "pwws"}), encoding="utf-8")
        with pytest.raises(ConfigError):
            RunConfig.load(path)

    def test_missing_referenced_file(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(
            json.dumps(
                {
                    "dataset": {"path": "absent.csv", "labels": [0, 1]},
                    "attack": "pwws",
                    "victim": {"kind": "naive_bayes", "train": "absent.csv"},
                    "seed": 1,
                }
            ),
            encoding="utf-8",
        )
        with pytest.raises(ConfigError):
            RunConfig.load(path)

    def test_unknown_attack(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        config["attack"] = "hotflip"
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        with pytest.raises(ConfigError):
            RunConfig.load(cfg_path)


class TestRunCampaign:
    def test_zero_sample_limit_is_empty_run(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        config["sample_limit"] = 0
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        with pytest.raises(EmptyRun):
            run_campaign(RunConfig.load(cfg_path))

    def test_filtered_samples_counted(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        # flip one label so the victim "misclassifies" that sample
        attack = tmp_path / "attack.csv"
        rows = attack.read_text(encoding="utf-8").splitlines()
        rows[1] = rows[1].rsplit(",", 1)[0] + ",0"
        attack.write_text("\n".join(rows) + "\n", encoding="utf-8")
        report = run_campaign(RunConfig.load(cfg_path))
        assert report.meta["filtered_misclassified"] == 1
        assert report.meta["attacked_samples"] + 1 == report.meta["loaded_samples"]

    def test_every_sample_appears_once(self, tmp_path):
        cfg_path, _ = write_corpus(tmp_path)
        report = run_campaign(RunConfig.load(cfg_path))
        from textsiege.harness import report_to_json_dict

        data = report_to_json_dict(report)
        assert len(data["samples"]) == report.meta["loaded_samples"]
        ids = [row["sample_id"] for row in data["samples"]]
        assert len(set(ids)) == len(ids)

    def test_byte_identical_reports(self, tmp_path):
        cfg_path, _ = write_corpus(tmp_path)
        cfg = RunConfig.load(cfg_path)
        json_a, _ = emit_report(run_campaign(cfg), tmp_path / "a" / "report")
        json_b, _ = emit_report(run_campaign(cfg), tmp_path / "b" / "report")
        assert json_a.read_bytes() == json_b.read_bytes()

    def test_parallel_matches_serial_content(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        serial = run_campaign(RunConfig.load(cfg_path))
        config["workers"] = 4
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        parallel = run_campaign(RunConfig.load(cfg_path))
        from textsiege.harness import report_to_json_dict

        a = report_to_json_dict(serial)
        b = report_to_json_dict(parallel)
        a["meta"].pop("workers")
        b["meta"].pop("workers")
        a["meta"].pop("campaign_seconds")
        b["meta"].pop("campaign_seconds")
        assert a == b

    def test_wall_time_totals_consistent(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        config["record_timing"] = True
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        report = run_campaign(RunConfig.load(cfg_path))
        total = sum(r.wall_time for r in report.results)
        assert report.meta["attack_seconds_total"] == pytest.approx(total, rel=0.1, abs=1e-6)

    def test_input_files_never_mutated(self, tmp_path):
        cfg_path, _ = write_corpus(tmp_path)
        before = {
            p.name: p.read_bytes()
            for p in tmp_path.iterdir()
            if p.suffix in (".csv", ".tsv", ".txt", ".json")
        }
        run_campaign(RunConfig.load(cfg_path))
        after = {
            p.name: p.read_bytes()
            for p in tmp_path.iterdir()
            if p.suffix in (".csv", ".tsv", ".txt", ".json")
        }
        assert before == after

    def test_per_sample_error_recorded_campaign_completes(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        attack = tmp_path / "attack.csv"
        rows = attack.read_text(encoding="utf-8").splitlines()
        rows.insert(1, '"... !!!",1')  # no word tokens: per-sample error
        attack.write_text("\n".join(rows) + "\n", encoding="utf-8")
        config["sample_limit"] = len(rows) - 1
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        assert cli_main(["run", "--config", str(cfg_path)]) == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert report["meta"]["errored_samples"] == 1
        errored = [s for s in report["samples"] if s["status"] == "error"]
        assert len(errored) == 1 and "no word tokens" in errored[0]["error"]

    def test_remote_endpoint_env_override(self, tmp_path, monkeypatch):
        cfg_path, config = write_corpus(tmp_path)
        config["victim"] = {"kind": "remote", "endpoint": "http://127.0.0.1:1"}
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        monkeypatch.setenv(SIDECAR_URL_ENV, "http://127.0.0.1:2")
        from textsiege.harness import build_victim

        victim = build_victim(RunConfig.load(cfg_path))
        assert victim.endpoint == "http://127.0.0.1:2"


class TestEmitReport:
    def test_markdown_has_exactly_the_four_metric_rows(self, tmp_path):
        cfg_path, _ = write_corpus(tmp_path)
        report = run_campaign(RunConfig.load(cfg_path))
        _, md_path = emit_report(report, tmp_path / "out" / "report")
        text = md_path.read_text(encoding="utf-8")
        metric_lines = [
            line for line in text.splitlines()
            if line.startswith("|") and "Metric" not in line and "---" not in line
        ]
        assert [line.split("|")[1].strip() for line in metric_lines] == [
            "% of Perturbed Words",
            "Attack Time",
            "Attack Accuracy",
            "Semantic Similarity",
        ]

    def test_json_reparse_recomputes_aggregates(self, tmp_path):
        cfg_path, _ = write_corpus(tmp_path)
        report = run_campaign(RunConfig.load(cfg_path))
        json_path, _ = emit_report(report, tmp_path / "out" / "report")
        data = json.loads(json_path.read_text(encoding="utf-8"))
        attacked = [s for s in data["samples"] if s["status"] == "attacked"]
        mean_pct = sum(s["perturbed_words_pct"] for s in attacked) / len(attacked)
        assert data["aggregates"]["perturbed_words_pct"] == pytest.approx(
            mean_pct, abs=1e-5
        )
        acc = 100.0 * sum(s["success"] for s in attacked) / len(attacked)
        assert data["aggregates"]["attack_accuracy_pct"] == pytest.approx(acc, abs=1e-5)

    def test_failed_only_run_emits_files(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        # no flipping candidates: synonym file offers only same-class words
        (tmp_path / "synonyms.tsv").write_text("good\tgreat\n", encoding="utf-8")
        cfg_path.write_text(json.dumps(config), encoding="utf-8")
        report = run_campaign(RunConfig.load(cfg_path))
        json_path, md_path = emit_report(report, tmp_path / "out" / "report")
        assert json_path.exists() and md_path.exists()


class TestCli:
    def test_run_and_report_round_trip(self, tmp_path, capsys):
        cfg_path, _ = write_corpus(tmp_path)
        assert cli_main(["run", "--config", str(cfg_path)]) == 0
        out_json = tmp_path / "out" / "report.json"
        assert out_json.exists()
        assert cli_main(["report", "--input", str(out_json), "--format", "md"]) == 0
        md = capsys.readouterr().out
        assert "% of Perturbed Words" in md

    def test_run_bad_config_exit_2(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        assert cli_main(["run", "--config", str(path)]) == 2

    def test_validate_resources_ok(self, tmp_path):
        cfg_path, _ = write_corpus(tmp_path)
        assert cli_main(["validate-resources", "--config", str(cfg_path)]) == 0

    def test_validate_resources_broken(self, tmp_path):
        cfg_path, config = write_corpus(tmp_path)
        (tmp_path / "synonyms.tsv").write_text("malformed-line-no-tab\n", encoding="utf-8")
        assert cli_main(["validate-resources", "--config", str(cfg_path)]) == 2
