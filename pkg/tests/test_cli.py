"""End-to-end tests of the command line."""

import json

import pytest

import config
from cli.commands import main
from core.state_manager import pipeline_state

HEADER = "timestamp,open,high,low,close\n"


@pytest.fixture(autouse=True)
def fresh_state():
    pipeline_state.reset()
    yield
    pipeline_state.reset()


@pytest.fixture
def run_config_path(tmp_path, rule_params):
    """Small run: single-point grids except two rules, a few generations, inline workers"""
    catalog = {rule: {name: [value] for name, value in params.items()}
               for rule, params in rule_params.items()}
    catalog["close_x_sma"] = {"window": [5, 10, 20]}
    catalog["rsi_x_level"] = {"window": [7, 14], "threshold": [40, 50, 60]}
    data = {
        "pairs": {"EURUSD": {"synthetic": {"seed": 7, "n": 600, "regime": "trend-up"}}},
        "split": {"train_fraction": 0.5},
        "catalog": catalog,
        "ga": {"population_size": 6, "parents_mating": 3, "generations": 3},
        "leverage": [1, 20],
        "output_dir": str(tmp_path / "runs"),
        "seed": 42,
        "workers": 1,
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())
            if p.suffix != ".xlsx"}


class TestIngest:
    """ingest subcommand."""

    def test_valid_file(self, write_text, capsys):
        path = write_text("ok.csv", HEADER + "1514764800,1.1,1.2,1.0,1.15\n"
                                            "1514765100,1.15,1.16,1.14,1.15\n")
        assert main(["ingest", str(path)]) == config.EXIT_OK
        assert "bars: 2" in capsys.readouterr().out

    def test_bad_row_cites_line(self, write_text, capsys):
        path = write_text("bad.csv", HEADER + "1514764800,1.1,1.2,1.0,1.15\nabc,1,1,1,1\n")
        assert main(["ingest", str(path)]) == config.EXIT_DATA_ERROR
        assert "line 3" in capsys.readouterr().out

    def test_empty_file(self, write_text):
        assert main(["ingest", str(write_text("empty.csv", ""))]) == config.EXIT_DATA_ERROR

    def test_missing_file(self, tmp_path):
        assert main(["ingest", str(tmp_path / "absent.csv")]) == config.EXIT_DATA_ERROR

    def test_dump_indicators(self, tmp_path):
        csv_path = tmp_path / "synth.csv"
        assert main(["synthesize", "--seed", "1", "--n", "200", "--out", str(csv_path)]) == 0
        out = tmp_path / "indicators.csv"
        assert main(["ingest", str(csv_path), "--dump-indicators", str(out)]) == 0
        assert out.read_text(encoding="utf-8").splitlines()[0].startswith("time,")


class TestSynthesize:
    """synthesize subcommand."""

    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert main(["synthesize", "--regime", "mean-revert", "--n", "300",
                         "--seed", "5", "--out", str(path)]) == config.EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        assert main(["ingest", str(a)]) == config.EXIT_OK

    def test_seed_is_required(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["synthesize", "--out", str(tmp_path / "x.csv")])


class TestPipeline:
    """optimize, backtest and report on a small synthetic run."""

    def test_optimize_backtest_report(self, run_config_path, tmp_path, capsys):
        assert main(["optimize", "--config", str(run_config_path)]) == config.EXIT_OK
        pair_dir = tmp_path / "runs" / "EURUSD"
        for name in ("grid_results.json", "grid_scores.csv", "features_train.csv",
                     "chromosome_MR.json", "chromosome_MSSR.json",
                     "fitness_trace_MR.csv", "fitness_trace_MSSR.csv"):
            assert (pair_dir / name).exists(), name

        grid = json.loads((pair_dir / "grid_results.json").read_text(encoding="utf-8"))
        assert [r["rule_id"] for r in grid["rules"]] == list(config.RULE_CATALOG)
        assert grid["rules"][0]["evaluated"] == 3

        trace_lines = (pair_dir / "fitness_trace_MSSR.csv").read_text(encoding="utf-8").splitlines()
        assert len(trace_lines) == 1 + 4

        assert main(["backtest", "--config", str(run_config_path)]) == config.EXIT_OK
        for leverage in ("1", "20"):
            lines = (pair_dir / f"comparison_L{leverage}.csv").read_text(encoding="utf-8").splitlines()
            assert [line.split(",")[0] for line in lines[1:]] == ["B&H", "S&H", "GA-MR", "GA-MSSR"]
        assert (pair_dir / "comparison.xlsx").exists()

        capsys.readouterr()
        assert main(["report", "--config", str(run_config_path)]) == config.EXIT_OK
        output = capsys.readouterr().out
        assert "Leverage 1:1" in output
        assert "Leverage 1:20" in output
        assert "GA-MSSR" in output

    def test_reruns_are_byte_identical(self, run_config_path, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        for out in (first, second):
            assert main(["optimize", "--config", str(run_config_path), "--out", str(out)]) == 0
            assert main(["backtest", "--config", str(run_config_path), "--out", str(out)]) == 0
        assert snapshot(first / "EURUSD") == snapshot(second / "EURUSD")

    def test_leverage_flag_overrides_config(self, run_config_path, tmp_path):
        out = tmp_path / "lev"
        assert main(["optimize", "--config", str(run_config_path), "--out", str(out)]) == 0
        assert main(["backtest", "--config", str(run_config_path), "--out", str(out),
                     "--leverage", "2"]) == 0
        assert sorted(p.name for p in (out / "EURUSD").glob("comparison_L*.csv")) == ["comparison_L2.csv"]

    def test_backtest_without_artifacts(self, run_config_path):
        assert main(["backtest", "--config", str(run_config_path)]) == config.EXIT_MISSING_ARTIFACTS

    def test_missing_chromosome(self, run_config_path, tmp_path):
        assert main(["optimize", "--config", str(run_config_path)]) == 0
        (tmp_path / "runs" / "EURUSD" / "chromosome_MSSR.json").unlink()
        assert main(["backtest", "--config", str(run_config_path)]) == config.EXIT_MISSING_ARTIFACTS

    def test_report_without_tables(self, run_config_path):
        assert main(["report", "--config", str(run_config_path)]) == config.EXIT_MISSING_ARTIFACTS

    def test_optimize_needs_seed(self, run_config_path):
        data = json.loads(run_config_path.read_text(encoding="utf-8"))
        del data["seed"]
        run_config_path.write_text(json.dumps(data), encoding="utf-8")
        assert main(["optimize", "--config", str(run_config_path)]) == config.EXIT_DATA_ERROR

    def test_seed_flag_supplies_seed(self, run_config_path, tmp_path):
        data = json.loads(run_config_path.read_text(encoding="utf-8"))
        del data["seed"]
        run_config_path.write_text(json.dumps(data), encoding="utf-8")
        assert main(["optimize", "--config", str(run_config_path), "--seed", "3"]) == 0
        assert (tmp_path / "runs" / "EURUSD" / "chromosome_MR.json").exists()

    def test_unknown_pair(self, run_config_path):
        assert main(["optimize", "--config", str(run_config_path), "--pair", "GBPUSD"]) == config.EXIT_DATA_ERROR

    def test_test_segment_shorter_than_trained_window(self, run_config_path, tmp_path):
        data = json.loads(run_config_path.read_text(encoding="utf-8"))
        data["split"] = {"train_fraction": 0.9}
        data["catalog"]["close_x_sma"] = {"window": [100, 600]}
        run_config_path.write_text(json.dumps(data), encoding="utf-8")
        assert main(["optimize", "--config", str(run_config_path)]) == config.EXIT_OK
        grid = json.loads((tmp_path / "runs" / "EURUSD" / "grid_results.json").read_text(encoding="utf-8"))
        assert grid["rules"][0]["best_params"] == {"window": 100}
        assert main(["backtest", "--config", str(run_config_path)]) == config.EXIT_OK
