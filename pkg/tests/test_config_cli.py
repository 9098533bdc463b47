import math

import pytest
import yaml

from retinasim.cli import main
from retinasim.config import SCENARIOS, ConfigError, ExperimentConfig, dump_config, load_config, parse_config
from retinasim.output import emit_csv, emit_summary, format_number, read_csv
from retinasim.scenarios import run_scenario


def write_config(path, **data):
    path.write_text(yaml.safe_dump(data))
    return path


class TestLoadConfig:
    def test_minimal_config_gets_defaults(self, tmp_path):
        cfg = load_config(write_config(tmp_path / "c.yaml", scenario="colour-detector", seed=4))
        assert cfg.seed == 4
        assert cfg.dt == 0.1 and cfg.steps == 200 and cfg.workers == 1
        assert cfg.output_dir == "runs/colour-detector"
        assert cfg.inhibition.mode == "soft"
        assert cfg.plasticity.log_offset is None
        assert cfg.plasticity.plastic_until == math.inf
        assert cfg.colour.train_stimuli == [-0.2, 1.2]

    def test_zero_dt_names_the_field(self):
        with pytest.raises(ConfigError, match=r"^dt:"):
            parse_config({"scenario": "deprivation", "dt": 0})

    def test_nested_error_has_full_path(self):
        with pytest.raises(ConfigError, match=r"plasticity\.decay_rate"):
            parse_config({"scenario": "deprivation", "plasticity": {"decay_rate": -1}})

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="speed"):
            parse_config({"scenario": "deprivation", "speed": 3})
        with pytest.raises(ConfigError, match=r"tuning\.width"):
            parse_config({"scenario": "deprivation", "tuning": {"width": 3}})

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            parse_config({"scenario": "telepathy"})

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_config(path)
        path.write_text("scenario: [unclosed\n")
        with pytest.raises(ConfigError, match="cannot parse"):
            load_config(path)
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "missing.yaml")

    def test_echo_round_trip(self, tmp_path):
        cfg = parse_config({"scenario": "cochlea-localize", "seed": 3, "cochlea": {"detectors": 9}})
        back = load_config(dump_config(cfg, tmp_path / "echo.yaml"))
        assert back == cfg
        assert isinstance(back, ExperimentConfig)


class TestOutput:
    def test_single_value_format(self, tmp_path):
        path = emit_csv([{"col": 0.1}], tmp_path / "t.csv")
        assert path.read_bytes() == b"col\n0.100000000\n"

    def test_empty_table_is_header_only(self, tmp_path):
        path = emit_csv([], tmp_path / "t.csv", columns=["a", "b"])
        assert path.read_text() == "a,b\n"

    def test_reemit_is_byte_identical(self, tmp_path):
        rows = [{"x": 1, "y": 1 / 3}, {"x": 2, "y": 2e-12}]
        a = emit_csv(rows, tmp_path / "a.csv").read_bytes()
        b = emit_csv(rows, tmp_path / "b.csv").read_bytes()
        assert a == b

    def test_ragged_rows_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([{"a": 1}, {"b": 2}], tmp_path / "t.csv")

    def test_number_format(self):
        assert format_number(3) == "3"
        assert format_number(True) == "1"
        assert format_number(-0.0) == "0.00000000"
        assert format_number(123456789.123) == "123456789."
        assert format_number(math.inf) == "inf"

    def test_read_back(self, tmp_path):
        path = emit_csv([{"a": 1, "b": 0.25}, {"a": 2, "b": 0.5}], tmp_path / "t.csv")
        assert read_csv(path) == {"a": [1.0, 2.0], "b": [0.25, 0.5]}

    def test_summary(self, tmp_path):
        text = emit_summary({"b": 0.5, "a": "x"}, tmp_path / "s.txt").read_text()
        assert text == "a = x\nb = 0.500000000\n"


class TestScenarios:
    @pytest.mark.parametrize("scenario", SCENARIOS)
    def test_outputs_are_rectangular_and_reproducible(self, scenario, tmp_path):
        cfg = parse_config({"scenario": scenario, "steps": 60, "output_dir": str(tmp_path / "a"),
                            "oracles": {"grid_points": 1000, "inequality_samples": 1000}})
        art = run_scenario(cfg)
        assert art.csv_files
        for path in art.csv_files:
            header = path.read_text().splitlines()[0].split(",")
            cols = read_csv(path)
            assert list(cols) == header
            assert len({len(v) for v in cols.values()}) == 1
        assert (tmp_path / "a" / "summary.txt").exists()
        assert load_config(tmp_path / "a" / "config_echo.yaml") == cfg

        again = run_scenario(cfg.model_copy(update={"output_dir": str(tmp_path / "b")}))
        for p, q in zip(art.csv_files, again.csv_files):
            assert p.read_bytes() == q.read_bytes()

    def test_frequency_sweep_peaks_at_n(self, tmp_path):
        art = run_scenario(parse_config({"scenario": "frequency-sweep", "output_dir": str(tmp_path)}))
        cols = read_csv(art.csv_files[0])
        best = max(range(len(cols["m"])), key=lambda i: cols["sigma"][i])
        assert cols["m"][best] == 5 and cols["is_max"][best] == 1
        assert art.summary["argmax_m"] == 5

    def test_depth_roundtrip_error_column(self, tmp_path):
        art = run_scenario(parse_config({"scenario": "depth-roundtrip", "output_dir": str(tmp_path)}))
        cols = read_csv(art.csv_files[0])
        assert len(cols["rel_error"]) == 100
        assert max(cols["rel_error"]) < 1e-9

    def test_thread_fan_out_does_not_change_bytes(self, tmp_path):
        base = {"scenario": "theorem-oracles", "oracles": {"allocation_instances": 20, "frequency_draws": 3}}
        one = run_scenario(parse_config({**base, "output_dir": str(tmp_path / "1")}))
        four = run_scenario(parse_config({**base, "workers": 4, "output_dir": str(tmp_path / "4")}))
        for p, q in zip(one.csv_files, four.csv_files):
            assert p.read_bytes() == q.read_bytes()

    def test_colour_detector_reaches_optimum(self, tmp_path):
        art = run_scenario(parse_config({"scenario": "colour-detector", "output_dir": str(tmp_path)}))
        assert art.summary["max_rel_error_vs_optimum"] < 0.05
        assert art.summary["detector_entries"] == 2


class TestCli:
    def test_list_scenarios(self, capsys):
        assert main(["list-scenarios"]) == 0
        assert capsys.readouterr().out.split() == list(SCENARIOS)

    def test_run_with_overrides(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml", scenario="frequency-sweep", seed=1)
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--seed", "9", "--out", str(out)]) == 0
        assert (out / "frequency_sweep.csv").exists()
        assert load_config(out / "config_echo.yaml").seed == 9
        assert str(out / "summary.txt") in capsys.readouterr().out

    def test_validation_error_exit_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.yaml", scenario="frequency-sweep", dt=0)
        assert main(["run", "--config", str(cfg)]) == 2
        assert "dt" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.yaml")]) == 2

    def test_runtime_error_exit_code(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("")
        cfg = write_config(tmp_path / "c.yaml", scenario="frequency-sweep", output_dir=str(blocker / "sub"))
        assert main(["run", "--config", str(cfg)]) == 1
        assert "error" in capsys.readouterr().err
