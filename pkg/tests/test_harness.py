import hashlib
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from dgs_opt import (
    ConfigError,
    emit_csv,
    emit_plot,
    load_config,
    mix_seed,
    parse_config,
    render_plot,
    run_experiment,
    run_trial,
)
from dgs_opt.cli import main as cli_main
from dgs_opt.harness import SUMMARY_HEADER, TRACE_HEADER, SweepSummary


def base_doc(**overrides):
    doc = {
        "experiment": "periodic-sweep",
        "objective": {"kind": "power-sum-sqrt", "dimension": 3, "box": [-5, 5]},
        "noise": {"kind": "periodic", "alpha": 1.0},
        "step_size": 0.01,
        "sigma_grid": [0.5, 1.0],
        "trials": 2,
        "max_iterations": 40,
        "schedule": {"kind": "constant"},
        "quadrature_order": 5,
        "basis": "identity",
        "master_seed": 99,
    }
    doc.update(overrides)
    return doc


class TestConfigParsing:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(base_doc()))
        cfg = load_config(path)
        assert cfg.sigma_grid == (0.5, 1.0)
        assert cfg.dimension == 3
        assert cfg.wavelength == 1.0

    def test_sigma_values_scale_with_wavelength(self):
        cfg = parse_config(base_doc(noise={"kind": "periodic", "alpha": 2.0}))
        assert cfg.sigma_values == (0.25, 0.5)

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown field"):
            parse_config(base_doc(typo_key=1))

    def test_unknown_nested_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown field"):
            parse_config(base_doc(noise={"kind": "periodic", "alpha": 1.0, "alpha0": 2.0}))

    def test_missing_step_size_named_in_error(self):
        doc = base_doc()
        del doc["step_size"]
        with pytest.raises(ConfigError, match="step_size"):
            parse_config(doc)

    def test_non_increasing_grid_rejected(self):
        with pytest.raises(ConfigError, match="increasing"):
            parse_config(base_doc(sigma_grid=[1.0, 0.5]))

    def test_negative_sigma_rejected(self):
        with pytest.raises(ConfigError, match="positive"):
            parse_config(base_doc(sigma_grid=[-1.0, 0.5]))

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError, match="experiment"):
            parse_config(base_doc(experiment="mystery"))

    def test_parse_error_reports_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"experiment": }')
        with pytest.raises(ConfigError, match="line 1"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")


class TestSeedMixing:
    def test_deterministic(self):
        assert mix_seed(1, 2, 3) == mix_seed(1, 2, 3)

    def test_order_sensitive_and_distinct(self):
        seeds = {mix_seed(7, g, t) for g in range(10) for t in range(10)}
        assert len(seeds) == 100
        assert mix_seed(7, 1, 2) != mix_seed(7, 2, 1)


@pytest.fixture(scope="module")
def small_summary():
    return run_experiment(parse_config(base_doc()))


class TestRunExperiment:
    def test_shapes(self, small_summary):
        s = small_summary
        assert s.sigmas == (0.5, 1.0)
        assert len(s.mean_final_dist) == 2
        assert all(len(tr) == 41 for tr in s.mean_dist_traces)
        assert np.all(s.trials_ok == 2)

    def test_trials_are_distinct(self):
        cfg = parse_config(base_doc())
        a = run_trial(cfg, 0, 0)
        b = run_trial(cfg, 0, 1)
        assert not np.array_equal(a.iterates[0], b.iterates[0])

    def test_byte_identical_outputs(self, tmp_path):
        cfg = parse_config(base_doc())
        run_experiment(cfg, out_dir=tmp_path / "a")
        run_experiment(cfg, out_dir=tmp_path / "b")
        for name in ("summary.csv", "trace_grid00.csv", "trace_grid01.csv"):
            ha = hashlib.sha256((tmp_path / "a" / name).read_bytes()).hexdigest()
            hb = hashlib.sha256((tmp_path / "b" / name).read_bytes()).hexdigest()
            assert ha == hb

    def test_csv_headers_and_row_counts(self, tmp_path):
        cfg = parse_config(base_doc(trials=1, sigma_grid=[1.0]))
        run_experiment(cfg, out_dir=tmp_path)
        summary_lines = (tmp_path / "summary.csv").read_text().splitlines()
        assert summary_lines[0] == SUMMARY_HEADER
        assert len(summary_lines) == 2
        trace_lines = (tmp_path / "trace_grid00.csv").read_text().splitlines()
        assert trace_lines[0] == TRACE_HEADER
        assert len(trace_lines) == 1 + cfg.max_iterations + 1

    def test_all_diverged_grid_point_invalid(self):
        cfg = parse_config(base_doc(step_size=50.0, sigma_grid=[1.0], trials=2))
        s = run_experiment(cfg)
        assert s.trials_ok[0] == 0
        assert not s.valid(0)
        assert np.isnan(s.mean_final_dist[0])

    def test_empty_sweep_csv_is_header_only(self, tmp_path):
        empty = SweepSummary(
            sigmas=(), mean_final_dist=np.array([]), std_final_dist=np.array([]),
            mean_final_objective=np.array([]), trials_ok=np.array([], dtype=int),
            mean_dist_traces=[], mean_cosine_traces=[],
            evaluation_counts=np.array([], dtype=np.int64), trials=0, max_iterations=0,
        )
        emit_csv(empty, tmp_path / "empty.csv")
        assert (tmp_path / "empty.csv").read_text() == SUMMARY_HEADER + "\n"


class TestPlots:
    @pytest.fixture()
    def summary(self, small_summary):
        return small_summary

    @pytest.mark.parametrize(
        "kind", ["convergence-curves", "cosine-vs-iteration", "final-dist-vs-sigma"]
    )
    def test_svg_is_well_formed_xml(self, summary, kind, tmp_path):
        path = tmp_path / f"{kind}.svg"
        emit_plot(summary, kind, path)
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")
        assert any("polyline" in el.tag for el in root.iter())

    def test_one_polyline_per_grid_point(self, summary):
        svg = render_plot(summary, "convergence-curves")
        assert svg.count("<polyline") == len(summary.sigmas)

    def test_deterministic_bytes(self, summary):
        assert render_plot(summary, "final-dist-vs-sigma") == render_plot(
            summary, "final-dist-vs-sigma"
        )

    def test_unknown_kind_rejected(self, summary):
        with pytest.raises(ValueError):
            render_plot(summary, "pie-chart")

    def test_empty_summary_rejected(self):
        empty = SweepSummary(
            sigmas=(1.0,), mean_final_dist=np.array([np.nan]),
            std_final_dist=np.array([np.nan]), mean_final_objective=np.array([np.nan]),
            trials_ok=np.array([0]), mean_dist_traces=[None], mean_cosine_traces=[None],
            evaluation_counts=np.array([0], dtype=np.int64), trials=1, max_iterations=5,
        )
        with pytest.raises(ValueError, match="nothing to plot"):
            render_plot(empty, "convergence-curves")


class TestCli:
    def test_run_and_plot_round_trip(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_doc()))
        out = tmp_path / "out"
        assert cli_main(["run", str(cfg_path), "--out", str(out)]) == 0
        assert (out / "summary.csv").exists()
        svg = tmp_path / "conv.svg"
        code = cli_main(
            ["plot", str(out / "summary.csv"), "--kind", "convergence-curves",
             "--out", str(svg)]
        )
        assert code == 0
        ET.parse(svg)

    def test_bad_config_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert cli_main(["run", str(path)]) == 1

    def test_all_diverged_exit_code(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_doc(step_size=50.0, trials=1)))
        assert cli_main(["run", str(cfg_path), "--out", str(tmp_path / "o")]) == 2

    def test_presets_list(self, capsys):
        assert cli_main(["presets", "list"]) == 0
        out = capsys.readouterr().out.split()
        assert "periodic_alpha1" in out
        assert len(out) == 3

    def test_presets_are_loadable(self):
        from dgs_opt.cli import _load_run_config, list_presets

        for name in list_presets():
            cfg = _load_run_config(name)
            assert cfg.trials == 20
            assert cfg.sigma_grid[0] == 0.01 and cfg.sigma_grid[-1] == 50.0

    def test_seed_override_changes_results(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_doc(sigma_grid=[1.0], trials=1, max_iterations=5)))
        cli_main(["run", str(cfg_path), "--out", str(tmp_path / "a")])
        cli_main(["run", str(cfg_path), "--out", str(tmp_path / "b"), "--seed", "7"])
        assert (tmp_path / "a" / "summary.csv").read_text() != (
            tmp_path / "b" / "summary.csv"
        ).read_text()

    def test_bounds_prints_values(self, capsys):
        assert cli_main(["bounds", "--model", "periodic", "--alpha", "1", "--sigma", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "noise_gradient_bound" in out and "recommended_sigma" in out
