import json

import numpy as np
import pytest

from qvgraph.cli import main
from qvgraph.io import load_dataset, load_samples


@pytest.fixture
def workdir(tmp_path):
    return tmp_path


def run(argv):
    return main([str(a) for a in argv])


class TestSimulateCommand:
    def test_preset_writes_dataset_and_truth(self, workdir, capsys):
        out = workdir / "data.csv"
        truth = workdir / "truth.json"
        code = run(["simulate", "--preset", "five-areas", "--n", 50,
                    "--seed", 3, "--out", out, "--truth", truth])
        assert code == 0
        data = load_dataset(out, "inverse_gamma")
        assert (data.n, data.p) == (50, 5)
        payload = json.loads(truth.read_text())
        assert payload["family"] == "inverse_gamma"
        assert payload["s0"] == 6.0 and payload["c0"] == 10.0

    def test_edge_file(self, workdir):
        edge_file = workdir / "edges.csv"
        edge_file.write_text("0,1.5\n1.5,0\n")
        out = workdir / "data.csv"
        code = run(["simulate", "--family", "normal", "--s0", 0.0, "--c0", 2.0,
                    "--edge-file", edge_file, "--n", 20, "--out", out])
        assert code == 0
        assert load_dataset(out, "normal").p == 2

    def test_missing_edges_is_runtime_error(self, workdir, capsys):
        code = run(["simulate", "--n", 10, "--out", workdir / "x.csv"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as err:
            run(["simulate", "--n"])  # missing value
        assert err.value.code == 2


class TestFitFlow:
    def fit_small(self, workdir, extra=()):
        data_csv = workdir / "data.csv"
        run(["simulate", "--family", "normal", "--s0", 0.5, "--c0", 2.0,
             "--edge-file", self.edges(workdir), "--n", 40, "--seed", 5,
             "--out", data_csv])
        out = workdir / "samples"
        code = run(["fit", "--data", data_csv, "--family", "normal",
                    "--out", out,
                    "--set", "iterations=300", "--set", "burn_in=100",
                    "--set", "thinning=2", "--set", "chains=2",
                    "--set", "seed=11", "--set", "adapt_window=25", *extra])
        assert code == 0
        return out

    def edges(self, workdir):
        edge_file = workdir / "edges.csv"
        edge_file.write_text("0,1.5\n1.5,0\n")
        return edge_file

    def test_fit_persists_samples_and_diagnostics(self, workdir):
        out = self.fit_small(workdir)
        samples = load_samples(out)
        assert samples.retained == 100
        diagnostics = json.loads((out / "diagnostics.json").read_text())
        assert "psrf" in diagnostics and "c_1_2" in diagnostics["psrf"]
        assert "config_hash" in diagnostics

    def test_summarize_prints_table(self, workdir, capsys):
        out = self.fit_small(workdir)
        capsys.readouterr()
        assert run(["summarize", "--samples", out]) == 0
        table = capsys.readouterr().out
        assert "c_1_2" in table and "97.5%" in table

    def test_export_graph(self, workdir, capsys):
        out = self.fit_small(workdir)
        graph_dir = workdir / "graph"
        assert run(["export-graph", "--samples", out, "--out", graph_dir,
                    "--threshold", 5.0]) == 0
        assert (graph_dir / "network.dot").exists()
        assert (graph_dir / "network.json").exists()

    def test_mse_runs(self, workdir, capsys):
        out = self.fit_small(workdir)
        capsys.readouterr()
        assert run(["mse", "--samples", out, "--data", workdir / "data.csv",
                    "--seed", 1]) == 0
        assert "posterior mean MSE" in capsys.readouterr().out

    def test_config_file_flow(self, workdir):
        data_csv = workdir / "data.csv"
        run(["simulate", "--family", "normal", "--s0", 0.5, "--c0", 2.0,
             "--edge-file", self.edges(workdir), "--n", 30, "--seed", 5,
             "--out", data_csv])
        cfg = workdir / "run.cfg"
        cfg.write_text(
            f"family = normal\ninput = {data_csv}\n"
            f"output_dir = {workdir / 'cfg_samples'}\n"
            "iterations = 200\nburn_in = 50\nthinning = 2\nchains = 1\nseed = 2\n"
        )
        assert run(["fit", "--config", cfg]) == 0
        assert load_samples(workdir / "cfg_samples").retained == 75

    def test_fit_without_data_fails_cleanly(self, workdir, capsys):
        assert run(["fit", "--family", "normal", "--out", workdir / "x"]) == 1
        assert "error:" in capsys.readouterr().err


class TestCheckCommand:
    def test_single_family_deterministic(self, workdir, capsys):
        report_a = workdir / "a.json"
        report_b = workdir / "b.json"
        code_a = run(["check", "--family", "gamma", "--seed", 7,
                      "--replicates", 20000, "--report", report_a])
        code_b = run(["check", "--family", "gamma", "--seed", 7,
                      "--replicates", 20000, "--report", report_b])
        assert code_a == code_b == 0
        assert report_a.read_text() == report_b.read_text()
        out = capsys.readouterr().out
        assert "checks passed" in out

    def test_unknown_subcommand_exit_2(self):
        with pytest.raises(SystemExit) as err:
            run(["frobnicate"])
        assert err.value.code == 2
