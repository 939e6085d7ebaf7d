import json
import math
from pathlib import Path

import pytest

from mlcent.cli import main
from mlcent.graphio import save_matrix_market

from synthetic import er_graph

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture()
def small_graph(tmp_path):
    path = tmp_path / "er.mtx"
    save_matrix_market(er_graph(20, 0.2, seed=6), path)
    return path


class TestMlfun:
    def test_exponential(self, capsys):
        assert main(["mlfun", "--alpha", "1", "--beta", "1", "--z", "1"]) == 0
        out = capsys.readouterr().out.strip()
        assert float(out) == pytest.approx(math.e, rel=1e-14)

    def test_resolvent_domain_error_exit_2(self, capsys):
        assert main(["mlfun", "--alpha", "0", "--z", "2"]) == 2
        assert "invalid input" in capsys.readouterr().err

    def test_unknown_flag_exit_2(self, capsys):
        assert main(["mlfun", "--alpha", "1", "--z", "1", "--bogus"]) == 2


class TestParams:
    def test_dolphins_scale(self, capsys):
        assert main(["params", "--alpha", "0.5", "--rho", "7.19"]) == 0
        out = capsys.readouterr().out
        assert "mu = 0.8862269254527579" in out
        assert "limiting = monotone" in out

    def test_gamma_admissibility_flag(self, capsys):
        assert main(["params", "--alpha", "0.5", "--rho", "7.19",
                     "--gamma", "1.2"]) == 0
        assert "admissible = false" in capsys.readouterr().out

    def test_kbar_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("ML_KBAR", "100")
        main(["params", "--alpha", "0.5", "--rho", "1000"])
        low = capsys.readouterr().out
        monkeypatch.delenv("ML_KBAR")
        main(["params", "--alpha", "0.5", "--rho", "1000"])
        high = capsys.readouterr().out
        low_bound = float(low.split("bound_representable = ")[1].splitlines()[0])
        high_bound = float(high.split("bound_representable = ")[1].splitlines()[0])
        assert low_bound < high_bound


class TestCentrality:
    @pytest.mark.parametrize("measure", ["degree", "eigenvector", "subgraph", "total"])
    def test_measures_write_csv(self, small_graph, tmp_path, measure):
        out = tmp_path / f"{measure}.csv"
        code = main([
            "centrality", "--graph", str(small_graph), "--measure", measure,
            "--alpha", "0.5", "--gamma", "0.2", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("#")
        assert lines[1] == "node,score"
        assert len(lines) == 2 + 20

    def test_stats_sidecar(self, small_graph, tmp_path):
        out = tmp_path / "c.csv"
        stats = tmp_path / "stats.json"
        main([
            "centrality", "--graph", str(small_graph), "--measure", "degree",
            "--out", str(out), "--stats-out", str(stats),
        ])
        payload = json.loads(stats.read_text())
        assert payload["n"] == 20
        assert set(payload) == {"n", "m", "rho", "lambda2", "degree_min", "degree_max"}

    def test_missing_graph_exit_2(self, tmp_path, capsys):
        code = main(["centrality", "--graph", str(tmp_path / "nope.mtx"),
                     "--measure", "degree", "--out", str(tmp_path / "o.csv")])
        assert code == 2


class TestSweep:
    def test_grid_and_mu_files(self, small_graph, tmp_path):
        grid_path = tmp_path / "grid.csv"
        mu_path = tmp_path / "mu.csv"
        code = main([
            "sweep", "--graph", str(small_graph), "--measure", "subgraph",
            "--baseline", "degree", "--alpha", "0.2:1:3", "--gamma", "0.05:1:4",
            "--out", str(grid_path), "--mu-out", str(mu_path),
        ])
        assert code == 0
        lines = grid_path.read_text().splitlines()
        assert lines[1] == "alpha,gamma,tau,finite"
        assert len(lines) == 2 + 12
        assert mu_path.read_text().splitlines()[1] == "alpha,mu"

    def test_nan_serialization(self, small_graph, tmp_path):
        grid_path = tmp_path / "grid.csv"
        main([
            "sweep", "--graph", str(small_graph), "--measure", "subgraph",
            "--alpha", "0.05:0.05:1", "--gamma", "2:2:1",
            "--out", str(grid_path),
        ])
        row = grid_path.read_text().splitlines()[2]
        assert row.endswith("nan,0")

    def test_bad_grid_spec_exit_2(self, small_graph, tmp_path):
        assert main([
            "sweep", "--graph", str(small_graph), "--measure", "subgraph",
            "--alpha", "0.2-1-3", "--gamma", "0.05:1:4",
            "--out", str(tmp_path / "g.csv"),
        ]) == 2

    def test_deterministic_bytes(self, small_graph, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            main([
                "sweep", "--graph", str(small_graph), "--measure", "total",
                "--alpha", "0.3:0.9:3", "--gamma", "0.01:0.4:3",
                "--out", str(p),
            ])
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestTemporal:
    def test_phone_scenario(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = main([
            "temporal", "--scenario", "phone", "--alpha", "0.5",
            "--gamma", "0.9", "--b", "0.1", "--samples", "0.4:0.8:2",
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "t,node,broadcast,receive"
        assert len(lines) == 2 + 2 * 16

    def test_tree_seeded_deterministic(self, tmp_path):
        outs = [tmp_path / "t1.csv", tmp_path / "t2.csv"]
        for out in outs:
            main([
                "temporal", "--scenario", "tree", "--levels", "3",
                "--noise", "2", "--horizon", "4", "--seed", "9",
                "--alpha", "0.5", "--gamma", "0.4", "--b", "0.01",
                "--samples", "1:4:4", "--out", str(out),
            ])
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_schedule_file_input(self, tmp_path):
        sched = tmp_path / "s.sched"
        sched.write_text("n 3\n0.0 1.0 0\n0 1\n1.0 2.0 0\n1 2\n")
        out = tmp_path / "traj.csv"
        code = main([
            "temporal", "--schedule", str(sched), "--alpha", "0",
            "--gamma", "0.4", "--out", str(out),
        ])
        assert code == 0
        assert len(out.read_text().splitlines()) == 2 + 3

    def test_overflow_exit_1(self, tmp_path, capsys):
        # single-call pieces have rho = 1, so E_{0.05}(5 A) overflows
        code = main([
            "temporal", "--scenario", "phone", "--alpha", "0.05",
            "--gamma", "5.0", "--out", str(tmp_path / "t.csv"),
        ])
        assert code == 1
        err = capsys.readouterr().err
        assert "alpha=0.05" in err and "gamma=5.0" in err

    def test_needs_source_exit_2(self, tmp_path):
        assert main([
            "temporal", "--alpha", "0.5", "--gamma", "0.4",
            "--out", str(tmp_path / "t.csv"),
        ]) == 2
