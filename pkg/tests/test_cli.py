import json

import numpy as np

from tvconsensus.cli import main
from tvconsensus.config import load_config
from tvconsensus.harness import run_experiment


def write_field(path, values):
    path.write_text("".join(f"{v}\n" for v in values))


AC_CONFIG = """
graph: {{generator: complete, n: 8}}
objective:
  kind: quadratic
  data: {{source: uniform, seed: 11}}
lambda: {{multiplier: 1.5}}
engines:
  - name: admm
    rho: 1.0
    max_iterations: 3000
  - name: subgradient
    max_iterations: 500
    record_every: 100
output: {{directory: {outdir}, prefix: ac_demo}}
"""


class TestSubcommands:
    def test_gen_graph_and_dualnorm(self, tmp_path, capsys):
        gpath = tmp_path / "g.txt"
        assert main(["gen-graph", "complete", "--n", "4", "-o", str(gpath)]) == 0
        upath = tmp_path / "u.txt"
        write_field(upath, [3.0, -1.0, -1.0, -1.0])
        assert main(["dualnorm", "--graph", str(gpath), "--field", str(upath)]) == 0
        out = capsys.readouterr().out
        assert "dual_norm = 1" in out
        assert "witness = [0]" in out

    def test_critical_lambda(self, tmp_path, capsys):
        gpath = tmp_path / "g.txt"
        main(["gen-graph", "path", "--n", "2", "-o", str(gpath)])
        xpath = tmp_path / "x.txt"
        write_field(xpath, [0.0, 2.0])
        assert main(["critical-lambda", "--graph", str(gpath), "--field", str(xpath)]) == 0
        assert "critical_lambda = 1" in capsys.readouterr().out

    def test_certify(self, tmp_path, capsys):
        gpath = tmp_path / "g.txt"
        main(["gen-graph", "path", "--n", "2", "-o", str(gpath)])
        xpath = tmp_path / "x.txt"
        write_field(xpath, [0.0, 2.0])
        assert (
            main(
                [
                    "certify", "--graph", str(gpath), "--x0", str(xpath),
                    "--kind", "quadratic", "--x-star", "1.0", "--lam", "1.0",
                ]
            )
            == 0
        )
        assert "verdict = certified" in capsys.readouterr().out

    def test_predict_stubborn(self, tmp_path, capsys):
        xpath = tmp_path / "x0r.txt"
        write_field(xpath, [0.1284] * 4)
        code = main(
            ["predict-stubborn", "--x0r", str(xpath), "--a", "10", "--lam", "0.05",
             "--s-count", "1"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "x_star = 0.1784" in out
        assert "case = clipped_high" in out

    def test_validation_failures_exit_1(self, tmp_path, capsys):
        assert main(["dualnorm", "--graph", "/nonexistent", "--field", "/nope"]) == 1
        gpath = tmp_path / "g.txt"
        main(["gen-graph", "path", "--n", "3", "-o", str(gpath)])
        upath = tmp_path / "u.txt"
        write_field(upath, [1.0, -1.0])  # wrong length
        assert main(["dualnorm", "--graph", str(gpath), "--field", str(upath)]) == 1
        capsys.readouterr()

    def test_runtime_anomaly_exits_2(self, tmp_path, capsys, monkeypatch):
        from tvconsensus import IterationAnomalyError
        import tvconsensus.cli as cli

        def boom(path):
            raise IterationAnomalyError("iteration bound exceeded")

        monkeypatch.setattr(cli, "load_config", boom)
        assert main(["run", "whatever.yaml"]) == 2
        assert "anomaly" in capsys.readouterr().err


class TestRunExperiment:
    def test_end_to_end_run(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.yaml"
        cfg_path.write_text(AC_CONFIG.format(outdir=tmp_path / "out"))
        assert main(["run", str(cfg_path)]) == 0
        out = capsys.readouterr().out
        assert "summary:" in out
        summary = json.loads((tmp_path / "out" / "ac_demo_summary.json").read_text())
        assert summary["lambda"]["classification"] == "supercritical"
        assert summary["certificate"]["verdict"] == "certified"
        assert summary["engines"]["admm"]["converged"]
        csv_text = (tmp_path / "out" / "ac_demo_admm.csv").read_text()
        assert csv_text.startswith("iter,disagreement_log,mean,objective,max_change\n")

    def test_replay_is_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        for outdir in (out1, out2):
            cfg_path = tmp_path / f"cfg_{outdir.name}.yaml"
            cfg_path.write_text(AC_CONFIG.format(outdir=outdir))
            result = run_experiment(load_config(str(cfg_path)))
            assert result.csv_paths
        for name in ("ac_demo_admm.csv", "ac_demo_subgradient.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_stubborn_scenario_summary(self, tmp_path):
        cfg_path = tmp_path / "stub.yaml"
        cfg_path.write_text(
            f"""
graph: {{generator: complete, n: 9}}
objective:
  kind: quadratic
  data: {{source: uniform, seed: 5}}
lambda: {{value: 0.2}}
engines:
  - name: admm
    max_iterations: 20000
    disagreement_tol: -1
    change_tol: 1.0e-13
  - name: gossip
    max_iterations: 20000
output: {{directory: {tmp_path / "out"}, prefix: stub}}
stubborn:
  vertices: [8]
  values: [5.0]
"""
        )
        result = run_experiment(load_config(str(cfg_path)))
        block = result.summary["stubborn_analysis"]
        assert block["scenario1"] is True
        assert block["prediction"]["case"] in ("clipped_high", "pulled_to_a", "clipped_low")
        err = block["prediction_error"]["admm"]
        assert err <= 1e-4
        # gossip is fully captured by the lone stubborn agent
        assert np.isclose(
            result.trajectories["gossip"].final_x.mean(), 5.0, atol=1e-6
        )

    def test_invalid_stubborn_vertex_rejected(self, tmp_path):
        cfg_path = tmp_path / "bad.yaml"
        cfg_path.write_text(
            f"""
graph: {{generator: complete, n: 4}}
objective:
  kind: quadratic
  data: {{source: uniform, seed: 5}}
lambda: {{value: 0.2}}
engines: [{{name: admm}}]
stubborn: {{vertices: [9], values: [1.0]}}
output: {{directory: {tmp_path / "out"}, prefix: bad}}
"""
        )
        assert main(["run", str(cfg_path)]) == 1

    def test_median_run_reaches_median(self, tmp_path):
        cfg_path = tmp_path / "mc.yaml"
        cfg_path.write_text(
            f"""
graph: {{generator: complete, n: 9}}
objective:
  kind: absolute
  data: {{source: uniform, seed: 21, outliers: [{{vertex: 0, value: 4.0}}]}}
lambda: {{value: 0.5}}
engines:
  - name: admm
    max_iterations: 30000
    disagreement_tol: -1
    change_tol: 1.0e-12
output: {{directory: {tmp_path / "out"}, prefix: mc}}
"""
        )
        result = run_experiment(load_config(str(cfg_path)))
        median = result.summary["initial"]["median"]
        final = result.trajectories["admm"].final_x
        assert np.abs(final - median).max() <= 1e-4
        assert result.summary["lambda"]["classification"] == "supercritical"
