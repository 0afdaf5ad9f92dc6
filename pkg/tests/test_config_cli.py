import csv

import numpy as np
import pytest

from dde_elites import cli
from dde_elites.config import ExperimentConfig, default_latent_dim
from dde_elites.errors import ConfigError
from dde_elites.vae import VaeModel


def read_csv_strict(path, expected_header):
    """Strict reader: exact header, rectangular rows, parseable floats."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == expected_header.split(",")
    width = len(rows[0])
    for row in rows[1:]:
        assert len(row) == width
        for value in row[2:]:
            float(value)
    return rows[1:]


def tiny_config_file(tmp_path, budget=500, bins=100, n_joints=6, seed=3):
    cfg = ExperimentConfig.default(n_joints, budget=budget, seed=seed)
    cfg.archive.bins = bins
    cfg.vae.latent_dim = 3
    cfg.vae.hidden_dim = 16
    cfg.out_dir = str(tmp_path / "out")
    path = tmp_path / "config.json"
    cfg.save(path)
    return path, cfg


class TestConfig:
    def test_roundtrip(self, tmp_path):
        cfg = ExperimentConfig.default(200, budget=12345, seed=9)
        cfg.operators.sigma_iso = 0.007
        cfg.bandit.window_length = 77
        path = tmp_path / "c.json"
        cfg.save(path)
        assert ExperimentConfig.load(path) == cfg

    def test_latent_rule(self):
        assert default_latent_dim(20) == 10
        assert default_latent_dim(200) == 32
        assert default_latent_dim(1000) == 32
        assert ExperimentConfig.default(200).vae.latent_dim == 32

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(ConfigError, match="invalid config"):
            ExperimentConfig.load(path)

    def test_missing_key(self, tmp_path):
        path = tmp_path / "partial.json"
        path.write_text('{"domain": {"n_joints": 5}}')
        with pytest.raises(ConfigError, match="missing"):
            ExperimentConfig.load(path)

    def test_validation(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.default(20, budget=0)
        with pytest.raises(ConfigError):
            ExperimentConfig.default(0)


class TestIlluminate:
    def test_artifacts_and_row_counts(self, tmp_path):
        cfg_path, cfg = tiny_config_file(tmp_path, budget=500)
        rc = cli.main(["illuminate", "--variant", "map-elites",
                       "--config", str(cfg_path)])
        assert rc == 0
        out = tmp_path / "out"
        rows = read_csv_strict(out / "history.csv",
                               "generation,evaluations,coverage,mean_fitness,action,reward")
        assert len(rows) == 5  # 500 / 100 generations
        read_csv_strict(out / "centroids.csv", "x,y")
        assert not (out / "decoder.npz").exists()
        assert not (out / "bandit.csv").exists()

    def test_byte_identical_rerun(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path, budget=400)
        out = tmp_path / "out"
        cli.main(["illuminate", "--variant", "dde-elites", "--config", str(cfg_path)])
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        cli.main(["illuminate", "--variant", "dde-elites", "--config", str(cfg_path)])
        second = {p.name: p.read_bytes() for p in out.iterdir()}
        assert first == second
        assert "decoder.npz" in first and "bandit.csv" in first

    def test_bandit_trace_rows_match_history(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path, budget=600)
        cli.main(["illuminate", "--variant", "dde-elites", "--config", str(cfg_path)])
        out = tmp_path / "out"
        history = read_csv_strict(out / "history.csv",
                                  "generation,evaluations,coverage,mean_fitness,action,reward")
        bandit = read_csv_strict(out / "bandit.csv", "generation,action,reward")
        assert len(bandit) == len(history)

    def test_flag_overrides(self, tmp_path):
        out = tmp_path / "flagged"
        rc = cli.main(["illuminate", "--variant", "map-elites", "--arm", "20",
                       "--budget", "300", "--seed", "5", "--out", str(out)])
        assert rc == 0
        rows = read_csv_strict(out / "history.csv",
                               "generation,evaluations,coverage,mean_fitness,action,reward")
        assert len(rows) == 3

    def test_replicates_make_subdirs(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path, budget=300)
        rc = cli.main(["illuminate", "--variant", "map-elites",
                       "--config", str(cfg_path), "--replicates", "2"])
        assert rc == 0
        out = tmp_path / "out"
        assert (out / "rep00" / "history.csv").exists()
        assert (out / "rep01" / "history.csv").exists()
        a = (out / "rep00" / "history.csv").read_bytes()
        b = (out / "rep01" / "history.csv").read_bytes()
        assert a != b  # different seeds

    def test_config_error_exit_code(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path, budget=50)  # below one batch
        assert cli.main(["illuminate", "--config", str(cfg_path)]) == 2

    def test_io_error_exit_code(self, tmp_path):
        blocker = tmp_path / "blocked"
        blocker.write_text("file, not a directory")
        rc = cli.main(["illuminate", "--variant", "map-elites", "--arm", "20",
                       "--budget", "300", "--out", str(blocker / "sub")])
        assert rc == 3


class TestRecreate:
    def make_decoder(self, tmp_path, n=6, d=3):
        model = VaeModel(n, d, 16, seed=1)
        path = tmp_path / "decoder.npz"
        model.decoder().save(path)
        return path

    def test_runs_and_emits(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path, budget=5000)
        dec_path = self.make_decoder(tmp_path)
        rc = cli.main(["recreate", str(dec_path), "--config", str(cfg_path)])
        assert rc == 0
        out = tmp_path / "out"
        rows = read_csv_strict(out / "history.csv",
                               "generation,evaluations,coverage,mean_fitness,action,reward")
        assert len(rows) == 5  # default budget is one tenth of 5000
        assert (out / "archive.csv").exists()

    def test_explicit_budget_wins(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path, budget=5000)
        dec_path = self.make_decoder(tmp_path)
        cli.main(["recreate", str(dec_path), "--config", str(cfg_path),
                  "--budget", "300"])
        rows = read_csv_strict(tmp_path / "out" / "history.csv",
                               "generation,evaluations,coverage,mean_fitness,action,reward")
        assert len(rows) == 3

    def test_zero_weight_decoder_single_cell(self, tmp_path):
        cfg_path, cfg = tiny_config_file(tmp_path, budget=2000)
        model = VaeModel(6, 3, 16, seed=1)
        for name in ("dec_w1", "dec_b1", "dec_w2", "dec_b2"):
            model.params[name][...] = 0.0
        dec_path = tmp_path / "zero.npz"
        model.decoder().save(dec_path)
        rc = cli.main(["recreate", str(dec_path), "--config", str(cfg_path)])
        assert rc == 0
        rows = read_csv_strict(tmp_path / "out" / "archive.csv",
                               "cell,fitness,behavior_x,behavior_y,g_0,g_1,g_2")
        assert len(rows) == 1

    def test_latent_mismatch_is_dimension_error(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path)  # configured latent_dim 3
        model = VaeModel(6, 5, 16, seed=1)
        dec_path = tmp_path / "d5.npz"
        model.decoder().save(dec_path)
        assert cli.main(["recreate", str(dec_path), "--config", str(cfg_path)]) == 2

    def test_domain_mismatch_is_dimension_error(self, tmp_path):
        cfg_path, _ = tiny_config_file(tmp_path, n_joints=6)
        model = VaeModel(9, 3, 16, seed=1)
        dec_path = tmp_path / "n9.npz"
        model.decoder().save(dec_path)
        assert cli.main(["recreate", str(dec_path), "--config", str(cfg_path)]) == 2

    def test_corrupt_decoder_names_field(self, tmp_path, capsys):
        cfg_path, _ = tiny_config_file(tmp_path)
        bad = tmp_path / "corrupt.npz"
        np.savez(bad, format_version=np.array(1))
        assert cli.main(["recreate", str(bad), "--config", str(cfg_path)]) == 2
        assert "latent_dim" in capsys.readouterr().err


class TestTargets:
    def test_direct_smoke(self, tmp_path):
        out = tmp_path / "tgt"
        rc = cli.main(["targets", "--mode", "direct", "--arm", "20",
                       "--budget", "300", "--seed", "1", "--threads", "1",
                       "--out", str(out)])
        assert rc == 0
        rows = read_csv_strict(out / "targets.csv",
                               "target_index,mode,evaluations,distance,joint_variance")
        indices = {int(r[0]) for r in rows}
        assert indices == set(range(18))
        summary = read_csv_strict(out / "targets_summary.csv",
                                  "mode,median_distance,median_joint_variance")
        assert len(summary) == 1 and summary[0][0] == "direct"

    def test_seed_changes_trace_not_schema(self, tmp_path):
        outs = []
        for seed in (1, 2):
            out = tmp_path / f"tgt{seed}"
            cli.main(["targets", "--mode", "direct", "--arm", "20", "--budget",
                      "300", "--seed", str(seed), "--threads", "1",
                      "--out", str(out)])
            outs.append((out / "targets.csv").read_bytes())
        assert outs[0] != outs[1]

    def test_dde_requires_decoder(self, tmp_path):
        rc = cli.main(["targets", "--mode", "dde", "--arm", "20",
                       "--budget", "300", "--out", str(tmp_path / "x")])
        assert rc == 2


class TestVerify:
    def test_fresh_checkout_passes(self, capsys):
        assert cli.main(["verify"]) == 0
        out = capsys.readouterr().out
        assert out.count("[PASS]") == len(cli.VERIFY_CHECKS)
        assert "[FAIL]" not in out

    def test_corrupted_gradient_fails(self, monkeypatch, capsys):
        real = VaeModel._gradients

        def corrupted(self, cache):
            grads = real(self, cache)
            grads["dec_w2"] = grads["dec_w2"] + 0.05
            return grads

        monkeypatch.setattr(VaeModel, "_gradients", corrupted)
        assert cli.main(["verify"]) != 0
        out = capsys.readouterr().out
        assert "[FAIL] vae-gradient" in out

    @pytest.mark.parametrize("seed", [0, 17, 912])
    def test_seed_robust(self, seed):
        results = cli.run_verification(seed)
        assert all(ok for _, ok, _ in results)
