import numpy as np
import pytest

from dde_elites.arm import ArmConfig, evaluate, forward_kinematics, genome_to_angles
from dde_elites.cma import (TargetTask, cma_minimize, default_targets,
                            run_target_matching, write_targets_csv)
from dde_elites.vae import DecoderNet, VaeModel


def sphere(x):
    return float(np.sum(x**2))


class TestCmaMinimize:
    def test_1d_quadratic(self):
        res = cma_minimize(lambda x: float((x[0] - 3.0) ** 2), 1, 2000, seed=1)
        assert res.best_f < 1e-10
        assert abs(res.best_x[0] - 3.0) < 1e-4

    def test_5d_sphere(self):
        res = cma_minimize(sphere, 5, 5000, seed=1)
        assert res.best_f < 1e-8

    def test_generation_zero_sampling(self):
        # one generation: samples should straddle the initial mean
        samples = []

        def record(x):
            samples.append(x.copy())
            return sphere(x)

        dim, sigma0 = 4, 0.3
        x0 = np.full(dim, 5.0)
        lam = 4 + int(3 * np.log(dim))
        cma_minimize(record, dim, lam, seed=3, x0=x0, sigma0=sigma0)
        assert len(samples) == lam
        mean = np.mean(samples, axis=0)
        assert np.all(np.abs(mean - x0) <= 3.0 * sigma0 / np.sqrt(lam))

    def test_non_finite_objective_is_worst_rank(self):
        def half_nan(x):
            if x[0] < 0:
                return float("nan")
            return float(np.sum((x - 1.0) ** 2))

        res = cma_minimize(half_nan, 3, 4000, seed=2)
        assert np.isfinite(res.best_f)
        assert res.best_f < 1e-6

    def test_all_nan_objective_survives(self):
        res = cma_minimize(lambda x: float("nan"), 2, 200, seed=0)
        assert res.best_f == np.inf
        assert np.all(np.isfinite(res.best_x))

    def test_trace_non_increasing(self):
        res = cma_minimize(sphere, 4, 3000, seed=5)
        assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
        assert res.trace[-1] == res.best_f

    def test_shift_invariance(self):
        shift = np.array([2.0, -1.0, 0.5])
        a = cma_minimize(sphere, 3, 4000, seed=7, x0=np.zeros(3))
        b = cma_minimize(lambda x: sphere(x - shift), 3, 4000, seed=7, x0=shift)
        assert abs(a.best_f - b.best_f) < 1e-8

    def test_budget_below_population(self):
        with pytest.raises(ValueError, match="population"):
            cma_minimize(sphere, 5, 3, seed=0)

    def test_dim_positive(self):
        with pytest.raises(ValueError, match="dim"):
            cma_minimize(sphere, 0, 100, seed=0)

    def test_deterministic(self):
        a = cma_minimize(sphere, 4, 2000, seed=9)
        b = cma_minimize(sphere, 4, 2000, seed=9)
        assert np.array_equal(a.best_x, b.best_x)
        assert a.trace == b.trace

    def test_callback_sees_progress(self):
        seen = []
        cma_minimize(sphere, 3, 1000, seed=4,
                     callback=lambda gen, evals, x, f: seen.append((gen, evals, f)))
        assert seen[0][0] == 1
        assert seen[-1][1] <= 1000
        bests = [f for _, _, f in seen]
        assert all(b <= a for a, b in zip(bests, bests[1:]))

    def test_ill_conditioned_objective(self):
        # exercises the eigenvalue floor without crashing
        def elli(x):
            scales = 10.0 ** (6 * np.arange(4) / 3)
            return float(np.sum(scales * x**2))

        res = cma_minimize(elli, 4, 6000, seed=11)
        assert res.best_f < 1e-6


class TestDefaultTargets:
    def test_two_rings_of_nine(self):
        t = default_targets()
        assert t.shape == (18, 2)
        norms = np.linalg.norm(t, axis=1)
        assert np.sum(np.isclose(norms, 0.5)) == 9
        assert np.sum(np.isclose(norms, 0.9)) == 9

    def test_task_validation(self):
        with pytest.raises(ValueError, match="unit disk"):
            TargetTask(targets=np.array([[2.0, 0.0]]))
        with pytest.raises(ValueError, match="mode"):
            TargetTask(mode="latent")


class TestRunTargetMatching:
    def test_reachable_target_direct(self):
        # (1, 0) is exactly reachable by the straight arm
        arm = ArmConfig.uniform(20)
        task = TargetTask(targets=np.array([[1.0, 0.0]]), budget_per_target=10_000,
                          mode="direct")
        results = run_target_matching(task, arm, seed=1)
        assert len(results) == 1
        assert results[0].distance < 1e-3

    def test_zero_weight_decoder_constant_distance(self):
        # constant decoder: genome 0.5 everywhere -> end effector (1, 0)
        dec = DecoderNet(3, 4, 6, np.zeros((4, 3)), np.zeros(4),
                         np.zeros((6, 4)), np.zeros(6))
        arm = ArmConfig.uniform(6)
        target = np.array([0.0, 0.5])
        expected = float(np.linalg.norm(np.array([1.0, 0.0]) - target))
        task = TargetTask(targets=target[None, :], budget_per_target=300, mode="dde")
        results = run_target_matching(task, arm, decoder=dec, seed=2)
        assert results[0].distance == pytest.approx(expected, abs=1e-12)
        assert all(d == pytest.approx(expected, abs=1e-12)
                   for _, d, _ in results[0].trace)

    def test_dde_mode_requires_decoder(self):
        task = TargetTask(budget_per_target=300, mode="dde")
        with pytest.raises(ValueError, match="decoder"):
            run_target_matching(task, ArmConfig.uniform(6), seed=0)

    def test_decoder_dimension_mismatch(self):
        model = VaeModel(12, 3, 8, seed=0)
        task = TargetTask(budget_per_target=300, mode="dde")
        with pytest.raises(ValueError, match="genomes"):
            run_target_matching(task, ArmConfig.uniform(6), model.decoder(), seed=0)

    def test_joint_variance_reported(self):
        arm = ArmConfig.uniform(8)
        task = TargetTask(targets=np.array([[0.5, 0.0]]), budget_per_target=1000,
                          mode="direct")
        res = run_target_matching(task, arm, seed=3)[0]
        angles = genome_to_angles(res.genome, arm)
        assert res.joint_variance == pytest.approx(float(np.var(angles)), abs=1e-12)
        assert res.joint_variance == pytest.approx(-evaluate(res.genome, arm).fitness,
                                                   abs=1e-12)

    def test_results_ordered_and_deterministic(self):
        arm = ArmConfig.uniform(6)
        task = TargetTask(targets=default_targets()[:4], budget_per_target=300,
                          mode="direct")
        a = run_target_matching(task, arm, seed=5)
        b = run_target_matching(task, arm, seed=5)
        assert [r.target_index for r in a] == [0, 1, 2, 3]
        for ra, rb in zip(a, b):
            assert ra.distance == rb.distance
            assert np.array_equal(ra.genome, rb.genome)

    def test_parallel_workers_match_serial(self):
        arm = ArmConfig.uniform(6)
        task = TargetTask(targets=default_targets()[:3], budget_per_target=300,
                          mode="direct")
        serial = run_target_matching(task, arm, seed=8, workers=1)
        parallel = run_target_matching(task, arm, seed=8, workers=2)
        for a, b in zip(serial, parallel):
            assert a.distance == b.distance
            assert np.array_equal(a.genome, b.genome)

    def test_csv_output(self, tmp_path):
        arm = ArmConfig.uniform(6)
        task = TargetTask(targets=default_targets()[:2], budget_per_target=300,
                          mode="direct")
        results = run_target_matching(task, arm, seed=6)
        path = tmp_path / "targets.csv"
        write_targets_csv(path, results, "direct")
        lines = path.read_text().splitlines()
        assert lines[0] == "target_index,mode,evaluations,distance,joint_variance"
        assert all(line.split(",")[1] == "direct" for line in lines[1:])
        assert len(lines) > 2
