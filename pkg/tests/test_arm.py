import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dde_elites.arm import (ArmConfig, evaluate, evaluate_batch, forward_kinematics,
                            genome_to_angles)

# independent scalar oracle for the fitness example: plain-Python variance
NEG_VAR_0_PI = -(((0 - math.pi / 2) ** 2 + (math.pi - math.pi / 2) ** 2) / 2)
assert abs(NEG_VAR_0_PI - (-2.4674011002723395)) < 1e-15


def arm(n):
    return ArmConfig.uniform(n)


class TestArmConfig:
    def test_lengths_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            ArmConfig(2, np.array([0.5, 0.6]))

    def test_lengths_positive(self):
        with pytest.raises(ValueError, match="positive"):
            ArmConfig(2, np.array([1.5, -0.5]))

    def test_angle_range_ordered(self):
        with pytest.raises(ValueError, match="lower"):
            ArmConfig(1, np.array([1.0]), angle_range=(1.0, -1.0))

    def test_uniform_links(self):
        cfg = arm(4)
        assert np.allclose(cfg.link_lengths, 0.25)
        assert abs(cfg.link_lengths.sum() - 1.0) < 1e-12


class TestGenomeToAngles:
    def test_midpoint_maps_to_zero(self):
        assert np.allclose(genome_to_angles(np.array([0.5, 0.5]), arm(2)), 0.0)

    def test_boundary(self):
        assert np.allclose(genome_to_angles(np.array([0.0]), arm(1)), [-np.pi])

    def test_linear_map(self):
        angles = genome_to_angles(np.array([0.75, 0.25]), arm(2))
        assert np.allclose(angles, [np.pi / 2, -np.pi / 2])

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            genome_to_angles(np.array([0.5, 0.5, 0.5]), arm(2))


class TestForwardKinematics:
    def test_straight_arm_full_reach(self):
        b = forward_kinematics(np.zeros(4), arm(4))
        assert np.allclose(b, [1.0, 0.0])

    def test_single_link_quarter_turn(self):
        b = forward_kinematics(np.array([np.pi / 2]), arm(1))
        assert np.allclose(b, [0.0, 1.0], atol=1e-15)

    def test_two_link_closed_form(self):
        b = forward_kinematics(np.array([np.pi / 2, np.pi / 2]), arm(2))
        assert np.allclose(b, [-0.5, 0.5], atol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            forward_kinematics(np.zeros(3), arm(2))

    @pytest.mark.parametrize("n", [1, 5, 20])
    def test_matches_literal_sum_oracle(self, n):
        # O(n^2) oracle: recompute each heading sum from scratch
        rng = np.random.default_rng(100 + n)
        cfg = arm(n)
        for _ in range(20):
            angles = rng.uniform(-np.pi, np.pi, size=n)
            bx = sum(cfg.link_lengths[k] * math.cos(sum(angles[: k + 1])) for k in range(n))
            by = sum(cfg.link_lengths[k] * math.sin(sum(angles[: k + 1])) for k in range(n))
            assert np.allclose(forward_kinematics(angles, cfg), [bx, by], atol=1e-9)


class TestEvaluate:
    def test_equal_angles_zero_variance(self):
        # genome 0.55 -> all angles equal -> fitness exactly 0
        ev = evaluate(np.full(3, 0.55), arm(3))
        assert ev.fitness == 0.0

    def test_variance_oracle(self):
        # angles [0, pi] from genome [0.5, 1.0]
        ev = evaluate(np.array([0.5, 1.0]), arm(2))
        assert ev.fitness == pytest.approx(NEG_VAR_0_PI, abs=1e-12)

    def test_straight_arm_composition(self):
        ev = evaluate(np.full(20, 0.5), arm(20))
        assert ev.fitness == 0.0
        assert np.allclose(ev.behavior, [1.0, 0.0])

    def test_batch_matches_single(self):
        rng = np.random.default_rng(7)
        cfg = arm(6)
        genomes = rng.uniform(size=(50, 6))
        fit, beh = evaluate_batch(genomes, cfg)
        for i in range(50):
            ev = evaluate(genomes[i], cfg)
            assert fit[i] == pytest.approx(ev.fitness, abs=1e-12)
            assert np.allclose(beh[i], ev.behavior, atol=1e-12)

    def test_batch_shape_check(self):
        with pytest.raises(ValueError, match="shape"):
            evaluate_batch(np.zeros((5, 3)), arm(2))


class TestInvariants:
    def test_rotational_equivariance(self):
        # shifting the first joint rotates the end effector about the origin
        rng = np.random.default_rng(42)
        cfg = arm(8)
        for _ in range(100):
            angles = rng.uniform(-np.pi, np.pi, size=8)
            delta = rng.uniform(-np.pi, np.pi)
            shifted = angles.copy()
            shifted[0] += delta
            r0 = np.linalg.norm(forward_kinematics(angles, cfg))
            r1 = np.linalg.norm(forward_kinematics(shifted, cfg))
            assert abs(r0 - r1) < 1e-9

    def test_fitness_nonpositive_and_reach_bound(self):
        rng = np.random.default_rng(3)
        cfg = arm(12)
        genomes = rng.uniform(size=(1000, 12))
        fit, beh = evaluate_batch(genomes, cfg)
        assert np.all(fit <= 0.0)
        assert np.all(np.linalg.norm(beh, axis=1) <= 1.0 + 1e-9)

    def test_zero_fitness_only_for_equal_angles(self):
        rng = np.random.default_rng(4)
        cfg = arm(5)
        for _ in range(1000):
            g = rng.uniform(size=5)
            ev = evaluate(g, cfg)
            angles = genome_to_angles(g, cfg)
            if ev.fitness == 0.0:
                assert np.all(np.abs(angles - angles[0]) < 1e-12)
            if np.any(np.abs(angles - angles[0]) > 1e-6):
                assert ev.fitness < 0.0

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=30))
    def test_fitness_nonpositive_property(self, genes):
        cfg = arm(len(genes))
        ev = evaluate(np.array(genes), cfg)
        assert ev.fitness <= 0.0
        assert np.linalg.norm(ev.behavior) <= 1.0 + 1e-9
