from dataclasses import replace

import numpy as np
import pytest

from swarmdeform.continuum import (
    HomogeneousTransform,
    build_weight_table,
    communication_weights,
    solve_transform,
    validate_scenario_structure,
)
from swarmdeform.geometry import DegenerateSimplexError
from swarmdeform.scenario import ScenarioError, scenario_from_dict

from helpers import triangle_scenario


class TestHomogeneousTransform:
    def test_identity(self):
        h = HomogeneousTransform.identity(2)
        assert np.array_equal(h.apply([3.0, -1.0]), [3.0, -1.0])
        assert h.dim == 2

    def test_apply(self):
        h = HomogeneousTransform([[2.0, 0.0], [0.0, 3.0]], [1.0, -1.0])
        assert np.allclose(h.apply([1.0, 1.0]), [3.0, 2.0])

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            HomogeneousTransform(np.eye(2), np.zeros(3))
        with pytest.raises(ValueError):
            HomogeneousTransform(np.ones((2, 3)), np.zeros(2))


class TestSolveTransform:
    def test_identity_recovered(self):
        ref = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
        h = solve_transform(ref, ref, t=1.5)
        assert np.allclose(h.jacobian, np.eye(2), atol=1e-12)
        assert np.allclose(h.translation, 0.0, atol=1e-12)
        assert h.t == 1.5

    def test_round_trip_random_maps(self):
        """Apply a known invertible affine map to the leaders, then recover it."""
        rng = np.random.default_rng(13)
        for _ in range(300):
            d = int(rng.integers(2, 4))
            ref = _spanning_leaders(rng, d)
            q = _invertible(rng, d)
            b = rng.uniform(-5, 5, d)
            now = ref @ q.T + b
            h = solve_transform(ref, now)
            assert np.allclose(h.jacobian, q, atol=1e-9)
            assert np.allclose(h.translation, b, atol=1e-9)

    def test_matches_stacked_kronecker_oracle(self):
        """Oracle: solve the vectorized normal system (I_d kron [P0 1]) theta = vec(P1)
        built explicitly with np.kron, one unknown block per output coordinate."""
        rng = np.random.default_rng(29)
        for _ in range(100):
            d = int(rng.integers(2, 4))
            ref = _spanning_leaders(rng, d)
            now = ref @ _invertible(rng, d).T + rng.uniform(-3, 3, d)
            a = np.hstack([ref, np.ones((d + 1, 1))])
            big = np.kron(np.eye(d), a)
            theta = np.linalg.solve(big, now.T.reshape(-1))
            blocks = theta.reshape(d, d + 1)
            q_oracle = blocks[:, :d]
            b_oracle = blocks[:, d]
            h = solve_transform(ref, now)
            assert np.allclose(h.jacobian, q_oracle, atol=1e-9)
            assert np.allclose(h.translation, b_oracle, atol=1e-9)

    def test_degenerate_reference_rejected(self):
        ref = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        with pytest.raises(DegenerateSimplexError):
            solve_transform(ref, ref)

    def test_collapsed_current_rejected(self):
        """Current leaders falling on a line force det(Q) to zero."""
        ref = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
        now = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        with pytest.raises(DegenerateSimplexError):
            solve_transform(ref, now)

    def test_shape_mismatch(self):
        ref = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]])
        with pytest.raises(ValueError):
            solve_transform(ref, ref[:2])
        with pytest.raises(ValueError):
            solve_transform(ref[:2], ref[:2])

    def test_follower_desired_position_is_affine_image(self):
        ref = np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]])
        q = np.array([[0.5, -0.1], [0.2, 0.7]])
        b = np.array([3.0, -2.0])
        h = solve_transform(ref, ref @ q.T + b)
        p0 = np.array([2.0, 2.0])
        assert np.allclose(h.apply(p0), q @ p0 + b, atol=1e-9)


class TestCommunicationWeights:
    def test_centroid_gets_equal_weights(self):
        nbrs = [[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]]
        w = communication_weights(nbrs, [2.0, 2.0])
        assert np.allclose(w, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)

    def test_weights_reconstruct_follower(self):
        rng = np.random.default_rng(37)
        for _ in range(200):
            d = int(rng.integers(2, 4))
            nbrs = _spanning_leaders(rng, d)
            alpha = rng.dirichlet(np.full(d + 1, 3.0))
            if np.min(alpha) < 1e-3:
                continue
            p = nbrs.T @ alpha
            w = communication_weights(nbrs, p)
            assert np.allclose(w, alpha, atol=1e-8)
            assert abs(w.sum() - 1.0) <= 1e-9
            assert np.all(w > 0)

    def test_outside_neighbor_simplex_rejected(self):
        nbrs = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(ValueError):
            communication_weights(nbrs, [2.0, 2.0])

    def test_boundary_point_rejected(self):
        nbrs = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(ValueError):
            communication_weights(nbrs, [0.5, 0.0])

    def test_degenerate_neighbors_rejected(self):
        with pytest.raises(DegenerateSimplexError):
            communication_weights([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], [1.0, 1.0])


class TestScenarioStructure:
    def test_valid_scenario_has_no_problems(self):
        assert validate_scenario_structure(triangle_scenario()) == []

    def test_follower_outside_leading_simplex(self):
        scn = triangle_scenario(follower_pos=(7.0, 7.0))
        problems = validate_scenario_structure(scn)
        assert any("strictly inside the leading simplex" in p for p in problems)

    def test_follower_on_boundary(self):
        scn = triangle_scenario(follower_pos=(3.0, 0.0))
        problems = validate_scenario_structure(scn)
        assert any("leading simplex" in p for p in problems)

    def test_stored_weight_mismatch(self):
        scn = _raw_triangle_dict()
        scn["followers"][0]["weights"] = [0.5, 0.25, 0.25]
        problems = validate_scenario_structure(scenario_from_dict(scn))
        assert any("disagree" in p for p in problems)

    def test_stored_weight_match_accepted(self):
        scn = _raw_triangle_dict()
        scn["followers"][0]["weights"] = [1 / 3, 1 / 3, 1 / 3]
        assert validate_scenario_structure(scenario_from_dict(scn)) == []

    def test_wrong_neighbor_count_rejected_at_schema(self):
        scn = _raw_triangle_dict()
        scn["followers"][0]["neighbors"] = [1, 2]
        with pytest.raises(ScenarioError):
            scenario_from_dict(scn)

    def test_wrong_neighbor_count_structural(self):
        scn = triangle_scenario()
        bad = replace(scn, followers=(replace(scn.followers[0], neighbors=(1, 2)),))
        problems = validate_scenario_structure(bad)
        assert any("in-neighbors" in p for p in problems)

    def test_build_weight_table(self):
        table = build_weight_table(triangle_scenario())
        assert table.follower_ids() == [4]
        assert table.neighbors[4] == (1, 2, 3)
        assert np.allclose(table.weights[4], [1 / 3, 1 / 3, 1 / 3], atol=1e-12)


def _raw_triangle_dict():
    return {
        "schema": 1,
        "dimension": 2,
        "agents": [
            {"id": 1, "position": [0.0, 0.0]},
            {"id": 2, "position": [6.0, 0.0]},
            {"id": 3, "position": [0.0, 6.0]},
            {"id": 4, "position": [2.0, 2.0]},
        ],
        "leaders": [1, 2, 3],
        "followers": [{"id": 4, "neighbors": [1, 2, 3]}],
        "leader_waypoints": {
            "1": [[0.0, [0.0, 0.0]]],
            "2": [[0.0, [6.0, 0.0]]],
            "3": [[0.0, [0.0, 6.0]]],
        },
        "margins": {"deviation_bound": 0.2, "clearance": 0.25, "agent_radius": 0.05},
        "sim": {"h": 0.01, "t0": 0.0, "tf": 6.0},
    }


def _spanning_leaders(rng, d):
    # keep the homogeneous system well conditioned so 1e-9 recovery holds
    while True:
        pts = rng.uniform(-4, 4, (d + 1, d))
        a = np.hstack([pts, np.ones((d + 1, 1))])
        if np.linalg.cond(a) <= 1e3:
            return pts


def _invertible(rng, d):
    while True:
        q = rng.uniform(-2, 2, (d, d))
        if abs(np.linalg.det(q)) > 1e-2:
            return q
