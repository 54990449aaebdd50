import numpy as np
import pytest

from swarmdeform.conditions import PSI_NAMES, build_conditions, build_psi
from swarmdeform.dynamics import simulate
from swarmdeform.formula_text import formula_to_text, parse_formula
from swarmdeform.ltl import satisfies
from swarmdeform.scenario import scenario_from_dict, scenario_to_dict

from helpers import triangle_scenario


def _equilibrium_trace(**kwargs):
    return simulate(triangle_scenario(**kwargs), tf=2.0)


class TestBuilders:
    def test_names_and_unknown(self):
        assert PSI_NAMES == tuple(f"psi{i}" for i in range(1, 9))
        with pytest.raises(ValueError):
            build_psi(triangle_scenario(), 9)
        with pytest.raises(ValueError):
            build_conditions(triangle_scenario(), names=["psi0"])

    def test_formulas_print_and_reparse(self):
        scn = triangle_scenario()
        for name, phi in build_conditions(scn).items():
            text = formula_to_text(phi)
            assert parse_formula(text) == phi, name

    def test_missing_motion_space(self):
        data = scenario_to_dict(triangle_scenario())
        data["motion_space"] = []
        scn = scenario_from_dict(data)
        with pytest.raises(ValueError):
            build_psi(scn, 4)
        with pytest.raises(ValueError):
            build_psi(scn, 7)

    def test_missing_final_positions(self):
        data = scenario_to_dict(triangle_scenario())
        data["final_positions"] = {}
        scn = scenario_from_dict(data)
        with pytest.raises(ValueError):
            build_psi(scn, 6)


class TestSatisfactionAtEquilibrium:
    def test_all_conditions_hold(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=2.0)
        for name, phi in build_conditions(scn).items():
            assert satisfies(phi, trace).satisfied, name


class TestTracking:
    def test_violated_when_bound_shrinks_to_zero(self):
        """With the bound inflated away, even round-off deviation fails;
        an exact-zero bound still passes an exactly-on-target trace."""
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        phi = build_psi(scn, 1, margin_inflate=scn.margins.deviation_bound)
        # bound is exactly zero; equilibrium deviations are ~1e-15 but nonzero
        verdict = satisfies(phi, trace)
        assert verdict.satisfied == bool(trace.deviations().max() == 0.0)

    def test_deviation_bound_is_squared_euclidean(self):
        """A trace pushed exactly 0.3 off target in x fails a 0.2 bound and
        passes a 0.4 bound."""
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        shifted = _shift_agent(trace, agent=4, delta=(0.3, 0.0))
        assert not satisfies(build_psi(scn, 1), shifted).satisfied
        loose = triangle_scenario(deviation_bound=0.4)
        assert satisfies(build_psi(loose, 1), shifted).satisfied

    def test_margin_inflate_tightens(self):
        scn = triangle_scenario(deviation_bound=0.4)
        trace = _shift_agent(simulate(scn, tf=1.0), agent=4, delta=(0.3, 0.0))
        assert satisfies(build_psi(scn, 1), trace).satisfied
        assert not satisfies(build_psi(scn, 1, margin_inflate=0.15), trace).satisfied


class TestContainment:
    def test_follower_outside_detected(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        # push the follower across the x-axis edge of the leader triangle
        shifted = _shift_agent(trace, agent=4, delta=(0.0, -2.5), shift_omega=True)
        assert not satisfies(build_psi(scn, 2), shifted).satisfied
        assert satisfies(build_psi(scn, 2), trace).satisfied

    def test_strict_mode_rejects_boundary(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        on_edge = _shift_agent(trace, agent=4, delta=(0.0, -2.0), shift_omega=True)
        # follower now sits exactly on the leader-triangle edge (omega = 0)
        assert satisfies(build_psi(scn, 2), on_edge).satisfied
        assert not satisfies(build_psi(scn, 2, strict_containment=True), on_edge).satisfied

    def test_margin_inflate_requires_interior_slack(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        # centroid follower has omega exactly 1/3 per vertex
        assert satisfies(build_psi(scn, 2, margin_inflate=0.3), trace).satisfied
        assert not satisfies(build_psi(scn, 2, margin_inflate=0.34), trace).satisfied


class TestSeparation:
    def test_two_radii_threshold(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        assert satisfies(build_psi(scn, 3), trace).satisfied
        # follower at (0.3, 0.3): 0.424 from leader 1, under two radii
        near = _shift_agent(trace, agent=4, delta=(-1.7, -1.7))
        assert not satisfies(build_psi(scn, 3), near).satisfied
        # follower at (0.4, 0.4): 0.566 away, clear of the threshold
        clear = _shift_agent(trace, agent=4, delta=(-1.6, -1.6))
        assert satisfies(build_psi(scn, 3), clear).satisfied


class TestStaticCells:
    def test_motion_space_violation(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        outside = _shift_agent(trace, agent=4, delta=(0.0, 30.0))
        assert not satisfies(build_psi(scn, 4), outside).satisfied
        assert satisfies(build_psi(scn, 4), trace).satisfied

    def test_obstacle_entry_detected(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        # obstacle triangle sits at x in [15, 17], y in [-6, -4]
        inside_obstacle = _shift_agent(trace, agent=4, delta=(14.0, -7.0))
        assert not satisfies(build_psi(scn, 5), inside_obstacle).satisfied
        assert satisfies(build_psi(scn, 5), trace).satisfied

    def test_obstacle_margin_inflate_catches_grazing(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        # just outside the obstacle edge y = -6: allowed closed, but a
        # positive margin treats the inflated cell as occupied
        grazing = _shift_agent(trace, agent=4, delta=(14.0, -8.05))
        assert satisfies(build_psi(scn, 5), grazing).satisfied
        assert not satisfies(build_psi(scn, 5, margin_inflate=0.2), grazing).satisfied

    def test_leader_only_variants_ignore_followers(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        outside = _shift_agent(trace, agent=4, delta=(0.0, 30.0))
        assert not satisfies(build_psi(scn, 4), outside).satisfied
        assert satisfies(build_psi(scn, 7), outside).satisfied
        in_obstacle = _shift_agent(trace, agent=4, delta=(14.0, -7.0))
        assert not satisfies(build_psi(scn, 5), in_obstacle).satisfied
        assert satisfies(build_psi(scn, 8), in_obstacle).satisfied

    def test_leader_violations_hit_both(self):
        scn = triangle_scenario()
        trace = simulate(scn, tf=1.0)
        leader_out = _shift_agent(trace, agent=2, delta=(0.0, 30.0))
        assert not satisfies(build_psi(scn, 7), leader_out).satisfied
        leader_in_obstacle = _shift_agent(trace, agent=2, delta=(10.0, -5.0))
        assert not satisfies(build_psi(scn, 8), leader_in_obstacle).satisfied


class TestLiveness:
    def test_settled_run_satisfies(self):
        scn = triangle_scenario(moving=True, tf=40.0)
        trace = simulate(scn)
        assert satisfies(build_psi(scn, 6), trace).satisfied

    def test_unsettled_run_fails(self):
        """Cutting the run off mid-flight leaves agents short of their
        final positions."""
        scn = triangle_scenario(moving=True, tf=40.0)
        trace = simulate(scn, tf=10.0)
        assert not satisfies(build_psi(scn, 6), trace).satisfied

    def test_margin_inflate_leaves_liveness_untouched(self):
        scn = triangle_scenario(moving=True, tf=40.0)
        trace = simulate(scn)
        assert satisfies(build_psi(scn, 6, margin_inflate=0.04), trace).satisfied


def _shift_agent(trace, agent: int, delta, shift_omega: bool = False):
    """Copy of a trace with one agent's actual positions displaced.

    When the trace carries containment channels and shift_omega is set they
    are recomputed for the displaced positions against the (static) leader
    triangle of the helper scenario.
    """
    from dataclasses import replace as dc_replace

    positions = trace.positions.copy()
    positions[:, trace.row_of(agent), :] += np.asarray(delta, dtype=float)
    omegas = trace.omegas
    if shift_omega and omegas is not None:
        return dc_replace(trace, positions=positions).with_derived()
    return dc_replace(trace, positions=positions)
