import numpy as np
import pytest

from tvconsensus import (
    AdmmEngine,
    AgentRoles,
    Graph,
    SizeCapError,
    StopRule,
    UnsupportedGraphError,
    ac_critical_lambda,
    aggregate_absolute,
    aggregate_quadratic,
    certify_consensus_minimizer,
    complete_graph,
    cycle_graph,
    dual_norm_bruteforce,
    mc_lambda0_exact,
    mc_lambda0_upper,
    path_graph,
    run,
    stubborn_limit,
    tv_norm,
)

from conftest import random_connected_graph

INF = float("inf")


def grid_consensus_minimum(objs, x0):
    """Independent 1-D search for the best consensus state."""
    lo, hi = x0.min() - 1.0, x0.max() + 1.0
    grid = np.arange(lo, hi + 1e-12, 1e-4)
    values = np.array([objs.value(np.full(len(x0), c)) for c in grid])
    return float(grid[int(np.argmin(values))])


class TestCertify:
    def test_average_certified_above_critical(self, rng):
        g = complete_graph(6)
        x0 = rng.normal(size=6)
        crit = ac_critical_lambda(g, x0)
        objs = aggregate_quadratic(g, x0)
        cert = certify_consensus_minimizer(g, objs, float(x0.mean()), 1.2 * crit)
        assert cert.verdict == "certified"
        assert abs(cert.mean_u) <= 1e-12
        assert cert.dual_gap <= 1e-9

    def test_average_violated_below_critical(self, rng):
        g = complete_graph(6)
        x0 = rng.normal(size=6)
        crit = ac_critical_lambda(g, x0)
        objs = aggregate_quadratic(g, x0)
        cert = certify_consensus_minimizer(g, objs, float(x0.mean()), 0.5 * crit)
        assert cert.verdict == "violated"
        assert cert.dual_gap > 0.0

    def test_single_edge_example(self):
        g = Graph(2, [(0, 1)])
        objs = aggregate_quadratic(g, np.array([0.0, 2.0]))
        cert = certify_consensus_minimizer(g, objs, 1.0, 1.0)
        assert cert.verdict == "certified"
        assert np.allclose(cert.u, [1.0, -1.0], atol=1e-12)

    def test_wrong_candidate_violated(self, rng):
        g = complete_graph(5)
        x0 = rng.normal(size=5)
        objs = aggregate_quadratic(g, x0)
        lam = 2.0 * ac_critical_lambda(g, x0)
        cert = certify_consensus_minimizer(g, objs, float(x0.mean()) + 0.5, lam)
        assert cert.verdict == "violated"

    def test_median_certified_for_absolute_objectives(self, rng):
        g = complete_graph(7)
        x0 = rng.normal(size=7)
        objs = aggregate_absolute(g, x0)
        lam = 0.5  # far above the worst-case pattern level for K7
        cert = certify_consensus_minimizer(g, objs, float(np.median(x0)), lam)
        assert cert.verdict == "certified"

    def test_certified_candidate_matches_grid_and_engine(self, rng):
        for _ in range(5):
            g = random_connected_graph(rng, n_max=7)
            x0 = rng.normal(size=g.n_vertices)
            objs = aggregate_quadratic(g, x0)
            crit = ac_critical_lambda(g, x0)
            lam = 1.3 * max(crit, 1e-3)
            cert = certify_consensus_minimizer(g, objs, float(x0.mean()), lam)
            assert cert.verdict == "certified"
            grid_best = grid_consensus_minimum(objs, x0)
            assert abs(grid_best - cert.x_star) <= 1e-4
            traj = run(
                AdmmEngine(lam, 1.0), g, x0, objs, AgentRoles.none(g.n_vertices),
                stop=StopRule(200_000, INF, 1e-13), record_every=10**9,
            )
            assert np.abs(traj.final_x - cert.x_star).max() <= 1e-4

    def test_violated_candidate_does_not_minimize(self, rng):
        g = complete_graph(6)
        x0 = rng.normal(size=6)
        objs = aggregate_quadratic(g, x0)
        crit = ac_critical_lambda(g, x0)
        lam = 0.3 * crit
        cert = certify_consensus_minimizer(g, objs, float(x0.mean()), lam)
        assert cert.verdict == "violated"
        traj = run(
            AdmmEngine(lam, 1.0), g, x0, objs, AgentRoles.none(6),
            stop=StopRule(200_000, INF, 1e-13), record_every=10**9,
        )
        candidate_energy = objs.value(np.full(6, x0.mean())) + lam * tv_norm(
            g, np.full(6, x0.mean())
        )
        limit_energy = objs.value(traj.final_x) + lam * tv_norm(g, traj.final_x)
        assert limit_energy < candidate_energy - 1e-9

    def test_disconnected_rejected(self):
        g = Graph(4, [(0, 1), (2, 3)])
        objs = aggregate_quadratic(g, np.zeros(4))
        with pytest.raises(UnsupportedGraphError):
            certify_consensus_minimizer(g, objs, 0.0, 1.0)


class TestCriticalLambda:
    def test_constant_data_needs_no_regularization(self):
        g = complete_graph(5)
        assert ac_critical_lambda(g, 3.0 * np.ones(5)) == 0.0

    def test_single_edge(self):
        g = Graph(2, [(0, 1)])
        assert np.isclose(ac_critical_lambda(g, np.array([0.0, 2.0])), 1.0, atol=1e-12)

    def test_matches_enumeration(self, rng):
        for _ in range(10):
            g = random_connected_graph(rng, n_max=9)
            x0 = rng.normal(size=g.n_vertices)
            fast = ac_critical_lambda(g, x0)
            slow = dual_norm_bruteforce(g, x0 - x0.mean()).value
            assert abs(fast - slow) <= 1e-9


class TestMedianLevel:
    def test_k3_exact(self):
        assert np.isclose(mc_lambda0_exact(complete_graph(3)), 0.5, atol=1e-12)

    def test_two_vertex_path_exact(self):
        assert np.isclose(mc_lambda0_exact(path_graph(2)), 1.0, atol=1e-12)

    def test_k99_closed_form_bound(self):
        assert np.isclose(mc_lambda0_upper(complete_graph(99)), 99.0 / 196.0, atol=1e-15)

    def test_k99_exact_via_symmetry(self):
        # One representative placement suffices on a complete graph.
        assert np.isclose(mc_lambda0_exact(complete_graph(99)), 1.0 / 50.0, atol=1e-12)

    def test_upper_bound_dominates_exact_on_complete_graphs(self):
        for n in (3, 5, 8, 11):
            g = complete_graph(n)
            assert mc_lambda0_exact(g) <= mc_lambda0_upper(g) + 1e-12

    def test_enumeration_on_cycle(self):
        g = cycle_graph(5)
        # patterns (-1,-1,0,1,1): exhaustive answer computed by this call
        value = mc_lambda0_exact(g)
        # worst case pairs each sign class contiguously: two boundary edges
        # per side, ratio 2/2 = 1.0
        assert np.isclose(value, 1.0, atol=1e-12)

    def test_bound_requires_complete(self):
        with pytest.raises(UnsupportedGraphError):
            mc_lambda0_upper(path_graph(4))

    def test_even_n_limit_lands_in_median_interval(self, rng):
        # With an even vertex count any point between the two central data
        # values is a minimizer; the engine must settle inside that interval.
        g = complete_graph(8)
        x0 = rng.uniform(0.0, 1.0, 8)
        lam = 2.0 * mc_lambda0_exact(g)
        traj = run(
            AdmmEngine(lam, 1.0), g, x0, aggregate_absolute(g, x0),
            AgentRoles.none(8),
            stop=StopRule(300_000, INF, 1e-12), record_every=10**9,
        )
        lo, hi = np.sort(x0)[3], np.sort(x0)[4]
        assert traj.final_x.max() - traj.final_x.min() <= 1e-5
        value = float(traj.final_x.mean())
        assert lo - 1e-5 <= value <= hi + 1e-5

    def test_enumeration_cap(self):
        with pytest.raises(SizeCapError):
            mc_lambda0_exact(cycle_graph(14))


class TestStubbornLimit:
    def test_reported_three_cases(self):
        # x0 mean 0.1284, lam 0.05, one pinned agent
        x0r = np.array([0.1284] * 4)
        high = stubborn_limit(x0r, 10.0, 0.05, 1)
        mid = stubborn_limit(x0r, 0.16, 0.05, 1)
        low = stubborn_limit(x0r, -10.0, 0.05, 1)
        assert np.isclose(high.x_star, 0.1784, atol=1e-12)
        assert high.case == "clipped_high"
        assert np.isclose(mid.x_star, 0.16, atol=1e-12)
        assert mid.case == "pulled_to_a"
        assert np.isclose(low.x_star, 0.0784, atol=1e-12)
        assert low.case == "clipped_low"

    def test_boundary_belongs_to_anchor_case(self):
        x0r = np.zeros(3)
        pred = stubborn_limit(x0r, 0.1, 0.05, 2)  # |mean - a| == margin
        assert pred.case == "pulled_to_a"
        assert pred.x_star == 0.1

    def test_prediction_within_margin(self, rng):
        for _ in range(200):
            x0r = rng.normal(size=5)
            lam = float(rng.uniform(0.01, 1.0))
            s = int(rng.integers(1, 4))
            a = float(rng.uniform(-1000.0, 1000.0))
            pred = stubborn_limit(x0r, a, lam, s)
            assert abs(pred.x_star - x0r.mean()) <= lam * s + 1e-6

    def test_lambda_precondition_check(self, rng):
        g = complete_graph(6)
        x0r = rng.uniform(0.0, 1.0, 6)
        crit = ac_critical_lambda(g, x0r)
        ok = stubborn_limit(x0r, 5.0, 2.0 * crit, 1, graph_regular=g)
        bad = stubborn_limit(x0r, 5.0, 0.5 * crit, 1, graph_regular=g)
        unchecked = stubborn_limit(x0r, 5.0, 2.0 * crit, 1)
        assert ok.lambda_ok is True
        assert bad.lambda_ok is False
        assert unchecked.lambda_ok is None

    def test_cross_validated_by_admm_all_three_cases(self, rng):
        n_reg = 12
        g = complete_graph(n_reg + 1)  # pinned vertex wired to everyone
        gr = complete_graph(n_reg)
        x0r = rng.uniform(0.0, 1.0, n_reg)
        lam = max(2.0 * ac_critical_lambda(gr, x0r), 0.05)
        mean_r = x0r.mean()
        for a in (mean_r + 20.0, mean_r + 0.5 * lam, mean_r - 20.0):
            pred = stubborn_limit(x0r, a, lam, 1, graph_regular=gr)
            assert pred.lambda_ok
            x0 = np.concatenate([x0r, [a]])
            roles = AgentRoles.from_pinned(n_reg + 1, {n_reg: a})
            objs = aggregate_quadratic(g, x0)
            traj = run(
                AdmmEngine(lam, 1.0), g, x0, objs, roles,
                stop=StopRule(300_000, INF, 1e-13), record_every=10**9,
            )
            achieved = traj.final_x[:n_reg]
            assert np.abs(achieved - pred.x_star).max() <= 1e-4
            assert abs(achieved.mean() - mean_r) <= lam * 1 + 1e-6

    def test_input_validation(self):
        with pytest.raises(ValueError):
            stubborn_limit(np.array([]), 1.0, 0.1, 1)
        with pytest.raises(ValueError):
            stubborn_limit(np.ones(3), 1.0, -0.1, 1)
        with pytest.raises(ValueError):
            stubborn_limit(np.ones(3), 1.0, 0.1, 0)
