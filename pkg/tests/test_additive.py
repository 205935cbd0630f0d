"""Additive model: likelihood values, gradient, and the constrained solver."""

import math

import numpy as np
import pytest

import hazardnet as hn
from conftest import additive_instance, random_additive_network

EXP = hn.ShapingFunction(hn.EXPONENTIAL)


def naive_loglik(params, shaping, cascade, num_nodes, window):
    """Straight-from-the-formula reimplementation with plain Python loops."""

    def gamma(tj, t):
        if t <= tj:
            return 0.0
        if shaping.variant == hn.EXPONENTIAL:
            return 1.0
        if shaping.variant == hn.RAYLEIGH:
            return t - tj
        return 1.0 / (t - tj) if t >= tj + shaping.delta else 0.0

    def big_gamma(tj, t):
        if t <= tj:
            return 0.0
        if shaping.variant == hn.EXPONENTIAL:
            return t - tj
        if shaping.variant == hn.RAYLEIGH:
            return (t - tj) ** 2 / 2.0
        return math.log((t - tj) / shaping.delta) if t >= tj + shaping.delta else 0.0

    events = cascade.events()
    infected = {n: t for n, t in events}
    total = 0.0
    for idx, (i, ti) in enumerate(events):
        if idx > 0:
            rate = sum(params[j][i] * gamma(tj, ti) for j, tj in events if tj < ti)
            if rate <= 0.0:
                return -math.inf
            total += math.log(rate)
        for k, tk in events:
            if tk < ti:
                total -= params[k][i] * big_gamma(tk, ti)
    for n in range(num_nodes):
        if n in infected:
            continue
        for m, tm in events:
            total -= params[m][n] * big_gamma(tm, window)
    return total


def two_node_net(alpha):
    params = np.zeros((2, 2))
    params[0, 1] = alpha
    return hn.Network(params, hn.ADDITIVE)


class TestCascadeLoglik:
    def test_two_node_hand_computation(self):
        net = two_node_net(1.0)
        c = hn.Cascade.from_events([(0, 0.0), (1, 1.0)])
        assert hn.additive_cascade_loglik(net, EXP, c, 2.0) == pytest.approx(-1.0)

    def test_survival_term_only(self):
        net = two_node_net(1.0)
        c = hn.Cascade.from_events([(0, 0.0)])
        assert hn.additive_cascade_loglik(net, EXP, c, 2.0) == pytest.approx(-2.0)

    def test_unexplainable_infection_is_minus_infinity(self):
        net = two_node_net(0.0)
        c = hn.Cascade.from_events([(0, 0.0), (1, 1.0)])
        assert hn.additive_cascade_loglik(net, EXP, c, 2.0) == -math.inf

    def test_matches_naive_reimplementation(self):
        for seed in range(5):
            for variant in hn.SHAPING_VARIANTS:
                net, shaping, cs = additive_instance(seed, variant=variant)
                got = hn.additive_set_loglik(net, shaping, cs)
                want = sum(
                    naive_loglik(net.params.tolist(), shaping, c, cs.num_nodes, cs.window)
                    for c in cs
                )
                assert got == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_invariant_to_cascade_order(self):
        net, shaping, cs = additive_instance(3)
        reordered = hn.CascadeSet(cs.num_nodes, cs.window, tuple(reversed(cs.cascades)))
        assert hn.additive_set_loglik(net, shaping, cs) == pytest.approx(
            hn.additive_set_loglik(net, shaping, reordered)
        )

    def test_invariant_to_node_relabeling(self):
        net, shaping, cs = additive_instance(7)
        n = cs.num_nodes
        perm = np.random.default_rng(1).permutation(n)
        relabeled_net = hn.Network(net.params[np.ix_(perm, perm)], hn.ADDITIVE)
        inverse = np.argsort(perm)
        relabeled = hn.CascadeSet(
            n,
            cs.window,
            tuple(hn.Cascade(inverse[c.nodes], c.times) for c in cs),
        )
        assert hn.additive_set_loglik(relabeled_net, shaping, relabeled) == pytest.approx(
            hn.additive_set_loglik(net, shaping, cs), rel=1e-12
        )


class TestSetLoglik:
    def test_empty_set_is_zero(self):
        net = two_node_net(1.0)
        cs = hn.CascadeSet(2, 2.0, ())
        assert hn.additive_set_loglik(net, EXP, cs) == 0.0

    def test_duplicated_cascade_doubles(self):
        net = two_node_net(1.0)
        c = hn.Cascade.from_events([(0, 0.0), (1, 1.0)])
        one = hn.CascadeSet(2, 2.0, (c,))
        two = hn.CascadeSet(2, 2.0, (c, c))
        assert hn.additive_set_loglik(net, EXP, two) == pytest.approx(
            2 * hn.additive_set_loglik(net, EXP, one)
        )


class TestConvexity:
    def test_objective_convex_along_segments(self):
        rng = np.random.default_rng(12)
        _, shaping, cs = additive_instance(12)
        n = cs.num_nodes
        for _ in range(6):
            a1 = random_additive_network(rng, n)
            a2 = random_additive_network(rng, n)
            lam = float(rng.uniform(0.1, 0.9))
            mid = hn.Network(lam * a1.params + (1 - lam) * a2.params, hn.ADDITIVE)
            nll = lambda net: -hn.additive_set_loglik(net, shaping, cs)
            assert nll(mid) <= lam * nll(a1) + (1 - lam) * nll(a2) + 1e-9


class TestGradient:
    @pytest.mark.parametrize("variant", hn.SHAPING_VARIANTS)
    def test_matches_central_finite_differences(self, variant):
        _, shaping, cs = additive_instance(21, variant=variant)
        # evaluate at a strictly positive point so +/- h stays feasible
        params = np.random.default_rng(5).uniform(0.1, 1.0, size=(cs.num_nodes,) * 2)
        np.fill_diagonal(params, 0.0)
        net = hn.Network(params, hn.ADDITIVE)
        grad = hn.additive_gradient(net, shaping, cs)
        h = 1e-6
        n = cs.num_nodes
        for j in range(n):
            for i in range(n):
                if i == j:
                    assert grad[j, i] == 0.0
                    continue
                up, dn = np.array(net.params), np.array(net.params)
                up[j, i] += h
                dn[j, i] -= h
                fd = (
                    hn.additive_set_loglik(hn.Network(up, hn.ADDITIVE), shaping, cs)
                    - hn.additive_set_loglik(hn.Network(dn, hn.ADDITIVE), shaping, cs)
                ) / (2 * h)
                rel = abs(fd - grad[j, i]) / max(abs(fd), abs(grad[j, i]), 1.0)
                assert rel < 1e-5

    def test_survival_only_entries_are_exact(self):
        # node 2 never infected: d loglik / d alpha_{0,2} = -G(t_0, T) summed
        params = np.zeros((3, 3))
        params[0, 1] = 0.7
        net = hn.Network(params, hn.ADDITIVE)
        c = hn.Cascade.from_events([(0, 0.0), (1, 0.5)])
        cs = hn.CascadeSet(3, 2.0, (c, c))
        grad = hn.additive_gradient(net, EXP, cs)
        assert grad[0, 2] == pytest.approx(-2 * EXP.cumulative(0.0, 2.0))
        assert grad[1, 2] == pytest.approx(-2 * EXP.cumulative(0.5, 2.0))

    def test_rejects_zero_hazard_infection(self):
        net = two_node_net(0.0)
        c = hn.Cascade.from_events([(0, 0.0), (1, 1.0)])
        cs = hn.CascadeSet(2, 2.0, (c,))
        with pytest.raises(ValueError, match="zero hazard"):
            hn.additive_gradient(net, EXP, cs)


class TestFactorizedRoute:
    def test_identity_on_random_instances(self):
        for seed in range(6):
            net, shaping, cs = additive_instance(seed + 50, n_nodes=7, n_cascades=12)
            for c in cs:
                a, b = hn.loglik_factorization_pair(net, shaping, c, cs.window)
                assert abs(a - b) <= 1e-10

    def test_single_parent_closed_form(self):
        alpha = 0.6
        net = two_node_net(alpha)
        c = hn.Cascade.from_events([(0, 0.0), (1, 1.2)])
        expected = math.log(alpha * EXP.hazard(0.0, 1.2)) - alpha * EXP.cumulative(0.0, 1.2)
        a, b = hn.loglik_factorization_pair(net, EXP, c, 2.0)
        assert a == pytest.approx(expected)
        assert b == pytest.approx(expected)


class TestInference:
    def test_recovers_two_node_rate(self):
        true = two_node_net(0.8)
        cs = hn.simulate_set(true, EXP, 5000, 2.0, rng_seed=11)
        result = hn.infer_additive(cs, hn.AdditiveConfig(shaping=EXP))
        assert result.converged
        assert 0.7 <= result.network.params[0, 1] <= 0.9

    def test_deterministic(self):
        _, shaping, cs = additive_instance(33, n_nodes=6, n_cascades=40)
        cfg = hn.AdditiveConfig(shaping=shaping)
        a = hn.infer_additive(cs, cfg)
        b = hn.infer_additive(cs, cfg)
        np.testing.assert_array_equal(a.network.params, b.network.params)
        np.testing.assert_array_equal(a.objective_trace, b.objective_trace)

    def test_workers_do_not_change_the_result(self):
        _, shaping, cs = additive_instance(34, n_nodes=6, n_cascades=40)
        cfg = hn.AdditiveConfig(shaping=shaping)
        seq = hn.infer_additive(cs, cfg, workers=1)
        par = hn.infer_additive(cs, cfg, workers=3)
        np.testing.assert_array_equal(seq.network.params, par.network.params)

    def test_random_restarts_reach_same_objective(self):
        _, shaping, cs = additive_instance(35, n_nodes=6, n_cascades=60)
        cfg = hn.AdditiveConfig(shaping=shaping, tol=1e-12, max_iters=20000)
        rng = np.random.default_rng(0)
        objectives = []
        for _ in range(3):
            init = rng.uniform(0.01, 0.5, size=(6, 6))
            np.fill_diagonal(init, 0.0)
            result = hn.infer_additive(cs, cfg, init=init)
            objectives.append(-hn.additive_set_loglik(result.network, shaping, cs))
        spread = (max(objectives) - min(objectives)) / max(abs(objectives[0]), 1.0)
        assert spread < 1e-6

    def test_objective_beats_truth(self):
        true, shaping, cs = additive_instance(36, n_nodes=6, n_cascades=60)
        result = hn.infer_additive(cs, hn.AdditiveConfig(shaping=shaping))
        nll_hat = -hn.additive_set_loglik(result.network, shaping, cs)
        nll_true = -hn.additive_set_loglik(true, shaping, cs)
        assert nll_hat <= nll_true + 1e-9

    def test_never_cooccurring_pairs_are_exactly_zero(self):
        # nodes {0,1} and {2,3} live in disjoint cascades
        c1 = hn.Cascade.from_events([(0, 0.0), (1, 0.6)])
        c2 = hn.Cascade.from_events([(2, 0.0), (3, 0.9)])
        cs = hn.CascadeSet(4, 2.0, (c1, c2) * 10)
        result = hn.infer_additive(cs, hn.AdditiveConfig(shaping=EXP))
        assert result.network.params[0, 2] == 0.0
        assert result.network.params[2, 1] == 0.0
        assert result.network.params[0, 1] > 0.0
        assert result.network.params[2, 3] > 0.0

    def test_node_never_infected_after_another_gets_zero_column(self):
        # node 0 is always the source; nothing can explain an edge into it
        c = hn.Cascade.from_events([(0, 0.0), (1, 0.5)])
        cs = hn.CascadeSet(2, 2.0, (c,) * 5)
        result = hn.infer_additive(cs, hn.AdditiveConfig(shaping=EXP))
        assert np.all(result.network.params[:, 0] == 0.0)

    def test_kkt_conditions_hold_at_the_solution(self):
        _, shaping, cs = additive_instance(37, n_nodes=6, n_cascades=60)
        cfg = hn.AdditiveConfig(shaping=shaping, tol=1e-13, max_iters=50000)
        result = hn.infer_additive(cs, cfg)
        assert hn.additive_kkt_violation(result.network, shaping, cs) < 1e-4

    def test_not_converged_flag_on_iteration_cap(self):
        _, shaping, cs = additive_instance(38, n_nodes=6, n_cascades=60)
        result = hn.infer_additive(cs, hn.AdditiveConfig(shaping=shaping, max_iters=1))
        assert not result.converged

    def test_trace_is_nonincreasing(self):
        _, shaping, cs = additive_instance(39, n_nodes=6, n_cascades=40)
        result = hn.infer_additive(cs, hn.AdditiveConfig(shaping=shaping))
        diffs = np.diff(result.objective_trace)
        assert np.all(diffs <= 1e-9 * np.maximum(np.abs(result.objective_trace[:-1]), 1.0))

    def test_empty_cascade_set_rejected(self):
        with pytest.raises(ValueError, match="cascade"):
            hn.infer_additive(hn.CascadeSet(2, 1.0, ()), hn.AdditiveConfig(shaping=EXP))

    def test_unexplainable_data_rejected(self):
        # both infections are closer than the power kernel's floor allows
        c = hn.Cascade.from_events([(0, 0.0), (1, 0.5)])
        cs = hn.CascadeSet(2, 2.0, (c,))
        cfg = hn.AdditiveConfig(shaping=hn.ShapingFunction(hn.POWER, delta=1.0))
        with pytest.raises(ValueError, match="no parameter"):
            hn.infer_additive(cs, cfg)
