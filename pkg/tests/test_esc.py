"""Doubling-search tests: schedules, confidence bounds, halting behavior."""

import math

import pytest

from perpolicy.env import Environment, SampleModel, ValueDistribution, new_task
from perpolicy.esc import EscConfig, cost_avg, reward_lcb, run_esc, schedule_m
from perpolicy.fixtures import spread_env
from perpolicy.oracle import exact_policy_value, mc_policy_value
from perpolicy.policies import (
    FixedWindowRule,
    fixed_window_generator,
    mean_rule_policy,
    run_policy_oversampled,
)


class TestScheduleM:
    def test_reference_value(self):
        # ceil(ln(2 / 0.05) / (2 * 0.01)) = ceil(184.44) = 185.
        assert schedule_m(1, 0.1, 0.05) == 185

    def test_floors_at_one(self):
        assert schedule_m(1, 2.0, 0.05) == 1

    def test_quarter_eps_quadruples(self):
        m = schedule_m(3, 0.08, 0.1)
        m4 = schedule_m(3, 0.04, 0.1)
        assert m4 == math.ceil(math.log(12 / 0.1) / (2 * 0.04**2))
        assert abs(m4 - 4 * m) <= 4  # equal up to the two ceilings

    def test_validation(self):
        with pytest.raises(ValueError):
            schedule_m(0, 0.1, 0.1)
        with pytest.raises(ValueError):
            schedule_m(1, -0.1, 0.1)
        with pytest.raises(ValueError):
            schedule_m(1, 0.1, 1.5)


class TestRewardLcb:
    def test_zero_second_halves(self):
        env = Environment(ValueDistribution.point_mass(0.0), SampleModel.bernoulli01(), 1)
        pol = mean_rule_policy(1, 2, FixedWindowRule(-1.0))
        records = [
            run_policy_oversampled(pol, 2, new_task(env, i)) for i in range(5)
        ]
        assert reward_lcb(pol, records, eps=0.1) == pytest.approx(-0.2, abs=1e-12)

    def test_degenerate_positive_stream(self):
        env = Environment(ValueDistribution.point_mass(1.0), SampleModel.binary_pm1(), 1)
        pol = mean_rule_policy(1, 2, FixedWindowRule(-1.0))
        records = [run_policy_oversampled(pol, 2, new_task(env, i)) for i in range(3)]
        assert reward_lcb(pol, records, eps=0.1) == pytest.approx(0.8, abs=1e-12)

    def test_estimate_unbiased_for_reward(self):
        env = spread_env(-0.6, 0.8, seed=17)
        pol = mean_rule_policy(1, 2, FixedWindowRule(1.0))
        records = [run_policy_oversampled(pol, 2, new_task(env, i)) for i in range(10_000)]
        terms = [(sum(r.second_block) / 2) * r.decision for r in records]
        mean = sum(terms) / len(terms)
        se = (sum((t - mean) ** 2 for t in terms) / (len(terms) - 1)) ** 0.5 / 100.0
        exact = exact_policy_value(pol, env).reward
        assert abs((reward_lcb(pol, records, eps=0.1) + 0.2) - exact) <= 3 * se

    def test_wrong_block_rejected(self):
        env = spread_env(-0.5, 0.5, seed=1)
        pol = mean_rule_policy(1, 2, FixedWindowRule(1.0))
        record = run_policy_oversampled(pol, 3, new_task(env, 0))  # block 3 != cap 2
        with pytest.raises(ValueError):
            reward_lcb(pol, [record], eps=0.1)


class TestCostAvg:
    def test_deterministic_duration(self):
        assert cost_avg([3, 3, 3]) == 3.0

    def test_simple_average(self):
        assert cost_avg([1, 5]) == 3.0

    def test_monte_carlo_matches_cost(self):
        env = spread_env(-0.6, 0.8, seed=23)
        from perpolicy.policies import CappedHoeffdingFamily, always_reject, run_policy

        pol = CappedHoeffdingFamily(c=0.6, K=4, N=50, delta=0.1).policy(4)
        probe = always_reject(pol)
        durations = [run_policy(probe, new_task(env, i)).duration for i in range(10_000)]
        mc = mc_policy_value(pol, env, trials=10_000, seed=5)
        exact = exact_policy_value(pol, env).cost
        se = max(mc.cost_se, 1e-9)
        assert abs(cost_avg(durations) - exact) <= 4 * se


class TestRunEsc:
    def test_positive_environment_halts_early(self):
        # reward(pi_2) = 0.405 >> 4 * eps: stage one certifies positivity at j = 1.
        env = spread_env(-0.9, 0.9)
        gen = fixed_window_generator(1.0)
        cfg = EscConfig(delta=0.1, epsilons=0.1, task_budget=3000)
        hits = 0
        for seed in range(20):
            res = run_esc(gen, env.with_seed(seed), cfg)
            assert res.halted
            if res.j0 == 1:
                hits += 1
        assert hits >= 18  # ~1 - delta of seeded repetitions

    def test_doubling_structure_and_zero_reward(self):
        env = spread_env(-0.9, 0.9, seed=4)
        res = run_esc(fixed_window_generator(1.0), env, EscConfig(0.1, 0.1, 3000))
        probed = [p.policy_index for p in res.probes]
        assert probed == [2 ** (i + 1) for i in range(len(probed))]
        assert res.index_bound == 2 ** res.j1
        assert res.j1 > res.j0 >= 1
        log = res.log
        assert all(r == 0.0 for r in log.rewards)
        assert all(s > 0 for s in log.samples)
        assert set(log.phases) <= {"esc1", "esc2"}

    def test_sample_accounting(self):
        env = spread_env(-0.9, 0.9, seed=9)
        res = run_esc(fixed_window_generator(1.0), env, EscConfig(0.1, 0.1, 3000))
        assert res.samples_used == sum(res.log.samples)
        assert res.tasks_used == len(res.log.samples)
        # Phase-one tasks draw twice the probed cap; phase-two tasks draw the duration.
        for phase, index, samples in zip(res.log.phases, res.log.policy_used, res.log.samples):
            if phase == "esc1":
                assert samples == 2 * index
            else:
                assert samples == index  # constant-duration family: tau == cap

    def test_all_negative_environment_exhausts_budget(self):
        env = Environment(ValueDistribution.point_mass(-1.0), SampleModel.binary_pm1(), 2)
        res = run_esc(fixed_window_generator(1.0), env, EscConfig(0.1, 0.1, 500))
        assert not res.halted
        assert res.index_bound is None
        assert res.j0 is None
        assert res.tasks_used == 500

    def test_budget_check_precedes_each_task(self):
        env = spread_env(-0.9, 0.9, seed=31)
        res = run_esc(fixed_window_generator(1.0), env, EscConfig(0.1, 0.1, 100))
        assert not res.halted
        assert res.tasks_used == 100

    def test_epsilon_schedules(self):
        cfg_list = EscConfig(0.1, [0.3, 0.2], 10)
        assert cfg_list.eps_at(1) == 0.3
        assert cfg_list.eps_at(2) == 0.2
        assert cfg_list.eps_at(5) == 0.2  # last level repeats
        cfg_fn = EscConfig(0.1, lambda j: 1.0 / j, 10)
        assert cfg_fn.eps_at(4) == 0.25
        with pytest.raises(ValueError):
            EscConfig(0.1, -0.5, 10)

    def test_m_totals_bookkeeping(self):
        env = spread_env(-0.9, 0.9, seed=12)
        res = run_esc(fixed_window_generator(1.0), env, EscConfig(0.1, 0.1, 3000))
        ms = [p.m for p in res.probes]
        assert res.m_totals == [sum(ms[: i + 1]) for i in range(len(ms))]
