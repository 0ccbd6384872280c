"""Randomized safety property: covering intervals never eliminate the best policy."""

import numpy as np

from perpolicy.cape import eliminate, select_final
from perpolicy.estimators import IntervalEstimate


class StubState:
    def __init__(self, reward, cost):
        self._r = {k: IntervalEstimate(*band) for k, band in reward.items()}
        self._c = {k: IntervalEstimate(*band) for k, band in cost.items()}

    def reward_bounds(self, k):
        return self._r[k]

    def cost_bounds(self, k):
        return self._c[k]


def random_instance(rng):
    K = int(rng.integers(2, 7))
    caps = np.sort(rng.integers(1, 9, size=K))
    rewards = rng.uniform(-1.0, 1.0, size=K)
    costs = np.array([rng.uniform(1.0, max(1.0, cap)) for cap in caps])
    reward_bands = {}
    cost_bands = {}
    for k in range(1, K + 1):
        r, c = rewards[k - 1], costs[k - 1]
        r_slack = rng.uniform(0.0, 0.6, size=2)
        c_slack = rng.uniform(0.0, 0.4, size=2)
        # cost lower bounds stay positive, as the elimination precondition demands
        reward_bands[k] = (r - r_slack[0], r + r_slack[1])
        cost_bands[k] = (max(c - c_slack[0], 0.05), c + c_slack[1])
    return rewards, costs, StubState(reward_bands, cost_bands)


def test_covering_intervals_keep_the_optimal_policy():
    rng = np.random.default_rng(7)
    for _ in range(500):
        rewards, costs, state = random_instance(rng)
        ratios = rewards / costs
        best = int(np.argmax(ratios)) + 1
        live = list(range(1, len(rewards) + 1))
        survivors = eliminate(live, state)
        assert best in survivors, (rewards, costs, survivors)
        assert survivors  # never empty


def test_selection_is_stable_under_candidate_order():
    rng = np.random.default_rng(11)
    for _ in range(200):
        _, _, state = random_instance(rng)
        live = list(state._r.keys())
        shuffled = list(live)
        rng.shuffle(shuffled)
        assert select_final(live, state) == select_final(shuffled, state)
