"""Simulation library for repeated accept/reject decision tasks.

A learner faces a stream of tasks, each hiding a value in [-1, 1] observable
only through noisy samples, and is scored by total reward per sample drawn.
The package provides the task protocol, prefix-measurable policies, interval
estimators fed by oversampled exploration, an elimination learner for finite
policy families, a doubling search that reduces countable families to finite
ones, exact and Monte Carlo oracles with the regret functional, and a
config-driven experiment runner.
"""

from .env import Environment, SampleModel, Task, ValueDistribution, draw_sample, new_task
from .policies import (
    CappedHoeffdingFamily,
    FixedWindowRule,
    HoeffdingRule,
    OversampledOutcome,
    Policy,
    PolicyGenerator,
    TaskOutcome,
    always_reject,
    assert_prefix_measurable,
    fixed_window_generator,
    hoeffding_decision,
    hoeffding_duration,
    hoeffding_generator,
    mean_rule_policy,
    reject_policy,
    run_policy,
    run_policy_oversampled,
)
from .estimators import EstimatorState, IntervalEstimate, RatioUndefinedError, radius
from .cape import CapeConfig, RunLog, coverage_event_holds, eliminate, run_cape, select_final
from .esc import EscConfig, EscResult, cost_avg, reward_lcb, run_esc, schedule_m
from .oracle import (
    EnumerationGuardError,
    ImpossibilityReport,
    OracleValues,
    PolicyValue,
    RegretReport,
    exact_policy_value,
    impossibility_check,
    mc_policy_value,
    objective_g1,
    objective_g2,
    objective_g3,
    oracle_values,
    regret,
)
from .experiments import (
    ConfigError,
    SweepGuardError,
    run_experiment,
    run_sweep,
    run_trial,
    validate_config,
)

__version__ = "0.1.0"
