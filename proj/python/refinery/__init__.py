"""Act-refinement decision problems: refinement operators and the five
headline analyses (value of refinement, optimal stopping, dilemma
resolution, zero-sum escape, Nash bargaining gains)."""

from refinery._core import (
    DecisionProblem,
    DistSpec,
    JointRefinementModel,
    RefineryError,
    RefinementModel,
    ValueFunction,
    ValueProfile,
    act_desirability,
    act_probability,
    add_catch_all,
    aggregate_utility,
    best_act,
    builtin_models,
    check_rrp,
    check_uncertainty,
    correlation_sweep,
    detect_dilemma,
    enumerate_equilibria,
    expected_refined_payoffs,
    expected_refined_welfare,
    joint_from_json,
    make_model,
    make_problem,
    make_profile,
    model_from_json,
    multi_value_dominates,
    nash_solution_1d,
    nash_solution_2d,
    optimal_stopping,
    problem_from_json,
    profile_from_json,
    proposition_desirability,
    proposition_probability,
    refine_binary,
    refine_chain,
    refine_game,
    refine_kary,
    resolution_probability,
    sample_outcome,
    solve_zero_sum_2x2,
    value_of_refinement,
    welfare_optimal_equilibrium,
)

__all__ = [name for name in dir() if not name.startswith("_")]
