"""Two-echelon supply chain inventory management: simulator, planners and learners."""

from ._scim import (
    ConfigError,
    ContractError,
    DivergenceError,
    Env,
    Model,
    ScenarioConfig,
    SizeError,
    action_bounds,
    action_size,
    benchmark_methods,
    bo_maximize,
    builtin_scenario_names,
    dp_exact,
    evaluate_policy,
    evaluate_sq,
    expected_improvement,
    export_results,
    import_results,
    load_model,
    load_scenario,
    observation_size,
    oracle_evaluate,
    plan_clairvoyant,
    run_benchmark,
    sample_demand,
    save_checkpoint,
    train,
    tune_sq,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def rollout(env, policy):
    """Runs `policy(observation) -> raw action` until the episode ends; returns total reward."""
    obs = env.reset()
    total = 0.0
    done = False
    while not done:
        obs, reward, done, _ = env.step(policy(obs))
        total += reward
    return total
