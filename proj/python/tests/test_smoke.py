import math

import pytest

import scim


@pytest.fixture
def exp2():
    return scim.load_scenario("1p1w-exp2")


def test_registry_and_sizes(exp2):
    names = scim.builtin_scenario_names()
    assert len(names) == 13
    assert "1p1w-exp2" in names
    assert scim.observation_size(exp2) == 7
    assert scim.observation_size(scim.load_scenario("2p2w-exp1")) == 26


def test_config_round_trip(exp2):
    again = scim.ScenarioConfig.from_dict(exp2.to_dict())
    assert again.to_dict() == exp2.to_dict()


def test_bad_scenario_raises():
    with pytest.raises(scim.ConfigError):
        scim.load_scenario("no-such-scenario")


def test_env_episode_and_determinism(exp2):
    def run(seed):
        env = scim.Env(exp2, seed)
        env.reset()
        rewards = []
        done = False
        while not done:
            _, r, done, info = env.step([2] * scim.action_size(exp2))
            rewards.append(r)
            assert set(info["breakdown"]) == {
                "revenue", "production_cost", "transport_cost", "storage_cost", "penalty_cost"}
        return rewards

    a = run(7)
    assert len(a) == exp2.episode_length
    assert a == run(7)


def test_rollout_helper_matches_zero_policy(exp2):
    env = scim.Env(exp2, 1000)
    total = scim.rollout(env, lambda obs: [0] * scim.action_size(exp2))
    assert total == pytest.approx(scim.evaluate_policy(exp2, "zero", 1, 1000)["mean"])


def test_oracle_beats_baselines(exp2):
    oracle = scim.oracle_evaluate(exp2, episodes=5)
    rand = scim.evaluate_policy(exp2, "random", episodes=5)
    assert oracle["mean"] > rand["mean"]
    plan = scim.plan_clairvoyant(exp2, 3)
    assert len(plan["actions"]) == exp2.episode_length
    assert plan["total_profit"] == pytest.approx(scim.dp_exact(exp2, 3), abs=1e-6)


def test_expected_improvement():
    assert scim.expected_improvement(1.0, 0.0, 0.5) == pytest.approx(0.5)
    assert scim.expected_improvement(0.0, 1.0, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))


def test_bo_maximize_finds_peak():
    best, value, n = scim.bo_maximize(lambda x: -((x[0] - 3) ** 2) - (x[1] + 2) ** 2,
                                      [(-10, 10), (-10, 10)], budget=40, seed=1)
    assert n == 40
    assert value == 0
    assert list(best) == [3, -2]


def test_tune_sq_and_evaluate(exp2):
    res = scim.tune_sq(exp2, budget=12, eval_episodes=3, seed=1)
    ev = scim.evaluate_sq(exp2, res["s"], res["Q"], episodes=5)
    assert math.isfinite(ev["mean"])


def test_train_checkpoint_and_benchmark(exp2, tmp_path):
    cfg = {"train_batch_size": 200, "episode_budget": 20, "eval_interval": 10, "eval_episodes": 2}
    model, curve = scim.train("ppo", exp2, cfg, seed=1)
    assert [p[0] for p in curve][-1] >= 20
    path = tmp_path / "1p1w-exp2.ppo.ckpt.json"
    scim.save_checkpoint(path, "ppo", exp2, model, cfg, 1)
    loaded = scim.load_model(path)
    obs = scim.Env(exp2, 0).reset()
    assert loaded.act(obs) == model.act(obs)

    recs = scim.run_benchmark(["1p1w-exp2"], ["ppo", "zero"], episodes=3, artifact_dir=str(tmp_path))
    assert [r["method"] for r in recs] == ["ppo", "zero"]
    assert recs[0]["mean"] == pytest.approx(loaded.evaluate(exp2, 3)["mean"])
    for ext in ("csv", "json"):
        out = tmp_path / f"res.{ext}"
        scim.export_results(recs, out)
        assert scim.import_results(out) == recs

    with pytest.raises(scim.ConfigError):
        scim.run_benchmark(["1p1w-exp2"], ["vpg"], episodes=1, artifact_dir=str(tmp_path))


def test_unknown_training_option_rejected(exp2):
    with pytest.raises(scim.ConfigError):
        scim.train("vpg", exp2, {"batch_size": 10}, seed=1)
