import numpy as np
import pytest

from guideboot.agents import (
    AGENT_NAMES,
    BayesGlmState,
    BootstrapAgent,
    CountBanditState,
    GreedyAgent,
    GuideBootAgent,
    ObbAgent,
    OnlineGuideBootAgent,
    agent_defaults,
    deep_ts_beta_sample,
    deep_ucb1_score,
    default_learning_rate,
    epsilon_greedy_select,
    epsilon_schedule,
    glm_ucb_select,
    guideboot_select,
    guideboot_train_step,
    make_agent,
    online_guideboot_flush,
    sample_weights,
    ts_blr_sample_select,
)
from guideboot.agents import bootstrap as bootstrap_module
from guideboot.core import Batch, FieldLayout, RngStream
from guideboot.models import LogisticGlm

from .conftest import random_codes
from .driver import glm_spec, play


class _Recording:
    """Mixin that keeps every training batch produced by a replay ensemble."""

    def training_batches(self):
        batches = super().training_batches()
        self.seen.append(batches)
        return batches


class RecordingGuideBoot(_Recording, GuideBootAgent):
    pass


class RecordingBootstrap(_Recording, BootstrapAgent):
    pass


def test_guideboot_without_guidance_trains_on_bootstrap_batches():
    spec = glm_spec(1)
    rng = RngStream(1).derive("agent")
    a = RecordingGuideBoot(spec.layout, 300, rng, K=3, alpha=0.0, b=64, learning_rate=0.01)
    b = RecordingBootstrap(spec.layout, 300, rng, K=3, b=64, learning_rate=0.01)
    a.seen, b.seen = [], []
    play(a, spec, 1, 300)
    play(b, spec, 1, 300)
    assert len(a.seen) == len(b.seen) == 300
    for step_a, step_b in zip(a.seen, b.seen):
        for x, y in zip(step_a, step_b):
            assert x.equals(y)
    for ma, mb in zip(a.models, b.models):
        for k in ma.params:
            assert np.array_equal(ma.params[k], mb.params[k])


def test_online_guideboot_reduces_to_greedy_streaming_learner():
    spec = glm_spec(2)
    rng = RngStream(2).derive("agent")
    c, flushes = 128, 20
    ens = OnlineGuideBootAgent(spec.layout, c * flushes, rng, K=1, alpha=0.0, c=c, n=4,
                               learning_rate=0.05)
    single = GreedyAgent(spec.layout, c * flushes, rng, mode="online", c=c, n=4, learning_rate=0.05)
    snaps_e, snaps_s = [], []
    play(ens, spec, 2, c * flushes,
         lambda t: t % c == 0 and snaps_e.append({k: v.copy() for k, v in ens.models[0].params.items()}))
    play(single, spec, 2, c * flushes,
         lambda t: t % c == 0 and snaps_s.append({k: v.copy() for k, v in single.model.params.items()}))
    assert len(snaps_e) == flushes
    for pe, ps in zip(snaps_e, snaps_s):
        for k in pe:
            assert np.array_equal(pe[k], ps[k])
    assert np.any(snaps_e[-1]["weights"] != 0)


def test_guidance_changes_the_training_data():
    spec = glm_spec(1)
    rng = RngStream(1).derive("agent")
    a = RecordingGuideBoot(spec.layout, 50, rng, K=2, alpha=1.0, b=32)
    a.seen = []
    play(a, spec, 1, 50)
    # early on every input is rare, so nearly all samples get both fakes
    assert len(a.seen[0][0]) > 32
    assert all(len(x) >= 32 for step in a.seen for x in step)


def test_giro_inserts_pseudo_pairs_at_the_configured_rate():
    spec = glm_spec(3)
    agent = make_agent("giro", spec.layout, 2000, RngStream(3).derive("agent"), K=1, b=8)
    play(agent, spec, 3, 2000)
    extra = len(agent.buffer) - 2000
    assert extra % 2 == 0
    pairs = extra // 2
    assert abs(pairs - 1000) < 4 * np.sqrt(2000 * 0.25)


def test_obb_repetitions_have_unit_mean(monkeypatch):
    sizes = []
    real = bootstrap_module.train_on
    monkeypatch.setattr(bootstrap_module, "train_on",
                        lambda model, opt, batch, **kw: (sizes.append(len(batch)), real(model, opt, batch))[1])
    spec = glm_spec(4)
    agent = ObbAgent(spec.layout, 2048, RngStream(4).derive("agent"), K=5, c=512, n=4)
    play(agent, spec, 4, 2048)
    total = sum(sizes)
    draws = 5 * 2048
    assert abs(total / draws - 1.0) < 4 / np.sqrt(draws)


def test_ensemble_selection_uses_each_model(layout):
    agent = make_agent("guideboot", layout, 100, RngStream(0).derive("a"))
    cands = random_codes(layout, 25)
    cands[:, 0] = np.arange(25)
    picks = set()
    for t in range(1, 200):
        guideboot_select(agent, cands, t)
        picks.add(agent.last_model)
    assert picks == set(range(5))


def test_train_step_and_flush_wrappers(layout):
    agent = make_agent("guideboot", layout, 10, RngStream(0).derive("a"), K=2, b=8)
    with pytest.raises(ValueError):
        guideboot_train_step(agent)
    agent.insert(np.array([1, 2, 3]), 1, 1)
    guideboot_train_step(agent)
    assert all(opt.step == 1 for opt in agent.opts)
    online = make_agent("online_guideboot", layout, 10, RngStream(0).derive("b"), K=2, c=8, n=4)
    with pytest.raises(ValueError):
        online_guideboot_flush(online)
    for t in range(1, 8):
        online.observe(np.array([t, 0, 0]), 0, t)
    online_guideboot_flush(online)
    assert len(online.buffer) == 0 and all(opt.step == 4 for opt in online.opts)
    assert online.guidance.total == 7


def test_single_action_prediction_tracks_the_success_rate():
    lay = FieldLayout((1,))
    agent = make_agent("guideboot", lay, 2000, RngStream(9).derive("a"), b=64)
    g = np.random.default_rng(9)
    x = np.zeros(1, dtype=np.int64)
    for t in range(1, 2001):
        agent.select(x[None, :], t)
        agent.observe(x, int(g.random() < 0.3), t)
    preds = [m.predict_batch(x[None, :])[0] for m in agent.models]
    assert all(0.2 < p < 0.4 for p in preds)


def test_epsilon_schedule_and_selection(stream):
    assert epsilon_schedule(0, 100) == 0.1
    assert epsilon_schedule(50, 100) == pytest.approx(0.05)
    assert epsilon_schedule(100, 100) == 0.0
    with pytest.raises(ValueError):
        epsilon_schedule(101, 100)
    lay = FieldLayout((5,))
    model = LogisticGlm(lay)
    model.params["weights"][3] = 1.0
    cands = np.arange(5)[:, None]
    assert epsilon_greedy_select(model, cands, 0.0, stream) == 3
    picks = [epsilon_greedy_select(model, cands, 1.0, stream) for _ in range(2000)]
    assert set(picks) == set(range(5))
    with pytest.raises(ValueError):
        epsilon_greedy_select(model, cands, 1.5, stream)


def test_deep_ucb1_scores():
    s = deep_ucb1_score([0.2, 0.5, 0.1], 10, [4, 0, 1], alpha=0.1)
    assert np.isinf(s[1])
    assert s[0] == pytest.approx(0.2 + 0.1 * np.sqrt(2 * np.log(10) / 4))
    assert deep_ucb1_score(0.3, 1, 5) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        deep_ucb1_score([0.1], 0, [1])


def test_deep_ucb1_tries_unseen_actions_first(layout):
    agent = make_agent("deep_ucb1", layout, 100, RngStream(0).derive("a"), b=8)
    cands = random_codes(layout, 25)
    cands[:, 0] = np.arange(25)
    chosen = []
    for t in range(1, 26):
        i = agent.select(cands, t)
        chosen.append(int(cands[i, 0]))
        agent.observe(cands[i], 0, t)
    assert chosen == list(range(25))


def test_deep_ts_beta_sample_mean(stream):
    # Beta(a, b) with a = 0.3 * 400 * 0.25 = 30, b = 70 has mean 0.3
    draws = deep_ts_beta_sample(np.full(20000, 0.3), np.full(20000, 400), 0.25, stream)
    assert draws.mean() == pytest.approx(0.3, abs=0.003)
    assert draws.var() == pytest.approx(30 * 70 / (100**2 * 101), rel=0.05)
    # small counts floor both parameters at one
    flat = deep_ts_beta_sample(np.full(20000, 0.9), np.zeros(20000), 0.25, stream)
    assert flat.mean() == pytest.approx(0.5, abs=0.01)


def test_count_state():
    s = CountBanditState(3)
    s.update(2, 1)
    s.update(2, 0)
    assert s.impressions.tolist() == [0, 0, 2] and s.successes.tolist() == [0, 0, 1] and s.t == 2


def _logistic_data(layout, n, seed):
    g = np.random.default_rng(seed)
    w = g.uniform(-0.5, 0.5, layout.one_hot_dim)
    x = random_codes(layout, n, seed=seed)
    z = w[x + layout.offsets].sum(axis=1)
    y = (g.random(n) < 1 / (1 + np.exp(-z))).astype(float)
    return w, x, y


def test_laplace_fit_recovers_identifiable_predictions():
    lay = FieldLayout((4, 3))
    _, x, y = _logistic_data(lay, 40000, 0)
    state = BayesGlmState(lay, ridge=1.0)
    state.fit(x, y)
    grid = np.array([[a, b] for a in range(4) for b in range(3)])
    w, _, _ = _logistic_data(lay, 1, 0)
    truth = w[grid + lay.offsets].sum(axis=1)
    # one-hot weights are identified only up to shifts between fields, so compare predictions
    p_err = np.abs(1 / (1 + np.exp(-state.linear(grid))) - 1 / (1 + np.exp(-truth)))
    assert p_err.max() < 0.05


def test_laplace_covariance_inverts_precision():
    lay = FieldLayout((3, 2))
    _, x, y = _logistic_data(lay, 500, 1)
    state = BayesGlmState(lay)
    state.fit(x, y)
    assert np.allclose(state.cov @ state.precision, np.eye(lay.one_hot_dim), atol=1e-8)


def test_thompson_draws_match_posterior_covariance(stream):
    lay = FieldLayout((3, 2))
    _, x, y = _logistic_data(lay, 300, 2)
    state = BayesGlmState(lay)
    state.fit(x, y)
    w = sample_weights(state, stream, size=40000)
    emp = np.cov(w, rowvar=False)
    assert np.linalg.norm(emp - state.cov) / np.linalg.norm(state.cov) < 0.05
    assert np.allclose(w.mean(axis=0), state.mean, atol=4 * np.sqrt(state.cov.diagonal().max() / 40000))
    assert 0 <= ts_blr_sample_select(state, random_codes(lay, 3), stream) < 3


def test_thompson_rejects_broken_covariance(stream):
    lay = FieldLayout((2,))
    state = BayesGlmState(lay)
    state.cov = -np.eye(2)
    with pytest.raises(ValueError):
        ts_blr_sample_select(state, np.array([[0], [1]]), stream)


def test_glm_ucb_prefers_uncertain_candidates_under_equal_means():
    lay = FieldLayout((2,))
    state = BayesGlmState(lay)
    state.cov = np.diag([0.1, 1.0])
    assert glm_ucb_select(state, np.array([[0], [1]]), 10) == 1
    state.cov[0, 0] = np.nan
    with pytest.raises(ValueError):
        glm_ucb_select(state, np.array([[0], [1]]), 10)


def test_bayes_agents_refit_on_schedule(layout):
    agent = make_agent("ts_blr", layout, 100, RngStream(0).derive("a"), refit_period=10)
    spec = glm_spec(0)
    play(agent, spec, 0, 9)
    assert np.all(agent.state.mean == 0)
    play(agent, spec, 0, 1)
    assert np.any(agent.state.mean != 0)


@pytest.mark.parametrize("name", AGENT_NAMES)
def test_every_registered_agent_runs(name):
    spec = glm_spec(5, (6, 3, 2))
    params = {}
    keys = agent_defaults(name)
    for k, v in (("b", 16), ("c", 16), ("refit_period", 5)):
        if k in keys:
            params[k] = v
    agent = make_agent(name, spec.layout, 60, RngStream(5).derive("agent").derive(name), **params)
    regret = play(agent, spec, 5, 60)
    assert np.isfinite(regret) and regret >= 0


def test_make_agent_rejects_bad_names_and_parameters(layout):
    with pytest.raises(ValueError, match="unknown agent"):
        make_agent("linucb", layout, 10, RngStream(0))
    with pytest.raises(ValueError, match="does not take"):
        make_agent("uniform", layout, 10, RngStream(0), K=3)
    with pytest.raises(ValueError):
        make_agent("mc_dropout", layout, 10, RngStream(0), model="glm")


def test_default_learning_rates(layout):
    assert default_learning_rate("guideboot") == 0.01
    assert default_learning_rate("online_guideboot") == 0.05
    assert default_learning_rate("greedy", mode="online") == 0.05
    assert default_learning_rate("guideboot", model="mlp") == 1e-3
    assert make_agent("obb", layout, 10, RngStream(0)).opts[0].lr == 0.05
    assert make_agent("bootstrap", layout, 10, RngStream(0)).opts[0].lr == 0.01
    assert make_agent("mc_dropout", layout, 10, RngStream(0)).opt.lr == 1e-3
    assert make_agent("giro", layout, 10, RngStream(0), learning_rate=0.2).opts[0].lr == 0.2


def test_per_agent_alpha_defaults():
    assert agent_defaults("guideboot")["alpha"] == 1.0
    assert agent_defaults("giro")["alpha"] == 0.5
    assert agent_defaults("deep_ucb1")["alpha"] == 0.1
    assert agent_defaults("mc_dropout")["model"] == "mlp"
