"""Episode simulation, regret bookkeeping and multi-seed aggregation."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..agents import make_agent
from ..core import RngStream, argmax_tiebreak
from ..envs import generate_glm_env, generate_nonlinear_env, parse_logged_pool
from .config import RunConfig

__all__ = ["RegretRecord", "SummaryRow", "build_env", "run_episode", "run_experiment",
           "aggregate", "METRICS"]

METRICS = ("final_cum_regret", "avg_reward")


@dataclass(frozen=True)
class RegretRecord:
    seed: int
    agent: str
    step: int
    action: int
    reward: int
    expected_reward: float
    best_expected: float
    instant_regret: float
    cum_regret: float
    # running total of realized rewards; kept in memory only, not written to the records file
    cum_reward: float = math.nan


@dataclass(frozen=True)
class SummaryRow:
    agent: str
    metric: str
    mean: float
    std: float
    seeds: int


def build_env(config: RunConfig, seed: int):
    """Environment for one seed; the same for every agent run on that seed."""
    spec_rng = RngStream(seed).derive("env").derive("spec")
    env = config.env
    if env.kind == "glm":
        return generate_glm_env(spec_rng, env.cardinalities)
    if env.kind == "nonlinear":
        return generate_nonlinear_env(spec_rng, env.cardinalities)
    return parse_logged_pool(env.pool_path, env.cardinalities or None)


def _make(config: RunConfig, agent: str, seed: int, env):
    try:
        return make_agent(agent, env.layout, config.env.horizon,
                          RngStream(seed).derive("agent").derive(agent), **config.params_for(agent))
    except ValueError as exc:
        raise ValueError(f"agent {agent!r} cannot run on {config.env.kind!r}: {exc}") from None


def run_episode(config: RunConfig, seed: int, agent: str | None = None) -> list[RegretRecord]:
    """Play one full horizon and return the strided regret log.

    Candidates and feedback come from streams that depend only on the seed,
    so every agent faces the same contexts and the same reward coins.
    """
    agent = agent or config.agents[0]
    env = build_env(config, seed)
    policy = _make(config, agent, seed, env)
    root = RngStream(seed).derive("env")
    cand_rng = root.derive("candidates")
    feedback_rng = root.derive("feedback")
    horizon = config.env.horizon
    stride = config.output.stride
    action_field = env.layout.action_field
    records = []
    cum_regret = 0.0
    cum_reward = 0
    for t in range(1, horizon + 1):
        candidates = env.draw_candidates(cand_rng)
        choice = policy.select(candidates, t)
        probs = env.expected_rewards(candidates)
        best = float(probs[argmax_tiebreak(probs)])
        chosen = float(probs[choice])
        reward = int(feedback_rng.gen.random() < chosen)
        regret = best - chosen
        cum_regret += regret
        cum_reward += reward
        policy.observe(candidates[choice], reward, t)
        if t % stride == 0 or t == horizon:
            records.append(RegretRecord(seed, agent, t, int(candidates[choice, action_field]),
                                        reward, chosen, best, regret, cum_regret, float(cum_reward)))
    return records


def _episode_job(args):
    config, seed, agent = args
    return run_episode(config, seed, agent)


def run_experiment(config: RunConfig, workers: int | None = None) -> list[RegretRecord]:
    """Every (agent, seed) episode, merged in (agent order, seed, step) order."""
    jobs = [(config, seed, agent) for agent in config.agents for seed in config.seeds]
    workers = workers or config.workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_episode_job, jobs))
    else:
        results = [_episode_job(job) for job in jobs]
    rank = {a: i for i, a in enumerate(config.agents)}
    records = [r for chunk in results for r in chunk]
    records.sort(key=lambda r: (rank[r.agent], r.seed, r.step))
    return records


def _mean_std(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=np.float64)
    mean = float(v.mean())
    if v.size < 2:
        return mean, 0.0
    return mean, float(np.sqrt(np.sum((v - mean) ** 2) / max(1, v.size - 1)))


def aggregate(records, agents=None) -> list[SummaryRow]:
    """Mean and sample std over seeds of final cumulative regret and average reward.

    Average reward uses the in-memory running reward total when present;
    records read back from a file lack it, in which case the mean of the
    logged rows' realized rewards stands in (exact only at stride 1).
    """
    finals: dict[str, dict[int, RegretRecord]] = {}
    logged: dict[tuple[str, int], list[int]] = {}
    for r in records:
        last = finals.setdefault(r.agent, {}).get(r.seed)
        if last is None or r.step > last.step:
            finals[r.agent][r.seed] = r
        logged.setdefault((r.agent, r.seed), []).append(r.reward)
    order = list(agents) if agents is not None else sorted(finals)
    rows = []
    for agent in order:
        per_seed = [finals[agent][s] for s in sorted(finals[agent])]
        regrets = [r.cum_regret for r in per_seed]
        rewards = [
            r.cum_reward / r.step if not math.isnan(r.cum_reward) else float(np.mean(logged[(agent, r.seed)]))
            for r in per_seed
        ]
        for metric, values in zip(METRICS, (regrets, rewards)):
            mean, std = _mean_std(values)
            rows.append(SummaryRow(agent, metric, mean, std, len(values)))
    return rows
