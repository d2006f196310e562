"""Decision policies and the name registry used by the experiment harness."""
from __future__ import annotations

from ..core import FieldLayout, RngStream
from .base import Agent, Buffer, SingleModelAgent, greedy_online_flush, train_on
from .bayes import (
    BayesGlmState,
    GlmUcbAgent,
    TsBlrAgent,
    glm_ucb_select,
    sample_weights,
    ts_blr_sample_select,
)
from .bootstrap import (
    BootstrapAgent,
    EnsembleAgent,
    GiroAgent,
    GuideBootAgent,
    ObbAgent,
    OnlineGuideBootAgent,
    guideboot_select,
    guideboot_train_step,
    online_guideboot_flush,
)
from .heuristics import (
    CountBanditState,
    DecayingEpsilonGreedyAgent,
    DeepTsBetaAgent,
    DeepUcb1Agent,
    EpsilonGreedyAgent,
    GreedyAgent,
    McDropoutAgent,
    UniformAgent,
    deep_ts_beta_sample,
    deep_ucb1_score,
    epsilon_greedy_select,
    epsilon_schedule,
    mc_dropout_select,
)

_SINGLE = ("model", "mode", "b", "c", "n", "learning_rate")

# name -> (class, applicable parameters, per-agent defaults)
REGISTRY: dict[str, tuple[type, tuple[str, ...], dict]] = {
    "guideboot": (GuideBootAgent, ("K", "alpha", "b", "density", "model", "learning_rate"),
                  {"alpha": 1.0}),
    "online_guideboot": (OnlineGuideBootAgent,
                         ("K", "alpha", "c", "n", "density", "model", "learning_rate"),
                         {"alpha": 1.0}),
    "bootstrap": (BootstrapAgent, ("K", "b", "model", "learning_rate"), {}),
    "giro": (GiroAgent, ("K", "alpha", "b", "model", "learning_rate"), {"alpha": 0.5}),
    "obb": (ObbAgent, ("K", "c", "n", "model", "learning_rate"), {}),
    "greedy": (GreedyAgent, _SINGLE, {}),
    "epsilon_greedy": (EpsilonGreedyAgent, ("epsilon",) + _SINGLE, {}),
    "epsilon_greedy_decay": (DecayingEpsilonGreedyAgent, ("epsilon",) + _SINGLE, {}),
    "deep_ucb1": (DeepUcb1Agent, ("alpha",) + _SINGLE, {"alpha": 0.1}),
    "deep_ts_beta": (DeepTsBetaAgent, ("shaping",) + _SINGLE, {}),
    "mc_dropout": (McDropoutAgent, ("dropout_rate",) + _SINGLE, {"model": "mlp"}),
    "glm_ucb": (GlmUcbAgent, ("refit_period", "ridge"), {}),
    "ts_blr": (TsBlrAgent, ("refit_period", "ridge"), {}),
    "uniform": (UniformAgent, (), {}),
}

DEFAULTS = {
    "K": 5,
    "alpha": 1.0,
    "b": 512,
    "c": 512,
    "n": 4,
    "epsilon": 0.1,
    "dropout_rate": 0.1,
    "shaping": 0.25,
    "refit_period": 50,
    "ridge": 1.0,
    "learning_rate": None,
    "density": "harmonic",
    "model": "glm",
    "mode": "replay",
}

AGENT_NAMES = tuple(REGISTRY)

_ONLINE = ("online_guideboot", "obb")


def default_learning_rate(name: str, model: str = "glm", mode: str = "replay") -> float:
    """Adam step size used when none is given.

    MLPs use 1e-3. A GLM trained by replay takes one step per interaction and
    uses 0.01; a GLM trained from online flushes takes about b/c times fewer
    steps and uses 0.05 to learn on a comparable time scale.
    """
    if model == "mlp":
        return 1e-3
    if name in _ONLINE or mode == "online":
        return 0.05
    return 0.01


def agent_defaults(name: str) -> dict:
    """Effective parameter values for ``name`` when nothing is overridden."""
    cls, keys, extra = REGISTRY[name]
    return {k: extra.get(k, DEFAULTS[k]) for k in keys}


def make_agent(name: str, layout: FieldLayout, horizon: int, rng: RngStream, **params) -> Agent:
    """Build a registered agent; parameters it does not use are rejected."""
    if name not in REGISTRY:
        raise ValueError(f"unknown agent {name!r}; known: {', '.join(AGENT_NAMES)}")
    cls, keys, _ = REGISTRY[name]
    extra = set(params) - set(keys)
    if extra:
        raise ValueError(f"agent {name!r} does not take {sorted(extra)}")
    kwargs = agent_defaults(name)
    kwargs.update(params)
    if "learning_rate" in kwargs and kwargs["learning_rate"] is None:
        kwargs["learning_rate"] = default_learning_rate(
            name, kwargs.get("model", "glm"), kwargs.get("mode", "replay"))
    return cls(layout, horizon, rng, **kwargs)


__all__ = [
    "AGENT_NAMES",
    "DEFAULTS",
    "REGISTRY",
    "Agent",
    "BayesGlmState",
    "BootstrapAgent",
    "Buffer",
    "CountBanditState",
    "DecayingEpsilonGreedyAgent",
    "DeepTsBetaAgent",
    "DeepUcb1Agent",
    "EnsembleAgent",
    "EpsilonGreedyAgent",
    "GiroAgent",
    "GlmUcbAgent",
    "GreedyAgent",
    "GuideBootAgent",
    "McDropoutAgent",
    "ObbAgent",
    "OnlineGuideBootAgent",
    "SingleModelAgent",
    "TsBlrAgent",
    "UniformAgent",
    "agent_defaults",
    "default_learning_rate",
    "deep_ts_beta_sample",
    "deep_ucb1_score",
    "epsilon_greedy_select",
    "epsilon_schedule",
    "glm_ucb_select",
    "greedy_online_flush",
    "guideboot_select",
    "guideboot_train_step",
    "make_agent",
    "mc_dropout_select",
    "online_guideboot_flush",
    "sample_weights",
    "train_on",
    "ts_blr_sample_select",
]
