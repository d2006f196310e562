"""Experiment configuration files.

A config is plain text, one ``dotted.key = value`` per line. ``#`` starts a
comment. Example::

    environment.kind = glm
    environment.horizon = 10000
    agent.name = guideboot, bootstrap, giro
    agent.K = 5
    seeds = 0..49

Recognized keys, with defaults:

========================  ===============  =====================================
key                       default          notes
========================  ===============  =====================================
environment.kind          glm              glm | nonlinear | logged
environment.m             25               must equal the first cardinality
environment.cardinalities 25,5,5           field 0 is the action field
environment.horizon       10000            steps per episode
environment.pool_path     (none)           required for ``logged``
agent.name                (required)       comma-separated registered names
agent.K                   5
agent.alpha               per agent        1 (GuideBoot), 0.5 (Giro), 0.1 (Deep-UCB1)
agent.b                   512              replay resample size
agent.c                   512              online buffer capacity
agent.n                   4                minibatches per flush
agent.epsilon             0.1
agent.dropout_rate        0.1
agent.shaping             0.25
agent.refit_period        50
agent.ridge               1.0
agent.learning_rate       by model         GLM replay 0.01, GLM online 0.05, MLP 0.001
agent.density             harmonic         harmonic | action_count
agent.model               glm              glm | mlp (mc_dropout: mlp)
agent.mode                replay           replay | online (single-model agents)
output.records            records.csv
output.summary            summary.csv
output.stride             100
seeds                     0..49            ``a..b`` (inclusive) or comma list
run.workers               1                process pool size over episodes
========================  ===============  =====================================

An ``agent.*`` key that none of the named agents uses is an error.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from ..agents import AGENT_NAMES, REGISTRY

__all__ = ["ConfigError", "EnvConfig", "OutputConfig", "RunConfig", "parse_config",
           "parse_config_text", "parse_seeds"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnvConfig:
    kind: str = "glm"
    cardinalities: tuple[int, ...] = (25, 5, 5)
    horizon: int = 10_000
    pool_path: Path | None = None

    @property
    def m(self) -> int:
        return self.cardinalities[0]


@dataclass(frozen=True)
class OutputConfig:
    records: Path = Path("records.csv")
    summary: Path = Path("summary.csv")
    stride: int = 100


@dataclass(frozen=True)
class RunConfig:
    agents: tuple[str, ...]
    agent_params: dict = field(default_factory=dict)
    env: EnvConfig = field(default_factory=EnvConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seeds: tuple[int, ...] = tuple(range(50))
    workers: int = 1

    def params_for(self, agent: str) -> dict:
        """The explicitly configured parameters that ``agent`` accepts."""
        keys = REGISTRY[agent][1]
        return {k: v for k, v in self.agent_params.items() if k in keys}

    def with_agents(self, names) -> "RunConfig":
        names = tuple(names)
        _check_agents(names, self.agent_params, {})
        return replace(self, agents=names)


def _pos_int(v: str) -> int:
    x = int(v)
    if x < 1:
        raise ValueError("must be a positive integer")
    return x


def _nonneg_float(v: str) -> float:
    x = float(v)
    if not x >= 0:
        raise ValueError("must be nonnegative")
    return x


def _pos_float(v: str) -> float:
    x = float(v)
    if not x > 0:
        raise ValueError("must be positive")
    return x


def _unit(v: str) -> float:
    x = float(v)
    if not 0.0 <= x <= 1.0:
        raise ValueError("must lie in [0, 1]")
    return x


def _rate(v: str) -> float:
    x = float(v)
    if not 0.0 <= x < 1.0:
        raise ValueError("must lie in [0, 1)")
    return x


def _choice(*options):
    def conv(v: str) -> str:
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v
    return conv


def _cards(v: str) -> tuple[int, ...]:
    return tuple(_pos_int(p.strip()) for p in v.split(","))


def parse_seeds(v: str) -> tuple[int, ...]:
    v = v.strip()
    if ".." in v:
        lo, hi = (int(p) for p in v.split(".."))
        if hi < lo:
            raise ValueError("empty seed range")
        return tuple(range(lo, hi + 1))
    seeds = tuple(int(p) for p in v.split(",") if p.strip())
    if not seeds:
        raise ValueError("no seeds")
    return seeds


_AGENT_KEYS = {
    "K": _pos_int,
    "alpha": _nonneg_float,
    "b": _pos_int,
    "c": _pos_int,
    "n": _pos_int,
    "epsilon": _unit,
    "dropout_rate": _rate,
    "shaping": _pos_float,
    "refit_period": _pos_int,
    "ridge": _pos_float,
    "learning_rate": _pos_float,
    "density": _choice("harmonic", "action_count"),
    "model": _choice("glm", "mlp"),
    "mode": _choice("replay", "online"),
}

_OTHER_KEYS = {
    "environment.kind": _choice("glm", "nonlinear", "logged"),
    "environment.m": _pos_int,
    "environment.cardinalities": _cards,
    "environment.horizon": _pos_int,
    "environment.pool_path": str,
    "agent.name": lambda v: tuple(p.strip() for p in v.split(",") if p.strip()),
    "output.records": str,
    "output.summary": str,
    "output.stride": _pos_int,
    "seeds": parse_seeds,
    "run.workers": _pos_int,
}


def _check_agents(names, params, lines) -> None:
    if not names:
        raise ConfigError("agent.name lists no agents")
    for name in names:
        if name not in REGISTRY:
            raise ConfigError(
                f"line {lines.get('agent.name', '?')}: unknown agent {name!r} "
                f"(known: {', '.join(AGENT_NAMES)})"
            )
    for key in params:
        if not any(key in REGISTRY[n][1] for n in names):
            raise ConfigError(
                f"line {lines.get('agent.' + key, '?')}: agent.{key} does not apply to "
                f"{', '.join(names)}"
            )
    if "mc_dropout" in names and params.get("model", "mlp") != "mlp":
        raise ConfigError("mc_dropout needs agent.model = mlp")


def parse_config_text(text: str, base_dir: Path | None = None) -> RunConfig:
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in lines:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {lines[key]})")
        if key.startswith("agent.") and key[6:] in _AGENT_KEYS:
            conv = _AGENT_KEYS[key[6:]]
        elif key in _OTHER_KEYS:
            conv = _OTHER_KEYS[key]
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r} ({exc})") from None
        lines[key] = lineno

    if "agent.name" not in values:
        raise ConfigError("missing required key agent.name")
    names = values.pop("agent.name")
    params = {k[6:]: values.pop(k) for k in list(values) if k.startswith("agent.")}
    _check_agents(names, params, lines)

    kind = values.get("environment.kind", "glm")
    cards = values.get("environment.cardinalities")
    m = values.get("environment.m")
    if cards is None:
        cards = ((m or 25), 5, 5)
    elif m is not None and m != cards[0]:
        raise ConfigError(
            f"line {lines['environment.m']}: environment.m = {m} disagrees with "
            f"cardinalities {cards}"
        )
    if kind == "nonlinear" and len(cards) != 3:
        raise ConfigError("the nonlinear environment needs exactly three fields")
    pool = values.get("environment.pool_path")
    if kind == "logged":
        if pool is None:
            raise ConfigError("environment.kind = logged needs environment.pool_path")
        pool = Path(pool)
        if base_dir is not None and not pool.is_absolute():
            pool = base_dir / pool
    elif pool is not None:
        raise ConfigError(f"line {lines['environment.pool_path']}: pool_path only applies to logged environments")
    env = EnvConfig(
        kind=kind,
        cardinalities=tuple(cards) if kind != "logged" or "environment.cardinalities" in lines else (),
        horizon=values.get("environment.horizon", 10_000),
        pool_path=pool,
    )
    output = OutputConfig(
        records=Path(values.get("output.records", "records.csv")),
        summary=Path(values.get("output.summary", "summary.csv")),
        stride=values.get("output.stride", 100),
    )
    return RunConfig(
        agents=names,
        agent_params=params,
        env=env,
        output=output,
        seeds=values.get("seeds", tuple(range(50))),
        workers=values.get("run.workers", 1),
    )


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        return parse_config_text(text, base_dir=path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
