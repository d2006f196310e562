"""Bernoulli contextual-bandit environments.

Three environments share one interface (``layout``, ``draw_candidates``,
``expected_rewards``):

* :class:`SyntheticGlmSpec` -- 25 actions with two uniform 5-valued
  attributes and a logistic reward over the three fields.
* :class:`NonlinearSyntheticSpec` -- same layout, but the two attributes act
  through a pairwise interaction table, so a one-hot GLM cannot fit it.
* :class:`LoggedPool` -- replays candidate sets with known click
  probabilities read from a text file.

Codes are 0-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .core import FieldLayout, RngStream, argmax_tiebreak

__all__ = [
    "SyntheticGlmSpec",
    "NonlinearSyntheticSpec",
    "LoggedPool",
    "generate_glm_env",
    "generate_nonlinear_env",
    "draw_candidates",
    "expected_reward",
    "sample_feedback",
    "best_expected",
    "parse_logged_pool",
    "format_logged_pool",
]

GLM_ACTIONS = 25
GLM_CARDINALITIES = (25, 5, 5)
COEF_BOUND = 0.25
INTERACTION_BOUND = 0.5
INTERCEPT = -1.0


def _uniform_candidates(layout: FieldLayout, rng: RngStream) -> np.ndarray:
    m = layout.n_actions
    out = np.empty((m, layout.n_fields), dtype=np.int64)
    for j, card in enumerate(layout.cardinalities):
        if j == layout.action_field:
            out[:, j] = np.arange(m)
        else:
            out[:, j] = rng.gen.integers(0, card, size=m)
    return out


@dataclass(frozen=True)
class SyntheticGlmSpec:
    """Logistic environment: ``y = sigmoid(sum_j coefficients[j][x_j] + intercept)``.

    The default layout has 25 actions and two 5-valued attributes, giving the
    tables ``w0``, ``w1``, ``w2``.
    """

    coefficients: tuple[np.ndarray, ...]
    intercept: float = INTERCEPT
    layout: FieldLayout = field(default_factory=lambda: FieldLayout(GLM_CARDINALITIES))

    def __post_init__(self) -> None:
        if tuple(len(c) for c in self.coefficients) != self.layout.cardinalities:
            raise ValueError("coefficient tables do not match the field layout")

    @property
    def w0(self) -> np.ndarray:
        return self.coefficients[0]

    @property
    def w1(self) -> np.ndarray:
        return self.coefficients[1]

    @property
    def w2(self) -> np.ndarray:
        return self.coefficients[2]

    def logits(self, candidates) -> np.ndarray:
        x = np.atleast_2d(self.layout.check(candidates))
        z = np.full(x.shape[0], float(self.intercept))
        for j, table in enumerate(self.coefficients):
            z += table[x[:, j]]
        return z

    def expected_rewards(self, candidates) -> np.ndarray:
        return expit(self.logits(candidates))

    def draw_candidates(self, rng: RngStream) -> np.ndarray:
        return _uniform_candidates(self.layout, rng)


@dataclass(frozen=True)
class NonlinearSyntheticSpec:
    """``y = sigmoid(w0[a] + w12[x1, x2] - 1)`` on the synthetic layout."""

    w0: np.ndarray
    w12: np.ndarray
    intercept: float = INTERCEPT
    layout: FieldLayout = field(default_factory=lambda: FieldLayout(GLM_CARDINALITIES))

    def logits(self, candidates) -> np.ndarray:
        x = np.atleast_2d(self.layout.check(candidates))
        return self.w0[x[:, 0]] + self.w12[x[:, 1], x[:, 2]] + self.intercept

    def expected_rewards(self, candidates) -> np.ndarray:
        return expit(self.logits(candidates))

    def draw_candidates(self, rng: RngStream) -> np.ndarray:
        return _uniform_candidates(self.layout, rng)


@dataclass
class LoggedPool:
    """Recorded steps, each a candidate set with ground-truth probabilities.

    Steps are replayed in order; ``draw_candidates`` ignores its stream and
    wraps around when the horizon exceeds the log length.
    """

    steps: list[np.ndarray]
    probabilities: list[np.ndarray]
    layout: FieldLayout
    _cursor: int = 0
    _current: int = -1

    def __post_init__(self) -> None:
        if not self.steps or len(self.steps) != len(self.probabilities):
            raise ValueError("logged pool needs matching, nonempty step and probability lists")
        for x, p in zip(self.steps, self.probabilities):
            self.layout.check(x)
            if p.shape != (x.shape[0],) or np.any(p < 0) or np.any(p > 1):
                raise ValueError("probabilities must lie in [0, 1], one per candidate")

    def draw_candidates(self, rng: RngStream | None = None) -> np.ndarray:
        self._current = self._cursor % len(self.steps)
        self._cursor += 1
        return self.steps[self._current]

    def expected_rewards(self, candidates) -> np.ndarray:
        x = self.layout.check(candidates)
        if self._current >= 0 and np.array_equal(np.atleast_2d(x), self.steps[self._current]):
            return self.probabilities[self._current]
        # single rows or other steps: look the row up in the current step
        rows = np.atleast_2d(x)
        cur = self.steps[self._current]
        out = np.empty(rows.shape[0])
        for i, row in enumerate(rows):
            hit = np.nonzero((cur == row).all(axis=1))[0]
            if hit.size == 0:
                raise ValueError(f"candidate {row.tolist()} not in the current logged step")
            out[i] = self.probabilities[self._current][hit[0]]
        return out


def generate_glm_env(rng: RngStream, cardinalities=GLM_CARDINALITIES) -> SyntheticGlmSpec:
    """Every coefficient i.i.d. uniform on [-0.25, 0.25]; field 0 is the action."""
    layout = FieldLayout(tuple(cardinalities))
    g = rng.gen
    coefs = tuple(g.uniform(-COEF_BOUND, COEF_BOUND, c) for c in layout.cardinalities)
    return SyntheticGlmSpec(coefs, layout=layout)


def generate_nonlinear_env(rng: RngStream, cardinalities=GLM_CARDINALITIES) -> NonlinearSyntheticSpec:
    layout = FieldLayout(tuple(cardinalities))
    if layout.n_fields != 3:
        raise ValueError("the nonlinear environment needs exactly three fields")
    g = rng.gen
    return NonlinearSyntheticSpec(
        w0=g.uniform(-COEF_BOUND, COEF_BOUND, layout.cardinalities[0]),
        w12=g.uniform(-INTERACTION_BOUND, INTERACTION_BOUND, layout.cardinalities[1:]),
        layout=layout,
    )


def draw_candidates(spec, rng: RngStream) -> np.ndarray:
    """One candidate per action; the other fields are uniform over their values."""
    return spec.draw_candidates(rng)


def expected_reward(spec, x) -> float:
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("expected a single feature vector")
    return float(spec.expected_rewards(x)[0])


def sample_feedback(p: float, rng: RngStream) -> int:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    return int(rng.gen.random() < p)


def best_expected(spec, candidates) -> float:
    values = spec.expected_rewards(candidates)
    if values.size == 0:
        raise ValueError("empty candidate set")
    return float(values[argmax_tiebreak(values)])


def parse_logged_pool(path: str | Path, cardinalities: tuple[int, ...] | None = None) -> LoggedPool:
    """Read a logged pool file.

    One step per line: ``m;c1|c2|...|cm;p1|p2|...|pm`` where every ``ci`` is
    a comma-separated list of field codes and every ``pi`` a decimal
    probability. Blank lines and lines starting with ``#`` are skipped. The
    action field is field 0. Without explicit ``cardinalities`` each field's
    cardinality is its largest observed code plus one.
    """
    steps: list[np.ndarray] = []
    probs: list[np.ndarray] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                m_txt, codes_txt, p_txt = line.split(";")
                m = int(m_txt)
                rows = [[int(c) for c in chunk.split(",")] for chunk in codes_txt.split("|")]
                p = np.array([float(v) for v in p_txt.split("|")])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed logged step ({exc})") from None
            if m < 1 or len(rows) != m or p.shape[0] != m:
                raise ValueError(f"{path}:{lineno}: declared m={m} but found {len(rows)} candidates and {p.shape[0]} probabilities")
            if len({len(r) for r in rows}) != 1:
                raise ValueError(f"{path}:{lineno}: candidates disagree on field count")
            if np.any(p < 0) or np.any(p > 1):
                raise ValueError(f"{path}:{lineno}: probability outside [0, 1]")
            steps.append(np.array(rows, dtype=np.int64))
            probs.append(p)
    if not steps:
        raise ValueError(f"{path}: no logged steps")
    n_fields = {s.shape[1] for s in steps}
    if len(n_fields) != 1:
        raise ValueError(f"{path}: steps disagree on field count")
    if cardinalities is None:
        cardinalities = tuple(int(c) + 1 for c in np.max([s.max(axis=0) for s in steps], axis=0))
    return LoggedPool(steps, probs, FieldLayout(tuple(cardinalities)))


def format_logged_pool(steps, probabilities) -> str:
    lines = []
    for x, p in zip(steps, probabilities):
        codes = "|".join(",".join(str(int(c)) for c in row) for row in x)
        lines.append(f"{len(x)};{codes};{'|'.join(f'{v:.6g}' for v in p)}")
    return "\n".join(lines) + "\n"
