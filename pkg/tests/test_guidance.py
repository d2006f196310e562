import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from guideboot.core import Batch, FieldLayout, RngStream
from guideboot.guidance import (
    GuidanceState,
    augment_with_fakes,
    bootstrap_resample,
    density,
    guidance_value,
    shuffle_split,
    update_counts,
)

from .conftest import random_codes


def _state_with_counts(counts, alpha=1.0, kind="harmonic"):
    lay = FieldLayout(tuple(len(c) for c in counts))
    s = GuidanceState(lay, alpha, kind)
    s.counts = [np.asarray(c, dtype=np.int64) for c in counts]
    return s


def test_guidance_at_density_four_is_a_quarter():
    s = _state_with_counts([[4, 0]], kind="action_count")
    assert guidance_value(s, [0]) == 0.25


@pytest.mark.parametrize("count", [0, 1])
def test_guidance_caps_at_one(count):
    s = _state_with_counts([[count]], kind="action_count")
    assert guidance_value(s, [0]) == 1.0


def test_harmonic_density_of_three_and_six_is_two():
    s = _state_with_counts([[3], [6]])
    assert density(s, [0, 0]) == pytest.approx(2.0, rel=1e-15)
    assert guidance_value(s, [0, 0]) == 0.5


def test_unseen_value_gives_zero_density_and_full_guidance():
    s = _state_with_counts([[5, 5], [0, 9]])
    assert density(s, [1, 0]) == 0.0
    assert guidance_value(s, [1, 0]) == 1.0


def test_zero_alpha_switches_guidance_off():
    s = _state_with_counts([[0, 9]], alpha=0.0, kind="action_count")
    assert guidance_value(s, [0]) == 0.0
    assert guidance_value(s, [1]) == 0.0


def test_action_count_density_ignores_context_fields():
    s = _state_with_counts([[7, 1], [0, 100]], kind="action_count")
    assert density(s, [0, 0]) == 7.0


def test_update_counts_per_field():
    lay = FieldLayout((3, 2))
    s = GuidanceState(lay)
    update_counts(s, [2, 1])
    update_counts(s, np.array([[2, 0], [0, 1]]))
    assert s.counts[0].tolist() == [1, 0, 2]
    assert s.counts[1].tolist() == [1, 2]
    assert s.total == 3
    assert s.action_counts().tolist() == [1, 0, 2]


def test_invalid_state_arguments():
    with pytest.raises(ValueError):
        GuidanceState(FieldLayout((2,)), alpha=-1.0)
    with pytest.raises(ValueError):
        GuidanceState(FieldLayout((2,)), kind="kde")


count_tables = st.lists(st.lists(st.integers(0, 50), min_size=3, max_size=3), min_size=2, max_size=4)


@settings(max_examples=200, deadline=None)
@given(count_tables, st.integers(0, 3), st.integers(0, 2), st.integers(1, 20),
       st.sampled_from(["harmonic", "action_count"]), st.floats(0.1, 5.0))
def test_guidance_never_increases_with_any_count(table, field, value, extra, kind, alpha):
    field = field % len(table)
    s = _state_with_counts(table, alpha, kind)
    x = [0] * len(table)
    before = guidance_value(s, x)
    rho_before = density(s, x)
    s.counts[field][value] += extra
    s._inverse = None
    assert guidance_value(s, x) <= before
    assert density(s, x) >= rho_before


def test_fake_counts_follow_the_guidance_probability(stream):
    lay = FieldLayout((4,))
    s = GuidanceState(lay, alpha=1.0, kind="action_count")
    s.counts = [np.array([1, 2, 4, 10])]
    x = np.repeat(np.arange(4), 5000)[:, None]
    batch = Batch(x, np.zeros(len(x)))
    out = augment_with_fakes(batch, s, stream)
    n = len(batch)
    assert np.array_equal(out.features[:n], batch.features)
    fakes = out.take(np.arange(n, len(out)))
    for a, g in zip(range(4), (1.0, 0.5, 0.25, 0.1)):
        pos = np.sum((fakes.features[:, 0] == a) & (fakes.rewards == 1))
        neg = np.sum((fakes.features[:, 0] == a) & (fakes.rewards == 0))
        sd = np.sqrt(5000 * g * (1 - g)) + 1e-9
        assert abs(pos - 5000 * g) <= 4 * sd
        assert abs(neg - 5000 * g) <= 4 * sd
    # layout: real samples, then every fake positive, then every fake negative
    r = out.rewards[n:]
    assert np.all(np.diff(r) <= 0)


def test_positive_and_negative_fakes_are_independent(stream):
    lay = FieldLayout((1,))
    s = GuidanceState(lay, alpha=1.0, kind="action_count")
    s.counts = [np.array([2])]
    hits = np.zeros((2, 2))
    for _ in range(4000):
        out = augment_with_fakes(Batch(np.zeros((1, 1), dtype=np.int64), np.zeros(1)), s, stream)
        fake = out.rewards[1:]
        hits[int(1.0 in fake), int(0.0 in fake)] += 1
    # each cell has probability 1/4 under independence
    assert np.all(np.abs(hits / 4000 - 0.25) < 0.03)


def test_augment_reuses_supplied_guidance(stream):
    s = GuidanceState(FieldLayout((3,)))
    batch = Batch(np.zeros((10, 1), dtype=np.int64), np.ones(10))
    assert len(augment_with_fakes(batch, s, stream, g=np.zeros(10))) == 10
    assert len(augment_with_fakes(batch, s, stream, g=np.ones(10))) == 30


def test_bootstrap_resample_distinct_fraction(stream):
    n = 20000
    buf = Batch(np.arange(n)[:, None], np.zeros(n))
    out = bootstrap_resample(buf, n, stream)
    frac = len(np.unique(out.features[:, 0])) / n
    assert frac == pytest.approx(1 - np.exp(-1), abs=0.01)


def test_bootstrap_resample_errors(stream):
    empty = Batch(np.zeros((0, 1), dtype=np.int64), np.zeros(0))
    with pytest.raises(ValueError):
        bootstrap_resample(empty, 5, stream)
    with pytest.raises(ValueError):
        bootstrap_resample(Batch(np.zeros((1, 1), dtype=np.int64), np.zeros(1)), 0, stream)


@pytest.mark.parametrize("size, n, sizes", [(512, 4, [128] * 4), (10, 4, [3, 3, 2, 2]), (4, 4, [1] * 4)])
def test_shuffle_split_is_a_partition(stream, size, n, sizes):
    buf = Batch(np.arange(size)[:, None], np.zeros(size))
    parts = shuffle_split(buf, n, stream)
    assert [len(p) for p in parts] == sizes
    seen = np.concatenate([p.features[:, 0] for p in parts])
    assert sorted(seen.tolist()) == list(range(size))


def test_shuffle_split_errors(stream):
    buf = Batch(np.zeros((3, 1), dtype=np.int64), np.zeros(3))
    with pytest.raises(ValueError):
        shuffle_split(buf, 4, stream)
    with pytest.raises(ValueError):
        shuffle_split(buf, 0, stream)


def test_density_is_vectorized(layout):
    s = GuidanceState(layout)
    x = random_codes(layout, 300, seed=1)
    s.update(x)
    rho = s.density(x)
    for i in (0, 17, 299):
        want = 1.0 / sum(1.0 / s.counts[j][x[i, j]] for j in range(3))
        assert rho[i] == pytest.approx(want, rel=1e-14)
