import random
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import g_oracle, h_oracle
from viewmetrics import (
    AgeUnavailableError,
    Channel,
    IndexConfig,
    Video,
    ViewSumOverflowError,
    ZeroAgeError,
    g_index,
    h_index,
    normalized_h_index,
    sorted_views,
    total_views,
)
from viewmetrics.indices import SECONDS_PER_YEAR

U5 = IndexConfig(100_000)
UNCAPPED = IndexConfig(100_000, cap_g_at_nv=False)
AS_OF = datetime(2013, 1, 3, tzinfo=timezone.utc)

views_lists = st.lists(st.integers(0, 10**9), max_size=80)
units = st.sampled_from([1, 10, 1_000, 10_000, 100_000, 1_000_000])


def ch(views):
    return Channel.from_views("c", views)


@pytest.mark.parametrize(
    "views, expected",
    [([3, 9, 9, 1], [9, 9, 3, 1]), ([], []), ([7], [7])],
)
def test_sorted_views(views, expected):
    c = ch(views)
    assert sorted_views(c) == expected
    assert c.view_counts == views


def test_h_index_examples():
    assert h_index(ch([]), U5) == 0
    assert h_index(ch([100_000]), U5) == 1
    assert h_index(ch([99_999]), U5) == 0


def test_h_index_derived_mixed():
    views = [500_000, 350_000, 299_999, 100_000]
    assert h_oracle(views, 100_000) == 2
    assert h_index(ch(views), U5) == 2


def test_h_index_79_big_videos():
    views = [8_000_000] * 79 + [1_000] * 100
    assert h_oracle(views, 100_000) == 79
    assert h_index(ch(views), U5) == 79


@pytest.mark.parametrize(
    "views, expected",
    [([], 0), ([900_000, 100_000, 100_000], 3), ([100_000] * 4, 1)],
)
def test_g_index_examples(views, expected):
    assert g_oracle(views, 100_000) == expected
    assert g_index(ch(views), U5) == expected


def test_g_index_cap_policy():
    assert g_oracle([10_000_000], 100_000, cap=True) == 1
    assert g_oracle([10_000_000], 100_000, cap=False) == 10
    assert g_index(ch([10_000_000]), U5) == 1
    assert g_index(ch([10_000_000]), UNCAPPED) == 10


def test_accepts_plain_sequences():
    assert h_index([5, 5, 5], IndexConfig(1)) == 3
    assert g_index((9, 0, 0), IndexConfig(1)) == 3


def test_total_views():
    assert total_views(ch([])) == 0
    assert total_views(ch([100, 200, 300])) == 600
    assert total_views(ch([2**62, 2**62 - 1, 0])) == 2**63 - 1


def test_total_views_overflow():
    with pytest.raises(ViewSumOverflowError, match="view sum overflow"):
        total_views(ch([2**62, 2**62, 2**62]))


def test_video_rejects_negative_and_oversized():
    with pytest.raises(ValueError):
        Video("v", -1)
    with pytest.raises(ValueError):
        Video("v", 2**63)
    with pytest.raises(TypeError):
        Video("v", 1.5)


def test_index_config_validation():
    with pytest.raises(ValueError):
        IndexConfig(0)


def _aged_channel(h, years):
    oldest = AS_OF - timedelta(seconds=years * SECONDS_PER_YEAR)
    videos = [Video("first", 5, oldest)]
    videos += [Video(f"v{i}", h * 100_000, AS_OF - timedelta(hours=i + 1)) for i in range(h)]
    return Channel("aged", videos)


def test_normalized_h_two_years():
    assert normalized_h_index(_aged_channel(44, 2.0), U5, AS_OF) == pytest.approx(22.0, rel=1e-12)


def test_normalized_h_back_solved_age():
    assert normalized_h_index(_aged_channel(64, 2.883), U5, AS_OF) == pytest.approx(22.2, abs=0.05)


def test_normalized_h_uses_oldest_dated_video():
    c = Channel("c", [Video("a", 300_000, AS_OF - timedelta(days=365.25)),
                      Video("b", 300_000), Video("c", 300_000, AS_OF - timedelta(days=10))])
    assert normalized_h_index(c, U5, AS_OF) == pytest.approx(3.0)


def test_normalized_h_errors():
    with pytest.raises(ZeroAgeError, match="zero active age"):
        normalized_h_index(Channel("c", [Video("a", 10, AS_OF)]), U5, AS_OF)
    with pytest.raises(AgeUnavailableError, match="age unavailable"):
        normalized_h_index(ch([1, 2, 3]), U5, AS_OF)
    with pytest.raises(AgeUnavailableError):
        normalized_h_index(ch([]), U5, AS_OF)
    with pytest.raises(TypeError):
        normalized_h_index(_aged_channel(3, 1.0), U5)


@given(st.floats(0.01, 50), st.integers(0, 40))
def test_normalized_h_inverse_in_age(years, h):
    one = normalized_h_index(_aged_channel(h, years), U5, AS_OF)
    two = normalized_h_index(_aged_channel(h, 2 * years), U5, AS_OF)
    if h == 0:
        assert one == two == 0
    else:
        assert two == pytest.approx(one / 2, rel=1e-12)


# ---------------------------------------------------------------------------
# properties


@given(views_lists, units)
def test_bounds_and_ordering(views, u):
    cfg, unc = IndexConfig(u), IndexConfig(u, cap_g_at_nv=False)
    h = h_index(views, cfg)
    assert 0 <= h <= len(views)
    assert h <= g_index(views, cfg) <= len(views)
    assert h <= g_index(views, unc)
    assert g_index(views, cfg) <= g_index(views, unc)


@given(views_lists, units)
def test_matches_oracles(views, u):
    assert h_index(views, IndexConfig(u)) == h_oracle(views, u)
    assert g_index(views, IndexConfig(u)) == g_oracle(views, u, cap=True)
    assert g_index(views, IndexConfig(u, cap_g_at_nv=False)) == g_oracle(views, u, cap=False)


@given(views_lists, units, st.randoms(use_true_random=False))
def test_permutation_invariance(views, u, rnd):
    shuffled = list(views)
    rnd.shuffle(shuffled)
    for cfg in (IndexConfig(u), IndexConfig(u, cap_g_at_nv=False)):
        assert h_index(views, cfg) == h_index(shuffled, cfg)
        assert g_index(views, cfg) == g_index(shuffled, cfg)


@given(views_lists, st.integers(0, 10**9), units)
def test_append_never_decreases(views, extra, u):
    for cfg in (IndexConfig(u), IndexConfig(u, cap_g_at_nv=False)):
        assert h_index(views + [extra], cfg) >= h_index(views, cfg)
        assert g_index(views + [extra], cfg) >= g_index(views, cfg)
    assert total_views(views + [extra]) >= total_views(views)


@given(views_lists, units, units)
def test_threshold_monotonicity(views, u1, u2):
    lo, hi = sorted((u1, u2))
    assert h_index(views, IndexConfig(lo)) >= h_index(views, IndexConfig(hi))


@pytest.mark.parametrize("h", [1, 5, 79])
def test_deletion_can_lower_h(h):
    views = [h * 100_000] * h
    assert h_index(views, U5) == h
    assert h_index(views[1:], U5) == h - 1


def test_random_oracle_sweep_small():
    rng = random.Random(7)
    for _ in range(500):
        views = [int(10 ** rng.uniform(0, 8)) for _ in range(rng.randint(0, 60))]
        u = rng.choice([10_000, 100_000, 1_000_000])
        assert h_index(views, IndexConfig(u)) == h_oracle(views, u)
        assert g_index(views, IndexConfig(u)) == g_oracle(views, u)
