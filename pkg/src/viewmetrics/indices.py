"""h-index, g-index, normalized h-index and total views over view counts.

All index math is exact integer arithmetic. Each function accepts either a
:class:`~viewmetrics.model.Channel` or a plain sequence of view counts.
"""

from __future__ import annotations

from datetime import datetime
from math import isqrt
from typing import Iterable, Union

from .errors import AgeUnavailableError, ViewSumOverflowError, ZeroAgeError
from .model import DEFAULT_CONFIG, MAX_VIEW_COUNT, Channel, IndexConfig, as_utc

SECONDS_PER_YEAR = 365.25 * 86400

ViewSource = Union[Channel, Iterable[int]]


def _views(source: ViewSource) -> list[int]:
    if isinstance(source, Channel):
        return source.view_counts
    return list(source)


def sorted_views(source: ViewSource) -> list[int]:
    """View counts in non-increasing order. The input is left untouched."""
    return sorted(_views(source), reverse=True)


def h_index(source: ViewSource, cfg: IndexConfig = DEFAULT_CONFIG) -> int:
    """Largest h such that at least h videos have ``>= h * unit_u`` views."""
    u = cfg.unit_u
    views = sorted_views(source)
    # views[k-1] >= k*u holds for a prefix of k, so bisect on it
    lo, hi = 0, len(views)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if views[mid - 1] >= mid * u:
            lo = mid
        else:
            hi = mid - 1
    return lo


def g_index(source: ViewSource, cfg: IndexConfig = DEFAULT_CONFIG) -> int:
    """Largest g such that the top g videos sum to at least ``g**2 * unit_u``.

    With ``cfg.cap_g_at_nv`` false, g may exceed the number of videos
    (missing videos count as zero views).
    """
    u = cfg.unit_u
    views = sorted_views(source)
    total = 0
    g = 0
    # prefix sums are concave and g^2*u convex, so the feasible set is 0..g
    for k, v in enumerate(views, 1):
        total += v
        if total < k * k * u:
            return g
        g = k
    if not cfg.cap_g_at_nv:
        g = max(g, isqrt(total // u))
    return g


def total_views(source: ViewSource) -> int:
    """Sum of all view counts; raises once the sum leaves the signed 64-bit range."""
    total = 0
    for v in _views(source):
        total += v
        if total > MAX_VIEW_COUNT:
            raise ViewSumOverflowError()
    return total


def channel_age_years(channel: Channel, as_of: datetime) -> float:
    """Years of 365.25 days between the oldest dated video and ``as_of``."""
    dates = [v.published for v in channel.videos if v.published is not None]
    if not dates:
        raise AgeUnavailableError(channel.id)
    oldest = min(dates)
    seconds = (as_utc(as_of) - oldest).total_seconds()
    if seconds < 0:
        raise ValueError(f"as_of precedes the oldest video of channel {channel.id!r}")
    if seconds == 0:
        raise ZeroAgeError(channel.id)
    return seconds / SECONDS_PER_YEAR


def normalized_h_index(
    channel: Channel, cfg: IndexConfig = DEFAULT_CONFIG, as_of: datetime | None = None
) -> float:
    """h-index divided by the channel's active age in years.

    ``as_of`` is required; it is a keyword with a None default only so the
    signature lines up with the other index functions.
    """
    if as_of is None:
        raise TypeError("normalized_h_index requires an explicit as_of timestamp")
    return h_index(channel, cfg) / channel_age_years(channel, as_of)
