"""Domain types: videos, channels, channel categories and index settings."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Optional, Sequence

MAX_VIEW_COUNT = 2**63 - 1
DEFAULT_UNIT = 100_000


class ChannelType(str, enum.Enum):
    """The nine creator categories a channel may declare."""

    COMEDIANS = "Comedians"
    DIRECTORS = "Directors"
    GURUS = "Gurus"
    MUSICIANS = "Musicians"
    NON_PROFIT = "Non-Profit"
    PARTNERS = "Partners"
    POLITICIANS = "Politicians"
    REPORTERS = "Reporters"
    SPONSORS = "Sponsors"

    @classmethod
    def parse(cls, text: str) -> "ChannelType":
        """Case-insensitive lookup by feed name (``"non-profit"`` works)."""
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        names = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown channel type {text!r}; expected one of: {names}")

    def __str__(self) -> str:
        return self.value


_TS_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(?:\.(\d{1,9}))?)?)?"
    r"(Z|[+-]\d{2}:?\d{2})?$"
)


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 / RFC 3339 timestamp into an aware UTC datetime.

    Accepts the trailing ``Z`` used by Atom feeds and a bare date. Naive
    inputs are taken to be UTC.
    """
    m = _TS_RE.match(text.strip())
    if not m:
        raise ValueError(f"invalid timestamp {text!r}")
    year, month, day, hh, mm, ss, frac, tz = m.groups()
    micro = int((frac or "0").ljust(6, "0")[:6])
    tzinfo = timezone.utc
    if tz and tz != "Z":
        sign = 1 if tz[0] == "+" else -1
        digits = tz[1:].replace(":", "")
        tzinfo = timezone(sign * timedelta(hours=int(digits[:2]), minutes=int(digits[2:])))
    dt = datetime(
        int(year), int(month), int(day), int(hh or 0), int(mm or 0), int(ss or 0), micro,
        tzinfo=tzinfo,
    )
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Canonical text form: UTC, ``Z`` suffix, microseconds only when nonzero."""
    dt = as_utc(dt)
    text = dt.strftime("%Y-%m-%dT%H:%M:%S")
    if dt.microsecond:
        text += f".{dt.microsecond:06d}"
    return text + "Z"


def as_utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _check_count(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{what} must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{what} must be non-negative, got {value}")
    if value > MAX_VIEW_COUNT:
        raise ValueError(f"{what} exceeds 64-bit range")


@dataclass(frozen=True)
class Video:
    id: str
    view_count: int
    published: Optional[datetime] = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("video id must be non-empty")
        _check_count(self.view_count, "view_count")
        if self.published is not None:
            object.__setattr__(self, "published", as_utc(self.published))


@dataclass(frozen=True)
class Channel:
    id: str
    videos: tuple[Video, ...] = ()
    category: Optional[ChannelType] = None
    subscriber_count: Optional[int] = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("channel id must be non-empty")
        object.__setattr__(self, "videos", tuple(self.videos))
        if self.category is not None and not isinstance(self.category, ChannelType):
            object.__setattr__(self, "category", ChannelType.parse(self.category))
        if self.subscriber_count is not None:
            _check_count(self.subscriber_count, "subscriber_count")

    @classmethod
    def from_views(cls, id: str, views: Sequence[int], **kwargs) -> "Channel":
        """Convenience constructor; videos get ids ``<id>#<i>``."""
        videos = tuple(Video(f"{id}#{i}", v) for i, v in enumerate(views))
        return cls(id, videos, **kwargs)

    @property
    def view_counts(self) -> list[int]:
        return [v.view_count for v in self.videos]


@dataclass(frozen=True)
class IndexConfig:
    """Threshold unit (views per index point) and the g-index cap policy."""

    unit_u: int = DEFAULT_UNIT
    cap_g_at_nv: bool = True

    def __post_init__(self):
        if isinstance(self.unit_u, bool) or not isinstance(self.unit_u, int):
            raise TypeError("unit_u must be an integer")
        if self.unit_u < 1:
            raise ValueError(f"unit_u must be >= 1, got {self.unit_u}")


DEFAULT_CONFIG = IndexConfig()
