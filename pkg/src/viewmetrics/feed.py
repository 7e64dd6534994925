"""Client for GData-style paginated Atom feeds of channels and uploads.

Wire format (a subset of GData Atom v2)::

    <feed xmlns="http://www.w3.org/2005/Atom"
          xmlns:yt="http://gdata.youtube.com/schemas/2007">
      <updated>2013-01-03T00:00:00.000Z</updated>
      <entry>
        <id>tag:youtube.com,2008:video:abc</id>
        <published>2010-05-01T12:00:00.000Z</published>
        <author><name>somechannel</name></author>
        <yt:statistics viewCount="12345" subscriberCount="10"/>
      </entry>
    </feed>

A user profile is served as a bare ``<entry>`` document and may carry a
``<category scheme=".../channeltypes.cat" term="Comedians"/>`` element.
Unknown elements are ignored.
"""

from __future__ import annotations

import logging
import math
import threading
import time
import urllib.error
import urllib.request
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Optional, Sequence
from urllib.parse import quote
from xml.parsers import expat

from .errors import FeedError, FeedHTTPError, FeedParseError, UnknownChannelError
from .model import Channel, ChannelType, Video, parse_timestamp

log = logging.getLogger(__name__)

ATOM_NS = "http://www.w3.org/2005/Atom"
YT_NS = "http://gdata.youtube.com/schemas/2007"
CHANNEL_TYPE_SCHEME = "http://gdata.youtube.com/schemas/2007/channeltypes.cat"

ORDERINGS = ("most_subscribed", "most_viewed")


@dataclass(frozen=True)
class FeedConfig:
    base_url: str
    page_size: int = 50
    max_videos_per_channel: int = 500
    inter_channel_delay: float = 6.0
    channel_type_filter: Optional[ChannelType] = None
    max_concurrency: int = 1
    retry_attempts: int = 3
    retry_backoff: float = 1.0
    timeout: float = 30.0

    def __post_init__(self):
        object.__setattr__(self, "base_url", self.base_url.rstrip("/"))
        if not 1 <= self.page_size <= 50:
            raise ValueError(f"page_size must be in 1..50, got {self.page_size}")
        if self.max_videos_per_channel < 1 or self.max_videos_per_channel % self.page_size:
            raise ValueError("max_videos_per_channel must be a positive multiple of page_size")
        if self.inter_channel_delay < 0:
            raise ValueError("inter_channel_delay must be >= 0")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        if self.retry_attempts < 1:
            raise ValueError("retry_attempts must be >= 1")
        ctf = self.channel_type_filter
        if ctf is not None and not isinstance(ctf, ChannelType):
            object.__setattr__(self, "channel_type_filter", ChannelType.parse(ctf))


@dataclass(frozen=True)
class FeedEntryStats:
    author: str
    view_count: Optional[int] = None
    subscriber_count: Optional[int] = None
    published: Optional[datetime] = None
    entry_id: Optional[str] = None
    channel_type: Optional[ChannelType] = None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class FeedPage:
    entries: tuple[FeedEntryStats, ...]
    updated: Optional[datetime] = None


# ---------------------------------------------------------------------------
# Parsing


def _byte_offset(data: bytes) -> Optional[int]:
    p = expat.ParserCreate()
    try:
        p.Parse(data, True)
    except expat.ExpatError:
        return p.ErrorByteIndex
    return None


def _text(elem, path) -> Optional[str]:
    found = elem.find(path)
    if found is None or found.text is None:
        return None
    return found.text.strip() or None


def _count_attr(stats, name, warnings) -> Optional[int]:
    raw = stats.get(name)
    if raw is None:
        return None
    raw = raw.strip()
    if raw.isascii() and raw.isdigit():
        return int(raw)
    warnings.append(f"non-numeric {name} {raw!r}")
    return None


def _parse_entry(entry) -> FeedEntryStats:
    warnings: list[str] = []
    author = _text(entry, f"{{{ATOM_NS}}}author/{{{ATOM_NS}}}name")
    if author is None:
        raise FeedParseError("entry without author/name")
    view_count = subscriber_count = None
    stats = entry.find(f"{{{YT_NS}}}statistics")
    if stats is not None:
        view_count = _count_attr(stats, "viewCount", warnings)
        subscriber_count = _count_attr(stats, "subscriberCount", warnings)
    published = None
    raw_pub = _text(entry, f"{{{ATOM_NS}}}published")
    if raw_pub is not None:
        try:
            published = parse_timestamp(raw_pub)
        except ValueError:
            warnings.append(f"invalid published timestamp {raw_pub!r}")
    channel_type = None
    for cat in entry.iterfind(f"{{{ATOM_NS}}}category"):
        if cat.get("scheme") == CHANNEL_TYPE_SCHEME:
            try:
                channel_type = ChannelType.parse(cat.get("term", ""))
            except ValueError:
                warnings.append(f"unknown channel type {cat.get('term')!r}")
    return FeedEntryStats(
        author=author,
        view_count=view_count,
        subscriber_count=subscriber_count,
        published=published,
        entry_id=_text(entry, f"{{{ATOM_NS}}}id"),
        channel_type=channel_type,
        warnings=tuple(warnings),
    )


def parse_feed(xml_bytes: bytes) -> FeedPage:
    """Parse a feed (or bare entry) document, keeping document order."""
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        line, column = exc.position
        raise FeedParseError(
            f"malformed feed XML: {str(exc).split(': line')[0]}", offset=_byte_offset(xml_bytes), line=line, column=column
        ) from None
    if root.tag == f"{{{ATOM_NS}}}entry":
        return FeedPage((_parse_entry(root),))
    if root.tag != f"{{{ATOM_NS}}}feed":
        raise FeedParseError(f"unexpected root element {root.tag!r}")
    updated = None
    raw = _text(root, f"{{{ATOM_NS}}}updated")
    if raw is not None:
        try:
            updated = parse_timestamp(raw)
        except ValueError:
            log.warning("ignoring invalid feed <updated> %r", raw)
    entries = tuple(_parse_entry(e) for e in root.iterfind(f"{{{ATOM_NS}}}entry"))
    return FeedPage(entries, updated)


def parse_feed_page(xml_bytes: bytes) -> list[FeedEntryStats]:
    return list(parse_feed(xml_bytes).entries)


# ---------------------------------------------------------------------------
# URLs


def channel_list_path(ordering: str, channel_type: Optional[ChannelType] = None) -> str:
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}, got {ordering!r}")
    suffix = f"_{channel_type.value}" if channel_type is not None else ""
    return f"/feeds/api/channelstandardfeeds/{ordering}{suffix}"


def channel_list_url(cfg: FeedConfig, ordering: str, start: int) -> str:
    path = channel_list_path(ordering, cfg.channel_type_filter)
    return (
        f"{cfg.base_url}{path}?start-index={start}&time=all_time"
        f"&max-results={cfg.page_size}&v=2"
    )


def uploads_url(cfg: FeedConfig, channel_id: str, start: int) -> str:
    return (
        f"{cfg.base_url}/feeds/api/users/{quote(channel_id, safe='')}/uploads"
        f"?start-index={start}&max-results={cfg.page_size}&orderby=viewCount&racy=include"
    )


def profile_url(cfg: FeedConfig, channel_id: str) -> str:
    return f"{cfg.base_url}/feeds/api/users/{quote(channel_id, safe='')}"


# ---------------------------------------------------------------------------
# Transport


class PolitenessGate:
    """Shared limiter spacing successive channel fetches by ``delay`` seconds."""

    def __init__(self, delay: float, clock=time.monotonic, sleep=time.sleep):
        self.delay = delay
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._last: Optional[float] = None

    def wait(self) -> None:
        with self._lock:
            if self._last is not None:
                remaining = self._last + self.delay - self._clock()
                if remaining > 0:
                    self._sleep(remaining)
            self._last = self._clock()


def urllib_get(url: str, timeout: float) -> bytes:
    """Default transport: GET via urllib, mapping failures to FeedHTTPError."""
    req = urllib.request.Request(url, headers={"User-Agent": "viewmetrics"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return resp.read()
    except urllib.error.HTTPError as exc:
        raise FeedHTTPError(url, exc.code, str(exc.reason)) from None
    except (urllib.error.URLError, OSError) as exc:
        reason = getattr(exc, "reason", exc)
        raise FeedHTTPError(url, None, str(reason)) from None


def _retryable(exc: FeedHTTPError) -> bool:
    return exc.status is None or exc.status >= 500 or exc.status == 429


@dataclass(frozen=True)
class ChannelListing:
    ids: tuple[str, ...]
    incomplete: bool = False
    updated: Optional[datetime] = None
    requests: int = 0


class FeedClient:
    """Fetches channel lists, uploads and profiles from one feed service.

    ``transport`` maps (url, timeout) to the response body, raising
    :class:`FeedHTTPError`; ``sleep`` and ``clock`` are injectable for tests.
    """

    def __init__(
        self,
        cfg: FeedConfig,
        transport: Callable[[str, float], bytes] = urllib_get,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.cfg = cfg
        self._transport = transport
        self._sleep = sleep
        self.gate = PolitenessGate(cfg.inter_channel_delay, clock=clock, sleep=sleep)

    def get(self, url: str) -> bytes:
        delay = self.cfg.retry_backoff
        for attempt in range(1, self.cfg.retry_attempts + 1):
            try:
                return self._transport(url, self.cfg.timeout)
            except FeedHTTPError as exc:
                if not _retryable(exc) or attempt == self.cfg.retry_attempts:
                    raise
                log.info("attempt %d for %s failed (%s); retrying in %.1fs", attempt, url, exc, delay)
                self._sleep(delay)
                delay *= 2
        raise AssertionError("unreachable")

    def fetch_top_channels(self, ordering: str, count: int) -> ChannelListing:
        if count < 1:
            raise ValueError("count must be >= 1")
        ps = self.cfg.page_size
        ids: list[str] = []
        seen = set()
        updated = None
        pages = math.ceil(count / ps)
        for i in range(pages):
            page = parse_feed(self.get(channel_list_url(self.cfg, ordering, 1 + i * ps)))
            if updated is None:
                updated = page.updated
            for entry in page.entries:
                if entry.author not in seen:
                    seen.add(entry.author)
                    ids.append(entry.author)
        incomplete = len(ids) < count
        if incomplete:
            log.warning("channel feed returned %d of %d requested channels", len(ids), count)
        return ChannelListing(tuple(ids[:count]), incomplete, updated, pages)

    def fetch_channel_videos(self, channel_id: str) -> tuple[list[FeedEntryStats], bool]:
        """All upload entries (view-count order requested), capped at the configured max."""
        if not channel_id:
            raise ValueError("channel_id must be non-empty")
        cap = self.cfg.max_videos_per_channel
        ps = self.cfg.page_size
        entries: list[FeedEntryStats] = []
        for start in range(1, cap + 1, ps):
            try:
                body = self.get(uploads_url(self.cfg, channel_id, start))
            except FeedHTTPError as exc:
                if exc.status == 404 and start == 1:
                    raise UnknownChannelError(channel_id) from None
                raise
            page = parse_feed(body).entries
            entries.extend(page)
            if len(page) < ps:
                break
        entries = entries[:cap]
        return entries, len(entries) >= cap

    def fetch_channel_profile(self, channel_id: str) -> FeedEntryStats:
        if not channel_id:
            raise ValueError("channel_id must be non-empty")
        try:
            body = self.get(profile_url(self.cfg, channel_id))
        except FeedHTTPError as exc:
            if exc.status == 404:
                raise UnknownChannelError(channel_id) from None
            raise
        entries = parse_feed(body).entries
        if not entries:
            raise UnknownChannelError(channel_id)
        return entries[0]


# ---------------------------------------------------------------------------
# Whole-run collection


@dataclass
class ChannelFetch:
    channel: Optional[Channel] = None
    missing: int = 0
    truncated: bool = False
    error: Optional[str] = None
    warnings: list[str] = field(default_factory=list)


def build_channel(
    channel_id: str,
    entries: Sequence[FeedEntryStats],
    profile: Optional[FeedEntryStats],
    category: Optional[ChannelType] = None,
) -> tuple[Channel, int]:
    """Turn raw entries into a Channel; returns it with the count of 'na' entries."""
    videos = []
    missing = 0
    for i, e in enumerate(entries):
        if e.view_count is None:
            missing += 1
            continue
        videos.append(Video(e.entry_id or f"{channel_id}#{i}", e.view_count, e.published))
    subs = None
    if profile is not None:
        subs = profile.subscriber_count
        category = category or profile.channel_type
    return Channel(channel_id, tuple(videos), category, subs), missing


def fetch_channel(client: FeedClient, channel_id: str, category=None) -> ChannelFetch:
    client.gate.wait()
    result = ChannelFetch()
    try:
        entries, result.truncated = client.fetch_channel_videos(channel_id)
        profile = client.fetch_channel_profile(channel_id)
    except FeedError as exc:
        result.error = str(exc)
        return result
    for e in entries + [profile]:
        result.warnings.extend(f"{channel_id}: {w}" for w in e.warnings)
    result.channel, result.missing = build_channel(channel_id, entries, profile, category)
    return result


def fetch_channels(client: FeedClient, channel_ids: Sequence[str], category=None) -> list[ChannelFetch]:
    """Fetch many channels, at most ``max_concurrency`` at once; results keep input order."""
    if client.cfg.max_concurrency == 1:
        return [fetch_channel(client, cid, category) for cid in channel_ids]
    with ThreadPoolExecutor(max_workers=client.cfg.max_concurrency) as pool:
        return list(pool.map(lambda cid: fetch_channel(client, cid, category), channel_ids))
