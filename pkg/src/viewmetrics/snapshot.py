"""Snapshot container plus its two on-disk formats.

Views TSV (one line per channel)::

    <channel>\\t<views>\\t<views>...\\tna\\tna

Subscribers TSV: ``<channel>\\t<count-or-na>``. The JSON document is the
only format that carries timestamps, categories and cap metadata.
Both TSV writers emit the canonical order: channels by descending total
views (ties by id), videos by descending views, ``na`` entries last.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Mapping, Optional

from .errors import SnapshotFormatError
from .indices import total_views
from .model import (
    DEFAULT_UNIT,
    Channel,
    ChannelType,
    Video,
    as_utc,
    format_timestamp,
    parse_timestamp,
)

NA = "na"
JSON_FORMAT = "viewmetrics.snapshot/1"


def _video_key(v: Video):
    return (-v.view_count, v.id.encode("utf-8"))


def _canonical_channel(ch: Channel) -> Channel:
    videos = tuple(sorted(ch.videos, key=_video_key))
    if videos == ch.videos:
        return ch
    return Channel(ch.id, videos, ch.category, ch.subscriber_count)


@dataclass(frozen=True)
class Snapshot:
    """A dated, immutable capture of channels and their counts.

    ``missing`` holds, per channel id, how many entries had unreadable view
    statistics; those entries are excluded from ``videos``. ``truncated``
    lists channels whose uploads hit ``max_videos_cap``.
    """

    channels: tuple[Channel, ...] = ()
    collected_at: Optional[datetime] = None
    unit_u: int = DEFAULT_UNIT
    max_videos_cap: Optional[int] = None
    missing: Mapping[str, int] = field(default_factory=dict)
    truncated: frozenset = frozenset()

    def __post_init__(self):
        seen = set()
        for ch in self.channels:
            if ch.id in seen:
                raise ValueError(f"duplicate channel id {ch.id!r}")
            seen.add(ch.id)
        channels = sorted(
            (_canonical_channel(ch) for ch in self.channels),
            key=lambda ch: (-total_views(ch), ch.id.encode("utf-8")),
        )
        object.__setattr__(self, "channels", tuple(channels))
        missing = {k: int(v) for k, v in self.missing.items() if v}
        for k, v in missing.items():
            if k not in seen:
                raise ValueError(f"missing tally for unknown channel {k!r}")
            if v < 0:
                raise ValueError(f"negative missing tally for {k!r}")
        object.__setattr__(self, "missing", dict(sorted(missing.items())))
        truncated = frozenset(self.truncated)
        if not truncated <= seen:
            raise ValueError(f"truncated flag for unknown channels {sorted(truncated - seen)}")
        object.__setattr__(self, "truncated", truncated)
        if self.collected_at is not None:
            object.__setattr__(self, "collected_at", as_utc(self.collected_at))

    def channel(self, channel_id: str) -> Channel:
        for ch in self.channels:
            if ch.id == channel_id:
                return ch
        raise KeyError(channel_id)

    def missing_for(self, channel_id: str) -> int:
        return self.missing.get(channel_id, 0)


# ---------------------------------------------------------------------------
# TSV


def _tsv_id(cid: str) -> str:
    if "\t" in cid or "\n" in cid or "\r" in cid:
        raise ValueError(f"channel id {cid!r} cannot be written to TSV")
    return cid


def write_views_tsv(snapshot: Snapshot) -> bytes:
    lines = []
    for ch in snapshot.channels:
        _tsv_id(ch.id)
        tokens = [ch.id]
        tokens += [str(v.view_count) for v in ch.videos]
        tokens += [NA] * snapshot.missing_for(ch.id)
        lines.append("\t".join(tokens) + "\n")
    return "".join(lines).encode("utf-8")


def write_subscribers_tsv(snapshot: Snapshot) -> bytes:
    lines = []
    for ch in snapshot.channels:
        count = NA if ch.subscriber_count is None else str(ch.subscriber_count)
        lines.append(f"{_tsv_id(ch.id)}\t{count}\n")
    return "".join(lines).encode("utf-8")


def _parse_count(token: str, lineno: int) -> Optional[int]:
    if token == NA:
        return None
    if not token.isascii() or not token.isdigit():
        raise SnapshotFormatError(f"invalid count token {token!r}", lineno)
    return int(token)


def _tsv_lines(data: bytes):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SnapshotFormatError(f"not valid UTF-8 at byte {exc.start}") from None
    if text and not text.endswith("\n"):
        text += "\n"
    for lineno, line in enumerate(text.split("\n")[:-1], 1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line:
            raise SnapshotFormatError("empty line", lineno)
        yield lineno, line.split("\t")


def read_views_tsv(
    data: bytes,
    subscribers: Optional[Mapping[str, Optional[int]]] = None,
    unit_u: int = DEFAULT_UNIT,
) -> Snapshot:
    """Load a views TSV into a partial snapshot (no dates, categories or cap).

    Video ids are synthesized as ``<channel>#<rank>``.
    """
    channels = []
    missing = {}
    seen = set()
    for lineno, tokens in _tsv_lines(data):
        cid = tokens[0]
        if not cid:
            raise SnapshotFormatError("empty channel id", lineno)
        if cid in seen:
            raise SnapshotFormatError(f"duplicate channel id {cid!r}", lineno)
        seen.add(cid)
        views = []
        na = 0
        for tok in tokens[1:]:
            count = _parse_count(tok, lineno)
            if count is None:
                na += 1
            else:
                views.append(count)
        try:
            ch = Channel.from_views(
                cid,
                sorted(views, reverse=True),
                subscriber_count=(subscribers or {}).get(cid),
            )
        except ValueError as exc:
            raise SnapshotFormatError(str(exc), lineno) from None
        channels.append(ch)
        if na:
            missing[cid] = na
    return Snapshot(tuple(channels), unit_u=unit_u, missing=missing)


def read_subscribers_tsv(data: bytes) -> dict[str, Optional[int]]:
    out: dict[str, Optional[int]] = {}
    for lineno, tokens in _tsv_lines(data):
        if len(tokens) != 2 or not tokens[0]:
            raise SnapshotFormatError("expected '<channel>\\t<count>'", lineno)
        if tokens[0] in out:
            raise SnapshotFormatError(f"duplicate channel id {tokens[0]!r}", lineno)
        out[tokens[0]] = _parse_count(tokens[1], lineno)
    return out


# ---------------------------------------------------------------------------
# JSON


def snapshot_to_dict(snapshot: Snapshot) -> dict:
    return {
        "format": JSON_FORMAT,
        "collected_at": _ts(snapshot.collected_at),
        "unit_u": snapshot.unit_u,
        "max_videos_cap": snapshot.max_videos_cap,
        "channels": [
            {
                "id": ch.id,
                "category": None if ch.category is None else ch.category.value,
                "subscriber_count": ch.subscriber_count,
                "missing": snapshot.missing_for(ch.id),
                "truncated": ch.id in snapshot.truncated,
                "videos": [
                    {"id": v.id, "view_count": v.view_count, "published": _ts(v.published)}
                    for v in ch.videos
                ],
            }
            for ch in snapshot.channels
        ],
    }


def write_json(snapshot: Snapshot) -> bytes:
    doc = snapshot_to_dict(snapshot)
    return (json.dumps(doc, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def _ts(dt):
    return None if dt is None else format_timestamp(dt)


def _opt_ts(value, where):
    if value is None:
        return None
    try:
        return parse_timestamp(value)
    except (ValueError, AttributeError):
        raise SnapshotFormatError(f"{where}: invalid timestamp {value!r}") from None


def read_json(data: bytes) -> Snapshot:
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise SnapshotFormatError(f"not valid UTF-8 at byte {exc.start}") from None
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("format") != JSON_FORMAT:
        raise SnapshotFormatError(f"not a {JSON_FORMAT} document")
    try:
        channels = []
        missing = {}
        truncated = set()
        for i, c in enumerate(doc["channels"]):
            where = f"channels[{i}]"
            videos = tuple(
                Video(v["id"], v["view_count"], _opt_ts(v.get("published"), f"{where}.videos[{j}]"))
                for j, v in enumerate(c["videos"])
            )
            category = c.get("category")
            channels.append(
                Channel(
                    c["id"],
                    videos,
                    None if category is None else ChannelType.parse(category),
                    c.get("subscriber_count"),
                )
            )
            if c.get("missing"):
                missing[c["id"]] = c["missing"]
            if c.get("truncated"):
                truncated.add(c["id"])
        return Snapshot(
            tuple(channels),
            collected_at=_opt_ts(doc.get("collected_at"), "collected_at"),
            unit_u=doc.get("unit_u", DEFAULT_UNIT),
            max_videos_cap=doc.get("max_videos_cap"),
            missing=missing,
            truncated=frozenset(truncated),
        )
    except SnapshotFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"invalid snapshot document: {exc}") from None


def load_snapshot(data: bytes, subscribers: Optional[bytes] = None) -> Snapshot:
    """Read either format, sniffing JSON by its leading brace."""
    if data.lstrip()[:1] == b"{":
        return read_json(data)
    subs = read_subscribers_tsv(subscribers) if subscribers is not None else None
    return read_views_tsv(data, subs)

