"""Deterministic generator for the bundled demo feed corpus and fixture snapshots.

The corpus under ``viewmetrics/data/corpus`` is produced by :func:`write_corpus`
and checked in; the test suite regenerates it and compares bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape, quoteattr

from .feed import ATOM_NS, CHANNEL_TYPE_SCHEME, YT_NS
from .model import Channel, ChannelType, Video, format_timestamp
from .snapshot import Snapshot, write_json

PAGE_SIZE = 50
UPDATED = datetime(2013, 1, 3, tzinfo=timezone.utc)
DATA_DIR = Path(__file__).parent / "data"
CORPUS_DIR = DATA_DIR / "corpus"

# Sorted h values of the top-25 summary used by the index fixture.
TOP25_H = (79, 77, 70, 69, 64, 61, 61, 59, 58, 58, 57, 56, 55, 55, 54, 54, 54, 50, 48, 48, 47, 47, 46, 46, 44)


@dataclass
class DemoVideo:
    views: object  # int, None (no statistics element) or a raw attribute string
    published: datetime


@dataclass
class DemoChannel:
    name: str
    videos: list
    category: Optional[ChannelType] = None
    subscribers: object = None  # None means the profile has no statistics element


def _dates(n: int, first: datetime, step_days: float) -> list[datetime]:
    return [first + timedelta(days=step_days * i) for i in range(n)]


def demo_channels() -> list[DemoChannel]:
    y2009 = datetime(2009, 3, 1, 12, tzinfo=timezone.utc)
    y2010 = datetime(2010, 6, 15, 8, tzinfo=timezone.utc)
    y2011 = datetime(2011, 2, 1, 18, tzinfo=timezone.utc)

    prolific = [DemoVideo(1_000_000 + 1_000 * (59 - i), d) for i, d in enumerate(_dates(60, y2010, 9))]
    viral = [DemoVideo(1_000_000_000, y2011)] + [
        DemoVideo(5_000 - 500 * i, d) for i, d in enumerate(_dates(4, y2011 + timedelta(days=30), 20))
    ]
    archive = [DemoVideo(50_000_000 // (i + 1), d) for i, d in enumerate(_dates(520, y2009, 2))]
    patchy = [
        DemoVideo(900_000, y2010),
        DemoVideo(640_000, y2010 + timedelta(days=40)),
        DemoVideo(None, y2010 + timedelta(days=80)),
        DemoVideo(410_000, y2010 + timedelta(days=120)),
        DemoVideo("n/a", y2010 + timedelta(days=160)),
        DemoVideo(120_000, y2010 + timedelta(days=200)),
        DemoVideo(80_000, y2010 + timedelta(days=240)),
        DemoVideo(7_500, y2010 + timedelta(days=280)),
    ]
    small = [DemoVideo(v, d) for v, d in zip((300, 200, 100), _dates(3, y2011, 45))]
    garage = [DemoVideo(250_000 - 40_000 * i, d) for i, d in enumerate(_dates(5, y2009, 100))]
    troupe = [DemoVideo(2_400_000 - 70_000 * i, d) for i, d in enumerate(_dates(30, y2009, 30))]
    late = [DemoVideo(150_000 - 10_000 * i, d) for i, d in enumerate(_dates(12, y2011, 15))]
    return [
        DemoChannel("prolificshow", prolific, ChannelType.COMEDIANS, 6_141_000),
        DemoChannel("viralhit", viral, ChannelType.MUSICIANS, 2_292_000),
        DemoChannel("bigarchive", archive, ChannelType.GURUS, 1_500_000),
        DemoChannel("patchystats", patchy, ChannelType.REPORTERS, 85_000),
        DemoChannel("smallnews", small, ChannelType.REPORTERS, 2_500),
        DemoChannel("quietgarage", garage, None, None),
        DemoChannel("sketchtroupe", troupe, ChannelType.COMEDIANS, 3_123_000),
        DemoChannel("latecomer", late, ChannelType.DIRECTORS, 40_000),
    ]


def _feed(entries: Sequence[str], updated: datetime = UPDATED) -> bytes:
    body = "".join(entries)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<feed xmlns="{ATOM_NS}" xmlns:yt="{YT_NS}">\n'
        f"  <updated>{format_timestamp(updated)}</updated>\n"
        f"{body}</feed>\n"
    ).encode("utf-8")


def _video_entry(channel: str, index: int, video: DemoVideo) -> str:
    stats = ""
    if video.views is not None:
        stats = f"    <yt:statistics favoriteCount=\"0\" viewCount={quoteattr(str(video.views))}/>\n"
    return (
        "  <entry>\n"
        f"    <id>tag:youtube.com,2008:video:{escape(channel)}-{index:03d}</id>\n"
        f"    <published>{format_timestamp(video.published)}</published>\n"
        f"    <title>{escape(channel)} upload {index}</title>\n"
        f"    <author><name>{escape(channel)}</name></author>\n"
        f"{stats}"
        "  </entry>\n"
    )


def _channel_entry(name: str) -> str:
    return (
        "  <entry>\n"
        f"    <id>tag:youtube.com,2008:channel:{escape(name)}</id>\n"
        f"    <author><name>{escape(name)}</name></author>\n"
        "  </entry>\n"
    )


def _profile(ch: DemoChannel) -> bytes:
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<entry xmlns="{ATOM_NS}" xmlns:yt="{YT_NS}">\n',
        f"  <id>tag:youtube.com,2008:user:{escape(ch.name)}</id>\n",
        f"  <author><name>{escape(ch.name)}</name></author>\n",
    ]
    if ch.category is not None:
        parts.append(f'  <category scheme="{CHANNEL_TYPE_SCHEME}" term="{ch.category.value}"/>\n')
    if ch.subscribers is not None:
        parts.append(f'  <yt:statistics subscriberCount="{ch.subscribers}" totalUploadViews="0"/>\n')
    parts.append("</entry>\n")
    return "".join(parts).encode("utf-8")


def _view_order(videos: list) -> list:
    def key(v):
        return -v.views if isinstance(v.views, int) else 1

    return sorted(videos, key=key)


def corpus_files() -> dict[str, bytes]:
    """Relative path -> file contents for the whole demo corpus."""
    files: dict[str, bytes] = {}
    channels = demo_channels()
    by_name = {c.name: c for c in channels}

    def listing(feed: str, pages: Sequence[Sequence[str]]):
        for i, names in enumerate(pages):
            files[f"feeds/api/channelstandardfeeds/{feed}/start-{1 + i * PAGE_SIZE}.xml"] = _feed(
                [_channel_entry(n) for n in names]
            )

    listing(
        "most_subscribed",
        [
            ["prolificshow", "sketchtroupe", "viralhit", "bigarchive", "patchystats", "quietgarage"],
            ["prolificshow", "latecomer", "smallnews"],
        ],
    )
    listing("most_viewed", [["viralhit", "bigarchive", "ghostchannel", "prolificshow"]])
    for ctype in ChannelType:
        members = [c.name for c in channels if c.category is ctype]
        if members:
            members.sort(key=lambda n: -by_name[n].subscribers)
            listing(f"most_subscribed_{ctype.value}", [members])

    for ch in channels:
        base = f"feeds/api/users/{ch.name}"
        files[f"{base}/index.xml"] = _profile(ch)
        ordered = _view_order(ch.videos)
        for p in range(0, max(len(ordered), 1), PAGE_SIZE):
            chunk = ordered[p:p + PAGE_SIZE]
            entries = [_video_entry(ch.name, p + i, v) for i, v in enumerate(chunk)]
            files[f"{base}/uploads/start-{p + 1}.xml"] = _feed(entries)
    return dict(sorted(files.items()))


def write_corpus(root: Path = CORPUS_DIR) -> list[Path]:
    written = []
    for rel, data in corpus_files().items():
        path = Path(root) / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# In-memory fixture snapshots


def top25_snapshot(unit_u: int = 100_000) -> Snapshot:
    """25 channels whose h-indices are exactly the values in ``TOP25_H``.

    Each channel has h videos at h*u views plus three near-miss videos at
    h*u - 1, which cannot lift the index.
    """
    channels = []
    first = datetime(2009, 1, 1, tzinfo=timezone.utc)
    for rank, h in enumerate(TOP25_H, 1):
        cid = f"top{rank:02d}"
        views = [h * unit_u] * h + [h * unit_u - 1] * 3
        videos = tuple(
            Video(f"{cid}-{i:03d}", v, first + timedelta(days=7 * i + rank))
            for i, v in enumerate(views)
        )
        channels.append(Channel(cid, videos))
    return Snapshot(tuple(channels), collected_at=UPDATED, unit_u=unit_u)


def viral_vs_prolific_snapshot() -> Snapshot:
    """One channel with a single 10^9-view hit, one with 60 videos of 10^6 views."""
    viral = Channel.from_views("viral", [1_000_000_000], subscriber_count=1_000)
    prolific = Channel.from_views("prolific", [1_000_000] * 60, subscriber_count=5_000)
    return Snapshot((viral, prolific), collected_at=UPDATED)


def fixture_snapshot_files() -> dict[str, bytes]:
    return {
        "top25.json": write_json(top25_snapshot()),
        "viral_vs_prolific.json": write_json(viral_vs_prolific_snapshot()),
    }


def write_fixture_snapshots(root: Path = DATA_DIR / "snapshots") -> list[Path]:
    written = []
    Path(root).mkdir(parents=True, exist_ok=True)
    for name, data in fixture_snapshot_files().items():
        path = Path(root) / name
        path.write_bytes(data)
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_corpus() + write_fixture_snapshots():
        print(p)
