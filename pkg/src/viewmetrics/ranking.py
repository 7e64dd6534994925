"""Rank tables per metric, per-category tables and metric correlation reports."""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Optional, Sequence, Union

from .errors import AgeUnavailableError, SampleTooSmallError, ZeroAgeError
from .indices import g_index, h_index, normalized_h_index, total_views
from .model import DEFAULT_CONFIG, Channel, ChannelType, IndexConfig, format_timestamp
from .snapshot import Snapshot
from .stats import CorrelationResult, Tail, correlation_test

log = logging.getLogger(__name__)

Number = Union[int, float]


class Metric(str, enum.Enum):
    TOTAL_VIEWS = "total_views"
    H_INDEX = "h_index"
    G_INDEX = "g_index"
    SUBSCRIBERS = "subscribers"
    NORMALIZED_H = "normalized_h"

    def __str__(self) -> str:
        return self.value


class MetricUnavailable(Exception):
    """The metric cannot be computed for one channel (internal signal)."""


def metric_value(
    channel: Channel, metric: Metric, cfg: IndexConfig = DEFAULT_CONFIG, as_of: Optional[datetime] = None
) -> Number:
    metric = Metric(metric)
    if metric is Metric.TOTAL_VIEWS:
        return total_views(channel)
    if metric is Metric.H_INDEX:
        return h_index(channel, cfg)
    if metric is Metric.G_INDEX:
        return g_index(channel, cfg)
    if metric is Metric.SUBSCRIBERS:
        if channel.subscriber_count is None:
            raise MetricUnavailable("subscriber count absent")
        return channel.subscriber_count
    if as_of is None:
        raise MetricUnavailable("no as_of timestamp for normalized h-index")
    try:
        return normalized_h_index(channel, cfg, as_of)
    except (AgeUnavailableError, ZeroAgeError) as exc:
        raise MetricUnavailable(str(exc)) from None


@dataclass(frozen=True)
class RankRow:
    rank: int
    channel: str
    value: Number
    total_views: Optional[int] = None


@dataclass(frozen=True)
class RankTable:
    metric: Metric
    rows: tuple[RankRow, ...]
    as_of: Optional[datetime]
    unit_u: int
    cap_g_at_nv: bool
    warnings: tuple[str, ...] = ()
    category: Optional[ChannelType] = None

    def as_dict(self) -> dict:
        out = {
            "metric": self.metric.value,
            "category": None if self.category is None else self.category.value,
            "as_of": None if self.as_of is None else format_timestamp(self.as_of),
            "config": {"unit_u": self.unit_u, "cap_g_at_nv": self.cap_g_at_nv},
            "rows": [],
            "warnings": list(self.warnings),
        }
        for row in self.rows:
            item = {"rank": row.rank, "channel": row.channel, "value": row.value}
            if row.total_views is not None:
                item["total_views"] = row.total_views
            out["rows"].append(item)
        return out


def competition_ranks(values: Sequence[Number]) -> list[int]:
    """1224-style ranks for values already sorted non-increasing."""
    ranks = []
    for i, v in enumerate(values):
        if i and v == values[i - 1]:
            ranks.append(ranks[-1])
        else:
            ranks.append(i + 1)
    return ranks


def _ranked(pairs: Iterable[tuple[Channel, Number]], top_n: int, with_views: bool) -> tuple[RankRow, ...]:
    ordered = sorted(pairs, key=lambda p: (-p[1], p[0].id.encode("utf-8")))
    ranks = competition_ranks([v for _, v in ordered])
    rows = []
    for rank, (ch, value) in zip(ranks[:top_n], ordered[:top_n]):
        rows.append(RankRow(rank, ch.id, value, total_views(ch) if with_views else None))
    return tuple(rows)


def rank_by_metric(
    snapshot: Snapshot,
    metric: Metric | str,
    cfg: IndexConfig = DEFAULT_CONFIG,
    top_n: int = 25,
    as_of: Optional[datetime] = None,
    channels: Optional[Sequence[Channel]] = None,
    category: Optional[ChannelType] = None,
    with_total_views: bool = False,
) -> RankTable:
    """Top ``top_n`` channels under one metric, competition-ranked.

    Channels lacking the metric are left out and listed in ``warnings``.
    ``as_of`` defaults to the snapshot's collection time.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    metric = Metric(metric)
    as_of = as_of if as_of is not None else snapshot.collected_at
    pairs = []
    warnings = []
    for ch in snapshot.channels if channels is None else channels:
        try:
            pairs.append((ch, metric_value(ch, metric, cfg, as_of)))
        except MetricUnavailable as exc:
            warnings.append(f"{ch.id}: {metric.value} unavailable ({exc})")
    for w in warnings:
        log.warning(w)
    return RankTable(
        metric,
        _ranked(pairs, top_n, with_total_views),
        as_of,
        cfg.unit_u,
        cfg.cap_g_at_nv,
        tuple(warnings),
        category,
    )


def rank_by_category(
    snapshot: Snapshot, cfg: IndexConfig = DEFAULT_CONFIG, top_n: int = 10
) -> dict[ChannelType, RankTable]:
    """h-index table per channel type present; uncategorized channels are skipped."""
    out = {}
    for ctype in ChannelType:
        members = [ch for ch in snapshot.channels if ch.category is ctype]
        if members:
            out[ctype] = rank_by_metric(
                snapshot, Metric.H_INDEX, cfg, top_n,
                channels=members, category=ctype, with_total_views=True,
            )
    return out


@dataclass(frozen=True)
class CorrelationReport:
    target: Metric
    candidates: tuple[Metric, ...]
    results: tuple[CorrelationResult, ...]
    channels: tuple[str, ...]
    excluded: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "target": self.target.value,
            "n": len(self.channels),
            "channels": list(self.channels),
            "excluded": list(self.excluded),
            "results": [
                {"metric": m.value, **r.as_dict()} for m, r in zip(self.candidates, self.results)
            ],
        }


def correlation_sample(
    snapshot: Snapshot,
    metrics: Sequence[Metric],
    cfg: IndexConfig = DEFAULT_CONFIG,
    as_of: Optional[datetime] = None,
):
    """Channels having every requested metric, with their values per metric."""
    as_of = as_of if as_of is not None else snapshot.collected_at
    ids, excluded = [], []
    columns: dict[Metric, list] = {m: [] for m in metrics}
    for ch in snapshot.channels:
        try:
            values = {m: metric_value(ch, m, cfg, as_of) for m in metrics}
        except MetricUnavailable as exc:
            excluded.append(f"{ch.id}: {exc}")
            continue
        ids.append(ch.id)
        for m, v in values.items():
            columns[m].append(v)
    return ids, columns, excluded


def metric_correlation_report(
    snapshot: Snapshot,
    cfg: IndexConfig = DEFAULT_CONFIG,
    target_metric: Metric | str = Metric.SUBSCRIBERS,
    candidate_metrics: Sequence[Metric | str] = (Metric.H_INDEX, Metric.G_INDEX, Metric.TOTAL_VIEWS),
    tail: Tail | str = Tail.TWO_SIDED,
    as_of: Optional[datetime] = None,
) -> CorrelationReport:
    """Pearson r and t-test p-value of each candidate metric against the target.

    All results use the same channel sample: those with every metric present.
    """
    target = Metric(target_metric)
    candidates = tuple(Metric(m) for m in candidate_metrics)
    ids, columns, excluded = correlation_sample(snapshot, (target,) + candidates, cfg, as_of)
    if len(ids) < 3:
        raise SampleTooSmallError(len(ids))
    results = tuple(correlation_test(columns[m], columns[target], tail) for m in candidates)
    return CorrelationReport(target, candidates, results, tuple(ids), tuple(excluded))


# ---------------------------------------------------------------------------
# Output


def format_value(value: Number) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def table_to_tsv(table: RankTable) -> bytes:
    header = ["rank", "channel", table.metric.value]
    with_views = any(r.total_views is not None for r in table.rows)
    if with_views:
        header.append("total_views")
    lines = ["\t".join(header)]
    for row in table.rows:
        cols = [str(row.rank), row.channel, format_value(row.value)]
        if with_views:
            cols.append("" if row.total_views is None else str(row.total_views))
        lines.append("\t".join(cols))
    return ("\n".join(lines) + "\n").encode("utf-8")


def to_json_bytes(doc) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
