"""viewmetrics command-line interface.

Usage:
    viewmetrics fetch --base-url http://127.0.0.1:8000 --count 100 --out-dir run/
    viewmetrics index run/snapshot.json
    viewmetrics rank run/snapshot.json --metric h_index --top 25
    viewmetrics correlate run/snapshot.json --tail two_sided
    viewmetrics report run/snapshot.json --format text
    viewmetrics replay src/viewmetrics/data/corpus --port 8000

Exit codes: 0 success, 1 usage or environment error, 2 partial data failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from .errors import FeedError, SampleTooSmallError, SnapshotFormatError, UndefinedCorrelationError
from .feed import ORDERINGS, FeedClient, FeedConfig, fetch_channels
from .indices import g_index, h_index, total_views
from .model import DEFAULT_UNIT, ChannelType, IndexConfig, format_timestamp, parse_timestamp
from .ranking import (
    Metric,
    MetricUnavailable,
    format_value,
    metric_correlation_report,
    metric_value,
    rank_by_category,
    rank_by_metric,
    table_to_tsv,
    to_json_bytes,
)
from .snapshot import Snapshot, load_snapshot, write_json, write_subscribers_tsv, write_views_tsv
from .stats import Tail, mean_median

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2

BASE_URL_ENV = "VIEWMETRICS_BASE_URL"

log = logging.getLogger("viewmetrics")


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _channel_type(text):
    try:
        return ChannelType.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _timestamp(text):
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _metric_list(text):
    try:
        return [Metric(m.strip()) for m in text.split(",") if m.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(data: bytes, out: Optional[str]) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()


def _load(args) -> Snapshot:
    try:
        data = Path(args.snapshot).read_bytes()
        subs = Path(args.subscribers).read_bytes() if getattr(args, "subscribers", None) else None
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}") from None
    try:
        return load_snapshot(data, subs)
    except SnapshotFormatError as exc:
        raise CliError(f"{args.snapshot}: {exc}") from None


def _index_config(args) -> IndexConfig:
    return IndexConfig(unit_u=args.unit, cap_g_at_nv=args.cap_g)


def _as_of(args, snapshot: Snapshot) -> Optional[datetime]:
    return args.as_of if args.as_of is not None else snapshot.collected_at


def _num(x) -> str:
    return f"{float(x):.6g}"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_fetch(args) -> int:
    if not args.base_url:
        raise CliError(f"no base URL; pass --base-url or set {BASE_URL_ENV}")
    try:
        cfg = FeedConfig(
            base_url=args.base_url,
            page_size=args.page_size,
            max_videos_per_channel=args.max_videos,
            inter_channel_delay=args.delay,
            channel_type_filter=args.type,
            max_concurrency=args.workers,
            retry_attempts=args.retries,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None
    client = FeedClient(cfg)
    try:
        listing = client.fetch_top_channels(args.ordering, args.count)
    except FeedError as exc:
        raise CliError(f"cannot retrieve channel list: {exc}") from None
    if listing.incomplete:
        print(f"warning: channel feed listed {len(listing.ids)} of {args.count} requested channels",
              file=sys.stderr)
    collected_at = args.as_of or listing.updated
    if collected_at is None:
        raise CliError("channel feed carries no <updated> timestamp; pass --as-of")

    results = fetch_channels(client, listing.ids, cfg.channel_type_filter)
    channels, missing, truncated, failed = [], {}, set(), []
    for cid, res in zip(listing.ids, results):
        for w in res.warnings:
            print(f"warning: {w}", file=sys.stderr)
        if res.error is not None:
            failed.append(cid)
            print(f"error: channel {cid}: {res.error}", file=sys.stderr)
            continue
        channels.append(res.channel)
        if res.missing:
            missing[cid] = res.missing
        if res.truncated:
            truncated.add(cid)
    snapshot = Snapshot(
        tuple(channels),
        collected_at=collected_at,
        unit_u=args.unit,
        max_videos_cap=cfg.max_videos_per_channel,
        missing=missing,
        truncated=frozenset(truncated),
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "snapshot.json").write_bytes(write_json(snapshot))
    (out / "views.txt").write_bytes(write_views_tsv(snapshot))
    (out / "subscribers.txt").write_bytes(write_subscribers_tsv(snapshot))
    print(f"fetched {len(channels)} of {len(listing.ids)} channels into {out}", file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_index(args) -> int:
    snapshot = _load(args)
    cfg = _index_config(args)
    as_of = _as_of(args, snapshot)
    rows = []
    hs = []
    unavailable = []
    for ch in snapshot.channels:
        h = h_index(ch, cfg)
        hs.append(h)
        try:
            norm = format_value(metric_value(ch, Metric.NORMALIZED_H, cfg, as_of))
        except MetricUnavailable as exc:
            norm = "na"
            unavailable.append(f"{ch.id}: normalized_h unavailable ({exc})")
        rows.append({
            "channel": ch.id,
            "videos": len(ch.videos),
            "missing": snapshot.missing_for(ch.id),
            "total_views": total_views(ch),
            "h_index": h,
            "g_index": g_index(ch, cfg),
            "normalized_h": norm,
        })
    summary = None
    if hs:
        mean, median = mean_median(hs, exact=True)
        summary = {"n": len(hs), "h_mean": float(mean), "h_median": float(median)}

    if args.format == "json":
        doc = {
            "as_of": None if as_of is None else format_timestamp(as_of),
            "config": {"unit_u": cfg.unit_u, "cap_g_at_nv": cfg.cap_g_at_nv},
            "channels": rows,
            "summary": summary,
        }
        _emit(to_json_bytes(doc), args.out)
    else:
        cols = list(rows[0]) if rows else ["channel", "videos", "missing", "total_views",
                                           "h_index", "g_index", "normalized_h"]
        lines = ["\t".join(cols)]
        lines += ["\t".join(str(r[c]) for c in cols) for r in rows]
        if summary:
            lines.append(
                f"# h_index summary: n={summary['n']} mean={_num(summary['h_mean'])} "
                f"median={_num(summary['h_median'])}"
            )
        _emit(("\n".join(lines) + "\n").encode("utf-8"), args.out)
    if args.as_of is not None and unavailable:
        for w in unavailable:
            print(f"warning: {w}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_rank(args) -> int:
    snapshot = _load(args)
    cfg = _index_config(args)
    metrics = args.metric or [Metric.TOTAL_VIEWS, Metric.H_INDEX, Metric.G_INDEX, Metric.SUBSCRIBERS]
    tables = [rank_by_metric(snapshot, m, cfg, args.top, _as_of(args, snapshot)) for m in metrics]
    code = EXIT_OK
    for t in tables:
        for w in t.warnings:
            print(f"warning: {w}", file=sys.stderr)
            code = EXIT_PARTIAL
    ext = "json" if args.format == "json" else "tsv"
    for t in tables:
        data = to_json_bytes(t.as_dict()) if ext == "json" else table_to_tsv(t)
        if args.out_dir:
            _emit(data, str(Path(args.out_dir) / f"rank_{t.metric.value}.{ext}"))
        else:
            _emit(data, None)
            if len(tables) > 1 and t is not tables[-1]:
                sys.stdout.write("\n")
    return code


def cmd_correlate(args) -> int:
    snapshot = _load(args)
    cfg = _index_config(args)
    try:
        report = metric_correlation_report(
            snapshot, cfg, args.target, args.metrics, args.tail, _as_of(args, snapshot)
        )
    except (SampleTooSmallError, UndefinedCorrelationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    for w in report.excluded:
        print(f"warning: excluded {w}", file=sys.stderr)
    if args.format == "json":
        _emit(to_json_bytes(report.as_dict()), args.out)
    else:
        lines = [
            f"# target={report.target.value} n={len(report.channels)} tail={args.tail.value}",
            "metric\tr\tt_statistic\tp_value\ttail",
        ]
        for m, r in zip(report.candidates, report.results):
            lines.append(
                f"{m.value}\t{r.r:.6f}\t{r.t_statistic:.6g}\t{r.p_value:.6g}\t{r.tail_convention.value}"
            )
        _emit(("\n".join(lines) + "\n").encode("utf-8"), args.out)
    return EXIT_PARTIAL if report.excluded else EXIT_OK


def build_report(snapshot: Snapshot, cfg: IndexConfig, top_n: int, category_top: int,
                 as_of: Optional[datetime]) -> dict:
    metrics = [Metric.TOTAL_VIEWS, Metric.H_INDEX, Metric.G_INDEX, Metric.SUBSCRIBERS]
    if as_of is not None:
        metrics.append(Metric.NORMALIZED_H)
    tables = [rank_by_metric(snapshot, m, cfg, top_n, as_of) for m in metrics]
    hs = [r.value for r in tables[1].rows]
    summary = None
    if hs:
        mean, median = mean_median(hs)
        summary = {"n": len(hs), "h_mean": mean, "h_median": median}
    return {
        "collected_at": None if snapshot.collected_at is None else format_timestamp(snapshot.collected_at),
        "as_of": None if as_of is None else format_timestamp(as_of),
        "config": {"unit_u": cfg.unit_u, "cap_g_at_nv": cfg.cap_g_at_nv, "top_n": top_n},
        "rankings": [t.as_dict() for t in tables],
        "h_summary": summary,
        "categories": [t.as_dict() for t in rank_by_category(snapshot, cfg, category_top).values()],
    }


def render_report_text(doc: dict) -> str:
    out = []
    cfg = doc["config"]
    out.append(f"Channel rankings (unit={cfg['unit_u']} views, g capped at N_v: {cfg['cap_g_at_nv']})")
    if doc["as_of"]:
        out.append(f"as of {doc['as_of']}")
    out.append("")
    rankings = doc["rankings"]
    depth = max((len(t["rows"]) for t in rankings), default=0)
    header = []
    for t in rankings:
        header += [t["metric"], ""]
    out.append("#\t" + "\t".join(header).rstrip("\t"))
    for i in range(depth):
        cells = []
        for t in rankings:
            if i < len(t["rows"]):
                row = t["rows"][i]
                cells += [format_value(row["value"]), row["channel"]]
            else:
                cells += ["", ""]
        out.append(f"{i + 1}\t" + "\t".join(cells).rstrip("\t"))
    if doc["h_summary"]:
        s = doc["h_summary"]
        out.append("")
        out.append(f"h-index over top {s['n']}: mean {_num(s['h_mean'])}, median {_num(s['h_median'])}")
    for t in doc["categories"]:
        out.append("")
        out.append(f"[{t['category']}]")
        out.append("rank\tchannel\th_index\ttotal_views")
        for row in t["rows"]:
            out.append(f"{row['rank']}\t{row['channel']}\t{row['value']}\t{row['total_views']}")
    return "\n".join(out) + "\n"


def cmd_report(args) -> int:
    snapshot = _load(args)
    cfg = _index_config(args)
    doc = build_report(snapshot, cfg, args.top, args.category_top, _as_of(args, snapshot))
    if args.format == "json":
        _emit(to_json_bytes(doc), args.out)
    else:
        _emit(render_report_text(doc).encode("utf-8"), args.out)
    return EXIT_OK


def cmd_replay(args) -> int:
    from .replay import ReplayServer

    if not Path(args.corpus).is_dir():
        raise CliError(f"corpus directory not found: {args.corpus}")
    server = ReplayServer(args.corpus, host=args.host, port=args.port)
    print(f"serving {args.corpus} at {server.base_url}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_index_flags(p):
    p.add_argument("snapshot", help="snapshot JSON, or appendix-style views TSV")
    p.add_argument("--subscribers", help="subscribers TSV to merge when the snapshot is a views TSV")
    p.add_argument("--unit", type=_positive_int, default=DEFAULT_UNIT,
                   help="views per index point (default 100000; 10000 suits academic video)")
    p.add_argument("--cap-g", dest="cap_g", action=argparse.BooleanOptionalAction, default=True,
                   help="cap the g-index at the number of videos (default: on)")
    p.add_argument("--as-of", type=_timestamp, default=None,
                   help="reference time for normalized h (default: snapshot collection time)")
    p.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="viewmetrics", description="h/g-index analytics for video channels")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="retrieve top channels and their uploads into a snapshot")
    p.add_argument("--base-url", default=os.environ.get(BASE_URL_ENV),
                   help=f"feed service root (default: ${BASE_URL_ENV})")
    p.add_argument("--ordering", choices=ORDERINGS, default="most_subscribed")
    p.add_argument("--count", type=_positive_int, default=100)
    p.add_argument("--type", type=_channel_type, default=None,
                   help="channel type filter: " + ", ".join(t.value for t in ChannelType))
    p.add_argument("--page-size", type=_positive_int, default=50)
    p.add_argument("--max-videos", type=_positive_int, default=500)
    p.add_argument("--delay", type=float, default=6.0, help="seconds between channels (default 6)")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--retries", type=_positive_int, default=3,
                   help="attempts per request on transport failures (default 3)")
    p.add_argument("--unit", type=_positive_int, default=DEFAULT_UNIT,
                   help="threshold unit recorded in the snapshot")
    p.add_argument("--as-of", type=_timestamp, default=None,
                   help="collection timestamp (default: the channel feed's <updated>)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("index", help="per-channel h, g, normalized h and total views")
    _add_index_flags(p)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("rank", help="rank channels by one or more metrics")
    _add_index_flags(p)
    p.add_argument("--metric", type=Metric, action="append", choices=list(Metric),
                   help="metric to rank by (repeatable; default: the four primary metrics)")
    p.add_argument("--top", type=_positive_int, default=25)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out-dir", help="write rank_<metric>.<ext> files here")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("correlate", help="Pearson correlation of metrics against a target")
    _add_index_flags(p)
    p.add_argument("--target", type=Metric, choices=list(Metric), default=Metric.SUBSCRIBERS)
    p.add_argument("--metrics", type=_metric_list,
                   default=[Metric.H_INDEX, Metric.G_INDEX, Metric.TOTAL_VIEWS],
                   help="comma-separated candidate metrics (default: h_index,g_index,total_views)")
    p.add_argument("--tail", type=Tail, choices=list(Tail), default=Tail.TWO_SIDED)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("report", help="combined ranking and per-category report")
    _add_index_flags(p)
    p.add_argument("--top", type=_positive_int, default=25)
    p.add_argument("--category-top", type=_positive_int, default=10)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("replay", help="serve a fixture feed corpus over HTTP")
    p.add_argument("corpus", nargs="?", default=str(Path(__file__).parent / "data" / "corpus"))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"viewmetrics: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
