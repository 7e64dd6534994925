"""Bibliometric indices (h, g, normalized h) for video channels ranked by view counts."""

from .errors import (
    AgeUnavailableError,
    FeedError,
    FeedHTTPError,
    FeedParseError,
    SampleTooSmallError,
    SnapshotFormatError,
    UndefinedCorrelationError,
    UnknownChannelError,
    ViewMetricsError,
    ViewSumOverflowError,
    ZeroAgeError,
)
from .indices import g_index, h_index, normalized_h_index, sorted_views, total_views
from .model import Channel, ChannelType, IndexConfig, Video
from .ranking import Metric, RankTable, metric_correlation_report, rank_by_category, rank_by_metric
from .snapshot import (
    Snapshot,
    read_json,
    read_views_tsv,
    write_json,
    write_subscribers_tsv,
    write_views_tsv,
)
from .stats import CorrelationResult, Tail, correlation_test, mean_median, pearson_r

__version__ = "0.1.0"
