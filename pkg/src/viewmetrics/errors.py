"""Exception hierarchy shared across the package."""


class ViewMetricsError(Exception):
    """Base class for every error raised by viewmetrics."""


class AgeUnavailableError(ViewMetricsError, ValueError):
    def __init__(self, channel_id=None):
        msg = "age unavailable"
        if channel_id is not None:
            msg += f" for channel {channel_id!r}"
        super().__init__(msg)


class ZeroAgeError(ViewMetricsError, ValueError):
    def __init__(self, channel_id=None):
        msg = "zero active age"
        if channel_id is not None:
            msg += f" for channel {channel_id!r}"
        super().__init__(msg)


class ViewSumOverflowError(ViewMetricsError, OverflowError):
    def __init__(self):
        super().__init__("view sum overflow")


class EmptySampleError(ViewMetricsError, ValueError):
    def __init__(self):
        super().__init__("empty sample")


class UndefinedCorrelationError(ViewMetricsError, ValueError):
    def __init__(self):
        super().__init__("undefined correlation")


class SampleTooSmallError(ViewMetricsError, ValueError):
    def __init__(self, n=None):
        msg = "sample too small"
        if n is not None:
            msg += f" (n={n})"
        super().__init__(msg)


class SnapshotFormatError(ViewMetricsError, ValueError):
    """Malformed snapshot input; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FeedError(ViewMetricsError):
    """Base class for ingestion failures."""


class FeedParseError(FeedError):
    """Malformed feed XML. Never retried."""

    def __init__(self, message, offset=None, line=None, column=None):
        self.offset = offset
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if offset is not None:
            where.append(f"byte offset {offset}")
        if where:
            message = f"{message} ({'; '.join(where)})"
        super().__init__(message)


class FeedHTTPError(FeedError):
    """Transport-level failure; ``status`` is None when no response arrived."""

    retryable = True

    def __init__(self, url, status=None, reason=""):
        self.url = url
        self.status = status
        self.reason = reason
        label = f"HTTP {status}" if status is not None else "transport error"
        super().__init__(f"{label} for {url}: {reason}".rstrip(": "))


class UnknownChannelError(FeedError):
    retryable = False

    def __init__(self, channel_id):
        self.channel_id = channel_id
        super().__init__(f"unknown channel {channel_id!r}")
