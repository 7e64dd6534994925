"""Summary statistics and Pearson correlation with a Student t significance test."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import EmptySampleError, SampleTooSmallError, UndefinedCorrelationError


class Tail(str, enum.Enum):
    TWO_SIDED = "two_sided"
    ONE_SIDED = "one_sided"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    t_statistic: float
    p_value: float
    tail_convention: Tail = Tail.TWO_SIDED

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "t_statistic": _json_float(self.t_statistic),
            "p_value": self.p_value,
            "tail_convention": self.tail_convention.value,
        }


def _json_float(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def mean_median(values: Sequence, exact: bool = False):
    """Arithmetic mean and median.

    Computed with rational arithmetic, so integer inputs give exact results
    (pass ``exact=True`` to get them back as :class:`~fractions.Fraction`).
    Even-length samples average the two middle values.
    """
    data = sorted(Fraction(v) for v in values)
    if not data:
        raise EmptySampleError()
    n = len(data)
    mean = sum(data, Fraction(0)) / n
    mid = n // 2
    median = data[mid] if n % 2 else (data[mid - 1] + data[mid]) / 2
    if exact:
        return mean, median
    return float(mean), float(median)


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson product-moment correlation coefficient."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")
    n = len(x)
    if n < 2:
        raise SampleTooSmallError(n)
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if min(xs) == max(xs) or min(ys) == max(ys):
        raise UndefinedCorrelationError()
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [v - mx for v in xs]
    dy = [v - my for v in ys]
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError()
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


# ---------------------------------------------------------------------------
# Student t distribution via the regularized incomplete beta function

_EPS = 1e-16
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, x_complement: float | None = None) -> float:
    """Regularized incomplete beta function I_x(a, b).

    ``x_complement`` may carry an accurately computed ``1 - x`` to avoid
    cancellation when x is close to 1.
    """
    if a <= 0 or b <= 0:
        raise ValueError("betainc requires a > 0 and b > 0")
    if x_complement is None:
        x_complement = 1.0 - x
    if x <= 0.0:
        return 0.0
    if x_complement <= 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(x_complement)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, x_complement) / b


def t_sf(t: float, df: float) -> float:
    """Upper tail P(T > t) of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    x = df / (df + t2)
    xc = t2 / (df + t2)
    half_tail = 0.5 * betainc(df / 2.0, 0.5, x, xc)
    return half_tail if t >= 0 else 1.0 - half_tail


def t_cdf(t: float, df: float) -> float:
    """P(T <= t) of Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    return t_sf(-t, df)


def correlation_test_from_r(r: float, n: int, tail: Tail | str = Tail.TWO_SIDED) -> CorrelationResult:
    """t test of H0: rho = 0 given a sample correlation and size.

    t = r * sqrt((n - 2) / (1 - r**2)) with n - 2 degrees of freedom. The
    one-sided p-value is the tail in the direction of the observed sign.
    """
    tail = Tail(tail)
    if n < 3:
        raise SampleTooSmallError(n)
    if not -1.0 <= r <= 1.0:
        raise ValueError(f"correlation out of range: {r}")
    if abs(r) == 1.0:
        return CorrelationResult(r, n, math.copysign(math.inf, r), 0.0, tail)
    df = n - 2
    t = r * math.sqrt(df / ((1.0 - r) * (1.0 + r)))
    p = t_sf(abs(t), df)
    if tail is Tail.TWO_SIDED:
        p = min(1.0, 2.0 * p)
    return CorrelationResult(r, n, t, p, tail)


def correlation_test(
    x: Sequence[float], y: Sequence[float], tail: Tail | str = Tail.TWO_SIDED
) -> CorrelationResult:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} != {len(y)}")
    if len(x) < 3:
        raise SampleTooSmallError(len(x))
    return correlation_test_from_r(pearson_r(x, y), len(x), tail)
