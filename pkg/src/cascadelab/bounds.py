"""Closed-form security bounds for single, double, triple, and cascade ciphers.

Everything is computed in exact rational arithmetic and clamped to [0, 1]
before conversion to float, so powers of two come out exact and key lengths
up to several hundred bits neither overflow nor lose the tiny values to
premature rounding.

single cipher:        t / 2^kappa          (exhaustive key search is optimal)
double, upper:        t^2 / 2^(2 kappa)
double, lower:        (t^2/4s^2) (1/2^(2 kappa) - 1/2^(s(n-1)))   for the
                      meet-in-the-middle attack with s probe plaintexts
double, lower at the best s = ceil((2 kappa + 1)/(n - 1)):
                      (1/8s^2) t^2 / 2^(2 kappa)
two-key triple:       t^2 / 2^(2 kappa)    (same form; distinct claim)
m-fold cascade:       t^m / 2^(m kappa)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import ConfigurationError, DomainError


def _as_unit_float(value: Fraction) -> float:
    """Clamp to [0, 1] exactly, then convert."""
    if value <= 0:
        return 0.0
    if value >= 1:
        return 1.0
    return float(value)


def _check_kappa_t(kappa: int, t: int) -> None:
    if kappa < 1:
        raise DomainError("key bits must be >= 1")
    if t < 0:
        raise DomainError("query count t must be >= 0")


@dataclass(frozen=True)
class BoundPoint:
    """One curve sample: x = log2(t) against a bound value in [0, 1]."""

    log2_t: int
    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError("bound values are clamped probabilities in [0, 1]")


def single_bound(kappa: int, t: int) -> float:
    """Best advantage against the single cipher: min(1, t / 2^kappa)."""
    _check_kappa_t(kappa, t)
    return _as_unit_float(Fraction(t, 1 << kappa))


def double_upper(kappa: int, t: int) -> float:
    """Advantage ceiling for the double cipher: min(1, t^2 / 2^(2 kappa))."""
    _check_kappa_t(kappa, t)
    return _as_unit_float(Fraction(t * t, 1 << (2 * kappa)))


def triple_upper(kappa: int, t: int) -> float:
    """Advantage ceiling for the two-key triple cipher.

    Same expression as double_upper, kept as its own operation because it is
    a separate claim (and, unlike the double case, not tight in general).
    """
    _check_kappa_t(kappa, t)
    return _as_unit_float(Fraction(t * t, 1 << (2 * kappa)))


def double_lower(kappa: int, n: int, t: int, s: int) -> float:
    """Meet-in-the-middle advantage floor, clamped to [0, 1].

    (t^2 / 4 s^2) * (1/2^(2 kappa) - 1/2^(s(n-1))); negative values (s too
    small for the block length to separate the worlds) clamp to 0.
    """
    _check_kappa_t(kappa, t)
    if n < 1:
        raise DomainError("block bits must be >= 1")
    if s < 1:
        raise DomainError("probe count s must be >= 1")
    gap = Fraction(1, 1 << (2 * kappa)) - Fraction(1, 1 << (s * (n - 1)))
    return _as_unit_float(Fraction(t * t, 4 * s * s) * gap)


def optimal_s(kappa: int, n: int) -> int:
    """Probe count ceil((2 kappa + 1)/(n - 1)) making the floor worth t^2/(8 s^2 2^(2 kappa)).

    This choice guarantees 2^(2 kappa + 1) <= 2^(s(n-1)), so the subtracted
    term in double_lower is at most half the leading one.
    """
    if n < 2:
        raise DomainError("block bits must be >= 2 to choose a probe count")
    if kappa < 1:
        raise DomainError("key bits must be >= 1")
    return -(-(2 * kappa + 1) // (n - 1))


def double_lower_optimal(kappa: int, n: int, t: int) -> float:
    """(1/8s^2) * t^2 / 2^(2 kappa) with s = optimal_s(kappa, n), clamped."""
    s = optimal_s(kappa, n)
    _check_kappa_t(kappa, t)
    return _as_unit_float(Fraction(t * t, 8 * s * s * (1 << (2 * kappa))))


def cascade_bound(kappa: int, t: int, m: int) -> float:
    """Advantage ceiling for the m-fold cascade: min(1, t^m / 2^(m kappa))."""
    _check_kappa_t(kappa, t)
    if m < 1:
        raise DomainError("fold count m must be >= 1")
    return _as_unit_float(Fraction(t ** m, 1 << (m * kappa)))


class CurveRow(NamedTuple):
    log2_t: int
    single: float
    double_upper: float
    double_lower: float


def emit_curves(
    kappa: int,
    x_min: int,
    x_max: int,
    step: int = 1,
    n: int = 64,
) -> list[CurveRow]:
    """Curve samples on the grid x = x_min, x_min+step, ..., <= x_max, t = 2^x.

    Columns: the single-cipher ceiling, the double-cipher ceiling, and the
    double-cipher floor at the optimal probe count (block length n, default
    64). At x = kappa both ceilings reach 1.
    """
    if x_min > x_max:
        raise ConfigurationError("x_min must not exceed x_max")
    if x_min < 0 or step < 1:
        raise ConfigurationError("need x_min >= 0 and step >= 1")
    rows = []
    for x in range(x_min, x_max + 1, step):
        t = 1 << x
        rows.append(CurveRow(
            log2_t=x,
            single=single_bound(kappa, t),
            double_upper=double_upper(kappa, t),
            double_lower=double_lower_optimal(kappa, n, t),
        ))
    return rows


CSV_HEADER = "log2_t,sec1,sec2_upper,sec2_lower"


def curves_to_csv(rows: list[CurveRow]) -> str:
    """Delimited form: header plus one row per grid point, 12 significant digits."""
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.log2_t},{row.single:.12g},{row.double_upper:.12g},{row.double_lower:.12g}")
    return "\n".join(lines) + "\n"
