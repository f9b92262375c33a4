"""Cylindrical Bessel functions of the first kind, ``J_m(x)`` for a whole band
of non-negative integer orders at once.

Orders are generated with Miller's backward recurrence

    J_{m-1}(x) = (2m / x) J_m(x) - J_{m+1}(x)

started well above the largest order of interest and normalized with
``J_0 + 2 * sum_k J_{2k} = 1``.  The recurrence is vectorized over the
argument so that many ``x`` values (e.g. every accumulated kick of a run) are
handled in a single sweep over orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError

__all__ = ["BesselBand", "bessel_band", "bessel_table", "band_cutoff", "signed_band"]

_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250
_UNDERFLOW = 1e-300
# below this argument the leading series term (x/2)^m / m! is exact to double precision
_TINY_X = 1e-30
_AGREE_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class BesselBand:
    """``values[m] = J_m(x)`` for ``m = 0 .. len(values) - 1``."""

    x: float
    values: np.ndarray

    @property
    def m_max(self) -> int:
        return self.values.size - 1

    def normalization_error(self) -> float:
        v = self.values
        return abs(v[0] ** 2 + 2.0 * np.sum(v[1:] ** 2) - 1.0)


def _extra_orders(x: float) -> int:
    return max(20, math.ceil(10.0 * x ** (1.0 / 3.0)))


def _miller(x: np.ndarray, m_max: int, m_start: int) -> np.ndarray:
    """Backward recurrence for positive ``x`` (1-D), returning shape (len(x), m_max + 1)."""
    k = x.size
    out = np.zeros((k, m_max + 1))
    # number of rescalings applied when each stored order was produced
    scale_count = np.zeros((k, m_max + 1), dtype=np.int64)
    count = np.zeros(k, dtype=np.int64)
    f_next = np.zeros(k)
    f = np.ones(k)
    norm = np.zeros(k)
    two_over_x = 2.0 / x
    if m_start <= m_max:
        out[:, m_start] = f
    if m_start % 2 == 0:
        norm += 2.0 * f
    for m in range(m_start, 0, -1):
        f_prev = (m * two_over_x) * f - f_next
        f_next, f = f, f_prev
        big = np.abs(f) > _RESCALE_AT
        if big.any():
            scale = np.where(big, _RESCALE_BY, 1.0)
            f *= scale
            f_next *= scale
            norm *= scale
            count += big
        order = m - 1
        if order <= m_max:
            out[:, order] = f
            scale_count[:, order] = count
        if order == 0:
            norm += f
        elif order % 2 == 0:
            norm += 2.0 * f
    lag = count[:, None] - scale_count
    out = np.where(lag == 0, out, np.where(lag == 1, out * _RESCALE_BY, 0.0))
    out /= norm[:, None]
    out[np.abs(out) < _UNDERFLOW] = 0.0
    return out


def _series_leading(x: np.ndarray, m_max: int) -> np.ndarray:
    m = np.arange(m_max + 1)
    with np.errstate(under="ignore", divide="ignore", invalid="ignore"):
        logs = m[None, :] * np.log(x[:, None] / 2.0) - np.array(
            [math.lgamma(i + 1.0) for i in m])[None, :]
        out = np.exp(logs)
    out[~(out >= _UNDERFLOW)] = 0.0
    out[:, 0] = 1.0
    return out


def bessel_table(x, m_max: int) -> np.ndarray:
    """``J_m(x_i)`` for every argument in ``x`` and ``m = 0 .. m_max``.

    Returns an array of shape ``(len(x), m_max + 1)``.  The backward recurrence
    is run from two starting orders and repeated with a deeper start until both
    agree to 1e-13, so the result is self-validating.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.ndim != 1:
        raise DomainError("bessel_table expects a scalar or 1-D argument array")
    if np.any(~np.isfinite(xs)) or np.any(xs < 0):
        raise DomainError("Bessel argument must be finite and non-negative")
    if m_max < 0:
        raise DomainError(f"m_max must be non-negative, got {m_max}")
    out = np.zeros((xs.size, m_max + 1))
    zero = xs == 0
    out[zero, 0] = 1.0
    tiny = (xs > 0) & (xs < _TINY_X)
    if tiny.any():
        out[tiny] = _series_leading(xs[tiny], m_max)
    regular = xs >= _TINY_X
    if regular.any():
        xr = xs[regular]
        xmax = float(xr.max())
        base = max(m_max, math.ceil(xmax))
        extra = _extra_orders(xmax)
        while True:
            first = _miller(xr, m_max, base + extra)
            second = _miller(xr, m_max, base + 2 * extra)
            if np.max(np.abs(first - second)) <= _AGREE_TOL:
                break
            extra *= 2
        out[regular] = second
    return out


def bessel_band(x: float, m_max: int) -> BesselBand:
    """Band ``J_0(x) .. J_{m_max}(x)`` for one non-negative argument.

    Negative orders follow from ``J_{-m} = (-1)^m J_m``; see :func:`signed_band`.
    """
    if not (x >= 0) or not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite and non-negative, got {x}")
    return BesselBand(float(x), bessel_table([x], m_max)[0])


def _cutoff_from_values(values: np.ndarray, tail_tol: float) -> int | None:
    """Smallest M with sum_{m>M} values[m]^2 < tail_tol, or None if the band is too short."""
    sq = values ** 2
    # tails[M] = sum_{m > M} sq[m]
    tails = np.concatenate([np.cumsum(sq[::-1])[::-1][1:], [0.0]])
    ok = np.nonzero(tails < tail_tol)[0]
    if ok.size == 0 or ok[0] >= values.size - 1:
        return None
    return int(ok[0])


def band_cutoff(x: float, tail_tol: float = 1e-14) -> int:
    """Smallest order ``M`` with ``sum_{m > M} J_m(x)^2 < tail_tol``.

    The band is evaluated well beyond the estimate ``x + c x^(1/3)`` and the
    tail is measured on the computed values; the band is widened if the
    estimate turns out too short.
    """
    return _band_with_cutoff(x, tail_tol)[0]


def _band_with_cutoff(x: float, tail_tol: float) -> tuple[int, np.ndarray]:
    if not tail_tol > 0:
        raise DomainError("tail_tol must be positive")
    if x == 0:
        return 0, np.ones(1)
    span = math.ceil(x) + _extra_orders(x) + 2 * math.ceil(-math.log10(tail_tol))
    while True:
        values = bessel_band(x, span).values
        cut = _cutoff_from_values(values, tail_tol)
        if cut is not None:
            return cut, values[:cut + 1]
        span *= 2


def signed_band(x: float, tail_tol: float) -> tuple[int, np.ndarray]:
    """Kernel ``(-i)^d J_d(x)`` for ``d = -M .. M`` with ``M = band_cutoff(x, tail_tol)``.

    Returns ``(M, kernel)`` with ``kernel[d + M]``; this is the momentum-space
    matrix element of a single kick ``exp(-i x cos(theta))``.
    """
    m, values = _band_with_cutoff(x, tail_tol)
    return m, kick_kernel(values)


_MINUS_I_POWERS = np.array([1, -1j, -1, 1j])


def kick_kernel(values: np.ndarray) -> np.ndarray:
    """Expand non-negative-order values to the two-sided kick kernel ``(-i)^d J_d``."""
    m = values.size - 1
    d = np.arange(-m, m + 1)
    mag = values[np.abs(d)] * np.where((d < 0) & (d % 2 == 1), -1.0, 1.0)
    return _MINUS_I_POWERS[d % 4] * mag
