"""Special functions and adaptive quadrature.

Only what the restore models need: the standard normal CDF and its inverse,
lognormal and exponential densities/CDFs/quantiles, and a globally adaptive
Gauss-Kronrod (7, 15) integrator with an explicit error contract.

Every function accepts a float or a numpy array and returns the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Tolerance:
    """Error targets for :func:`integrate`."""

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be > 0, got {self.abs_tol!r}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol!r}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError(
                f"max_subdivisions must be a positive integer, got {self.max_subdivisions!r}"
            )


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


# ---------------------------------------------------------------------------
# standard normal

def _ndtr(x):
    # Unchecked; infinities map to 0 and 1.
    return 0.5 * special.erfc(-np.asarray(x, dtype=float) / SQRT2)


def std_normal_cdf(x):
    """Standard normal CDF, computed from erfc so both tails keep full accuracy."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("std_normal_cdf requires finite input")
    return _scalar_or_array(_ndtr(arr))


# Rational approximation (Acklam), relative error ~1e-9 before refinement.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758276161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _quantile_lower_half(p: float) -> float:
    """Phi^-1(p) for 0 < p <= 0.5."""
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((( _C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    else:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    # Halley refinement on Phi(x) - p
    for _ in range(2):
        e = float(_ndtr(x)) - p
        u = e * SQRT2PI * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


def _std_normal_quantile_scalar(p: float) -> float:
    if not (0.0 < p < 1.0):
        raise DomainError(f"std_normal_quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -_quantile_lower_half(1.0 - p)
    return _quantile_lower_half(p)


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    if np.ndim(p) == 0:
        return _std_normal_quantile_scalar(float(p))
    arr = np.asarray(p, dtype=float)
    out = np.empty_like(arr)
    for idx, v in np.ndenumerate(arr):
        out[idx] = _std_normal_quantile_scalar(float(v))
    return out


# ---------------------------------------------------------------------------
# restore-time distributions; the shift is the first restore time r_a

def lognormal_pdf(t, shift: float, mu: float, sigma: float):
    t = np.asarray(t, dtype=float)
    x = t - shift
    pos = x > 0
    xs = np.where(pos, x, 1.0)
    z = (np.log(xs) - mu) / sigma
    dens = np.exp(-0.5 * z * z) / (xs * sigma * SQRT2PI)
    return _scalar_or_array(np.where(pos, dens, 0.0))


def lognormal_cdf(t, shift: float, mu: float, sigma: float):
    t = np.asarray(t, dtype=float)
    x = t - shift
    pos = x > 0
    z = (np.log(np.where(pos, x, 1.0)) - mu) / sigma
    return _scalar_or_array(np.where(pos, _ndtr(z), 0.0))


def lognormal_sf(t, shift: float, mu: float, sigma: float):
    """1 - lognormal_cdf, without cancellation in the upper tail."""
    t = np.asarray(t, dtype=float)
    x = t - shift
    pos = x > 0
    z = (np.log(np.where(pos, x, 1.0)) - mu) / sigma
    return _scalar_or_array(np.where(pos, _ndtr(-z), 1.0))


def lognormal_quantile(p, shift: float, mu: float, sigma: float):
    return _scalar_or_array(shift + np.exp(mu + sigma * np.asarray(std_normal_quantile(p))))


def exponential_pdf(t, shift: float, tau: float):
    t = np.asarray(t, dtype=float)
    x = t - shift
    return _scalar_or_array(np.where(x >= 0, np.exp(-np.maximum(x, 0.0) / tau) / tau, 0.0))


def exponential_cdf(t, shift: float, tau: float):
    t = np.asarray(t, dtype=float)
    x = np.maximum(t - shift, 0.0)
    return _scalar_or_array(-np.expm1(-x / tau))


def exponential_sf(t, shift: float, tau: float):
    t = np.asarray(t, dtype=float)
    x = np.maximum(t - shift, 0.0)
    return _scalar_or_array(np.exp(-x / tau))


def exponential_quantile(p, shift: float, tau: float):
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise DomainError("exponential_quantile requires 0 < p < 1")
    return _scalar_or_array(shift - tau * np.log1p(-p))


# ---------------------------------------------------------------------------
# quadrature

# Kronrod 15-point abscissae on [0, 1] (symmetric), with weights; Gauss
# 7-point nodes are the odd-indexed Kronrod nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[7] = _WG[3]
_GWEIGHTS[[9, 11, 13]] = _WG[2::-1]


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(y)):
        raise DomainError(f"integrand is not finite on [{a!r}, {b!r}]")
    k = half * float(_KWEIGHTS @ y)
    g = half * float(_GWEIGHTS @ y)
    return k, abs(k - g)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: Tolerance = Tolerance(),
    *,
    breakpoints: Iterable[float] = (),
) -> float:
    """Globally adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    ``f`` is called with a numpy array of nodes and must return an array of the
    same shape (a scalar is broadcast). Interior ``breakpoints`` seed the
    initial partition, which matters for kinks and for mass concentrated in a
    small part of a long interval.

    The interval with the largest error estimate is bisected until the summed
    estimate is at most ``max(tol.abs_tol, tol.rel_tol * |result|)``.

    Raises:
        ConvergenceError: if ``tol.max_subdivisions`` intervals are in use and
            the target has not been met.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a > b:
        raise DomainError(f"integrate requires a <= b, got a={a!r}, b={b!r}")
    if a == b:
        return 0.0

    cuts = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    heap: list[tuple[float, float, float, float]] = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        val, err = _gk15(f, lo, hi)
        heap.append((-err, lo, hi, val))
    heapq.heapify(heap)

    while True:
        total = math.fsum(item[3] for item in heap)
        err_total = math.fsum(-item[0] for item in heap)
        if err_total <= max(tol.abs_tol, tol.rel_tol * abs(total)):
            return total
        if len(heap) >= tol.max_subdivisions:
            raise ConvergenceError("subdivision budget exhausted", total, err_total)
        neg_err, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # interval cannot be split further in floating point
            heapq.heappush(heap, (neg_err, lo, hi, _))
            raise ConvergenceError("interval underflow during bisection", total, err_total)
        for s, e in ((lo, mid), (mid, hi)):
            val, err = _gk15(f, s, e)
            heapq.heappush(heap, (-err, s, e, val))


def improper_integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    tail_quantile_bound: float,
    tol: Tolerance = Tolerance(),
    *,
    breakpoints: Iterable[float] = (),
    grading_levels: int = 48,
) -> float:
    """Integral of ``f`` from ``a`` to infinity, truncated at ``tail_quantile_bound``.

    The caller is responsible for choosing the truncation point so that the
    neglected tail is below ``tol.abs_tol``. The interval is pre-split on a
    geometric ladder toward ``a`` so that mass near the lower limit of a very
    long interval cannot be skipped by the first Kronrod rule.
    """
    width = float(tail_quantile_bound) - float(a)
    ladder = [a + width * 0.5**k for k in range(1, grading_levels + 1)]
    return integrate(f, a, tail_quantile_bound, tol, breakpoints=[*ladder, *breakpoints])
