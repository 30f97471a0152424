"""Poisson-rate event models and the metrics of their mean performance curve.

An event has ``n_c`` units of some tracked quantity (outages, customers, MVA).
Outages arrive at a constant rate on ``[0, o_b]``; restores follow one of three
rate shapes starting at ``r_a``. Normalized, the rates are the outage-time and
restore-time distributions, so the mean cumulative curves are ``n_c`` times
their CDFs and the mean performance curve is ``P(t) = R(t) - O(t)``.

Time is in hours throughout. The quantity unit is never interpreted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import ClassVar, Union

import numpy as np

from . import numerics
from .errors import DomainError, ValidationError, VariantError
from .numerics import Tolerance

# Upper quantile used to truncate infinite restore supports.
TAIL_PROBABILITY = 1e-12
# Fraction of abs_tol allowed for the neglected area tail.
_TAIL_SHARE = 0.01


def _finite(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def _check_r_a(r_a) -> float:
    r_a = _finite("r_a", r_a)
    if r_a < 0:
        raise ValidationError(f"r_a must be >= 0, got {r_a!r}")
    return r_a


@dataclass(frozen=True)
class OutageModel:
    """Constant-rate outages on ``[0, o_b]``."""

    o_b: float

    def __post_init__(self):
        o_b = _finite("o_b", self.o_b)
        if o_b <= 0:
            raise ValidationError(f"o_b must be > 0, got {o_b!r}")
        object.__setattr__(self, "o_b", o_b)

    @property
    def mean(self) -> float:
        return 0.5 * self.o_b

    def cdf(self, t):
        return np.clip(np.asarray(t, dtype=float) / self.o_b, 0.0, 1.0)

    def sf(self, t):
        return np.clip(1.0 - np.asarray(t, dtype=float) / self.o_b, 0.0, 1.0)


@dataclass(frozen=True)
class ConstantRestore:
    """Restores at a constant rate on ``[r_a, r_b]``."""

    r_a: float
    r_b: float
    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        r_a = _check_r_a(self.r_a)
        r_b = _finite("r_b", self.r_b)
        if not r_b > r_a:
            raise ValidationError(f"r_b must be > r_a, got r_a={r_a!r}, r_b={r_b!r}")
        object.__setattr__(self, "r_a", r_a)
        object.__setattr__(self, "r_b", r_b)

    @property
    def mean(self) -> float:
        return 0.5 * (self.r_a + self.r_b)

    def cdf(self, t):
        return np.clip((np.asarray(t, dtype=float) - self.r_a) / (self.r_b - self.r_a), 0.0, 1.0)

    def sf(self, t):
        return np.clip((self.r_b - np.asarray(t, dtype=float)) / (self.r_b - self.r_a), 0.0, 1.0)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.r_a) & (t <= self.r_b)
        return np.where(inside, 1.0 / (self.r_b - self.r_a), 0.0)

    def quantile(self, p):
        return self.r_a + (self.r_b - self.r_a) * np.asarray(p, dtype=float)


@dataclass(frozen=True)
class LognormalRestore:
    """Restore delays after ``r_a`` are lognormal(mu, sigma), in ln-hours."""

    r_a: float
    mu: float
    sigma: float
    kind: ClassVar[str] = "lognormal"

    def __post_init__(self):
        object.__setattr__(self, "r_a", _check_r_a(self.r_a))
        object.__setattr__(self, "mu", _finite("mu", self.mu))
        sigma = _finite("sigma", self.sigma)
        if sigma <= 0:
            raise ValidationError(f"sigma must be > 0, got {sigma!r}")
        object.__setattr__(self, "sigma", sigma)

    @property
    def mean(self) -> float:
        return self.r_a + math.exp(self.mu + 0.5 * self.sigma**2)

    def cdf(self, t):
        return numerics.lognormal_cdf(t, self.r_a, self.mu, self.sigma)

    def sf(self, t):
        return numerics.lognormal_sf(t, self.r_a, self.mu, self.sigma)

    def pdf(self, t):
        return numerics.lognormal_pdf(t, self.r_a, self.mu, self.sigma)

    def quantile(self, p):
        return numerics.lognormal_quantile(p, self.r_a, self.mu, self.sigma)


@dataclass(frozen=True)
class ExponentialRestore:
    """Exponential restore delays after ``r_a`` with mean ``tau``."""

    r_a: float
    tau: float
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "r_a", _check_r_a(self.r_a))
        tau = _finite("tau", self.tau)
        if tau <= 0:
            raise ValidationError(f"tau must be > 0, got {tau!r}")
        object.__setattr__(self, "tau", tau)

    @property
    def mean(self) -> float:
        return self.r_a + self.tau

    def cdf(self, t):
        return numerics.exponential_cdf(t, self.r_a, self.tau)

    def sf(self, t):
        return numerics.exponential_sf(t, self.r_a, self.tau)

    def pdf(self, t):
        return numerics.exponential_pdf(t, self.r_a, self.tau)

    def quantile(self, p):
        return numerics.exponential_quantile(p, self.r_a, self.tau)


RestoreModel = Union[ConstantRestore, LognormalRestore, ExponentialRestore]
RESTORE_TYPES = (ConstantRestore, LognormalRestore, ExponentialRestore)


@dataclass(frozen=True)
class EventModel:
    n_c: float
    outage: OutageModel
    restore: RestoreModel

    def __post_init__(self):
        n_c = _finite("n_c", self.n_c)
        if n_c <= 0:
            raise ValidationError(f"n_c must be > 0, got {n_c!r}")
        object.__setattr__(self, "n_c", n_c)
        if not isinstance(self.outage, OutageModel):
            raise ValidationError("outage must be an OutageModel")
        if not isinstance(self.restore, RESTORE_TYPES):
            raise ValidationError(f"unsupported restore model {type(self.restore).__name__}")
        if not math.isfinite(self.restore.mean):
            raise ValidationError("mean restore time overflows; mu/sigma too large")

    @property
    def outage_rate(self) -> float:
        return self.n_c / self.outage.o_b

    def scaled(self, k: float) -> "EventModel":
        """Same event with the tracked total multiplied by ``k``."""
        return EventModel(self.n_c * k, self.outage, self.restore)


def _check_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("time must be >= 0")
    return arr


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def mean_cum_outages(m: EventModel, t):
    """Mean cumulative outaged quantity ``n_c * min(t / o_b, 1)``."""
    t = _check_time(t)
    return _out(m.n_c * np.minimum(t / m.outage.o_b, 1.0))


def mean_cum_restores(m: EventModel, t):
    """Mean cumulative restored quantity, ``n_c`` times the restore CDF."""
    t = _check_time(t)
    return _out(m.n_c * m.restore.cdf(t))


def mean_performance(m: EventModel, t):
    """Mean performance curve ``R(t) - O(t)``; zero at 0 and at infinity."""
    return _out(np.asarray(mean_cum_restores(m, t)) - np.asarray(mean_cum_outages(m, t)))


def mean_outage_time(m: EventModel) -> float:
    return m.outage.mean


def mean_restore_time(m: EventModel) -> float:
    return m.restore.mean


def area_closed_form(m: EventModel) -> float:
    """Area between the mean outage and restore curves, ``n_c * (rbar - obar)``.

    Written out per variant so each branch matches its textbook formula.
    """
    r = m.restore
    o_b = m.outage.o_b
    if isinstance(r, ConstantRestore):
        return m.n_c * (0.5 * (r.r_a + r.r_b) - 0.5 * o_b)
    if isinstance(r, LognormalRestore):
        return m.n_c * (r.r_a + math.exp(r.mu + 0.5 * r.sigma**2) - 0.5 * o_b)
    if isinstance(r, ExponentialRestore):
        return m.n_c * (r.r_a + r.tau - 0.5 * o_b)
    raise VariantError(type(r).__name__)


def truncation_time(m: EventModel, abs_tol: float = Tolerance().abs_tol) -> float:
    """Upper integration limit for the area integral.

    Beyond the returned time the neglected area is at most ``abs_tol / 100``,
    and the restore CDF is past its ``1 - 1e-12`` quantile.
    """
    r = m.restore
    o_b = m.outage.o_b
    budget = _TAIL_SHARE * abs_tol
    if isinstance(r, ConstantRestore):
        return max(o_b, r.r_b)
    if isinstance(r, ExponentialRestore):
        # tail area = n_c * tau * exp(-x / tau)
        x = r.tau * max(-math.log(TAIL_PROBABILITY), math.log(max(m.n_c * r.tau / budget, 1.0)))
        return max(o_b, r.r_a + x)
    if isinstance(r, LognormalRestore):
        # tail area <= n_c * E[X; X > x] = n_c * m_x * Phi(sigma - z)
        mean_delay = math.exp(r.mu + 0.5 * r.sigma**2)
        p = min(0.5, max(budget / (m.n_c * mean_delay), 1e-300))
        z = max(
            -numerics.std_normal_quantile(TAIL_PROBABILITY),
            r.sigma - numerics.std_normal_quantile(p),
        )
        return max(o_b, r.r_a + math.exp(r.mu + r.sigma * z))
    raise VariantError(type(r).__name__)


def _area_breakpoints(m: EventModel) -> list[float]:
    r = m.restore
    pts = [m.outage.o_b, r.r_a]
    if isinstance(r, ConstantRestore):
        pts.append(r.r_b)
    elif isinstance(r, LognormalRestore):
        pts.extend(r.r_a + math.exp(r.mu + k * r.sigma) for k in range(-6, 9))
    elif isinstance(r, ExponentialRestore):
        pts.extend(r.r_a + k * r.tau for k in (1, 2, 4, 8, 16))
    return pts


def area_numeric(m: EventModel, tol: Tolerance = Tolerance()) -> float:
    """Quadrature of ``O(t) - R(t)`` from 0 to :func:`truncation_time`.

    The integrand is evaluated as ``n_c * (S_r(t) - S_o(t))`` with survival
    functions, which stays accurate in the long restore tail.
    """
    upper = truncation_time(m, tol.abs_tol)

    def gap(t):
        return m.n_c * (m.restore.sf(t) - m.outage.sf(t))

    return numerics.improper_integrate(gap, 0.0, upper, tol, breakpoints=_area_breakpoints(m))


# ---------------------------------------------------------------------------
# nadir

@dataclass(frozen=True)
class AtTime:
    t: float


@dataclass(frozen=True)
class OnInterval:
    t_lo: float
    t_hi: float


@dataclass(frozen=True)
class NadirResult:
    """Depth of the mean performance curve and where it is reached.

    ``candidates`` holds the ``(time, P(time))`` pairs compared to find it.
    """

    value: float
    location: Union[AtTime, OnInterval]
    candidates: tuple[tuple[float, float], ...] = field(default=())

    @property
    def time(self) -> float:
        """A time at which the nadir is attained (start of the interval if flat)."""
        if isinstance(self.location, AtTime):
            return self.location.t
        return self.location.t_lo


def lognormal_inflection_time(m: EventModel) -> float:
    """Mode of the restore density; the restore curve is convex before it."""
    r = m.restore
    if not isinstance(r, LognormalRestore):
        raise VariantError("inflection time is defined for lognormal restores only")
    return r.r_a + math.exp(r.mu - r.sigma**2)


def lognormal_stationary_discriminant(m: EventModel) -> float:
    r = m.restore
    if not isinstance(r, LognormalRestore):
        raise VariantError("stationary time is defined for lognormal restores only")
    return r.sigma**2 - 2.0 * r.mu - 2.0 * math.log(r.sigma * numerics.SQRT2PI / m.outage.o_b)


def lognormal_stationary_time(m: EventModel) -> float | None:
    """Local minimum of the mean performance curve on the convex branch.

    Solves ``f_r(t) = 1 / o_b`` via the quadratic in ``ln(t - r_a)``, taking
    the smaller root. Returns ``None`` when the discriminant is negative,
    i.e. the restore rate never catches up with the outage rate.
    """
    disc = lognormal_stationary_discriminant(m)
    if disc < 0:
        return None
    r = m.restore
    return r.r_a + math.exp(r.mu - r.sigma**2 - r.sigma * math.sqrt(disc))


def _candidates(m: EventModel, times) -> tuple[tuple[float, float], ...]:
    return tuple((float(t), float(mean_performance(m, t))) for t in times)


def nadir(m: EventModel) -> NadirResult:
    """Maximum mean quantity simultaneously out, ``-min P(t)``."""
    r = m.restore
    n_c = m.n_c
    o_b = m.outage.o_b
    r_a = r.r_a

    if r_a > o_b:
        return NadirResult(n_c, OnInterval(o_b, r_a), _candidates(m, (o_b, r_a)))
    if r_a == o_b:
        return NadirResult(n_c, AtTime(o_b), _candidates(m, (o_b,)))

    if isinstance(r, ConstantRestore):
        window = r.r_b - r_a
        times = (r_a, o_b) if r.r_b >= o_b else (r_a, r.r_b, o_b)
        cands = _candidates(m, times)
        if math.isclose(window, o_b, rel_tol=1e-12):
            # equal rates: P is flat on [r_a, o_b]
            return NadirResult(n_c * r_a / o_b, OnInterval(r_a, o_b), cands)
        if window < o_b:
            # restore rate exceeds outage rate; also covers r_b < o_b
            return NadirResult(n_c * r_a / o_b, AtTime(r_a), cands)
        return NadirResult(n_c * (r.r_b - o_b) / window, AtTime(o_b), cands)

    if isinstance(r, ExponentialRestore):
        at_start = r_a / o_b
        at_end = math.exp(-(o_b - r_a) / r.tau)
        cands = _candidates(m, (r_a, o_b))
        if at_start > at_end:
            return NadirResult(n_c * at_start, AtTime(r_a), cands)
        return NadirResult(n_c * at_end, AtTime(o_b), cands)

    if isinstance(r, LognormalRestore):
        times = [o_b]
        t_star = lognormal_stationary_time(m)
        if t_star is not None and r_a <= t_star <= o_b:
            times.append(t_star)
        cands = _candidates(m, times)
        best_t, best_p = cands[0]
        for t, p in cands[1:]:
            if p < best_p:
                best_t, best_p = t, p
        return NadirResult(-best_p, AtTime(best_t), cands)

    raise VariantError(type(r).__name__)


# ---------------------------------------------------------------------------
# durations and the aggregate report

D95_PROBABILITY = 0.95


def restore_durations(m: EventModel) -> dict[str, float]:
    """Named restore-duration metrics, plus ``event_duration``.

    The event duration is the primary restore duration measured from time 0,
    i.e. ``r_a`` plus ``D_n``, ``D_95_ln`` or ``D_95_exp``.
    """
    r = m.restore
    if isinstance(r, ConstantRestore):
        out = {"D_n": r.r_b - r.r_a}
        main = out["D_n"]
    elif isinstance(r, LognormalRestore):
        z95 = numerics.std_normal_quantile(D95_PROBABILITY)
        out = {"D_95_ln": math.exp(r.mu + r.sigma * z95), "D_GM": math.exp(r.mu)}
        main = out["D_95_ln"]
    elif isinstance(r, ExponentialRestore):
        out = {"D_95_exp": r.tau * math.log(20.0)}
        main = out["D_95_exp"]
    else:
        raise VariantError(type(r).__name__)
    out["event_duration"] = r.r_a + main
    return out


@dataclass(frozen=True)
class MetricsReport:
    area: float
    nadir: NadirResult
    mean_outage_time: float
    mean_restore_time: float
    durations: dict[str, float]
    area_numeric: float
    area_discrepancy: float
    truncation_time: float


def metrics(m: EventModel, tol: Tolerance = Tolerance()) -> MetricsReport:
    area = area_closed_form(m)
    numeric = area_numeric(m, tol)
    return MetricsReport(
        area=area,
        nadir=nadir(m),
        mean_outage_time=mean_outage_time(m),
        mean_restore_time=mean_restore_time(m),
        durations=restore_durations(m),
        area_numeric=numeric,
        area_discrepancy=abs(area - numeric),
        truncation_time=truncation_time(m, tol.abs_tol),
    )


def model_summary(m: EventModel) -> str:
    r = m.restore
    params = ", ".join(f"{f.name}={getattr(r, f.name):g}" for f in fields(r))
    return f"n_c={m.n_c:g}, o_b={m.outage.o_b:g}, {r.kind} restore ({params})"
