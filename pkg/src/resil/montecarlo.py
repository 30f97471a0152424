"""Monte Carlo realizations of the Poisson event model.

A realization has ``n`` components. Each gets an outage time drawn from the
outage-time distribution, an independent restore time drawn from the
restore-time distribution, and a quantity from the quantity model. Outage
``i`` and restore ``i`` are not coupled, so a realization can briefly have
``P(t) > 0``; only averages over realizations are meaningful, and the
fraction of such points is reported as a diagnostic.

Realizations are generated in fixed blocks of :data:`BLOCK_SIZE`. Block ``b``
draws from ``Philox(key=seed, counter=b << 192)``, and per-block statistics
are merged in block order, so results depend only on ``(seed, M)`` and never
on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError
from .model import (
    ConstantRestore,
    EventModel,
    ExponentialRestore,
    LognormalRestore,
    mean_outage_time,
    mean_restore_time,
)

BLOCK_SIZE = 512
# cap on the (rows, n, grid) broadcast when evaluating curves
_CHUNK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class ConstantQuantity:
    value: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValidationError(f"quantity must be > 0, got {self.value!r}")

    @property
    def mean(self) -> float:
        return self.value


@dataclass(frozen=True)
class SampleListQuantity:
    """Quantities drawn uniformly with replacement from ``values``."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValidationError("quantity sample list is empty")
        if not all(math.isfinite(v) and v > 0 for v in vals):
            raise ValidationError("quantity samples must be positive and finite")
        object.__setattr__(self, "values", vals)

    @property
    def mean(self) -> float:
        return math.fsum(self.values) / len(self.values)


QuantityModel = Union[ConstantQuantity, SampleListQuantity]


@dataclass(frozen=True)
class SimulationConfig:
    realizations: int
    seed: int
    grid: tuple[float, ...] = ()
    quantity_model: QuantityModel = ConstantQuantity(1.0)
    n: int | None = None
    workers: int = 1

    def __post_init__(self):
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise ValidationError(f"realizations must be a positive integer, got {self.realizations!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an integer in [0, 2**64)")
        grid = tuple(float(g) for g in self.grid)
        if any(not math.isfinite(g) or g < 0 for g in grid):
            raise ValidationError("grid times must be finite and >= 0")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ValidationError("grid must be sorted")
        object.__setattr__(self, "grid", grid)
        if self.n is not None and (int(self.n) != self.n or self.n < 1):
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")


@dataclass(frozen=True)
class RealizedEvent:
    outage_times: np.ndarray
    restore_times: np.ndarray
    quantities: np.ndarray


@dataclass(frozen=True)
class CurveEstimate:
    grid: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    M: int


@dataclass(frozen=True)
class AreaEstimate:
    mean: float
    stderr: float
    M: int
    n: int
    quantity_mean: float


@dataclass(frozen=True)
class SimulationResult:
    """Everything one simulation pass produces.

    ``realized_nadir_*`` is the mean depth of individual realizations, which
    is at least the nadir of the mean curve.
    """

    area: AreaEstimate
    curve: CurveEstimate
    realized_nadir_mean: float
    realized_nadir_stderr: float
    positive_fraction: float
    n: int
    expected_area: float = field(default=float("nan"))


def default_count(m: EventModel, quantity_model: QuantityModel = ConstantQuantity(1.0)) -> int:
    """Components per realization so that ``n * mean quantity`` is closest to ``n_c``."""
    return max(1, int(round(m.n_c / quantity_model.mean)))


def expected_area(m: EventModel, n: int, quantity_model: QuantityModel) -> float:
    """``n * cbar * (rbar - obar)``, the mean realized area under this sampling."""
    return n * quantity_model.mean * (mean_restore_time(m) - mean_outage_time(m))


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 192))


def _sample_block(m: EventModel, n: int, qm: QuantityModel, rng: np.random.Generator, rows: int):
    shape = (rows, n)
    outages = rng.uniform(0.0, m.outage.o_b, shape)
    r = m.restore
    if isinstance(r, ConstantRestore):
        restores = r.r_a + (r.r_b - r.r_a) * rng.random(shape)
    elif isinstance(r, LognormalRestore):
        restores = r.r_a + np.exp(r.mu + r.sigma * rng.standard_normal(shape))
    elif isinstance(r, ExponentialRestore):
        # 1 - U lies in (0, 1]
        restores = r.r_a - r.tau * np.log1p(-rng.random(shape))
    else:
        raise ValidationError(f"unsupported restore model {type(r).__name__}")
    if isinstance(qm, ConstantQuantity):
        quantities = np.full(shape, qm.value)
    else:
        quantities = rng.choice(np.asarray(qm.values), size=shape, replace=True)
    return outages, restores, quantities


def sample_event(
    m: EventModel,
    n: int,
    quantity_model: QuantityModel = ConstantQuantity(1.0),
    rng: np.random.Generator | None = None,
) -> RealizedEvent:
    """Draw one realization with ``n`` components."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    o, r, c = _sample_block(m, n, quantity_model, rng, 1)
    return RealizedEvent(o[0], r[0], c[0])


def _performance_on_grid(o, r, c, grid: np.ndarray) -> np.ndarray:
    rows, n = o.shape
    out = np.empty((rows, len(grid)))
    step = max(1, _CHUNK_ELEMENTS // max(1, n * len(grid)))
    for s in range(0, rows, step):
        sl = slice(s, s + step)
        g = grid[None, None, :]
        restored = (r[sl, :, None] <= g) * c[sl, :, None]
        outaged = (o[sl, :, None] <= g) * c[sl, :, None]
        out[sl] = (restored - outaged).sum(axis=1)
    return out


def _realized_nadir(o, r, c) -> np.ndarray:
    times = np.concatenate([o, r], axis=1)
    jumps = np.concatenate([-c, c], axis=1)
    # at equal times restores sort first, so partial sums never undershoot
    order = np.lexsort((-jumps, times), axis=1)
    path = np.cumsum(np.take_along_axis(jumps, order, axis=1), axis=1)
    return np.maximum(0.0, -path.min(axis=1))


@dataclass
class _Moments:
    """Count, mean and sum of squared deviations; merged with Chan's update."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        mean = x.mean(axis=0)
        return cls(x.shape[0], mean, ((x - mean) ** 2).sum(axis=0))

    def merge(self, other: "_Moments") -> "_Moments":
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / count)
        m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / count)
        return _Moments(count, mean, m2)

    def stderr(self):
        if self.count < 2:
            return np.full_like(np.asarray(self.mean, dtype=float), np.nan)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


def _run_block(m, n, qm, seed, block, rows, grid):
    o, r, c = _sample_block(m, n, qm, block_generator(seed, block), rows)
    area = (c * (r - o)).sum(axis=1)
    depth = _realized_nadir(o, r, c)
    if len(grid):
        perf = _performance_on_grid(o, r, c, grid)
        positive = int((perf > 0).sum())
        curve = _Moments.of(perf)
    else:
        positive = 0
        curve = None
    return _Moments.of(area), _Moments.of(depth), curve, positive


def simulate(m: EventModel, cfg: SimulationConfig) -> SimulationResult:
    """Run ``cfg.realizations`` realizations and collect all estimates."""
    n = cfg.n if cfg.n is not None else default_count(m, cfg.quantity_model)
    grid = np.asarray(cfg.grid, dtype=float)
    M = cfg.realizations
    blocks = [(b, min(BLOCK_SIZE, M - b * BLOCK_SIZE)) for b in range(-(-M // BLOCK_SIZE))]

    def work(spec):
        b, rows = spec
        return _run_block(m, n, cfg.quantity_model, cfg.seed, b, rows, grid)

    if cfg.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(spec) for spec in blocks]

    area, depth, curve, positive = parts[0]
    for a2, d2, c2, p2 in parts[1:]:
        area = area.merge(a2)
        depth = depth.merge(d2)
        curve = curve.merge(c2) if curve is not None else None
        positive += p2

    if curve is not None:
        curve_est = CurveEstimate(grid, np.asarray(curve.mean), np.asarray(curve.stderr()), M)
    else:
        curve_est = CurveEstimate(grid, np.zeros(0), np.zeros(0), M)
    qmean = cfg.quantity_model.mean
    return SimulationResult(
        area=AreaEstimate(float(area.mean), float(area.stderr()), M, n, qmean),
        curve=curve_est,
        realized_nadir_mean=float(depth.mean),
        realized_nadir_stderr=float(depth.stderr()),
        positive_fraction=positive / (M * len(grid)) if len(grid) else 0.0,
        n=n,
        expected_area=expected_area(m, n, cfg.quantity_model),
    )


def estimate_mean_curve(m: EventModel, cfg: SimulationConfig) -> CurveEstimate:
    """Pointwise mean and standard error of the realized performance curve on ``cfg.grid``."""
    return simulate(m, cfg).curve


def estimate_mean_area(m: EventModel, cfg: SimulationConfig) -> AreaEstimate:
    """Mean realized area with its standard error (NaN when M = 1)."""
    area_cfg = SimulationConfig(
        cfg.realizations, cfg.seed, (), cfg.quantity_model, cfg.n, cfg.workers
    )
    return simulate(m, area_cfg).area


def uniform_grid(t_max: float, steps: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.linspace(0.0, t_max, steps + 1))


def z_score(estimate: float, stderr: float, target: float) -> float:
    if not stderr > 0:
        return 0.0 if estimate == target else math.copysign(math.inf, estimate - target)
    return (estimate - target) / stderr


def grid_agreement(curve: CurveEstimate, analytic: Sequence[float], n_sigma: float = 4.0) -> np.ndarray:
    """Boolean mask of grid points where the estimate is within ``n_sigma`` standard errors.

    Where every realization agreed (stderr 0) the sample carries no spread, yet a
    rare departure with probability below about 1/M can still shift the exact
    mean. Those points are held to ``n_sigma * scale / M`` instead, with scale the
    largest analytic magnitude.
    """
    analytic = np.asarray(analytic, dtype=float)
    diff = np.abs(curve.mean - analytic)
    scale = max(1.0, float(np.max(np.abs(analytic), initial=0.0)))
    return np.where(curve.stderr > 0, diff <= n_sigma * curve.stderr, diff <= n_sigma * scale / curve.M)
