"""Consistency audit of a model: formulas against quadrature, grids and simulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    ConstantRestore,
    EventModel,
    OnInterval,
    area_closed_form,
    area_numeric,
    mean_cum_restores,
    mean_performance,
    nadir,
    restore_durations,
    truncation_time,
)
from .montecarlo import SimulationConfig, grid_agreement, simulate, z_score
from .numerics import Tolerance

NADIR_GRID_POINTS = 10_000
CURVE_GRID_POINTS = 50
Z_LIMIT = 4.0


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def event_horizon(m: EventModel) -> float:
    """End of the interesting part of the event: outages over and 95% restored."""
    return float(max(m.outage.o_b, m.restore.r_a, m.restore.quantile(0.95)))


def grid_minimum(m: EventModel, t_max: float, points: int = NADIR_GRID_POINTS):
    """``(t_argmin, min P, step)`` of the mean performance curve on a uniform grid."""
    grid = np.linspace(0.0, t_max, points)
    perf = mean_performance(m, grid)
    k = int(np.argmin(perf))
    return float(grid[k]), float(perf[k]), float(grid[1] - grid[0])


def verify_model(
    m: EventModel,
    realizations: int = 10_000,
    seed: int = 0,
    tol: Tolerance = Tolerance(),
    scale: float = 1.0,
) -> list[Check]:
    """Run every cross-check; ``scale`` multiplies all acceptance thresholds."""
    checks = []
    n_c = m.n_c

    area = area_closed_form(m)
    numeric = area_numeric(m, tol)
    limit = scale * max(1e-6, 1e-6 * abs(area))
    diff = abs(area - numeric)
    checks.append(Check("area closed form = quadrature", diff <= limit,
                        f"|{area:.10g} - {numeric:.10g}| = {diff:.3g} <= {limit:.3g}"))

    nd = nadir(m)
    off = abs(nd.value + mean_performance(m, nd.time))
    limit = scale * 1e-9 * n_c
    checks.append(Check("nadir value = -P(nadir time)", off <= limit, f"{off:.3g} <= {limit:.3g}"))

    lo, hi = sorted((m.restore.r_a, m.outage.o_b))
    if isinstance(nd.location, OnInterval):
        inside = (nd.location.t_lo, nd.location.t_hi) == (m.outage.o_b, m.restore.r_a)
    else:
        inside = lo <= nd.time <= hi
    checks.append(Check("nadir time in [r_a, o_b] bracket", inside and scale > 0, f"t = {nd.time:.10g}"))

    ok = True
    details = []
    for label, span in (("horizon", event_horizon(m)), ("truncation", truncation_time(m, tol.abs_tol))):
        t_min, p_min, step = grid_minimum(m, span)
        below = -nd.value - p_min
        limit = scale * 1e-6 * n_c
        ok &= below <= limit
        details.append(f"{label}: grid min {p_min:.10g} at {t_min:.6g}")
        if label == "horizon" and not isinstance(nd.location, OnInterval):
            ok &= abs(t_min - nd.time) <= scale * step
    checks.append(Check("nadir vs grid minimization", bool(ok), "; ".join(details)))

    durations = restore_durations(m)
    r = m.restore
    if isinstance(r, ConstantRestore):
        frac = mean_cum_restores(m, r.r_a + durations["D_n"]) / n_c
        target = 1.0
    else:
        key = "D_95_ln" if "D_95_ln" in durations else "D_95_exp"
        frac = mean_cum_restores(m, r.r_a + durations[key]) / n_c
        target = 0.95
    off = abs(frac - target)
    checks.append(Check("restore fraction at duration", off <= scale * 1e-9,
                        f"R(r_a + D)/n_c = {frac:.12g}, target {target}"))

    horizon = event_horizon(m)
    grid = tuple(np.linspace(0.0, horizon, CURVE_GRID_POINTS))
    sim = simulate(m, SimulationConfig(realizations, seed, grid))
    z = z_score(sim.area.mean, sim.area.stderr, sim.expected_area)
    checks.append(Check("Monte Carlo mean area", abs(z) <= scale * Z_LIMIT,
                        f"{sim.area.mean:.6g} +/- {sim.area.stderr:.3g} vs {sim.expected_area:.6g}, z = {z:.3f}"))

    # the simulator draws n whole components of mean quantity cbar
    ratio = sim.n * sim.area.quantity_mean / n_c
    analytic = ratio * np.asarray(mean_performance(m, np.asarray(grid)))
    agree = grid_agreement(sim.curve, analytic, scale * Z_LIMIT)
    checks.append(Check("Monte Carlo mean curve", bool(agree.all()),
                        f"{int(agree.sum())}/{len(agree)} grid points within {Z_LIMIT:g} stderr"))

    se = sim.realized_nadir_stderr if np.isfinite(sim.realized_nadir_stderr) else 0.0
    depth_ok = sim.realized_nadir_mean >= ratio * nd.value - scale * Z_LIMIT * se
    checks.append(Check("mean realized nadir >= nadir of mean", bool(depth_ok),
                        f"{sim.realized_nadir_mean:.6g} vs {ratio * nd.value:.6g}"))
    return checks
