"""Sweep random models and compare Monte Carlo estimates against closed forms.

    python3 scripts/mc_check.py --models 30 --realizations 20000 --seed 7
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from strategies import KINDS, random_models  # noqa: E402

from resil.model import area_closed_form, mean_performance  # noqa: E402
from resil.montecarlo import SimulationConfig, grid_agreement, simulate  # noqa: E402
from resil.verify import event_horizon  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", type=int, default=30)
    ap.add_argument("--realizations", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    zs, curve_misses, points = [], 0, 0
    start = time.perf_counter()
    print(f"{'kind':<12}{'n_c':>6}{'area':>14}{'mc':>14}{'z':>8}{'curve ok':>10}")
    for i in range(args.models):
        kind = KINDS[i % len(KINDS)]
        (m,) = random_models(args.seed * 1000 + i, kind, 1, integer_total=True)
        grid = tuple(np.linspace(0.0, event_horizon(m), 50))
        res = simulate(m, SimulationConfig(args.realizations, args.seed + i, grid, workers=args.workers))
        exact = area_closed_form(m)
        z = (res.area.mean - exact) / res.area.stderr
        ok = grid_agreement(res.curve, mean_performance(m, np.asarray(grid)))
        zs.append(z)
        curve_misses += int((~ok).sum())
        points += ok.size
        print(f"{kind:<12}{m.n_c:>6.0f}{exact:>14.4f}{res.area.mean:>14.4f}{z:>8.2f}{ok.mean():>10.0%}")

    zs = np.asarray(zs)
    print(f"area z: mean {zs.mean():+.3f}, sd {zs.std(ddof=1):.3f}, max |z| {np.abs(zs).max():.2f}")
    print(f"curve points outside 4 stderr: {curve_misses}/{points}")
    print(f"elapsed {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
