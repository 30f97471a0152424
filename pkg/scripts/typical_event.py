"""Metrics and mean curves for the typical transmission event.

    python3 scripts/typical_event.py [--out curves.csv]
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from resil.io import load_model
from resil.model import mean_cum_outages, mean_cum_restores, metrics, restore_durations

DATA = Path(__file__).resolve().parent.parent / "data" / "typical_event.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default=str(DATA))
    ap.add_argument("--out", help="optional CSV of O_bar, R_bar, P_bar")
    ap.add_argument("--steps", type=int, default=400)
    args = ap.parse_args()

    m = load_model(args.model)
    rep = metrics(m)
    print(f"area            {rep.area:.6f} customer-hours (quadrature {rep.area_numeric:.6f})")
    print(f"nadir           {rep.nadir.value:.4f} at t = {rep.nadir.time:.4f} h")
    print(f"mean outage     {rep.mean_outage_time:.4f} h")
    print(f"mean restore    {rep.mean_restore_time:.4f} h")
    for key, value in restore_durations(m).items():
        print(f"{key:<15} {value:.4f} h")

    if args.out:
        # span the outage window and the bulk of the restoration
        t_end = m.restore.r_a + 1.5 * max(restore_durations(m).values())
        t = np.linspace(0.0, max(t_end, m.outage.o_b), args.steps + 1)
        o, r = mean_cum_outages(m, t), mean_cum_restores(m, t)
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "O_bar", "R_bar", "P_bar"])
            w.writerows(zip(t, o, r, r - o))
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
