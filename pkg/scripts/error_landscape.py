"""Total error landscape over (delta0, r) at fixed alpha, eta, and its local minima."""
import argparse
import time
from pathlib import Path

import numpy as np

from catphase.optimize import landscape
from catphase.output import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--eta", type=float, default=0.975)
    ap.add_argument("--delta0", type=float, nargs=3, default=[0.0, 1.5, 61], metavar=("LO", "HI", "N"))
    ap.add_argument("--r", type=float, nargs=3, default=[0.0, 1.7, 35], metavar=("LO", "HI", "N"))
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    d_grid = np.linspace(args.delta0[0], args.delta0[1], int(args.delta0[2]))
    r_grid = np.linspace(args.r[0], args.r[1], int(args.r[2]))
    t0 = time.perf_counter()
    land = landscape(args.alpha, args.eta, d_grid, r_grid)
    print(f"{land.p_tot.size} cells in {time.perf_counter() - t0:.1f} s, {int(land.invalid.sum())} invalid")
    best = land.global_min()
    print(f"global minimum p_tot={best.p_tot:.4f} at delta0={best.delta0:.3f}, r={best.r:.3f}")
    for d, r, v in land.minima[:10]:
        print(f"  local minimum p_tot={v:.4f} at delta0={d:.3f}, r={r:.3f}")
    meta = {"alpha": args.alpha, "eta": args.eta}
    out = Path(args.out)
    write_csv(out / "landscape.csv", ["delta0", "r", "p_tot"],
              [[row["delta0"], row["r"], row["p_tot"]] for row in land.rows()], meta)
    print(write_csv(out / "minima.csv", ["delta0", "r", "p_tot"], land.minima, meta))


if __name__ == "__main__":
    main()
