"""Optimized total error, optimal (delta0, r) and the ratio to the squeezed baseline over (alpha, eta)."""
import argparse
import time
from pathlib import Path

import numpy as np

from catphase.optimize import COARSE_SHAPE, N_REFINE, sweep
from catphase.output import write_csv
from catphase.special_fn import db_from_r


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, nargs=3, default=[1.5, 3.0, 16], metavar=("LO", "HI", "N"))
    ap.add_argument("--eta", type=float, nargs=3, default=[0.95, 1.0, 11], metavar=("LO", "HI", "N"))
    ap.add_argument("--coarse", type=int, nargs=2, default=list(COARSE_SHAPE))
    ap.add_argument("--refine", type=int, default=N_REFINE)
    ap.add_argument("--workers", type=int, default=None, help="default: CATPHASE_THREADS or 1")
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    alphas = np.linspace(args.alpha[0], args.alpha[1], int(args.alpha[2]))
    etas = np.linspace(args.eta[0], args.eta[1], int(args.eta[2]))
    t0 = time.perf_counter()
    cells = sweep(alphas, etas, coarse_shape=tuple(args.coarse), n_refine=args.refine, workers=args.workers)
    print(f"{len(cells)} cells in {time.perf_counter() - t0:.0f} s")
    rows = []
    for c in cells:
        row = c.row()
        row["r_db"] = db_from_r(c.best.r) if np.isfinite(c.best.r) else float("nan")
        rows.append(row)
        print(f"alpha={c.alpha:.2f} eta={c.eta:.3f} p_tot={c.best.p_tot:.4f} "
              f"delta0={c.best.delta0:.3f} r={c.best.r:.3f} ratio={c.ratio:.3f} {c.error}")
    cols = ["alpha", "eta", "delta0", "r", "r_db", "p_tot", "p_sq", "ratio", "method", "error"]
    print(write_csv(Path(args.out) / "efficiency_sweep.csv", cols, rows, vars(args)))


if __name__ == "__main__":
    main()
