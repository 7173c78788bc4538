"""Negativity volume versus anti-squeezing (dB) for a bright cat, with and without loss.

Writes out/negativity_curve.csv with analytic and numeric values and the
validity flag, plus the r at which the validity inequality saturates.
"""
import argparse
from pathlib import Path

import numpy as np

from catphase.output import write_csv
from catphase.phase_space import (
    negativity_analytic,
    negativity_numeric,
    negativity_validity,
    validity_r_max,
    wigner_coeffs,
)
from catphase.special_fn import db_from_r, r_from_db


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=10.0)
    ap.add_argument("--etas", type=float, nargs="+", default=[0.9, 1.0])
    ap.add_argument("--db-max", type=float, default=40.0)
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    rows = []
    for eta in args.etas:
        for db in np.linspace(0.0, args.db_max, args.points):
            r = r_from_db(db)
            ok, margin = negativity_validity(args.alpha, r, eta)
            num = negativity_numeric(wigner_coeffs(args.alpha, r, eta))
            rows.append([eta, r, db, negativity_analytic(args.alpha, r, eta), num, ok, margin])
            print(f"eta={eta:<5} {db:5.1f} dB  analytic={rows[-1][3]:.5f}  numeric={num:.5f}  valid={ok}")
    s_max = {str(e): validity_r_max(args.alpha, e) for e in args.etas}
    s_max_db = {k: (None if v is None else db_from_r(v)) for k, v in s_max.items()}
    path = write_csv(Path(args.out) / "negativity_curve.csv",
                     ["eta", "r", "db", "v_neg_analytic", "v_neg_numeric", "valid", "margin"], rows,
                     {"alpha": args.alpha, "validity_r_max": s_max, "validity_db_max": s_max_db})
    print(path)


if __name__ == "__main__":
    main()
