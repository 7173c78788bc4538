"""Photon-number histograms with and without the phase shift at one operating point.

Also prints the ML decision regions and the resulting error probabilities.
"""
import argparse
from pathlib import Path

from catphase.detection import error_probs, ml_partition, squeezed_baseline
from catphase.fock_stats import pn_combinatorial
from catphase.output import write_csv
from catphase.phase_space import ProbeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--eta", type=float, default=0.975)
    ap.add_argument("--r", type=float, default=0.56)
    ap.add_argument("--delta0", type=float, default=0.68)
    ap.add_argument("--n-show", type=int, default=15)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    p0 = pn_combinatorial(ProbeSpec(alpha=args.alpha, r=args.r, eta2=args.eta, delta0=0.0))
    pd = pn_combinatorial(ProbeSpec(alpha=args.alpha, r=args.r, eta2=args.eta, delta0=args.delta0))
    rule = ml_partition(p0, pd)
    rep = error_probs(rule, p0, pd, p_sq=squeezed_baseline(args.delta0, args.r, args.eta))
    a, b = p0.padded(rule.n_max), pd.padded(rule.n_max)
    print(" n    p0        pdelta    region")
    for n in range(min(args.n_show, rule.n_max) + 1):
        print(f"{n:2d}  {a[n]:.6f}  {b[n]:.6f}  {rule.region(n)}")
    print(f"p_fp={rep.p_fp:.4f} p_fn={rep.p_fn:.4f} p_tot={rep.p_tot:.4f} p_sq={rep.p_sq:.4f}")
    rows = [(n, a[n], b[n], rule.region(n)) for n in range(rule.n_max + 1)]
    print(write_csv(Path(args.out) / "count_histograms.csv", ["n", "p0", "pdelta", "region"], rows,
                    {**vars(args), "report": rep.to_dict()}))


if __name__ == "__main__":
    main()
