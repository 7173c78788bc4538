"""Acceptance checks, one per criterion.

Run ``python3 tests/test_acceptance.py`` for a PASS/FAIL line per criterion, or
``pytest tests/test_acceptance.py -s`` to see the same lines under pytest.
"""
import itertools
import math
import sys

import numpy as np
import pytest
from scipy.integrate import quad

from catphase.detection import baseline_threshold, discriminate, homodyne_pdf, squeezed_baseline
from catphase.fock_stats import (
    PhotonDistribution,
    auto_dps,
    closed_form_distribution,
    distribution_distance,
    pn_combinatorial,
    quadrature_distribution,
)
from catphase.optimize import optimize_point, sweep
from catphase.phase_space import (
    ProbeSpec,
    effective_channel,
    fringe_overlap,
    negativity_analytic,
    negativity_numeric,
    negativity_validity,
    wigner_coeffs,
)
from catphase.special_fn import jacobi_theta3


def _coeffs(spec):
    ch = effective_channel(spec)
    return wigner_coeffs(spec.alpha, spec.r, ch.eta, ch.delta)


def criterion_1():
    worst = 0.0
    ok = True
    for alpha in (0.5, 1.0, 2.0, 10.0):
        c = wigner_coeffs(alpha, 0.0, 1.0, 0.0)
        F = 1.0 / (math.pi * (1.0 + math.exp(-2.0 * alpha**2)))
        ok &= (c.A, c.B, c.C, c.D) == (2.0, 2.0, 0.0, 4.0 * alpha)
        worst = max(worst, abs(c.F - F) / F)
    ok &= worst <= 2.2e-16
    return ok, f"A=B=2, C=0, D=4a exact; max rel F error {worst:.1e}"


def criterion_2():
    # closed form evaluated in extended precision over the full range the
    # combinatorial reference resolves
    worst, worst_away = 0.0, 0.0
    for r, d0 in itertools.product(np.linspace(0, 1.2, 7), np.linspace(0, 1.5, 7)):
        spec = ProbeSpec(alpha=1.5, r=r, eta2=0.85, delta0=d0)
        ref = pn_combinatorial(spec)
        cf = closed_form_distribution(_coeffs(spec), ref.n_max, dps=auto_dps(ref.n_max))
        delta = distribution_distance(cf, ref)
        worst = max(worst, delta)
        if r > 0.1:
            worst_away = max(worst_away, delta)
    ok = worst <= 0.002 and worst_away <= 0.001
    return ok, f"max Delta {worst:.2e} (limit 2e-3); away from r=0 {worst_away:.2e} (limit 1e-3)"


def criterion_3():
    worst = 0.0
    grid = itertools.product([0.5, 1.25, 2.0], [0.0, 0.5, 1.0], [0.85, 0.925, 1.0], [0.0, 0.75, 1.5])
    for alpha, r, eta, d0 in grid:
        spec = ProbeSpec(alpha=alpha, r=r, eta2=eta, delta0=d0)
        q = quadrature_distribution(_coeffs(spec), 15).probs
        cb = pn_combinatorial(spec).probs[:16]
        worst = max(worst, float(np.max(np.abs(q - cb))))
    return worst <= 1e-4, f"max |p_quad - p_comb| over 81 points, n<=15: {worst:.2e} (limit 1e-4)"


def criterion_4():
    best = optimize_point(2.0, 0.975)
    ok = 0.07 <= best.p_tot <= 0.13 and 0.45 <= best.r <= 0.70 and 0.55 <= best.delta0 <= 0.85
    return ok, f"p_tot={best.p_tot:.4f} at delta0={best.delta0:.4f}, r={best.r:.4f}"


NEG_ALPHAS = (1.0, 2.0, 3.0, 6.5, 10.0)
NEG_ETAS = (0.8, 0.9, 1.0)
NEG_RS = np.linspace(0.0, 4.0, 17)


def criterion_5():
    worst, worst_at, checked = 0.0, None, 0
    for alpha, eta, r in itertools.product(NEG_ALPHAS, NEG_ETAS, NEG_RS):
        holds, margin = negativity_validity(alpha, r, eta)
        if not (holds and margin > 0.1):
            continue
        checked += 1
        num = negativity_numeric(wigner_coeffs(alpha, r, eta))
        rel = abs(negativity_analytic(alpha, r, eta) - num) / num
        if rel > worst:
            worst, worst_at = rel, (alpha, eta, float(r))
    target = jacobi_theta3(math.pi / 2, math.exp(-200.0)) / (math.pi * (1.0 + math.exp(-200.0)))
    bright = negativity_analytic(10.0, 0.0, 1.0)
    ok_bright = abs(bright - target) <= 1e-6 and abs(bright - 1 / math.pi) <= 1e-6
    ok = ok_bright and checked > 0 and worst <= 0.01
    return ok, (f"{checked} valid points, max rel diff {worst:.3g} at (alpha, eta, r)={worst_at} "
                f"(limit 0.01); alpha=10 lossless value {bright:.10f} vs 1/pi {1 / math.pi:.10f}")


def criterion_6():
    hi = min(fringe_overlap(6.5, r, 0.9) for r in np.linspace(0.46, 1.15, 15))
    lo = min(fringe_overlap(4.0, r, 0.9) for r in np.linspace(0.46, 1.15, 15))
    return hi > 0.999 and lo >= 0.998, f"min I at alpha=6.5: {hi:.5f} (>0.999); at alpha=4: {lo:.5f} (>=0.998)"


def criterion_7():
    worst = 0.0
    for d0, r, eta in itertools.product(np.linspace(0, 3, 13), np.linspace(0, 1.2, 7), (0.9, 0.975, 1.0)):
        thr = baseline_threshold(d0, eta)
        fp = quad(lambda p: homodyne_pdf(p, 0.0, r, eta), thr, np.inf, epsabs=1e-15, epsrel=1e-13)[0]
        fn = quad(lambda p: homodyne_pdf(p, d0, r, eta), -np.inf, thr, epsabs=1e-15, epsrel=1e-13)[0]
        worst = max(worst, abs(squeezed_baseline(d0, r, eta) - (fp + fn)))
    return worst <= 1e-10, f"max |p_sq - quadrature| {worst:.2e} over 273 points (limit 1e-10)"


def criterion_8():
    cells = sweep([1.5, 2.0, 2.5, 3.0], [0.96, 0.98, 1.0])
    best = min(cells, key=lambda c: c.ratio)
    ok = best.ratio < 0.5 and all(not c.error for c in cells)
    n_below = sum(c.ratio < 0.5 for c in cells)
    return ok, (f"{n_below}/{len(cells)} cells with p_tot/p_sq < 0.5; best {best.ratio:.3f} "
                f"at alpha={best.alpha}, eta={best.eta}")


def criterion_9():
    rng = np.random.default_rng(2024)
    worst = -np.inf
    for n_max in range(13):
        for _ in range(4):
            a = rng.random(n_max + 1) ** 2
            b = rng.random(n_max + 1) ** 2
            a, b = 0.998 * a / a.sum(), 0.999 * b / b.sum()
            p0 = PhotonDistribution(probs=a, tail_bound=0.002)
            pd = PhotonDistribution(probs=b, tail_bound=0.001)
            ml = discriminate(p0, pd).p_tot
            masks = np.array(list(itertools.product([False, True], repeat=n_max + 1)))
            best_alt = float(((masks * a).sum(1) + (~masks * b).sum(1)).min())
            worst = max(worst, ml - best_alt - 2 * max(p0.tail_bound, pd.tail_bound))
    return worst <= 0.0, f"max (p_ML - best partition - 2 tail) = {worst:.2e} (must be <= 0)"


CRITERIA = {
    1: ("lossless-limit coefficients", criterion_1),
    2: ("closed form vs combinatorial photon statistics", criterion_2),
    3: ("quadrature referee vs combinatorial", criterion_3),
    4: ("operating point at alpha=2, eta=0.975", criterion_4),
    5: ("negativity analytic vs numeric", criterion_5),
    6: ("fringe-overlap diagnostic", criterion_6),
    7: ("squeezed baseline closed form", criterion_7),
    8: ("cat beats squeezed baseline by 2x somewhere", criterion_8),
    9: ("ML optimality by enumeration", criterion_9),
}


def _line(k, ok, detail):
    return f"{'PASS' if ok else 'FAIL'}  criterion {k}: {CRITERIA[k][0]}: {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k][1]()
    with capsys.disabled():
        print("\n" + _line(k, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    only = {int(a) for a in sys.argv[1:]} or set(CRITERIA)
    failed = 0
    for k in sorted(only):
        ok, detail = CRITERIA[k][1]()
        failed += not ok
        print(_line(k, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
