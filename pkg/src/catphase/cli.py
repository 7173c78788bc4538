"""Command-line front end.

    catphase <command> [--config PATH] [--out DIR] [--format csv|json]
                       [--engine closed|quadrature|combinatorial|all]
                       [--dim N] [--n-stable N] [--threads N] [--set key=value ...]

Commands: wigner, negativity, photon-stats, detect, landscape, sweep, validate.
"""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
from pathlib import Path

import numpy as np
from scipy.integrate import quad, trapezoid

from . import detection, fock_stats, optimize, phase_space
from .config import load_config, parse_value
from .output import versions, write_json, write_table
from .special_fn import db_from_r

log = logging.getLogger("catphase")


def _meta(command, cfg, **extra):
    meta = {"command": command, "config": cfg.to_dict(), "versions": versions()}
    meta.update(extra)
    return meta


def _eta(cfg):
    return cfg.eta1 * cfg.eta2


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_wigner(cfg):
    spec = cfg.probe(cfg.delta0_values()[0])
    ch = phase_space.effective_channel(spec)
    c = phase_space.wigner_coeffs(spec.alpha, spec.r, ch.eta, ch.delta)
    xs, ps = cfg.grid("x_grid"), cfg.grid("p_grid")
    if len(xs) < 2 or len(ps) < 2:
        raise ValueError("wigner needs at least two points in x_grid and p_grid")
    rows = phase_space.wigner_grid(c, xs, ps)
    W = rows[:, 2].reshape(len(xs), len(ps))
    grid_integral = float(trapezoid(trapezoid(W, ps, axis=1), xs))
    meta = _meta("wigner", cfg, coeffs=vars(c), grid_integral=grid_integral)
    return [write_table(cfg.out, "wigner", cfg.format, ["x", "p", "W"], rows.tolist(), meta)]


def cmd_negativity(cfg):
    etas = cfg.eta_list if cfg.eta_list is not None else [_eta(cfg)]
    etas = [float(e) for e in (etas if isinstance(etas, list) else [etas])]
    cols = ["eta", "r", "db", "v_neg_analytic", "valid", "margin"]
    if cfg.numeric:
        cols.append("v_neg_numeric")
    rows = []
    for eta in etas:
        for r in cfg.grid("r_grid"):
            ok, margin = phase_space.negativity_validity(cfg.alpha, r, eta)
            row = [eta, r, db_from_r(r), phase_space.negativity_analytic(cfg.alpha, r, eta), ok, margin]
            if cfg.numeric:
                c = phase_space.wigner_coeffs(cfg.alpha, r, eta, 0.0)
                row.append(phase_space.negativity_numeric(c, tol=cfg.quad_tol))
            rows.append(row)
    r_max = {str(e): phase_space.validity_r_max(cfg.alpha, e) for e in etas}
    meta = _meta("negativity", cfg, validity_r_max=r_max)
    return [write_table(cfg.out, "negativity", cfg.format, cols, rows, meta)]


def _distribution(cfg, engine, spec, notes):
    ch = phase_space.effective_channel(spec)
    if engine == "closed" and cfg.dps is None and cfg.n_max > cfg.n_stable:
        notes.append(f"closed engine: n_max={cfg.n_max} > n_stable={cfg.n_stable}, using combinatorial")
        log.warning(notes[-1])
        engine = "combinatorial"
    if engine == "closed":
        c = phase_space.wigner_coeffs(spec.alpha, spec.r, ch.eta, ch.delta)
        return engine, fock_stats.closed_form_distribution(c, cfg.n_max, n_stable=cfg.n_stable, dps=cfg.dps)
    if engine == "quadrature":
        c = phase_space.wigner_coeffs(spec.alpha, spec.r, ch.eta, ch.delta)
        return engine, fock_stats.quadrature_distribution(c, cfg.n_max)
    return engine, fock_stats.pn_combinatorial(spec, dim=cfg.dim, tol=cfg.norm_tol)


def _write_distribution(cfg, stem, dist, meta):
    if cfg.format == "json":
        payload = {"n_max": dist.n_max, "probs": dist.probs, "tail_bound": dist.tail_bound}
        return write_json(Path(cfg.out) / f"{stem}.json", payload, meta)
    rows = [(n, p) for n, p in enumerate(dist.probs)]
    return write_table(cfg.out, stem, "csv", ["n", "p_n"], rows, dict(meta, tail_bound=dist.tail_bound))


def cmd_photon_stats(cfg):
    written, dist_rows = [], []
    for d0 in cfg.delta0_values():
        spec = cfg.probe(d0)
        results = {}
        for engine in cfg.engines():
            notes = []
            used, dist = _distribution(cfg, engine, spec, notes)
            results[engine] = dist
            meta = _meta("photon-stats", cfg, engine=engine, engine_used=used, delta0=spec.delta0, notes=notes)
            written.append(_write_distribution(cfg, f"photon_stats_{engine}_d{spec.delta0:.6g}", dist, meta))
        for a, b in itertools.combinations(results, 2):
            dist_rows.append([spec.delta0, a, b, fock_stats.distribution_distance(results[a], results[b])])
    if dist_rows:
        written.append(write_table(cfg.out, "distances", cfg.format,
                                   ["delta0", "engine_a", "engine_b", "Delta"], dist_rows, _meta("photon-stats", cfg)))
    return written


def detect_report(cfg):
    engine = cfg.engines()[0] if cfg.engine != "all" else "combinatorial"
    d0 = cfg.delta0_values()[0] or 0.0
    notes = []
    _, p0 = _distribution(cfg, engine, cfg.probe(0.0), notes)
    used, pd = _distribution(cfg, engine, cfg.probe(d0), notes)
    rule = detection.ml_partition(p0, pd)
    p_sq = detection.squeezed_baseline(d0, abs(cfg.r), _eta(cfg)) if cfg.baseline else None
    report = detection.error_probs(rule, p0, pd, p_sq=p_sq)
    return report, rule, p0, pd, used, notes


def cmd_detect(cfg):
    report, rule, p0, pd, used, notes = detect_report(cfg)
    meta = _meta("detect", cfg, engine_used=used, notes=notes, tie_count=rule.tie_count)
    out = [write_json(Path(cfg.out) / "error_report.json", report.to_dict(), meta)]
    a, b = p0.padded(rule.n_max), pd.padded(rule.n_max)
    rows = [(n, region, a[n], b[n]) for n, region in rule.rows()]
    out.append(write_table(cfg.out, "regions", cfg.format, ["n", "region", "p0", "pdelta"], rows, meta))
    return out


def _bounds(cfg):
    d, r = cfg.grid("delta0_grid"), cfg.grid("r_grid")
    return (float(d[0]), float(d[-1])), (float(r[0]), float(r[-1]))


def _manifest(cfg, command, **extra):
    return {"command": command, "config": cfg.to_dict(), "versions": versions(),
            "grids": {k: cfg.grid(k) for k in ("delta0_grid", "r_grid", "alpha_grid", "eta_grid")},
            "tolerances": {"norm_tol": cfg.norm_tol, "quad_tol": cfg.quad_tol,
                           "tie_tol": detection.TIE_TOL, "nelder_mead_xatol": 1e-4,
                           "nelder_mead_fatol": 1e-8},
            "engine": "combinatorial", **extra}


def cmd_landscape(cfg):
    land = optimize.landscape(cfg.alpha, _eta(cfg), cfg.grid("delta0_grid"), cfg.grid("r_grid"),
                              threshold=cfg.minima_threshold)
    meta = _meta("landscape", cfg, eta=_eta(cfg))
    rows = [[row["delta0"], row["r"], row["p_tot"]] for row in land.rows()]
    out = [write_table(cfg.out, "landscape", cfg.format, ["delta0", "r", "p_tot"], rows, meta)]
    out.append(write_table(cfg.out, "minima", cfg.format, ["delta0", "r", "p_tot"], land.minima, meta))
    out.append(write_json(Path(cfg.out) / "manifest.json",
                          _manifest(cfg, "landscape", invalid_cells=int(land.invalid.sum())), {}))
    return out


def cmd_sweep(cfg):
    cells = optimize.sweep(cfg.grid("alpha_grid"), cfg.grid("eta_grid"), bounds=_bounds(cfg),
                           workers=cfg.threads)
    cols = ["alpha", "eta", "delta0", "r", "p_tot", "p_sq", "ratio", "method", "error"]
    rows = [c.row() for c in cells]
    meta = _meta("sweep", cfg)
    out = [write_table(cfg.out, "sweep", cfg.format, cols, rows, meta)]
    failed = [c for c in cells if c.error]
    out.append(write_json(Path(cfg.out) / "manifest.json",
                          _manifest(cfg, "sweep", bounds=_bounds(cfg), coarse_shape=optimize.COARSE_SHAPE,
                                    n_refine=optimize.N_REFINE, failed_cells=len(failed)), {}))
    if failed:
        raise RuntimeError(f"{len(failed)} sweep cells failed")
    return out


def validation_checks(cfg):
    """Small cross-method suite; each entry is ``(name, value, limit, passed)``."""
    checks = []
    for a in (0.5, 1.0, 2.0):
        c = phase_space.wigner_coeffs(a, 0.0, 1.0, 0.0)
        dev = max(abs(c.A - 2), abs(c.B - 2), abs(c.C), abs(c.D - 4 * a))
        checks.append((f"lossless coefficients alpha={a}", dev, 1e-15, dev <= 1e-15))
    for a, r, eta, d0 in [(1.0, 0.3, 0.9, 0.5), (2.0, 1.0, 0.85, 1.5), (1.5, 0.6, 0.95, 0.0)]:
        spec = phase_space.ProbeSpec(alpha=a, r=r, eta2=eta, delta0=d0)
        ch = phase_space.effective_channel(spec)
        c = phase_space.wigner_coeffs(a, r, ch.eta, ch.delta)
        cf = fock_stats.closed_form_distribution(c, 15).probs
        qd = fock_stats.quadrature_distribution(c, 15).probs
        cb = fock_stats.pn_combinatorial(spec).probs[:16]
        dev = max(np.abs(cf - cb).max(), np.abs(qd - cb).max())
        checks.append((f"three routes n<=15 at {spec}", float(dev), 1e-4, dev <= 1e-4))
    for d0, r, eta in [(0.7, 0.6, 0.975), (1.5, 1.2, 0.9)]:
        thr = detection.baseline_threshold(d0, eta)
        fp = quad(lambda p: detection.homodyne_pdf(p, 0.0, r, eta), thr, np.inf, epsabs=1e-14)[0]
        fn = quad(lambda p: detection.homodyne_pdf(p, d0, r, eta), -np.inf, thr, epsabs=1e-14)[0]
        dev = abs(fp + fn - detection.squeezed_baseline(d0, r, eta))
        checks.append((f"baseline closed form d0={d0} r={r} eta={eta}", dev, 1e-10, dev <= 1e-10))
    return checks


def cmd_validate(cfg):
    checks = validation_checks(cfg)
    for name, value, limit, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (limit {limit:g})")
    rows = [[n, v, l, ok] for n, v, l, ok in checks]
    out = [write_table(cfg.out, "validate", cfg.format, ["check", "value", "limit", "passed"], rows,
                       _meta("validate", cfg))]
    if not all(ok for *_, ok in checks):
        raise RuntimeError("validation failed")
    return out


COMMANDS = {
    "wigner": cmd_wigner,
    "negativity": cmd_negativity,
    "photon-stats": cmd_photon_stats,
    "detect": cmd_detect,
    "landscape": cmd_landscape,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="catphase", description=__doc__.splitlines()[0] if __doc__ else None)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="key = value file with a [run] section")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--format", choices=["csv", "json"])
    ap.add_argument("--engine", choices=["closed", "quadrature", "combinatorial", "all"])
    ap.add_argument("--dim", type=int, help="Fock truncation (default: automatic)")
    ap.add_argument("--n-stable", type=int, dest="n_stable")
    ap.add_argument("--threads", type=int, help="worker processes (fallback: CATPHASE_THREADS)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override any config key; repeatable")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {}
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 2
        overrides[key.strip()] = parse_value(val)
    for key in ("out", "format", "engine", "dim", "n_stable", "threads"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    try:
        cfg = load_config(args.config, overrides)
        written = COMMANDS[args.command](cfg)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
