import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from catphase.detection import (
    N0,
    NDELTA,
    ErrorReport,
    baseline_threshold,
    discriminate,
    error_probs,
    homodyne_pdf,
    ml_partition,
    squeezed_baseline,
)
from catphase.fock_stats import PhotonDistribution, pn_combinatorial
from catphase.phase_space import ProbeSpec
from catphase.special_fn import erfc


def _pd(probs, tail=None):
    d = PhotonDistribution.from_probs(probs)
    return d if tail is None else PhotonDistribution(probs=d.probs, tail_bound=tail)


def test_partition_simple():
    rule = ml_partition(_pd([0.9, 0.1]), _pd([0.2, 0.8]))
    assert rule.rows() == [(0, N0), (1, NDELTA)]
    assert rule.tie_count == 0


def test_identical_distributions_tie_to_null():
    p = _pd([0.5, 0.3, 0.2])
    rule = ml_partition(p, p)
    assert not rule.in_delta.any()
    assert rule.tie_count == 3
    rep = error_probs(rule, p, p)
    assert (rep.p_fp, rep.p_fn, rep.p_tot) == (0.0, 1.0, 1.0)


def test_disjoint_supports_are_perfectly_separated():
    rep = discriminate(_pd([0.4, 0.6, 0.0, 0.0]), _pd([0.0, 0.0, 0.7, 0.3]))
    assert rep.p_tot == 0.0


def test_unequal_lengths_are_zero_padded():
    rule = ml_partition(_pd([0.5, 0.5]), _pd([0.1, 0.2, 0.7]))
    assert rule.n_max == 2
    assert rule.rows() == [(0, N0), (1, N0), (2, NDELTA)]


def test_error_report_serialization():
    rep = ErrorReport(p_fp=0.1, p_fn=0.2, p_tot=0.1 + 0.2, tail_fp=1e-12, tail_fn=2e-12, p_sq=0.5)
    d = json.loads(rep.to_json())
    assert d["p_tot_bound"] == pytest.approx(0.3 + 3e-12)
    assert d["p_sq"] == 0.5


def test_tails_are_reported():
    rep = discriminate(_pd([0.5, 0.4], tail=0.1), _pd([0.1, 0.85], tail=0.05))
    assert rep.tail_fp == 0.1 and rep.tail_fn == 0.05
    assert rep.p_tot_bound == pytest.approx(rep.p_tot + 0.15)


def test_operating_point_partition():
    spec = dict(alpha=2.0, r=0.56, eta2=0.975)
    p0 = pn_combinatorial(ProbeSpec(delta0=0.0, **spec))
    pd = pn_combinatorial(ProbeSpec(delta0=0.68, **spec))
    rule = ml_partition(p0, pd)
    rep = error_probs(rule, p0, pd)
    # the undisplaced cat is nearly even: low odd counts are evidence of the shift
    assert rule.in_delta[1] and rule.in_delta[3]
    assert not rule.in_delta[0] and not rule.in_delta[2]
    assert rep.p_tot == pytest.approx(0.114, abs=0.005)


def _random_pair(rng, n):
    a = rng.random(n + 1) ** 3
    b = rng.random(n + 1) ** 3
    return a / a.sum(), b / b.sum()


@pytest.mark.parametrize("n_max", [0, 1, 4, 8, 12])
def test_ml_is_optimal_by_enumeration(n_max):
    rng = np.random.default_rng(100 + n_max)
    for _ in range(3):
        a, b = _random_pair(rng, n_max)
        p0, pd = _pd(a * 0.999, tail=0.001), _pd(b)
        ml = discriminate(p0, pd)
        masks = np.array(list(itertools.product([False, True], repeat=n_max + 1)))
        # p_tot for every partition at once: false positives + missed detections
        alt = (masks * a * 0.999).sum(1) + (~masks * b).sum(1)
        assert ml.p_tot <= alt.min() + 2 * max(p0.tail_bound, pd.tail_bound) + 1e-15
        assert ml.p_tot == pytest.approx(alt.min(), abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=20))
def test_error_report_consistency(pairs):
    a = np.array([p for p, _ in pairs]) + 1e-6
    b = np.array([q for _, q in pairs]) + 1e-6
    rep = discriminate(_pd(a / a.sum()), _pd(b / b.sum()))
    assert 0 <= rep.p_fp <= 1 and 0 <= rep.p_fn <= 1 and 0 <= rep.p_tot <= 1 + 1e-12
    assert rep.p_tot == rep.p_fp + rep.p_fn


def test_homodyne_pdf_normalized_and_centered():
    for d0, r, eta in [(0.7, 0.6, 0.975), (0.0, 0.0, 1.0), (2.0, 1.2, 0.9)]:
        norm = quad(lambda p: homodyne_pdf(p, d0, r, eta), -np.inf, np.inf, epsabs=1e-13)[0]
        mean = quad(lambda p: p * homodyne_pdf(p, d0, r, eta), -np.inf, np.inf, epsabs=1e-13)[0]
        assert norm == pytest.approx(1.0, abs=1e-12)
        assert mean == pytest.approx(math.sqrt(eta) * d0, abs=1e-12)


def test_homodyne_vacuum_width():
    p = np.linspace(-2, 3, 11)
    assert np.allclose(homodyne_pdf(p, 0.5, 0.0, 1.0), math.sqrt(2 / math.pi) * np.exp(-2 * (p - 0.5) ** 2))


@pytest.mark.parametrize("r,eta", [(0.0, 1.0), (0.5, 0.9), (1.2, 0.975)])
def test_homodyne_variance(r, eta):
    m = math.sqrt(eta) * 0.3
    var = quad(lambda p: (p - m) ** 2 * homodyne_pdf(p, 0.3, r, eta), -np.inf, np.inf, epsabs=1e-14)[0]
    s2 = math.exp(-2 * r)
    assert var == pytest.approx((eta * (s2 - 1) + 1) / 4, rel=1e-10)


def test_homodyne_rejects_bad_eta():
    with pytest.raises(ValueError):
        homodyne_pdf(0.0, 0.1, 0.2, 1.5)


def test_baseline_examples():
    assert squeezed_baseline(0.0, 0.7, 0.9) == 1.0
    assert squeezed_baseline(1.3, 0.0, 0.8) == pytest.approx(float(erfc(1.3 * math.sqrt(0.4))), rel=1e-15)
    with pytest.raises(ValueError):
        squeezed_baseline(-0.1, 0.0, 1.0)


@pytest.mark.parametrize("d0,r,eta", [(0.68, 0.56, 0.975), (1.5, 1.2, 0.9), (0.2, 0.0, 1.0), (3.0, 0.9, 0.9)])
def test_baseline_matches_tail_quadrature(d0, r, eta):
    thr = baseline_threshold(d0, eta)
    fp = quad(lambda p: homodyne_pdf(p, 0.0, r, eta), thr, np.inf, epsabs=1e-15, epsrel=1e-13)[0]
    fn = quad(lambda p: homodyne_pdf(p, d0, r, eta), -np.inf, thr, epsabs=1e-15, epsrel=1e-13)[0]
    assert fp == pytest.approx(fn, abs=1e-12)
    assert squeezed_baseline(d0, r, eta) == pytest.approx(fp + fn, abs=1e-10)
    assert squeezed_baseline(d0, r, eta) == pytest.approx(2 * 0.5 * float(erfc(
        d0 * math.sqrt(eta / (2 * (eta * (math.exp(-2 * r) - 1) + 1))))), rel=1e-15)


@given(st.floats(0.05, 3), st.floats(0, 1.5), st.floats(0.5, 0.99))
def test_baseline_monotonicity(d0, r, eta):
    p = squeezed_baseline(d0, r, eta)
    assert squeezed_baseline(d0 * 1.01, r, eta) < p
    assert squeezed_baseline(d0, r + 0.05, eta) < p
    assert squeezed_baseline(d0, r, eta - 0.01) > p
