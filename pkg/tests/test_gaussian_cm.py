import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from relayrate import gaussian_cm as gcm
from relayrate.quadrature import QuadratureCfg

P0 = gcm.GaussianCMParams()


def params(**kw):
    return P0.with_(**kw)


# ---------------------------------------------------------------- closed form

def test_closed_form_example():
    p = params(g=1.0, C=0.5)
    assert gcm.gq_gaussian_sigma_q2(p) == pytest.approx(1.5, abs=1e-15)
    assert gcm.gq_gaussian_codebook_rate(p) == pytest.approx(0.5 * math.log2(2.4), abs=1e-15)
    assert gcm.gq_gaussian_codebook_rate(p) == pytest.approx(0.631518, abs=1e-6)


def test_closed_form_limits():
    p = params(P=2.0, g=0.7, C=0.0)
    assert gcm.gq_gaussian_codebook_rate(p) == pytest.approx(0.5 * math.log2(3.0))
    p = params(P=2.0, g=0.7, C=40.0)
    assert gcm.gq_gaussian_codebook_rate(p) == pytest.approx(0.5 * math.log2(1 + 2 + 1.4), abs=1e-10)


@given(st.floats(0.1, 10), st.floats(0.0, 4), st.floats(0.01, 4), st.floats(0.2, 3), st.floats(0.2, 3))
def test_closed_form_matches_covariance_oracle(P, g, C, s2, s12):
    p = gcm.GaussianCMParams(P=P, g=g, C=C, sigma2=s2, sigma1_2=s12)
    assert gcm.gq_gaussian_codebook_rate(p) == pytest.approx(
        oracles.gaussian_codebook_gq_rate(P, g, s2, s12, C), abs=1e-9)


def test_params_validation():
    with pytest.raises(ValueError):
        gcm.GaussianCMParams(P=0)
    with pytest.raises(ValueError):
        gcm.GaussianCMParams(g=-1)
    with pytest.raises(ValueError):
        gcm.GaussianCMParams(gain_convention="volts")
    with pytest.raises(ValueError):
        gcm.HDEAF(1.5)
    with pytest.raises(ValueError):
        gcm.DHD(-0.1)
    with pytest.raises(ValueError):
        gcm.GQ(0.0)


def test_gain_conventions():
    assert params(g=2.0, P=4.0).relay_mean == pytest.approx(4.0)
    assert params(g=2.0, P=4.0, gain_convention="power").relay_mean == pytest.approx(math.sqrt(8.0))


# ---------------------------------------------------------------- BPSK pieces

def test_bpsk_mi_edges():
    assert gcm.bpsk_mi(0.0) == 0.0
    assert gcm.bpsk_mi(2000.0) == 1.0
    assert gcm.bpsk_mi(1.0) == pytest.approx(0.48587, abs=1e-4)


def test_pair_reduction_matches_2d():
    p = params(g=0.9, sigma1_2=0.7)
    assert gcm.i_x_yy1(p) == pytest.approx(gcm.i_x_yy1(p, method="2d"), abs=1e-6)


@pytest.mark.parametrize("sq", [0.3, 1.7])
def test_gq_reduced_matches_2d(sq):
    p = params(g=0.8, C=0.9)
    a = gcm.gq_bpsk_terms(p, sq)
    b = gcm.gq_bpsk_terms(p, sq, method="2d")
    assert a[0] == pytest.approx(b[0], abs=1e-6)
    assert a[1] == pytest.approx(b[1], abs=1e-6)


def test_gq_bisection_meets_capacity():
    p = params(g=1.3, C=0.7)
    _, s = gcm.gq_bpsk_rate(p)
    assert abs(gcm.gq_bpsk_terms(p, s)[1] - p.C) < 1e-6


def test_gq_zero_gain_is_direct_link():
    p = params(g=0.0, C=0.7)
    r, s = gcm.gq_bpsk_rate(p)
    assert r == pytest.approx(gcm.i_xy(p)) and math.isinf(s)


def test_gq_large_capacity_warns():
    with pytest.warns(RuntimeWarning):
        gcm.gq_bpsk_rate(params(g=1.0, C=60.0))


def test_gq_low_snr_limit():
    p = params(g=1.0, C=0.7, sigma2=1e8)
    assert gcm.gq_bpsk_rate(p)[0] == pytest.approx(gcm.low_snr_rates(p)["gq_eaf"], abs=1e-6)


def test_daf_limits():
    p = params(g=40.0, C=0.3)
    assert gcm.daf_bpsk_rate(p) == pytest.approx(min(1.0, gcm.i_xy(p) + 0.3), abs=1e-9)
    p = params(g=0.5, C=0.0)
    assert gcm.daf_bpsk_rate(p) == pytest.approx(min(gcm.i_xy1(p), gcm.i_xy(p)))


@settings(max_examples=20)
@given(st.floats(0.0, 2.5), st.floats(0.0, 2.5))
def test_rates_below_upper_bound(g, C):
    p = params(g=g, C=C)
    ub = gcm.upper_bound_bpsk(p)
    assert gcm.daf_bpsk_rate(p) <= ub + 1e-9
    assert gcm.hd_eaf_optimal(p).rate <= ub + 1e-7
    assert gcm.gq_eaf_optimal(p).rate <= ub + 1e-7


# ---------------------------------------------------------------- hard decisions

def test_hd_eaf_all_erasure():
    p = params(g=1.3, C=0.4)
    r = gcm.hd_eaf_rate(p, 0.0)
    assert r.rate == pytest.approx(gcm.i_xy(p), abs=1e-12)
    assert r.slack == pytest.approx(p.C, abs=1e-12)


def test_hd_eaf_uninformative_relay():
    p = params(g=0.0, C=1.0)
    assert gcm.hd_eaf_rate(p, 0.7).rate == pytest.approx(gcm.i_xy(p), abs=1e-9)


def test_hd_eaf_identity_matches_2d():
    p = params(g=1.1, C=0.8)
    a = gcm.hd_eaf_rate(p, 1.0)
    b = gcm.hd_eaf_rate(p, 1.0, method="2d")
    assert a.slack == pytest.approx(b.slack, abs=1e-6)


def test_hd_eaf_saturates_beyond_one_bit():
    r1 = gcm.hd_eaf_optimal(params(g=1.0, C=1.0)).rate
    r2 = gcm.hd_eaf_optimal(params(g=1.0, C=2.0)).rate
    assert r1 == pytest.approx(r2, abs=1e-4)


def test_dhd_infinite_threshold():
    p = params(g=1.0, C=0.5)
    r = gcm.dhd_rate(p, 60.0)
    assert r.rate == pytest.approx(gcm.i_xy(p), abs=1e-9)
    assert r.slack == pytest.approx(p.C, abs=1e-9)


def test_dhd_sign_quantizer_cost_tends_to_one_bit():
    p = params(g=1e-4, C=2.0)
    cost = p.C - gcm.dhd_rate(p, 0.0).slack
    assert cost == pytest.approx(1.0, abs=1e-6)


def test_dhd_two_feasibility_crossings():
    p = params(g=1.4, C=0.8)
    slack = np.array([gcm.dhd_rate(p, t).slack for t in gcm.t_grid(p, 200)])
    assert np.count_nonzero(np.diff(np.sign(slack)) != 0) == 2


@pytest.mark.parametrize("p_ne", [0.0, 0.35, 1.0])
def test_ts_dhd_reduces_to_hd_eaf(p_ne):
    p = params(g=0.8, C=0.9)
    a, b = gcm.ts_dhd_rate(p, 0.0, p_ne), gcm.hd_eaf_rate(p, p_ne)
    assert a.rate == pytest.approx(b.rate, abs=1e-12)
    assert a.slack == pytest.approx(b.slack, abs=1e-12)


@pytest.mark.parametrize("T", [0.2, 0.7, 2.0])
def test_ts_dhd_reduces_to_dhd(T):
    p = params(g=0.8, C=0.9)
    a, b = gcm.ts_dhd_rate(p, T, 1.0), gcm.dhd_rate(p, T)
    assert a.rate == pytest.approx(b.rate, abs=1e-12)
    assert a.slack == pytest.approx(b.slack, abs=1e-12)


def test_ts_dhd_cost_monotone_in_gating():
    p = params(g=1.2, C=0.6)
    slacks = [gcm.ts_dhd_rate(p, 0.5, x).slack for x in np.linspace(0, 1, 11)]
    assert all(a >= b - 1e-12 for a, b in zip(slacks, slacks[1:]))


@pytest.mark.parametrize("g,C", [(0.5, 0.5), (1.4, 0.8), (2.0, 1.5)])
def test_hybrid_dominates_both(g, C):
    p = params(g=g, C=C)
    best = gcm.ts_dhd_optimal(p)
    assert best.feasible
    assert best.rate >= max(gcm.hd_eaf_optimal(p).rate, gcm.dhd_optimal(p).rate) - 1e-9


def test_optimal_results_feasible():
    p = params(g=1.2, C=0.6)
    for s in ("gq-eaf", "hd-eaf", "dhd", "ts-dhd"):
        r = gcm.evaluate_strategy(p, s)
        assert r.feasible, s
    with pytest.raises(ValueError):
        gcm.evaluate_strategy(p, "nope")


def test_mapping_dispatch():
    p = params(g=1.0, C=0.8)
    assert gcm.mapping_rate(p, gcm.HDEAF(0.5)) == gcm.hd_eaf_rate(p, 0.5)
    assert gcm.mapping_rate(p, gcm.TSDHD(0.4, 0.5)).rate == gcm.ts_dhd_rate(p, 0.4, 0.5).rate
    with pytest.raises(TypeError):
        gcm.mapping_rate(p, object())


# ---------------------------------------------------------------- low SNR

def test_low_snr_zero_gain():
    r = gcm.low_snr_rates(params(g=0.0, C=1.0, sigma2=1e4))
    assert all(v == pytest.approx(0.0, abs=1e-12) for v in r.values())


def test_low_snr_large_gain():
    r = gcm.low_snr_rates(params(g=8.0, C=1.5, sigma2=1e4))
    assert r["hd_eaf"] == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("g", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("C", [0.5, 1.0])
def test_low_snr_asymptote(g, C):
    p = params(g=g, C=C, sigma2=1e4)
    assert gcm.hd_eaf_optimal(p).rate == pytest.approx(gcm.low_snr_rates(p)["hd_eaf"], abs=1e-3)


# ---------------------------------------------------------------- region map

def test_region_map_small_grid():
    rm = gcm.strategy_region_map([0.2, 2.0], [0.4, 2.0])
    assert rm.labels.shape == (2, 2)
    assert rm.labels[0, 0] == "GQ-EAF"
    assert rm.labels[1, 1] == "GQ-EAF"
    assert set(rm.to_dict()) == {"g", "C", "labels", "rates"}
    assert rm.row(0.4) == list(rm.labels[0])


def test_region_map_grid_checks():
    with pytest.raises(ValueError, match="ascending"):
        gcm.strategy_region_map([1.0, 0.5], [0.4])
    with pytest.raises(ValueError, match="nonempty"):
        gcm.strategy_region_map([], [0.4])


def test_quadrature_cfg_threaded_through():
    p = params(g=0.9, C=0.5)
    a = gcm.i_xy(p, QuadratureCfg(abs_tol=1e-10))
    b = gcm.i_xy(p, QuadratureCfg(abs_tol=5e-11))
    assert abs(a - b) < 5e-10


@settings(max_examples=10)
@given(st.floats(0.1, 2.5), st.floats(0.1, 2.0), st.floats(0.0, 1.0))
def test_rates_stable_under_tolerance_halving(g, C, p_ne):
    p = params(g=g, C=C)
    cfg = QuadratureCfg(abs_tol=1e-8)
    # each quantity combines up to four mixture entropies
    for f in (lambda c: gcm.hd_eaf_rate(p, p_ne, c).rate, lambda c: gcm.daf_bpsk_rate(p, c),
              lambda c: gcm.dhd_rate(p, 0.5, c).slack):
        assert abs(f(cfg) - f(cfg.halved())) < 4 * 5 * cfg.abs_tol
