"""Orthogonal-relay Gaussian channel with BPSK input.

Destination sees Y = X + N, the relay sees Y1 = a X + N1 and has a separate
link of capacity C bits/use to the destination. X = +-sqrt(P) equiprobable.
With the default amplitude convention the relay mean is a sqrt(P) = g sqrt(P);
with the power convention it is sqrt(g P).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .quadrature import (QuadratureCfg, adaptive_simpson_2d, gaussian_entropy,
                         mixture_entropy, mixture_entropy_2d)

FEAS_TOL = 1e-7
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class GaussianCMParams:
    P: float = 1.0
    g: float = 1.0
    sigma2: float = 1.0
    sigma1_2: float = 1.0
    C: float = 1.0
    gain_convention: str = "amplitude"

    def __post_init__(self):
        if not (self.P > 0 and self.sigma2 > 0 and self.sigma1_2 > 0):
            raise ValueError("P, sigma2 and sigma1_2 must be positive")
        if self.g < 0 or self.C < 0:
            raise ValueError("g and C must be nonnegative")
        if self.gain_convention not in ("amplitude", "power"):
            raise ValueError("gain_convention must be 'amplitude' or 'power'")

    @property
    def amp(self) -> float:
        return math.sqrt(self.P)

    @property
    def relay_mean(self) -> float:
        if self.gain_convention == "amplitude":
            return self.g * math.sqrt(self.P)
        return math.sqrt(self.g * self.P)

    def with_(self, **kw) -> "GaussianCMParams":
        return replace(self, **kw)


# mapping parameters (tagged union)

@dataclass(frozen=True)
class GQ:
    sigma_Q2: float

    def __post_init__(self):
        if not self.sigma_Q2 > 0:
            raise ValueError("sigma_Q2 must be positive")


@dataclass(frozen=True)
class HDEAF:
    p_ne: float

    def __post_init__(self):
        if not 0 <= self.p_ne <= 1:
            raise ValueError("p_ne must lie in [0, 1]")


@dataclass(frozen=True)
class DHD:
    T: float

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("T must be nonnegative")


@dataclass(frozen=True)
class TSDHD:
    T: float
    p_ne: float

    def __post_init__(self):
        DHD(self.T)
        HDEAF(self.p_ne)


@dataclass(frozen=True)
class FeasibleRate:
    rate: float
    slack: float
    tol: float = FEAS_TOL

    @property
    def feasible(self) -> bool:
        return self.slack >= -self.tol


@dataclass
class StrategyResult:
    strategy: str
    rate: float
    slack: float | None = None
    params: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.slack is None or self.slack >= -FEAS_TOL


def hb(p) -> float:
    return _H([p, 1.0 - p])


def _H(probs) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


# ------------------------------------------------------------- closed form

def gq_gaussian_sigma_q2(p: GaussianCMParams) -> float:
    if p.C == 0:
        return math.inf
    s = p.g * p.P
    cond_var = s + p.sigma1_2 - s * p.P / (p.P + p.sigma2)
    return cond_var / (2.0 ** (2 * p.C) - 1.0)


def gq_gaussian_codebook_rate(p: GaussianCMParams) -> float:
    """Gaussian-codebook GQ-EAF rate.

    Here g multiplies the source power on the relay link (gP), whatever the
    gain convention; with unit noise variances this is
    1/2 log2(1 + P + gP / (1 + sigma_Q^2)).
    """
    sq = gq_gaussian_sigma_q2(p)
    relay = 0.0 if math.isinf(sq) else p.g * p.P / (p.sigma1_2 + sq)
    return 0.5 * math.log2(1.0 + p.P / p.sigma2 + relay)


# ------------------------------------------------------------- BPSK helpers

def bpsk_mi(snr: float, cfg: QuadratureCfg | None = None) -> float:
    """I(X; sqrt(snr) X + N) for equiprobable X = +-1 and unit-variance N."""
    if snr <= 0:
        return 0.0
    a = math.sqrt(snr)
    if a > 40:
        return 1.0
    return mixture_entropy([a, -a], [1.0, 1.0], [0.5, 0.5], cfg) - gaussian_entropy(1.0)


def h_y(p: GaussianCMParams, cfg=None) -> float:
    return mixture_entropy([p.amp, -p.amp], [p.sigma2] * 2, [0.5, 0.5], cfg)


def i_xy(p: GaussianCMParams, cfg=None) -> float:
    return h_y(p, cfg) - gaussian_entropy(p.sigma2)


def i_xy1(p: GaussianCMParams, cfg=None) -> float:
    m = p.relay_mean
    return mixture_entropy([m, -m], [p.sigma1_2] * 2, [0.5, 0.5], cfg) - gaussian_entropy(p.sigma1_2)


def i_x_yy1(p: GaussianCMParams, cfg=None, method="reduced") -> float:
    """I(X; Y, Y1).

    "reduced" uses the fact that, for binary X, the likelihood ratio of the
    pair is a scalar BPSK observation at the summed SNR. "2d" integrates the
    bivariate mixture directly.
    """
    if method == "reduced":
        return bpsk_mi(p.P / p.sigma2 + p.relay_mean ** 2 / p.sigma1_2, cfg)
    if method == "2d":
        return _i_x_pair_2d(p.amp, p.sigma2, p.relay_mean, p.sigma1_2, cfg)
    raise ValueError(f"unknown method {method!r}")


def _i_x_pair_2d(a, v, b, w, cfg):
    h = mixture_entropy_2d([[a, b], [-a, -b]], [[v, w], [v, w]], [0.5, 0.5], cfg)
    return h - gaussian_entropy(v) - gaussian_entropy(w)


# ------------------------------------------------------------- DAF and bound

def daf_bpsk_rate(p: GaussianCMParams, cfg=None) -> float:
    return min(i_xy1(p, cfg), i_xy(p, cfg) + p.C)


def upper_bound_bpsk(p: GaussianCMParams, cfg=None, method="reduced") -> float:
    return min(i_xy(p, cfg) + p.C, i_x_yy1(p, cfg, method))


# ------------------------------------------------------------- GQ-EAF with BPSK

def gq_bpsk_terms(p: GaussianCMParams, sigma_Q2: float, cfg=None, method="reduced"):
    """(I(X; Y, Yq), I(Yq; Y1 | Y)) for Yq = Y1 + N_Q, N_Q ~ N(0, sigma_Q2)."""
    v = p.sigma1_2 + sigma_Q2
    if method == "reduced":
        rate = bpsk_mi(p.P / p.sigma2 + p.relay_mean ** 2 / v, cfg)
    elif method == "2d":
        rate = _i_x_pair_2d(p.amp, p.sigma2, p.relay_mean, v, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    cost = 0.5 * math.log2(v / sigma_Q2) + rate - i_xy(p, cfg)
    return rate, max(cost, 0.0)


def gq_bpsk_rate(p: GaussianCMParams, cfg=None, method="reduced") -> tuple[float, float]:
    """Best GQ-EAF rate with BPSK; returns (rate, sigma_Q2).

    sigma_Q2 solves I(Yq; Y1 | Y) = C (the cost decreases in sigma_Q2), found
    by bracketed root finding in log sigma_Q2.
    """
    if p.C == 0 or p.relay_mean == 0:
        return i_xy(p, cfg), math.inf
    cost = lambda ls: gq_bpsk_terms(p, math.exp(ls), cfg, method)[1] - p.C  # noqa: E731
    lo, hi = math.log(p.sigma1_2 * 1e-12), math.log(p.sigma1_2 * 1e12)
    if cost(lo) < 0:
        warnings.warn("C exceeds the quantisation cost at the smallest bracketed sigma_Q2; "
                      "returning the extrapolated endpoint", RuntimeWarning, stacklevel=2)
        s = math.exp(lo)
        return gq_bpsk_terms(p, s, cfg, method)[0], s
    if cost(hi) > 0:
        return i_xy(p, cfg), math.inf
    ls = brentq(cost, lo, hi, xtol=1e-12, rtol=1e-14, maxiter=200)
    s = math.exp(ls)
    return gq_bpsk_terms(p, s, cfg, method)[0], s


# ------------------------------------------------------------- hard-decision family

def _regions(p: GaussianCMParams, T: float):
    """Pr(Y1 > T | X = +sqrt P) and Pr(Y1 > T | X = -sqrt P)."""
    m, s = p.relay_mean, math.sqrt(p.sigma1_2)
    return float(ndtr((m - T) / s)), float(ndtr((-m - T) / s))


def _h_y_given_plus(p: GaussianCMParams, a_plus: float, a_minus: float, cfg) -> float:
    """h(Y | decision = +1); the -1 case is its mirror image."""
    tot = a_plus + a_minus
    if tot <= 0:
        return h_y(p, cfg)
    w = a_plus / tot
    return mixture_entropy([p.amp, -p.amp], [p.sigma2] * 2, [w, 1.0 - w], cfg)


@dataclass(frozen=True)
class _Quantizer:
    """Everything about a three-level relay quantizer that does not depend on gating."""
    a_plus: float
    a_minus: float
    h_y: float
    h_y_plus: float
    h_n: float

    def evaluate(self, p_ne: float, C: float):
        ap, am = self.a_plus, self.a_minus
        erase = 1.0 - p_ne * (ap + am)               # same for both inputs
        py = [0.5 * p_ne * (ap + am)] * 2 + [erase]  # +1, -1, E
        H_yq = _H(py)
        i_xq = H_yq - _H([p_ne * ap, p_ne * am, erase])
        # an erasure leaves X uniform, so Y given E is distributed as Y
        h_y_q = 2 * py[0] * self.h_y_plus + erase * self.h_y
        i_xy_q = h_y_q - self.h_n
        H_q_y1 = (ap + am) * hb(p_ne)
        cost = h_y_q + H_yq - self.h_y - H_q_y1
        return i_xq + i_xy_q, C - cost, i_xq, i_xy_q, cost


@lru_cache(maxsize=200000)
def _quantizer(p: GaussianCMParams, T: float, cfg) -> _Quantizer:
    ap, am = _regions(p, T)
    return _Quantizer(ap, am, h_y(p, cfg), _h_y_given_plus(p, ap, am, cfg), gaussian_entropy(p.sigma2))


def _cfg(cfg):
    return cfg if cfg is not None else QuadratureCfg()


def hd_eaf_rate(p: GaussianCMParams, p_ne: float, cfg=None, method="identity") -> FeasibleRate:
    """Sign quantizer whose decision is forwarded with probability p_ne.

    method "2d" computes I(Yq; Y1 | Y) as h(Y1|Y) - h(Y1|Y,Yq) with double
    integrals instead of through the discrete/mixture identity.
    """
    HDEAF(p_ne)
    cfg = _cfg(cfg)
    P1, _ = _regions(p, 0.0)          # Pr(Y1 > 0 | X = +sqrt P)
    hy = h_y(p, cfg)
    hy_plus = mixture_entropy([p.amp, -p.amp], [p.sigma2] * 2, [P1, 1 - P1], cfg)
    py = [0.5 * p_ne, 0.5 * p_ne, 1 - p_ne]
    i_xq = _H(py) - _H([p_ne * P1, p_ne * (1 - P1), 1 - p_ne])
    h_y_q = p_ne * hy_plus + (1 - p_ne) * hy
    rate = i_xq + h_y_q - gaussian_entropy(p.sigma2)
    if method == "identity":
        cost = h_y_q + _H(py) - hy - hb(p_ne)
    elif method == "2d":
        cost = p_ne * _hd_sign_cost_2d(p, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return FeasibleRate(rate, p.C - cost)


def _hd_sign_cost_2d(p: GaussianCMParams, cfg) -> float:
    """I(sign(Y1); Y1 | Y) by direct integration over the (Y, Y1) plane."""
    a, m = p.amp, p.relay_mean
    v, w = p.sigma2, p.sigma1_2
    sv, sw = math.sqrt(v), math.sqrt(w)
    k = cfg.truncation

    def dens(y, y1):
        return 0.5 * (np.exp(-(y - a) ** 2 / (2 * v) - (y1 - m) ** 2 / (2 * w))
                      + np.exp(-(y + a) ** 2 / (2 * v) - (y1 + m) ** 2 / (2 * w))) / (2 * math.pi * sv * sw)

    def mass_pos(y):
        # f(y, Y1 > 0) in closed form
        return 0.5 * (np.exp(-(y - a) ** 2 / (2 * v)) * ndtr(m / sw)
                      + np.exp(-(y + a) ** 2 / (2 * v)) * ndtr(-m / sw)) / (math.sqrt(2 * math.pi) * sv)

    def fy(y):
        return 0.5 * (np.exp(-(y - a) ** 2 / (2 * v)) + np.exp(-(y + a) ** 2 / (2 * v))) / (math.sqrt(2 * math.pi) * sv)

    def term_full(y, y1):
        f = dens(y, y1)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(f > 0, -f * np.log2(f / fy(y)), 0.0)
        return r

    def term_half(y, y1):
        f = dens(y, y1)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(f > 0, -f * np.log2(f / mass_pos(y)), 0.0)
        return r

    xr = (-a - k * sv, a + k * sv)
    h_y1_y = adaptive_simpson_2d(term_full, xr, (-m - k * sw, m + k * sw), cfg.abs_tol_2d)[0]
    # symmetry: the Y1 < 0 half contributes the same as the Y1 > 0 half
    h_y1_y_q = 2 * adaptive_simpson_2d(term_half, xr, (0.0, m + k * sw), cfg.abs_tol_2d)[0]
    return h_y1_y - h_y1_y_q


def dhd_rate(p: GaussianCMParams, T: float, cfg=None) -> FeasibleRate:
    """Dead-zone quantizer: +1 above T, -1 below -T, erasure in between."""
    DHD(T)
    cfg = _cfg(cfg)
    ap, am = _regions(p, T)
    py = [0.5 * (ap + am)] * 2 + [1 - ap - am]
    H_q = _H(py)
    i_xq = H_q - _H([ap, am, 1 - ap - am])
    hy = h_y(p, cfg)
    h_y_q = (ap + am) * _h_y_given_plus(p, ap, am, cfg) + (1 - ap - am) * hy
    rate = i_xq + h_y_q - gaussian_entropy(p.sigma2)
    # deterministic mapping: I(Yq; Y1 | Y) = H(Yq | Y)
    return FeasibleRate(rate, p.C - (H_q + h_y_q - hy))


def ts_dhd_rate(p: GaussianCMParams, T: float, p_ne: float, cfg=None) -> FeasibleRate:
    TSDHD(T, p_ne)
    q = _quantizer(p, float(T), _cfg(cfg))
    rate, slack, *_ = q.evaluate(p_ne, p.C)
    return FeasibleRate(rate, slack)


def mapping_rate(p: GaussianCMParams, m, cfg=None) -> FeasibleRate:
    if isinstance(m, GQ):
        r, cost = gq_bpsk_terms(p, m.sigma_Q2, cfg)
        return FeasibleRate(r, p.C - cost)
    if isinstance(m, HDEAF):
        return hd_eaf_rate(p, m.p_ne, cfg)
    if isinstance(m, DHD):
        return dhd_rate(p, m.T, cfg)
    if isinstance(m, TSDHD):
        return ts_dhd_rate(p, m.T, m.p_ne, cfg)
    raise TypeError(f"unknown mapping {m!r}")


# ------------------------------------------------------------- parameter search

def _golden_max(f, a, b, tol=1e-6, max_iter=200):
    """Maximise a unimodal f on [a, b]; returns (x, f(x))."""
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _bisect_boundary(feasible, good, bad, tol=1e-9, max_iter=200):
    """Last feasible point between a feasible ``good`` and infeasible ``bad``."""
    for _ in range(max_iter):
        if abs(bad - good) < tol:
            break
        mid = 0.5 * (good + bad)
        if feasible(mid):
            good = mid
        else:
            bad = mid
    return good


def t_grid(p: GaussianCMParams, n=200) -> np.ndarray:
    return np.linspace(0.0, p.relay_mean + 6 * math.sqrt(p.sigma1_2), n)


def hd_eaf_optimal(p: GaussianCMParams, cfg=None) -> StrategyResult:
    """Best forwarding probability. The compression cost is linear in p_ne, so
    the optimum is the largest feasible value, min(1, C / cost at p_ne = 1)."""
    full = hd_eaf_rate(p, 1.0, cfg)
    cost1 = p.C - full.slack
    p_ne = 1.0 if cost1 <= p.C else p.C / cost1
    r = hd_eaf_rate(p, p_ne, cfg)
    return StrategyResult("hd-eaf", r.rate, r.slack, {"p_ne": p_ne})


def _best_p_ne(q: _Quantizer, C: float) -> float:
    """Largest feasible forwarding probability.

    Gating with p is a degraded version of gating with any p' > p, so the
    cost grows with p_ne; it is linear only at T = 0.
    """
    cost = lambda x: q.evaluate(x, C)[4] - C  # noqa: E731
    if cost(1.0) <= 0:
        return 1.0
    if C <= 0:
        return 0.0
    return brentq(cost, 0.0, 1.0, xtol=1e-13)


def _search_T(p, objective, feasible, n_grid, tol_T=1e-6):
    """Grid over T, then refine every feasible run: golden search around its
    best point and bisection towards each infeasible neighbour."""
    grid = t_grid(p, n_grid)
    vals = [objective(t) for t in grid]
    ok = [feasible(t) for t in grid]
    cands = []
    k = 0
    while k < len(grid):
        if not ok[k]:
            k += 1
            continue
        start = k
        while k + 1 < len(grid) and ok[k + 1]:
            k += 1
        end = k
        best = max(range(start, end + 1), key=lambda i: vals[i])
        cands.append((vals[best], grid[best]))
        lo, hi = grid[max(best - 1, start)], grid[min(best + 1, end)]
        if hi > lo:
            t, v = _golden_max(objective, lo, hi, tol_T)
            if feasible(t):
                cands.append((v, t))
        if start > 0:
            t = _bisect_boundary(feasible, grid[start], grid[start - 1])
            cands.append((objective(t), t))
        if end < len(grid) - 1:
            t = _bisect_boundary(feasible, grid[end], grid[end + 1])
            cands.append((objective(t), t))
        k += 1
    if not cands:
        return None
    return max(cands, key=lambda c: (c[0], -c[1]))


def dhd_optimal(p: GaussianCMParams, cfg=None, n_grid=200) -> StrategyResult:
    cfg = _cfg(cfg)
    res = {}

    def ev(t):
        if t not in res:
            res[t] = dhd_rate(p, float(t), cfg)
        return res[t]

    best = _search_T(p, lambda t: ev(t).rate, lambda t: ev(t).slack >= 0, n_grid)
    if best is None:
        # only the all-erasure quantizer (T -> infinity) fits through the link
        return StrategyResult("dhd", i_xy(p, cfg), p.C, {"T": math.inf})
    v, t = best
    return StrategyResult("dhd", v, ev(t).slack, {"T": float(t)})


def ts_dhd_optimal(p: GaussianCMParams, cfg=None, n_grid=200) -> StrategyResult:
    """Joint search over (T, p_ne); for each T the rate is linear and
    increasing in p_ne, so the best p_ne is the largest feasible one."""
    cfg = _cfg(cfg)

    def obj(t):
        q = _quantizer(p, float(t), cfg)
        return q.evaluate(_best_p_ne(q, p.C), p.C)[0]

    best = _search_T(p, obj, lambda t: True, n_grid)
    v, t = best
    q = _quantizer(p, float(t), cfg)
    p_ne = _best_p_ne(q, p.C)
    r = q.evaluate(p_ne, p.C)
    return StrategyResult("ts-dhd", r[0], r[1], {"T": float(t), "p_ne": p_ne})


def gq_eaf_optimal(p: GaussianCMParams, cfg=None) -> StrategyResult:
    r, s = gq_bpsk_rate(p, cfg)
    cost = 0.0 if math.isinf(s) else gq_bpsk_terms(p, s, cfg)[1]
    return StrategyResult("gq-eaf", r, p.C - cost, {"sigma_Q2": s})


# ------------------------------------------------------------- low SNR

def low_snr_rates(p: GaussianCMParams, cfg=None, n_grid=200) -> dict:
    """Rates when the destination hears essentially nothing (sigma2 >> P)."""
    cfg = _cfg(cfg)
    m, s1 = p.relay_mean, math.sqrt(p.sigma1_2)
    P1 = float(ndtr(m / s1))
    out = {"hd_eaf": min(p.C, 1.0) * (1.0 - hb(P1)),
           "daf": min(p.C, i_xy1(p, cfg))}

    # GQ: rate I(X; Yq), constraint I(X; Yq) + 1/2 log2(1 + sigma1^2/sigma_Q^2) <= C
    def gq_terms(ls):
        sq = math.exp(ls)
        r = bpsk_mi(m ** 2 / (p.sigma1_2 + sq), cfg)
        return r, r + 0.5 * math.log2((p.sigma1_2 + sq) / sq)

    if m == 0 or p.C == 0:
        out["gq_eaf"] = 0.0
    else:
        lo, hi = math.log(p.sigma1_2 * 1e-12), math.log(p.sigma1_2 * 1e12)
        f = lambda ls: gq_terms(ls)[1] - p.C  # noqa: E731
        if f(lo) < 0:
            out["gq_eaf"] = gq_terms(lo)[0]
        elif f(hi) > 0:
            out["gq_eaf"] = 0.0
        else:
            out["gq_eaf"] = gq_terms(brentq(f, lo, hi, xtol=1e-12))[0]

    def dhd_terms(t):
        ap, am = _regions(p, float(t))
        py = [0.5 * (ap + am)] * 2 + [1 - ap - am]
        return _H(py) - _H([ap, am, 1 - ap - am]), _H(py)

    best = _search_T(p, lambda t: dhd_terms(t)[0], lambda t: dhd_terms(t)[1] <= p.C, n_grid)
    out["dhd"] = 0.0 if best is None else best[0]
    return out


# ------------------------------------------------------------- sweeps and region map

STRATEGIES = ("daf", "upper", "gq-gaussian", "gq-eaf", "hd-eaf", "dhd", "ts-dhd")
REGION_LABELS = ("DAF", "TS-DHD", "GQ-EAF")


def evaluate_strategy(p: GaussianCMParams, strategy: str, cfg=None) -> StrategyResult:
    s = strategy.lower()
    if s == "daf":
        return StrategyResult(s, daf_bpsk_rate(p, cfg))
    if s == "upper":
        return StrategyResult(s, upper_bound_bpsk(p, cfg))
    if s == "gq-gaussian":
        return StrategyResult(s, gq_gaussian_codebook_rate(p), 0.0, {"sigma_Q2": gq_gaussian_sigma_q2(p)})
    if s == "gq-eaf":
        return gq_eaf_optimal(p, cfg)
    if s == "hd-eaf":
        return hd_eaf_optimal(p, cfg)
    if s == "dhd":
        return dhd_optimal(p, cfg)
    if s == "ts-dhd":
        return ts_dhd_optimal(p, cfg)
    raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")


def _cell(args):
    p, cfg = args
    return (daf_bpsk_rate(p, cfg), ts_dhd_optimal(p, cfg), gq_eaf_optimal(p, cfg))


@dataclass
class RegionMap:
    g: np.ndarray
    C: np.ndarray
    labels: np.ndarray          # shape (len(C), len(g))
    rates: dict                 # label -> array like labels
    params: dict                # "T", "p_ne", "sigma_Q2" arrays

    def to_dict(self):
        return {"g": self.g.tolist(), "C": self.C.tolist(), "labels": self.labels.tolist(),
                "rates": {k: v.tolist() for k, v in self.rates.items()}}

    def row(self, C_value) -> list:
        i = int(np.argmin(np.abs(self.C - C_value)))
        return list(self.labels[i])


def _check_grid(values, name):
    a = np.asarray(values, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError(f"{name} grid must be a nonempty 1-D sequence")
    if np.any(np.diff(a) <= 0):
        raise ValueError(f"{name} grid must be strictly ascending")
    return a


def strategy_region_map(g_grid, C_grid, base: GaussianCMParams | None = None, cfg=None,
                        executor=None) -> RegionMap:
    """Best of DAF, TS-DHD and GQ-EAF on every (g, C) cell.

    Ties go to the first label in REGION_LABELS order. Cells may be farmed
    out through ``executor.map``; results are assembled in row-major order.
    """
    g = _check_grid(g_grid, "g")
    C = _check_grid(C_grid, "C")
    base = base or GaussianCMParams()
    cfg = _cfg(cfg)
    jobs = [(base.with_(g=float(gv), C=float(cv)), cfg) for cv in C for gv in g]
    results = list(executor.map(_cell, jobs)) if executor is not None else [_cell(j) for j in jobs]
    shape = (len(C), len(g))
    rates = {k: np.zeros(shape) for k in REGION_LABELS}
    params = {k: np.zeros(shape) for k in ("T", "p_ne", "sigma_Q2")}
    labels = np.empty(shape, dtype=object)
    for n, (daf, ts, gq) in enumerate(results):
        i, k = divmod(n, len(g))
        vals = (daf, ts.rate, gq.rate)
        for lab, v in zip(REGION_LABELS, vals):
            rates[lab][i, k] = v
        labels[i, k] = REGION_LABELS[int(np.argmax(vals))]
        params["T"][i, k] = ts.params["T"]
        params["p_ne"][i, k] = ts.params["p_ne"]
        params["sigma_Q2"][i, k] = gq.params["sigma_Q2"]
    return RegionMap(g, C, labels.astype(str), rates, params)
