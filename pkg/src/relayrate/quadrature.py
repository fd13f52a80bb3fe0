"""Adaptive Simpson quadrature and Gaussian-mixture differential entropies."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

LOG2E = 1.0 / np.log(2.0)


class QuadratureError(RuntimeError):
    def __init__(self, msg, error_estimate):
        super().__init__(f"{msg} (error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureCfg:
    abs_tol: float = 1e-9
    truncation: float = 10.0
    max_depth: int = 40
    abs_tol_2d: float = 1e-7

    def __post_init__(self):
        if self.abs_tol <= 0 or self.abs_tol_2d <= 0:
            raise ValueError("tolerances must be positive")
        if self.truncation < 6:
            raise ValueError("truncation must be at least 6 standard deviations")

    def halved(self) -> "QuadratureCfg":
        return QuadratureCfg(self.abs_tol / 2, self.truncation, self.max_depth, self.abs_tol_2d / 2)


def adaptive_simpson(f, a, b, abs_tol=1e-9, max_depth=40, n_init=16):
    """Integrate a vectorised f over [a, b]; returns (value, error estimate).

    All panels of one refinement level are evaluated in a single call to f.
    A panel is accepted when the Richardson difference is within its share
    of the tolerance, proportional to its width.
    """
    if b <= a:
        return 0.0, 0.0
    lo = np.linspace(a, b, n_init + 1)
    lo, hi = lo[:-1], lo[1:]
    mid = 0.5 * (lo + hi)
    fl, fm, fh = f(lo), f(mid), f(hi)
    whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh)
    tol = abs_tol * (hi - lo) / (b - a)
    total, err = 0.0, 0.0
    for _ in range(max_depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(np.concatenate([lm, rm])).reshape(2, -1)
        left = (mid - lo) / 6.0 * (fl + 4.0 * flm + fm)
        right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fh)
        delta = left + right - whole
        ok = np.abs(delta) <= 15.0 * tol
        total += float(np.sum((left + right + delta / 15.0)[ok]))
        err += float(np.sum(np.abs(delta[ok]))) / 15.0
        if ok.all():
            return total, err
        nk = ~ok
        pending = float(np.sum(np.abs(delta[nk]))) / 15.0
        lo, mid, hi = lo[nk], mid[nk], hi[nk]
        fl, fm, fh, flm, frm = fl[nk], fm[nk], fh[nk], flm[nk], frm[nk]
        left, right, tol = left[nk], right[nk], tol[nk]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        fl, fh = np.concatenate([fl, fm]), np.concatenate([fm, fh])
        fm = np.concatenate([flm, frm])
        whole = np.concatenate([left, right])
        tol = np.concatenate([tol, tol]) / 2.0
    raise QuadratureError("adaptive Simpson did not converge", err + pending)


def mixture_logpdf(x, means, variances, weights):
    x = np.asarray(x, dtype=float)[..., None]
    m = np.asarray(means, dtype=float)
    v = np.asarray(variances, dtype=float)
    w = np.asarray(weights, dtype=float)
    with np.errstate(divide="ignore"):
        lw = np.log(w)
    return logsumexp(lw - 0.5 * np.log(2 * np.pi * v) - (x - m) ** 2 / (2 * v), axis=-1)


def _entropy_integrand(means, variances, weights):
    def f(x):
        lp = mixture_logpdf(x, means, variances, weights)
        return -np.exp(lp) * lp * LOG2E
    return f


@lru_cache(maxsize=65536)
def _mixture_entropy(means, variances, weights, abs_tol, truncation, max_depth):
    # merge coincident components and drop empty ones
    merged: dict = {}
    for m, v, w in zip(means, variances, weights):
        if w > 0:
            merged[(m, v)] = merged.get((m, v), 0.0) + w
    means = tuple(m for m, _ in merged)
    variances = tuple(v for _, v in merged)
    total = sum(merged.values())
    weights = tuple(w / total for w in merged.values())
    if len(merged) == 1:
        return 0.5 * np.log2(2 * np.pi * np.e * variances[0])
    s = truncation * np.sqrt(max(variances))
    a, b = min(means) - s, max(means) + s
    val, _ = adaptive_simpson(_entropy_integrand(means, variances, weights), a, b, abs_tol, max_depth)
    return val


def mixture_entropy(means, variances, weights, cfg: QuadratureCfg | None = None) -> float:
    """Differential entropy in bits of a 1-D Gaussian mixture."""
    cfg = cfg or QuadratureCfg()
    means = tuple(float(m) for m in np.ravel(means))
    variances = tuple(float(v) for v in np.broadcast_to(np.ravel(variances), (len(means),)))
    weights = tuple(float(w) for w in np.ravel(weights))
    if len(weights) != len(means):
        raise ValueError("one weight per component required")
    if any(v <= 0 for v in variances):
        raise ValueError("variances must be positive")
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("weights must form a pmf")
    return _mixture_entropy(means, variances, weights, cfg.abs_tol, cfg.truncation, cfg.max_depth)


def adaptive_simpson_2d(f, xr, yr, abs_tol=1e-7, max_depth=40):
    """Iterated adaptive Simpson for f(x, y) vectorised in y; yr may depend on x."""
    xa, xb = xr
    inner_tol = abs_tol / (2.0 * (xb - xa))

    def outer(xs):
        out = np.empty(len(xs))
        for k, x in enumerate(xs):
            ya, yb = yr(x) if callable(yr) else yr
            out[k] = adaptive_simpson(lambda y: f(x, y), ya, yb, inner_tol, max_depth)[0]
        return out

    return adaptive_simpson(outer, xa, xb, abs_tol / 2.0, max_depth)


def mixture_entropy_2d(means, variances, weights, cfg: QuadratureCfg | None = None) -> float:
    """Differential entropy in bits of a 2-D mixture of axis-aligned Gaussians.

    means and variances have shape (K, 2).
    """
    cfg = cfg or QuadratureCfg()
    m = np.asarray(means, dtype=float).reshape(-1, 2)
    v = np.asarray(variances, dtype=float).reshape(-1, 2)
    w = np.asarray(weights, dtype=float)
    keep = w > 0
    m, v, w = m[keep], v[keep], w[keep] / w[keep].sum()
    lw = np.log(w)

    def f(x, y):
        lp = logsumexp(lw - 0.5 * np.log(4 * np.pi ** 2 * v[:, 0] * v[:, 1])
                       - (x - m[:, 0]) ** 2 / (2 * v[:, 0])
                       - (np.asarray(y)[:, None] - m[:, 1]) ** 2 / (2 * v[:, 1]), axis=-1)
        return -np.exp(lp) * lp * LOG2E

    k = cfg.truncation
    sx, sy = k * np.sqrt(v[:, 0].max()), k * np.sqrt(v[:, 1].max())
    xr = (m[:, 0].min() - sx, m[:, 0].max() + sx)
    yr = (m[:, 1].min() - sy, m[:, 1].max() + sy)
    val, _ = adaptive_simpson_2d(f, xr, yr, cfg.abs_tol_2d, cfg.max_depth)
    return val


def gaussian_entropy(var) -> float:
    return 0.5 * np.log2(2 * np.pi * np.e * var)
