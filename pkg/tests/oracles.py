"""Naive reference computations, written without the package.

Joints are plain dicts {outcome tuple: probability}; every quantity is a
direct sum over outcomes. Slow, but easy to audit.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np


def to_dict(arr) -> dict:
    return {idx: float(v) for idx, v in np.ndenumerate(np.asarray(arr)) if v > 0}


def marginal(p: dict, axes) -> dict:
    out = defaultdict(float)
    for k, v in p.items():
        out[tuple(k[a] for a in axes)] += v
    return dict(out)


def H(p: dict, axes) -> float:
    axes = tuple(axes)
    if not axes:
        return 0.0
    return -sum(v * math.log2(v) for v in marginal(p, axes).values() if v > 0)


def I(p: dict, a, b, c=()) -> float:
    a, b, c = tuple(a), tuple(b), tuple(c)
    return H(p, a + c) + H(p, b + c) - H(p, a + b + c) - H(p, c)


def erase_copy(p: dict, src: int, q: float, erasure: int) -> dict:
    """Append a component equal to outcome[src] w.p. q, else ``erasure``."""
    out = defaultdict(float)
    for k, v in p.items():
        if q > 0:
            out[k + (k[src],)] += q * v
        if q < 1:
            out[k + (erasure,)] += (1 - q) * v
    return dict(out)


def append_kernel(p: dict, parents, kernel) -> dict:
    """Append a component drawn from kernel[parent symbols..., new]."""
    kernel = np.asarray(kernel)
    out = defaultdict(float)
    for k, v in p.items():
        row = kernel[tuple(k[a] for a in parents)]
        for s, w in enumerate(row):
            if w > 0:
                out[k + (s,)] += v * float(w)
    return dict(out)


def product_channel(marginals, channel) -> dict:
    """p(inputs) = prod of marginals, times channel[inputs..., outputs...]."""
    channel = np.asarray(channel)
    k = len(marginals)
    out = {}
    for ins in itertools.product(*[range(len(m)) for m in marginals]):
        px = math.prod(float(m[i]) for m, i in zip(marginals, ins))
        for outs in itertools.product(*[range(n) for n in channel.shape[k:]]):
            v = px * float(channel[ins + outs])
            if v > 0:
                out[ins + outs] = v
    return out


def ts_two_relay_rate(p: dict, q1: float, q2: float) -> float:
    """I(X; Y, Yh1, Yh2 | X1, X2) with outcome layout (x, x1, x2, y, y1, y2)."""
    p = erase_copy(p, 4, q1, 2)
    p = erase_copy(p, 5, q2, 2)
    return I(p, (0,), (3, 6, 7), (1, 2))


def hb(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def gaussian_codebook_gq_rate(P, g, s2, s12, C) -> float:
    """I(X; Y, Yq) for Gaussian X via covariance determinants.

    Y = X + N, Y1 = sqrt(g) X + N1, Yq = Y1 + NQ. The quantisation noise is
    set so that I(Y1; Yq | Y) = C, computed from a Schur complement.
    """
    a = math.sqrt(g)
    cov_y1y = a * P
    var_y1_given_y = a * a * P + s12 - cov_y1y ** 2 / (P + s2)
    sq = var_y1_given_y / (2 ** (2 * C) - 1)
    sig = np.array([[P + s2, a * P], [a * P, a * a * P + s12 + sq]])
    sig_given_x = np.array([[s2, 0.0], [0.0, s12 + sq]])
    h = lambda m: 0.5 * math.log2((2 * math.pi * math.e) ** 2 * np.linalg.det(m))  # noqa: E731
    return h(sig) - h(sig_given_x)


def bsc_family_values(p: float) -> dict:
    """Closed forms for X uniform and two independent BSC(p) looks at it."""
    d = 2 * p * (1 - p)
    return {"I_X_Y1": 1 - hb(p), "H_Y1_given_Y2": hb(d), "I_X_Y1Y2": 1 + hb(d) - 2 * hb(p)}
