"""Multi-relay time-sharing EAF, the two-relay DAF baseline and the direct-link rate."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .probcore import ChannelSpec, JointPMF, build_joint
from .relay_single import ts_ratio

MAX_RELAYS = 10
INDEP_TOL = 1e-9


@dataclass(frozen=True)
class MultiRelayInstance:
    joint: JointPMF
    x: str = "X"
    relay_inputs: tuple = ("X1", "X2")
    y: str = "Y"
    relay_outputs: tuple = ("Y1", "Y2")
    max_relays: int = MAX_RELAYS

    def __post_init__(self):
        if len(self.relay_inputs) != len(self.relay_outputs):
            raise ValueError("need one relay output per relay input")
        if self.n > self.max_relays:
            raise ValueError(f"{self.n} relays exceeds the configured maximum {self.max_relays}")
        for n in (self.x, self.y) + tuple(self.relay_inputs) + tuple(self.relay_outputs):
            self.joint.axis(n)
        # total correlation of the transmitters; zero iff they are mutually independent
        ins = (self.x,) + tuple(self.relay_inputs)
        tc = sum(self.joint.H(v) for v in ins) - self.joint.H(ins)
        if tc >= INDEP_TOL:
            raise ValueError(f"transmitter inputs are not independent (total correlation {tc:.3g})")

    @property
    def n(self) -> int:
        return len(self.relay_inputs)

    @classmethod
    def from_channel(cls, channel: ChannelSpec, marginals, source="X", destination="Y"):
        ins = [n for n in channel.input_names if n != source]
        outs = [n for n in channel.output_names if n != destination]
        return cls(build_joint(marginals, channel), source, tuple(ins), destination, tuple(outs))


@dataclass(frozen=True)
class DecodingOrder:
    """Decoding order of relay bin indices (x_order) and of their descriptions (yhat_order).

    Relays are numbered from 1.
    """
    x_order: tuple
    yhat_order: tuple

    def validate(self, n: int):
        want = list(range(1, n + 1))
        if sorted(self.x_order) != want or sorted(self.yhat_order) != want:
            raise ValueError(f"orders must be permutations of 1..{n}")
        xpos = {r: k for k, r in enumerate(self.x_order)}
        for k, i in enumerate(self.yhat_order):
            for p in self.yhat_order[:k]:
                if xpos[p] > xpos[i]:
                    raise ValueError(f"description of relay {p} precedes relay {i} "
                                     f"but its bin index does not")

    def z_prior(self, i):
        return self.x_order[:self.x_order.index(i)]

    def t_prior(self, i):
        return self.yhat_order[:self.yhat_order.index(i)]


def subset_weight(q, theta: int) -> tuple[float, frozenset]:
    """Probability that exactly the relays in Bin(theta) forward; relay i is bit i-1."""
    q = np.asarray(q, dtype=float)
    n = q.size
    if not 0 <= theta < 2 ** n:
        raise ValueError(f"theta={theta} outside [0, {2 ** n - 1}]")
    if np.any((q < 0) | (q > 1)):
        raise ValueError("q entries must lie in [0, 1]")
    idx = frozenset(i + 1 for i in range(n) if theta >> i & 1)
    prob = 1.0
    for i in range(n):
        prob *= q[i] if (i + 1) in idx else 1.0 - q[i]
    return prob, idx


def _subset_rate(inst: MultiRelayInstance, q) -> float:
    j = inst.joint
    xs = tuple(inst.relay_inputs)
    cond = xs + (inst.y,)
    rate = j.I(inst.x, inst.y, xs)
    for theta in range(1, 2 ** inst.n):
        w, idx = subset_weight(q, theta)
        if w == 0.0:
            continue
        ys = tuple(inst.relay_outputs[i - 1] for i in sorted(idx))
        rate += w * j.I(inst.x, ys, cond)
    return rate


def multi_ts_eaf_simple(inst: MultiRelayInstance) -> tuple[float, np.ndarray]:
    j = inst.joint
    xs = tuple(inst.relay_inputs)
    q = np.array([ts_ratio(j.I(xi, inst.y), j.H(yi, xs + (inst.y,)))
                  for xi, yi in zip(inst.relay_inputs, inst.relay_outputs)])
    return _subset_rate(inst, q), q


def multi_ts_eaf_ordered(inst: MultiRelayInstance, order: DecodingOrder) -> tuple[float, np.ndarray]:
    order.validate(inst.n)
    j = inst.joint
    xs = tuple(inst.relay_inputs)
    cond = xs + (inst.y,)
    q = np.zeros(inst.n)
    # descriptions decoded earlier have their q fixed before later ones are computed
    for i in order.yhat_order:
        xi, yi = inst.relay_inputs[i - 1], inst.relay_outputs[i - 1]
        z = tuple(inst.relay_inputs[r - 1] for r in order.z_prior(i))
        t = order.t_prior(i)
        den = j.H(yi, cond)
        tq = [q[r - 1] for r in t]
        for theta in range(1, 2 ** len(t)):
            w, idx = subset_weight(tq, theta)
            ys = tuple(inst.relay_outputs[t[k - 1] - 1] for k in sorted(idx))
            den -= w * j.I(yi, ys, cond)
        q[i - 1] = ts_ratio(j.I(xi, inst.y, z), den)
    return _subset_rate(inst, q), q


def all_orders(n: int):
    for xo in itertools.permutations(range(1, n + 1)):
        for yo in itertools.permutations(range(1, n + 1)):
            o = DecodingOrder(xo, yo)
            try:
                o.validate(n)
            except ValueError:
                continue
            yield o


def best_order(inst: MultiRelayInstance, max_n: int = 4):
    """Exhaustive search over valid decoding orders; first best order wins ties."""
    if inst.n > max_n:
        raise ValueError(f"exhaustive order search limited to {max_n} relays")
    best = None
    for o in all_orders(inst.n):
        r, q = multi_ts_eaf_ordered(inst, o)
        if best is None or r > best[0]:
            best = (r, q, o)
    return best


# ------------------------------------------------------------------ two-relay DAF

def _conditional_slices(p, axis):
    """Yield (symbol, weight, normalised slice) of a joint pmf tensor along ``axis``."""
    for s in range(p.shape[axis]):
        sl = np.take(p, s, axis=axis)
        w = sl.sum()
        if w > 0:
            yield s, w, sl / w


def two_relay_daf(channel: ChannelSpec, dist: JointPMF,
                  names=("X", "X1", "X2"), outputs=("Y", "Y1", "Y2")) -> dict:
    """All five two-relay decode-and-forward expressions and their maximum.

    R1 (R2) lets only relay 1 (2) decode; the other relay's input is frozen at
    one symbol and the best symbol is kept. R12, R21 are the two serial
    orders and RG has both relays decode as one group.
    """
    x, x1, x2 = names
    y, y1, y2 = outputs
    if set(channel.input_names) != set(names):
        raise ValueError(f"channel inputs {channel.input_names} are not {names}")
    if set(channel.output_names) != set(outputs):
        raise ValueError(f"channel outputs {channel.output_names} are not {outputs}")
    for n in names:
        if channel.inputs[channel.input_names.index(n)].size != dist.size(n):
            raise ValueError(f"alphabet of {n} differs between channel and distribution")
    j = build_joint([dist], channel)

    def single(relay_in, relay_out, other_in):
        # condition the full joint on each symbol of the other relay's input
        best = 0.0
        ax = j.axis(other_in)
        rest = [v for v in j.vars if v.name != other_in]
        for _, _, sl in _conditional_slices(j.probs, ax):
            jj = JointPMF(rest, sl, tol=1e-9)
            best = max(best, min(jj.I((x, relay_in), y), jj.I(x, relay_out, relay_in)))
        return best

    r1 = single(x1, y1, x2)
    r2 = single(x2, y2, x1)
    r12 = min(j.I(x, y1, (x1, x2)), j.I((x, x2), y2, x1), j.I((x, x1, x2), y))
    r21 = min(j.I(x, y2, (x1, x2)), j.I((x, x1), y1, x2), j.I((x, x1, x2), y))
    rg = min(j.I(x, y1, (x1, x2)), j.I(x, y2, (x1, x2)), j.I((x, x1, x2), y))
    out = {"R1": r1, "R2": r2, "R12": r12, "R21": r21, "RG": rg}
    out["R_DAF"] = max(out.values())
    return out


# ------------------------------------------------------------------ direct link

def blahut_arimoto(w, tol=1e-9, max_iter=100000):
    """Capacity in bits of the DMC with rows w[x] = p(y|x); returns (C, p*)."""
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    p = np.full(n, 1.0 / n)
    logw = np.where(w > 0, np.log2(np.where(w > 0, w, 1.0)), 0.0)
    for _ in range(max_iter):
        qy = p @ w
        logq = np.log2(np.where(qy > 0, qy, 1.0))
        d = np.sum(w * (logw - logq), axis=1)   # D(w_x || q) per input
        lo = float(p @ d)
        hi = float(d.max())
        if hi - lo < tol:
            return lo, p
        p = p * np.exp2(d)
        p /= p.sum()
    return lo, p


def ptp_rate(channel: ChannelSpec, source="X", destination="Y", tol=1e-9) -> dict:
    """Best single-link capacity with every other input frozen at a constant symbol."""
    ch = channel.restrict_outputs([destination])
    names = ch.input_names
    k = names.index(source)
    w = np.moveaxis(ch.cond_probs, k, len(names) - 1)
    others = [v for v in ch.inputs if v.name != source]
    best = (-1.0, None, None)
    for sym in itertools.product(*[range(v.size) for v in others]):
        c, p = blahut_arimoto(w[sym], tol)
        if c > best[0] + 1e-15:
            best = (c, sym, p)
    c, sym, p = best
    return {"rate": max(c, 0.0), "frozen": dict(zip([v.name for v in others], [int(s) for s in sym])),
            "input": p}
