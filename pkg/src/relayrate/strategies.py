"""Strategy dispatch for discrete relay channels given as ChannelSpec.

The first channel input is the source and the first output the destination;
remaining inputs and outputs are the relays, paired in order.
"""

from __future__ import annotations

import numpy as np

from . import relay_multi as rm
from . import relay_single as rs
from .optimizer import OptimizerCfg, maximize_joint, maximize_product
from .probcore import ChannelSpec, JointPMF, Var, add_variable, as_marginal, build_joint, uniform
from .relay_single import RateReport

DISCRETE_STRATEGIES = ("ptp", "daf", "ts-eaf", "ts-eaf-ordered", "eaf", "taf", "joint-decode")
_NEEDS_QUANTIZER = ("eaf", "taf", "joint-decode")


def roles(channel: ChannelSpec):
    ins, outs = channel.input_names, channel.output_names
    if len(ins) < 1 or len(ins) != len(outs):
        raise ValueError("channel needs one output per input (destination first, then relays)")
    return ins[0], ins[1:], outs[0], outs[1:]


def uniform_inputs(channel: ChannelSpec):
    return [uniform(v.name, v.size) for v in channel.inputs]


def _product_joint(dist):
    """Joint pmf of the inputs from a list of pmfs over disjoint variables."""
    j = None
    for m in dist:
        m = as_marginal(m)
        if j is None:
            j = m
            continue
        p = np.multiply.outer(j.probs, m.probs)
        j = JointPMF(j.vars + m.vars, p, tol=1e-9)
    return j


def evaluate(channel: ChannelSpec, strategy: str, dist=None, quantizer: ChannelSpec | None = None) -> RateReport:
    """Rate of ``strategy`` at a fixed input distribution (None means uniform)."""
    s = strategy.lower()
    if s not in DISCRETE_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(DISCRETE_STRATEGIES)}")
    x, relays_in, y, relays_out = roles(channel)
    n = len(relays_in)
    if s == "ptp":
        res = rm.ptp_rate(channel, x, y)
        return RateReport("ptp", res["rate"], params={"frozen": res["frozen"],
                                                      "p_x": res["input"].tolist()})
    dist = list(dist) if dist is not None else uniform_inputs(channel)
    if s == "daf":
        if n == 2:
            res = rm.two_relay_daf(channel, _product_joint(dist), (x,) + relays_in, (y,) + relays_out)
            return RateReport("daf", res["R_DAF"], params={k: v for k, v in res.items() if k != "R_DAF"})
        if n == 1:
            j = build_joint(dist, channel)
            return RateReport("daf", rs.daf_rate(rs.SingleRelayInstance(j, x, relays_in[0], y, relays_out[0])))
        raise ValueError("daf supports one or two relays")
    j = build_joint(dist, channel)
    if s in _NEEDS_QUANTIZER:
        if n != 1:
            raise ValueError(f"{s} is defined for a single relay")
        if quantizer is None:
            raise ValueError(f"{s} needs a quantizer p(yh|x1,y1)")
        yh, = quantizer.output_names
        k = np.moveaxis(quantizer.cond_probs, [quantizer.input_names.index(relays_in[0]),
                                               quantizer.input_names.index(relays_out[0])], [0, 1])
        j = add_variable(j, yh, (relays_in[0], relays_out[0]), k)
        inst = rs.SingleRelayInstance(j, x, relays_in[0], y, relays_out[0], yh)
        return rs.evaluate(inst, s)
    inst = rm.MultiRelayInstance(j, x, relays_in, y, relays_out)
    if s == "ts-eaf":
        r, q = rm.multi_ts_eaf_simple(inst)
        return RateReport("ts-eaf", r, params={"q": q.tolist()})
    r, q, order = rm.best_order(inst)
    return RateReport("ts-eaf-ordered", r, params={"q": q.tolist(), "x_order": list(order.x_order),
                                                   "yhat_order": list(order.yhat_order)})


def optimize(channel: ChannelSpec, strategy: str, cfg: OptimizerCfg | None = None):
    """Maximise the rate over input distributions; returns (RateReport, OptimizationResult)."""
    cfg = cfg or OptimizerCfg()
    s = strategy.lower()
    x, relays_in, y, relays_out = roles(channel)
    sizes = [v.size for v in channel.inputs]
    names = channel.input_names

    if s == "ptp":
        # relays send constants; optimise p(x) against the best frozen symbol pair
        ch = channel.restrict_outputs([y])
        w = np.moveaxis(ch.cond_probs, names.index(x), len(names) - 1)
        slices = w.reshape(-1, w.shape[-2], w.shape[-1])

        def f(ps):
            p = ps[0]
            best = 0.0
            for sl in slices:
                qy = p @ sl
                with np.errstate(divide="ignore", invalid="ignore"):
                    t = np.where(sl > 0, sl * np.log2(sl / qy), 0.0)
                best = max(best, float(p @ t.sum(axis=1)))
            return best

        res = maximize_product(f, [channel.inputs[names.index(x)].size], cfg)
        rep = RateReport("ptp", res.value, params={"p_x": res.best[0].tolist()},
                         meta={"restarts": cfg.restarts, "seed": cfg.seed,
                               "alternating_max": rm.ptp_rate(channel, x, y)["rate"]})
        return rep, res

    if s == "daf":
        total = int(np.prod(sizes))

        def f(p):
            j = JointPMF(channel.inputs, p.reshape(sizes), tol=1e-9)
            return evaluate(channel, "daf", [j]).rate

        res = maximize_joint(f, total, cfg)
        best = [res.best[0].reshape(sizes)]
        res.best = best
        rep = evaluate(channel, "daf", [JointPMF(channel.inputs, best[0], tol=1e-9)])
        rep.params["p_inputs"] = best[0].ravel().tolist()
        rep.meta.update(restarts=cfg.restarts, seed=cfg.seed)
        return rep, res

    if s in ("ts-eaf", "ts-eaf-ordered"):
        def marg(ps):
            return [JointPMF([Var(n, k)], p) for n, k, p in zip(names, sizes, ps)]

        res = maximize_product(lambda ps: evaluate(channel, s, marg(ps)).rate, sizes, cfg)
        rep = evaluate(channel, s, marg(res.best))
        rep.params["marginals"] = {n: p.tolist() for n, p in zip(names, res.best)}
        rep.meta.update(restarts=cfg.restarts, seed=cfg.seed)
        return rep, res
    raise ValueError(f"strategy {strategy!r} cannot be optimised from a channel file")
