"""Common-message broadcast with two conferencing receivers."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .optimizer import OptimizerCfg, maximize_product
from .probcore import (ChannelSpec, FormatError, JointPMF, Var, _read, apply_ts_mapping,
                       build_joint, load_joint)
from .relay_single import ts_ratio

FACTOR_TOL = 1e-9
FEAS_TOL = 1e-9


class CardinalityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BCInstance:
    joint: JointPMF
    C12: float = 0.0
    C21: float = 0.0
    x: str = "X"
    y1: str = "Y1"
    y2: str = "Y2"

    def __post_init__(self):
        for n in (self.x, self.y1, self.y2):
            self.joint.axis(n)
        if self.C12 < 0 or self.C21 < 0:
            raise ValueError("conference capacities must be nonnegative")

    @classmethod
    def from_channel(cls, channel: ChannelSpec, px, C12=0.0, C21=0.0):
        j = build_joint([px], channel)
        x, = channel.input_names
        y1, y2 = channel.output_names
        return cls(j, C12, C21, x, y1, y2)

    def swapped(self) -> "BCInstance":
        return BCInstance(self.joint, self.C21, self.C12, self.x, self.y2, self.y1)

    def with_capacities(self, C12, C21) -> "BCInstance":
        return BCInstance(self.joint, C12, C21, self.x, self.y1, self.y2)


def symmetric_bsc_joint(p: float, px=(0.5, 0.5)) -> JointPMF:
    """X binary; Y1 and Y2 are independent BSC(p) observations of X."""
    px = np.asarray(px, dtype=float)
    bsc = np.array([[1 - p, p], [p, 1 - p]])
    t = px[:, None, None] * bsc[:, :, None] * bsc[:, None, :]
    return JointPMF([Var("X", 2), Var("Y1", 2), Var("Y2", 2)], t)


def symmetric_bsc_channel(p: float) -> ChannelSpec:
    bsc = np.array([[1 - p, p], [p, 1 - p]])
    return ChannelSpec([Var("X", 2)], [Var("Y1", 2), Var("Y2", 2)], bsc[:, :, None] * bsc[:, None, :])


def upper_bound_common(inst: BCInstance) -> float:
    j, s = inst.joint, inst
    return min(j.I(s.x, s.y1) + s.C21, j.I(s.x, s.y2) + s.C12, j.I(s.x, (s.y1, s.y2)))


def _one_step_dir(inst):
    j, s = inst.joint, inst
    i2 = j.I(s.x, s.y2)
    coop = i2 - j.H(s.y1, (s.y2, s.x)) + min(s.C12, j.H(s.y1, s.y2))
    return min(j.I(s.x, s.y1) + s.C21, max(i2, coop))


def one_step_joint_rate(inst: BCInstance) -> float:
    """Receiver 1 sends a Slepian-Wolf bin of Y1 first (R12) or the reverse (R21)."""
    return max(_one_step_dir(inst), _one_step_dir(inst.swapped()))


def _single_cycle_dir(inst):
    j, s = inst.joint, inst
    q = ts_ratio(s.C12, j.H(s.y1, s.y2))
    return min(j.I(s.x, s.y1) + s.C21, j.I(s.x, s.y2) + q * j.I(s.x, s.y1, s.y2))


def single_cycle_ts_rate(inst: BCInstance, combine: str = "min") -> float:
    r12 = _single_cycle_dir(inst)
    r21 = _single_cycle_dir(inst.swapped())
    if combine == "min":
        return min(r12, r21)
    if combine == "max":
        return max(r12, r21)
    raise ValueError("combine must be 'min' or 'max'")


# ------------------------------------------------------------------ K-cycle evaluator

@dataclass
class KCycleRegion:
    R0_max: float
    R1_max: float
    R2_max: float
    sumbound: float
    C12_slack: float
    C21_slack: float
    alpha: float | None = None
    rate: float | None = None     # common-message mode: min of the two bounds

    @property
    def feasible(self) -> bool:
        return self.C12_slack >= -FEAS_TOL and self.C21_slack >= -FEAS_TOL

    def to_dict(self):
        return dict(self.__dict__, feasible=self.feasible)


def chain_order(yhat1, yhat2):
    """Interleaved generation order Yh1(1), Yh2(1), Yh1(2), ..."""
    out = []
    for k in range(max(len(yhat1), len(yhat2))):
        if k < len(yhat1):
            out.append((1, yhat1[k]))
        if k < len(yhat2):
            out.append((2, yhat2[k]))
    return out


def check_factorization(inst: BCInstance, yhat1, yhat2, tol=FACTOR_TOL):
    """Each auxiliary may depend only on its own receiver output and earlier auxiliaries."""
    j = inst.joint
    chain = [n for _, n in chain_order(yhat1, yhat2)]
    base = [n for n in j.names if n not in chain]
    for pos, (who, name) in enumerate(chain_order(yhat1, yhat2)):
        own = inst.y1 if who == 1 else inst.y2
        parents = (own,) + tuple(chain[:pos])
        others = tuple(n for n in base if n != own)
        leak = j.I(name, others, parents) if others else 0.0
        if leak > tol:
            raise ValueError(f"{name} is not conditionally independent of {others} given "
                             f"{parents} (I = {leak:.3g})")


def check_cardinality(inst: BCInstance, yhat1, yhat2):
    j = inst.joint
    s1 = [j.size(n) for n in yhat1]
    s2 = [j.size(n) for n in yhat2]
    n1, n2 = j.size(inst.y1), j.size(inst.y2)
    for k, sz in enumerate(s1):
        bound = n1 * int(np.prod(s1[:k])) * int(np.prod(s2[:k])) + 1
        if sz > bound:
            warnings.warn(f"{yhat1[k]} has {sz} symbols, bound is {bound}", CardinalityWarning, stacklevel=3)
    for k, sz in enumerate(s2):
        bound = n2 * int(np.prod(s1[:k + 1])) * int(np.prod(s2[:k])) + 1
        if sz > bound:
            warnings.warn(f"{yhat2[k]} has {sz} symbols, bound is {bound}", CardinalityWarning, stacklevel=3)


def k_cycle_region(inst: BCInstance, yhat1, yhat2, alpha=None, mode: str = "general",
                   w=None, u=None, v=None, check: bool = True) -> KCycleRegion:
    """Rate bounds and conference slacks for a user-supplied auxiliary chain.

    mode "general": private/common region with auxiliaries W, U, V; a missing
    W is taken to be X and missing U, V constant.
    mode "common": single common message where receiver 1 decodes last, the
    Yh2 chain stops one step short and the final C21 budget is split, alpha of
    it carrying message bits. alpha=None picks the largest feasible alpha.
    """
    yhat1, yhat2 = tuple(yhat1), tuple(yhat2)
    K = len(yhat1)
    if mode == "general" and len(yhat2) != K:
        raise ValueError("general mode needs K auxiliaries on each side")
    if mode == "common" and len(yhat2) != max(K - 1, 0):
        raise ValueError("common mode needs K-1 auxiliaries for receiver 2")
    if check:
        check_factorization(inst, yhat1, yhat2)
        check_cardinality(inst, yhat1, yhat2)
    j, s = inst.joint, inst
    allq = yhat1 + yhat2
    c12 = j.I(s.y1, allq, s.y2)
    c21 = j.I(s.y2, allq, s.y1)
    side1 = (s.y1,) + yhat2
    side2 = yhat1 + (s.y2,)

    if mode == "general":
        wv = (w,) if w else (s.x,)
        uv = (u,) if u else ()
        vv = (v,) if v else ()
        r0 = min(j.I(wv, side1), j.I(wv, side2))
        r1 = j.I(uv, side1, wv)
        r2 = j.I(vv, side2, wv)
        pen = j.I(uv, vv, wv) if uv and vv else 0.0
        return KCycleRegion(r0, r1, r2, r1 + r2 - pen, s.C12 - c12, s.C21 - c21)

    if mode != "common":
        raise ValueError("mode must be 'general' or 'common'")
    if alpha is None:
        if s.C21 > 0:
            alpha = min(max(1.0 - c21 / s.C21, 0.0), 1.0)
        else:
            alpha = 0.0
    elif not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    r1 = j.I(s.x, side1) + alpha * s.C21
    r2 = j.I(s.x, side2)
    return KCycleRegion(min(r1, r2), r1, r2, r1 + r2, s.C12 - c12, (1 - alpha) * s.C21 - c21,
                        alpha, min(r1, r2))


def single_cycle_ts_chain(inst: BCInstance, name="Yh1_1") -> tuple[BCInstance, tuple]:
    """Attach the time-sharing description of Y1 with q = [C12 / H(Y1|Y2)]*."""
    q = ts_ratio(inst.C12, inst.joint.H(inst.y1, inst.y2))
    j = apply_ts_mapping(inst.joint, inst.y1, q, name)
    return BCInstance(j, inst.C12, inst.C21, inst.x, inst.y1, inst.y2), (name,)


# ------------------------------------------------------------------ sweeps and I/O

def bc_sweep(joint: JointPMF, C_values, combine="min", x="X", y1="Y1", y2="Y2") -> list[dict]:
    """Equal conference capacities C12 = C21 = C, fixed input distribution."""
    rows = []
    for c in C_values:
        inst = BCInstance(joint, float(c), float(c), x, y1, y2)
        rows.append({"C": float(c), "upper": upper_bound_common(inst),
                     "one_step": one_step_joint_rate(inst),
                     "single_cycle_ts": single_cycle_ts_rate(inst, combine)})
    return rows


def sup_over_input(rate_fn, channel: ChannelSpec, C12, C21, cfg: OptimizerCfg | None = None):
    """Maximise rate_fn(BCInstance) over p(x) with the random-restart optimizer."""
    x, = channel.inputs

    def f(ps):
        return rate_fn(BCInstance.from_channel(channel, JointPMF([x], ps[0]), C12, C21))

    return maximize_product(f, [x.size], cfg)


def load_bc(src):
    """Joint over X, Y1, Y2 plus optional chain with a ``parents`` block.

    Returns (BCInstance, yhat1, yhat2). Auxiliaries whose parents include Y1
    form receiver 1's chain, in listed order; likewise for Y2.
    """
    obj, where = _read(src)
    j = load_joint(obj)
    parents = obj.get("parents", {})
    if not isinstance(parents, dict):
        raise FormatError(f"{where}: 'parents' must map variable names to parent lists")
    names = obj.get("roles", {})
    x, y1, y2 = names.get("x", "X"), names.get("y1", "Y1"), names.get("y2", "Y2")
    yhat1, yhat2 = [], []
    for n in j.names:
        if n not in parents:
            continue
        ps = parents[n]
        if not isinstance(ps, list):
            raise FormatError(f"{where}: parents[{n!r}] must be a list")
        if y1 in ps:
            yhat1.append(n)
        elif y2 in ps:
            yhat2.append(n)
        else:
            raise FormatError(f"{where}: parents[{n!r}] names neither {y1} nor {y2}")
    expected = dict()
    for pos, (who, n) in enumerate(chain_order(yhat1, yhat2)):
        own = y1 if who == 1 else y2
        expected[n] = {own} | {m for _, m in chain_order(yhat1, yhat2)[:pos]}
    for n, ps in expected.items():
        if set(parents[n]) != ps:
            raise FormatError(f"{where}: parents[{n!r}] = {sorted(parents[n])}, chain requires {sorted(ps)}")
    try:
        inst = BCInstance(j, float(obj.get("C12", 0.0)), float(obj.get("C21", 0.0)), x, y1, y2)
    except (KeyError, ValueError) as e:
        raise FormatError(f"{where}: {e}") from None
    return inst, tuple(yhat1), tuple(yhat2)
