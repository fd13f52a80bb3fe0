"""Single-relay achievable rates: DAF, EAF, TS-EAF, TAF and joint decoding."""

from __future__ import annotations

from dataclasses import dataclass, field

from .probcore import JointPMF, apply_ts_mapping

FEAS_TOL = 1e-9
INDEP_TOL = 1e-9
MARKOV_TOL = 1e-9


@dataclass(frozen=True)
class FeasibleRate:
    rate: float
    slack: float
    tol: float = FEAS_TOL

    @property
    def feasible(self) -> bool:
        return self.slack >= -self.tol


@dataclass
class RateReport:
    """What gets printed for one evaluated strategy."""
    strategy: str
    rate: float
    feasible: bool = True
    slack: float | None = None
    params: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {"strategy": self.strategy, "rate": self.rate, "feasible": self.feasible,
                "slack": self.slack, "params": dict(self.params), "meta": dict(self.meta)}


def ts_ratio(num: float, den: float) -> float:
    """[num/den]* with the 0/0 (and x/0) case resolved to 1."""
    if den <= 0:
        return 1.0
    return min(max(num / den, 0.0), 1.0)


@dataclass(frozen=True)
class SingleRelayInstance:
    """A joint pmf plus the names playing source, relay and destination roles."""
    joint: JointPMF
    x: str = "X"
    x1: str = "X1"
    y: str = "Y"
    y1: str = "Y1"
    yhat: str = "Yh1"

    def __post_init__(self):
        for n in (self.x, self.x1, self.y, self.y1):
            self.joint.axis(n)

    @property
    def has_yhat(self) -> bool:
        return self.yhat in self.joint

    def check_independent_inputs(self):
        dep = self.joint.I(self.x, self.x1)
        if dep >= INDEP_TOL:
            raise ValueError(f"X and X1 must be independent for EAF rates (I = {dep:.3g})")

    def check_quantizer(self):
        if not self.has_yhat:
            raise KeyError(f"joint has no quantizer output {self.yhat!r}")
        leak = self.joint.I(self.yhat, (self.x, self.y), (self.x1, self.y1))
        if leak > MARKOV_TOL:
            raise ValueError(f"{self.yhat} depends on (X, Y) beyond (X1, Y1): I = {leak:.3g}")

    def with_joint(self, joint: JointPMF) -> "SingleRelayInstance":
        return SingleRelayInstance(joint, self.x, self.x1, self.y, self.y1, self.yhat)


def daf_rate(inst: SingleRelayInstance) -> float:
    j, s = inst.joint, inst
    return min(j.I((s.x, s.x1), s.y), j.I(s.x, s.y1, s.x1))


def _eaf_checked(inst):
    inst.check_independent_inputs()
    inst.check_quantizer()
    return inst.joint, inst


def eaf_rate(inst: SingleRelayInstance) -> FeasibleRate:
    j, s = _eaf_checked(inst)
    rate = j.I(s.x, (s.y, s.yhat), s.x1)
    slack = j.I(s.x1, s.y) - j.I(s.y1, s.yhat, (s.x1, s.y))
    return FeasibleRate(rate, slack)


def ts_eaf_q(inst: SingleRelayInstance) -> float:
    j, s = inst.joint, inst
    return ts_ratio(j.I(s.x1, s.y), j.H(s.y1, (s.x1, s.y)))


def ts_eaf_rate(inst: SingleRelayInstance) -> tuple[float, float]:
    inst.check_independent_inputs()
    j, s = inst.joint, inst
    q = ts_eaf_q(inst)
    return j.I(s.x, s.y, s.x1) + q * j.I(s.x, s.y1, (s.x1, s.y)), q


def taf_rate(inst: SingleRelayInstance) -> tuple[float, float]:
    j, s = _eaf_checked(inst)
    q = ts_ratio(j.I(s.x1, s.y), j.I(s.y1, s.yhat, (s.x1, s.y)))
    return j.I(s.x, s.y, s.x1) + q * j.I(s.x, s.yhat, (s.x1, s.y)), q


def joint_decode_rate(inst: SingleRelayInstance) -> FeasibleRate:
    j, s = _eaf_checked(inst)
    link = j.I(s.x1, s.y)
    cost = j.I(s.yhat, s.y1, (s.x, s.x1, s.y))
    gain = j.I(s.x, s.yhat, (s.x1, s.y))
    return FeasibleRate(j.I(s.x, s.y, s.x1) + min(link - cost, gain), link - cost)


def q_opt(inst: SingleRelayInstance) -> float:
    j, s = _eaf_checked(inst)
    return ts_ratio(j.I(s.x1, s.y), j.I(s.yhat, s.y1, (s.x1, s.y)))


def extended_chain_rate(inst: SingleRelayInstance, q: float) -> FeasibleRate:
    """EAF with a second time-sharing stage applied to an existing quantizer.

    Closed form of the rate and constraint obtained when the relay forwards
    its quantized symbol with probability q and erases it otherwise.
    """
    j, s = _eaf_checked(inst)
    rate = j.I(s.x, s.y, s.x1) + q * j.I(s.x, s.yhat, (s.x1, s.y))
    slack = j.I(s.x1, s.y) - q * j.I(s.y1, s.yhat, (s.x1, s.y))
    return FeasibleRate(rate, slack)


def joint_decode_equivalent_q(inst: SingleRelayInstance) -> tuple[float, bool]:
    """q for the two-stage chain that attains the joint-decoding rate.

    Inside the band where joint decoding helps, choosing
    q = (I(X1;Y) - I(Yh;Y1|X,X1,Y)) / I(X;Yh|X1,Y) makes the extended chain
    reproduce the joint-decoding rate. The flag is True when I(X;Yh|X1,Y) = 0,
    in which case no such q is defined and 1 is returned.
    """
    j, s = _eaf_checked(inst)
    gain = j.I(s.x, s.yhat, (s.x1, s.y))
    if gain <= 0:
        return 1.0, True
    val = (j.I(s.x1, s.y) - j.I(s.yhat, s.y1, (s.x, s.x1, s.y))) / gain
    return min(max(val, 0.0), 1.0), False


def ts_joint(inst: SingleRelayInstance, q: float, source=None, new=None) -> SingleRelayInstance:
    """Instance whose quantizer is the explicit time-sharing copy of ``source``."""
    source = source or inst.y1
    new = new or inst.yhat
    j = apply_ts_mapping(inst.joint, source, q, new)
    return SingleRelayInstance(j, inst.x, inst.x1, inst.y, inst.y1, new)


def evaluate(inst: SingleRelayInstance, strategy: str) -> RateReport:
    """Dispatch used by the CLI and the estimators."""
    strategy = strategy.lower()
    if strategy == "daf":
        return RateReport("daf", daf_rate(inst))
    if strategy == "ts-eaf":
        r, q = ts_eaf_rate(inst)
        return RateReport("ts-eaf", r, params={"q": q})
    if strategy == "eaf":
        fr = eaf_rate(inst)
        return RateReport("eaf", fr.rate, fr.feasible, fr.slack)
    if strategy == "taf":
        r, q = taf_rate(inst)
        _, degenerate = joint_decode_equivalent_q(inst)
        return RateReport("taf", r, params={"q": q}, meta={"degenerate_q": degenerate})
    if strategy == "joint-decode":
        fr = joint_decode_rate(inst)
        q, degenerate = joint_decode_equivalent_q(inst)
        return RateReport("joint-decode", fr.rate, fr.feasible, fr.slack,
                          params={"q_equivalent": q}, meta={"degenerate_q": degenerate})
    raise ValueError(f"unknown single-relay strategy {strategy!r}")
