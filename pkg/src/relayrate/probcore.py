"""Finite-alphabet probability algebra: joint pmfs, channels, entropies in bits."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
MARGINAL_TOL = 1e-9
MI_CLAMP = 1e-12


class FormatError(ValueError):
    """Malformed distribution or channel description."""


@dataclass(frozen=True)
class Var:
    name: str
    size: int


def _names(vars_) -> tuple[str, ...]:
    if isinstance(vars_, str):
        return (vars_,)
    return tuple(vars_)


class JointPMF:
    """Dense probability tensor with one named axis per variable.

    Instances are immutable. Joint entropies of variable subsets are memoised,
    so repeated information queries on the same joint are cheap.
    """

    __slots__ = ("vars", "probs", "_axis", "_hcache")

    def __init__(self, vars_: Sequence[Var | tuple], probs, *, tol=NORM_TOL):
        vs = tuple(v if isinstance(v, Var) else Var(str(v[0]), int(v[1])) for v in vars_)
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        p = np.array(probs, dtype=float)
        shape = tuple(v.size for v in vs)
        if p.size != int(np.prod(shape, dtype=int)):
            raise ValueError(f"tensor has {p.size} entries, variables need shape {shape}")
        p = p.reshape(shape)
        if any(v.size < 1 for v in vs):
            raise ValueError("alphabet sizes must be positive")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and nonnegative")
        total = p.sum()
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        self.vars = vs
        self.probs = p
        self._axis = {v.name: i for i, v in enumerate(vs)}
        self._hcache: dict[frozenset, float] = {}

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    def size(self, name: str) -> int:
        return self.vars[self.axis(name)].size

    def axis(self, name: str) -> int:
        try:
            return self._axis[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}; have {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self._axis

    def __repr__(self):
        body = ", ".join(f"{v.name}:{v.size}" for v in self.vars)
        return f"JointPMF({body})"

    def joint_entropy(self, names: Iterable[str]) -> float:
        key = frozenset(names)
        h = self._hcache.get(key)
        if h is None:
            axes = tuple(i for i, v in enumerate(self.vars) if v.name not in key)
            for n in key:
                self.axis(n)
            m = self.probs.sum(axis=axes) if axes else self.probs
            m = m[m > 0]
            h = float(-np.sum(m * np.log2(m)))
            self._hcache[key] = h
        return h

    # shorthands used throughout the rate code
    def H(self, vars_, given=()):
        return entropy(self, vars_, given)

    def I(self, a, b, given=()):
        return mutual_information(self, a, b, given)


class ChannelSpec:
    """Conditional pmf p(outputs | inputs) stored as a dense tensor.

    Axes are the input variables followed by the output variables.
    """

    def __init__(self, inputs: Sequence[Var | tuple], outputs: Sequence[Var | tuple], cond_probs,
                 *, tol=NORM_TOL):
        ins = tuple(v if isinstance(v, Var) else Var(str(v[0]), int(v[1])) for v in inputs)
        outs = tuple(v if isinstance(v, Var) else Var(str(v[0]), int(v[1])) for v in outputs)
        names = [v.name for v in ins + outs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        shape = tuple(v.size for v in ins + outs)
        w = np.array(cond_probs, dtype=float)
        if w.size != int(np.prod(shape, dtype=int)):
            raise ValueError(f"tensor has {w.size} entries, variables need shape {shape}")
        w = w.reshape(shape)
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("conditional probabilities must be finite and nonnegative")
        sums = w.reshape(int(np.prod(shape[:len(ins)], dtype=int)), -1).sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
        if bad.size:
            idx = np.unravel_index(bad[0], shape[:len(ins)])
            raise ValueError(f"conditional slice at inputs {tuple(int(i) for i in idx)} "
                             f"sums to {sums[bad[0]]!r}")
        w.setflags(write=False)
        self.inputs = ins
        self.outputs = outs
        self.cond_probs = w

    @property
    def input_names(self):
        return tuple(v.name for v in self.inputs)

    @property
    def output_names(self):
        return tuple(v.name for v in self.outputs)

    def __repr__(self):
        i = ", ".join(f"{v.name}:{v.size}" for v in self.inputs)
        o = ", ".join(f"{v.name}:{v.size}" for v in self.outputs)
        return f"ChannelSpec({i} -> {o})"

    def restrict_outputs(self, keep: Sequence[str]) -> "ChannelSpec":
        keep = _names(keep)
        n_in = len(self.inputs)
        onames = self.output_names
        for k in keep:
            if k not in onames:
                raise KeyError(f"unknown output {k!r}")
        drop = tuple(n_in + i for i, n in enumerate(onames) if n not in keep)
        w = self.cond_probs.sum(axis=drop) if drop else self.cond_probs
        kept = [v for v in self.outputs if v.name in keep]
        order = [ [v.name for v in kept].index(k) for k in keep ]
        w = np.moveaxis(w, [n_in + o for o in order], list(range(n_in, n_in + len(keep))))
        return ChannelSpec(self.inputs, [kept[o] for o in order], w, tol=1e-9)


def point_mass(name: str, size: int, symbol: int) -> JointPMF:
    p = np.zeros(size)
    p[symbol] = 1.0
    return JointPMF([Var(name, size)], p)


def uniform(name: str, size: int) -> JointPMF:
    return JointPMF([Var(name, size)], np.full(size, 1.0 / size))


def as_marginal(m, name=None) -> JointPMF:
    """Accept a JointPMF or a (name, probs) pair; normalise within 1e-9."""
    if isinstance(m, JointPMF):
        return m
    if name is None:
        name, m = m
    p = np.asarray(m, dtype=float).ravel()
    s = p.sum()
    if np.any(p < 0) or abs(s - 1.0) > MARGINAL_TOL:
        raise ValueError(f"marginal for {name!r} is not a pmf (sum {s!r})")
    return JointPMF([Var(name, p.size)], p / s)


def build_joint(inputs: Sequence, channel: ChannelSpec) -> JointPMF:
    """Product of independent input pmfs times the channel conditional.

    Each element of ``inputs`` may cover several channel inputs (a joint pmf
    such as p(x, x1, x2)); together they must cover the channel inputs exactly.
    """
    margs = [as_marginal(m) for m in inputs]
    for m in margs:
        if abs(m.probs.sum() - 1.0) > MARGINAL_TOL:
            raise ValueError(f"non-normalised marginal {m!r}")
    covered = [n for m in margs for n in m.names]
    if len(set(covered)) != len(covered):
        raise ValueError(f"input variables given twice: {covered}")
    want = channel.input_names
    if set(covered) != set(want):
        raise ValueError(f"inputs {sorted(covered)} do not match channel inputs {sorted(want)}")
    for m in margs:
        for v in m.vars:
            cv = channel.inputs[want.index(v.name)]
            if cv.size != v.size:
                raise ValueError(f"{v.name}: marginal has {v.size} symbols, channel expects {cv.size}")
    if set(want) & set(channel.output_names):
        raise ValueError("input and output names collide")

    letters = iter("abcdefghijklmnopqrstuvwxyz")
    sym = {n: next(letters) for n in want}
    outsym = "".join(next(letters) for _ in channel.outputs)
    operands, subs = [], []
    for m in margs:
        operands.append(m.probs)
        subs.append("".join(sym[n] for n in m.names))
    insym = "".join(sym[n] for n in want)
    spec = ",".join(subs + [insym + outsym]) + "->" + insym + outsym
    p = np.einsum(spec, *operands, channel.cond_probs)
    return JointPMF(channel.inputs + channel.outputs, p)


def marginalize(j: JointPMF, keep) -> JointPMF:
    keep = _names(keep)
    for k in keep:
        j.axis(k)
    drop = tuple(i for i, v in enumerate(j.vars) if v.name not in keep)
    p = j.probs.sum(axis=drop) if drop else j.probs
    kept = [v for v in j.vars if v.name in keep]
    return JointPMF(kept, p)


def _check_disjoint(*groups):
    seen = set()
    for g in groups:
        if seen & set(g):
            raise ValueError(f"variable sets overlap: {sorted(seen & set(g))}")
        seen |= set(g)


def entropy(j: JointPMF, vars_, given=()) -> float:
    """H(vars | given) in bits."""
    a, c = _names(vars_), _names(given)
    _check_disjoint(a, c)
    if not a:
        return 0.0
    h = j.joint_entropy(a + c) - j.joint_entropy(c)
    return max(h, 0.0)


def mutual_information(j: JointPMF, a, b, given=()) -> float:
    """I(a; b | given) in bits, clamped at zero against rounding."""
    a, b, c = _names(a), _names(b), _names(given)
    _check_disjoint(a, b, c)
    if not a or not b:
        return 0.0
    v = (j.joint_entropy(a + c) + j.joint_entropy(b + c)
         - j.joint_entropy(a + b + c) - j.joint_entropy(c))
    if v < 0:
        if v < -MI_CLAMP:
            raise ArithmeticError(f"negative mutual information {v!r}")
        v = 0.0
    return v


def add_variable(j: JointPMF, name: str, parents, cond) -> JointPMF:
    """Append ``name`` with kernel p(name | parents); shape = parent sizes + (new size,)."""
    parents = _names(parents)
    if name in j:
        raise ValueError(f"variable {name!r} already present")
    cond = np.asarray(cond, dtype=float)
    psizes = tuple(j.size(p) for p in parents)
    if cond.shape[:-1] != psizes:
        raise ValueError(f"kernel shape {cond.shape} does not match parents {psizes}")
    if np.any(cond < 0) or np.any(np.abs(cond.sum(axis=-1) - 1.0) > NORM_TOL):
        raise ValueError("kernel slices must be pmfs")
    letters = "abcdefghijklmnopqrstuvwxyz"
    jsub = letters[:len(j.vars)]
    ksub = "".join(jsub[j.axis(p)] for p in parents) + letters[len(j.vars)]
    p = np.einsum(f"{jsub},{ksub}->{jsub}{letters[len(j.vars)]}", j.probs, cond)
    return JointPMF(j.vars + (Var(name, cond.shape[-1]),), p)


def apply_ts_mapping(j: JointPMF, source_var: str, q: float, new_var: str) -> JointPMF:
    """Forward ``source_var`` with probability q, else the erasure symbol (last index)."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q!r}")
    return add_variable(j, new_var, (source_var,), ts_kernel(j.size(source_var), q))


def ts_kernel(n: int, q: float) -> np.ndarray:
    k = np.zeros((n, n + 1))
    k[np.arange(n), np.arange(n)] = q
    k[:, n] = 1.0 - q
    return k


# ---------------------------------------------------------------- JSON I/O

def _read(src):
    if isinstance(src, dict):
        return src, "<dict>"
    path = Path(src)
    try:
        text = path.read_text()
    except OSError as e:
        raise FormatError(f"{path}: cannot read ({e.strerror})") from None
    try:
        return json.loads(text), str(path)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def _parse_vars(obj, key, where):
    items = obj.get(key)
    if not isinstance(items, list):
        raise FormatError(f"{where}: '{key}' must be a list")
    out = []
    for i, v in enumerate(items):
        if not isinstance(v, dict) or "name" not in v or "size" not in v:
            raise FormatError(f"{where}: {key}[{i}] needs 'name' and 'size'")
        size = v["size"]
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise FormatError(f"{where}: {key}[{i}].size must be a positive integer, got {size!r}")
        out.append(Var(str(v["name"]), size))
    return out


def _parse_probs(obj, where, expected, key="probs"):
    probs = obj.get(key)
    if not isinstance(probs, list):
        raise FormatError(f"{where}: '{key}' must be a flat list of numbers")
    for i, x in enumerate(probs):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise FormatError(f"{where}: {key}[{i}] is not a number: {x!r}")
        if x < 0 or x != x:
            raise FormatError(f"{where}: {key}[{i}] is negative or NaN: {x!r}")
    if len(probs) != expected:
        raise FormatError(f"{where}: '{key}' has {len(probs)} entries, expected {expected}")
    return np.array(probs, dtype=float)


def load_joint(src) -> JointPMF:
    obj, where = _read(src)
    vs = _parse_vars(obj, "vars", where)
    p = _parse_probs(obj, where, int(np.prod([v.size for v in vs], dtype=int)))
    try:
        return JointPMF(vs, p)
    except ValueError as e:
        raise FormatError(f"{where}: {e}") from None


def load_channel(src) -> ChannelSpec:
    """Read a channel; a top-level ``"renormalize": true`` rescales slices rounded in print."""
    obj, where = _read(src)
    ins = _parse_vars(obj, "inputs", where)
    outs = _parse_vars(obj, "outputs", where)
    n = int(np.prod([v.size for v in ins + outs], dtype=int))
    w = _parse_probs(obj, where, n).reshape([v.size for v in ins + outs])
    if obj.get("renormalize", False):
        k = int(np.prod([v.size for v in ins], dtype=int))
        flat = w.reshape(k, -1)
        sums = flat.sum(axis=1)
        worst = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[worst] - 1.0) > 1e-5:
            raise FormatError(f"{where}: slice {worst} sums to {sums[worst]!r}, too far from 1 to renormalise")
        w = (flat / sums[:, None]).reshape(w.shape)
    try:
        return ChannelSpec(ins, outs, w)
    except ValueError as e:
        raise FormatError(f"{where}: {e}") from None


def load_distribution(src) -> list[JointPMF]:
    """Input distribution: either a joint pmf or a ``marginals`` list."""
    obj, where = _read(src)
    if "marginals" in obj:
        out = []
        items = obj["marginals"]
        if not isinstance(items, list):
            raise FormatError(f"{where}: 'marginals' must be a list")
        for i, m in enumerate(items):
            sub = f"{where}: marginals[{i}]"
            if not isinstance(m, dict) or "name" not in m:
                raise FormatError(f"{sub} needs 'name' and 'probs'")
            probs = m.get("probs")
            p = _parse_probs(m, sub, len(probs) if isinstance(probs, list) else -1)
            try:
                out.append(as_marginal((str(m["name"]), p)))
            except ValueError as e:
                raise FormatError(f"{sub}: {e}") from None
        return out
    return [load_joint(obj if where == "<dict>" else src)]


def joint_to_dict(j: JointPMF) -> dict:
    return {"vars": [{"name": v.name, "size": v.size} for v in j.vars],
            "probs": [float(x) for x in j.probs.ravel()]}


def channel_to_dict(ch: ChannelSpec) -> dict:
    return {"inputs": [{"name": v.name, "size": v.size} for v in ch.inputs],
            "outputs": [{"name": v.name, "size": v.size} for v in ch.outputs],
            "probs": [float(x) for x in ch.cond_probs.ravel()]}
