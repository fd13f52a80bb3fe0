"""relayrate command line: evaluate, optimise and sweep achievable rates."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib.resources import files
from pathlib import Path

import numpy as np

from . import __version__
from . import broadcast as bc
from . import gaussian_cm as gcm
from . import strategies
from .optimizer import OptimizerCfg
from .probcore import FormatError, load_channel, load_distribution
from .quadrature import QuadratureCfg

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


# ------------------------------------------------------------------ formatting

def fmt(x) -> str:
    return format(float(x), ".9g")


def rounded(obj):
    """Recursively round floats to 9 significant digits for printing."""
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not math.isfinite(x) else float(fmt(x))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(rounded(obj), indent=2, sort_keys=True) + "\n"


def parse_range(text: str, name: str) -> list[float]:
    """'a:step:b' (inclusive), 'a,b,c' or a single number."""
    try:
        if ":" in text:
            a, step, b = (float(t) for t in text.split(":"))
            if step <= 0:
                raise UsageError(f"--{name}: step must be positive")
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            if n <= 0:
                raise UsageError(f"--{name}: empty range {text!r}")
            return [round(a + k * step, 12) for k in range(n)]
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--{name}: cannot parse {text!r}") from None
    if not vals:
        raise UsageError(f"--{name}: empty range")
    return vals


def resolve(path: str) -> Path:
    """A path on disk, else a bundled fixture of that name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = files("relayrate") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise FormatError(f"{path}: no such file")


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def n_workers(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("RELAYRATE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise UsageError("RELAYRATE_THREADS must be an integer") from None


@dataclass
class RunManifest:
    command: list
    inputs: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)
    seed: int | None = None
    version: str = __version__
    wall_clock_s: float = 0.0
    timestamp: str = ""
    outputs: dict = field(default_factory=dict)

    def write(self, out_path):
        self.outputs = {str(out_path): sha256(out_path)} | self.outputs
        Path(f"{out_path}.manifest.json").write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def emit(text: str, out, manifest: RunManifest, t0):
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    manifest.wall_clock_s = round(time.time() - t0, 3)
    manifest.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    manifest.write(out)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (fmt(v) if isinstance(v, (float, np.floating)) else v) for v in r])
    return buf.getvalue()


def _manifest(args, inputs=()):
    skip = {"func", "out", "out_csv", "out_json"}
    over = {k: v for k, v in vars(args).items() if k not in skip}
    return RunManifest(command=["relayrate"] + sys.argv[1:],
                       inputs={str(p): sha256(p) for p in inputs},
                       overrides=over, seed=getattr(args, "seed", None))


# ------------------------------------------------------------------ subcommands

def cmd_eval(args):
    t0 = time.time()
    ch_path = resolve(args.channel)
    channel = load_channel(ch_path)
    inputs = [ch_path]
    dist = None
    if args.dist and args.dist != "uniform":
        d = resolve(args.dist)
        dist = load_distribution(d)
        inputs.append(d)
    quant = None
    if args.quantizer:
        qp = resolve(args.quantizer)
        quant = load_channel(qp)
        inputs.append(qp)
    rep = strategies.evaluate(channel, args.strategy, dist, quant)
    emit(dumps(rep.to_dict()), args.out, _manifest(args, inputs), t0)
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_optimize(args):
    t0 = time.time()
    ch_path = resolve(args.channel)
    channel = load_channel(ch_path)
    cfg = OptimizerCfg(restarts=args.restarts, seed=args.seed, max_iters=args.max_iters,
                       n_jobs=n_workers(args))
    rep, res = strategies.optimize(channel, args.strategy, cfg)
    out = rep.to_dict()
    out["optimization"] = res.to_dict()
    emit(dumps(out), args.out, _manifest(args, [ch_path]), t0)
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def _gauss_base(args):
    return gcm.GaussianCMParams(P=args.P, sigma2=args.sigma2, sigma1_2=args.sigma1_2,
                                gain_convention=args.gain_convention)


def _sweep_cell(job):
    p, strategy, cfg = job
    return gcm.evaluate_strategy(p, strategy, cfg)


def cmd_gaussian_sweep(args):
    t0 = time.time()
    gs = parse_range(args.g, "g")
    cs = parse_range(args.C, "C")
    base = _gauss_base(args)
    cfg = QuadratureCfg(abs_tol=args.abs_tol)
    jobs = [(base.with_(g=g, C=c), args.strategy, cfg) for c in cs for g in gs]
    workers = n_workers(args)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_cell, jobs))
    else:
        results = [_sweep_cell(j) for j in jobs]
    rows, infeasible = [], False
    for (p, _, _), r in zip(jobs, results):
        params = list(r.params.values()) + [None, None]
        rows.append([p.g, p.C, r.strategy, r.rate, params[0], params[1], r.slack])
        infeasible |= not r.feasible
    text = csv_text(["g", "C", "strategy", "rate", "param1", "param2", "feasible_slack"], rows)
    emit(text, args.out, _manifest(args), t0)
    return EXIT_INFEASIBLE if infeasible else EXIT_OK


def cmd_region_map(args):
    t0 = time.time()
    gs = parse_range(args.g, "g")
    cs = parse_range(args.C, "C")
    base = _gauss_base(args)
    cfg = QuadratureCfg(abs_tol=args.abs_tol)
    workers = n_workers(args)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rmap = gcm.strategy_region_map(gs, cs, base, cfg, executor=ex)
    else:
        rmap = gcm.strategy_region_map(gs, cs, base, cfg)
    rows = []
    for i, c in enumerate(rmap.C):
        for k, g in enumerate(rmap.g):
            rows.append([float(g), float(c), rmap.labels[i, k]]
                        + [float(rmap.rates[lab][i, k]) for lab in gcm.REGION_LABELS])
    text = csv_text(["g", "C", "label"] + list(gcm.REGION_LABELS), rows)
    man = _manifest(args)
    if args.out_json:
        emit(dumps(rmap.to_dict()), args.out_json, man, t0)
    emit(text, args.out_csv, _manifest(args), t0)
    return EXIT_OK


def cmd_bc_sweep(args):
    t0 = time.time()
    cs = parse_range(args.C, "C")
    inputs = []
    if args.bc:
        path = resolve(args.bc)
        inst, _, _ = bc.load_bc(path)
        joint = inst.joint
        names = (inst.x, inst.y1, inst.y2)
        inputs.append(path)
    else:
        px = [float(t) for t in args.px.split(",")] if args.px else [0.5, 0.5]
        joint = bc.symmetric_bsc_joint(args.bsc, px)
        names = ("X", "Y1", "Y2")
    rows = bc.bc_sweep(joint, cs, args.combine, *names)
    text = csv_text(["C", "upper", "one_step", "single_cycle_ts"],
                    [[r["C"], r["upper"], r["one_step"], r["single_cycle_ts"]] for r in rows])
    emit(text, args.out, _manifest(args, inputs), t0)
    return EXIT_OK


def cmd_validate(args):
    status = EXIT_OK
    for name in args.files:
        try:
            path = resolve(name)
            obj = json.loads(Path(path).read_text())
            if "inputs" in obj:
                ch = load_channel(path)
                msg = f"channel {ch!r}"
                if obj.get("renormalize"):
                    raw = np.asarray(obj["probs"], dtype=float).reshape(ch.cond_probs.shape)
                    k = len(ch.inputs)
                    dev = np.abs(raw.reshape(int(np.prod(raw.shape[:k])), -1).sum(axis=1) - 1).max()
                    msg += f"; slices renormalised (max deviation {dev:.3g})"
                try:
                    strategies.roles(ch)
                except ValueError as e:
                    msg += f"; note: {e}"
            elif "marginals" in obj:
                msg = "distribution " + ", ".join(repr(m) for m in load_distribution(path))
            else:
                inst, y1, y2 = bc.load_bc(path) if "parents" in obj else (None, (), ())
                if inst is not None:
                    bc.check_factorization(inst, y1, y2)
                    msg = f"broadcast joint with chains {list(y1)} / {list(y2)}"
                else:
                    msg = f"joint {load_distribution(path)[0]!r}"
            print(f"{name}: ok: {msg}")
        except json.JSONDecodeError as e:
            print(f"{name}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", file=sys.stderr)
            status = EXIT_INPUT
        except (FormatError, ValueError, KeyError) as e:
            print(f"{name}: {e}", file=sys.stderr)
            status = EXIT_INPUT
    return status


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="relayrate", description=__doc__)
    ap.add_argument("--version", action="version", version=f"relayrate {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="rate of a strategy at a fixed input distribution")
    e.add_argument("--channel", required=True)
    e.add_argument("--strategy", required=True, choices=strategies.DISCRETE_STRATEGIES)
    e.add_argument("--dist", default="uniform", help="distribution JSON or 'uniform'")
    e.add_argument("--quantizer", help="channel JSON p(yh|x1,y1) for eaf/taf/joint-decode")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    o = sub.add_parser("optimize", help="maximise a strategy's rate over input distributions")
    o.add_argument("--channel", required=True)
    o.add_argument("--strategy", required=True, choices=("ptp", "daf", "ts-eaf", "ts-eaf-ordered"))
    o.add_argument("--restarts", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--max-iters", type=int, default=2000)
    o.add_argument("--threads", type=int)
    o.add_argument("--out")
    o.set_defaults(func=cmd_optimize)

    def gauss_opts(p):
        p.add_argument("--P", type=float, default=1.0)
        p.add_argument("--sigma2", type=float, default=1.0)
        p.add_argument("--sigma1-2", dest="sigma1_2", type=float, default=1.0)
        p.add_argument("--gain-convention", choices=("amplitude", "power"), default="amplitude")
        p.add_argument("--abs-tol", type=float, default=1e-9)
        p.add_argument("--threads", type=int)

    g = sub.add_parser("gaussian-sweep", aliases=["sweep"], help="Gaussian relay rates over g and C")
    g.add_argument("--strategy", required=True, choices=gcm.STRATEGIES)
    g.add_argument("--g", required=True, help="value, list a,b,c or range start:step:stop")
    g.add_argument("--C", required=True)
    gauss_opts(g)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gaussian_sweep)

    r = sub.add_parser("region-map", help="best of DAF, TS-DHD, GQ-EAF on a (g, C) grid")
    r.add_argument("--g", default="0.2:0.2:2")
    r.add_argument("--C", default="0.2:0.2:2")
    gauss_opts(r)
    r.add_argument("--out-csv", "--out", dest="out_csv")
    r.add_argument("--out-json")
    r.set_defaults(func=cmd_region_map)

    b = sub.add_parser("bc-sweep", help="broadcast rates against conference capacity")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--bc", help="joint JSON over X, Y1, Y2")
    src.add_argument("--bsc", type=float, help="symmetric family: crossover probability")
    b.add_argument("--px", help="input pmf for --bsc, comma separated")
    b.add_argument("--C", required=True)
    b.add_argument("--combine", choices=("min", "max"), default="min")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bc_sweep)

    v = sub.add_parser("validate", help="lint channel, distribution and broadcast files")
    v.add_argument("files", nargs="+")
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"relayrate: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (FormatError, ValueError, KeyError) as e:
        print(f"relayrate: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
