"""Random-restart Nelder-Mead over softmax-parametrised input distributions."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

LOGIT_CLIP = 40.0


@dataclass
class OptimizerCfg:
    restarts: int = 50
    seed: int = 0
    max_iters: int = 2000
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    init_scale: float = 2.0
    n_jobs: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass
class RestartResult:
    index: int
    value: float
    best: list
    iterations: int
    evaluations: int


@dataclass
class OptimizationResult:
    best: list
    value: float
    trace: list            # best-so-far after each restart
    restarts: list = field(default_factory=list)

    @property
    def argmax_restart(self) -> int:
        return max(self.restarts, key=lambda r: (r.value, -r.index)).index

    def to_dict(self):
        return {"value": self.value, "best": [np.asarray(b).tolist() for b in self.best],
                "trace": list(self.trace),
                "restarts": [{"index": r.index, "value": r.value, "iterations": r.iterations,
                              "evaluations": r.evaluations,
                              "argmax": [np.asarray(b).tolist() for b in r.best]}
                             for r in self.restarts]}


def softmax_blocks(z, sizes):
    """Map free logits (n-1 per block, reference logit 0) to a list of pmfs."""
    out, k = [], 0
    for n in sizes:
        logits = np.zeros(n)
        logits[:n - 1] = np.clip(z[k:k + n - 1], -LOGIT_CLIP, LOGIT_CLIP)
        k += n - 1
        e = np.exp(logits - logits.max())
        out.append(e / e.sum())
    return out


def _n_workers(cfg):
    if cfg.n_jobs is not None:
        return max(1, int(cfg.n_jobs))
    env = os.environ.get("RELAYRATE_THREADS")
    return max(1, int(env)) if env else 1


def _run_restart(rate_fn, sizes, cfg, r):
    dim = sum(n - 1 for n in sizes)
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, r)))
    z0 = rng.normal(scale=cfg.init_scale, size=dim)

    def neg(z):
        ps = softmax_blocks(z, sizes)
        try:
            return -float(rate_fn(ps))
        except Exception as e:
            raise RuntimeError(f"rate function failed in restart {r}: {e}") from e

    if dim == 0:
        v = -neg(z0)
        return RestartResult(r, v, softmax_blocks(z0, sizes), 0, 1)
    res = minimize(neg, z0, method="Nelder-Mead",
                   options={"maxiter": cfg.max_iters, "xatol": cfg.x_tol, "fatol": cfg.f_tol,
                            "adaptive": dim > 4})
    return RestartResult(r, -float(res.fun), softmax_blocks(res.x, sizes), int(res.nit), int(res.nfev))


def maximize_product(rate_fn, alphabet_sizes, cfg: OptimizerCfg | None = None) -> OptimizationResult:
    """Maximise rate_fn(list of marginals) over products of pmfs."""
    cfg = cfg or OptimizerCfg()
    sizes = [int(n) for n in alphabet_sizes]
    if any(n < 1 for n in sizes):
        raise ValueError("alphabet sizes must be positive")
    workers = _n_workers(cfg)
    if workers == 1:
        results = [_run_restart(rate_fn, sizes, cfg, r) for r in range(cfg.restarts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda r: _run_restart(rate_fn, sizes, cfg, r), range(cfg.restarts)))
    trace, best = [], None
    for res in results:
        if best is None or res.value > best.value:
            best = res
        trace.append(best.value)
    return OptimizationResult(best.best, best.value, trace, results)


def maximize_joint(rate_fn, total_size: int, cfg: OptimizerCfg | None = None) -> OptimizationResult:
    """Single softmax block of ``total_size`` entries; rate_fn receives a flat pmf."""
    res = maximize_product(lambda ps: rate_fn(ps[0]), [total_size], cfg)
    return res


def cfg_dict(cfg: OptimizerCfg) -> dict:
    return asdict(cfg)
