"""scikit-learn style wrapper around the input-distribution optimizer."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import strategies
from .optimizer import OptimizerCfg
from .probcore import ChannelSpec, JointPMF


def check_channel(channel) -> ChannelSpec:
    if not isinstance(channel, ChannelSpec):
        raise TypeError(f"expected a ChannelSpec, got {type(channel).__name__}")
    strategies.roles(channel)
    return channel


class RelayRateEstimator(BaseEstimator):
    """Fits the rate-maximising input distribution of a relay channel.

    ``fit`` runs the random-restart search; ``score`` evaluates the fitted
    distribution on a (possibly different) channel with the same alphabets.
    """

    def __init__(self, strategy="ts-eaf", restarts=50, seed=0, max_iters=2000, n_jobs=None):
        self.strategy = strategy
        self.restarts = restarts
        self.seed = seed
        self.max_iters = max_iters
        self.n_jobs = n_jobs

    def fit(self, channel, y=None):
        channel = check_channel(channel)
        cfg = OptimizerCfg(restarts=self.restarts, seed=self.seed, max_iters=self.max_iters,
                           n_jobs=self.n_jobs)
        report, result = strategies.optimize(channel, self.strategy, cfg)
        self.report_ = report
        self.result_ = result
        self.rate_ = report.rate
        self.inputs_ = [v for v in channel.inputs]
        self.distribution_ = self._as_dist(result.best)
        return self

    def _as_dist(self, best):
        if self.strategy == "daf":
            return [JointPMF(self.inputs_, best[0], tol=1e-9)]
        if self.strategy == "ptp":
            return None
        return [JointPMF([v], p) for v, p in zip(self.inputs_, best)]

    def _check_fitted(self):
        if not hasattr(self, "rate_"):
            raise NotFittedError("call fit before using this estimator")

    def score(self, channel, y=None):
        self._check_fitted()
        channel = check_channel(channel)
        if [(v.name, v.size) for v in channel.inputs] != [(v.name, v.size) for v in self.inputs_]:
            raise ValueError("channel inputs differ from the fitted channel")
        return strategies.evaluate(channel, self.strategy, self.distribution_).rate

    def get_distribution(self):
        self._check_fitted()
        return self.distribution_


__all__ = ["RelayRateEstimator", "check_channel"]
