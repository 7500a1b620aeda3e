"""Sampling analogues of the zero-one laws for coin-flip sequences.

This is the only place floating point enters.  Each window of ``N`` flips
is summarized by its number of heads, drawn directly from the binomial
distribution (the same law as summing ``N`` Bernoulli flips); the
``flips`` sampler draws every flip instead and serves as a cross-check.  The
statistic ``mean ≥ θ`` is decided in integers as ``heads·den(θ) ≥
num(θ)·N``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..kernel.core import MarkovError


class InvalidConfig(MarkovError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class MonteCarloConfig:
    biases: tuple
    theta: Fraction
    N: int
    samples: int
    seed: int = 0
    shards: int = 1
    weights: tuple = ()
    sampler: str = "binomial"

    def __post_init__(self):
        object.__setattr__(self, "biases", tuple(_frac(b) for b in self.biases))
        object.__setattr__(self, "theta", _frac(self.theta))
        weights = tuple(_frac(w) for w in self.weights)
        if not weights and self.biases:
            weights = (Fraction(1, len(self.biases)),) * len(self.biases)
        object.__setattr__(self, "weights", weights)
        if not self.biases:
            raise InvalidConfig("need at least one bias")
        if any(not 0 <= b <= 1 for b in self.biases + (self.theta,)):
            raise InvalidConfig("probabilities and θ must lie in [0, 1]")
        if len(self.weights) != len(self.biases) or any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            raise InvalidConfig("mixture weights must be nonnegative, one per bias, summing to 1")
        if self.N < 1 or self.samples < 1 or self.shards < 1:
            raise InvalidConfig("N, samples and shards must be ≥ 1")
        if self.sampler not in ("binomial", "flips"):
            raise InvalidConfig("sampler is 'binomial' or 'flips'")

    def to_dict(self) -> dict:
        return {
            "biases": [str(b) for b in self.biases],
            "weights": [str(w) for w in self.weights],
            "theta": str(self.theta),
            "N": self.N,
            "samples": self.samples,
            "seed": self.seed,
            "shards": self.shards,
            "sampler": self.sampler,
        }


@dataclass(frozen=True)
class MonteCarloResult:
    positives: int
    samples: int
    config: MonteCarloConfig
    per_shard: tuple
    oracle: dict = field(default_factory=dict)

    @property
    def probability(self) -> float:
        return self.positives / self.samples

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "positives": self.positives,
            "samples": self.samples,
            "per_shard": list(self.per_shard),
            "config": self.config.to_dict(),
            "oracle": self.oracle,
        }


def _shard_sizes(samples: int, shards: int) -> list[int]:
    base, extra = divmod(samples, shards)
    return [base + (i < extra) for i in range(shards)]


def _run_shard(cfg: MonteCarloConfig, rng: np.random.Generator, n: int) -> int:
    if n == 0:
        return 0
    if len(cfg.biases) == 1:
        q = np.full(n, float(cfg.biases[0]))
    else:
        branch = rng.choice(len(cfg.biases), size=n, p=[float(w) for w in cfg.weights])
        q = np.array([float(b) for b in cfg.biases])[branch]
    if cfg.sampler == "binomial":
        heads = rng.binomial(cfg.N, q)
    else:
        heads = np.zeros(n, dtype=np.int64)
        for start in range(0, cfg.N, 1024):
            width = min(1024, cfg.N - start)
            heads += (rng.random((n, width)) < q[:, None]).sum(axis=1)
    th = cfg.theta
    return int(np.count_nonzero(heads.astype(object) * th.denominator >= th.numerator * cfg.N))


def _simulate(cfg: MonteCarloConfig, parallel: bool) -> tuple[int, tuple]:
    streams = [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.shards)]
    sizes = _shard_sizes(cfg.samples, cfg.shards)
    jobs = list(zip(streams, sizes))
    if parallel and cfg.shards > 1:
        with ThreadPoolExecutor(max_workers=cfg.shards) as pool:
            counts = list(pool.map(lambda j: _run_shard(cfg, *j), jobs))
    else:
        counts = [_run_shard(cfg, *j) for j in jobs]
    return sum(counts), tuple(counts)


def hoeffding_bound(q: Fraction, theta: Fraction, N: int) -> float:
    """Upper bound on the probability that the mean of ``N`` flips lands on
    the far side of ``θ`` from ``q``."""
    return math.exp(-2 * N * float(theta - q) ** 2)


def simulate_kolmogorov_demo(cfg: MonteCarloConfig, parallel: bool = False) -> MonteCarloResult:
    """Fraction of i.i.d. Bernoulli(q) windows whose mean is at least θ."""
    if len(cfg.biases) != 1:
        raise InvalidConfig("the Kolmogorov demo takes a single bias")
    positives, per = _simulate(cfg, parallel)
    q = cfg.biases[0]
    bound = hoeffding_bound(q, cfg.theta, cfg.N)
    expect = "≤" if q < cfg.theta else "≥"
    oracle = {"hoeffding": bound, "limit": 0 if q < cfg.theta else 1,
              "claim": f"P {expect} {bound if q < cfg.theta else 1 - bound:.3g}"}
    return MonteCarloResult(positives, cfg.samples, cfg, per, oracle)


def simulate_hs_negative_control(cfg: MonteCarloConfig, parallel: bool = False) -> MonteCarloResult:
    """Same statistic on exchangeable but dependent windows: the bias is drawn
    once per window from the mixture, then the flips are i.i.d. given it."""
    positives, per = _simulate(cfg, parallel)
    # each branch settles on its own side of θ, so the limit is the weight above θ
    above = sum((w for b, w in zip(cfg.biases, cfg.weights) if b > cfg.theta), Fraction(0))
    ties = [b for b in cfg.biases if b == cfg.theta]
    oracle = {"limit": str(above) if not ties else None,
              "branch_bounds": [hoeffding_bound(b, cfg.theta, cfg.N) for b in cfg.biases]}
    return MonteCarloResult(positives, cfg.samples, cfg, per, oracle)
