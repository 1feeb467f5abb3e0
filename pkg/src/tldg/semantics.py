"""Path payoffs and Monte-Carlo estimation of profile values.

A play's payoff weights the k-th upper state it visits (k = 1, 2, ...) by
``(1 - beta)**(k - 1) * beta``.  Lower states contribute nothing and do not
advance the discount, so a constant reward ``r`` yields payoff ``r``.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from tldg.evaluation import chain_rows, reaches_upper
from tldg.game import Level, TwoLevelGame

MAX_STEPS_PER_SAMPLE = 10**6
_UNIT_BITS = 53
_MASK64 = (1 << 64) - 1


class NotAPath(ValueError):
    pass


class InsufficientUpperVisits(ValueError):
    pass


def path_payoff(game: TwoLevelGame, path, upper_horizon) -> Fraction:
    """Exact payoff of the first ``upper_horizon`` upper visits along ``path``.

    ``path`` is a sequence of state names or indices.
    """
    idx = [game.index(s) if isinstance(s, str) else s for s in path]
    for a, b in zip(idx, idx[1:]):
        if b not in game.succ[a]:
            raise NotAPath(f"{game.names[a]} -> {game.names[b]} is not an edge")
    beta = game.discount
    total = Fraction(0)
    weight = beta
    seen = 0
    for s in idx:
        if seen == upper_horizon:
            break
        if game.levels[s] is Level.UPPER:
            total += weight * game.rewards[s]
            weight *= 1 - beta
            seen += 1
    if seen < upper_horizon:
        raise InsufficientUpperVisits(f"path visits {seen} upper states, {upper_horizon} needed")
    return total


@dataclass(frozen=True)
class SimulationReport:
    estimate: float
    standard_error: float
    samples: int
    truncation_horizon: int
    seed: int
    truncation_bound: float
    # samples stopped by the raw step cap before reaching the horizon
    truncated: int = 0

    @property
    def truncated_flag(self):
        return self.truncated > 0


class _Chain:
    """Pure-numpy transition tables for the chain a profile induces."""

    def __init__(self, game, profile):
        rows = chain_rows(game, profile)
        width = max(len(r) for r in rows)
        one = 1 << _UNIT_BITS
        self.targets = np.zeros((game.n, width), dtype=np.int64)
        # successor j is taken when the 53-bit draw m satisfies thr[j-1] <= m < thr[j]
        self.thresholds = np.full((game.n, width), one, dtype=np.uint64)
        for s, row in enumerate(rows):
            cum = Fraction(0)
            for j, (t, p) in enumerate(row):
                cum += p
                self.targets[s, j] = t
                self.thresholds[s, j] = math.ceil(cum * one)
            self.targets[s, len(row):] = row[-1][0]
        self.width = width
        self.upper = np.array([game.levels[s] is Level.UPPER for s in range(game.n)])
        self.reward = np.array([float(r) if r is not None else 0.0 for r in game.rewards])
        live = reaches_upper(game, rows)
        self.dead = np.array([s not in live for s in range(game.n)])
        self.beta = float(game.discount)


def _draws(seed, step, start, count):
    # sample i, step k: first output of Philox block i under key (seed, k)
    gen = np.random.Philox(key=[seed & _MASK64, step], counter=[start, 0, 0, 0])
    return gen.random_raw(4 * count)[::4] >> np.uint64(64 - _UNIT_BITS)


def _simulate_chunk(chain, start_state, seed, first, count, horizon, max_steps):
    pos = np.full(count, start_state, dtype=np.int64)
    payoff = np.zeros(count)
    weight = np.full(count, chain.beta)
    visits = np.zeros(count, dtype=np.int64)
    active = np.ones(count, dtype=bool)
    truncated = 0
    step = 0
    while True:
        hit = active & chain.upper[pos]
        payoff[hit] += weight[hit] * chain.reward[pos[hit]]
        weight[hit] *= 1.0 - chain.beta
        visits[hit] += 1
        active &= visits < horizon
        active &= ~chain.dead[pos]
        if not active.any():
            break
        if step >= max_steps:
            truncated = int(active.sum())
            break
        m = _draws(seed, step, first, count)
        thr = chain.thresholds[pos]
        j = (m[:, None] >= thr).sum(axis=1)
        j = np.minimum(j, chain.width - 1)
        nxt = chain.targets[pos, j]
        pos = np.where(active, nxt, pos)
        step += 1
    return payoff, truncated


def simulate_value(
    game: TwoLevelGame,
    profile,
    start,
    samples,
    upper_horizon,
    seed,
    n_jobs=1,
    max_steps=MAX_STEPS_PER_SAMPLE,
) -> SimulationReport:
    """Monte-Carlo estimate of the profile value at ``start``.

    Each sample is truncated after ``upper_horizon`` upper visits.  Sample
    ``i`` draws its k-th variate from a Philox stream keyed by ``(seed, k)``
    at counter ``i``, so results do not depend on ``n_jobs``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if upper_horizon < 0:
        raise ValueError("upper_horizon must be nonnegative")
    s0 = game.index(start) if isinstance(start, str) else start
    chain = _Chain(game, profile)
    bounds = np.linspace(0, samples, max(1, min(n_jobs, samples)) + 1).astype(int)
    jobs = [(chain, s0, seed, int(a), int(b - a), upper_horizon, max_steps) for a, b in zip(bounds, bounds[1:])]
    if len(jobs) == 1:
        parts = [_simulate_chunk(*jobs[0])]
    else:
        with ProcessPoolExecutor(len(jobs)) as pool:
            parts = list(pool.map(_simulate_chunk, *zip(*jobs)))
    payoff = np.concatenate([p for p, _ in parts])
    truncated = sum(t for _, t in parts)
    se = float(payoff.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    bound = float((1 - game.discount) ** upper_horizon * game.max_reward)
    return SimulationReport(
        estimate=float(payoff.mean()),
        standard_error=se,
        samples=samples,
        truncation_horizon=upper_horizon,
        seed=seed,
        truncation_bound=bound,
        truncated=truncated,
    )
