"""Freezing the lower level: first-hit distributions and one-step games."""

from dataclasses import dataclass
from fractions import Fraction

from tldg.errors import GameError, InternalInconsistency
from tldg.evaluation import chain_rows, reaches_upper
from tldg.game import Level, Owner, TwoLevelGame
from tldg.linalg import SingularSystem, solve


class EscapeMassNonzero(GameError):
    def __init__(self, states):
        self.states = tuple(states)
        super().__init__("profile leaves the lower level with probability < 1 from " + ", ".join(self.states))


@dataclass(frozen=True)
class HitDistribution:
    """Per lower state: probability of each upper state being the first one hit.

    ``hits[s]`` maps upper state index to probability (support only);
    ``escape[s]`` is the probability of never reaching the upper level.
    """

    hits: dict
    escape: dict

    def total(self, s):
        return sum(self.hits[s].values(), Fraction(0)) + self.escape[s]


def hit_distribution(game: TwoLevelGame, profile) -> HitDistribution:
    rows = chain_rows(game, profile)
    can_reach = reaches_upper(game, rows)
    lower = [s for s in game.lower_states if s in can_reach]
    upper = game.upper_states
    col = {s: i for i, s in enumerate(lower)}
    a = []
    b = []
    for s in lower:
        coef = [Fraction(0)] * len(lower)
        coef[col[s]] += 1
        direct = [Fraction(0)] * len(upper)
        for t, p in rows[s]:
            if t in col:
                coef[col[t]] -= p
            elif game.levels[t] is Level.UPPER:
                direct[upper.index(t)] += p
        a.append(coef)
        b.append(direct)
    try:
        x = solve(a, b) if lower else []
    except SingularSystem as exc:
        raise InternalInconsistency(f"hitting-probability system is singular: {exc}") from exc

    hits, escape = {}, {}
    for s in game.lower_states:
        if s in col:
            row = x[col[s]]
            hits[s] = {u: p for u, p in zip(upper, row) if p != 0}
        else:
            hits[s] = {}
        escape[s] = 1 - sum(hits[s].values(), Fraction(0))
    return HitDistribution(hits, escape)


def freeze_lower(game: TwoLevelGame, profile) -> TwoLevelGame:
    """One-step game: every lower state becomes a chance state over upper states.

    The chance row of a lower state is its first-hit distribution under
    ``profile``.  Upper states are untouched.
    """
    hd = hit_distribution(game, profile)
    leaking = [game.names[s] for s in game.lower_states if hd.escape[s] != 0]
    if leaking:
        raise EscapeMassNonzero(leaking)
    owners = list(game.owners)
    succ = list(game.succ)
    dists = list(game.dists)
    for s in game.lower_states:
        row = tuple(sorted(hd.hits[s].items()))
        owners[s] = Owner.CHANCE
        succ[s] = tuple(t for t, _ in row)
        dists[s] = row
    return TwoLevelGame(
        names=game.names,
        owners=tuple(owners),
        levels=game.levels,
        succ=tuple(succ),
        dists=tuple(dists),
        rewards=game.rewards,
        discount=game.discount,
    )


def is_one_step(game: TwoLevelGame) -> bool:
    return all(
        game.owners[s] is Owner.CHANCE and all(game.is_upper(t) for t in game.succ[s])
        for s in game.lower_states
    )
