"""Exact solvers: enumeration, best responses, strategy improvement, the MDP LP.

All strategies are pure memoryless and represented as ``{state: successor}``
dicts over state indices.  Ties always go to the lowest successor index.
"""

import itertools
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from tldg.errors import InternalInconsistency, TooLarge
from tldg.evaluation import bellman_apply, lookahead, policy_evaluate
from tldg.game import Level, Owner, PureStrategyProfile, TwoLevelGame, lowest_successor_strategy
from tldg import simplex

ENUMERATION_CAP = 10**7
BEST_RESPONSE_ITERATIONS = 1000


@dataclass
class SolveResult:
    values: tuple
    profile: PureStrategyProfile
    method: str
    iterations: int
    # best-response vector after each outer round (strategy improvement only)
    history: list = field(default_factory=list, repr=False)


@dataclass
class SaddleCertificate:
    profile: PureStrategyProfile
    v_sigma_fixed: tuple
    v_pi_fixed: tuple

    @property
    def valid(self):
        return self.v_sigma_fixed == self.v_pi_fixed


def _improve(game, strategy, values, maximize):
    """Greedy one-step switch; only strict improvements replace the incumbent."""
    better = operator.gt if maximize else operator.lt
    new = dict(strategy)
    changed = False
    for s, current in strategy.items():
        best_t, best_q = None, None
        for t in game.succ[s]:
            q = lookahead(game, s, t, values)
            if best_t is None or better(q, best_q):
                best_t, best_q = t, q
        if better(best_q, lookahead(game, s, current, values)):
            new[s] = best_t
            changed = True
    return new, changed


def _strategies(game, states):
    for choice in itertools.product(*(game.succ[s] for s in states)):
        yield dict(zip(states, choice))


def _envelope(game, candidates, pick):
    """Pointwise ``pick`` over ``(strategy, values)`` pairs plus a strategy attaining it everywhere."""
    candidates = list(candidates)
    env = tuple(pick(vals[s] for _, vals in candidates) for s in range(game.n))
    for strategy, vals in candidates:
        if vals == env:
            return env, strategy
    raise InternalInconsistency("no single pure memoryless strategy attains the envelope")


def _enumerate_p2(game, sigma):
    return _envelope(
        game,
        ((pi, policy_evaluate(game, PureStrategyProfile(sigma, pi))) for pi in _strategies(game, game.p2_states)),
        min,
    )


def _enumerate_p1(game, pi):
    return _envelope(
        game,
        ((sigma, policy_evaluate(game, PureStrategyProfile(sigma, pi))) for sigma in _strategies(game, game.p1_states)),
        max,
    )


def avoid_set(game, sigma):
    """Largest set of lower states where player 2 keeps the play in lower states forever."""
    inside = set(game.lower_states)
    changed = True
    while changed:
        changed = False
        for s in sorted(inside):
            owner = game.owners[s]
            if owner is Owner.P2:
                stay = any(t in inside for t in game.succ[s])
            elif owner is Owner.P1:
                stay = sigma[s] in inside
            else:
                stay = all(t in inside for t in game.succ[s])
            if not stay:
                inside.discard(s)
                changed = True
    return inside


def best_response_p2(game: TwoLevelGame, sigma, max_iter=BEST_RESPONSE_ITERATIONS):
    """Player 2's optimal reply to a fixed player-1 strategy.

    Returns ``(values, pi)``.  States where player 2 can trap the play below
    the upper level forever are pinned to 0 first; on the rest, policy
    iteration converges to the unique fixed point.  Falls back to enumeration
    if ``max_iter`` rounds are not enough.
    """
    sigma = dict(sigma)
    trap = avoid_set(game, sigma)
    pi = {}
    for s in game.p2_states:
        if s in trap:
            pi[s] = next(t for t in game.succ[s] if t in trap)
        else:
            pi[s] = game.succ[s][0]
    free = {s: t for s, t in pi.items() if s not in trap}
    for _ in range(max_iter):
        values = policy_evaluate(game, PureStrategyProfile(sigma, pi))
        free, changed = _improve(game, free, values, maximize=False)
        if not changed:
            return values, pi
        pi.update(free)
    return _enumerate_p2(game, sigma)


def best_response_p1(game: TwoLevelGame, pi, max_iter=BEST_RESPONSE_ITERATIONS):
    """Player 1's optimal reply to a fixed player-2 strategy: ``(values, sigma)``."""
    pi = dict(pi)
    sigma = lowest_successor_strategy(game, Owner.P1)
    for _ in range(max_iter):
        values = policy_evaluate(game, PureStrategyProfile(sigma, pi))
        sigma, changed = _improve(game, sigma, values, maximize=True)
        if not changed:
            return values, sigma
    return _enumerate_p1(game, pi)


def profile_count(game):
    return prod(len(game.succ[s]) for s in game.p1_states + game.p2_states)


def solve_enumerate(game: TwoLevelGame, cap=ENUMERATION_CAP) -> SolveResult:
    """Brute force over every pure memoryless profile; the reference oracle."""
    total = profile_count(game)
    if total > cap:
        raise TooLarge(f"{total} profiles exceed the enumeration cap {cap}")
    replies = []
    for sigma in _strategies(game, game.p1_states):
        values, pi = _enumerate_p2(game, sigma)
        replies.append(((sigma, pi), values))
    values, (sigma, pi) = _envelope(game, replies, max)
    return SolveResult(values, PureStrategyProfile(sigma, pi), "enum", total)


def solve_strategy_improvement(game: TwoLevelGame, max_rounds=None) -> SolveResult:
    """Player-1 strategy improvement with exact player-2 best responses.

    Each round solves the induced player-2 problem (lower-level reachability
    included) exactly, then switches every player-1 state with a strictly
    better one-step lookahead.  A repeated strategy aborts to enumeration.
    """
    sigma = lowest_successor_strategy(game, Owner.P1)
    seen = set()
    history = []
    rounds = 0
    while True:
        key = tuple(sorted(sigma.items()))
        if key in seen or (max_rounds is not None and rounds >= max_rounds):
            result = solve_enumerate(game)
            result.method = "si->enum"
            result.history = history
            return result
        seen.add(key)
        rounds += 1
        values, pi = best_response_p2(game, sigma)
        if history:
            prev = history[-1]
            if any(v < p for v, p in zip(values, prev)) or values == prev:
                raise InternalInconsistency("strategy improvement did not improve")
        history.append(values)
        sigma, changed = _improve(game, sigma, values, maximize=True)
        if not changed:
            return SolveResult(values, PureStrategyProfile(sigma, pi), "si", rounds, history)


def mdp_lp_solve(game: TwoLevelGame) -> tuple:
    """Values of a player-1 MDP from its linear program (minimize the sum of values)."""
    if game.p2_states:
        raise ValueError("mdp_lp_solve needs a game without player-2 states")
    n = game.n
    beta = game.discount
    rows, rhs = [], []
    slack = 0

    def add(coefs, b, inequality):
        nonlocal slack
        rows.append((coefs, inequality))
        rhs.append(b)
        if inequality:
            slack += 1

    for s in range(n):
        upper = game.levels[s] is Level.UPPER
        scale = 1 - beta if upper else Fraction(1)
        b = beta * game.rewards[s] if upper else Fraction(0)
        if game.owners[s] is Owner.CHANCE:
            coefs = {s: Fraction(1)}
            for t, p in game.dists[s]:
                coefs[t] = coefs.get(t, 0) - scale * p
            add(coefs, b, False)
        else:
            for t in game.succ[s]:
                coefs = {s: Fraction(1)}
                coefs[t] = coefs.get(t, 0) - scale
                add(coefs, b, True)

    width = n + slack
    a_eq = []
    k = n
    for coefs, inequality in rows:
        row = [Fraction(0)] * width
        for j, v in coefs.items():
            row[j] += v
        if inequality:
            row[k] = Fraction(-1)
            k += 1
        a_eq.append(row)
    cost = [Fraction(1)] * n + [Fraction(0)] * slack
    try:
        x, _ = simplex.minimize(cost, a_eq, rhs)
    except (simplex.Infeasible, simplex.Unbounded) as exc:
        raise InternalInconsistency(f"MDP linear program failed: {exc}") from exc
    return tuple(x[:n])


def certify_saddle(game: TwoLevelGame, profile: PureStrategyProfile) -> SaddleCertificate:
    """Best responses to each side of ``profile``; valid iff they coincide."""
    v_sigma, _ = best_response_p2(game, profile.sigma)
    v_pi, _ = best_response_p1(game, profile.pi)
    return SaddleCertificate(profile, v_sigma, v_pi)


RELATIONS = {
    "ge": operator.ge,
    "gt": operator.gt,
    "le": operator.le,
    "lt": operator.lt,
    "eq": operator.eq,
    ">=": operator.ge,
    ">": operator.gt,
    "<=": operator.le,
    "<": operator.lt,
    "=": operator.eq,
}


def decide(game: TwoLevelGame, state, rel, q) -> bool:
    """Compare the exact value at ``state`` (name or index) with the rational ``q``."""
    s = game.index(state) if isinstance(state, str) else state
    values = solve_strategy_improvement(game).values
    return RELATIONS[rel](values[s], Fraction(q))


def is_fixed_point(game, values):
    return bellman_apply(game, values) == tuple(values)
