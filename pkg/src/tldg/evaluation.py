"""Bellman operator, exact policy evaluation and value iteration."""

from dataclasses import dataclass
from fractions import Fraction

from tldg.errors import InternalInconsistency
from tldg.game import Level, Owner, TwoLevelGame
from tldg.linalg import SingularSystem, solve_vector


def _params(game, exact):
    if exact:
        return game.discount, game.rewards
    return float(game.discount), [None if r is None else float(r) for r in game.rewards]


def lookahead(game, s, t, values, exact=True):
    """One-step value of moving from ``s`` to ``t`` under ``values``."""
    if game.levels[s] is Level.LOWER:
        return values[t]
    beta, rewards = _params(game, exact)
    return beta * rewards[s] + (1 - beta) * values[t]


def _is_exact(values):
    return not any(isinstance(v, float) for v in values)


def bellman_apply(game: TwoLevelGame, values, profile=None):
    """One application of the six-case Bellman operator.

    Upper states add ``beta * r(s)`` and scale the continuation by
    ``1 - beta``; lower states pass the continuation through unchanged.
    Player 1 maximizes, player 2 minimizes, chance averages.  With a
    ``profile`` the player states follow their fixed choice instead.

    Exact (``Fraction``) in, exact out; any float in the input switches the
    whole computation to floats.
    """
    exact = _is_exact(values)
    beta, rewards = _params(game, exact)
    out = []
    for s in range(game.n):
        owner = game.owners[s]
        if owner is Owner.CHANCE:
            cont = sum(p * values[t] for t, p in game.dists[s]) if exact else sum(
                float(p) * values[t] for t, p in game.dists[s]
            )
        elif profile is not None:
            cont = values[profile.choice(game, s)]
        elif owner is Owner.P1:
            cont = max(values[t] for t in game.succ[s])
        else:
            cont = min(values[t] for t in game.succ[s])
        if game.levels[s] is Level.UPPER:
            out.append(beta * rewards[s] + (1 - beta) * cont)
        else:
            out.append(cont)
    return tuple(out)


def reaches_upper(game, rows):
    """States that can reach an upper state in the digraph of ``rows``."""
    preds = [[] for _ in range(game.n)]
    for s, row in enumerate(rows):
        for t, _ in row:
            preds[t].append(s)
    seen = set(game.upper_states)
    stack = list(seen)
    while stack:
        t = stack.pop()
        for s in preds[t]:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return seen


def chain_rows(game, profile):
    return [game.transitions(s, profile) for s in range(game.n)]


def policy_evaluate(game: TwoLevelGame, profile) -> tuple:
    """Exact expected payoff from every state under a pure memoryless profile.

    Lower states that cannot reach the upper level in the induced chain get
    value 0; the remaining states are solved as one linear system.
    """
    rows = chain_rows(game, profile)
    live = sorted(reaches_upper(game, rows))
    col = {s: i for i, s in enumerate(live)}
    beta = game.discount
    a, b = [], []
    for s in live:
        coef = [Fraction(0)] * len(live)
        coef[col[s]] += 1
        scale = 1 - beta if game.levels[s] is Level.UPPER else 1
        for t, p in rows[s]:
            if t in col:
                coef[col[t]] -= scale * p
        a.append(coef)
        b.append(beta * game.rewards[s] if game.levels[s] is Level.UPPER else Fraction(0))
    try:
        x = solve_vector(a, b)
    except SingularSystem as exc:
        raise InternalInconsistency(f"policy evaluation system is singular: {exc}") from exc
    values = [Fraction(0)] * game.n
    for s, v in zip(live, x):
        values[s] = v
    return tuple(values)


@dataclass
class ValueIterationResult:
    values: tuple
    rounds: int
    last_change: float
    converged: bool


def value_iteration(game: TwoLevelGame, tol=1e-10, max_rounds=100_000) -> ValueIterationResult:
    """Float value iteration from zero until the sup-norm change is at most ``tol``.

    The iterates increase monotonically towards the least fixed point.  No
    error bound is implied at lower states, where the operator does not
    contract; use the exact solvers when the answer matters.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    values = tuple(0.0 for _ in range(game.n))
    change = float("inf")
    for rounds in range(1, max_rounds + 1):
        nxt = bellman_apply(game, values)
        change = max(abs(x - y) for x, y in zip(nxt, values))
        values = nxt
        if change <= tol:
            return ValueIterationResult(values, rounds, change, True)
    return ValueIterationResult(values, max_rounds, change, False)
