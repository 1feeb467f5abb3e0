from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tldg.evaluation import bellman_apply, policy_evaluate, value_iteration
from tldg.game import Owner, PureStrategyProfile, build_game, lowest_successor_strategy
from tldg.solvers import solve_strategy_improvement
from tldg.testkit import GeneratorConfig, generate

HALF = Fraction(1, 2)


def named(game, **values):
    out = [Fraction(0)] * game.n
    for k, v in values.items():
        out[game.index(k)] = Fraction(v)
    return tuple(out)


def test_bellman_from_zero(games):
    g = games["G_loop"]
    assert bellman_apply(g, (0,)) == (HALF,)


def test_bellman_choice(games):
    g = games["G_choice"]
    out = bellman_apply(g, named(g, u=0, a=1, b=3))
    assert out[g.index("u")] == 2


def test_bellman_fixed_point_alt(games):
    g = games["G_alt"]
    v = named(g, u1=Fraction(10, 3), u2=Fraction(14, 3))
    assert bellman_apply(g, v) == v


def profile_of(game, **choices):
    sigma = {game.index(s): game.index(t) for s, t in choices.items() if game.owners[game.index(s)] is Owner.P1}
    pi = {game.index(s): game.index(t) for s, t in choices.items() if game.owners[game.index(s)] is Owner.P2}
    return PureStrategyProfile(sigma, pi)


def test_policy_evaluate_loop(games):
    g = games["G_loop"]
    assert policy_evaluate(g, profile_of(g, u="u")) == (1,)


@pytest.mark.parametrize("beta", [Fraction(1, 3), HALF, Fraction(9, 10)])
@pytest.mark.parametrize("r1, r2", [(2, 6), (1, 1), (Fraction(7, 3), 5)])
def test_policy_evaluate_alternating_closed_form(beta, r1, r2):
    g = build_game(beta, [("u1", "p1", "upper", r1), ("u2", "p1", "upper", r2)], [("u1", "u2"), ("u2", "u1")])
    v = policy_evaluate(g, profile_of(g, u1="u2", u2="u1"))
    assert v[0] == (r1 + (1 - beta) * r2) / (2 - beta)
    assert v[1] == (r2 + (1 - beta) * r1) / (2 - beta)


def test_policy_evaluate_alt_values(games):
    g = games["G_alt"]
    assert policy_evaluate(g, profile_of(g, u1="u2", u2="u1")) == (Fraction(10, 3), Fraction(14, 3))


def test_lower_trap_gets_zero():
    g = build_game(HALF, [("l", "p1", "lower"), ("u", "p1", "upper", 1)], [("l", "l"), ("l", "u"), ("u", "u")])
    v = policy_evaluate(g, profile_of(g, l="l", u="u"))
    assert v == (0, 1)


def truncated_chain_value(game, profile, rounds=4000):
    """Float fixed-point iteration of the profile-restricted operator from zero."""
    v = tuple(0.0 for _ in range(game.n))
    for _ in range(rounds):
        v = bellman_apply(game, v, profile)
    return v


@pytest.mark.parametrize("seed", range(15))
def test_policy_evaluate_matches_iteration(seed):
    g = generate(GeneratorConfig(seed=seed, lower_weight=0.5))
    prof = PureStrategyProfile(lowest_successor_strategy(g, Owner.P1), lowest_successor_strategy(g, Owner.P2))
    exact = policy_evaluate(g, prof)
    approx = truncated_chain_value(g, prof)
    assert max(abs(float(a) - b) for a, b in zip(exact, approx)) < 1e-9
    assert bellman_apply(g, exact, prof) == exact


def test_value_iteration_examples(games):
    res = value_iteration(games["G_loop"], tol=1e-9)
    assert res.converged and abs(res.values[0] - 1) <= 1e-9
    res = value_iteration(games["G_alt"], tol=1e-9)
    assert abs(res.values[0] - 10 / 3) <= 1e-9 and abs(res.values[1] - 14 / 3) <= 1e-9


def test_value_iteration_not_converged_flag(games):
    res = value_iteration(games["G_alt"], tol=1e-12, max_rounds=3)
    assert not res.converged and res.rounds == 3


def test_value_iteration_rejects_bad_tol(games):
    with pytest.raises(ValueError):
        value_iteration(games["G_loop"], tol=0)


def test_larger_discount_converges_faster():
    states = [("a", "p1", "upper", 3), ("b", "p2", "upper", 1), ("c", "chance", "upper", 2)]
    edges = [("a", "b"), ("a", "c"), ("b", "a"), ("b", "c")]
    probs = [("c", "a", HALF), ("c", "b", HALF)]
    fast = value_iteration(build_game(Fraction(9, 10), states, edges, probs), tol=1e-10)
    slow = value_iteration(build_game(Fraction(1, 10), states, edges, probs), tol=1e-10)
    assert fast.converged and slow.converged
    assert fast.rounds < slow.rounds


def classical_one_level(game, rounds=3000):
    """Textbook discounted recursion written out separately, floats."""
    beta = float(game.discount)
    v = [0.0] * game.n
    for _ in range(rounds):
        nv = []
        for s in range(game.n):
            conts = [v[t] for t in game.succ[s]]
            if game.owners[s] is Owner.CHANCE:
                cont = sum(float(p) * v[t] for t, p in game.dists[s])
            elif game.owners[s] is Owner.P1:
                cont = max(conts)
            else:
                cont = min(conts)
            nv.append(beta * float(game.rewards[s]) + (1 - beta) * cont)
        v = nv
    return v


@pytest.mark.parametrize("seed", range(15))
def test_one_level_games_match_classical_recursion(seed):
    g = generate(GeneratorConfig(seed=seed, lower_weight=0.0))
    assert not g.lower_states
    expected = classical_one_level(g)
    vi = value_iteration(g, tol=1e-12).values
    exact = solve_strategy_improvement(g).values
    assert max(abs(a - b) for a, b in zip(vi, expected)) < 1e-9
    assert max(abs(float(a) - b) for a, b in zip(exact, expected)) < 1e-9


vectors = st.lists(st.fractions(min_value=0, max_value=10, max_denominator=12), min_size=7, max_size=7)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 500), v=vectors, bump=vectors)
def test_bellman_monotone(seed, v, bump):
    g = generate(GeneratorConfig(seed=seed))
    v = tuple(v[: g.n])
    w = tuple(a + b for a, b in zip(v, bump))
    fv, fw = bellman_apply(g, v), bellman_apply(g, w)
    assert all(a <= b for a, b in zip(fv, fw))


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 500), v=vectors, w=vectors)
def test_bellman_contracts_at_upper_states(seed, v, w):
    g = generate(GeneratorConfig(seed=seed))
    v, w = tuple(v[: g.n]), tuple(w[: g.n])
    gap = max(abs(a - b) for a, b in zip(v, w))
    fv, fw = bellman_apply(g, v), bellman_apply(g, w)
    for s in g.upper_states:
        assert abs(fv[s] - fw[s]) <= (1 - g.discount) * gap


@pytest.mark.parametrize("seed", range(20))
def test_value_iteration_monotone_and_bounded(seed):
    g = generate(GeneratorConfig(seed=seed))
    v = tuple(Fraction(0) for _ in range(g.n))
    for _ in range(25):
        nv = bellman_apply(g, v)
        assert all(a <= b for a, b in zip(v, nv))
        assert all(b <= g.max_reward for b in nv)
        v = nv


@pytest.mark.parametrize("seed", range(20))
def test_solver_values_are_bellman_fixed_points(seed):
    g = generate(GeneratorConfig(seed=seed))
    v = solve_strategy_improvement(g).values
    assert bellman_apply(g, v) == v
    assert all(0 <= x <= g.max_reward for x in v)
    assert all(v[s] >= g.discount * g.min_reward for s in g.upper_states)
