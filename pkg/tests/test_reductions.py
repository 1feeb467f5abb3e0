from fractions import Fraction

import pytest

from tldg.game import Level, Owner, PureStrategyProfile, RawGame, RawState, build_game, validate_structure
from tldg.reductions import EscapeMassNonzero, freeze_lower, hit_distribution, is_one_step
from tldg.solvers import solve_enumerate, solve_strategy_improvement
from tldg.testkit import GeneratorConfig, generate

THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)


def three_way():
    return build_game(
        HALF,
        [("l", "chance", "lower"), ("u1", "p1", "upper", 1), ("u2", "p1", "upper", 4)],
        [("u1", "u1"), ("u2", "u2")],
        [("l", "u1", THIRD), ("l", "u2", THIRD), ("l", "l", THIRD)],
    )


def sigma_all(game):
    return PureStrategyProfile({s: game.succ[s][0] for s in game.p1_states}, {})


def test_hit_single_target(games):
    g = games["G_abs"]
    hd = hit_distribution(g, sigma_all(g))
    assert hd.hits[g.index("l")] == {g.index("u"): 1}
    assert hd.escape[g.index("l")] == 0


def test_hit_geometric_split():
    g = three_way()
    hd = hit_distribution(g, sigma_all(g))
    u1, u2 = g.index("u1"), g.index("u2")
    # h = 1/3 + 1/3 h  =>  h = 1/2 for each target
    assert hd.hits[g.index("l")] == {u1: HALF, u2: HALF}


def test_escape_mass_for_lower_loop():
    raw = RawGame(
        discount=HALF,
        states=[RawState("l", Owner.P2, Level.LOWER), RawState("u", Owner.P1, Level.UPPER, Fraction(1))],
        edges=[("l", "l"), ("l", "u"), ("u", "u")],
    )
    g = validate_structure(raw)
    l, u = g.index("l"), g.index("u")
    hd = hit_distribution(g, PureStrategyProfile({u: u}, {l: l}))
    assert hd.hits[l] == {} and hd.escape[l] == 1
    with pytest.raises(EscapeMassNonzero):
        freeze_lower(g, PureStrategyProfile({u: u}, {l: l}))


def test_freeze_examples(games):
    g = games["G_abs"]
    frozen = freeze_lower(g, sigma_all(g))
    l, u = g.index("l"), g.index("u")
    assert frozen.owners[l] is Owner.CHANCE
    assert frozen.dists[l] == ((u, 1),)
    assert is_one_step(frozen)

    direct = build_game(HALF, [("l", "p1", "lower"), ("u", "p1", "upper", 2), ("v", "p1", "upper", 1)],
                        [("l", "u"), ("l", "v"), ("u", "u"), ("v", "v")])
    prof = PureStrategyProfile({0: 1, 1: 1, 2: 2}, {})
    assert freeze_lower(direct, prof).dists[0] == ((1, 1),)

    g = three_way()
    assert freeze_lower(g, sigma_all(g)).dists[g.index("l")] == ((g.index("u1"), HALF), (g.index("u2"), HALF))


def absorption_by_iteration(game, profile, rounds=3000):
    """Float reference: push probability mass forward with upper states absorbing."""
    out = {}
    for s in game.lower_states:
        mass = {s: 1.0}
        hit = {}
        for _ in range(rounds):
            nxt = {}
            for x, m in mass.items():
                for t, p in game.transitions(x, profile):
                    if game.is_upper(t):
                        hit[t] = hit.get(t, 0.0) + m * float(p)
                    else:
                        nxt[t] = nxt.get(t, 0.0) + m * float(p)
            mass = nxt
        out[s] = hit
    return out


@pytest.mark.parametrize("seed", range(15))
def test_hit_distribution_matches_forward_iteration(seed):
    g = generate(GeneratorConfig(seed=seed, lower_weight=0.6))
    prof = solve_strategy_improvement(g).profile
    hd = hit_distribution(g, prof)
    ref = absorption_by_iteration(g, prof)
    for s in g.lower_states:
        assert hd.total(s) == 1
        for u in g.upper_states:
            assert abs(float(hd.hits[s].get(u, 0)) - ref[s].get(u, 0.0)) < 1e-9


@pytest.mark.parametrize("seed", range(40))
def test_freeze_preserves_values(seed):
    g = generate(GeneratorConfig(seed=seed, lower_weight=0.6))
    res = solve_strategy_improvement(g)
    frozen = freeze_lower(g, res.profile)
    assert is_one_step(frozen)
    assert solve_strategy_improvement(frozen).values == res.values
    assert solve_enumerate(frozen).values == res.values
