import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_almost_sure, classical_attractor
from tldg.errors import ValidationError
from tldg.game import (
    Level,
    Owner,
    PureStrategyProfile,
    RawGame,
    RawState,
    almost_sure_reach_set,
    build_game,
    validate_structure,
    validate_two_level,
)
from tldg.io import parse_game, serialize_game
from tldg.testkit import GeneratorConfig, random_raw

HALF = Fraction(1, 2)


def raw_loop(beta=HALF):
    return RawGame(
        discount=Fraction(beta),
        states=[RawState("u", Owner.P1, Level.UPPER, Fraction(1))],
        edges=[("u", "u")],
    )


def codes(raw):
    with pytest.raises(ValidationError) as info:
        validate_structure(raw)
    return info.value.codes


def test_loop_is_valid():
    game = validate_structure(raw_loop())
    assert game.names == ("u",)
    assert game.succ == ((0,),)
    assert validate_two_level(game) == []


@pytest.mark.parametrize("beta", [0, 1, Fraction(3, 2), -HALF])
def test_discount_out_of_range(beta):
    assert codes(raw_loop(beta)) == ["DiscountOutOfRange"]


def test_bad_distribution_sum():
    raw = raw_loop()
    raw.states += [RawState("c", Owner.CHANCE, Level.LOWER), RawState("v", Owner.P1, Level.UPPER, Fraction(1))]
    raw.edges.append(("v", "v"))
    raw.probs += [("c", "u", HALF), ("c", "v", Fraction(1, 3))]
    assert codes(raw) == ["BadDistribution"]


def test_zero_probability_rejected():
    raw = raw_loop()
    raw.states.append(RawState("c", Owner.CHANCE, Level.LOWER))
    raw.probs += [("c", "u", Fraction(1)), ("c", "c", Fraction(0))]
    assert "BadDistribution" in codes(raw)


@pytest.mark.parametrize(
    "state, expected",
    [
        (RawState("x", Owner.P1, Level.UPPER), "MissingReward"),
        (RawState("x", Owner.P1, Level.UPPER, Fraction(0)), "NonPositiveReward"),
        (RawState("x", Owner.P1, Level.UPPER, Fraction(-2)), "NonPositiveReward"),
        (RawState("x", Owner.P1, Level.LOWER, Fraction(1)), "RewardOnLower"),
    ],
)
def test_reward_rules(state, expected):
    raw = raw_loop()
    raw.states.append(state)
    raw.edges.append(("x", "u"))
    assert codes(raw) == [expected]


def test_dangling_and_empty():
    raw = raw_loop()
    raw.states.append(RawState("x", Owner.P2, Level.UPPER, Fraction(1)))
    raw.edges.append(("u", "ghost"))
    assert sorted(codes(raw)) == ["DanglingEdge", "EmptySuccessors"]


def test_all_violations_reported_together():
    raw = raw_loop(Fraction(2))
    raw.states.append(RawState("x", Owner.P1, Level.UPPER))
    assert sorted(codes(raw)) == ["DiscountOutOfRange", "EmptySuccessors", "MissingReward"]


def test_names_sorted_into_dense_ids():
    game = build_game(HALF, [("zeta", "p1", "upper", 1), ("alpha", "p2", "upper", 2)], [("zeta", "alpha"), ("alpha", "zeta")])
    assert game.names == ("alpha", "zeta")
    assert game.owners == (Owner.P2, Owner.P1)
    assert game.index("zeta") == 1


def test_game_is_immutable(games):
    with pytest.raises(AttributeError):
        games["G_loop"].discount = HALF


# G_bad: lower p2 state that can loop forever; G_abs: absorbing lower chance state.
def g_bad_structure():
    raw = raw_loop()
    raw.states.append(RawState("l", Owner.P2, Level.LOWER))
    raw.edges += [("l", "l"), ("l", "u")]
    return validate_structure(raw)


def test_almost_sure_examples(games):
    bad = g_bad_structure()
    assert bad.index("l") not in almost_sure_reach_set(bad, bad.upper_states)
    absorb = games["G_abs"]
    assert absorb.index("l") in almost_sure_reach_set(absorb, absorb.upper_states)
    everything = set(range(absorb.n))
    assert almost_sure_reach_set(absorb, everything) == everything


def test_validate_two_level_examples(games):
    assert validate_two_level(games["G_abs"]) == []
    problems = validate_two_level(g_bad_structure())
    assert [p.code for p in problems] == ["LowerStateCannotForceUpper"]
    assert problems[0].states == ("l",)
    assert validate_two_level(games["G_alt"]) == []


def test_target_states_are_absorbing():
    # the upper p2 state t has an edge into a losing lower region; it is still a target
    game = validate_structure(
        RawGame(
            discount=HALF,
            states=[
                RawState("t", Owner.P2, Level.UPPER, Fraction(1)),
                RawState("l", Owner.P2, Level.LOWER),
            ],
            edges=[("t", "l"), ("l", "l")],
        )
    )
    t = game.index("t")
    assert almost_sure_reach_set(game, [t]) == frozenset({t})


def _random_structure(seed, n_max=6, chance=True):
    rng = random.Random(seed)
    weights = (1, 1, 1) if chance else (1, 1, 0)
    cfg = GeneratorConfig(n_states=(2, n_max), owner_weights=weights, lower_weight=0.5)
    game = validate_structure(random_raw(cfg, rng))
    k = rng.randint(1, game.n)
    target = set(rng.sample(range(game.n), k))
    return game, target


@pytest.mark.parametrize("seed", range(60))
def test_reach_set_matches_brute_force(seed):
    game, target = _random_structure(seed)
    assert set(almost_sure_reach_set(game, target)) == brute_force_almost_sure(game, target)


@pytest.mark.parametrize("seed", range(40))
def test_reach_set_without_chance_is_attractor(seed):
    game, target = _random_structure(1000 + seed, n_max=8, chance=False)
    assert set(almost_sure_reach_set(game, target)) == classical_attractor(game, target)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), data=st.data())
def test_reach_set_monotone_and_contains_target(seed, data):
    game, target = _random_structure(seed, n_max=7)
    extra = data.draw(st.sets(st.integers(0, game.n - 1)))
    small = almost_sure_reach_set(game, target)
    big = almost_sure_reach_set(game, target | extra)
    assert target <= small
    assert small <= big


@pytest.mark.parametrize("seed", range(20))
def test_round_trip_yields_identical_structure(seed):
    from tldg.testkit import generate

    game = generate(GeneratorConfig(seed=seed))
    again = parse_game(serialize_game(game))
    assert again == game


def test_profile_check(games):
    g = games["G_choice"]
    u, a, b = g.index("u"), g.index("a"), g.index("b")
    ok = PureStrategyProfile({u: b, a: a, b: b}, {})
    assert ok.check(g) is ok
    with pytest.raises(ValueError):
        PureStrategyProfile({u: u, a: a, b: b}, {}).check(g)
    with pytest.raises(ValueError):
        PureStrategyProfile({u: a}, {}).check(g)


def test_build_game_rejects_bad_lower():
    with pytest.raises(ValidationError) as info:
        build_game(HALF, [("u", "p1", "upper", 1), ("l", "p2", "lower")], [("u", "u"), ("l", "l"), ("l", "u")])
    assert info.value.codes == ["LowerStateCannotForceUpper"]
