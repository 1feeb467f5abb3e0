"""Random instances and the cross-checking harness that binds the solvers together."""

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from tldg.errors import GameError
from tldg.evaluation import policy_evaluate, value_iteration
from tldg.game import (
    Level,
    Owner,
    RawGame,
    RawState,
    almost_sure_reach_set,
    build_game,
    validate_structure,
    validate_two_level,
)
from tldg.reductions import freeze_lower
from tldg.semantics import simulate_value
from tldg.solvers import (
    best_response_p1,
    certify_saddle,
    mdp_lp_solve,
    solve_enumerate,
    solve_strategy_improvement,
)


class RepairFailed(GameError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    n_states: tuple = (5, 7)
    out_degree: tuple = (1, 3)
    # relative weights of p1, p2, chance ownership
    owner_weights: tuple = (1, 1, 1)
    lower_weight: float = 0.4
    reward_bound: int = 10
    prob_weight_bound: int = 4
    discounts: tuple = (Fraction(1, 3), Fraction(1, 2), Fraction(9, 10))
    seed: int = 0
    repair_rounds: int = 10
    attempts: int = 20

    def __post_init__(self):
        for name in ("n_states", "out_degree"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ValueError(f"{name} must be a nonempty range of positive ints")
        if any(w < 0 for w in self.owner_weights) or sum(self.owner_weights) <= 0:
            raise ValueError("owner_weights must be nonnegative with a positive sum")
        if not 0 <= self.lower_weight <= 1:
            raise ValueError("lower_weight must lie in [0, 1]")
        if self.reward_bound < 1 or self.prob_weight_bound < 1:
            raise ValueError("bounds must be at least 1")
        if not self.discounts or not all(0 < Fraction(b) < 1 for b in self.discounts):
            raise ValueError("discounts must be a nonempty set inside (0, 1)")


def random_raw(config: GeneratorConfig, rng) -> RawGame:
    """A structurally valid random game; the almost-sure condition may fail."""
    n = rng.randint(*config.n_states)
    width = len(str(n - 1))
    names = [f"s{i:0{width}d}" for i in range(n)]
    levels = [Level.LOWER if rng.random() < config.lower_weight else Level.UPPER for _ in names]
    if Level.UPPER not in levels:
        levels[0] = Level.UPPER
    owners = rng.choices([Owner.P1, Owner.P2, Owner.CHANCE], weights=config.owner_weights, k=n)
    raw = RawGame(discount=Fraction(rng.choice(config.discounts)))
    b = config.reward_bound
    for nm, owner, level in zip(names, owners, levels):
        reward = Fraction(rng.randint(1, b), rng.randint(1, b)) if level is Level.UPPER else None
        raw.states.append(RawState(nm, owner, level, reward))
    for i, nm in enumerate(names):
        d = min(rng.randint(*config.out_degree), n)
        targets = sorted(rng.sample(range(n), d))
        if owners[i] is Owner.CHANCE:
            weights = [rng.randint(1, config.prob_weight_bound) for _ in targets]
            total = sum(weights)
            raw.probs.extend((nm, names[t], Fraction(w, total)) for t, w in zip(targets, weights))
        else:
            raw.edges.extend((nm, names[t]) for t in targets)
    return raw


def _repair(raw, game):
    """Point every failing lower state towards player 1's almost-sure region."""
    winning = almost_sure_reach_set(game, game.upper_states)
    w = game.names[min(winning)]
    failing = {game.names[s] for s in game.lower_states if s not in winning}
    owner = {st.name: st.owner for st in raw.states}
    for nm in sorted(failing):
        if owner[nm] is Owner.P1:
            raw.edges.append((nm, w))
        elif owner[nm] is Owner.P2:
            kept = [e for e in raw.edges if e[0] != nm or game.index(e[1]) in winning]
            raw.edges = kept + [(nm, w)]
            raw.edges = list(dict.fromkeys(raw.edges))
        else:
            row = [p for p in raw.probs if p[0] == nm]
            if any(p[1] == w for p in row):
                continue
            d = len(row) + 1
            scale = Fraction(d - 1, d)
            others = [p for p in raw.probs if p[0] != nm]
            raw.probs = others + [(a, b, q * scale) for a, b, q in row] + [(nm, w, Fraction(1, d))]


def generate(config: GeneratorConfig):
    """Random valid two-level game, deterministic in ``config.seed``."""
    for attempt in range(config.attempts):
        rng = random.Random(config.seed * 7919 + attempt)
        raw = random_raw(config, rng)
        for _ in range(config.repair_rounds):
            game = validate_structure(raw)
            if not validate_two_level(game):
                return game
            _repair(raw, game)
    raise RepairFailed(f"no valid game for seed {config.seed} after {config.attempts} attempts")


def regression_games():
    """The small hand-checked instances used throughout the tests."""
    half = Fraction(1, 2)
    return {
        "G_loop": build_game(half, [("u", "p1", "upper", 1)], [("u", "u")]),
        "G_alt": build_game(
            half,
            [("u1", "p1", "upper", 2), ("u2", "p1", "upper", 6)],
            [("u1", "u2"), ("u2", "u1")],
        ),
        "G_choice": build_game(
            half,
            [("a", "p1", "upper", 1), ("b", "p1", "upper", 3), ("u", "p1", "upper", 1)],
            [("a", "a"), ("b", "b"), ("u", "a"), ("u", "b")],
        ),
        "G_minmax": build_game(
            half,
            [("a", "p1", "upper", 1), ("b", "p1", "upper", 3), ("u", "p2", "upper", 1)],
            [("a", "a"), ("b", "b"), ("u", "a"), ("u", "b")],
        ),
        "G_abs": build_game(
            half,
            [("l", "chance", "lower"), ("u", "p1", "upper", 1)],
            [("u", "u")],
            [("l", "l", half), ("l", "u", half)],
        ),
    }


@dataclass
class SuiteReport:
    passed: int = 0
    failed: int = 0
    first_failing_seed: object = None
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.failed == 0


VI_TOLERANCE = 1e-6
SIM_SAMPLES = 2000
SIM_HORIZON = 40
SIM_SIGMAS = 4
# float summation slack, relative to the largest reward
FLOAT_SLACK = 1e-12


def check_game(game, solve_si=solve_strategy_improvement, seed=0):
    """Run every cross-check on one game; return the list of failure messages."""
    bad = []
    ref = solve_enumerate(game)
    si = solve_si(game)
    if si.values != ref.values:
        bad.append(f"strategy improvement {si.values} != enumeration {ref.values}")
    if not all(isinstance(v, Fraction) for v in si.values):
        bad.append("non-rational value in solver output")
    if policy_evaluate(game, si.profile) != si.values:
        bad.append("returned profile does not achieve the returned values")
    if not game.p2_states:
        if mdp_lp_solve(game) != ref.values:
            bad.append("LP values differ from enumeration")
        if best_response_p1(game, {})[0] != ref.values:
            bad.append("player-1 best response differs from enumeration")
    for label, res in (("si", si), ("enum", ref)):
        if not certify_saddle(game, res.profile).valid:
            bad.append(f"saddle certificate invalid for the {label} profile")
    try:
        frozen = solve_strategy_improvement(freeze_lower(game, si.profile)).values
        if frozen != ref.values:
            bad.append("frozen game values differ")
    except GameError as exc:
        bad.append(f"freeze failed: {exc}")
    vi = value_iteration(game, tol=1e-10)
    if max(abs(a - float(b)) for a, b in zip(vi.values, ref.values)) > VI_TOLERANCE:
        bad.append("value iteration off by more than 1e-6")
    rep = simulate_value(game, si.profile, 0, SIM_SAMPLES, SIM_HORIZON, seed)
    exact = float(si.values[0])
    slack = SIM_SIGMAS * rep.standard_error + rep.truncation_bound + FLOAT_SLACK * float(game.max_reward)
    if abs(rep.estimate - exact) > slack:
        bad.append(f"simulation estimate {rep.estimate} too far from {exact}")
    return bad


def oracle_suite(config: GeneratorConfig, count, solve_si=solve_strategy_improvement) -> SuiteReport:
    """Cross-check ``count`` generated games (seeds ``config.seed + i``)."""
    report = SuiteReport()
    for i in range(count):
        seed = config.seed + i
        game = generate(replace(config, seed=seed))
        try:
            bad = check_game(game, solve_si=solve_si, seed=seed)
        except GameError as exc:
            bad = [f"{type(exc).__name__}: {exc}"]
        if bad:
            report.failed += 1
            report.failures.append((seed, bad))
            if report.first_failing_seed is None:
                report.first_failing_seed = seed
        else:
            report.passed += 1
    return report
