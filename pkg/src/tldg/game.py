"""Game graphs with an upper (discounted) and a lower (reachability) level.

States are referred to externally by name and internally by a dense index
``0..n-1`` assigned in lexicographic name order.  That order is the
tie-breaking order for every algorithm in the package.
"""

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from tldg.errors import ValidationError, Violation

NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class Owner(enum.Enum):
    P1 = "p1"
    P2 = "p2"
    CHANCE = "chance"


class Level(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass
class RawState:
    name: str
    owner: Owner
    level: Level
    reward: Optional[Fraction] = None
    line: Optional[int] = None


@dataclass
class RawGame:
    """Unvalidated game description, as produced by the parser or by hand.

    ``edges`` holds ``(src, dst)`` or ``(src, dst, line)`` tuples for player
    states; ``probs`` holds ``(src, dst, p)`` or ``(src, dst, p, line)`` for
    chance states.
    """

    discount: Fraction
    states: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    probs: list = field(default_factory=list)
    discount_line: Optional[int] = None


@dataclass(frozen=True)
class TwoLevelGame:
    names: tuple
    owners: tuple
    levels: tuple
    succ: tuple
    # per state: tuple of (successor, probability) for chance states, else None
    dists: tuple
    rewards: tuple
    discount: Fraction
    _index: Mapping = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def __len__(self):
        return len(self.names)

    @property
    def n(self):
        return len(self.names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown state {name!r}") from None

    def is_upper(self, s):
        return self.levels[s] is Level.UPPER

    def states_of(self, owner, level=None):
        return [
            s
            for s in range(self.n)
            if self.owners[s] is owner and (level is None or self.levels[s] is level)
        ]

    @property
    def p1_states(self):
        return self.states_of(Owner.P1)

    @property
    def p2_states(self):
        return self.states_of(Owner.P2)

    @property
    def upper_states(self):
        return [s for s in range(self.n) if self.levels[s] is Level.UPPER]

    @property
    def lower_states(self):
        return [s for s in range(self.n) if self.levels[s] is Level.LOWER]

    @property
    def max_reward(self):
        return max((r for r in self.rewards if r is not None), default=Fraction(0))

    @property
    def min_reward(self):
        return min((r for r in self.rewards if r is not None), default=Fraction(0))

    def transitions(self, s, profile=None):
        """Successor distribution of ``s``, resolving player choices by ``profile``."""
        if self.owners[s] is Owner.CHANCE:
            return self.dists[s]
        choice = profile.choice(self, s) if profile is not None else None
        if choice is None:
            raise KeyError(f"profile does not fix a successor for {self.names[s]!r}")
        return ((choice, Fraction(1)),)

    def named(self, vector):
        """Map a per-index sequence to a ``{name: value}`` dict."""
        return {self.names[s]: vector[s] for s in range(self.n)}


@dataclass(frozen=True)
class PureStrategyProfile:
    """Pure memoryless choices: ``sigma`` for player 1, ``pi`` for player 2.

    Both maps go from state index to successor index.
    """

    sigma: Mapping = field(default_factory=dict)
    pi: Mapping = field(default_factory=dict)

    def choice(self, game, s):
        owner = game.owners[s]
        if owner is Owner.P1:
            return self.sigma.get(s)
        if owner is Owner.P2:
            return self.pi.get(s)
        return None

    def named(self, game):
        return (
            {game.names[s]: game.names[t] for s, t in sorted(self.sigma.items())},
            {game.names[s]: game.names[t] for s, t in sorted(self.pi.items())},
        )

    def check(self, game):
        """Raise ``ValueError`` unless the profile is total and legal on ``game``."""
        for owner, choices in ((Owner.P1, self.sigma), (Owner.P2, self.pi)):
            owned = set(game.states_of(owner))
            if set(choices) != owned:
                missing = sorted(game.names[s] for s in owned - set(choices))
                extra = sorted(str(s) for s in set(choices) - owned)
                raise ValueError(
                    f"{owner.value} strategy mismatch: missing {missing}, extra {extra}"
                )
            for s, t in choices.items():
                if t not in game.succ[s]:
                    raise ValueError(
                        f"illegal choice {game.names[s]} -> {t} for {owner.value}"
                    )
        return self


def lowest_successor_strategy(game, owner):
    """Default initial strategy: the lowest-index successor everywhere."""
    return {s: game.succ[s][0] for s in game.states_of(owner)}


def _loc(item, n):
    return item[n] if len(item) > n else None


def validate_structure(raw: RawGame) -> TwoLevelGame:
    """Check every structural invariant and build an immutable game.

    All violations are collected and raised together as a
    :class:`ValidationError`.  The almost-sure reachability condition is
    *not* checked here; see :func:`validate_two_level`.
    """
    bad = []
    by_name = {}
    for st in raw.states:
        if not NAME_RE.match(st.name or ""):
            bad.append(Violation("BadName", f"invalid state name {st.name!r}", (st.name,), st.line))
            continue
        if st.name in by_name:
            bad.append(Violation("DuplicateState", f"state {st.name} declared twice", (st.name,), st.line))
            continue
        by_name[st.name] = st
        if st.level is Level.UPPER:
            if st.reward is None:
                bad.append(Violation("MissingReward", f"upper state {st.name} has no reward", (st.name,), st.line))
            elif st.reward <= 0:
                bad.append(Violation("NonPositiveReward", f"reward of {st.name} is {st.reward}", (st.name,), st.line))
        elif st.reward is not None:
            bad.append(Violation("RewardOnLower", f"lower state {st.name} carries a reward", (st.name,), st.line))

    beta = raw.discount
    if beta is None or not 0 < beta < 1:
        bad.append(Violation("DiscountOutOfRange", f"discount must satisfy 0 < b < 1, got {beta}", (), raw.discount_line))

    names = sorted(by_name)
    idx = {nm: i for i, nm in enumerate(names)}
    succ = [set() for _ in names]
    probs = [dict() for _ in names]

    for item in raw.edges:
        src, dst, line = item[0], item[1], _loc(item, 2)
        if src not in idx or dst not in idx:
            bad.append(Violation("DanglingEdge", f"edge {src} -> {dst} mentions an unknown state", (src, dst), line))
            continue
        if by_name[src].owner is Owner.CHANCE:
            bad.append(Violation("EdgeOnChanceState", f"chance state {src} needs prob lines, not edges", (src,), line))
            continue
        if idx[dst] in succ[idx[src]]:
            bad.append(Violation("DuplicateEdge", f"edge {src} -> {dst} repeated", (src, dst), line))
            continue
        succ[idx[src]].add(idx[dst])

    for item in raw.probs:
        src, dst, p, line = item[0], item[1], Fraction(item[2]), _loc(item, 3)
        if src not in idx or dst not in idx:
            bad.append(Violation("DanglingEdge", f"prob {src} -> {dst} mentions an unknown state", (src, dst), line))
            continue
        if by_name[src].owner is not Owner.CHANCE:
            bad.append(Violation("ProbOnPlayerState", f"player state {src} cannot have probabilities", (src,), line))
            continue
        if p <= 0:
            bad.append(Violation("BadDistribution", f"probability {src} -> {dst} is {p}", (src, dst), line))
            continue
        if idx[dst] in probs[idx[src]]:
            bad.append(Violation("DuplicateEdge", f"prob {src} -> {dst} repeated", (src, dst), line))
            continue
        probs[idx[src]][idx[dst]] = p

    dists = []
    for i, nm in enumerate(names):
        st = by_name[nm]
        if st.owner is Owner.CHANCE:
            row = probs[i]
            total = sum(row.values(), Fraction(0))
            if row and total != 1:
                bad.append(Violation("BadDistribution", f"probabilities of {nm} sum to {total}", (nm,), st.line))
            succ[i] = set(row)
            dists.append(tuple(sorted(row.items())))
        else:
            dists.append(None)
        if not succ[i]:
            bad.append(Violation("EmptySuccessors", f"state {nm} has no outgoing edge", (nm,), st.line))

    if not names:
        bad.append(Violation("EmptyGame", "game has no states"))
    if bad:
        raise ValidationError(bad)

    return TwoLevelGame(
        names=tuple(names),
        owners=tuple(by_name[nm].owner for nm in names),
        levels=tuple(by_name[nm].level for nm in names),
        succ=tuple(tuple(sorted(s)) for s in succ),
        dists=tuple(dists),
        rewards=tuple(
            Fraction(by_name[nm].reward) if by_name[nm].level is Level.UPPER else None
            for nm in names
        ),
        discount=Fraction(beta),
    )


def _closure(game, seed, live, some, every, frozen=frozenset()):
    """Least superset of ``seed`` (within ``live``) closed under one-step predecessors.

    A live state joins when its owner is in ``some`` and one live successor is
    inside, or its owner is in ``every`` and all live successors are inside.
    States in ``frozen`` never join.
    """
    inside = set(seed)
    changed = True
    while changed:
        changed = False
        for s in sorted(live - inside - frozen):
            nxt = [t for t in game.succ[s] if t in live]
            owner = game.owners[s]
            if owner in some:
                joins = any(t in inside for t in nxt)
            elif owner in every:
                joins = bool(nxt) and all(t in inside for t in nxt)
            else:
                joins = False
            if joins:
                inside.add(s)
                changed = True
    return inside


def almost_sure_reach_set(game: TwoLevelGame, target) -> frozenset:
    """States from which player 1 reaches ``target`` with probability 1.

    Target states are absorbing: once reached, their own edges are irrelevant.
    """
    target = frozenset(target)
    live = set(range(game.n))
    while True:
        reach = _closure(
            game,
            target & live,
            live,
            some=(Owner.P1, Owner.CHANCE),
            every=(Owner.P2,),
        )
        losing = live - reach
        if not losing:
            return frozenset(live)
        live -= _closure(
            game,
            losing,
            live,
            some=(Owner.P2, Owner.CHANCE),
            every=(Owner.P1,),
            frozen=target,
        )


def validate_two_level(game: TwoLevelGame) -> list:
    """Return violations of the almost-sure condition (empty list when ok)."""
    lower = game.lower_states
    if not lower:
        return []
    winning = almost_sure_reach_set(game, game.upper_states) if game.upper_states else frozenset()
    failing = [game.names[s] for s in lower if s not in winning]
    if not failing:
        return []
    return [
        Violation(
            "LowerStateCannotForceUpper",
            "player 1 cannot force reaching the upper level from " + ", ".join(failing),
            tuple(failing),
        )
    ]


def build_game(discount, states: Sequence, edges=(), probs=()) -> TwoLevelGame:
    """Convenience constructor: ``states`` holds ``(name, owner, level[, reward])``.

    Owner and level may be given as enum members or their text values.
    Raises :class:`ValidationError` on any violation, including the
    almost-sure condition.
    """
    raw = RawGame(discount=Fraction(discount))
    for row in states:
        name, owner, level = row[:3]
        reward = Fraction(row[3]) if len(row) > 3 and row[3] is not None else None
        raw.states.append(RawState(name, Owner(owner), Level(level), reward))
    raw.edges = [tuple(e) for e in edges]
    raw.probs = [(a, b, Fraction(p)) for a, b, p in probs]
    game = validate_structure(raw)
    problems = validate_two_level(game)
    if problems:
        raise ValidationError(problems)
    return game
