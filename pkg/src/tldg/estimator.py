"""Estimator-style wrapper so a solver can be configured, cloned and fitted like any other."""

import os

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from tldg.errors import ValidationError
from tldg.evaluation import value_iteration
from tldg.game import PureStrategyProfile, TwoLevelGame, validate_two_level
from tldg.io import parse_game
from tldg.solvers import ENUMERATION_CAP, mdp_lp_solve, solve_enumerate, solve_strategy_improvement

METHODS = ("si", "enum", "lp", "vi")


def check_game(game):
    """Accept a :class:`TwoLevelGame`, tldg text, or a path to a tldg file."""
    if isinstance(game, TwoLevelGame):
        problems = validate_two_level(game)
        if problems:
            raise ValidationError(problems)
        return game
    if isinstance(game, (str, os.PathLike)):
        text = str(game)
        if not text.lstrip().startswith("tldg") and os.path.exists(text):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        return parse_game(text)
    raise TypeError(f"expected a TwoLevelGame, tldg text or path, got {type(game).__name__}")


class TwoLevelGameSolver(BaseEstimator):
    """Solve a two-level discounted game and expose its values.

    Parameters
    ----------
    method : {"si", "enum", "lp", "vi"}
        Strategy improvement, brute-force enumeration, the player-1 MDP
        linear program, or float value iteration.
    tol : float
        Stopping threshold for ``"vi"``.
    max_rounds : int
        Round limit for ``"vi"``.
    enum_cap : int
        Largest number of profiles ``"enum"`` will evaluate.

    Attributes
    ----------
    values_ : tuple
        Value per state index (``Fraction``, or ``float`` for ``"vi"``).
    profile_ : PureStrategyProfile or None
        Optimal profile; ``None`` for ``"lp"`` and ``"vi"``.
    n_iter_ : int
    game_ : TwoLevelGame
    """

    def __init__(self, method="si", tol=1e-10, max_rounds=100_000, enum_cap=ENUMERATION_CAP):
        self.method = method
        self.tol = tol
        self.max_rounds = max_rounds
        self.enum_cap = enum_cap

    def fit(self, game, y=None):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        game = check_game(game)
        self.profile_ = None
        self.converged_ = True
        if self.method == "si":
            res = solve_strategy_improvement(game)
            self.values_, self.profile_, self.n_iter_ = res.values, res.profile, res.iterations
        elif self.method == "enum":
            res = solve_enumerate(game, cap=self.enum_cap)
            self.values_, self.profile_, self.n_iter_ = res.values, res.profile, res.iterations
        elif self.method == "lp":
            self.values_, self.n_iter_ = mdp_lp_solve(game), 1
        else:
            res = value_iteration(game, tol=self.tol, max_rounds=self.max_rounds)
            self.values_, self.n_iter_, self.converged_ = res.values, res.rounds, res.converged
        self.game_ = game
        return self

    def predict(self, states):
        """Values at the given states (names or indices)."""
        if not hasattr(self, "values_"):
            raise NotFittedError("call fit before predict")
        idx = [self.game_.index(s) if isinstance(s, str) else s for s in states]
        return [self.values_[s] for s in idx]

    @property
    def exact(self):
        return self.method != "vi"

    def strategies(self):
        """``(sigma, pi)`` keyed by state name, or ``None`` without a profile."""
        if getattr(self, "profile_", None) is None:
            return None
        return PureStrategyProfile.named(self.profile_, self.game_)
