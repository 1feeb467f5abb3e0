"""Command-line interface.

Exit codes: 0 success (or ``check`` true), 1 ``check`` false or suite
failure, 2 parse/validation error, 3 usage error.
"""

import argparse
import sys
from dataclasses import replace
from fractions import Fraction

from tldg.errors import GameError, ValidationError
from tldg.evaluation import value_iteration
from tldg.game import Owner, PureStrategyProfile, validate_structure, validate_two_level
from tldg.io import parse_game, parse_raw, parse_rational, parse_strategy, serialize_game, serialize_strategy
from tldg.reductions import freeze_lower
from tldg.semantics import simulate_value
from tldg.solvers import RELATIONS, mdp_lp_solve, solve_enumerate, solve_strategy_improvement
from tldg.testkit import GeneratorConfig, generate, oracle_suite

EXIT_OK, EXIT_FALSE, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _rational_list(text):
    return tuple(_rational(t) for t in text.split(","))


def _float_list(text):
    return tuple(float(t) for t in text.split(","))


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")


def _write(path, text, out):
    if path == "-":
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}")


def _load(path):
    return parse_game(_read(path))


def _profile(game, sigma_path, pi_path):
    sigma = parse_strategy(_read(sigma_path), game, Owner.P1) if sigma_path else parse_strategy("tldg-strategy 1\n", game, Owner.P1)
    pi = parse_strategy(_read(pi_path), game, Owner.P2) if pi_path else parse_strategy("tldg-strategy 1\n", game, Owner.P2)
    return PureStrategyProfile(sigma, pi)


def _config(args):
    return GeneratorConfig(
        n_states=(args.min_states, args.max_states),
        out_degree=(args.min_degree, args.max_degree),
        owner_weights=args.owner_weights,
        lower_weight=args.lower_weight,
        reward_bound=args.reward_bound,
        prob_weight_bound=args.prob_weight_bound,
        discounts=args.discounts,
        seed=args.seed,
    )


def cmd_validate(args, out):
    game = validate_structure(parse_raw(_read(args.file)))
    problems = validate_two_level(game)
    if problems:
        raise ValidationError(problems)
    out.write("ok\n")
    return EXIT_OK


def cmd_solve(args, out):
    game = _load(args.file)
    names = game.names
    if args.method == "vi":
        res = value_iteration(game, tol=args.tol, max_rounds=args.max_rounds)
        for s, v in enumerate(res.values):
            out.write(f"~value {names[s]} {v!r}\n")
        if not res.converged:
            sys.stderr.write(f"value iteration did not converge in {res.rounds} rounds\n")
        return EXIT_OK
    if args.method == "lp":
        if game.p2_states:
            raise UsageError("--method lp needs a game without p2 states")
        values, profile = mdp_lp_solve(game), None
    else:
        res = solve_enumerate(game) if args.method == "enum" else solve_strategy_improvement(game)
        values, profile = res.values, res.profile
    for s, v in enumerate(values):
        out.write(f"value {names[s]} {v}\n")
    if profile is not None:
        for tag, choices in (("p1", profile.sigma), ("p2", profile.pi)):
            for s, t in sorted(choices.items()):
                out.write(f"strategy {tag} {names[s]} {names[t]}\n")
        if args.sigma_out:
            _write(args.sigma_out, serialize_strategy(game, profile.sigma), out)
        if args.pi_out:
            _write(args.pi_out, serialize_strategy(game, profile.pi), out)
    return EXIT_OK


def cmd_check(args, out):
    game = _load(args.file)
    if args.state not in game.names:
        raise UsageError(f"unknown state {args.state}")
    value = solve_strategy_improvement(game).values[game.index(args.state)]
    verdict = RELATIONS[args.rel](value, args.value)
    out.write("true\n" if verdict else "false\n")
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_simulate(args, out):
    game = _load(args.file)
    if args.start not in game.names:
        raise UsageError(f"unknown state {args.start}")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    profile = _profile(game, args.sigma, args.pi)
    rep = simulate_value(game, profile, args.start, args.samples, args.horizon, args.seed, n_jobs=args.workers)
    out.write(f"estimate {rep.estimate!r}\n")
    out.write(f"standard_error {rep.standard_error!r}\n")
    out.write(f"samples {rep.samples}\n")
    out.write(f"horizon {rep.truncation_horizon}\n")
    out.write(f"seed {rep.seed}\n")
    out.write(f"truncation_bound {rep.truncation_bound!r}\n")
    out.write(f"truncated {rep.truncated}\n")
    return EXIT_OK


def cmd_freeze(args, out):
    game = _load(args.file)
    frozen = freeze_lower(game, _profile(game, args.sigma, args.pi))
    _write(args.output, serialize_game(frozen), out)
    return EXIT_OK


def cmd_gen(args, out):
    _write(args.output, serialize_game(generate(_config(args))), out)
    return EXIT_OK


def cmd_suite(args, out):
    report = oracle_suite(_config(args), args.count)
    out.write(f"passed {report.passed}\n")
    out.write(f"failed {report.failed}\n")
    if report.first_failing_seed is not None:
        out.write(f"first_failing_seed {report.first_failing_seed}\n")
        for seed, problems in report.failures:
            for p in problems:
                sys.stderr.write(f"seed {seed}: {p}\n")
    return EXIT_OK if report.ok else EXIT_FALSE


def _generator_flags(p):
    d = GeneratorConfig()
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-states", type=int, default=d.n_states[0])
    p.add_argument("--max-states", type=int, default=d.n_states[1])
    p.add_argument("--min-degree", type=int, default=d.out_degree[0])
    p.add_argument("--max-degree", type=int, default=d.out_degree[1])
    p.add_argument("--owner-weights", type=_float_list, default=d.owner_weights, help="p1,p2,chance")
    p.add_argument("--lower-weight", type=float, default=d.lower_weight)
    p.add_argument("--reward-bound", type=int, default=d.reward_bound)
    p.add_argument("--prob-weight-bound", type=int, default=d.prob_weight_bound)
    p.add_argument("--discounts", type=_rational_list, default=d.discounts, help="comma-separated rationals")


def build_parser():
    parser = _Parser(prog="tldg", description="Solve two-level discounted stochastic games exactly.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a game file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="print values and optimal strategies")
    p.add_argument("file")
    p.add_argument("--method", choices=("si", "vi", "enum", "lp"), default="si")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-rounds", type=int, default=100_000)
    p.add_argument("--sigma-out", help="write the player-1 strategy file here")
    p.add_argument("--pi-out", help="write the player-2 strategy file here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="decide value(state) REL value")
    p.add_argument("file")
    p.add_argument("--state", required=True)
    p.add_argument("--rel", required=True, choices=("ge", "gt", "le", "lt", "eq"))
    p.add_argument("--value", required=True, type=_rational)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate of a profile value")
    p.add_argument("file")
    p.add_argument("--sigma")
    p.add_argument("--pi")
    p.add_argument("--start", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("freeze", help="replace lower states by first-hit chance states")
    p.add_argument("file")
    p.add_argument("--sigma")
    p.add_argument("--pi")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_freeze)

    p = sub.add_parser("gen", help="write a random valid game")
    _generator_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("suite", help="cross-check solvers on random games")
    _generator_flags(p)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out)
    except ValidationError as exc:
        for v in exc.violations:
            err.write(f"error: {v}\n")
        return EXIT_INVALID
    except (UsageError, ValueError) as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except GameError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
