"""The ``tldg 1`` game format and the ``tldg-strategy 1`` strategy format.

Game files are line oriented::

    tldg 1
    discount 1/2
    state u p1 upper reward=1
    state l chance lower
    edge u u
    prob l u 1

``#`` starts a comment.  Serialization sorts everything by name, so
``serialize_game(parse_game(text))`` is stable byte for byte.
"""

import re
from fractions import Fraction

from tldg.errors import ParseError, ValidationError, Violation
from tldg.game import Level, Owner, RawGame, RawState, validate_structure, validate_two_level

RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+)?\Z")
OWNERS = {o.value: o for o in Owner}
LEVELS = {lv.value: lv for lv in Level}


def parse_rational(text):
    if not RATIONAL_RE.match(text):
        raise ValueError(f"not a rational: {text!r}")
    if "/" in text and int(text.split("/")[1]) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(text)


def format_rational(x):
    return str(Fraction(x))


def _lines(text):
    for no, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].split()
        if body:
            yield no, body


def _syntax(line, msg):
    return Violation("SyntaxError", msg, (), line)


def parse_raw(text) -> RawGame:
    """Parse text into an unvalidated :class:`RawGame` (syntax checks only)."""
    bad = []
    raw = RawGame(discount=None)
    declared = {}
    pending = []
    header = False
    for no, tok in _lines(text):
        if not header:
            if tok != ["tldg", "1"]:
                raise ParseError([_syntax(no, "expected header 'tldg 1'")])
            header = True
            continue
        kind = tok[0]
        try:
            if kind == "discount" and len(tok) == 2:
                if raw.discount_line is not None:
                    bad.append(_syntax(no, "discount given twice"))
                raw.discount_line = no
                raw.discount = parse_rational(tok[1])
            elif kind == "state" and len(tok) in (4, 5):
                name, owner, level = tok[1:4]
                if owner not in OWNERS or level not in LEVELS:
                    bad.append(_syntax(no, f"bad owner/level {owner!r} {level!r}"))
                    continue
                reward = None
                if len(tok) == 5:
                    if not tok[4].startswith("reward="):
                        bad.append(_syntax(no, f"expected reward=<rational>, got {tok[4]!r}"))
                        continue
                    reward = parse_rational(tok[4][len("reward="):])
                if name in declared:
                    bad.append(Violation("DuplicateState", f"state {name} already declared on line {declared[name]}", (name,), no))
                    continue
                declared[name] = no
                raw.states.append(RawState(name, OWNERS[owner], LEVELS[level], reward, no))
            elif kind == "edge" and len(tok) == 3:
                pending.append((no, tok[1], tok[2]))
                raw.edges.append((tok[1], tok[2], no))
            elif kind == "prob" and len(tok) == 4:
                pending.append((no, tok[1], tok[2]))
                raw.probs.append((tok[1], tok[2], parse_rational(tok[3]), no))
            else:
                bad.append(_syntax(no, f"cannot parse {' '.join(tok)!r}"))
        except ValueError as exc:
            bad.append(_syntax(no, str(exc)))
    if not header:
        raise ParseError([_syntax(1, "empty file, expected header 'tldg 1'")])
    if raw.discount_line is None:
        bad.append(_syntax(None, "missing discount line"))
    for no, src, dst in pending:
        for nm in (src, dst):
            if nm not in declared:
                bad.append(Violation("UnknownState", f"state {nm} is not declared", (nm,), no))
    if bad:
        raise ParseError(bad)
    return raw


def parse_game(text, check_almost_sure=True):
    """Parse and fully validate a game.  Raises :class:`ValidationError`."""
    game = validate_structure(parse_raw(text))
    if check_almost_sure:
        problems = validate_two_level(game)
        if problems:
            raise ValidationError(problems)
    return game


def serialize_game(game) -> str:
    names = game.names
    out = ["tldg 1", f"discount {format_rational(game.discount)}"]
    for s, nm in enumerate(names):
        line = f"state {nm} {game.owners[s].value} {game.levels[s].value}"
        if game.rewards[s] is not None:
            line += f" reward={format_rational(game.rewards[s])}"
        out.append(line)
    for s, nm in enumerate(names):
        if game.owners[s] is not Owner.CHANCE:
            out.extend(f"edge {nm} {names[t]}" for t in game.succ[s])
    for s, nm in enumerate(names):
        if game.owners[s] is Owner.CHANCE:
            out.extend(f"prob {nm} {names[t]} {format_rational(p)}" for t, p in game.dists[s])
    return "\n".join(out) + "\n"


def parse_strategy(text, game, owner) -> dict:
    """Parse a strategy file for ``owner`` into ``{state index: successor index}``."""
    owner = Owner(owner)
    bad = []
    choices = {}
    header = False
    for no, tok in _lines(text):
        if not header:
            if tok != ["tldg-strategy", "1"]:
                raise ParseError([_syntax(no, "expected header 'tldg-strategy 1'")])
            header = True
            continue
        if tok[0] != "choose" or len(tok) != 3:
            bad.append(_syntax(no, f"cannot parse {' '.join(tok)!r}"))
            continue
        src, dst = tok[1], tok[2]
        unknown = [nm for nm in (src, dst) if nm not in game.names]
        if unknown:
            bad.extend(Violation("UnknownState", f"state {nm} is not in the game", (nm,), no) for nm in unknown)
            continue
        s, t = game.index(src), game.index(dst)
        if game.owners[s] is not owner:
            bad.append(Violation("NotOwned", f"{src} is not a {owner.value} state", (src,), no))
        elif t not in game.succ[s]:
            bad.append(Violation("IllegalChoice", f"{src} -> {dst} is not an edge", (src, dst), no))
        elif s in choices:
            bad.append(Violation("DuplicateChoice", f"{src} chosen twice", (src,), no))
        else:
            choices[s] = t
    if not header:
        raise ParseError([_syntax(1, "empty file, expected header 'tldg-strategy 1'")])
    missing = [game.names[s] for s in game.states_of(owner) if s not in choices]
    if missing:
        bad.append(Violation("MissingChoice", "no choice for " + ", ".join(missing), tuple(missing)))
    if bad:
        raise ParseError(bad)
    return choices


def serialize_strategy(game, choices) -> str:
    out = ["tldg-strategy 1"]
    out.extend(f"choose {game.names[s]} {game.names[t]}" for s, t in sorted(choices.items()))
    return "\n".join(out) + "\n"
