"""Lowering of high-level ISL automata to low-level ones.

Each high-level transition is unfolded into a chain

    register checks -> character ranges | string trie -> commands

with one check or command per low-level transition, the transition's move
on the last link.  A peephole pass then folds neighbouring links back
together wherever a single low-level transition can still express them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .core import (
    CharCheck, CharRange, Command, HlAutomaton, HlTransition, LlAutomaton, LlTransition,
    Polarity, RegComparison, Strings, validate,
)

__all__ = [
    "CompileError", "PrefixConflict", "FreshNamer", "Fragment",
    "expand_reg_checks", "expand_char_ranges", "expand_strings", "expand_commands",
    "expand_transition", "merge", "compile_transition", "compile_hl", "compile",
]


class CompileError(ValueError):
    def __init__(self, message: str, diagnostics: Sequence = ()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class PrefixConflict(CompileError):
    """One string of a set is a proper prefix of another."""


class FreshNamer:
    """Hands out ``FSA0``, ``FSA1``, ... for compiler-introduced states."""

    def __init__(self, prefix: str = "FSA", start: int = 0):
        self.prefix = prefix
        self.counter = start

    def __call__(self) -> str:
        name = f"{self.prefix}{self.counter}"
        self.counter += 1
        return name


@dataclass
class Fragment:
    """Low-level transitions realising part of one high-level transition.

    ``fresh`` lists the states introduced by the expansion, in chain order.
    """

    edges: List[LlTransition] = field(default_factory=list)
    fresh: List[str] = field(default_factory=list)

    def __add__(self, other: "Fragment") -> "Fragment":
        return Fragment(self.edges + other.edges, self.fresh + other.fresh)


def _chain(items: Sequence, src: str, dst: str, namer: FreshNamer, make, move: int) -> Fragment:
    if not items:
        return Fragment()
    nodes = [src] + [namer() for _ in items[1:]] + [dst]
    edges = [make(item, nodes[k], nodes[k + 1], move if k == len(items) - 1 else 0)
             for k, item in enumerate(items)]
    return Fragment(edges, nodes[1:-1])


def expand_reg_checks(gamma: Sequence[RegComparison], src: str, dst: str,
                      namer: FreshNamer, move: int = 0) -> Fragment:
    """Serialise a conjunction: ``m`` comparisons give ``m`` links, ``m-1`` new states."""
    return _chain(list(gamma), src, dst, namer,
                  lambda rc, a, b, mv: LlTransition(a, b, reg_check=rc, move=mv), move)


def expand_char_ranges(theta: CharCheck, src: str, dst: str, move: int = 0) -> Fragment:
    """One parallel transition per range, each keeping the set's polarity.

    For an exclusive set this makes the high-level meaning "outside at least
    one of the ranges"; write single-range exclusions to avoid surprises.
    """
    return Fragment([
        LlTransition(src, dst, char_check=CharCheck(theta.polarity, (r,)), move=move)
        for r in theta.ranges
    ])


def expand_strings(theta: Strings, src: str, dst: str, namer: FreshNamer) -> Fragment:
    """Build a trie over the strings; ``src`` is its root and every string ends in ``dst``.

    Each trie edge becomes an exact-byte check consuming one byte.
    """
    root: dict = {}
    for s in theta.values:
        node = root
        for b in s:
            node = node.setdefault(b, {})
        node[None] = s

    frag = Fragment()

    def walk(node, name):
        for b in sorted(k for k in node if k is not None):
            child = node[b]
            if None in child:
                if len(child) > 1:
                    raise PrefixConflict(f"{child[None]!r} is a proper prefix of another string")
                target = dst
            else:
                target = namer()
                frag.fresh.append(target)
            frag.edges.append(LlTransition(name, target,
                                           char_check=CharCheck(Polarity.INCLUSIVE, (CharRange(b, b),)),
                                           move=1))
            if target != dst:
                walk(child, target)

    walk(root, src)
    return frag


def expand_commands(phi: Sequence[Command], src: str, dst: str, namer: FreshNamer,
                    move: int = 0) -> Fragment:
    """One command per link, order preserved."""
    return _chain(list(phi), src, dst, namer,
                  lambda cmd, a, b, mv: LlTransition(a, b, command=cmd, move=mv), move)


def expand_transition(t: HlTransition, namer: FreshNamer) -> Fragment:
    """Unfold one high-level transition without merging."""
    segments = []
    if t.gamma:
        segments.append("gamma")
    if t.theta is not None:
        segments.append("theta")
    if t.phi:
        segments.append("phi")
    if not segments:
        return Fragment([LlTransition(t.src, t.dst, move=t.move)])

    # a string match always consumes exactly its own length
    move = 0 if isinstance(t.theta, Strings) else t.move
    final = namer
    namer = FreshNamer("\x01joint")
    frag = Fragment()
    a = t.src
    for k, seg in enumerate(segments):
        last = k == len(segments) - 1
        b = t.dst if last else namer()
        mv = move if last else 0
        if seg == "gamma":
            part = expand_reg_checks(t.gamma, a, b, namer, mv)
        elif seg == "phi":
            part = expand_commands(t.phi, a, b, namer, mv)
        elif isinstance(t.theta, Strings):
            part = expand_strings(t.theta, a, b, namer)
        else:
            part = expand_char_ranges(t.theta, a, b, mv)
        frag.edges += part.edges
        frag.fresh += part.fresh
        if not last:
            frag.fresh.append(b)
        a = b

    # name fresh states in the order the chain reaches them
    names = {}
    for e in frag.edges:
        if e.dst in frag.fresh and e.dst not in names:
            names[e.dst] = final()
    edges = [LlTransition(names.get(e.src, e.src), names.get(e.dst, e.dst), e.reg_check,
                          e.char_check, e.command, e.move) for e in frag.edges]
    return Fragment(edges, list(names.values()))


def _combine(first: LlTransition, second: LlTransition) -> Optional[LlTransition]:
    """Fuse ``first`` followed by ``second`` into one transition, if equivalent."""
    if first.reg_check is not None and second.reg_check is not None:
        return None
    if first.char_check is not None and second.char_check is not None:
        return None
    if first.command is not None and second.command is not None:
        return None
    # the fused guard is evaluated before the fused command runs
    if first.command is not None and second.reg_check is not None:
        return None
    # the fused transition reads the tape where ``first`` started
    if first.move and (second.char_check is not None or
                       (second.command is not None and second.command.reads_input)):
        return None
    return LlTransition(
        first.src, second.dst,
        first.reg_check or second.reg_check,
        first.char_check or second.char_check,
        first.command or second.command,
        first.move + second.move,
    )


def merge(frag: Fragment) -> Fragment:
    """Greedy peephole: eliminate a fresh state when its links fuse pairwise.

    A state is eliminated when it has a single incoming or a single outgoing
    link and every (incoming, outgoing) pair can be expressed as one
    low-level transition.  States are visited once, in chain order.
    """
    edges = list(frag.edges)
    fresh = list(frag.fresh)
    for v in list(fresh):
        ins = [e for e in edges if e.dst == v]
        outs = [e for e in edges if e.src == v]
        if not ins or not outs or (len(ins) > 1 and len(outs) > 1):
            continue
        fused = [_combine(i, o) for i in ins for o in outs]
        if any(f is None for f in fused):
            continue
        at = min(edges.index(e) for e in ins + outs)
        edges = [e for e in edges if e.src != v and e.dst != v]
        edges[at:at] = fused
        fresh.remove(v)
    return Fragment(edges, fresh)


def compile_transition(t: HlTransition, namer: FreshNamer, merged: bool = True) -> Fragment:
    frag = expand_transition(t, namer)
    return merge(frag) if merged else frag


_TEMP = "\x00tmp"


def compile_hl(hl: HlAutomaton, merged: bool = True) -> LlAutomaton:
    """Compile to a low-level automaton; new states are named ``FSA<i>``."""
    problems = [d for d in validate(hl)]
    if problems:
        raise CompileError("high-level automaton does not validate", problems)
    temp = FreshNamer(_TEMP)
    edges: List[LlTransition] = []
    for t in hl.transitions:
        edges += compile_transition(t, temp, merged).edges

    namer = FreshNamer()
    names = {}
    for e in edges:
        for s in (e.src, e.dst):
            if s.startswith(_TEMP) and s not in names:
                names[s] = namer()
    edges = [LlTransition(names.get(e.src, e.src), names.get(e.dst, e.dst),
                          e.reg_check, e.char_check, e.command, e.move) for e in edges]
    ll = LlAutomaton(tuple(hl.states) + tuple(names.values()), tuple(edges),
                     hl.start, hl.accept, hl.config)
    problems = validate(ll)
    if problems:
        raise CompileError("compiled automaton does not validate", problems)
    return ll


compile = compile_hl
