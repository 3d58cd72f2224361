"""Concrete acceptance by depth-first search over the non-deterministic choices.

A run starts in ``(start, zero registers, ip=0)``.  The current byte is
``input[ip]``, absent once ``ip`` reaches the end of the tape; a character
check on an absent byte fails.  Acceptance means *some* sequence of enabled
transitions reaches the accept state; unread input may remain.  A global
step budget bounds the search.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple

from .core import (
    CommandError, HlAutomaton, HlTransition, LlAutomaton, Polarity, Registers,
    Strings, apply_command, eval_guard, zero_registers,
)

__all__ = ["Outcome", "Verdict", "MachineState", "interpret_ll", "interpret_hl",
           "replay_ll", "step_ll", "step_hl"]


class Outcome(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    BUDGET_EXCEEDED = "budget"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    trace: Tuple[int, ...] = ()
    steps: int = 0

    @property
    def accepted(self) -> bool:
        return self.outcome is Outcome.ACCEPT


@dataclass(frozen=True)
class MachineState:
    state: str
    regs: Registers
    ip: int


def _cur(data: bytes, ip: int) -> Optional[int]:
    return data[ip] if ip < len(data) else None


def step_ll(t, ms: MachineState, data: bytes, hooks=None) -> Optional[MachineState]:
    """Successor of ``ms`` under low-level transition ``t``, or None if disabled."""
    cur = _cur(data, ms.ip)
    if not eval_guard(t.reg_check, t.char_check, ms.regs, cur):
        return None
    try:
        regs = apply_command(t.command, ms.regs, cur, hooks)
    except CommandError:
        return None
    return MachineState(t.dst, regs, ms.ip + t.move)


def _theta_matches(theta, data: bytes, ip: int) -> Sequence[int]:
    """Tape advances for which ``theta`` holds at ``ip`` (empty when it fails)."""
    if theta is None:
        return (0,)
    if isinstance(theta, Strings):
        return tuple(len(s) for s in theta.values if data.startswith(s, ip))
    cur = _cur(data, ip)
    if cur is None:
        return ()
    if theta.polarity is Polarity.INCLUSIVE:
        ok = any(cur in r for r in theta.ranges)
    else:
        # one exclusion per range, joined as a disjunction
        ok = any(cur not in r for r in theta.ranges)
    return (0,) if ok else ()


def step_hl(t: HlTransition, ms: MachineState, data: bytes, hooks=None):
    """All successors of ``ms`` under high-level transition ``t``.

    The register guard holds on the incoming registers; for a string set the
    commands run after the match (seeing the byte that follows it) and the
    transition's own move is ignored.
    """
    if not all(rc.holds(ms.regs) for rc in t.gamma):
        return []
    out = []
    for consumed in _theta_matches(t.theta, data, ms.ip):
        at = ms.ip + consumed
        regs = ms.regs
        try:
            for cmd in t.phi:
                regs = apply_command(cmd, regs, _cur(data, at), hooks)
        except CommandError:
            continue
        advance = consumed if isinstance(t.theta, Strings) else t.move
        out.append(MachineState(t.dst, regs, ms.ip + advance))
    return out


def _search(automaton, data: bytes, successors, step_limit, hooks) -> Verdict:
    limit = automaton.config.step_limit if step_limit is None else step_limit
    by_state = {s: automaton.outgoing(s) for s in automaton.states}
    accept = automaton.accept
    start = MachineState(automaton.start, zero_registers(automaton.config.max_reg), 0)
    if start.state == accept:
        return Verdict(Outcome.ACCEPT, (), 0)

    def children(ms):
        for i, t in by_state.get(ms.state, ()):
            for nxt in successors(t, ms):
                yield i, nxt

    steps = 0
    trace = []
    stack = [children(start)]
    while stack:
        try:
            i, nxt = next(stack[-1])
        except StopIteration:
            stack.pop()
            if trace:
                trace.pop()
            continue
        if steps >= limit:
            return Verdict(Outcome.BUDGET_EXCEEDED, (), steps)
        steps += 1
        if nxt.state == accept:
            return Verdict(Outcome.ACCEPT, tuple(trace) + (i,), steps)
        trace.append(i)
        stack.append(children(nxt))
    return Verdict(Outcome.REJECT, (), steps)


def interpret_ll(m: LlAutomaton, data: bytes, step_limit: Optional[int] = None,
                 hooks: Optional[Mapping] = None) -> Verdict:
    """Decide acceptance of ``data``; transitions are tried in declaration order."""
    def successors(t, ms):
        nxt = step_ll(t, ms, data, hooks)
        return () if nxt is None else (nxt,)
    return _search(m, bytes(data), successors, step_limit, hooks)


def interpret_hl(m: HlAutomaton, data: bytes, step_limit: Optional[int] = None,
                 hooks: Optional[Mapping] = None) -> Verdict:
    data = bytes(data)
    return _search(m, data, lambda t, ms: step_hl(t, ms, data, hooks), step_limit, hooks)


def replay_ll(m: LlAutomaton, data: bytes, trace: Sequence[int], hooks=None) -> bool:
    """True when following ``trace`` from the start reaches accept on ``data``."""
    ms = MachineState(m.start, zero_registers(m.config.max_reg), 0)
    for i in trace:
        t = m.transitions[i]
        if t.src != ms.state:
            return False
        ms = step_ll(t, ms, bytes(data), hooks)
        if ms is None:
            return False
    return ms.state == m.accept
