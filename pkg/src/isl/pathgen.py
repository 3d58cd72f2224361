"""Bounded enumeration of low-level automaton paths over a symbolic tape.

Input bytes stay symbolic (``InputByte(k)``); registers hold expression
trees built from them.  Walking a path accumulates, transition by
transition, one constraint per register check and one per character check,
so that any tape satisfying the resulting :class:`ConstraintSet` drives the
automaton along that path to acceptance.  Moves are concrete, so the tape
pointer is a plain integer on every path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .core import (
    Add, AddI, Assign, CharRange, CmpOp, Command, Decrement, Div, Hook, Increment,
    LlAutomaton, LlTransition, Mod, Mult, MultI, Nop, Polarity, Reg, StoreAcc, StoreCur,
    StoreVal, Sub, tdiv, tmod, wrap64,
)

__all__ = [
    "SymExpr", "Const", "InputByte", "BinOp", "Constraint", "CharIn", "CharNotIn", "RegCmp",
    "ConstraintSet", "SymState", "PathReport", "Truncated", "EnumBounds",
    "step_symbolic", "enumerate_paths", "evaluate", "expr_to_json", "constraint_to_json",
]


class EvalError(ArithmeticError):
    pass


# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class InputByte:
    position: int

    def __str__(self):
        return f"a{self.position}"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / %
    left: "SymExpr"
    right: "SymExpr"

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


SymExpr = Union[Const, InputByte, BinOp]


def _arith(op: str, a: int, b: int) -> int:
    if op == "+":
        return wrap64(a + b)
    if op == "-":
        return wrap64(a - b)
    if op == "*":
        return wrap64(a * b)
    if b == 0:
        raise EvalError("division by zero")
    return tdiv(a, b) if op == "/" else tmod(a, b)


def evaluate(expr: SymExpr, tape: Sequence[int]) -> int:
    """Value of ``expr`` under a concrete tape; raises EvalError on x/0."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, InputByte):
        return tape[expr.position]
    return _arith(expr.op, evaluate(expr.left, tape), evaluate(expr.right, tape))


def binop(op: str, left: SymExpr, right: SymExpr) -> SymExpr:
    """Build ``left op right``, folding when both sides are constant."""
    if isinstance(left, Const) and isinstance(right, Const):
        try:
            return Const(_arith(op, left.value, right.value))
        except EvalError:
            pass
    return BinOp(op, left, right)


def expr_positions(expr: SymExpr) -> set:
    if isinstance(expr, InputByte):
        return {expr.position}
    if isinstance(expr, BinOp):
        return expr_positions(expr.left) | expr_positions(expr.right)
    return set()


def expr_to_json(expr: SymExpr):
    if isinstance(expr, Const):
        return {"const": expr.value}
    if isinstance(expr, InputByte):
        return {"input": expr.position}
    return {"op": expr.op, "left": expr_to_json(expr.left), "right": expr_to_json(expr.right)}


# --------------------------------------------------------------------------
# Constraints


@dataclass(frozen=True)
class CharIn:
    """``lo <= input[position] <= hi``."""

    position: int
    range: CharRange

    def holds(self, tape: Sequence[int]) -> bool:
        return self.position < len(tape) and tape[self.position] in self.range

    def positions(self) -> set:
        return {self.position}

    def __str__(self):
        return f"(a{self.position} >= {self.range.lo}) & (a{self.position} <= {self.range.hi})"


@dataclass(frozen=True)
class CharNotIn:
    """``input[position] < lo or input[position] > hi``."""

    position: int
    range: CharRange

    def holds(self, tape: Sequence[int]) -> bool:
        return self.position < len(tape) and tape[self.position] not in self.range

    def positions(self) -> set:
        return {self.position}

    def __str__(self):
        return f"(a{self.position} < {self.range.lo}) | (a{self.position} > {self.range.hi})"


@dataclass(frozen=True)
class RegCmp:
    lhs: SymExpr
    op: CmpOp
    rhs: SymExpr

    def holds(self, tape: Sequence[int]) -> bool:
        try:
            return self.op.holds(evaluate(self.lhs, tape), evaluate(self.rhs, tape))
        except (EvalError, IndexError):
            return False

    def positions(self) -> set:
        return expr_positions(self.lhs) | expr_positions(self.rhs)

    @property
    def folded(self) -> Optional[bool]:
        """Truth value when both sides are constants, else None."""
        if isinstance(self.lhs, Const) and isinstance(self.rhs, Const):
            return self.op.holds(self.lhs.value, self.rhs.value)
        return None

    def __str__(self):
        return f"{self.lhs} {self.op.symbol} {self.rhs}"


Constraint = Union[CharIn, CharNotIn, RegCmp]


def constraint_to_json(c: Constraint) -> dict:
    if isinstance(c, RegCmp):
        return {"kind": "reg_cmp", "lhs": expr_to_json(c.lhs), "op": c.op.value,
                "rhs": expr_to_json(c.rhs)}
    kind = "char_in" if isinstance(c, CharIn) else "char_not_in"
    return {"kind": kind, "pos": c.position, "lo": c.range.lo, "hi": c.range.hi}


@dataclass(frozen=True)
class ConstraintSet:
    """Constraints in accumulation order.

    ``min_length`` is the number of tape bytes the path reads, including
    bytes only consumed by input-reading commands.
    """

    constraints: Tuple[Constraint, ...] = ()
    min_length: int = 0

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def __getitem__(self, k):
        return self.constraints[k]

    def holds(self, tape: Sequence[int]) -> bool:
        return len(tape) >= self.min_length and all(c.holds(tape) for c in self.constraints)

    def positions(self) -> set:
        out = set()
        for c in self.constraints:
            out |= c.positions()
        return out


# --------------------------------------------------------------------------
# Symbolic stepping


@dataclass(frozen=True)
class SymState:
    state: str
    regs: Tuple[SymExpr, ...]
    ip: int = 0
    min_length: int = 0
    flags: Tuple[str, ...] = ()

    @classmethod
    def initial(cls, m: LlAutomaton) -> "SymState":
        return cls(m.start, (Const(0),) * m.config.max_reg)


class DeadStep(Exception):
    """The transition can never be taken (constant division by zero, unbound hook)."""


def _sym_command(cmd: Optional[Command], regs: Tuple[SymExpr, ...], ip: int):
    """New register tuple plus any side constraints the command imposes."""
    if cmd is None or isinstance(cmd, Nop):
        return regs, []
    if isinstance(cmd, Hook):
        raise DeadStep(f"unbound hook {cmd.name!r}")
    side = []
    if isinstance(cmd, StoreVal):
        value: SymExpr = Const(cmd.val)
    elif isinstance(cmd, StoreCur):
        value = InputByte(ip)
    elif isinstance(cmd, StoreAcc):
        value = binop("+", regs[cmd.src], InputByte(ip))
    elif isinstance(cmd, (Add, Sub, Mult)):
        op = {Add: "+", Sub: "-", Mult: "*"}[type(cmd)]
        value = binop(op, regs[cmd.r1], regs[cmd.r2])
    elif isinstance(cmd, (Div, Mod)):
        divisor = regs[cmd.r2]
        if isinstance(divisor, Const):
            if divisor.value == 0:
                raise DeadStep(str(cmd))
        else:
            side.append(RegCmp(divisor, CmpOp.NE, Const(0)))
        value = binop("/" if isinstance(cmd, Div) else "%", regs[cmd.r1], divisor)
    elif isinstance(cmd, MultI):
        value = binop("*", regs[cmd.src], Const(cmd.const))
    elif isinstance(cmd, AddI):
        value = binop("+", regs[cmd.src], Const(cmd.const))
    elif isinstance(cmd, Assign):
        value = regs[cmd.src]
    elif isinstance(cmd, Decrement):
        value = binop("-", regs[cmd.res], Const(1))
    elif isinstance(cmd, Increment):
        value = binop("+", regs[cmd.res], Const(1))
    else:
        raise TypeError(f"unknown command {cmd!r}")
    out = list(regs)
    out[cmd.target] = value
    return tuple(out), side


def step_symbolic(state: SymState, t: LlTransition) -> Tuple[SymState, List[Constraint]]:
    """Take ``t`` symbolically; returns the successor and the constraints it emits.

    Raises :class:`DeadStep` when the transition is never enabled.
    """
    emitted: List[Constraint] = []
    min_length = state.min_length
    if t.reg_check is not None:
        rc = t.reg_check
        rhs = state.regs[rc.rhs.index] if isinstance(rc.rhs, Reg) else Const(rc.rhs)
        emitted.append(RegCmp(state.regs[rc.lhs], rc.op, rhs))
    if t.char_check is not None:
        cls = CharIn if t.char_check.polarity is Polarity.INCLUSIVE else CharNotIn
        emitted.append(cls(state.ip, t.char_check.ranges[0]))
        min_length = max(min_length, state.ip + 1)
    regs, side = _sym_command(t.command, state.regs, state.ip)
    flags = state.flags
    if side and "symbolic-divisor" not in flags:
        flags = flags + ("symbolic-divisor",)
    if t.command is not None and t.command.reads_input:
        min_length = max(min_length, state.ip + 1)
    emitted += side
    return SymState(t.dst, regs, state.ip + t.move, min_length, flags), emitted


# --------------------------------------------------------------------------
# Enumeration


@dataclass(frozen=True)
class EnumBounds:
    max_path_len: int = 64
    max_paths: int = 1000
    max_edge_visits: int = 8
    prune: bool = True

    def __post_init__(self):
        for name in ("max_path_len", "max_paths", "max_edge_visits"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class PathReport:
    index: int
    transitions: Tuple[int, ...]
    constraints: ConstraintSet
    final_ip: int
    sym_regs: Tuple[SymExpr, ...]
    flags: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        out = {
            "index": self.index,
            "transitions": list(self.transitions),
            "constraints": [constraint_to_json(c) for c in self.constraints],
            "final_ip": self.final_ip,
            "min_length": self.constraints.min_length,
        }
        if self.flags:
            out["flags"] = list(self.flags)
        return out


@dataclass(frozen=True)
class Truncated:
    """Stream marker: more paths exist beyond ``max_paths``."""

    max_paths: int

    def to_json(self) -> dict:
        return {"truncated": True, "max_paths": self.max_paths}


def enumerate_paths(m: LlAutomaton, bounds: EnumBounds = EnumBounds()
                    ) -> Iterator[Union[PathReport, Truncated]]:
    """Yield every start-to-accept path within ``bounds``, depth first.

    Transitions are tried in declaration order.  With ``bounds.prune`` a
    prefix whose constraints the solver's quick check refutes is abandoned.
    If a path beyond ``max_paths`` exists, a final :class:`Truncated` is
    yielded instead of it.
    """
    from .solver import Feasibility, quick_feasible

    by_state = {s: m.outgoing(s) for s in m.states}
    found = 0
    # each frame: (symbolic state, constraints so far, trace, visits, child iterator)
    init = SymState.initial(m)
    if init.state == m.accept:
        yield PathReport(0, (), ConstraintSet(), 0, init.regs)
        return

    stack = [(init, (), (), {}, iter(by_state.get(init.state, ())))]
    while stack:
        state, cons, trace, visits, it = stack[-1]
        try:
            i, t = next(it)
        except StopIteration:
            stack.pop()
            continue
        if len(trace) >= bounds.max_path_len or visits.get(i, 0) >= bounds.max_edge_visits:
            continue
        try:
            nxt, emitted = step_symbolic(state, t)
        except DeadStep:
            continue
        new_cons = cons + tuple(emitted)
        cs = ConstraintSet(new_cons, nxt.min_length)
        if bounds.prune and emitted and quick_feasible(cs) is Feasibility.INFEASIBLE:
            continue
        new_trace = trace + (i,)
        if nxt.state == m.accept:
            if found >= bounds.max_paths:
                yield Truncated(bounds.max_paths)
                return
            yield PathReport(found, new_trace, cs, nxt.ip, nxt.regs, nxt.flags)
            found += 1
            continue
        new_visits = dict(visits)
        new_visits[i] = new_visits.get(i, 0) + 1
        stack.append((nxt, new_cons, new_trace, new_visits, iter(by_state.get(nxt.state, ()))))
