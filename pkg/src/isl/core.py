"""Domain model shared by both ISL levels, plus the one-step semantics.

A low-level transition carries at most one register comparison, one
character check and one command.  A high-level transition carries a
conjunction of comparisons, a character-range set or a string set, and a
command sequence.  Every backend (interpreter, compiler, path enumerator)
takes its meaning of a single step from :func:`eval_guard` and
:func:`apply_command`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, fields
from typing import Callable, ClassVar, Mapping, Optional, Sequence, Tuple, Union

ACCEPT = "ACCEPT"
RESERVED_PATTERN = re.compile(r"FSA\d+\Z")

_MASK64 = (1 << 64) - 1


def wrap64(value: int) -> int:
    """Reduce ``value`` to a signed 64-bit integer (two's complement)."""
    return ((value + (1 << 63)) & _MASK64) - (1 << 63)


def _trunc_quotient(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def tdiv(a: int, b: int) -> int:
    """Signed 64-bit division truncating toward zero. ``b`` must be nonzero."""
    return wrap64(_trunc_quotient(a, b))


def tmod(a: int, b: int) -> int:
    """Remainder matching :func:`tdiv`; takes the sign of the dividend."""
    return wrap64(a - b * _trunc_quotient(a, b))


Registers = Tuple[int, ...]


def zero_registers(count: int) -> Registers:
    return (0,) * count


@dataclass(frozen=True)
class MachineConfig:
    max_reg: int = 16
    max_int: int = 2**31 - 1
    step_limit: int = 100_000

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{f.name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class CharRange:
    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo <= 255 and 0 <= self.hi <= 255):
            raise ValueError(f"range bounds must be bytes, got [{self.lo},{self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"empty range [{self.lo},{self.hi}]")

    def __contains__(self, byte: int) -> bool:
        return self.lo <= byte <= self.hi

    def __str__(self):
        return f"[{_show_byte(self.lo)},{_show_byte(self.hi)}]"


def _show_byte(b: int) -> str:
    if 33 <= b <= 126 and b not in (39, 92):
        return f"'{chr(b)}'"
    return str(b)


class Polarity(enum.Enum):
    INCLUSIVE = "in"
    EXCLUSIVE = "out"


@dataclass(frozen=True)
class CharCheck:
    """Membership of the current byte in a union of ranges, or its negation."""

    polarity: Polarity
    ranges: Tuple[CharRange, ...]

    def __post_init__(self):
        if not self.ranges:
            raise ValueError("a character check needs at least one range")

    @classmethod
    def inclusive(cls, *ranges: Tuple[int, int]) -> "CharCheck":
        return cls(Polarity.INCLUSIVE, tuple(CharRange(lo, hi) for lo, hi in ranges))

    @classmethod
    def exclusive(cls, *ranges: Tuple[int, int]) -> "CharCheck":
        return cls(Polarity.EXCLUSIVE, tuple(CharRange(lo, hi) for lo, hi in ranges))

    def accepts(self, byte: Optional[int]) -> bool:
        if byte is None:
            return False
        member = any(byte in r for r in self.ranges)
        return member if self.polarity is Polarity.INCLUSIVE else not member

    def __str__(self):
        sym = "in" if self.polarity is Polarity.INCLUSIVE else "notin"
        return f"a {sym} " + "|".join(str(r) for r in self.ranges)


class CmpOp(enum.Enum):
    EQ = "EQ"
    NE = "NE"
    LT = "LT"
    LE = "LE"
    GT = "GT"
    GE = "GE"

    def holds(self, a: int, b: int) -> bool:
        return _CMP[self](a, b)

    @property
    def symbol(self) -> str:
        return _CMP_SYMBOL[self]


_CMP = {
    CmpOp.EQ: lambda a, b: a == b,
    CmpOp.NE: lambda a, b: a != b,
    CmpOp.LT: lambda a, b: a < b,
    CmpOp.LE: lambda a, b: a <= b,
    CmpOp.GT: lambda a, b: a > b,
    CmpOp.GE: lambda a, b: a >= b,
}
_CMP_SYMBOL = {
    CmpOp.EQ: "=", CmpOp.NE: "!=", CmpOp.LT: "<",
    CmpOp.LE: "<=", CmpOp.GT: ">", CmpOp.GE: ">=",
}


@dataclass(frozen=True)
class Reg:
    """Register operand on the right-hand side of a comparison."""

    index: int


@dataclass(frozen=True)
class RegComparison:
    """``R[lhs] op rhs`` where ``rhs`` is an integer constant or a :class:`Reg`."""

    lhs: int
    op: CmpOp
    rhs: Union[int, Reg]

    def holds(self, regs: Sequence[int]) -> bool:
        right = regs[self.rhs.index] if isinstance(self.rhs, Reg) else self.rhs
        return self.op.holds(regs[self.lhs], right)

    def registers(self) -> Tuple[int, ...]:
        if isinstance(self.rhs, Reg):
            return (self.lhs, self.rhs.index)
        return (self.lhs,)

    def __str__(self):
        rhs = f"R{self.rhs.index}" if isinstance(self.rhs, Reg) else str(self.rhs)
        return f"R{self.lhs}{self.op.symbol}{rhs}"


# --------------------------------------------------------------------------
# Commands


class CommandError(Exception):
    """A command could not execute; the transition is not taken."""


class DivByZero(CommandError):
    pass


class MissingChar(CommandError):
    pass


class HookUnbound(CommandError):
    pass


@dataclass(frozen=True)
class Command:
    op: ClassVar[str] = ""
    reads_input: ClassVar[bool] = False
    #: field names holding register indices, in declaration order
    reg_fields: ClassVar[Tuple[str, ...]] = ()
    const_fields: ClassVar[Tuple[str, ...]] = ()

    @property
    def target(self) -> Optional[int]:
        return None

    def registers(self) -> Tuple[int, ...]:
        return tuple(getattr(self, f) for f in self.reg_fields)

    def constants(self) -> Tuple[int, ...]:
        return tuple(getattr(self, f) for f in self.const_fields)

    def __str__(self):
        args = ",".join(str(getattr(self, f.name)) for f in fields(self))
        return f"{self.op}({args})"


@dataclass(frozen=True)
class StoreVal(Command):
    res: int
    val: int
    op: ClassVar[str] = "storeVal"
    reg_fields: ClassVar[Tuple[str, ...]] = ("res",)
    const_fields: ClassVar[Tuple[str, ...]] = ("val",)

    @property
    def target(self):
        return self.res


@dataclass(frozen=True)
class StoreCur(Command):
    """``R[res] := code of the current byte``."""

    res: int
    op: ClassVar[str] = "storeCur"
    reads_input: ClassVar[bool] = True
    reg_fields: ClassVar[Tuple[str, ...]] = ("res",)

    @property
    def target(self):
        return self.res


@dataclass(frozen=True)
class StoreAcc(Command):
    """``R[dst] := R[src] + code of the current byte``."""

    src: int
    dst: int
    op: ClassVar[str] = "storeAcc"
    reads_input: ClassVar[bool] = True
    reg_fields: ClassVar[Tuple[str, ...]] = ("src", "dst")

    @property
    def target(self):
        return self.dst


@dataclass(frozen=True)
class _Binary(Command):
    res: int
    r1: int
    r2: int
    reg_fields: ClassVar[Tuple[str, ...]] = ("res", "r1", "r2")

    @property
    def target(self):
        return self.res


@dataclass(frozen=True)
class Add(_Binary):
    op: ClassVar[str] = "add"


@dataclass(frozen=True)
class Sub(_Binary):
    op: ClassVar[str] = "sub"


@dataclass(frozen=True)
class Mult(_Binary):
    op: ClassVar[str] = "mult"


@dataclass(frozen=True)
class Div(_Binary):
    op: ClassVar[str] = "div"


@dataclass(frozen=True)
class Mod(_Binary):
    op: ClassVar[str] = "mod"


@dataclass(frozen=True)
class AddI(Command):
    src: int
    const: int
    dst: int
    op: ClassVar[str] = "addI"
    reg_fields: ClassVar[Tuple[str, ...]] = ("src", "dst")
    const_fields: ClassVar[Tuple[str, ...]] = ("const",)

    @property
    def target(self):
        return self.dst


@dataclass(frozen=True)
class MultI(AddI):
    op: ClassVar[str] = "multI"


@dataclass(frozen=True)
class Assign(Command):
    res: int
    src: int
    op: ClassVar[str] = "assign"
    reg_fields: ClassVar[Tuple[str, ...]] = ("res", "src")

    @property
    def target(self):
        return self.res


@dataclass(frozen=True)
class Increment(Command):
    res: int
    op: ClassVar[str] = "increment"
    reg_fields: ClassVar[Tuple[str, ...]] = ("res",)

    @property
    def target(self):
        return self.res


@dataclass(frozen=True)
class Decrement(Increment):
    op: ClassVar[str] = "decrement"


@dataclass(frozen=True)
class Nop(Command):
    op: ClassVar[str] = "nop"


@dataclass(frozen=True)
class Hook(Command):
    """Placeholder for a user-supplied function, resolved through a registry."""

    name: str
    op: ClassVar[str] = "hook"


COMMAND_TYPES = {
    cls.op: cls
    for cls in (StoreVal, StoreCur, StoreAcc, Add, Sub, Mult, Div, Mod,
                AddI, MultI, Assign, Increment, Decrement, Nop, Hook)
}

HookFn = Callable[[Registers, Optional[int]], Sequence[int]]


def apply_command(cmd: Optional[Command], regs: Registers, cur: Optional[int] = None,
                  hooks: Optional[Mapping[str, HookFn]] = None) -> Registers:
    """Execute one command and return the new register file.

    Arithmetic wraps at signed 64 bits.  Raises :class:`DivByZero`,
    :class:`MissingChar` (input-reading command with the tape exhausted) or
    :class:`HookUnbound`.
    """
    if cmd is None or isinstance(cmd, Nop):
        return regs
    if isinstance(cmd, Hook):
        if not hooks or cmd.name not in hooks:
            raise HookUnbound(cmd.name)
        out = tuple(wrap64(v) for v in hooks[cmd.name](regs, cur))
        if len(out) != len(regs):
            raise CommandError(f"hook {cmd.name!r} changed the register count")
        return out
    if cmd.reads_input and cur is None:
        raise MissingChar(str(cmd))

    if isinstance(cmd, StoreVal):
        value = cmd.val
    elif isinstance(cmd, StoreCur):
        value = cur
    elif isinstance(cmd, StoreAcc):
        value = regs[cmd.src] + cur
    elif isinstance(cmd, _Binary):
        a, b = regs[cmd.r1], regs[cmd.r2]
        if isinstance(cmd, Add):
            value = a + b
        elif isinstance(cmd, Sub):
            value = a - b
        elif isinstance(cmd, Mult):
            value = a * b
        else:
            if b == 0:
                raise DivByZero(str(cmd))
            value = tdiv(a, b) if isinstance(cmd, Div) else tmod(a, b)
    elif isinstance(cmd, MultI):
        value = regs[cmd.src] * cmd.const
    elif isinstance(cmd, AddI):
        value = regs[cmd.src] + cmd.const
    elif isinstance(cmd, Assign):
        value = regs[cmd.src]
    elif isinstance(cmd, Decrement):
        value = regs[cmd.res] - 1
    elif isinstance(cmd, Increment):
        value = regs[cmd.res] + 1
    else:
        raise TypeError(f"unknown command {cmd!r}")

    out = list(regs)
    out[cmd.target] = wrap64(value)
    return tuple(out)


def eval_guard(reg_check: Optional[RegComparison], char_check: Optional[CharCheck],
               regs: Sequence[int], cur: Optional[int]) -> bool:
    if reg_check is not None and not reg_check.holds(regs):
        return False
    if char_check is not None and not char_check.accepts(cur):
        return False
    return True


# --------------------------------------------------------------------------
# Transitions and automata


@dataclass(frozen=True)
class LlTransition:
    src: str
    dst: str
    reg_check: Optional[RegComparison] = None
    char_check: Optional[CharCheck] = None
    command: Optional[Command] = None
    move: int = 0

    def label(self) -> str:
        guard = " & ".join(str(x) for x in (self.reg_check, self.char_check) if x is not None)
        cmd = str(self.command) if self.command is not None else "-"
        return f"{guard or 'true'} / {cmd} / {self.move}"


@dataclass(frozen=True)
class Strings:
    """A set of byte strings matched at the tape pointer."""

    values: Tuple[bytes, ...]

    def __str__(self):
        return "{" + ",".join(repr(v)[1:] for v in self.values) + "}"


Theta = Union[None, CharCheck, Strings]


@dataclass(frozen=True)
class HlTransition:
    src: str
    dst: str
    gamma: Tuple[RegComparison, ...] = ()
    theta: Theta = None
    phi: Tuple[Command, ...] = ()
    move: int = 0

    def label(self) -> str:
        guard = [str(g) for g in self.gamma]
        if self.theta is not None:
            guard.append(str(self.theta))
        cmds = ";".join(str(c) for c in self.phi) or "-"
        return f"{' & '.join(guard) or 'true'} / {cmds} / {self.move}"


@dataclass(frozen=True)
class _Automaton:
    states: Tuple[str, ...]
    transitions: tuple
    start: str
    accept: str = ACCEPT
    config: MachineConfig = MachineConfig()

    level: ClassVar[str] = ""

    @property
    def state_count(self) -> int:
        """Number of states other than the accept state."""
        return sum(1 for s in self.states if s != self.accept)

    def outgoing(self, state: str):
        """``(index, transition)`` pairs leaving ``state`` in declaration order."""
        return [(i, t) for i, t in enumerate(self.transitions) if t.src == state]


@dataclass(frozen=True)
class LlAutomaton(_Automaton):
    transitions: Tuple[LlTransition, ...]
    level: ClassVar[str] = "ll"


@dataclass(frozen=True)
class HlAutomaton(_Automaton):
    transitions: Tuple[HlTransition, ...]
    level: ClassVar[str] = "hl"


# --------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    transition: Optional[int] = None

    def __str__(self):
        where = f"transition {self.transition}: " if self.transition is not None else ""
        return f"{self.code}: {where}{self.message}"


def validate(automaton: _Automaton) -> list:
    """Return every invariant violation as a :class:`Diagnostic` (empty if clean)."""
    diags = []
    cfg = automaton.config
    states = set(automaton.states)

    if len(states) != len(automaton.states):
        diags.append(Diagnostic("DuplicateState", "state list contains duplicates"))
    for s in automaton.states:
        if not s or any(ord(ch) < 32 for ch in s):
            diags.append(Diagnostic("BadStateName", f"invalid state name {s!r}"))
        if automaton.level == "hl" and RESERVED_PATTERN.match(s):
            diags.append(Diagnostic("ReservedName", f"state {s!r} uses a compiler-reserved name"))
    if automaton.start not in states:
        diags.append(Diagnostic("UnknownStart", f"start state {automaton.start!r} is not declared"))
    if automaton.accept not in states:
        diags.append(Diagnostic("UnknownAccept", f"accept state {automaton.accept!r} is not declared"))

    def check_reg(i, index):
        if not (0 <= index < cfg.max_reg):
            diags.append(Diagnostic("RegisterRange",
                                    f"register {index} outside [0,{cfg.max_reg})", i))

    def check_const(i, value):
        if abs(value) > cfg.max_int:
            diags.append(Diagnostic("ConstantRange",
                                    f"constant {value} exceeds max_int {cfg.max_int}", i))

    def check_cmp(i, rc):
        for r in rc.registers():
            check_reg(i, r)
        if not isinstance(rc.rhs, Reg):
            check_const(i, rc.rhs)

    def check_cmd(i, cmd):
        for r in cmd.registers():
            check_reg(i, r)
        for c in cmd.constants():
            check_const(i, c)

    for i, t in enumerate(automaton.transitions):
        for end in (t.src, t.dst):
            if end not in states:
                diags.append(Diagnostic("UnknownState", f"state {end!r} is not declared", i))
        if t.src == automaton.accept:
            diags.append(Diagnostic("AcceptOutgoing", "accept state has an outgoing transition", i))
        if not isinstance(t.move, int) or t.move < 0:
            diags.append(Diagnostic("NegativeMove", f"move {t.move!r} must be >= 0", i))
        if isinstance(t, LlTransition):
            if t.reg_check is not None:
                check_cmp(i, t.reg_check)
            if t.command is not None:
                check_cmd(i, t.command)
        else:
            for rc in t.gamma:
                check_cmp(i, rc)
            for cmd in t.phi:
                check_cmd(i, cmd)
            if isinstance(t.theta, Strings):
                vals = t.theta.values
                if not vals:
                    diags.append(Diagnostic("EmptyStrings", "string set is empty", i))
                if any(len(v) == 0 for v in vals):
                    diags.append(Diagnostic("EmptyString", "string set contains the empty string", i))
                if len(set(vals)) != len(vals):
                    diags.append(Diagnostic("DuplicateString", "string set has duplicates", i))
    return diags
