"""Feasibility and witness synthesis for path constraint sets.

Character constraints are decided exactly through per-position byte
domains.  Register comparisons are decided by search: exhaustively when
the bytes they mention span at most 2**16 combinations, otherwise by a
randomized backtracking search under an attempt budget.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional

from .core import CmpOp
from .pathgen import (
    BinOp, CharIn, CharNotIn, Const, ConstraintSet, InputByte, RegCmp, SymExpr,
)

__all__ = [
    "Feasibility", "CharDomain", "Witness", "Infeasible", "Exhausted",
    "char_domains", "quick_feasible", "synthesize", "export_smtlib", "EXHAUSTIVE_LIMIT",
]

EXHAUSTIVE_LIMIT = 1 << 16
_ALL = frozenset(range(256))


class Feasibility(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


class Infeasible(Exception):
    """No tape satisfies the constraint set."""


class Exhausted(Exception):
    """The search budget ran out before a witness was found (inconclusive)."""


@dataclass(frozen=True)
class CharDomain:
    position: int
    allowed: FrozenSet[int]

    @property
    def size(self) -> int:
        return len(self.allowed)


@dataclass(frozen=True)
class Witness:
    input: bytes


def char_domains(cs: ConstraintSet) -> Optional[List[CharDomain]]:
    """Intersect the character constraints per position.

    Returns the domains sorted by position, or None if one of them is empty.
    """
    doms: Dict[int, FrozenSet[int]] = {}
    for c in cs:
        if isinstance(c, CharIn):
            allowed = frozenset(range(c.range.lo, c.range.hi + 1))
        elif isinstance(c, CharNotIn):
            allowed = _ALL - frozenset(range(c.range.lo, c.range.hi + 1))
        else:
            continue
        doms[c.position] = doms.get(c.position, _ALL) & allowed
    if any(not d for d in doms.values()):
        return None
    return [CharDomain(p, doms[p]) for p in sorted(doms)]


def quick_feasible(cs: ConstraintSet) -> Feasibility:
    """Cheap sound check: never calls a satisfiable set infeasible or vice versa."""
    if char_domains(cs) is None:
        return Feasibility.INFEASIBLE
    symbolic = False
    for c in cs:
        if not isinstance(c, RegCmp):
            continue
        if c.positions():
            symbolic = True
        elif not c.holds(()):
            return Feasibility.INFEASIBLE
    return Feasibility.UNKNOWN if symbolic else Feasibility.FEASIBLE


def _length(cs: ConstraintSet) -> int:
    return max([cs.min_length] + [p + 1 for p in cs.positions()])


def synthesize(cs: ConstraintSet, budget: int = 100_000,
               rng: Optional[random.Random] = None) -> Witness:
    """Find a tape satisfying ``cs``.

    Positions not mentioned by any register comparison take their smallest
    allowed byte, or a uniformly drawn one when ``rng`` is given.  Raises
    :class:`Infeasible` when the set is provably unsatisfiable and
    :class:`Exhausted` when the budget runs out first.
    """
    domains = char_domains(cs)
    if domains is None:
        raise Infeasible("empty character domain")
    quick = quick_feasible(cs)
    if quick is Feasibility.INFEASIBLE:
        raise Infeasible("constant comparison is false")

    allowed = {d.position: sorted(d.allowed) for d in domains}
    length = _length(cs)
    tape = [0] * length
    for p in range(length):
        choices = allowed.get(p, range(256))
        tape[p] = rng.choice(choices) if rng is not None else choices[0]

    cmps = [c for c in cs if isinstance(c, RegCmp) and c.positions()]
    if cmps:
        positions = sorted(set().union(*(c.positions() for c in cmps)))
        values = [list(allowed.get(p, range(256))) for p in positions]
        product = 1
        for v in values:
            product *= len(v)
        # large spaces are sampled; without a caller generator a fixed seed keeps it repeatable
        order = rng if rng is not None else (random.Random(0) if product > EXHAUSTIVE_LIMIT else None)
        if order is not None:
            for v in values:
                order.shuffle(v)
        if product <= EXHAUSTIVE_LIMIT:
            assignment = _exhaustive(cmps, positions, values, tape)
        else:
            assignment = _backtrack(cmps, positions, values, tape, budget, order)
        for p, v in zip(positions, assignment):
            tape[p] = v

    data = bytes(tape)
    if not cs.holds(data):
        raise AssertionError("synthesized witness fails its own constraints")
    return Witness(data)


def _exhaustive(cmps, positions, values, tape):
    work = list(tape)
    for combo in itertools.product(*values):
        for p, v in zip(positions, combo):
            work[p] = v
        if all(c.holds(work) for c in cmps):
            return combo
    raise Infeasible("exhaustive search found no assignment")


def _backtrack(cmps, positions, values, tape, budget, rng):
    """Depth-first search with randomized restarts under a doubling attempt cap."""
    index = {p: k for k, p in enumerate(positions)}
    # check each comparison as soon as its last position is assigned
    ready: List[List[RegCmp]] = [[] for _ in positions]
    for c in cmps:
        ready[max(index[p] for p in c.positions())].append(c)
    work = list(tape)
    chosen = [0] * len(positions)
    spent = 0
    cap = 1024

    class _Restart(Exception):
        pass

    def go(k, limit):
        nonlocal spent
        if k == len(positions):
            return True
        for v in values[k]:
            spent += 1
            limit[0] -= 1
            if spent > budget:
                raise Exhausted(f"no witness within {budget} attempts")
            if limit[0] < 0:
                raise _Restart
            work[positions[k]] = v
            chosen[k] = v
            if all(c.holds(work) for c in ready[k]) and go(k + 1, limit):
                return True
        return False

    while True:
        try:
            if go(0, [cap]):
                return chosen
            raise Infeasible("search space exhausted")
        except _Restart:
            cap *= 2
            for v in values:
                rng.shuffle(v)


# --------------------------------------------------------------------------
# SMT-LIB export

_SMT_CMP = {CmpOp.EQ: "=", CmpOp.LT: "<", CmpOp.LE: "<=", CmpOp.GT: ">", CmpOp.GE: ">="}


def _smt_expr(e: SymExpr) -> str:
    if isinstance(e, Const):
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, InputByte):
        return f"b{e.position}"
    left, right = _smt_expr(e.left), _smt_expr(e.right)
    fn = {"+": "+", "-": "-", "*": "*", "/": "tdiv", "%": "tmod"}[e.op]
    return f"({fn} {left} {right})"


def _nonlinear(e: SymExpr) -> bool:
    if not isinstance(e, BinOp):
        return False
    if e.op in "/%" or (e.op == "*" and not isinstance(e.left, Const)
                        and not isinstance(e.right, Const)):
        return True
    return _nonlinear(e.left) or _nonlinear(e.right)


def export_smtlib(cs: ConstraintSet) -> str:
    """SMT-LIB v2 script over integer byte variables ``b0, b1, ...``."""
    length = _length(cs)
    cmps = [c for c in cs if isinstance(c, RegCmp)]
    nonlinear = any(_nonlinear(c.lhs) or _nonlinear(c.rhs) for c in cmps)
    lines = [
        f"(set-logic {'QF_NIA' if nonlinear else 'QF_LIA'})",
        "; register arithmetic is signed 64-bit wrapping in the automaton;",
        "; values here are unbounded integers, exact while no register overflows.",
        "; tdiv/tmod truncate toward zero (C semantics), unlike SMT-LIB div/mod.",
        "(define-fun tdiv ((x Int) (y Int)) Int",
        "  (ite (= (>= x 0) (> y 0)) (div (abs x) (abs y)) (- (div (abs x) (abs y)))))",
        "(define-fun tmod ((x Int) (y Int)) Int (- x (* y (tdiv x y))))",
    ]
    for p in range(length):
        lines.append(f"(declare-const b{p} Int)")
        lines.append(f"(assert (and (>= b{p} 0) (<= b{p} 255)))")
    for c in cs:
        if isinstance(c, CharIn):
            p, r = c.position, c.range
            lines.append(f"(assert (and (>= b{p} {r.lo}) (<= b{p} {r.hi})))")
        elif isinstance(c, CharNotIn):
            p, r = c.position, c.range
            lines.append(f"(assert (or (< b{p} {r.lo}) (> b{p} {r.hi})))")
        else:
            lhs, rhs = _smt_expr(c.lhs), _smt_expr(c.rhs)
            if c.op is CmpOp.NE:
                lines.append(f"(assert (not (= {lhs} {rhs})))")
            else:
                lines.append(f"(assert ({_SMT_CMP[c.op]} {lhs} {rhs}))")
    lines.append("(check-sat)")
    if length:
        lines.append("(get-value (" + " ".join(f"b{p}" for p in range(length)) + "))")
    return "\n".join(lines) + "\n"
