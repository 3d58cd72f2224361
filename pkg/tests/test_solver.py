import itertools
import random

import pytest

from isl.core import CharRange, CmpOp
from isl.pathgen import (
    BinOp, CharIn, CharNotIn, Const, ConstraintSet, EnumBounds, InputByte, PathReport, RegCmp,
    enumerate_paths,
)
from isl.solver import (
    EXHAUSTIVE_LIMIT, Exhausted, Feasibility, Infeasible, char_domains, export_smtlib,
    quick_feasible, synthesize,
)
from isl.interpreter import interpret_ll


def cs(*constraints, min_length=0):
    return ConstraintSet(tuple(constraints), min_length)


DIG19 = CharIn(0, CharRange(49, 57))
LOWER = CharIn(0, CharRange(97, 122))
MINUS48 = BinOp("-", InputByte(0), Const(48))


def test_domain_inclusive():
    (d,) = char_domains(cs(DIG19))
    assert d.position == 0 and d.allowed == frozenset(range(49, 58))


def test_domain_disjoint_is_none():
    assert char_domains(cs(DIG19, LOWER)) is None


def test_domain_exclusive():
    (d,) = char_domains(cs(CharNotIn(0, CharRange(48, 57))))
    assert d.size == 246
    assert d.allowed == frozenset(range(48)) | frozenset(range(58, 256))


def test_quick_feasible():
    assert quick_feasible(cs(RegCmp(Const(1), CmpOp.EQ, Const(2)))) is Feasibility.INFEASIBLE
    assert quick_feasible(cs(DIG19)) is Feasibility.FEASIBLE
    assert quick_feasible(cs(RegCmp(MINUS48, CmpOp.EQ, Const(3)))) is Feasibility.UNKNOWN


def test_synthesize_chars():
    w = synthesize(cs(DIG19, CharIn(1, CharRange(32, 32)))).input
    assert w == b"1 "


def test_synthesize_arithmetic():
    assert synthesize(cs(RegCmp(MINUS48, CmpOp.EQ, Const(3)))).input == b"3"


def test_synthesize_infeasible():
    with pytest.raises(Infeasible):
        synthesize(cs(DIG19, LOWER))
    with pytest.raises(Infeasible):
        synthesize(cs(DIG19, RegCmp(MINUS48, CmpOp.EQ, Const(0))))


def test_min_length_pads():
    assert synthesize(cs(min_length=3)).input == b"\x00\x00\x00"


def test_random_mode_is_seeded():
    c = cs(DIG19, CharIn(3, CharRange(0, 255)))
    a = synthesize(c, rng=random.Random(5)).input
    b = synthesize(c, rng=random.Random(5)).input
    assert a == b and len(a) == 4 and c.holds(a)


def test_large_space_uses_budget():
    # three free bytes: 2**24 combinations, beyond exhaustive search
    total = BinOp("+", BinOp("+", InputByte(0), InputByte(1)), InputByte(2))
    w = synthesize(cs(RegCmp(total, CmpOp.EQ, Const(700)))).input
    assert sum(w) == 700
    with pytest.raises(Exhausted):
        synthesize(cs(RegCmp(total, CmpOp.EQ, Const(5000))), budget=1000)


def test_smtlib_char():
    text = export_smtlib(cs(DIG19))
    assert "(set-logic QF_LIA)" in text
    assert "(assert (and (>= b0 49) (<= b0 57)))" in text
    assert text.rstrip().endswith("(get-value (b0))")


def test_smtlib_empty():
    text = export_smtlib(cs())
    assert "declare-const" not in text
    assert "(check-sat)" in text


def test_smtlib_not_in_and_nonlinear():
    text = export_smtlib(cs(CharNotIn(0, CharRange(48, 57)),
                            RegCmp(BinOp("*", InputByte(0), InputByte(1)), CmpOp.NE, Const(4))))
    assert "(assert (or (< b0 48) (> b0 57)))" in text
    assert "QF_NIA" in text
    assert "(assert (not (= (* b0 b1) 4)))" in text


def test_smtlib_deterministic(ll_specs):
    r = next(enumerate_paths(ll_specs["tot_info"]))
    assert export_smtlib(r.constraints) == export_smtlib(r.constraints)


def _one_by_one(ll_specs):
    m = ll_specs["tot_info"]
    one_by_one = (0, 1, 2, 3, 4, 6, 7, 8, 10, 12, 13)
    for r in enumerate_paths(m, EnumBounds(max_edge_visits=2)):
        if isinstance(r, PathReport) and r.transitions == one_by_one:
            return m, r
    raise AssertionError("path not found")


def test_one_by_one_witness(ll_specs):
    m, r = _one_by_one(ll_specs)
    w = synthesize(r.constraints).input
    assert w == b"1 1\n1\n\n"
    assert interpret_ll(m, w).accepted


def test_z3_agrees_on_one_by_one(ll_specs):
    z3 = pytest.importorskip("z3")
    m, r = _one_by_one(ll_specs)
    s = z3.Solver()
    s.from_string(export_smtlib(r.constraints))
    assert s.check() == z3.sat
    model = s.model()
    values = {d.name(): model[d].as_long() for d in model.decls() if d.arity() == 0}
    w = bytes(values[f"b{k}"] for k in range(len(values)))
    assert r.constraints.holds(w)
    assert interpret_ll(m, w).accepted


def test_z3_agrees_with_truncated_division():
    z3 = pytest.importorskip("z3")
    for a, b in itertools.product((-7, 7), (-2, 2)):
        expr = BinOp("-", InputByte(0), Const(100 - a))  # b0 - (100 - a) == a at b0 = 100
        for op in "/%":
            c = cs(CharIn(0, CharRange(100, 100)),
                   RegCmp(BinOp(op, expr, Const(b)), CmpOp.EQ,
                          Const({"/": int(a / b), "%": a - b * int(a / b)}[op])))
            s = z3.Solver()
            s.from_string(export_smtlib(c))
            assert s.check() == z3.sat
            assert synthesize(c).input == b"d"


def test_limit_constant():
    assert EXHAUSTIVE_LIMIT == 2 ** 16
