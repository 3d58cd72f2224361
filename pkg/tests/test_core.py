import pytest
from hypothesis import given, strategies as st

from isl.core import (
    ACCEPT, Add, AddI, Assign, CharCheck, CharRange, CmpOp, Decrement, Div, DivByZero, Hook,
    HookUnbound, Increment, LlAutomaton, LlTransition, MachineConfig, MissingChar, Mod, Mult,
    MultI, Nop, Reg, RegComparison, StoreAcc, StoreCur, StoreVal, Sub, eval_guard, tdiv, tmod,
    validate, wrap64, apply_command, zero_registers,
)


def regs(**vals):
    out = [0] * 16
    for k, v in vals.items():
        out[int(k[1:])] = v
    return tuple(out)


def test_add():
    assert apply_command(Add(3, 1, 2), regs(r1=2, r2=3))[3] == 5


def test_mult():
    assert apply_command(Mult(3, 1, 2), regs(r1=2, r2=3))[3] == 6


def test_store_cur_reads_ascii():
    assert apply_command(StoreCur(1), regs(), cur=ord("7"))[1] == 55


def test_decrement():
    assert apply_command(Decrement(3), regs(r3=4))[3] == 3


def test_other_commands():
    r = regs(r1=7, r2=-2)
    assert apply_command(StoreVal(4, -9), r)[4] == -9
    assert apply_command(StoreAcc(1, 5), r, cur=10)[5] == 17
    assert apply_command(Sub(3, 1, 2), r)[3] == 9
    assert apply_command(Div(3, 1, 2), r)[3] == -3
    assert apply_command(Mod(3, 1, 2), r)[3] == 1
    assert apply_command(AddI(1, 5, 3), r)[3] == 12
    assert apply_command(MultI(1, 5, 3), r)[3] == 35
    assert apply_command(Assign(0, 2), r)[0] == -2
    assert apply_command(Increment(1), r)[1] == 8
    assert apply_command(Nop(), r) == r
    assert apply_command(None, r) == r


def test_truncated_division():
    assert (tdiv(-7, 2), tmod(-7, 2)) == (-3, -1)
    assert (tdiv(7, -2), tmod(7, -2)) == (-3, 1)
    assert tdiv(-2**63, -1) == -2**63  # wraps


def test_wrapping():
    big = regs(r1=2**63 - 1, r2=1)
    assert apply_command(Add(3, 1, 2), big)[3] == -2**63
    assert wrap64(2**64 + 5) == 5


def test_command_errors():
    with pytest.raises(DivByZero):
        apply_command(Div(0, 1, 2), regs(r1=1))
    with pytest.raises(MissingChar):
        apply_command(StoreCur(1), regs(), cur=None)
    with pytest.raises(HookUnbound):
        apply_command(Hook("h"), regs())


def test_hook_bound():
    out = apply_command(Hook("inc0"), regs(), hooks={"inc0": lambda r, c: (r[0] + 1,) + r[1:]})
    assert out[0] == 1


def test_eval_guard_examples():
    r = regs(r3=1)
    assert not eval_guard(None, CharCheck.inclusive((49, 57)), r, ord("a"))
    assert eval_guard(RegComparison(3, CmpOp.EQ, 1), None, r, None)
    assert eval_guard(None, CharCheck.exclusive((48, 57)), r, ord(" "))
    assert not eval_guard(None, CharCheck.inclusive((32, 32)), r, None)
    assert not eval_guard(None, CharCheck.exclusive((32, 32)), r, None)


def test_register_rhs():
    rc = RegComparison(1, CmpOp.LT, Reg(2))
    assert rc.holds(regs(r1=1, r2=2))
    assert not rc.holds(regs(r1=2, r2=2))


@given(st.integers(-2**63, 2**63 - 1), st.integers(-2**63, 2**63 - 1).filter(bool))
def test_div_mod_identity(a, b):
    assert wrap64(tdiv(a, b) * b + tmod(a, b)) == a
    assert abs(tmod(a, b)) < abs(b)
    assert tmod(a, b) == 0 or (tmod(a, b) > 0) == (a > 0)


@given(st.sampled_from(list(CmpOp)), st.integers(-5, 5), st.integers(-5, 5))
def test_cmp_ops(op, a, b):
    expected = {"eq": a == b, "ne": a != b, "lt": a < b, "le": a <= b,
                "gt": a > b, "ge": a >= b}[op.name.lower()]
    assert op.holds(a, b) is expected


def _auto(*transitions, states=("A", ACCEPT), config=MachineConfig()):
    return LlAutomaton(states, transitions, "A", config=config)


def test_validate_unknown_state():
    diags = validate(_auto(LlTransition("A", "Z")))
    assert [d.code for d in diags] == ["UnknownState"]


def test_validate_register_range():
    cfg = MachineConfig(max_reg=4)
    diags = validate(_auto(LlTransition("A", ACCEPT, reg_check=RegComparison(4, CmpOp.EQ, 0)),
                           config=cfg))
    assert [d.code for d in diags] == ["RegisterRange"]


def test_validate_constant_and_move():
    cfg = MachineConfig(max_int=100)
    diags = validate(_auto(LlTransition("A", ACCEPT, command=StoreVal(0, 101), move=-1),
                           config=cfg))
    assert sorted(d.code for d in diags) == ["ConstantRange", "NegativeMove"]


def test_validate_accept_outgoing():
    diags = validate(_auto(LlTransition(ACCEPT, "A")))
    assert [d.code for d in diags] == ["AcceptOutgoing"]


def test_validate_bundled_clean(ll_specs, hl_specs):
    for m in list(ll_specs.values()) + list(hl_specs.values()):
        assert validate(m) == []


def test_char_range_checks():
    with pytest.raises(ValueError):
        CharRange(5, 4)
    with pytest.raises(ValueError):
        CharRange(0, 256)
    assert 5 in CharRange(5, 5)


def test_machine_config_rejects_nonsense():
    with pytest.raises(ValueError):
        MachineConfig(max_reg=0)


def test_zero_registers():
    assert zero_registers(3) == (0, 0, 0)
