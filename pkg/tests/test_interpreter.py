import pytest
from hypothesis import given, settings, strategies as st

from conftest import digit_plus, zero_move_loop
from isl.core import ACCEPT, CmpOp, HlAutomaton, HlTransition, MachineConfig, RegComparison, Strings
from isl.interpreter import Outcome, interpret_hl, interpret_ll, replay_ll

TOT_SAMPLE = b"2 2\n11 11 11 11\n\n"


def test_digit_plus_accepts():
    v = interpret_ll(digit_plus(), b"123")
    assert v.accepted
    assert replay_ll(digit_plus(), b"123", v.trace)


def test_digit_plus_empty_rejects():
    assert interpret_ll(digit_plus(), b"").outcome is Outcome.REJECT


def test_trailing_input_allowed():
    assert interpret_ll(digit_plus(), b"1x").accepted
    assert not interpret_ll(digit_plus(), b"x1").accepted


def test_zero_move_loop_exceeds_budget():
    v = interpret_ll(zero_move_loop(MachineConfig(step_limit=10)), b"abc")
    assert v.outcome is Outcome.BUDGET_EXCEEDED
    assert interpret_ll(zero_move_loop(), b"", step_limit=50).outcome is Outcome.BUDGET_EXCEEDED


def test_tot_info_sample(ll_specs, hl_specs):
    v = interpret_ll(ll_specs["tot_info"], TOT_SAMPLE)
    assert v.accepted
    assert replay_ll(ll_specs["tot_info"], TOT_SAMPLE, v.trace)
    assert interpret_hl(hl_specs["tot_info"], TOT_SAMPLE).accepted


@pytest.mark.parametrize("data, ok", [
    (b"1 1\n5\n\n", True),
    (b"1 1\n5\n", False),       # the blank terminating line is missing
    (b"1 2\n5 55\n\n", True),
    (b"1 2\n5\n", False),        # too few entries
    (b"2 1\n5 55\n\n", True),
    (b"1 1\n5\n1 1\n7\n\n", True),  # two matrices, the second read after H -> B
    (b"0 1\n5\n", False),
    (b"1 1\n", False),
])
def test_tot_info_language(ll_specs, hl_specs, data, ok):
    assert interpret_ll(ll_specs["tot_info"], data).accepted is ok
    assert interpret_hl(hl_specs["tot_info"], data).accepted is ok


def test_keywords_hl(hl_specs):
    kw = hl_specs["keywords"]
    assert interpret_hl(kw, b"pull\n").accepted
    assert interpret_hl(kw, b"push commit config\n").accepted
    assert not interpret_hl(kw, b"pus\n").accepted


def test_keyword_string_only():
    hl = HlAutomaton(("A", ACCEPT), (
        HlTransition("A", ACCEPT, theta=Strings(
            (b"push", b"pull", b"commit", b"config"))),), "A")
    assert interpret_hl(hl, b"pull").accepted
    assert not interpret_hl(hl, b"pus").accepted


def test_registers_start_at_zero():
    hl = HlAutomaton(("A", ACCEPT), (HlTransition("A", ACCEPT, gamma=(RegComparison(1, CmpOp.EQ, 0),)),), "A")
    v = interpret_hl(hl, b"")
    assert v.accepted and v.trace == (0,)


def test_qsort_language(ll_specs):
    q = ll_specs["qsort"]
    for data in (b"5\n", b"-3 +4 10\n", b"1 2 3\n"):
        assert interpret_ll(q, data).accepted, data
    for data in (b"-\n", b"\n", b"1 \n", b"a\n"):
        assert not interpret_ll(q, data).accepted, data


def test_binary_search_language(ll_specs):
    b = ll_specs["binary_search"]
    assert interpret_ll(b, b"0 7\n").accepted
    assert interpret_ll(b, b"3 -5 1 -2 30\n").accepted
    assert not interpret_ll(b, b"3 5 1 2\n").accepted
    assert not interpret_ll(b, b"1 5 1 2\n").accepted


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=8), st.integers(1, 60))
def test_budget_is_monotone(data, budget):
    m = digit_plus()
    low = interpret_ll(m, data, step_limit=budget)
    if low.accepted:
        assert interpret_ll(m, data, step_limit=budget * 2).accepted
