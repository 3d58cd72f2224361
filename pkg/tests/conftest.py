import random

import pytest
from hypothesis import settings

from isl.compiler import compile_hl
from isl.core import (
    ACCEPT, CharCheck, LlAutomaton, LlTransition, MachineConfig,
)
from isl.frontend import bundled_names, load_bundled

BUNDLED = bundled_names()

# pytest --hypothesis-profile=stress for a longer property run
settings.register_profile("stress", max_examples=1500, deadline=None)

# (criterion number, verdict line) collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def hl_specs():
    return {name: load_bundled(name) for name in BUNDLED}


@pytest.fixture(scope="session")
def ll_specs(hl_specs):
    return {name: compile_hl(hl) for name, hl in hl_specs.items()}


DIGIT = CharCheck.inclusive((48, 57))


def digit_plus(config=MachineConfig()) -> LlAutomaton:
    """A -> A on a digit (move 1); A -> ACCEPT on a digit (move 1)."""
    return LlAutomaton(("A", ACCEPT), (
        LlTransition("A", "A", char_check=DIGIT, move=1),
        LlTransition("A", ACCEPT, char_check=DIGIT, move=1),
    ), "A", config=config)


def zero_move_loop(config=MachineConfig()) -> LlAutomaton:
    return LlAutomaton(("A", ACCEPT), (LlTransition("A", "A"),), "A", config=config)


def one_step() -> LlAutomaton:
    return LlAutomaton(("A", ACCEPT), (LlTransition("A", ACCEPT, char_check=DIGIT, move=1),), "A")


@pytest.fixture
def rng():
    return random.Random(1234)
