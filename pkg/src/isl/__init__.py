"""Input specification language: register automata for structured inputs.

High-level specs are parsed from the ``<FSA>`` tag format, compiled to
low-level automata with one check and one command per transition, run on
concrete inputs, and enumerated into per-path constraint sets from which
concrete test inputs are synthesized.
"""

from .core import (
    ACCEPT, CharCheck, CharRange, CmpOp, HlAutomaton, HlTransition, LlAutomaton,
    LlTransition, MachineConfig, Polarity, Reg, RegComparison, Strings, apply_command,
    eval_guard, validate,
)
from .frontend import ParseError, load, load_bundled, parse_hl, serialize
from .compiler import CompileError, PrefixConflict, compile_hl
from .interpreter import Outcome, Verdict, interpret_hl, interpret_ll
from .pathgen import ConstraintSet, EnumBounds, PathReport, Truncated, enumerate_paths
from .solver import Exhausted, Feasibility, Infeasible, export_smtlib, quick_feasible, synthesize
from .dot import to_dot

__all__ = [
    "ACCEPT", "CharCheck", "CharRange", "CmpOp", "HlAutomaton", "HlTransition",
    "LlAutomaton", "LlTransition", "MachineConfig", "Polarity", "Reg", "RegComparison",
    "Strings", "apply_command", "eval_guard", "validate", "ParseError", "load",
    "load_bundled", "parse_hl", "serialize", "CompileError", "PrefixConflict", "compile_hl",
    "Outcome", "Verdict", "interpret_hl", "interpret_ll", "ConstraintSet", "EnumBounds",
    "PathReport", "Truncated", "enumerate_paths", "Exhausted", "Feasibility", "Infeasible",
    "export_smtlib", "quick_feasible", "synthesize", "to_dot",
]

__version__ = "0.1.0"
