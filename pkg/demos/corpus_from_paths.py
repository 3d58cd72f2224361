"""
Generating a test corpus
========================

Every bounded path through the low-level automaton yields a constraint
set; solving it gives an input that drives the automaton down that path.
"""

import random

from isl import EnumBounds, Infeasible, PathReport, compile_hl, enumerate_paths, export_smtlib
from isl import interpret_ll, load_bundled, synthesize

ll = compile_hl(load_bundled("qsort"))

# the first few paths, with a witness for each
bounds = EnumBounds(max_path_len=12, max_paths=8)
rng = random.Random(7)
for r in enumerate_paths(ll, bounds):
    if not isinstance(r, PathReport):
        print("... more paths beyond", r.max_paths)
        break
    try:
        w = synthesize(r.constraints, rng=rng).input
    except Infeasible:
        continue
    print(r.index, r.transitions, w, interpret_ll(ll, w).accepted)

# the same constraints as an SMT-LIB script for an external solver
first = next(enumerate_paths(ll))
print(export_smtlib(first.constraints))
