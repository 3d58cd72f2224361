"""
From a matrix spec to path constraints
======================================

Tot_info reads "rows cols", then rows*cols entries, then a blank line.
We compile the bundled spec, run it on a sample, and list the constraints
collected along one accepting path.
"""

# load and compile: the high-level spec has 8 states, the low-level one 9
from isl import compile_hl, interpret_ll, load_bundled
hl = load_bundled("tot_info")
ll = compile_hl(hl)
print(f"HL={hl.state_count} LL={ll.state_count}")

# the one extra state comes from the two register resets on H -> B
for t in ll.transitions:
    print(f"  {t.src:>5} -> {t.dst:<6} {t.label()}")

# a 2x2 matrix is accepted; the accepting trace lists transition indices
sample = b"2 2\n11 11 11 11\n\n"
verdict = interpret_ll(ll, sample)
print(verdict.outcome.value, verdict.trace)

# symbolic walk along A B B C D D E F F G H: a 1x1 matrix
from isl import EnumBounds, enumerate_paths
path = (0, 1, 2, 3, 4, 6, 7, 8, 10, 12, 13)
report = next(r for r in enumerate_paths(ll, EnumBounds(max_edge_visits=2))
              if getattr(r, "transitions", None) == path)
for c in report.constraints:
    print("  ", c)

# R3 is symbolic: (a0 - 48) * (a2 - 48) must equal 1, so both sizes are '1'
from isl import synthesize
print(synthesize(report.constraints).input)
