"""
String sets become a trie
=========================

A sub-command list {push, pull, commit, config} is one high-level
transition.  Compilation spells it out byte by byte; shared prefixes share
states.
"""

from isl import compile_hl, interpret_hl, load_bundled, to_dot
hl = load_bundled("keywords")
ll = compile_hl(hl)

# 12 fresh states, one per proper prefix: p pu pus pul c co com comm commi con conf confi
fresh = [s for s in ll.states if s.startswith("FSA")]
print(len(fresh), "fresh states")
print(sum(1 for t in ll.transitions if t.src in fresh or t.dst in fresh), "trie edges")

# both levels agree on what they accept
for text in (b"pull\n", b"push commit\n", b"pus\n", b"config config\n"):
    print(text, interpret_hl(hl, text).accepted)

# GraphViz source; pipe it through `dot -Tsvg` to look at it
print(to_dot(ll, "keywords")[:300], "...")
