"""GraphViz rendering of either automaton level."""

from __future__ import annotations


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(automaton, name: str = "isl") -> str:
    """Digraph with one node per state and edges labelled ``guard / command / move``.

    The start state is drawn bold and the accept state as a double circle.
    """
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;"]
    for s in automaton.states:
        attrs = []
        if s == automaton.accept:
            attrs.append("shape=doublecircle")
        else:
            attrs.append("shape=circle")
        if s == automaton.start:
            attrs.append("style=bold")
        lines.append(f"  {_quote(s)} [{', '.join(attrs)}];")
    for i, t in enumerate(automaton.transitions):
        lines.append(f"  {_quote(t.src)} -> {_quote(t.dst)} [label={_quote(t.label())}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
