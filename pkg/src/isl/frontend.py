"""Reading and writing ISL documents.

Two input formats are understood:

* the tag format, rooted at ``<FSA>``, with ``<node>`` and ``<edge>``
  declarations (high level only);
* the canonical JSON interchange form produced by :func:`serialize`, for
  either level.

:func:`load` auto-detects the format from the first non-blank character.
"""

from __future__ import annotations

import json
import re
from dataclasses import fields
from importlib import resources
from typing import List, Optional, Tuple, Union

from .core import (
    ACCEPT, COMMAND_TYPES, RESERVED_PATTERN, CharCheck, CharRange, CmpOp, Command, Hook,
    HlAutomaton, HlTransition, LlAutomaton, LlTransition, MachineConfig, Polarity, Reg,
    RegComparison, Strings,
)

__all__ = [
    "ParseError", "parse_hl", "serialize", "load", "to_json_obj", "from_json_obj",
    "canonical_form", "bundled_names", "bundled_text", "load_bundled",
]


class ParseError(ValueError):
    """A document could not be turned into an automaton.

    ``kind`` names the failure (``MissingEnd``, ``MalformedRange``...);
    ``line`` and ``col`` are 1-based and point at the offending text.
    """

    def __init__(self, kind: str, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {kind}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col


# --------------------------------------------------------------------------
# Tag format

_TAG = re.compile(r"<\s*(/?)\s*([A-Za-z_][A-Za-z0-9_]*)\s*(/?)\s*>")
_LEAF = {"name", "start", "end", "charcheck", "regcheck", "stringcheck", "move"}

# Positional slots for the comma form "<add>3,1,2</add>"; unused slots hold -1.
_SLOTS = {
    "storeval": ("res", "val"),
    "storecur": ("res",),
    "storeacc": ("res", "reg1"),
    "add": ("res", "reg1", "reg2"),
    "sub": ("res", "reg1", "reg2"),
    "mult": ("res", "reg1", "reg2"),
    "div": ("res", "reg1", "reg2"),
    "mod": ("res", "reg1", "reg2"),
    "addi": ("res", "reg1", "val"),
    "multi": ("res", "reg1", "val"),
    "assign": ("res", "reg1"),
    "increment": ("res",),
    "decrement": ("res",),
    "nop": (),
}
_ARG_ALIASES = {"dst": "res", "src": "reg1", "const": "val"}


def _to_int(text: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        return int(text, 0)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos: Optional[int] = None) -> Tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, kind: str, message: str, pos: Optional[int] = None) -> ParseError:
        return ParseError(kind, message, *self.where(pos))

    def skip_ws(self):
        while True:
            while self.pos < len(self.text) and self.text[self.pos].isspace():
                self.pos += 1
            if self.text.startswith("<!--", self.pos):
                end = self.text.find("-->", self.pos)
                if end < 0:
                    raise self.error("Syntax", "unterminated comment")
                self.pos = end + 3
            else:
                return

    def peek_tag(self):
        """Return ``(closing, name, selfclosing, end)`` for a tag at pos, else None."""
        m = _TAG.match(self.text, self.pos)
        if not m:
            return None
        return bool(m.group(1)), m.group(2).lower(), bool(m.group(3)), m.end()

    def open_tag(self) -> Tuple[str, bool, int]:
        self.skip_ws()
        tag = self.peek_tag()
        if tag is None or tag[0]:
            found = self.text[self.pos:self.pos + 12] or "end of input"
            raise self.error("Syntax", f"expected an opening tag, found {found!r}")
        start = self.pos
        self.pos = tag[3]
        return tag[1], tag[2], start

    def close_tag(self, name: str):
        self.skip_ws()
        tag = self.peek_tag()
        if tag is None or not tag[0] or tag[1] != name:
            raise self.error("Syntax", f"expected </{name}>")
        self.pos = tag[3]

    def at_close(self, name: str) -> bool:
        self.skip_ws()
        tag = self.peek_tag()
        return tag is not None and tag[0] and tag[1] == name

    def raw_until_close(self, name: str) -> Tuple[str, int]:
        """Take text verbatim up to ``</name>``; returns (text, start offset)."""
        m = re.compile(r"<\s*/\s*" + re.escape(name) + r"\s*>", re.I).search(self.text, self.pos)
        if not m:
            raise self.error("Syntax", f"missing </{name}>")
        start = self.pos
        self.pos = m.end()
        return self.text[start:m.start()], start


_ESCAPES = {"n": 10, "t": 9, "r": 13, "0": 0, "a": 7, "b": 8, "f": 12, "v": 11,
            "\\": 92, "'": 39, '"': 34, "?": 63}


class _LitScanner:
    """Scanner for the bracketed literals inside charCheck and regCheck."""

    def __init__(self, reader: _Reader, text: str, offset: int):
        self.reader, self.text, self.offset, self.i = reader, text, offset, 0

    def fail(self, kind: str, message: str) -> ParseError:
        return self.reader.error(kind, message, self.offset + self.i)

    def ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def take(self, ch: str) -> bool:
        self.ws()
        if self.text.startswith(ch, self.i):
            self.i += len(ch)
            return True
        return False

    def expect(self, ch: str, kind: str):
        if not self.take(ch):
            raise self.fail(kind, f"expected {ch!r} in {self.text.strip()!r}")

    def end(self, kind: str):
        self.ws()
        if self.i != len(self.text):
            raise self.fail(kind, f"trailing text in {self.text.strip()!r}")

    def integer(self, kind: str) -> int:
        self.ws()
        m = re.compile(r"[+-]?(0[xX][0-9a-fA-F]+|\d+)").match(self.text, self.i)
        if not m:
            raise self.fail(kind, f"expected an integer in {self.text.strip()!r}")
        self.i = m.end()
        return _to_int(m.group(0))

    def byte(self) -> int:
        """A byte literal: 'c', "c" (C escapes allowed) or a decimal code."""
        self.ws()
        if self.i < len(self.text) and self.text[self.i] in "'\"":
            quote = self.text[self.i]
            self.i += 1
            body = self._char_body(quote)
            if not self.take(quote):
                raise self.fail("MalformedRange", "unterminated character literal")
            return body
        value = self.integer("MalformedRange")
        if not 0 <= value <= 255:
            raise self.fail("MalformedRange", f"byte value {value} outside 0..255")
        return value

    def _char_body(self, quote: str) -> int:
        t = self.text
        if self.i >= len(t) or t[self.i] == quote:
            raise self.fail("MalformedRange", "empty character literal")
        ch = t[self.i]
        if ch != "\\":
            data = ch.encode("utf-8", "surrogatepass")
            self.i += 1
            if len(data) != 1:
                raise self.fail("MalformedRange", f"{ch!r} is not a single byte")
            return data[0]
        self.i += 1
        if self.i >= len(t):
            raise self.fail("MalformedRange", "dangling escape")
        esc = t[self.i]
        if esc in "xX":
            m = re.compile(r"[0-9a-fA-F]{1,2}").match(t, self.i + 1)
            if not m:
                raise self.fail("MalformedRange", "bad \\x escape")
            self.i = m.end()
            return int(m.group(0), 16)
        m = re.compile(r"[0-7]{1,3}").match(t, self.i)
        if m:
            value = int(m.group(0), 8)
            if value > 255:
                raise self.fail("MalformedRange", "octal escape exceeds a byte")
            self.i = m.end()
            return value
        if esc in _ESCAPES:
            self.i += 1
            return _ESCAPES[esc]
        raise self.fail("MalformedRange", f"unknown escape \\{esc}")


def _parse_char_check(reader: _Reader, text: str, offset: int) -> Tuple[Polarity, CharRange]:
    sc = _LitScanner(reader, text, offset)
    polarity = Polarity.EXCLUSIVE if sc.take("^") else Polarity.INCLUSIVE
    sc.expect("[", "MalformedRange")
    lo = sc.byte()
    sc.expect(",", "MalformedRange")
    hi = sc.byte()
    sc.expect("]", "MalformedRange")
    sc.end("MalformedRange")
    if lo > hi:
        raise reader.error("MalformedRange", f"range [{lo},{hi}] has lo > hi", offset)
    return polarity, CharRange(lo, hi)


def _parse_reg_check(reader: _Reader, text: str, offset: int) -> RegComparison:
    sc = _LitScanner(reader, text, offset)
    op = CmpOp.NE if sc.take("^") else CmpOp.EQ
    sc.expect("[", "MalformedRegCheck")
    lhs = sc.integer("MalformedRegCheck")
    sc.expect(",", "MalformedRegCheck")
    if sc.take("@"):
        rhs: Union[int, Reg] = sc.integer("MalformedRegCheck")
    else:
        rhs = Reg(sc.integer("MalformedRegCheck"))
    sc.expect("]", "MalformedRegCheck")
    sc.end("MalformedRegCheck")
    return RegComparison(lhs, op, rhs)


def _int_arg(reader: _Reader, text: str, pos: int, what: str) -> int:
    try:
        return _to_int(text.strip())
    except ValueError:
        raise reader.error("MalformedFunction", f"{what} must be an integer, got {text.strip()!r}",
                           pos) from None


def _build_command(reader: _Reader, kind: str, args: dict, pos: int) -> Command:
    def arg(name):
        if name not in args or args[name] == -1:
            raise reader.error("MalformedFunction", f"<{kind}> needs <{name}>", pos)
        return args[name]

    if kind == "storeval":
        return COMMAND_TYPES["storeVal"](arg("res"), arg("val"))
    if kind == "storecur":
        return COMMAND_TYPES["storeCur"](arg("res"))
    if kind == "storeacc":
        return COMMAND_TYPES["storeAcc"](arg("reg1"), arg("res"))
    if kind in ("add", "sub", "mult", "div", "mod"):
        return COMMAND_TYPES[kind](arg("res"), arg("reg1"), arg("reg2"))
    if kind == "addi":
        return COMMAND_TYPES["addI"](arg("reg1"), arg("val"), arg("res"))
    if kind == "multi":
        return COMMAND_TYPES["multI"](arg("reg1"), arg("val"), arg("res"))
    if kind == "assign":
        return COMMAND_TYPES["assign"](arg("res"), arg("reg1"))
    if kind in ("increment", "decrement"):
        return COMMAND_TYPES[kind](arg("res"))
    return COMMAND_TYPES["nop"]()


def _parse_function(reader: _Reader) -> Command:
    kind, selfclosing, pos = reader.open_tag()
    if kind == "hook":
        if selfclosing:
            raise reader.error("MalformedFunction", "<hook> needs a name", pos)
        name, _ = reader.raw_until_close("hook")
        if not name.strip():
            raise reader.error("MalformedFunction", "<hook> needs a name", pos)
        return Hook(name.strip())
    if kind not in _SLOTS:
        raise reader.error("MalformedFunction", f"unknown function <{kind}>", pos)
    slots = _SLOTS[kind]
    args = {}
    if not selfclosing:
        reader.skip_ws()
        if reader.peek_tag() is not None:
            while not reader.at_close(kind):
                sub, sub_closing, sub_pos = reader.open_tag()
                if sub_closing:
                    raise reader.error("MalformedFunction", f"<{sub}/> needs a value", sub_pos)
                text, tpos = reader.raw_until_close(sub)
                key = _ARG_ALIASES.get(sub, sub)
                if key not in ("res", "reg1", "reg2", "val"):
                    raise reader.error("MalformedFunction", f"unknown argument <{sub}>", sub_pos)
                args[key] = _int_arg(reader, text, tpos, sub)
            reader.close_tag(kind)
        else:
            text, tpos = reader.raw_until_close(kind)
            parts = [p for p in text.split(",")] if text.strip() else []
            values = [_int_arg(reader, p, tpos, kind) for p in parts]
            if any(v != -1 for v in values[len(slots):]):
                raise reader.error("MalformedFunction",
                                   f"<{kind}> takes {len(slots)} argument(s)", tpos)
            args = dict(zip(slots, values))
    return _build_command(reader, kind, args, pos)


def _parse_edge(reader: _Reader, edge_pos: int):
    """Parse one ``<edge>``; returns the transition and the end-point name offsets."""
    start = end = None
    move = None
    gamma: List[RegComparison] = []
    ranges: List[CharRange] = []
    polarity = None
    strings: List[bytes] = []
    phi: List[Command] = []
    first_char_pos = first_string_pos = None

    while not reader.at_close("edge"):
        tag, selfclosing, pos = reader.open_tag()
        if tag == "function":
            if selfclosing:
                raise reader.error("MalformedFunction", "empty <function>", pos)
            phi.append(_parse_function(reader))
            reader.close_tag("function")
            continue
        if tag not in _LEAF or tag == "name":
            raise reader.error("Syntax", f"unexpected <{tag}> inside <edge>", pos)
        if selfclosing:
            raise reader.error("Syntax", f"<{tag}/> needs content", pos)
        text, tpos = reader.raw_until_close(tag)
        if tag == "start":
            if start is not None:
                raise reader.error("DuplicateStart", "edge has more than one <start>", pos)
            start = (text.strip(), tpos)
        elif tag == "end":
            if end is not None:
                raise reader.error("DuplicateEnd", "edge has more than one <end>", pos)
            end = (text.strip(), tpos)
        elif tag == "move":
            if move is not None:
                raise reader.error("MultipleMove", "edge has more than one <move>", pos)
            move = _int_arg(reader, text, tpos, "move")
            if move < 0:
                raise reader.error("NegativeMove", "move must be non-negative", tpos)
        elif tag == "regcheck":
            gamma.append(_parse_reg_check(reader, text, tpos))
        elif tag == "charcheck":
            pol, rng = _parse_char_check(reader, text, tpos)
            if polarity is not None and pol is not polarity:
                raise reader.error("MixedPolarity",
                                   "negated and plain <charCheck> on one edge", tpos)
            polarity = pol
            ranges.append(rng)
            first_char_pos = tpos if first_char_pos is None else first_char_pos
        elif tag == "stringcheck":
            data = text.encode("utf-8", "surrogatepass")
            if not data:
                raise reader.error("EmptyString", "empty <stringCheck>", tpos)
            if data in strings:
                raise reader.error("DuplicateString", f"duplicate string {text!r}", tpos)
            strings.append(data)
            first_string_pos = tpos if first_string_pos is None else first_string_pos
    reader.close_tag("edge")

    if start is None:
        raise reader.error("MissingStart", "edge without <start>", edge_pos)
    if end is None:
        raise reader.error("MissingEnd", "edge without <end>", edge_pos)
    if ranges and strings:
        raise reader.error("MixedTheta", "<charCheck> and <stringCheck> on one edge",
                           max(first_char_pos, first_string_pos))
    theta = None
    if ranges:
        theta = CharCheck(polarity, tuple(ranges))
    elif strings:
        theta = Strings(tuple(strings))
    return HlTransition(start[0], end[0], tuple(gamma), theta, tuple(phi), move or 0), (start, end)


def _parse_tags(text: str, config: MachineConfig) -> HlAutomaton:
    reader = _Reader(text)
    tag, selfclosing, pos = reader.open_tag()
    if tag != "fsa" or selfclosing:
        raise reader.error("Syntax", "document must be rooted at <FSA>", pos)
    nodes: dict = {}
    edges: List[HlTransition] = []
    ends = []
    while not reader.at_close("fsa"):
        tag, selfclosing, pos = reader.open_tag()
        if tag == "node" and not selfclosing:
            name_tag, sc, npos = reader.open_tag()
            if name_tag != "name" or sc:
                raise reader.error("Syntax", "<node> must contain <name>", npos)
            name, tpos = reader.raw_until_close("name")
            name = name.strip()
            reader.close_tag("node")
            if not name:
                raise reader.error("Syntax", "empty node name", tpos)
            if name == ACCEPT or RESERVED_PATTERN.match(name):
                raise reader.error("ReservedName", f"{name!r} is reserved by the compiler", tpos)
            if name in nodes:
                raise reader.error("DuplicateNode", f"node {name!r} declared twice", tpos)
            nodes[name] = tpos
        elif tag == "edge" and not selfclosing:
            edge, names = _parse_edge(reader, pos)
            edges.append(edge)
            ends += names
        else:
            raise reader.error("Syntax", f"unexpected <{tag}> inside <FSA>", pos)
    reader.close_tag("fsa")
    reader.skip_ws()
    if reader.pos != len(text):
        raise reader.error("Syntax", "text after </FSA>")
    if not nodes:
        raise reader.error("EmptyDocument", "no <node> declared", 0)
    for name, tpos in ends:
        if name not in nodes and name != ACCEPT:
            raise reader.error("UnknownNode", f"node {name!r} is not declared", tpos)
    states = tuple(nodes) + (ACCEPT,)
    return HlAutomaton(states, tuple(edges), next(iter(nodes)), ACCEPT, config)


# --------------------------------------------------------------------------
# JSON interchange


def _cmd_to_json(cmd: Command) -> dict:
    out = {"op": cmd.op}
    out.update({f.name: getattr(cmd, f.name) for f in fields(cmd)})
    return out


def _cmd_from_json(obj: dict) -> Command:
    cls = COMMAND_TYPES[obj["op"]]
    return cls(**{f.name: obj[f.name] for f in fields(cls)})


def _cmp_to_json(rc: RegComparison) -> dict:
    rhs = {"reg": rc.rhs.index} if isinstance(rc.rhs, Reg) else {"const": rc.rhs}
    return {"lhs": rc.lhs, "op": rc.op.value, "rhs": rhs}


def _cmp_from_json(obj: dict) -> RegComparison:
    rhs = obj["rhs"]
    value = Reg(rhs["reg"]) if "reg" in rhs else rhs["const"]
    return RegComparison(obj["lhs"], CmpOp(obj["op"]), value)


def _check_to_json(cc: CharCheck) -> dict:
    return {"polarity": cc.polarity.value, "ranges": [[r.lo, r.hi] for r in cc.ranges]}


def _check_from_json(obj: dict) -> CharCheck:
    return CharCheck(Polarity(obj["polarity"]), tuple(CharRange(lo, hi) for lo, hi in obj["ranges"]))


def _opt(value, conv):
    return None if value is None else conv(value)


def to_json_obj(automaton: Union[HlAutomaton, LlAutomaton]) -> dict:
    """Plain-data form of an automaton (see ``serialize``)."""
    trans = []
    for t in automaton.transitions:
        if isinstance(t, LlTransition):
            trans.append({
                "src": t.src, "dst": t.dst,
                "reg_check": _opt(t.reg_check, _cmp_to_json),
                "char_check": _opt(t.char_check, _check_to_json),
                "command": _opt(t.command, _cmd_to_json),
                "move": t.move,
            })
        else:
            if isinstance(t.theta, Strings):
                theta = {"kind": "strings", "strings": [s.decode("latin-1") for s in t.theta.values]}
            elif t.theta is not None:
                theta = {"kind": "ranges", **_check_to_json(t.theta)}
            else:
                theta = None
            trans.append({
                "src": t.src, "dst": t.dst,
                "gamma": [_cmp_to_json(g) for g in t.gamma],
                "theta": theta,
                "phi": [_cmd_to_json(c) for c in t.phi],
                "move": t.move,
            })
    cfg = automaton.config
    return {
        "level": automaton.level,
        "states": sorted(automaton.states),
        "start": automaton.start,
        "accept": automaton.accept,
        "config": {"max_reg": cfg.max_reg, "max_int": cfg.max_int, "step_limit": cfg.step_limit},
        "transitions": trans,
    }


def from_json_obj(obj: dict) -> Union[HlAutomaton, LlAutomaton]:
    config = MachineConfig(**obj.get("config", {}))
    states = tuple(obj["states"])
    level = obj.get("level", "ll")
    trans = []
    if level == "ll":
        for t in obj["transitions"]:
            trans.append(LlTransition(
                t["src"], t["dst"],
                _opt(t.get("reg_check"), _cmp_from_json),
                _opt(t.get("char_check"), _check_from_json),
                _opt(t.get("command"), _cmd_from_json),
                t.get("move", 0),
            ))
        return LlAutomaton(states, tuple(trans), obj["start"], obj.get("accept", ACCEPT), config)
    if level != "hl":
        raise ValueError(f"unknown level {level!r}")
    for t in obj["transitions"]:
        theta = t.get("theta")
        if theta is None:
            th = None
        elif theta["kind"] == "strings":
            th = Strings(tuple(s.encode("latin-1") for s in theta["strings"]))
        else:
            th = _check_from_json(theta)
        trans.append(HlTransition(
            t["src"], t["dst"],
            tuple(_cmp_from_json(g) for g in t.get("gamma", ())),
            th,
            tuple(_cmd_from_json(c) for c in t.get("phi", ())),
            t.get("move", 0),
        ))
    return HlAutomaton(states, tuple(trans), obj["start"], obj.get("accept", ACCEPT), config)


def serialize(automaton: Union[HlAutomaton, LlAutomaton]) -> str:
    """Canonical JSON text: sorted keys and states, transitions in declaration order."""
    return json.dumps(to_json_obj(automaton), sort_keys=True, indent=2) + "\n"


def _parse_json(text: str) -> Union[HlAutomaton, LlAutomaton]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("Syntax", exc.msg, exc.lineno, exc.colno) from None
    try:
        return from_json_obj(obj)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError("Schema", f"invalid automaton document: {exc!r}", 1, 1) from None


def _decode(text: Union[str, bytes]) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("Encoding", f"not UTF-8 at byte {exc.start}", 1, exc.start + 1) from None
    return text


def load(text: Union[str, bytes], config: Optional[MachineConfig] = None):
    """Parse either format; returns an :class:`HlAutomaton` or :class:`LlAutomaton`.

    ``config`` replaces the machine configuration of tag documents (which
    have no syntax for it); JSON documents carry their own.
    """
    text = _decode(text)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(text)
    if stripped.startswith("<"):
        return _parse_tags(text, config or MachineConfig())
    raise ParseError("Syntax", "expected '<FSA>' or a JSON object", 1, 1)


def parse_hl(text: Union[str, bytes], config: Optional[MachineConfig] = None) -> HlAutomaton:
    automaton = load(text, config)
    if not isinstance(automaton, HlAutomaton):
        raise ParseError("Level", "document describes a low-level automaton", 1, 1)
    return automaton


def canonical_form(automaton: Union[HlAutomaton, LlAutomaton]) -> str:
    """Serialization with states renamed by breadth-first discovery order.

    Two automata are isomorphic (as far as state naming goes) exactly when
    their canonical forms are equal.
    """
    order = [automaton.start]
    seen = {automaton.start}
    i = 0
    while i < len(order):
        for _, t in automaton.outgoing(order[i]):
            if t.dst not in seen:
                seen.add(t.dst)
                order.append(t.dst)
        i += 1
    order += sorted(s for s in automaton.states if s not in seen and s != automaton.accept)
    names = {s: f"q{k}" for k, s in enumerate(s for s in order if s != automaton.accept)}
    names[automaton.accept] = ACCEPT
    obj = to_json_obj(automaton)
    obj["states"] = sorted(names[s] for s in automaton.states)
    obj["start"] = names[automaton.start]
    obj["accept"] = ACCEPT
    for t in obj["transitions"]:
        t["src"], t["dst"] = names[t["src"]], names[t["dst"]]
    obj["transitions"].sort(key=lambda t: json.dumps(t, sort_keys=True))
    return json.dumps(obj, sort_keys=True)


# --------------------------------------------------------------------------
# Bundled specs


def bundled_names() -> List[str]:
    root = resources.files("isl") / "specs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".isl"))


def bundled_text(name: str) -> str:
    return (resources.files("isl") / "specs" / f"{name}.isl").read_text(encoding="utf-8")


def load_bundled(name: str, config: Optional[MachineConfig] = None) -> HlAutomaton:
    return parse_hl(bundled_text(name), config)
