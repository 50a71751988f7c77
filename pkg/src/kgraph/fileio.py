"""Line-oriented text formats for k-graphs, cocycles and group actions.

KGraph files::

    kgraph 1
    rank 2
    vertex v
    edge 1 e v v          # color, name, range, source
    square e f = f e      # a (lower color) b  =  b' a'
    interior v            # optional: marks a finite window of an infinite graph

Cocycle files::

    group Z2
    label e = 0
    label f = 1

Action files (one line per group generator)::

    group Z2
    gen 1: [0]|v->[1]|v, ...

Names are single whitespace-free tokens.  Ids of constructed graphs are
written with ``format_id``, so tuples become ``[a|b]``.
"""

from __future__ import annotations

import re

from .constructions import Cocycle, GroupAction, GroupSpec
from .core import Edge, KGraph, Skeleton, format_id, validate
from .errors import DuplicateDeclaration, FileSyntaxError, UnknownName


def _lines(text):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


# -- k-graphs ------------------------------------------------------------------

def parse_kgraph(text):
    """Return ``(skeleton, squares, interior)``; ``interior`` is None unless declared."""
    rank = None
    header = False
    vertices, seen_v = [], set()
    edges, by_name = [], {}
    squares = {}
    interior = None
    for no, line in _lines(text):
        tok = line.split()
        head = tok[0]
        if not header:
            if tok != ["kgraph", "1"]:
                raise FileSyntaxError("file must start with 'kgraph 1'", no)
            header = True
            continue
        if head == "kgraph":
            raise DuplicateDeclaration("second 'kgraph' header", no)
        if head == "rank":
            if rank is not None:
                raise DuplicateDeclaration("rank declared twice", no)
            if len(tok) != 2 or not tok[1].isdigit() or int(tok[1]) < 1:
                raise FileSyntaxError("expected 'rank K' with K >= 1", no)
            rank = int(tok[1])
        elif head == "vertex":
            if len(tok) != 2:
                raise FileSyntaxError("expected 'vertex NAME'", no)
            name = tok[1]
            if name in seen_v or name in by_name:
                raise DuplicateDeclaration(f"name {name!r} declared twice", no)
            seen_v.add(name)
            vertices.append(name)
        elif head == "edge":
            if rank is None:
                raise FileSyntaxError("rank must be declared before edges", no)
            if len(tok) != 5 or not tok[1].isdigit():
                raise FileSyntaxError("expected 'edge COLOR NAME RANGE SOURCE'", no)
            color, name, r, s = int(tok[1]), tok[2], tok[3], tok[4]
            if not 1 <= color <= rank:
                raise FileSyntaxError(f"color {color} outside 1..{rank}", no)
            if name in by_name or name in seen_v:
                raise DuplicateDeclaration(f"name {name!r} declared twice", no)
            for v in (r, s):
                if v not in seen_v:
                    raise UnknownName(f"undeclared vertex {v!r}", no)
            e = Edge(name, color, r, s)
            by_name[name] = e
            edges.append(e)
        elif head == "square":
            m = re.fullmatch(r"square\s+(\S+)\s+(\S+)\s*=\s*(\S+)\s+(\S+)", line)
            if not m:
                raise FileSyntaxError("expected 'square A B = BP AP'", no)
            a, b, bp, ap = m.groups()
            for x in (a, b, bp, ap):
                if x not in by_name:
                    raise UnknownName(f"undeclared edge {x!r}", no)
            if (a, b) in squares:
                raise DuplicateDeclaration(f"second square for the pair ({a}, {b})", no)
            squares[(a, b)] = (bp, ap)
        elif head == "interior":
            if len(tok) != 2:
                raise FileSyntaxError("expected 'interior NAME'", no)
            if tok[1] not in seen_v:
                raise UnknownName(f"undeclared vertex {tok[1]!r}", no)
            interior = interior if interior is not None else []
            if tok[1] in interior:
                raise DuplicateDeclaration(f"vertex {tok[1]!r} marked interior twice", no)
            interior.append(tok[1])
        else:
            raise FileSyntaxError(f"unknown statement {head!r}", no)
    if not header:
        raise FileSyntaxError("empty file: expected 'kgraph 1'", 1)
    if rank is None:
        raise FileSyntaxError("missing 'rank' statement", 1)
    return Skeleton(rank, vertices, edges), squares, interior


def build(skeleton, squares, interior=None) -> KGraph:
    """Rank <= 2 goes through ``validate``; higher ranks also need associative squares.

    A declared interior gives a window, checked only where it is trusted.
    """
    if interior is None and skeleton.rank <= 2:
        return validate(skeleton, squares)
    L = KGraph(skeleton.rank, skeleton.vertices, skeleton.edges, squares, interior=interior,
               kind="file" if interior is None else "window")
    if interior is None:
        L.check_associativity()
    return L


def loads_kgraph(text) -> KGraph:
    return build(*parse_kgraph(text))


def load_kgraph(path) -> KGraph:
    with open(path, encoding="utf-8") as fh:
        return loads_kgraph(fh.read())


def dumps_kgraph(L: KGraph) -> str:
    out = ["kgraph 1", f"rank {L.rank}"]
    out += [f"vertex {format_id(v)}" for v in L.vertices]
    out += [f"edge {e.color} {format_id(e.name)} {format_id(e.range)} {format_id(e.source)}"
            for e in L.edges.values()]
    out += [f"square {format_id(a)} {format_id(b)} = {format_id(bp)} {format_id(ap)}"
            for (a, b), (bp, ap) in L.squares.items()]
    if L.windowed:
        out += [f"interior {format_id(v)}" for v in L.vertices if v in L.interior]
    return "\n".join(out) + "\n"


def dump_kgraph(L: KGraph, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_kgraph(L))


# -- cocycles and actions --------------------------------------------------------

def _group_line(lines):
    try:
        no, line = next(lines)
    except StopIteration:
        raise FileSyntaxError("empty file: expected 'group ...'", 1) from None
    tok = line.split(None, 1)
    if tok[0] != "group" or len(tok) != 2:
        raise FileSyntaxError("file must start with 'group ...'", no)
    try:
        return GroupSpec.parse(tok[1])
    except FileSyntaxError as exc:
        raise FileSyntaxError(str(exc), no) from None


def _element(G, text, no):
    try:
        g = G.element(text)
    except FileSyntaxError as exc:
        raise FileSyntaxError(exc.args[0] if exc.args else str(exc), no) from None
    if not G.contains(g):
        raise FileSyntaxError(f"{text!r} lies outside the window of {G}", no)
    return g


def _names(L: KGraph):
    return {format_id(v): v for v in L.vertices}, {format_id(e): e for e in L.edges}


def parse_cocycle(text, L: KGraph) -> Cocycle:
    lines = _lines(text)
    G = _group_line(lines)
    _, enames = _names(L)
    values = {}
    for no, line in lines:
        m = re.fullmatch(r"label\s+(\S+)\s*=\s*(.+)", line)
        if not m:
            raise FileSyntaxError("expected 'label EDGE = ELEMENT'", no)
        name, elt = m.groups()
        if name not in enames:
            raise UnknownName(f"unknown edge {name!r}", no)
        e = enames[name]
        if e in values:
            raise DuplicateDeclaration(f"edge {name!r} labelled twice", no)
        values[e] = _element(G, elt, no)
    missing = [format_id(e) for e in L.edges if e not in values]
    if missing:
        raise FileSyntaxError(f"no label for edge {missing[0]!r}", 1)
    return Cocycle(G, values)


def dumps_cocycle(c: Cocycle, L: KGraph) -> str:
    out = [f"group {c.group}"]
    out += [f"label {format_id(e)} = {','.join(map(str, c.values[e]))}" for e in L.edges]
    return "\n".join(out) + "\n"


def parse_action(text, L: KGraph) -> GroupAction:
    lines = _lines(text)
    G = _group_line(lines)
    vnames, enames = _names(L)
    gens = {}
    for no, line in lines:
        m = re.fullmatch(r"gen\s+(\d+)\s*:\s*(.*)", line)
        if not m:
            raise FileSyntaxError("expected 'gen I: x->y, ...'", no)
        i = int(m.group(1))
        if not 1 <= i <= G.rank:
            raise FileSyntaxError(f"generator {i} outside 1..{G.rank}", no)
        if i in gens:
            raise DuplicateDeclaration(f"generator {i} given twice", no)
        vm, em = {}, {}
        for item in filter(None, (x.strip() for x in m.group(2).split(","))):
            parts = [p.strip() for p in item.split("->")]
            if len(parts) != 2 or not all(parts):
                raise FileSyntaxError(f"bad assignment {item!r}", no)
            x, y = parts
            if x in vnames and y in vnames:
                table, key, val = vm, vnames[x], vnames[y]
            elif x in enames and y in enames:
                table, key, val = em, enames[x], enames[y]
            else:
                bad = x if x not in vnames and x not in enames else y
                raise UnknownName(f"unknown or mismatched name {bad!r}", no)
            if key in table:
                raise DuplicateDeclaration(f"{x!r} assigned twice", no)
            table[key] = val
        for v in L.vertices:
            if v not in vm:
                raise FileSyntaxError(f"generator {i} does not move vertex {format_id(v)!r}", no)
        for e in L.edges:
            if e not in em:
                raise FileSyntaxError(f"generator {i} does not move edge {format_id(e)!r}", no)
        gens[i] = (vm, em)
    missing = [i for i in range(1, G.rank + 1) if i not in gens]
    if missing:
        raise FileSyntaxError(f"no line for generator {missing[0]}", 1)
    return GroupAction(G, [gens[i] for i in range(1, G.rank + 1)])


def dumps_action(act: GroupAction, L: KGraph) -> str:
    out = [f"group {act.group}"]
    for i, (vm, em) in enumerate(act.gens, 1):
        items = [f"{format_id(v)}->{format_id(vm[v])}" for v in L.vertices]
        items += [f"{format_id(e)}->{format_id(em[e])}" for e in L.edges]
        out.append(f"gen {i}: " + ", ".join(items))
    return "\n".join(out) + "\n"


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_cocycle(path, L):
    return parse_cocycle(_read(path), L)


def load_action(path, L):
    return parse_action(_read(path), L)
