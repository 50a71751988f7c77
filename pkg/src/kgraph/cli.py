"""Command-line front end: ``kgraph SUBCOMMAND ...``.

Exit codes: 0 success (UNKNOWN verdicts included), 1 when an asserting
command finds a failure, 2 for usage, parse and input errors.
"""

from __future__ import annotations

import argparse
import re
import sys

from . import degree as dg
from .algebra import bratteli
from .constructions import (
    MonoidMap,
    assemble_2graph,
    coordinate,
    product,
    pullback,
    quotient,
    recover_cocycle,
    skew_product,
    theta_flip,
    theta_identity,
)
from .core import format_id
from .dynamics import (
    aperiodicity_check,
    cofinality_check,
    pure_infiniteness_hypothesis,
    simplicity_verdict,
)
from .errors import FileSyntaxError, KGraphError, ParseError, UnknownName
from .expr import parse_expression
from .fileio import dumps_cocycle, dumps_kgraph, load_action, load_cocycle, load_kgraph
from .iso import isomorphism_search
from .rep import check_rep


class UsageError(Exception):
    pass


def _load(path):
    try:
        return load_kgraph(path)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except KGraphError as exc:
        raise UsageError(f"{path}: not a valid k-graph: {exc}") from None


def _degree(text, k):
    try:
        n = dg.parse(text, k)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad degree {text!r}: {exc}") from None
    if len(n) != k or not dg.is_natural(n):
        raise UsageError(f"degree {text!r} must have {k} nonnegative entries")
    return n


def _vertex(L, name):
    names = {format_id(v): v for v in L.vertices}
    if name not in names:
        raise UsageError(f"no vertex {name!r}")
    return names[name]


def _plural(k, one, many):
    return f"{k} {one if k == 1 else many}"


def _counts(L):
    return ", ".join([_plural(len(L.vertices), "vertex", "vertices"), _plural(len(L.edges), "edge", "edges"),
                      _plural(len(L.squares), "square", "squares")])


def _window_note(L, out):
    if L.windowed:
        out.append(f"note: interior-only ({len(L.interior)} of {len(L.vertices)} vertices are inside the window)")


# -- subcommands -------------------------------------------------------------------

def cmd_check(a, out):
    try:
        L = load_kgraph(a.file)
    except OSError as exc:
        raise UsageError(f"{a.file}: {exc.strerror}") from None
    except ParseError as exc:
        raise UsageError(f"{a.file}: {exc}") from None
    except KGraphError as exc:
        out.append(f"INVALID: {type(exc).__name__}: {exc}")
        return 1
    out.append(f"valid {L.rank}-graph: {_counts(L)}")
    if L.rank > 1:
        out.append("squares: every composable pair has exactly one square and every reversed pair is hit")
    bound = _degree(a.max_degree, L.rank) if a.max_degree else (2 if L.rank <= 2 else 1,) * L.rank
    count = 0
    for lam in L.morphisms_upto(bound):
        d = lam.degree
        for m in dg.box(d):
            head, tail = L.factor(lam, m, dg.sub(d, m))
            if L.compose(head, tail) != lam:
                out.append(f"FAILS: factorization of {lam} at {m} does not recompose")
                return 1
            count += 1
    out.append(f"unique factorization: HOLDS (compose after factor checked on {count} splits, degree <= {bound})")
    _window_note(L, out)
    status = 0
    if a.cocycle:
        try:
            c = load_cocycle(a.cocycle, L)
        except (OSError, ParseError) as exc:
            raise UsageError(f"{a.cocycle}: {exc}") from None
        try:
            c.check(L)
            out.append(f"cocycle: functorial into {c.group}")
        except KGraphError as exc:
            out.append(f"cocycle: FAILS: {exc}")
            status = 1
    if a.action:
        try:
            act = load_action(a.action, L)
        except (OSError, ParseError) as exc:
            raise UsageError(f"{a.action}: {exc}") from None
        try:
            act.check(L)
            act.check_free(L)
            out.append(f"action: free action of {act.group} by k-graph automorphisms")
        except KGraphError as exc:
            out.append(f"action: FAILS: {type(exc).__name__}: {exc}")
            status = 1
    return status


def cmd_count(a, out):
    L = _load(a.file)
    n = _degree(a.degree, L.rank)
    verts = [_vertex(L, a.vertex)] if a.vertex else list(L.vertices)
    for v in verts:
        out.append(f"#Lambda^{n}({format_id(v)}) = {len(L.morphisms(v, n))}")
    _window_note(L, out)
    return 0


def cmd_matrix(a, out):
    L = _load(a.file)
    n = _degree(a.degree, L.rank)
    M = L.vertex_matrix(n).entries
    names = [format_id(v) for v in L.vertices]
    width = max(len(x) for x in names + [str(x) for x in M.flat])
    out.append(f"M^{n} (rows: range, columns: source)")
    out.append(" " * width + " " + " ".join(x.rjust(width) for x in names))
    for i, v in enumerate(names):
        out.append(v.rjust(width) + " " + " ".join(str(x).rjust(width) for x in M[i]))
    return 0


def cmd_analyze(a, out):
    L = _load(a.file)
    out.append(f"aperiodicity: {aperiodicity_check(L, period_bound=a.period_bound, horizon=a.horizon)}")
    out.append(f"cofinality: {cofinality_check(L, horizon=a.horizon)}")
    out.append(f"simplicity: {simplicity_verdict(L, period_bound=a.period_bound, horizon=a.horizon)}")
    out.append(f"pure infiniteness hypothesis: {pure_infiniteness_hypothesis(L)}")
    _window_note(L, out)
    return 0


def cmd_bratteli(a, out):
    L = _load(a.file)
    p = _degree(a.p, L.rank) if a.p else None
    B = bratteli(L, a.levels, p)
    for l, lev in enumerate(B.levels):
        out.append(f"level {l}: " + ", ".join(f"{format_id(v)}:{n}" for v, n in lev.items()))
    out.append("multiplicities: " + ", ".join(f"{format_id(v)}->{format_id(w)}:{m}"
                                              for (v, w), m in B.multiplicity.items()))
    out.append(f"recursion N_(l+1)(w) = sum_v N_l(v) M^p(v,w): {'HOLDS' if B.check_recursion() else 'FAILS'}")
    if a.dot:
        with open(a.dot, "w", encoding="utf-8") as fh:
            fh.write(B.to_dot())
        out.append(f"wrote {a.dot}")
    return 0 if B.check_recursion() else 1


def _theta_file(path, A, B):
    an = {format_id(e): e for e in A.edges}
    bn = {format_id(e): e for e in B.edges}
    theta = {}
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"theta\s+(\S+)\s+(\S+)\s*=\s*(\S+)\s+(\S+)", line)
            if not m:
                raise FileSyntaxError("expected 'theta A B = BP AP'", no)
            x, y, yp, xp = m.groups()
            for name, table in ((x, an), (y, bn), (yp, bn), (xp, an)):
                if name not in table:
                    raise UnknownName(f"unknown edge {name!r}", no)
            theta[(an[x], bn[y])] = (bn[yp], an[xp])
    return theta


def cmd_construct(a, out):
    kind = a.kind
    files = a.inputs
    need = {"product": 2, "assemble": 2}.get(kind, 1)
    if len(files) != need:
        raise UsageError(f"construct {kind} takes {need} graph file(s)")
    graphs = [_load(f) for f in files]
    extra = None
    if kind == "product":
        G = product(*graphs)
    elif kind == "pullback":
        if not a.map:
            raise UsageError("pullback needs --map 'k x l: ...'")
        try:
            f = MonoidMap.parse(a.map)
        except (ValueError, KGraphError) as exc:
            raise UsageError(f"bad map: {exc}") from None
        G = pullback(f, graphs[0])
    elif kind == "skew":
        if not a.cocycle:
            raise UsageError("skew needs --cocycle FILE")
        c = load_cocycle(a.cocycle, graphs[0])
        G = skew_product(c.group, c, graphs[0])
    elif kind == "quotient":
        if not a.action:
            raise UsageError("quotient needs --action FILE")
        act = load_action(a.action, graphs[0])
        G = quotient(graphs[0], act)
        rec = recover_cocycle(graphs[0], act)
        extra = dumps_cocycle(rec.cocycle, G)
    elif kind == "assemble":
        A, B = graphs
        if a.theta in (None, "identity"):
            theta = theta_identity(A)
        elif a.theta == "flip":
            theta = theta_flip(A)
        else:
            theta = _theta_file(a.theta, A, B)
        G = assemble_2graph(A, B, theta)
    elif kind == "coordinate":
        if a.color is None:
            raise UsageError("coordinate needs --color I")
        G = coordinate(graphs[0], a.color)
    else:  # argparse restricts the choices
        raise UsageError(f"unknown construction {kind!r}")
    text = dumps_kgraph(G)
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.append(f"wrote {a.output}: rank {G.rank}, {_counts(G)}")
    else:
        out.append(text.rstrip("\n"))
    if extra is not None:
        out.append("# recovered cocycle on the quotient")
        out.extend("# " + line for line in extra.rstrip("\n").splitlines())
    _window_note(G, out)
    return 0


def cmd_algebra(a, out):
    L = _load(a.file)
    try:
        x = parse_expression(L, a.eval)
    except ParseError as exc:
        raise UsageError(f"expression: {exc}") from None
    out.append(x.render())
    return 0


def cmd_iso(a, out):
    A, B = _load(a.first), _load(a.second)
    bound = _degree(a.max_degree, A.rank) if a.max_degree and A.rank == B.rank else None
    res = isomorphism_search(A, B, max_degree=bound)
    out.append(res.describe())
    return 0


def cmd_rep_check(a, out):
    L = _load(a.file)
    D = _degree(a.depth, L.rank)
    rep = check_rep(L, D, products=a.products, seed=a.seed)
    out.append(str(rep))
    return 0 if rep.ok else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="kgraph", description="k-graph combinatorics and exact *-algebra arithmetic")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a k-graph file")
    p.add_argument("file")
    p.add_argument("--max-degree", help="degree bound for the factorization round trip")
    p.add_argument("--cocycle", help="also check a cocycle file")
    p.add_argument("--action", help="also check a free group action file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("count", help="number of morphisms of a degree")
    p.add_argument("file")
    p.add_argument("--vertex")
    p.add_argument("--degree", required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("matrix", help="vertex matrix M^n")
    p.add_argument("file")
    p.add_argument("--degree", required=True)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("analyze", help="aperiodicity, cofinality, simplicity, pure infiniteness")
    p.add_argument("file")
    p.add_argument("--period-bound", type=int, default=3)
    p.add_argument("--horizon", type=int, default=6)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bratteli", help="Bratteli diagram of the AF core")
    p.add_argument("file")
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--p", help="level step (default all ones)")
    p.add_argument("--dot", help="write DOT to this file")
    p.set_defaults(func=cmd_bratteli)

    p = sub.add_parser("construct", help="build a new k-graph file")
    p.add_argument("kind", choices=["product", "pullback", "skew", "quotient", "assemble", "coordinate"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("--map", help="monoid map 'k x l: a11,...,a1l;...'")
    p.add_argument("--cocycle")
    p.add_argument("--action")
    p.add_argument("--theta", help="identity, flip or a file of 'theta A B = BP AP' lines")
    p.add_argument("--color", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("algebra", help="evaluate an algebra expression")
    p.add_argument("file")
    p.add_argument("--eval", required=True)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("iso", help="isomorphism search")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--max-degree")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("rep-check", help="truncated path-space representation oracle")
    p.add_argument("file")
    p.add_argument("--depth", required=True)
    p.add_argument("--products", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rep_check)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    out = []
    try:
        code = args.func(args, out)
    except UsageError as exc:
        if out:
            print("\n".join(out))
        print(f"kgraph {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ParseError, KGraphError) as exc:
        print(f"kgraph {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"kgraph {args.command}: {exc}", file=sys.stderr)
        return 2
    print("\n".join(out))
    return code


if __name__ == "__main__":
    sys.exit(main())
