"""Small k-graphs used throughout the tests and the CLI examples."""

from __future__ import annotations

import itertools

from . import degree as dg
from .constructions import assemble_2graph, theta_flip, theta_identity
from .core import Edge, KGraph, Skeleton, validate


def one_graph(vertices, edges):
    """A 1-graph from ``(name, range, source)`` triples (category convention)."""
    return validate(Skeleton(1, list(vertices), [Edge(n, 1, r, s) for n, r, s in edges]), {})


def o2():
    """One vertex, two loops ``e`` and ``f``."""
    return one_graph(["v"], [("e", "v", "v"), ("f", "v", "v")])


def single_loop():
    return one_graph(["v"], [("e", "v", "v")])


def two_cycle():
    """``a: u <- v`` and ``b: v <- u`` (r first, then s)."""
    return one_graph(["u", "v"], [("a", "u", "v"), ("b", "v", "u")])


def two_loops():
    """Disjoint union of two single loops."""
    return one_graph(["u", "w"], [("e", "u", "u"), ("f", "w", "w")])


def two_o2():
    """Disjoint union of two copies of O2."""
    return one_graph(["u", "w"], [("e", "u", "u"), ("f", "u", "u"), ("g", "w", "w"), ("h", "w", "w")])


def loop_with_exit_to_loop():
    """A loop at u with an exit into a vertex w carrying a loop of its own."""
    return one_graph(["u", "w"], [("e", "u", "u"), ("x", "u", "w"), ("f", "w", "w")])


def condition_l_pair():
    """Two vertices; every loop has an exit."""
    return one_graph(["u", "w"], [("e", "u", "u"), ("x", "u", "w"), ("y", "w", "u"), ("f", "w", "w")])


def three_cycle_chord():
    return one_graph([0, 1, 2], [("a", 0, 1), ("b", 1, 2), ("c", 2, 0), ("d", 0, 2)])


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def t_graph(k):
    """``T_k``: one vertex, one loop per color, every square trivial."""
    names = list(_LETTERS[:k])
    edges = [Edge(n, i + 1, "v", "v") for i, n in enumerate(names)]
    squares = {(names[i], names[j]): (names[j], names[i])
               for i in range(k) for j in range(i + 1, k)}
    if k <= 2:
        return validate(Skeleton(k, ["v"], edges), squares)
    return KGraph(k, ["v"], edges, squares, kind="construction")


def omega_window(k, W):
    """The part of ``Ω_k`` on ``[0, W]^k``: vertices m, edges ``(m, i): m <- m + e_i``.

    Vertices with every coordinate below W form the interior.
    """
    verts = sorted(itertools.product(range(W + 1), repeat=k), key=lambda m: (sum(m), m))
    inside = set(verts)
    edges = []
    for m in verts:
        for i in range(1, k + 1):
            n = dg.add(m, dg.unit(k, i))
            if n in inside:
                edges.append(Edge((m, i), i, m, n))
    squares = {}
    for m in verts:
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                if dg.add(dg.add(m, dg.unit(k, i)), dg.unit(k, j)) in inside:
                    squares[((m, i), (dg.add(m, dg.unit(k, i)), j))] = ((m, j), (dg.add(m, dg.unit(k, j)), i))
    interior = [m for m in verts if all(a < W for a in m)]
    return KGraph(k, verts, edges, squares, interior=interior, kind="window")


def flip_o2():
    A = o2()
    return assemble_2graph(A, A, theta_flip(A))


def iota_o2():
    A = o2()
    return assemble_2graph(A, A, theta_identity(A))


def two_vertex_2graph():
    """A rank-2 graph on {u, v}: A has all four edges ``a_xy: x <- y``, B is the 2-cycle.

    ``θ(a_xy, b_{y ȳ}) = (b_{x x̄}, a_{x̄ ȳ})`` where ``ȳ`` is the other vertex.
    """
    other = {"u": "v", "v": "u"}
    A = one_graph(["u", "v"], [(f"a{x}{y}", x, y) for x in "uv" for y in "uv"])
    B = one_graph(["u", "v"], [(f"b{x}{other[x]}", x, other[x]) for x in "uv"])
    theta = {}
    for x in "uv":
        for y in "uv":
            theta[(f"a{x}{y}", f"b{y}{other[y]}")] = (f"b{x}{other[x]}", f"a{other[x]}{other[y]}")
    return assemble_2graph(A, B, theta)


def rank2_fixtures():
    return {"T2": t_graph(2), "iota": iota_o2(), "flip": flip_o2(), "two_vertex": two_vertex_2graph()}


def finite_fixtures():
    """Every shipped finite (unwindowed) fixture, keyed by name."""
    out = {
        "O2": o2(),
        "loop": single_loop(),
        "two_cycle": two_cycle(),
        "two_loops": two_loops(),
        "two_o2": two_o2(),
        "cond_L": condition_l_pair(),
        "chord": three_cycle_chord(),
    }
    out.update(rank2_fixtures())
    return out
