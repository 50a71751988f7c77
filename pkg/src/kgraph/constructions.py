"""Building new k-graphs from old ones.

Every construction materializes its own skeleton and squares from the
semantics of the construction, so the result is an ordinary ``KGraph`` whose
composition is square-rewriting; higher ranks are reachable this way even
though square files stop at rank 2.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import degree as dg
from .core import Edge, KGraph, Morphism
from .errors import (
    FileSyntaxError,
    IncompatibleAction,
    InfiniteVertexSet,
    InvalidTheta,
    NonCommutingMatrices,
    NonFreeAction,
    NonFunctorialCocycle,
    VertexSetMismatch,
    WindowOverflow,
)


# -- monoid maps -------------------------------------------------------------

@dataclass(frozen=True)
class MonoidMap:
    """``f : N^l -> N^k`` given by a k x l matrix of nonnegative integers."""

    matrix: tuple  # rows

    def __post_init__(self):
        rows = tuple(tuple(int(a) for a in row) for row in self.matrix)
        if not rows or not rows[0] or len({len(r) for r in rows}) != 1:
            raise ValueError("monoid map needs a nonempty rectangular matrix")
        if any(a < 0 for r in rows for a in r):
            raise ValueError("monoid map entries must be nonnegative")
        object.__setattr__(self, "matrix", rows)

    @property
    def k(self):
        return len(self.matrix)

    @property
    def l(self):
        return len(self.matrix[0])

    def __call__(self, n):
        return tuple(sum(a * b for a, b in zip(row, n)) for row in self.matrix)

    def column(self, i):
        """``f(e_i)`` for a 1-based color i of the domain."""
        return tuple(row[i - 1] for row in self.matrix)

    def is_injective(self):
        return int(np.linalg.matrix_rank(np.array(self.matrix, dtype=float))) == self.l

    def is_surjective(self):
        cols = {self.column(i) for i in range(1, self.l + 1)}
        return all(dg.unit(self.k, j) in cols for j in range(1, self.k + 1))

    def has_cofinal_image(self):
        return all(any(row) for row in self.matrix)

    @classmethod
    def identity(cls, k):
        return cls(tuple(dg.unit(k, i) for i in range(1, k + 1)))

    @classmethod
    def sum_map(cls, l):
        """``(m_1, ..., m_l) -> m_1 + ... + m_l``."""
        return cls(((1,) * l,))

    @classmethod
    def parse(cls, text):
        """``"k x l: a11,a12;a21,a22"`` (rows separated by ``;``)."""
        m = re.fullmatch(r"\s*(\d+)\s*x\s*(\d+)\s*:\s*(.*?)\s*", text)
        if not m:
            raise FileSyntaxError(f"bad map {text!r}; expected 'k x l: a11,a12;...'")
        k, l = int(m.group(1)), int(m.group(2))
        rows = [r for r in m.group(3).split(";") if r.strip()]
        try:
            mat = tuple(tuple(int(a) for a in r.split(",")) for r in rows)
        except ValueError:
            raise FileSyntaxError(f"bad map entries in {text!r}") from None
        if len(mat) != k or any(len(r) != l for r in mat):
            raise FileSyntaxError(f"map {text!r} is not {k} x {l}")
        return cls(mat)

    def __str__(self):
        return f"{self.k} x {self.l}: " + ";".join(",".join(map(str, r)) for r in self.matrix)


# -- products, pullbacks ------------------------------------------------------

def _window_interior(*graphs):
    if all(g.interior is None for g in graphs):
        return None
    return [g.trusted_vertices() for g in graphs]


def product(L1: KGraph, L2: KGraph) -> KGraph:
    k1, k2 = L1.rank, L2.rank
    verts = [(v1, v2) for v1 in L1.vertices for v2 in L2.vertices]
    edges = []
    for e in L1.edges.values():
        for v2 in L2.vertices:
            edges.append(Edge((e.name, v2), e.color, (e.range, v2), (e.source, v2)))
    for v1 in L1.vertices:
        for f in L2.edges.values():
            edges.append(Edge((v1, f.name), k1 + f.color, (v1, f.range), (v1, f.source)))
    squares = {}
    for (a, b), (bp, ap) in L1.squares.items():
        for v2 in L2.vertices:
            squares[((a, v2), (b, v2))] = ((bp, v2), (ap, v2))
    for (a, b), (bp, ap) in L2.squares.items():
        for v1 in L1.vertices:
            squares[((v1, a), (v1, b))] = ((v1, bp), (v1, ap))
    for e in L1.edges.values():
        for f in L2.edges.values():
            squares[((e.name, f.range), (e.source, f.name))] = ((e.range, f.name), (e.name, f.source))
    parts = _window_interior(L1, L2)
    interior = None if parts is None else [(a, b) for a in parts[0] for b in parts[1]]
    return KGraph(k1 + k2, verts, edges, squares, interior=interior, kind="product",
                  meta={"factors": (L1, L2)})


def pullback(f: MonoidMap, L: KGraph) -> KGraph:
    """``f*(Λ)``: color-i edges are the morphisms of ``Λ`` of degree ``f(e_i)``."""
    if f.k != L.rank:
        raise ValueError(f"map has codomain rank {f.k}, graph has rank {L.rank}")
    edges, lift, ids = [], {}, {}
    for i in range(1, f.l + 1):
        for lam in L.all_morphisms(f.column(i)):
            name = (i, lam.range) + lam.path
            edges.append(Edge(name, i, lam.range, lam.source))
            lift[name] = lam
            ids[(i, lam)] = name
    squares = {}
    for i in range(1, f.l + 1):
        for j in range(i + 1, f.l + 1):
            for a in (e.name for e in edges if e.color == i):
                lam = lift[a]
                for mu in L.morphisms(lam.source, f.column(j)):
                    try:
                        mu2, lam2 = L.factor(L.compose(lam, mu), f.column(j), f.column(i))
                    except WindowOverflow:
                        continue
                    squares[(a, ids[(j, mu)])] = (ids[(j, mu2)], ids[(i, lam2)])
    return KGraph(f.l, L.vertices, edges, squares, interior=L.interior, kind="pullback",
                  meta={"lift": lift, "base": L, "map": f})


def lift_morphism(P: KGraph, lam: Morphism) -> Morphism:
    """Image of a morphism of ``f*(Λ)`` in ``Λ``, i.e. ``(λ, n) -> λ``."""
    base, lift = P.meta["base"], P.meta["lift"]
    out = base.identity(lam.range)
    for e in lam.path:
        out = base.compose(out, lift[e])
    return out


def coordinate(L: KGraph, i: int) -> KGraph:
    if not 1 <= i <= L.rank:
        raise ValueError(f"color {i} outside 1..{L.rank}")
    return pullback(MonoidMap(tuple((1,) if r == i - 1 else (0,) for r in range(L.rank))), L)


# -- groups, cocycles, actions -----------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    """A finitely generated abelian group ``Z_{o1} x ... x Z_{or}``.

    An order of 0 stands for a copy of Z; such groups are only materialized
    on the box ``[-radius, radius]^r``.  Elements are tuples.
    """

    orders: tuple
    radius: int | None = None

    @property
    def finite(self):
        return all(o > 0 for o in self.orders)

    @property
    def rank(self):
        return len(self.orders)

    def identity(self):
        return (0,) * len(self.orders)

    def reduce(self, g):
        return tuple(a % o if o else a for a, o in zip(g, self.orders))

    def op(self, g, h):
        return self.reduce(dg.add(g, h))

    def inv(self, g):
        return self.reduce(tuple(-a for a in g))

    def contains(self, g):
        if self.finite:
            return True
        return all(o or (self.radius is not None and abs(a) <= self.radius)
                   for a, o in zip(g, self.orders))

    def elements(self):
        if not self.finite and self.radius is None:
            raise InfiniteVertexSet("infinite group needs a window radius")
        ranges = [range(o) if o else range(-self.radius, self.radius + 1) for o in self.orders]
        return [tuple(g) for g in itertools.product(*ranges)]

    def generators(self):
        return [dg.unit(self.rank, i) for i in range(1, self.rank + 1)]

    def element(self, text):
        try:
            g = tuple(int(a) for a in str(text).replace(" ", "").split(","))
        except ValueError:
            raise FileSyntaxError(f"bad group element {text!r}") from None
        if len(g) != self.rank:
            raise FileSyntaxError(f"group element {text!r} needs {self.rank} coordinates")
        return self.reduce(g)

    @classmethod
    def integers(cls, r, radius=None):
        return cls((0,) * r, radius)

    @classmethod
    def parse(cls, text):
        orders, radius = [], None
        for part in re.split(r"\s+x\s+", text.strip()):
            m = re.fullmatch(r"Z\s*(\d+)?", part.strip())
            if not m:
                raise FileSyntaxError(f"bad group {text!r}")
            if m.group(1) is None:
                raise FileSyntaxError("Z needs an order (Z2) or a window radius (Z 3)")
            n = int(m.group(1))
            if re.fullmatch(r"Z\d+", part.strip()):
                if n < 1:
                    raise FileSyntaxError(f"bad cyclic order in {text!r}")
                orders.append(n)
            else:
                orders.append(0)
                if radius is not None and radius != n:
                    raise FileSyntaxError("all Z factors must share one window radius")
                radius = n
        return cls(tuple(orders), radius)

    def __str__(self):
        return " x ".join(f"Z{o}" if o else f"Z {self.radius}" for o in self.orders)


@dataclass
class Cocycle:
    """A functor ``c: Λ -> G`` into an abelian group, given on edges."""

    group: GroupSpec
    values: dict

    def __call__(self, x):
        if isinstance(x, Morphism):
            g = self.group.identity()
            for e in x.path:
                g = self.group.op(g, self.values[e])
            return g
        return self.values[x]

    def check(self, L: KGraph):
        missing = [e for e in L.edges if e not in self.values]
        if missing:
            raise NonFunctorialCocycle(f"cocycle has no value on edge {missing[0]!r}")
        G = self.group
        for (a, b), (bp, ap) in L.squares.items():
            lhs = G.op(self.values[a], self.values[b])
            rhs = G.op(self.values[bp], self.values[ap])
            if lhs != rhs:
                raise NonFunctorialCocycle(f"square {(a, b)} -> {(bp, ap)}: {lhs} != {rhs}")
        return True

    @classmethod
    def degree(cls, L: KGraph, radius=None):
        G = GroupSpec.integers(L.rank, radius)
        return cls(G, {e: dg.unit(L.rank, L.color(e)) for e in L.edges})


def skew_product(G: GroupSpec, c: Cocycle, L: KGraph) -> KGraph:
    """``G x_c Λ`` with ``r(g, e) = (g, r(e))`` and ``s(g, e) = (g c(e), s(e))``."""
    c.check(L)
    elems = G.elements()
    inside = set(elems)
    verts = [(g, v) for g in elems for v in L.vertices]
    edges = []
    for g in elems:
        for e in L.edges.values():
            h = G.op(g, c.values[e.name])
            if h in inside:
                edges.append(Edge((g, e.name), e.color, (g, e.range), (h, e.source)))
    names = {e.name for e in edges}
    squares = {}
    for (a, b), (bp, ap) in L.squares.items():
        for g in elems:
            key = ((g, a), (G.op(g, c.values[a]), b))
            val = ((g, bp), (G.op(g, c.values[bp]), ap))
            if all(x in names for x in key + val):
                squares[key] = val
    interior = None
    if not G.finite:
        interior = [(g, v) for g in elems for v in L.trusted_vertices()
                    if all(G.op(g, c.values[e]) in inside
                           for col in range(1, L.rank + 1) for e in L.edges_at(v, col))]
    elif L.interior is not None:
        interior = [(g, v) for g in elems for v in L.trusted_vertices()]
    return KGraph(L.rank, verts, edges, squares, interior=interior, kind="skew",
                  meta={"group": G, "cocycle": c, "base": L})


@dataclass
class GroupAction:
    """An action of a finite abelian group, one permutation pair per generator.

    ``gens[i] = (vertex_map, edge_map)`` is the action of the i-th standard
    generator of ``group``.
    """

    group: GroupSpec
    gens: list
    _table: dict = field(default=None, init=False, repr=False)

    def _build(self):
        if self._table is not None:
            return self._table
        if not self.group.finite:
            raise IncompatibleAction("actions are only supported for finite groups")
        if len(self.gens) != self.group.rank:
            raise IncompatibleAction(f"need {self.group.rank} generators, got {len(self.gens)}")
        table = {}
        for g in self.group.elements():
            vm, em = {}, {}
            # apply generator i g[i] times
            first = True
            for i, n in enumerate(g):
                gv, ge = self.gens[i]
                for _ in range(n):
                    if first:
                        vm, em = dict(gv), dict(ge)
                        first = False
                    else:
                        vm = {x: gv[y] for x, y in vm.items()}
                        em = {x: ge[y] for x, y in em.items()}
            table[g] = (vm, em) if not first else None
        self._table = table
        return table

    def vertex(self, g, v):
        t = self._build()[g]
        return v if t is None else t[0][v]

    def edge(self, g, e):
        t = self._build()[g]
        return e if t is None else t[1][e]

    def check(self, L: KGraph):
        G = self.group
        if not G.finite:
            raise IncompatibleAction("actions are only supported for finite groups")
        if len(self.gens) != G.rank:
            raise IncompatibleAction(f"need {G.rank} generators, got {len(self.gens)}")
        for i, (vm, em) in enumerate(self.gens):
            if set(vm) != set(L.vertices) or set(vm.values()) != set(L.vertices):
                raise IncompatibleAction(f"generator {i + 1} is not a permutation of the vertices")
            if set(em) != set(L.edges) or set(em.values()) != set(L.edges):
                raise IncompatibleAction(f"generator {i + 1} is not a permutation of the edges")
            for e in L.edges.values():
                x = L.edges[em[e.name]]
                if x.color != e.color or x.range != vm[e.range] or x.source != vm[e.source]:
                    raise IncompatibleAction(f"generator {i + 1} does not respect edge {e.name!r}")
            for (a, b), (bp, ap) in L.squares.items():
                if L.squares.get((em[a], em[b])) != (em[bp], em[ap]):
                    raise IncompatibleAction(f"generator {i + 1} does not preserve square {(a, b)}")
        # generator orders and commutation
        for i, (vm, em) in enumerate(self.gens):
            o = G.orders[i]
            for v in L.vertices:
                w = v
                for _ in range(o):
                    w = vm[w]
                if w != v:
                    raise IncompatibleAction(f"generator {i + 1} does not have order dividing {o}")
            for e in L.edges:
                x = e
                for _ in range(o):
                    x = em[x]
                if x != e:
                    raise IncompatibleAction(f"generator {i + 1} does not have order dividing {o}")
        for i, j in itertools.combinations(range(len(self.gens)), 2):
            (vi, ei), (vj, ej) = self.gens[i], self.gens[j]
            if any(vi[vj[v]] != vj[vi[v]] for v in L.vertices) or \
                    any(ei[ej[e]] != ej[ei[e]] for e in L.edges):
                raise IncompatibleAction(f"generators {i + 1} and {j + 1} do not commute")
        self._table = None
        return True

    def check_free(self, L: KGraph):
        ident = self.group.identity()
        for g in self.group.elements():
            if g == ident:
                continue
            for v in L.vertices:
                if self.vertex(g, v) == v:
                    raise NonFreeAction(f"{g} fixes vertex {v!r}")
        return True

    def orbit(self, v):
        return {self.vertex(g, v) for g in self.group.elements()}

    @classmethod
    def trivial(cls, L: KGraph, group=None):
        group = group or GroupSpec((1,))
        ident = ({v: v for v in L.vertices}, {e: e for e in L.edges})
        return cls(group, [ident] * group.rank)


def translation_action(S: KGraph) -> GroupAction:
    """Left translation of ``G`` on a skew product ``G x_c Λ`` (finite G)."""
    G = S.meta["group"]
    gens = []
    for h in G.generators():
        vm = {(g, v): (G.op(h, g), v) for (g, v) in S.vertices}
        em = {(g, e): (G.op(h, g), e) for (g, e) in S.edges}
        gens.append((vm, em))
    return GroupAction(G, gens)


def quotient(L: KGraph, act: GroupAction) -> KGraph:
    """``Λ/G`` for a free action, with representative vertices and edges.

    Each vertex orbit is represented by its earliest declared vertex; each edge
    orbit by its member whose range is a representative.
    """
    act.check(L)
    act.check_free(L)
    G = act.group
    elems = G.elements()
    rep, shift = {}, {}
    for v in L.vertices:
        if v in rep:
            continue
        for g in elems:
            w = act.vertex(g, v)
            rep[w] = v
            shift[w] = g  # w = g . rep(w)
    reps = [v for v in L.vertices if rep[v] == v]
    edge_proj = {}
    for e in L.edges.values():
        g = shift[e.range]
        edge_proj[e.name] = act.edge(G.inv(g), e.name)
    edges = []
    for e in L.edges.values():
        if rep[e.range] == e.range:
            edges.append(Edge(e.name, e.color, e.range, rep[e.source]))
    squares = {}
    for (a, b), (bp, ap) in L.squares.items():
        if rep[L.r(a)] == L.r(a):
            squares[(a, edge_proj[b])] = (bp, edge_proj[ap])
    return KGraph(L.rank, reps, edges, squares, kind="quotient",
                  meta={"base": L, "action": act, "projection": (rep, edge_proj), "shift": shift})


@dataclass
class RecoveredCocycle:
    cocycle: Cocycle
    quotient: KGraph
    skew: KGraph
    vertex_map: dict
    edge_map: dict
    lift_value: Callable

    def check_equivariance(self, act: GroupAction):
        """``φ(h . x) = h . φ(x)`` for every generator h and every vertex and edge x."""
        G = act.group
        for i, h in enumerate(G.generators()):
            for (g, v), w in self.vertex_map.items():
                if self.vertex_map[(G.op(h, g), v)] != act.vertex(h, w):
                    return False
            for (g, e), x in self.edge_map.items():
                if self.edge_map[(G.op(h, g), e)] != act.edge(h, x):
                    return False
        return True


def recover_cocycle(L: KGraph, act: GroupAction) -> RecoveredCocycle:
    """Rebuild ``c`` with ``Λ ≅ G x_c (Λ/G)`` from a free action."""
    Q = quotient(L, act)
    G = act.group
    rep, _ = Q.meta["projection"]
    shift = Q.meta["shift"]
    # the lift of a quotient edge is the edge itself (its range is a representative)
    values = {e: shift[L.s(e)] for e in Q.edges}
    c = Cocycle(G, values)
    S = skew_product(G, c, Q)
    vmap = {(g, v): act.vertex(g, v) for (g, v) in S.vertices}
    emap = {(g, e): act.edge(g, e) for (g, e) in S.edges}

    def lift_value(lam: Morphism):
        """c(λ) read off the lift λ' of λ with r(λ') = r(λ)': s(λ') = c(λ) . s(λ)'."""
        g = G.identity()
        at = lam.range
        for e in lam.path:
            x = act.edge(g, e)
            if L.r(x) != at:
                raise NonFunctorialCocycle("lift is not composable")
            at = L.s(x)
            g = shift[at]
        return g

    return RecoveredCocycle(c, Q, S, vmap, emap, lift_value)


# -- two-graphs from commuting squares ---------------------------------------

def theta_identity(A: KGraph) -> dict:
    """``θ(a, b) = (a, b)``: the A-edge a is reused as the new B-edge and vice versa."""
    return {(a, b): (a, b) for (a, b) in A.composable_pairs(1, 1)}


def theta_flip(A: KGraph) -> dict:
    """``θ(a, b) = (b, a)``: each edge keeps its own copy."""
    return {(a, b): (b, a) for (a, b) in A.composable_pairs(1, 1)}


def _matrix_in_order(L: KGraph, order):
    idx = [L.vertex_index(v) for v in order]
    M = L.adjacency(1)
    return M[np.ix_(idx, idx)]


def assemble_2graph(A: KGraph, B: KGraph, theta: dict) -> KGraph:
    """``A *_θ B``: color 1 edges from A, color 2 edges from B, squares from θ.

    ``theta`` maps ``(a, b)`` (a in A, b in B, s(a) = r(b)) to ``(b', a')``.
    Edges are tagged ``(1, a)`` and ``(2, b)``.
    """
    if A.rank != 1 or B.rank != 1:
        raise InvalidTheta("both inputs must be 1-graphs")
    if set(A.vertices) != set(B.vertices) or len(A.vertices) != len(B.vertices):
        raise VertexSetMismatch("A and B must have the same vertex set")
    MA = _matrix_in_order(A, A.vertices)
    MB = _matrix_in_order(B, A.vertices)
    if not np.array_equal(MA.dot(MB), MB.dot(MA)):
        raise NonCommutingMatrices("vertex matrices of A and B do not commute")
    dom = {(a, b) for a in A.edges for b in B.edges_at(A.s(a), 1)}
    cod = {(b, a) for b in B.edges for a in A.edges_at(B.s(b), 1)}
    if set(theta) != dom:
        extra = set(theta) - dom
        miss = dom - set(theta)
        bad = next(iter(extra or miss))
        raise InvalidTheta(f"θ must be defined exactly on composable pairs; offending pair {bad}")
    images = list(theta.values())
    if len(set(images)) != len(images):
        raise InvalidTheta("θ is not injective")
    for (a, b), (bp, ap) in theta.items():
        if (bp, ap) not in cod:
            raise InvalidTheta(f"θ{(a, b)} = {(bp, ap)} is not a composable (B, A) pair")
        if B.r(bp) != A.r(a) or A.s(ap) != B.s(b):
            raise InvalidTheta(f"θ{(a, b)} = {(bp, ap)} has the wrong endpoints")
    if set(images) != cod:
        raise InvalidTheta("θ is not onto the composable (B, A) pairs")
    edges = [Edge((1, e.name), 1, e.range, e.source) for e in A.edges.values()]
    edges += [Edge((2, e.name), 2, e.range, e.source) for e in B.edges.values()]
    squares = {((1, a), (2, b)): ((2, bp), (1, ap)) for (a, b), (bp, ap) in theta.items()}
    return KGraph(2, A.vertices, edges, squares, kind="theta", meta={"A": A, "B": B, "theta": theta})
