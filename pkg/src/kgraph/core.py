"""The k-graph data model.

A k-graph is stored through its 1-skeleton (vertices and colored edges) and
its commuting squares: for colors ``i < j`` and a composable pair ``(a, b)``
(``a`` of color i, ``b`` of color j, ``s(a) == r(b)``) the square table gives
the other factorization ``(b', a')`` of the same degree ``e_i + e_j``
morphism.  Every morphism is kept in color-ascending normal form; composition
sorts a concatenated edge path with the squares and factorization rearranges a
path into a prescribed color order.

Category conventions are used throughout: an edge ``e`` has range ``r(e)`` and
source ``s(e)`` and ``λμ`` is defined when ``s(λ) == r(μ)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Hashable, Iterable

import numpy as np

from . import degree as dg
from .errors import (
    DegreeMismatch,
    FactorizationError,
    InvalidVertex,
    MalformedSkeleton,
    NotComposable,
    SourceViolation,
    WindowOverflow,
)


@dataclass(frozen=True)
class Edge:
    name: Hashable
    color: int  # 1-based
    range: Hashable
    source: Hashable


@dataclass
class Skeleton:
    rank: int
    vertices: list
    edges: list  # of Edge

    def edge_colors(self):
        return {e.name: e.color for e in self.edges}


# (a, b) -> (b', a') with a of the lower color.
SquareSet = dict


@dataclass(frozen=True)
class Morphism:
    """A morphism in color-ascending normal form.

    ``word[c]`` is the tuple of edges of color ``c + 1``; the full edge path is
    their concatenation.  Equality is structural, which is sound because the
    normal form is unique.
    """

    graph: "KGraph" = field(repr=False, compare=True, hash=True)
    range: Hashable
    source: Hashable
    degree: tuple
    word: tuple

    @property
    def path(self):
        return tuple(e for part in self.word for e in part)

    @property
    def is_vertex(self):
        return not any(self.degree)

    def __str__(self):
        if self.is_vertex:
            return f"id[{format_id(self.range)}]"
        return ".".join(format_id(e) for e in self.path)

    def __repr__(self):
        return f"Morphism({format_id(self.range)}->{format_id(self.source)}: {self})"


@dataclass
class VertexMatrix:
    degree: tuple
    vertices: tuple
    entries: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, VertexMatrix):
            return NotImplemented
        return self.vertices == other.vertices and np.array_equal(self.entries, other.entries)

    def __matmul__(self, other):
        return VertexMatrix(dg.add(self.degree, other.degree), self.vertices,
                            self.entries.dot(other.entries))

    def row_sums(self):
        return {v: int(self.entries[i].sum()) for i, v in enumerate(self.vertices)}


class KGraph:
    """A finite k-graph given by its skeleton and squares.

    ``interior`` is ``None`` for an honest k-graph.  Finite windows of infinite
    constructions set it to the vertices whose incoming edges are all present;
    the standing hypothesis is only enforced there and squares may be missing
    along the boundary.
    """

    def __init__(self, rank, vertices, edges, squares, *, interior=None, meta=None,
                 kind="theta", check=True):
        if rank < 1:
            raise MalformedSkeleton("rank must be positive")
        self.rank = rank
        self.kind = kind
        self.meta = dict(meta or {})
        self.vertices = tuple(vertices)
        self._vindex = {}
        for i, v in enumerate(self.vertices):
            if v in self._vindex:
                raise MalformedSkeleton(f"duplicate vertex {v!r}")
            self._vindex[v] = i
        self.edges = {}
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            if e.name in self.edges or e.name in self._vindex:
                raise MalformedSkeleton(f"duplicate id {e.name!r}")
            if not 1 <= e.color <= rank:
                raise MalformedSkeleton(f"edge {e.name!r} has color {e.color} outside 1..{rank}")
            for end in (e.range, e.source):
                if end not in self._vindex:
                    raise MalformedSkeleton(f"edge {e.name!r} has undeclared endpoint {end!r}")
            self.edges[e.name] = e
        self._eindex = {name: i for i, name in enumerate(self.edges)}
        by_range = {}
        for e in self.edges.values():
            by_range.setdefault((e.range, e.color), []).append(e.name)
        self._by_range = {key: tuple(val) for key, val in by_range.items()}
        self.squares = dict(squares)
        self._unsquares = {}
        for key, val in self.squares.items():
            if val in self._unsquares:
                raise FactorizationError(f"squares {self._unsquares[val]} and {key} share the image {val}")
            self._unsquares[val] = key
        self.interior = None if interior is None else frozenset(interior)
        # the graph never changes after construction, so these are safe to memoize
        self._mcache = {}
        self._ccache = {}
        self._fcache = {}
        if check:
            self.check_squares()
            self.check_sources()

    # -- queries -----------------------------------------------------------

    @property
    def windowed(self):
        return self.interior is not None

    def __repr__(self):
        return f"<KGraph rank={self.rank} |V|={len(self.vertices)} |E|={len(self.edges)} {self.kind}>"

    def color(self, e):
        return self.edges[e].color

    def r(self, e):
        return self.edges[e].range

    def s(self, e):
        return self.edges[e].source

    def edges_of_color(self, c):
        return tuple(name for name, e in self.edges.items() if e.color == c)

    def edges_at(self, v, c):
        """Edges of color ``c`` with range ``v``, in declaration order."""
        return self._by_range.get((v, c), ())

    def vertex_index(self, v):
        try:
            return self._vindex[v]
        except KeyError:
            raise InvalidVertex(f"no vertex {v!r}") from None

    def has_vertex(self, v):
        return v in self._vindex

    def is_interior(self, v):
        return self.interior is None or v in self.interior

    def trusted_vertices(self):
        return tuple(v for v in self.vertices if self.is_interior(v))

    def skeleton(self):
        return Skeleton(self.rank, list(self.vertices), list(self.edges.values()))

    def composable_pairs(self, ci, cj):
        """All ``(a, b)`` with ``a`` of color ci, ``b`` of color cj and ``s(a) == r(b)``."""
        out = []
        for a in self.edges_of_color(ci):
            for b in self.edges_at(self.s(a), cj):
                out.append((a, b))
        return out

    # -- validation --------------------------------------------------------

    def check_squares(self):
        for (a, b), (bp, ap) in self.squares.items():
            for x in (a, b, bp, ap):
                if x not in self.edges:
                    raise FactorizationError(f"square {(a, b)} mentions unknown edge {x!r}")
            ca, cb = self.color(a), self.color(b)
            if not ca < cb:
                raise FactorizationError(f"square {(a, b)}: first edge must have the lower color")
            if self.color(ap) != ca or self.color(bp) != cb:
                raise FactorizationError(f"square {(a, b)} -> {(bp, ap)} changes colors")
            if self.s(a) != self.r(b):
                raise FactorizationError(f"square {(a, b)}: pair is not composable")
            if self.s(bp) != self.r(ap):
                raise FactorizationError(f"square {(a, b)}: image {(bp, ap)} is not composable")
            if self.r(bp) != self.r(a) or self.s(ap) != self.s(b):
                raise FactorizationError(f"square {(a, b)} -> {(bp, ap)}: endpoints do not match")
        for ci in range(1, self.rank + 1):
            for cj in range(ci + 1, self.rank + 1):
                pairs = self.composable_pairs(ci, cj)
                back = self.composable_pairs(cj, ci)
                if self.windowed:
                    continue
                missing = [p for p in pairs if p not in self.squares]
                if missing:
                    raise FactorizationError(f"no square for composable pair {missing[0]}")
                unhit = [p for p in back if p not in self._unsquares]
                if unhit:
                    raise FactorizationError(f"composable pair {unhit[0]} is not the image of any square")

    def check_associativity(self):
        """Cube condition: both reduced rewritings of every ``l j i`` edge path agree."""
        for i, j, l in itertools.combinations(range(1, self.rank + 1), 3):
            for z in self.edges_of_color(l):
                for y in self.edges_at(self.s(z), j):
                    for x in self.edges_at(self.s(y), i):
                        p = [z, y, x]
                        for a, b in ((0, 1), (1, 2), (0, 1)):
                            p[a], p[b] = self._swap(p[a], p[b])
                        q = [z, y, x]
                        for a, b in ((1, 2), (0, 1), (1, 2)):
                            q[a], q[b] = self._swap(q[a], q[b])
                        if p != q:
                            raise FactorizationError(f"squares are not associative on {(z, y, x)}: {p} vs {q}")
        return True

    def check_sources(self):
        for v in self.trusted_vertices():
            for c in range(1, self.rank + 1):
                if not self.edges_at(v, c):
                    raise SourceViolation(f"vertex {v!r} receives no edge of color {c}")

    # -- morphisms ---------------------------------------------------------

    def identity(self, v):
        self.vertex_index(v)
        return Morphism(self, v, v, dg.zero(self.rank), ((),) * self.rank)

    def edge(self, name):
        e = self.edges[name]
        word = tuple((name,) if c == e.color else () for c in range(1, self.rank + 1))
        return Morphism(self, e.range, e.source, dg.unit(self.rank, e.color), word)

    def _from_sorted(self, path, v):
        word = [[] for _ in range(self.rank)]
        src = v
        for e in path:
            word[self.edges[e].color - 1].append(e)
            src = self.edges[e].source
        deg = tuple(len(w) for w in word)
        return Morphism(self, v, src, deg, tuple(tuple(w) for w in word))

    def _swap(self, x, y):
        """Replace the adjacent pair ``x y`` by its other factorization."""
        if self.edges[x].color < self.edges[y].color:
            out = self.squares.get((x, y))
        else:
            out = self._unsquares.get((x, y))
        if out is None:
            if self.windowed:
                raise WindowOverflow(f"square through {(x, y)} leaves the window")
            raise FactorizationError(f"no square relates {(x, y)}")
        return out

    def check_path(self, path, v=None):
        path = list(path)
        if not path:
            return
        if v is not None and self.r(path[0]) != v:
            raise NotComposable(f"path starts at {self.r(path[0])!r}, not {v!r}")
        for x, y in zip(path, path[1:]):
            if self.s(x) != self.r(y):
                raise NotComposable(f"edges {x!r} and {y!r} are not composable")

    def normal_form(self, path, rng=None):
        """Sort an edge path into color-ascending order using the squares.

        With ``rng`` the inversion to rewrite next is chosen at random; the
        result must not depend on that choice.
        """
        path = list(path)
        color = self.edges
        if rng is None:
            for i in range(1, len(path)):
                j = i
                while j > 0 and color[path[j - 1]].color > color[path[j]].color:
                    path[j - 1], path[j] = self._swap(path[j - 1], path[j])
                    j -= 1
            return path
        while True:
            inv = [i for i in range(len(path) - 1)
                   if color[path[i]].color > color[path[i + 1]].color]
            if not inv:
                return path
            i = rng.choice(inv)
            path[i], path[i + 1] = self._swap(path[i], path[i + 1])

    def rearrange(self, path, colors):
        """Rewrite ``path`` into the factorization with color sequence ``colors``."""
        path = list(path)
        slots = {}
        for pos, c in enumerate(colors):
            slots.setdefault(c, []).append(pos)
        seen = {}
        key = []
        for e in path:
            c = self.edges[e].color
            k = seen.get(c, 0)
            seen[c] = k + 1
            try:
                key.append(slots[c][k])
            except (KeyError, IndexError):
                raise DegreeMismatch("color sequence does not match the path degree") from None
        if len(key) != len(colors):
            raise DegreeMismatch("color sequence does not match the path degree")
        n = len(path)
        for i in range(1, n):
            j = i
            while j > 0 and key[j - 1] > key[j]:
                path[j - 1], path[j] = self._swap(path[j - 1], path[j])
                key[j - 1], key[j] = key[j], key[j - 1]
                j -= 1
        return path

    def path_morphism(self, path, v=None, rng=None):
        """The morphism obtained by composing an arbitrary composable edge path."""
        path = list(path)
        if not path:
            if v is None:
                raise MalformedSkeleton("an empty path needs an explicit vertex")
            return self.identity(v)
        self.check_path(path, v)
        start = self.r(path[0])
        return self._from_sorted(self.normal_form(path, rng), start)

    def compose(self, lam, mu, rng=None):
        if lam.graph is not self or mu.graph is not self:
            raise NotComposable("morphisms belong to different graphs")
        if lam.source != mu.range:
            raise NotComposable(f"s(λ)={lam.source!r} differs from r(μ)={mu.range!r}")
        if lam.is_vertex:
            return mu
        if mu.is_vertex:
            return lam
        if rng is not None:
            return self._from_sorted(self.normal_form(lam.path + mu.path, rng), lam.range)
        key = (lam.path, mu.path)
        out = self._ccache.get(key)
        if out is None:
            out = self._from_sorted(self.normal_form(lam.path + mu.path), lam.range)
            if len(self._ccache) < 500_000:
                self._ccache[key] = out
        return out

    def factor(self, lam, m, n):
        if dg.add(m, n) != tuple(lam.degree) or not (dg.is_natural(m) and dg.is_natural(n)):
            raise DegreeMismatch(f"{m} + {n} != d(λ) = {lam.degree}")
        if not any(m):
            return self.identity(lam.range), lam
        if not any(n):
            return lam, self.identity(lam.source)
        key = (lam.range, lam.path, m)
        hit = self._fcache.get(key)
        if hit is not None:
            return hit
        colors = [c for c in range(1, self.rank + 1) for _ in range(m[c - 1])]
        split = len(colors)
        colors += [c for c in range(1, self.rank + 1) for _ in range(n[c - 1])]
        path = self.rearrange(lam.path, colors)
        head = self._from_sorted(path[:split], lam.range)
        tail = self._from_sorted(path[split:], head.source)
        if len(self._fcache) < 500_000:
            self._fcache[key] = (head, tail)
        return head, tail

    def morphisms(self, v, n):
        """``Λ^n(v)`` in lexicographic order of normal forms."""
        self.vertex_index(v)
        n = tuple(n)
        if len(n) != self.rank or not dg.is_natural(n):
            raise DegreeMismatch(f"bad degree {n} for a rank-{self.rank} graph")
        hit = self._mcache.get((v, n))
        if hit is not None:
            return list(hit)
        colors = [c for c in range(1, self.rank + 1) for _ in range(n[c - 1])]
        out = []

        def walk(at, pos, path):
            if pos == len(colors):
                out.append(self._from_sorted(path, v))
                return
            for e in self.edges_at(at, colors[pos]):
                path.append(e)
                walk(self.edges[e].source, pos + 1, path)
                path.pop()

        walk(v, 0, [])
        self._mcache[(v, n)] = tuple(out)
        return out

    def all_morphisms(self, n):
        return [lam for v in self.vertices for lam in self.morphisms(v, n)]

    def morphisms_upto(self, bound, v=None):
        verts = self.vertices if v is None else (v,)
        return [lam for m in dg.box(bound) for u in verts for lam in self.morphisms(u, m)]

    def adjacency(self, c):
        """Count matrix of color-``c`` edges indexed by (range, source)."""
        k = len(self.vertices)
        A = np.zeros((k, k), dtype=object)
        for e in self.edges.values():
            if e.color == c:
                A[self._vindex[e.range], self._vindex[e.source]] += 1
        return A

    def vertex_matrix(self, n):
        """Counts of degree-``n`` morphisms by (range, source)."""
        n = tuple(n)
        if len(n) != self.rank or not dg.is_natural(n):
            raise DegreeMismatch(f"bad degree {n} for a rank-{self.rank} graph")
        k = len(self.vertices)
        M = np.zeros((k, k), dtype=object)
        for i in range(k):
            M[i, i] = 1
        for c in range(1, self.rank + 1):
            A = self.adjacency(c)
            for _ in range(n[c - 1]):
                M = M.dot(A)
        return VertexMatrix(n, self.vertices, M)

    # -- lattice of a morphism ---------------------------------------------

    def grid(self, lam):
        """Every unit edge inside ``λ``: ``{(p, c): edge}`` with ``λ(p, p + e_c) = edge``."""
        k = self.rank
        N = tuple(lam.degree)
        known = {}
        pos = [0] * k
        for c in range(k):
            for e in lam.word[c]:
                known[(tuple(pos), c + 1)] = e
                pos[c] += 1
        if k == 1:
            return known
        if k == 2:
            n1, n2 = N
            for j in range(n2):
                for i in range(n1 - 1, -1, -1):
                    a = known[((i, j), 1)]
                    b = known[((i + 1, j), 2)]
                    bp, ap = self._swap(a, b)
                    known[((i, j), 2)] = bp
                    known[((i, j + 1), 1)] = ap
            return known
        pts = dg.box(N)
        changed = True
        while changed:
            changed = False
            for p in pts:
                for i in range(1, k + 1):
                    pi = dg.add(p, dg.unit(k, i))
                    for j in range(i + 1, k + 1):
                        pj = dg.add(p, dg.unit(k, j))
                        if not dg.leq(dg.add(pi, dg.unit(k, j)), N):
                            continue
                        a, b = known.get((p, i)), known.get((pi, j))
                        bp, ap = known.get((p, j)), known.get((pj, i))
                        if a is not None and b is not None and (bp is None or ap is None):
                            known[(p, j)], known[(pj, i)] = self._swap(a, b)
                            changed = True
                        elif bp is not None and ap is not None and (a is None or b is None):
                            known[(p, i)], known[(pi, j)] = self._swap(bp, ap)
                            changed = True
        return known

    def staircase(self, grid, m, n):
        """The edge path of ``λ(m, n)`` in normal form, as a tuple."""
        pos = list(m)
        path = []
        for c in range(1, self.rank + 1):
            for _ in range(n[c - 1] - m[c - 1]):
                path.append(grid[(tuple(pos), c)])
                pos[c - 1] += 1
        return tuple(path)

    def segment(self, grid, start, m, n):
        """Read ``λ(m, n)`` off a grid; ``start`` is the range vertex of ``λ``."""
        path = self.staircase(grid, m, n)
        if path:
            return self._from_sorted(path, self.r(path[0]))
        return self.identity(self.vertex_at(grid, start, m))

    def vertex_at(self, grid, start, p):
        """The vertex ``λ(p)`` of a grid."""
        if not any(p):
            return start
        for c in range(1, self.rank + 1):
            if p[c - 1] > 0:
                q = tuple(a - (1 if i == c - 1 else 0) for i, a in enumerate(p))
                e = grid.get((q, c))
                if e is not None:
                    return self.edges[e].source
        raise KeyError(p)


def format_id(x):
    """Text form of a vertex or edge id: strings as is, tuples as ``[a|b|...]``."""
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "[" + "|".join(format_id(a) for a in x) + "]"
    return str(x)


def validate(skeleton: Skeleton, squares: SquareSet) -> KGraph:
    """Check a square presentation and return the k-graph it defines."""
    if skeleton.rank > 2:
        raise MalformedSkeleton("square presentations are only supported up to rank 2; "
                                "build higher ranks with product, pullback or skew_product")
    return KGraph(skeleton.rank, skeleton.vertices, skeleton.edges, squares, kind="theta")


def compose(lam: Morphism, mu: Morphism) -> Morphism:
    return lam.graph.compose(lam, mu)


def factor(lam: Morphism, m, n):
    return lam.graph.factor(lam, tuple(m), tuple(n))


def morphisms(graph: KGraph, v, n):
    return graph.morphisms(v, tuple(n))


def vertex_matrix(graph: KGraph, n) -> VertexMatrix:
    return graph.vertex_matrix(tuple(n))


def compose_all(graph: KGraph, parts: Iterable[Morphism]):
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = graph.compose(out, p)
    return out


def random_normal_form(graph: KGraph, path, seed):
    return graph.normal_form(path, random.Random(seed))
