"""Exhaustive isomorphism search between small k-graphs.

A degree-preserving isomorphism of k-graphs is determined by a vertex
bijection and a color-preserving edge bijection that respects ranges, sources
and every commuting square.  The search backtracks over vertices first
(pruned by per-color edge multiplicities), then over edges bucket by bucket,
checking each square as soon as its four edges are mapped.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import permutations

from . import degree as dg
from .core import KGraph, Morphism
from .errors import SearchBudgetExceeded


@dataclass
class IsoResult:
    found: bool
    vertex_map: dict = field(default_factory=dict)
    edge_map: dict = field(default_factory=dict)
    explored: int = 0
    reason: str = ""
    verified_to: tuple | None = None

    def __bool__(self):
        return self.found

    def describe(self):
        if not self.found:
            return f"NONE ({self.reason}; {self.explored} search nodes, exhaustive)"
        lines = [f"ISOMORPHISM ({self.explored} search nodes)"]
        lines += [f"  vertex {v} -> {w}" for v, w in self.vertex_map.items()]
        lines += [f"  edge {e} -> {f}" for e, f in self.edge_map.items()]
        if self.verified_to is not None:
            lines.append(f"  morphism bijection verified up to degree {self.verified_to}")
        return "\n".join(lines)


def _signature(L: KGraph, v):
    sig = []
    for c in range(1, L.rank + 1):
        ins = len(L.edges_at(v, c))
        outs = sum(1 for e in L.edges.values() if e.color == c and e.source == v)
        loops = sum(1 for e in L.edges_at(v, c) if L.s(e) == v)
        sig.append((ins, outs, loops))
    return tuple(sig)


def _bucket_counts(L: KGraph):
    cnt = Counter()
    buckets = defaultdict(list)
    for e in L.edges.values():
        cnt[(e.range, e.source, e.color)] += 1
        buckets[(e.range, e.source, e.color)].append(e.name)
    return cnt, buckets


def map_morphism(L2: KGraph, res: IsoResult, lam: Morphism) -> Morphism:
    """Image of ``λ`` under an isomorphism found by the search."""
    if lam.is_vertex:
        return L2.identity(res.vertex_map[lam.range])
    return L2.path_morphism([res.edge_map[e] for e in lam.path])


def isomorphism_search(L1: KGraph, L2: KGraph, max_degree=None, budget=1_000_000) -> IsoResult:
    explored = 0

    def tick():
        nonlocal explored
        explored += 1
        if explored > budget:
            raise SearchBudgetExceeded(explored, budget)

    if L1.rank != L2.rank:
        return IsoResult(False, reason="ranks differ")
    if len(L1.vertices) != len(L2.vertices):
        return IsoResult(False, reason="vertex counts differ")
    for c in range(1, L1.rank + 1):
        if len(L1.edges_of_color(c)) != len(L2.edges_of_color(c)):
            return IsoResult(False, reason=f"color-{c} edge counts differ")
    if len(L1.squares) != len(L2.squares):
        return IsoResult(False, reason="square counts differ")

    sig1 = {v: _signature(L1, v) for v in L1.vertices}
    sig2 = {w: _signature(L2, w) for w in L2.vertices}
    cnt1, buckets1 = _bucket_counts(L1)
    cnt2, buckets2 = _bucket_counts(L2)
    verts1 = list(L1.vertices)

    # squares touching each edge, for early checking
    sq_by_edge = defaultdict(list)
    for key, val in L1.squares.items():
        for x in set(key + val):
            sq_by_edge[x].append((key, val))

    def vertex_ok(vmap, v):
        w = vmap[v]
        for u, x in vmap.items():
            for c in range(1, L1.rank + 1):
                if cnt1[(v, u, c)] != cnt2[(w, x, c)] or cnt1[(u, v, c)] != cnt2[(x, w, c)]:
                    return False
        return True

    def squares_ok(emap, e):
        for (a, b), (bp, ap) in sq_by_edge[e]:
            if all(x in emap for x in (a, b, bp, ap)):
                if L2.squares.get((emap[a], emap[b])) != (emap[bp], emap[ap]):
                    return False
        return True

    def edge_search(vmap):
        order = []
        for key, names in buckets1.items():
            r, s, c = key
            target = buckets2.get((vmap[r], vmap[s], c), [])
            order.append((names, target))
        order.sort(key=lambda t: len(t[0]))
        flat = [(e, tuple(target)) for names, target in order for e in names]
        emap, used = {}, set()

        def go(i):
            tick()
            if i == len(flat):
                return True
            e, target = flat[i]
            for f in target:
                if f in used:
                    continue
                emap[e] = f
                used.add(f)
                if squares_ok(emap, e) and go(i + 1):
                    return True
                del emap[e]
                used.discard(f)
            return False

        return dict(emap) if go(0) else None

    def vertex_search(i, vmap, used):
        tick()
        if i == len(verts1):
            return edge_search(vmap)
        v = verts1[i]
        for w in L2.vertices:
            if w in used or sig1[v] != sig2[w]:
                continue
            vmap[v] = w
            used.add(w)
            if vertex_ok(vmap, v):
                out = vertex_search(i + 1, vmap, used)
                if out is not None:
                    return out
            del vmap[v]
            used.discard(w)
        return None

    vmap = {}
    emap = vertex_search(0, vmap, set())
    if emap is None:
        return IsoResult(False, explored=explored,
                         reason="no vertex and edge bijection respects ranges, sources, colors and squares")
    res = IsoResult(True, dict(vmap), {e: emap[e] for e in L1.edges}, explored)
    if max_degree is not None:
        verify_morphism_bijection(L1, L2, res, tuple(max_degree))
        res.verified_to = tuple(max_degree)
    return res


def verify_morphism_bijection(L1, L2, res, bound):
    """Check the induced map is a bijection ``Λ1^n(v) -> Λ2^n(φ v)`` for all ``n <= bound``."""
    for n in dg.box(bound):
        for v in L1.vertices:
            src = L1.morphisms(v, n)
            image = [map_morphism(L2, res, lam) for lam in src]
            target = L2.morphisms(res.vertex_map[v], n)
            if len(set(image)) != len(src) or set(image) != set(target):
                raise AssertionError(f"induced map is not a bijection at degree {n}, vertex {v!r}")
    return True


def brute_force_isomorphic(L1: KGraph, L2: KGraph) -> bool:
    """Try every vertex and every color-preserving edge bijection.  Small graphs only."""
    if L1.rank != L2.rank or len(L1.vertices) != len(L2.vertices):
        return False
    cols = range(1, L1.rank + 1)
    e1 = {c: L1.edges_of_color(c) for c in cols}
    e2 = {c: L2.edges_of_color(c) for c in cols}
    if any(len(e1[c]) != len(e2[c]) for c in cols):
        return False

    def edge_maps(c_list):
        if not c_list:
            yield {}
            return
        c = c_list[0]
        for perm in permutations(e2[c]):
            for rest in edge_maps(c_list[1:]):
                m = dict(zip(e1[c], perm))
                m.update(rest)
                yield m

    for vperm in permutations(L2.vertices):
        vmap = dict(zip(L1.vertices, vperm))
        for emap in edge_maps(list(cols)):
            if any(L2.r(emap[e]) != vmap[L1.r(e)] or L2.s(emap[e]) != vmap[L1.s(e)] for e in L1.edges):
                continue
            if all(L2.squares.get((emap[a], emap[b])) == (emap[bp], emap[ap])
                   for (a, b), (bp, ap) in L1.squares.items()):
                return True
    return False
