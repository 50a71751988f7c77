"""Infinite paths and the structural analyses built on them.

Infinite paths are handled only through eventually periodic descriptors
``x = ρ γ γ γ ...`` with ``d(γ)`` strictly positive; such data pins down the
whole functor ``Ω_k -> Λ``.  Verdicts are three valued; every HOLDS or FAILS
comes with a witness or with the exhausted bound that justifies it.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Any

from . import degree as dg
from .constructions import MonoidMap
from .core import KGraph, Morphism
from .errors import DegreeOrderViolation, NotComposable


class Status(enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    UNKNOWN = "UNKNOWN"

    def __str__(self):
        return self.value


@dataclass
class AnalysisVerdict:
    status: Status
    witness: Any = None
    horizon: Any = None
    exact: bool = True
    detail: str = ""
    subverdicts: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.status is Status.HOLDS

    @property
    def fails(self):
        return self.status is Status.FAILS

    def __str__(self):
        kind = "exact" if self.exact else "evidence"
        out = f"{self.status} ({kind}"
        if self.horizon is not None:
            out += f", bound {self.horizon}"
        out += ")"
        if self.detail:
            out += f": {self.detail}"
        if self.witness is not None:
            out += f" [witness: {format_witness(self.witness)}]"
        return out


def format_witness(w):
    if isinstance(w, (list, tuple)):
        return "(" + ", ".join(format_witness(a) for a in w) + ")"
    if isinstance(w, dict):
        return "{" + ", ".join(f"{k}: {format_witness(v)}" for k, v in w.items()) + "}"
    return str(w)


# -- eventually periodic paths ---------------------------------------------

@dataclass(frozen=True)
class PathDescriptor:
    """The infinite path ``ρ γ γ γ ...``."""

    prefix: Morphism
    cycle: Morphism

    def __post_init__(self):
        g = self.cycle
        if g.range != g.source:
            raise NotComposable("cycle must start and end at the same vertex")
        if self.prefix.source != g.range:
            raise NotComposable("cycle must start at the source of the prefix")
        if not dg.strictly_positive(g.degree):
            raise DegreeOrderViolation("cycle degree must be strictly positive")

    @property
    def graph(self):
        return self.prefix.graph

    def __str__(self):
        return f"{self.prefix}({self.cycle})^inf"


def descriptor(prefix, cycle):
    return PathDescriptor(prefix, cycle)


@lru_cache(maxsize=2048)
def _unrolled(x: PathDescriptor, j: int):
    L = x.graph
    lam = x.prefix
    for _ in range(j):
        lam = L.compose(lam, x.cycle)
    return lam, L.grid(lam)


def _reps_needed(x, n):
    d, g = x.prefix.degree, x.cycle.degree
    j = 0
    for a, b, c in zip(n, d, g):
        if a > b:
            j = max(j, -(-(a - b) // c))
    return j


def eval_path(x: PathDescriptor, m, n) -> Morphism:
    """``x(m, n)``."""
    m, n = tuple(m), tuple(n)
    if not (dg.is_natural(m) and dg.leq(m, n)):
        raise DegreeOrderViolation(f"need 0 <= m <= n, got m={m}, n={n}")
    lam, grid = _unrolled(x, _reps_needed(x, n))
    return x.graph.segment(grid, lam.range, m, n)


def vertex(x: PathDescriptor, n):
    return eval_path(x, n, n).range


def shift(x: PathDescriptor, p) -> PathDescriptor:
    """``σ^p x``."""
    p = tuple(p)
    if not dg.is_natural(p):
        raise DegreeOrderViolation(f"shift needs p >= 0, got {p}")
    if not any(p):
        return x
    lam, _ = _unrolled(x, _reps_needed(x, p))
    _, tail = x.graph.factor(lam, p, dg.sub(lam.degree, p))
    return PathDescriptor(tail, x.cycle)


def prepend(lam: Morphism, x: PathDescriptor) -> PathDescriptor:
    """``λx``."""
    if lam.source != x.prefix.range:
        raise NotComposable(f"s(λ)={lam.source!r} but x(0)={x.prefix.range!r}")
    return PathDescriptor(x.graph.compose(lam, x.prefix), x.cycle)


def _prefix_equal(x, y, n):
    return eval_path(x, dg.zero(len(n)), n) == eval_path(y, dg.zero(len(n)), n)


def same_path(x: PathDescriptor, y: PathDescriptor) -> bool:
    """Exact equality of the infinite paths described by ``x`` and ``y``."""
    if x.graph is not y.graph:
        return False
    D = dg.join(x.prefix.degree, y.prefix.degree)
    gx, gy = x.cycle.degree, y.cycle.degree
    if gx == gy:
        # beyond D both are gx-periodic, so one period past D decides
        return _prefix_equal(x, y, dg.add(D, gx))
    # if x == y then σ^D y must also have period gx
    tail = shift(y, D)
    if not same_path(shift(tail, gx), tail):
        return False
    return _prefix_equal(x, y, dg.add(D, gx))


def is_period(x: PathDescriptor, p, horizon=None) -> AnalysisVerdict:
    """Is ``p ∈ Z^k`` a period of ``x``?  Decided exactly via ``σ^{p+} x = σ^{p-} x``."""
    p = tuple(p)
    pp, pm = dg.positive_part(p), dg.negative_part(p)
    if same_path(shift(x, pp), shift(x, pm)):
        return AnalysisVerdict(Status.HOLDS, witness=("shifts agree", pp, pm), horizon=horizon,
                               detail=f"σ^{pp} x = σ^{pm} x")
    k = len(p)
    bound = dg.add(dg.add(x.prefix.degree, x.cycle.degree), dg.add(pp, pm))
    for m in dg.box(bound):
        mp = dg.add(m, p)
        if not dg.is_natural(mp):
            continue
        if vertex(x, m) != vertex(x, mp):
            return AnalysisVerdict(Status.FAILS, witness=((m, m), (mp, mp)), horizon=horizon,
                                   detail=f"x({m}) != x({mp})")
        for i in range(1, k + 1):
            n = dg.add(m, dg.unit(k, i))
            a, b = eval_path(x, m, n), eval_path(x, mp, dg.add(mp, dg.unit(k, i)))
            if a != b:
                return AnalysisVerdict(Status.FAILS, witness=((m, n), (mp, dg.add(n, p))),
                                       horizon=horizon, detail=f"x{(m, n)} = {a} but x{(mp, dg.add(n, p))} = {b}")
    raise AssertionError("paths differ but no differing unit rectangle was found")


# -- reachability helpers ----------------------------------------------------

def _successors(L: KGraph):
    succ = {v: [] for v in L.vertices}
    for e in L.edges.values():
        succ[e.range].append((e.name, e.source))
    return succ


def reach(L: KGraph, v):
    """Vertices w with some λ, r(λ) = v, s(λ) = w (including v itself)."""
    succ = _successors(L)
    seen = {v}
    todo = [v]
    while todo:
        u = todo.pop()
        for _, w in succ[u]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def path_to(L: KGraph, v, targets):
    """A shortest edge path from ``v`` to a vertex in ``targets`` (BFS, r -> s)."""
    succ = _successors(L)
    prev = {v: None}
    q = deque([v])
    while q:
        u = q.popleft()
        if u in targets:
            path = []
            while prev[u] is not None:
                e, u = prev[u]
                path.append(e)
            return path[::-1]
        for e, w in succ[u]:
            if w not in prev:
                prev[w] = (e, u)
                q.append(w)
    return None


def _morph(L, path, v):
    return L.path_morphism(path, v)


def sccs(L: KGraph, allowed=None):
    """Strongly connected components of the union digraph r(e) -> s(e) (Tarjan)."""
    verts = [v for v in L.vertices if allowed is None or v in allowed]
    succ = {v: [w for _, w in ws if allowed is None or w in allowed]
            for v, ws in _successors(L).items() if v in set(verts)}
    index, low, onstack, stack, out = {}, {}, set(), [], []
    counter = [0]

    def strong(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        onstack.add(v)
        for w in succ[v]:
            if w not in index:
                strong(w)
                low[v] = min(low[v], low[w])
            elif w in onstack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                onstack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(comp)

    for v in verts:
        if v not in index:
            strong(v)
    return out


def _internal_edges(L, comp):
    cs = set(comp)
    return [e.name for e in L.edges.values() if e.range in cs and e.source in cs]


# -- aperiodicity --------------------------------------------------------------

def _cycle_from(L, u, first, comp):
    """``first`` followed by a shortest path back to ``u`` inside ``comp``."""
    cs = set(comp)
    succ = {}
    for e in L.edges.values():
        if e.range in cs and e.source in cs:
            succ.setdefault(e.range, []).append((e.name, e.source))
    start = L.s(first)
    prev = {start: None}
    q = deque([start])
    while q:
        w = q.popleft()
        if w == u:
            break
        for e, x in succ.get(w, []):
            if x not in prev:
                prev[x] = (e, w)
                q.append(x)
    back = []
    w = u
    while prev[w] is not None:
        e, w = prev[w]
        back.append(e)
    return [first] + back[::-1]


def _aperiodicity_rank1(L: KGraph, v) -> AnalysisVerdict:
    R = reach(L, v)
    comps = sccs(L, R)
    for comp in comps:
        inner = _internal_edges(L, comp)
        if len(inner) > len(comp):
            # some vertex has two internal out-edges: two distinct first-return cycles
            for u in comp:
                outs = [e for e in inner if L.r(e) == u]
                if len(outs) >= 2:
                    lam = _morph(L, path_to(L, v, {u}), v)
                    c1 = _morph(L, _cycle_from(L, u, outs[0], comp), u)
                    c2 = _morph(L, _cycle_from(L, u, outs[1], comp), u)
                    return AnalysisVerdict(
                        Status.HOLDS, witness=(lam, c1, c2),
                        detail=f"v={v!r} reaches {u!r}, which carries two distinct cycles")
    cycles = []
    for comp in comps:
        inner = _internal_edges(L, comp)
        if inner:
            u = comp[0]
            first = next(e for e in inner if L.r(e) == u)
            cycles.append(_morph(L, _cycle_from(L, u, first, comp), u))
    c = cycles[0]
    x = PathDescriptor(_morph(L, path_to(L, v, {c.range}), v), c)
    return AnalysisVerdict(Status.FAILS, witness=x,
                           detail=f"every cycle reachable from {v!r} lacks an exit; "
                                  f"reachable cycles: {', '.join(map(str, cycles))}")


@dataclass
class SearchReport:
    eliminated: dict  # pair -> distinguishing morphism
    undistinguished: list
    examined: int

    def __str__(self):
        return (f"{len(self.eliminated)} pairs separated, {len(self.undistinguished)} open, "
                f"{self.examined} paths examined")


def aperiodicity_search(L: KGraph, v, period_bound=3, horizon=6) -> AnalysisVerdict:
    """Bounded search for paths from ``v`` separating the shifts ``σ^m`` and ``σ^n``.

    For every pair ``m != n`` in ``[0, period_bound]^k`` look for
    ``λ ∈ Λ^{(H,...,H)}(v)`` with ``λ(m, m+T) != λ(n, n+T)``, ``T = H - (m ∨ n)``.
    """
    k = L.rank
    if horizon <= period_bound:
        raise ValueError("horizon must exceed the period bound")
    N = (horizon,) * k
    pts = dg.box((period_bound,) * k)
    pending = list(combinations(pts, 2))
    eliminated = {}
    examined = 0
    for lam in L.morphisms(v, N):
        if not pending:
            break
        examined += 1
        grid = L.grid(lam)
        still = []
        for m, n in pending:
            T = dg.sub(N, dg.join(m, n))
            a = L.staircase(grid, m, dg.add(m, T))
            b = L.staircase(grid, n, dg.add(n, T))
            if a != b:
                eliminated[(m, n)] = lam
            else:
                still.append((m, n))
        pending = still
    bound = {"period_bound": period_bound, "horizon": horizon}
    report = SearchReport(eliminated, pending, examined)
    if not pending:
        return AnalysisVerdict(Status.HOLDS, witness=report, horizon=bound, exact=False,
                               detail=f"all {len(eliminated)} shift pairs at {v!r} separated "
                                      f"by paths of degree {N}")
    return AnalysisVerdict(Status.UNKNOWN, witness=report, horizon=bound, exact=False,
                           detail=f"{len(pending)} shift pairs at {v!r} never separated up to degree {N}: "
                                  + ", ".join(f"{m}/{n}" for m, n in pending[:6])
                                  + (" ..." if len(pending) > 6 else ""))


def aperiodicity_check(L: KGraph, v=None, period_bound=3, horizon=6) -> AnalysisVerdict:
    """Condition (A) at ``v`` (or at every vertex when ``v`` is None)."""
    if v is None:
        subs = {u: aperiodicity_check(L, u, period_bound, horizon) for u in L.trusted_vertices()}
        exact = all(s.exact for s in subs.values())
        bad = [u for u, s in subs.items() if s.fails]
        if bad:
            return AnalysisVerdict(Status.FAILS, witness=subs[bad[0]].witness, exact=subs[bad[0]].exact,
                                   detail=f"no aperiodic path from {bad[0]!r}", subverdicts=subs)
        unk = [u for u, s in subs.items() if s.status is Status.UNKNOWN]
        hz = None if L.rank == 1 else {"period_bound": period_bound, "horizon": horizon}
        if unk:
            return AnalysisVerdict(Status.UNKNOWN, horizon=hz, exact=False,
                                   detail=f"undecided at {unk[0]!r}: {subs[unk[0]].detail}", subverdicts=subs)
        return AnalysisVerdict(Status.HOLDS, witness={u: s.witness for u, s in subs.items()}, horizon=hz,
                               exact=exact, detail="every vertex " + ("has an aperiodic path" if exact
                                                         else "passed the shift-separation search"),
                               subverdicts=subs)
    L.vertex_index(v)
    if L.rank == 1:
        return _aperiodicity_rank1(L, v)
    return aperiodicity_search(L, v, period_bound, horizon)


def condition_l_oracle(L: KGraph):
    """Brute force: enumerate every simple cycle and look for an exit.

    In category convention an exit of a cycle is an edge off the cycle whose
    range lies on the cycle.  Returns ``(holds, offending cycle or None)``.
    """
    if L.rank != 1:
        raise ValueError("condition (L) is a 1-graph notion")
    succ = _successors(L)
    order = {v: i for i, v in enumerate(L.vertices)}
    for start in L.vertices:
        # cycles whose smallest vertex is start
        stack = [(start, [], {start})]
        while stack:
            u, path, seen = stack.pop()
            for e, w in succ[u]:
                if order[w] < order[start]:
                    continue
                if w == start:
                    cyc = path + [e]
                    verts = {L.r(x) for x in cyc}
                    if not any(x.range in verts and x.name not in cyc for x in L.edges.values()):
                        return False, cyc
                elif w not in seen:
                    stack.append((w, path + [e], seen | {w}))
    return True, None


# -- cofinality ------------------------------------------------------------------

def _diagonal_cycle(L: KGraph, allowed, horizon):
    """A cycle of degree ``t(1,...,1)`` at a vertex of ``allowed``, if any."""
    p = dg.ones(L.rank)
    step = {}
    for u in allowed:
        step[u] = [lam for lam in L.morphisms(u, p) if lam.source in allowed]
    limit = max(horizon, len(allowed))
    for u in allowed:
        # BFS in the degree-p digraph restricted to allowed
        prev = {}
        q = deque([(u, 0)])
        seen = set()
        while q:
            w, t = q.popleft()
            if t >= limit:
                continue
            for lam in step[w]:
                x = lam.source
                if x == u:
                    chain = [lam]
                    while w != u:
                        lam0, w = prev[w]
                        chain.append(lam0)
                    cyc = chain[-1]
                    for part in chain[-2::-1]:
                        cyc = L.compose(cyc, part)
                    return cyc
                if x not in seen:
                    seen.add(x)
                    prev[x] = (lam, w)
                    q.append((x, t + 1))
    return None


def cofinality_check(L: KGraph, horizon=6) -> AnalysisVerdict:
    """Cofinality, decided exactly.

    An infinite path avoiding ``Reach(v)`` visits some vertex twice along its
    diagonal ``x(tp)``, giving a cycle of diagonal degree inside the
    complement ``C_v``; conversely every vertex of such a cycle lies in
    ``C_v`` because it reaches the cycle's base.  So cofinality fails exactly
    when some ``C_v`` carries a diagonal cycle.
    """
    verts = L.trusted_vertices()
    reaches = {v: reach(L, v) for v in verts}
    if all(len(reaches[v]) == len(L.vertices) for v in verts):
        return AnalysisVerdict(Status.HOLDS, witness="strongly connected", horizon=horizon,
                               detail="every vertex reaches every vertex")
    for v in verts:
        comp = [u for u in L.vertices if u not in reaches[v]]
        if not comp:
            continue
        cyc = _diagonal_cycle(L, comp, horizon)
        if cyc is not None:
            x = PathDescriptor(L.identity(cyc.range), cyc)
            return AnalysisVerdict(Status.FAILS, witness=(v, x), horizon=horizon,
                                   detail=f"the path {x} never meets a vertex reachable from {v!r}")
    return AnalysisVerdict(Status.HOLDS, witness="no complement carries a cycle", horizon=horizon,
                           detail="every set of vertices unreachable from some v is acyclic")


def simplicity_verdict(L: KGraph, period_bound=3, horizon=6) -> AnalysisVerdict:
    """Under condition (A), simplicity is equivalent to cofinality."""
    aper = aperiodicity_check(L, None, period_bound, horizon)
    cof = cofinality_check(L, horizon)
    subs = {"aperiodicity": aper, "cofinality": cof}
    if aper.fails:
        return AnalysisVerdict(Status.UNKNOWN, subverdicts=subs, exact=aper.exact,
                               detail="aperiodicity fails, so the cofinality criterion does not apply")
    if aper.holds and cof.holds:
        return AnalysisVerdict(Status.HOLDS, witness=("aperiodicity", "cofinality"), subverdicts=subs,
                               exact=aper.exact and cof.exact,
                               detail="aperiodic and cofinal" + ("" if aper.exact else
                                                                 " (aperiodicity from bounded search)"))
    if aper.holds and cof.fails:
        return AnalysisVerdict(Status.FAILS, witness=cof.witness, subverdicts=subs,
                               exact=aper.exact and cof.exact, detail="aperiodic but not cofinal")
    return AnalysisVerdict(Status.UNKNOWN, subverdicts=subs, exact=False,
                           detail="aperiodicity undecided at the given bounds")


def pure_infiniteness_hypothesis(L: KGraph) -> AnalysisVerdict:
    """Every vertex reaches a vertex carrying a cycle of nonzero degree."""
    on_cycle = set()
    for comp in sccs(L):
        if _internal_edges(L, comp):
            on_cycle.update(comp)
    wit = {}
    for v in L.trusted_vertices():
        path = path_to(L, v, on_cycle)
        if path is None:
            return AnalysisVerdict(Status.FAILS, witness=v, detail=f"{v!r} reaches no cycle")
        lam = _morph(L, path, v)
        u = lam.source
        comp = next(c for c in sccs(L, reach(L, u)) if u in c)
        first = next(e for e in _internal_edges(L, comp) if L.r(e) == u)
        mu = _morph(L, _cycle_from(L, u, first, comp), u)
        wit[v] = (lam, mu)
    return AnalysisVerdict(Status.HOLDS, witness=wit, detail="every vertex reaches a cycle")


# -- cylinders ---------------------------------------------------------------

def cylinder_partition_check(L: KGraph, lam: Morphism, n) -> bool:
    """``Z(λ)`` is the disjoint union of ``Z(λμ)`` over ``μ ∈ Λ^n(s(λ))``."""
    n = tuple(n)
    ext = [L.compose(lam, mu) for mu in L.morphisms(lam.source, n)]
    if len(set(ext)) != len(ext):
        return False
    total = dg.add(lam.degree, n)
    below = [nu for nu in L.morphisms(lam.range, total) if L.factor(nu, lam.degree, n)[0] == lam]
    return sorted(map(str, below)) == sorted(map(str, ext)) and len(below) == len(ext)


# -- pulling paths back along monoid maps ---------------------------------------

@dataclass
class PulledPath:
    table: dict  # (m, n) -> (x(f(m), f(n)), n - m)
    descriptor: PathDescriptor | None = None


def _pullback_morphism(P: KGraph, f: MonoidMap, x: PathDescriptor, m, n):
    pos = f(m)
    path = []
    for i in range(1, f.l + 1):
        for _ in range(n[i - 1] - m[i - 1]):
            seg = eval_path(x, pos, dg.add(pos, f.column(i)))
            path.append((i, seg.range) + seg.path)
            pos = dg.add(pos, f.column(i))
    return P.path_morphism(path, vertex(x, f(m)))


def path_pullback(f: MonoidMap, x: PathDescriptor, window, P: KGraph | None = None) -> PulledPath:
    """``f*(x)(m, n) = (x(f(m), f(n)), n - m)`` for ``m <= n <= window``.

    With ``P = f*(Λ)`` supplied, also return ``f*(x)`` as a descriptor over
    ``P`` when ``f(1,...,1)`` is strictly positive and parallel to ``d(γ)``.
    """
    window = tuple(window)
    table = {}
    for n in dg.box(window):
        for m in dg.box(n):
            table[(m, n)] = (eval_path(x, f(m), f(n)), dg.sub(n, m))
    desc = None
    fp = f(dg.ones(f.l))
    g = x.cycle.degree
    if P is not None and dg.strictly_positive(fp):
        # need t with t f(p) a positive multiple of d(γ)
        t = None
        if all(a * g[0] == fp[0] * b for a, b in zip(fp, g)):
            t = Fraction(fp[0], g[0]).denominator
        if t is not None:
            j = 0
            while not dg.leq(x.prefix.degree, f((j,) * f.l)):
                j += 1
            D = (j,) * f.l
            q = dg.add(D, (t,) * f.l)
            rho = _pullback_morphism(P, f, x, dg.zero(f.l), D)
            gam = _pullback_morphism(P, f, x, D, q)
            desc = PathDescriptor(rho, gam)
    return PulledPath(table, desc)
