import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from kgraph import degree as dg
from kgraph import fixtures as fx
from kgraph.constructions import MonoidMap, pullback
from kgraph.dynamics import (
    PathDescriptor,
    Status,
    aperiodicity_check,
    aperiodicity_search,
    cofinality_check,
    condition_l_oracle,
    cylinder_partition_check,
    eval_path,
    is_period,
    path_pullback,
    prepend,
    pure_infiniteness_hypothesis,
    same_path,
    shift,
    simplicity_verdict,
)
from kgraph.errors import DegreeOrderViolation, NotComposable

from helpers import all_finite

FINITE = all_finite()


def o2_path():
    O = fx.o2()
    return PathDescriptor(O.edge("e"), O.edge("f"))


# -- networkx oracles for 1-graphs ----------------------------------------------

def as_multidigraph(L):
    G = nx.MultiDiGraph()
    G.add_nodes_from(L.vertices)
    for e in L.edges.values():
        G.add_edge(e.range, e.source, key=e.name)
    return G


def nx_condition_l(L):
    """Every vertex-simple cycle has an exit: some vertex on it receives two edges."""
    G = as_multidigraph(L)
    for cyc in nx.simple_cycles(nx.DiGraph(G)):
        if all(G.out_degree(u) == 1 for u in cyc):
            return False
    return True


def nx_aperiodic_at(L, v):
    """v reaches a strongly connected piece with more internal edges than vertices."""
    G = as_multidigraph(L)
    reach = nx.descendants(G, v) | {v}
    for comp in nx.strongly_connected_components(G.subgraph(reach)):
        inner = G.subgraph(comp).number_of_edges()
        if inner > len(comp):
            return True
    return False


def nx_cofinal(L):
    G = as_multidigraph(L)
    for v in L.vertices:
        rest = set(L.vertices) - nx.descendants(G, v) - {v}
        H = nx.DiGraph(G.subgraph(rest))
        if rest and not nx.is_directed_acyclic_graph(H):
            return False
    return True


@st.composite
def one_graphs(draw):
    n = draw(st.integers(1, 4))
    verts = [f"v{i}" for i in range(n)]
    edges = []
    for i, v in enumerate(verts):
        for j in range(draw(st.integers(1, 2))):
            edges.append((f"e{i}{j}", v, draw(st.sampled_from(verts))))
    return fx.one_graph(verts, edges)


@given(one_graphs())
def test_rank1_aperiodicity_matches_networkx(L):
    for v in L.vertices:
        got = aperiodicity_check(L, v)
        assert got.exact
        assert got.holds == nx_aperiodic_at(L, v)
        if got.fails:
            x = got.witness
            assert x.prefix.range == v
    assert aperiodicity_check(L).holds == nx_condition_l(L) == condition_l_oracle(L)[0]


@given(one_graphs())
def test_rank1_cofinality_matches_networkx(L):
    got = cofinality_check(L)
    assert got.exact
    assert got.holds == nx_cofinal(L)
    if got.fails:
        v, x = got.witness
        G = as_multidigraph(L)
        seen = nx.descendants(G, v) | {v}
        for n in range(6):
            assert eval_path(x, (n,), (n,)).range not in seen


@given(one_graphs())
def test_pure_infiniteness_always_holds_without_sources(L):
    got = pure_infiniteness_hypothesis(L)
    assert got.holds
    for v, (lam, mu) in got.witness.items():
        assert lam.range == v and lam.source == mu.range == mu.source and any(mu.degree)


# -- the shipped battery ----------------------------------------------------------

BATTERY = {"loop": Status.FAILS, "O2": Status.HOLDS, "two_cycle": Status.FAILS,
           "two_loops": Status.FAILS, "cond_L": Status.HOLDS, "chord": Status.HOLDS}


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_battery_exact_vs_search(name):
    L = FINITE[name]
    assert aperiodicity_check(L).status is BATTERY[name]
    for v in L.vertices:
        exact = aperiodicity_check(L, v)
        search = aperiodicity_search(L, v)
        assert search.holds == exact.holds
        if not exact.holds:
            assert search.status is Status.UNKNOWN


def test_searcher_limitation_on_reducible_graph():
    """Pairwise separation is only evidence: here each pair is separated by some path,
    yet every path from u is eventually periodic."""
    L = fx.loop_with_exit_to_loop()
    assert aperiodicity_check(L, "u").fails
    assert aperiodicity_search(L, "u").holds


def test_rank2_verdicts():
    T = fx.t_graph(2)
    assert aperiodicity_check(T).status is Status.UNKNOWN
    flip = aperiodicity_check(fx.flip_o2())
    assert flip.holds and not flip.exact
    P = pullback(MonoidMap.sum_map(2), fx.o2())
    v = aperiodicity_check(P, "v")
    assert v.status is Status.UNKNOWN
    assert ((0, 1), (1, 0)) in v.witness.undistinguished


def test_search_horizon_must_exceed_bound():
    with pytest.raises(ValueError):
        aperiodicity_search(fx.flip_o2(), "v", period_bound=3, horizon=3)


def test_cofinality_examples():
    for name in ["O2", "loop", "two_cycle", "cond_L", "chord", "flip", "iota", "T2", "two_vertex"]:
        assert cofinality_check(FINITE[name]).holds, name
    bad = cofinality_check(FINITE["two_loops"])
    assert bad.fails and bad.witness[0] in ("u", "w")
    L = fx.loop_with_exit_to_loop()
    # u reaches w, but w does not reach u and u's loop avoids Reach(w)
    got = cofinality_check(L)
    assert got.fails and got.witness[0] == "w"


def test_simplicity_rules():
    assert simplicity_verdict(FINITE["O2"]).holds
    s = simplicity_verdict(FINITE["loop"])
    assert s.status is Status.UNKNOWN and "aperiodicity fails" in s.detail
    s = simplicity_verdict(FINITE["two_o2"])
    assert s.fails and s.subverdicts["cofinality"].fails
    s = simplicity_verdict(FINITE["flip"])
    assert s.holds and not s.exact
    s = simplicity_verdict(FINITE["T2"])
    assert s.status is Status.UNKNOWN


@pytest.mark.parametrize("name", sorted(FINITE))
def test_verdicts_carry_witnesses(name):
    L = FINITE[name]
    s = simplicity_verdict(L)
    if s.status is not Status.UNKNOWN:
        assert s.witness is not None
        assert all(sub.status is not Status.UNKNOWN for sub in s.subverdicts.values())
    assert str(s)


# -- infinite path descriptors ------------------------------------------------------

def test_eval_o2():
    x = o2_path()
    assert eval_path(x, (0,), (3,)).path == ("e", "f", "f")
    assert eval_path(x, (2,), (2,)).is_vertex
    with pytest.raises(DegreeOrderViolation):
        eval_path(x, (2,), (1,))


def test_t2_diagonal_path():
    T = fx.t_graph(2)
    x = PathDescriptor(T.identity("v"), T.path_morphism(["a", "b"]))
    for m in dg.box((2, 2)):
        for n in dg.box((3, 3)):
            if dg.leq(m, n):
                assert eval_path(x, m, n).degree == dg.sub(n, m)


def rank2_paths():
    out = []
    for L in (fx.flip_o2(), fx.iota_o2(), fx.two_vertex_2graph()):
        v = L.vertices[0]
        cyc = L.morphisms(v, (1, 1))
        cyc = [c for c in cyc if c.source == v]
        for rho in L.morphisms(v, (1, 0))[:2]:
            for g in cyc[:2]:
                if g.range == rho.source:
                    out.append(PathDescriptor(rho, g))
                else:
                    back = [c for c in L.morphisms(rho.source, (1, 1)) if c.source == rho.source]
                    if back:
                        out.append(PathDescriptor(rho, back[0]))
    return out


@pytest.mark.parametrize("x", rank2_paths(), ids=str)
def test_eval_cocycle_identity(x):
    for m in dg.box((2, 2)):
        for n in dg.box((3, 3)):
            if not dg.leq(m, n):
                continue
            for q in dg.box((3, 3)):
                if dg.leq(n, q):
                    L = x.graph
                    assert L.compose(eval_path(x, m, n), eval_path(x, n, q)) == eval_path(x, m, q)


@pytest.mark.parametrize("x", rank2_paths(), ids=str)
def test_shift_and_prepend_laws(x):
    L = x.graph
    for p in dg.box((2, 2)):
        y = shift(x, p)
        for q in dg.box((2, 2)):
            assert same_path(shift(y, q), shift(x, dg.add(p, q)))
        assert same_path(prepend(eval_path(x, dg.zero(2), p), y), x)
        for n in dg.box((2, 2)):
            assert eval_path(y, dg.zero(2), n) == eval_path(x, p, dg.add(p, n))
    lam = L.morphisms(L.vertices[0], (1, 1))[0]
    if lam.source == x.prefix.range:
        y = prepend(lam, x)
        assert same_path(shift(y, lam.degree), x)
        for q in dg.box((3, 3)):
            assert eval_path(y, dg.zero(2), dg.add(lam.degree, q)) == L.compose(lam, eval_path(x, dg.zero(2), q))


def test_prepend_identity_and_errors():
    x = o2_path()
    O = x.graph
    assert prepend(O.identity("v"), x) == x
    C = fx.two_cycle()
    y = PathDescriptor(C.edge("a"), C.path_morphism(["b", "a"]))
    with pytest.raises(NotComposable):
        prepend(C.edge("a"), y)


def test_shift_by_prefix_degree():
    x = o2_path()
    y = shift(x, (1,))
    assert y.prefix.is_vertex and same_path(y, PathDescriptor(x.graph.identity("v"), x.cycle))
    assert shift(x, (0,)) is x


def test_is_period():
    O = fx.o2()
    x = PathDescriptor(O.identity("v"), O.path_morphism(["e", "f"]))
    bad = is_period(x, (1,))
    assert bad.fails
    (m, n), (m2, n2) = bad.witness
    assert eval_path(x, m, n) != eval_path(x, m2, n2)
    assert bad.witness == (((0,), (1,)), ((1,), (2,)))
    assert is_period(x, (2,)).holds
    T = fx.t_graph(2)
    y = PathDescriptor(T.identity("v"), T.path_morphism(["a", "b"]))
    for p in [(1, -1), (2, 0), (0, 3), (-1, 2)]:
        assert is_period(y, p).holds


def test_same_path_distinguishes():
    O = fx.o2()
    a = PathDescriptor(O.edge("e"), O.path_morphism(["f", "f"]))
    b = PathDescriptor(O.path_morphism(["e", "f"]), O.edge("f"))
    c = PathDescriptor(O.edge("e"), O.path_morphism(["f", "e"]))
    assert same_path(a, b) and not same_path(a, c)


def test_descriptor_validation():
    O = fx.o2()
    with pytest.raises(DegreeOrderViolation):
        PathDescriptor(O.identity("v"), O.identity("v"))
    F = fx.flip_o2()
    with pytest.raises(DegreeOrderViolation):
        PathDescriptor(F.identity("v"), F.edge((1, "e")))


@pytest.mark.parametrize("name", sorted(FINITE))
def test_cylinder_partition(name):
    L = FINITE[name]
    lb, nb = ((3, 3), (2, 2)) if L.rank == 2 else ((3,), (2,))
    lams = L.morphisms_upto(lb)[:60]
    for lam in lams:
        for n in dg.box(nb):
            assert cylinder_partition_check(L, lam, n)


def test_cylinder_o2_example():
    O = fx.o2()
    e = O.edge("e")
    assert cylinder_partition_check(O, e, (1,))
    assert {str(O.compose(e, mu)) for mu in O.morphisms("v", (1,))} == {"e.e", "e.f"}


def test_path_pullback_sum_map():
    O = fx.o2()
    f = MonoidMap.sum_map(2)
    P = pullback(f, O)
    x = PathDescriptor(O.edge("e"), O.edge("f"))
    got = path_pullback(f, x, (2, 2), P)
    for (m, n), (lam, d) in got.table.items():
        assert lam == eval_path(x, (sum(m),), (sum(n),))
        assert d == dg.sub(n, m)
    y = got.descriptor
    assert y is not None
    for n in dg.box((3, 3)):
        lifted = P.meta["lift"]
        base = O.identity("v")
        for e in eval_path(y, (0, 0), n).path:
            base = O.compose(base, lifted[e])
        assert base == eval_path(x, (0,), (sum(n),))


def test_path_pullback_identity_map():
    F = fx.flip_o2()
    x = PathDescriptor(F.identity("v"), F.path_morphism([(1, "e"), (2, "f")]))
    got = path_pullback(MonoidMap.identity(2), x, (2, 2))
    for (m, n), (lam, d) in got.table.items():
        assert lam == eval_path(x, m, n)
