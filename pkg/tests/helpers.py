"""Shared fixtures for the tests."""

from kgraph import fixtures as fx
from kgraph.constructions import MonoidMap, pullback


def rank2():
    return fx.rank2_fixtures()


def all_finite():
    return fx.finite_fixtures()


def sum_pullback():
    return pullback(MonoidMap.sum_map(2), fx.o2())


def bound_for(L, r2=(2, 2), r1=(3,)):
    return r2 if L.rank == 2 else r1
