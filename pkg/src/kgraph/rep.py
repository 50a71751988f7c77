"""Truncated path-space representation used as a numeric oracle.

The basis is ``Λ^{≤D}``: every morphism of degree at most ``D``, thought of as
a finite prefix of an infinite path.  ``S_λ e_y = e_{λy}`` when
``s(λ) = r(y)`` and ``d(λy) ≤ D``.  On the columns ``d(y) ≤ D - d(λ)`` no
truncation happens, so ``S_λ`` restricted there is an honest isometry and
relations (i)-(iii) hold exactly.  Relation (iv) needs the path to be long
enough to be cut at degree n, and symbolic products need every ``s_μ*`` to
act on a path of degree at least ``d(μ)``; such basis vectors are the interior.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import degree as dg
from .algebra import AlgebraElement, multiply
from .core import KGraph, Morphism


def matmul(A, B):
    """Exact product of small nonnegative integer matrices.

    numpy has no BLAS path for int64; entries here are path counts bounded by
    the dimension, far below 2**53, so float64 products are exact.
    """
    C = A.astype(np.float64) @ B.astype(np.float64)
    out = np.rint(C).astype(np.int64)
    assert np.array_equal(out, C), "non-integral product"
    return out


class InteriorRep:
    def __init__(self, L: KGraph, depth):
        self.graph = L
        self.depth = tuple(depth)
        self.basis = L.morphisms_upto(self.depth)
        self.index = {y: i for i, y in enumerate(self.basis)}
        self._cache = {}

    @property
    def dim(self):
        return len(self.basis)

    def domain(self, n):
        """Indices of ``y`` with ``d(y) ≤ D - n``."""
        room = dg.sub(self.depth, n)
        return [i for i, y in enumerate(self.basis) if dg.leq(y.degree, room)]

    def matrix(self, lam: Morphism):
        """Dense 0/1 matrix of ``S_λ`` on the whole truncated space."""
        hit = self._cache.get(lam)
        if hit is not None:
            return hit
        L = self.graph
        S = np.zeros((self.dim, self.dim), dtype=np.int64)
        for i, y in enumerate(self.basis):
            if y.range != lam.source or not dg.leq(dg.add(lam.degree, y.degree), self.depth):
                continue
            S[self.index[L.compose(lam, y)], i] = 1
        self._cache[lam] = S
        return S

    def projection(self, v):
        return self.matrix(self.graph.identity(v))

    # -- vectors: sparse {basis index: scalar} ---------------------------------

    def _col(self, S, i):
        return np.flatnonzero(S[:, i])

    def apply_monomial(self, lam, mu, vec):
        """``S_λ S_μ^T`` applied to a sparse vector through the matrices."""
        Sm, Sl = self.matrix(mu), self.matrix(lam)
        out = {}
        for i, c in vec.items():
            for j in np.flatnonzero(Sm[i, :]):  # column j of S_μ^T = row of S_μ
                for k in self._col(Sl, j):
                    out[k] = out.get(k, 0) + c
        return out

    def apply(self, x: AlgebraElement, vec):
        out = {}
        for (lam, mu), c in x.terms.items():
            for k, a in self.apply_monomial(lam, mu, vec).items():
                out[k] = out.get(k, 0) + c * a
        return {k: a for k, a in out.items() if a}

    # -- interior ---------------------------------------------------------------

    def _trace(self, terms, y):
        """Untruncated evaluation of one element on a single path ``y``.

        Returns the list of resulting paths, or None when an adjoint meets a
        path shorter than its degree or a result leaves the window.
        """
        L = self.graph
        out = []
        for lam, mu in terms:
            if y.range != mu.range:
                continue
            if not dg.leq(mu.degree, y.degree):
                return None
            head, tail = L.factor(y, mu.degree, dg.sub(y.degree, mu.degree))
            if head != mu:
                continue
            if not dg.leq(dg.add(lam.degree, tail.degree), self.depth):
                return None
            out.append(L.compose(lam, tail))
        return out

    def is_interior(self, y, *elements):
        """``y`` survives ``elements`` applied right to left without boundary effects."""
        frontier = [y]
        for x in reversed(elements):
            nxt = []
            for z in frontier:
                got = self._trace(list(x.terms), z)
                if got is None:
                    return False
                nxt.extend(got)
            frontier = nxt
        return True


def interior_rep(L: KGraph, depth) -> InteriorRep:
    return InteriorRep(L, depth)


@dataclass
class RepReport:
    depth: tuple
    dim: int
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def __str__(self):
        lines = [f"truncated path space, depth {self.depth}, dimension {self.dim}"]
        lines += [f"  {k}: {v}" for k, v in self.counts.items()]
        lines.append("  all checks pass" if self.ok else f"  {len(self.failures)} failures, first: {self.failures[0]}")
        return "\n".join(lines)


def _random_element(L, rng, bound, max_terms=3):
    pool = [lam for lam in L.morphisms_upto(bound)]
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        lam = rng.choice(pool)
        mus = [mu for mu in pool if mu.source == lam.source]
        mu = rng.choice(mus)
        terms[(lam, mu)] = terms.get((lam, mu), 0) + rng.choice([1, 2, -1])
    return AlgebraElement(L, terms)


def check_rep(L: KGraph, depth, products=100, seed=0, bound=None) -> RepReport:
    """Relations (i)-(iv) on the truncated space and seeded symbolic-vs-matrix products."""
    R = interior_rep(L, depth)
    D = R.depth
    bound = tuple(bound) if bound is not None else tuple(min(2, d) for d in D)
    rep = RepReport(D, R.dim)
    I = np.eye(R.dim, dtype=np.int64)

    n = 0
    for v in L.vertices:
        for w in L.vertices:
            n += 1
            want = R.projection(v) if v == w else np.zeros_like(I)
            if not np.array_equal(matmul(R.projection(v), R.projection(w)), want):
                rep.failures.append(("i", v, w))
    rep.counts["(i) vertex projections"] = n

    morphs = R.basis
    n = 0
    for lam in morphs:
        for mu in L.morphisms_upto(dg.sub(D, lam.degree), lam.source):
            n += 1
            if not np.array_equal(R.matrix(L.compose(lam, mu)), matmul(R.matrix(lam), R.matrix(mu))):
                rep.failures.append(("ii", lam, mu))
    rep.counts["(ii) S_λμ = S_λ S_μ"] = n

    n = 0
    for lam in morphs:
        dom = R.domain(lam.degree)
        S = R.matrix(lam)[:, dom]
        n += 1
        if not np.array_equal(matmul(S.T, S), R.projection(lam.source)[np.ix_(dom, dom)]):
            rep.failures.append(("iii", lam))
    rep.counts["(iii) S_λ^T S_λ = P_s(λ) on d(y) ≤ D - d(λ)"] = n

    n = 0
    for deg in dg.box(D):
        if not any(deg):
            continue
        for v in L.vertices:
            total = sum((matmul(R.matrix(lam), R.matrix(lam).T) for lam in L.morphisms(v, deg)), np.zeros_like(I))
            inner = [i for i, y in enumerate(morphs) if dg.leq(deg, y.degree)]
            n += 1
            if not np.array_equal(total[:, inner], R.projection(v)[:, inner]):
                rep.failures.append(("iv", v, deg))
    rep.counts["(iv) Σ S_λ S_λ^T = P_v on d(y) ≥ n"] = n

    rng = random.Random(seed)
    vectors = 0
    empty = 0
    for t in range(products):
        x = _random_element(L, rng, bound)
        y = _random_element(L, rng, bound)
        z = multiply(x, y)
        inside = [i for i, p in enumerate(morphs) if R.is_interior(p, x, y) and R.is_interior(p, z)]
        if not inside:
            empty += 1
        for i in inside:
            e = {i: 1}
            lhs = R.apply(x, R.apply(y, e))
            rhs = R.apply(z, e)
            vectors += 1
            if lhs != rhs:
                rep.failures.append(("product", t, morphs[i]))
    rep.counts["random products"] = products
    rep.counts["interior vectors compared"] = vectors
    rep.counts["products with empty interior"] = empty
    return rep
