"""Helpers for degrees in N^k (and gradings in Z^k), represented as int tuples."""

from __future__ import annotations

from itertools import product


def zero(k):
    return (0,) * k


def unit(k, i):
    """Generator e_i of N^k; ``i`` is a 1-based color."""
    return tuple(1 if j == i - 1 else 0 for j in range(k))


def ones(k):
    return (1,) * k


def add(m, n):
    return tuple(a + b for a, b in zip(m, n))


def sub(m, n):
    """Difference in Z^k (may have negative entries)."""
    return tuple(a - b for a, b in zip(m, n))


def scale(t, m):
    return tuple(t * a for a in m)


def join(m, n):
    return tuple(max(a, b) for a, b in zip(m, n))


def meet(m, n):
    return tuple(min(a, b) for a, b in zip(m, n))


def leq(m, n):
    return all(a <= b for a, b in zip(m, n))


def positive_part(p):
    return tuple(max(a, 0) for a in p)


def negative_part(p):
    return tuple(max(-a, 0) for a in p)


def is_natural(m):
    return all(a >= 0 for a in m)


def strictly_positive(m):
    return all(a > 0 for a in m)


def total(m):
    return sum(m)


def box(n):
    """All m with 0 <= m <= n, ordered by total degree then lexicographically."""
    pts = product(*(range(a + 1) for a in n))
    return sorted(pts, key=lambda m: (sum(m), m))


def parse(text, k=None):
    """Parse ``"1,2"`` (or a single integer) into a degree tuple."""
    parts = [p for p in str(text).replace(" ", "").split(",") if p != ""]
    try:
        d = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"bad degree {text!r}") from None
    if k is not None and len(d) == 1 and k > 1:
        d = d * k
    if k is not None and len(d) != k:
        raise ValueError(f"degree {text!r} does not have {k} coordinates")
    return d
