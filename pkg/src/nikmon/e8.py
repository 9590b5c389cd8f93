"""The E8 root system in simple-root coordinates."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .intlinalg import identity, ivec
from .lattice import E8

CARTAN = E8().gram


@lru_cache(maxsize=None)
def positive_roots() -> tuple[tuple[int, ...], ...]:
    """The 120 positive roots, sorted by height then coordinates.

    Built by the root-string rule for simply laced systems: ``b + a_i`` is a
    root exactly when ``(b, a_i) = -1``.
    """
    simple = [tuple(int(i == j) for j in range(8)) for i in range(8)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for b in layer:
            bv = ivec(b)
            for i in range(8):
                if int(bv @ CARTAN[:, i]) == -1:
                    c = list(b)
                    c[i] += 1
                    c = tuple(c)
                    if c not in roots:
                        roots.add(c)
                        nxt.append(c)
        layer = nxt
    return tuple(sorted(roots, key=lambda r: (sum(r), r)))


def all_roots() -> list[tuple[int, ...]]:
    pos = positive_roots()
    return list(pos) + [tuple(-x for x in r) for r in pos]


def root_reflection(r) -> np.ndarray:
    """Integer matrix of the reflection ``x -> x - (x, r) r`` in a root."""
    r = ivec(r)
    return identity(8) - np.outer(r, r @ CARTAN)


HIGHEST_ROOT = (2, 3, 4, 6, 5, 4, 3, 2)
