"""Pure-Python permutation kernels on at most 256 points.

A permutation is a ``bytes`` object ``p`` with ``p[x]`` the image of ``x``.
``compose(a, b)`` applies ``a`` first, then ``b``.
"""

from __future__ import annotations


def identity(n: int = 256) -> bytes:
    return bytes(range(n))


def compose(a: bytes, b: bytes) -> bytes:
    return a.translate(b) if len(b) == 256 else bytes(b[x] for x in a)


def invert(a: bytes) -> bytes:
    out = bytearray(len(a))
    for i, x in enumerate(a):
        out[x] = i
    return bytes(out)


def sift(g: bytes, base, inv_reps, start: int = 0):
    """Strip ``g`` through the stabilizer chain from level ``start``.

    Returns ``(residue, level)`` where ``level`` is the first level whose
    orbit misses the image of the base point (``len(base)`` on success).
    """
    for i in range(start, len(base)):
        u = inv_reps[i][g[base[i]]]
        if u is None:
            return g, i
        g = compose(g, u)
    return g, len(base)


def first_nonsifting(level: int, base, orbit, gens, reps, inv_reps):
    """Scan Schreier generators of ``level`` in (orbit point, generator) order.

    Returns ``(beta, gen_index, residue, depth)`` for the first one that does
    not sift to the identity, or ``None``.
    """
    ident = identity(len(gens[0])) if gens else None
    rep_l, inv_l, b = reps[level], inv_reps[level], base[level]
    for beta in orbit:
        u = rep_l[beta]
        for k, s in enumerate(gens):
            us = compose(u, s)
            h = compose(us, inv_l[us[b]])
            if h == ident:
                continue
            r, j = sift(h, base, inv_reps, level + 1)
            if r != ident:
                return beta, k, r, j
    return None
