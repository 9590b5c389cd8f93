"""Integral lattices given by a Gram matrix in a fixed ordered basis.

Conventions used throughout the package:

* ``U`` is the hyperbolic plane with Gram ``[[0, 1], [1, 0]]``.
* ``E8`` is the Cartan matrix in Bourbaki's root ordering: the simple roots
  ``a1 .. a8`` form the chain ``a1-a3-a4-a5-a6-a7-a8`` with ``a2`` attached
  to ``a4``.  It is positive definite, even and unimodular.
* ``<n>`` is the rank one lattice whose generator has square ``n``.
* ``L(n)`` is the twist of ``L``: same group, form scaled by ``n``.

Vectors are integer coordinate arrays in the lattice basis.  Direct sums keep
their block layout so that components can be addressed by block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import numpy as np

from .intlinalg import (
    block_diag,
    determinant as _det,
    imat,
    integer_kernel,
    invariant_factors,
    ivec,
    saturation,
)

E8_EDGES = ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4))


@dataclass(frozen=True)
class Block:
    name: str
    offset: int
    size: int

    @property
    def slice(self) -> slice:
        return slice(self.offset, self.offset + self.size)


@dataclass(frozen=True, eq=False)
class Lattice:
    gram: np.ndarray
    label: str = ""
    blocks: tuple[Block, ...] = field(default=())

    def __post_init__(self):
        g = imat(self.gram)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
            raise ValueError("Gram matrix must be square and nonempty")
        if not np.array_equal(g, g.T):
            raise ValueError("Gram matrix must be symmetric")
        if _det(g) == 0:
            raise ValueError(f"degenerate Gram matrix for {self.label or 'lattice'}")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        if not self.blocks:
            object.__setattr__(self, "blocks", (Block(self.label or "L", 0, g.shape[0]),))

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    @property
    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    def __eq__(self, other):
        return isinstance(other, Lattice) and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash(tuple(self.gram.flat))

    def __repr__(self):
        return f"Lattice({self.label or '?'}, rank={self.rank})"

    def vector(self, coords: Sequence[int]) -> np.ndarray:
        v = ivec(coords)
        if len(v) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(v)}")
        return v

    def block(self, key: int | str) -> Block:
        if isinstance(key, int):
            return self.blocks[key]
        matches = [b for b in self.blocks if b.name == key]
        if len(matches) != 1:
            raise KeyError(f"block {key!r} is missing or ambiguous in {self.label}")
        return matches[0]

    def component(self, v, key: int | str) -> np.ndarray:
        return np.asarray(v)[self.block(key).slice]

    def basis_vector(self, i: int) -> np.ndarray:
        v = ivec([0] * self.rank)
        v[i] = 1
        return v


def _check_dims(L: Lattice, *vs) -> None:
    for v in vs:
        if np.asarray(v).shape[0] != L.rank:
            raise ValueError(
                f"vector of length {np.asarray(v).shape[0]} does not fit {L.label} of rank {L.rank}")


def inner(L: Lattice, v, w) -> int:
    """The pairing ``v^T G w``."""
    _check_dims(L, v, w)
    return int(np.asarray(v, dtype=object) @ L.gram @ np.asarray(w, dtype=object))


def square(L: Lattice, v) -> int:
    return inner(L, v, v)


def determinant(L: Lattice) -> int:
    return _det(L.gram)


def gram_of(L: Lattice, basis: np.ndarray) -> np.ndarray:
    """Gram matrix of the sublattice spanned by the columns of ``basis``."""
    b = np.asarray(basis, dtype=object)
    return b.T @ L.gram @ b


# -- constructors ---------------------------------------------------------------

def U() -> Lattice:
    return Lattice(imat([[0, 1], [1, 0]]), "U")


def E8() -> Lattice:
    g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for a, b in E8_EDGES:
        g[a - 1][b - 1] = g[b - 1][a - 1] = -1
    return Lattice(imat(g), "E8")


def rank_one(n: int) -> Lattice:
    return Lattice(imat([[n]]), f"<{n}>")


def _twisted_label(label: str, n: int) -> str:
    m = re.fullmatch(r"(.*)\((-?\d+)\)", label)
    if m:
        k = int(m.group(2)) * n
        return m.group(1) if k == 1 else f"{m.group(1)}({k})"
    m = re.fullmatch(r"<(-?\d+)>", label)
    if m:
        return f"<{int(m.group(1)) * n}>"
    return label if n == 1 else f"{label}({n})"


def twist(L: Lattice, n: int) -> Lattice:
    """``L(n)``: the Gram matrix scaled entrywise by ``n``."""
    if n == 0:
        raise ValueError("twist by 0 is degenerate")
    blocks = tuple(Block(_twisted_label(b.name, n), b.offset, b.size) for b in L.blocks)
    return Lattice(L.gram * n, _twisted_label(L.label, n), blocks)


def direct_sum(parts: Sequence[Lattice], label: str | None = None) -> Lattice:
    if not parts:
        raise ValueError("direct sum of an empty list")
    blocks, offset = [], 0
    for p in parts:
        blocks.append(Block(p.label, offset, p.rank))
        offset += p.rank
    return Lattice(block_diag([p.gram for p in parts]),
                   label or " + ".join(p.label for p in parts), tuple(blocks))


_SYMBOL = re.compile(r"^\s*(U|E8|<\s*(-?\d+)\s*>)\s*(?:\(\s*(-?\d+)\s*\))?\s*$")


def from_symbol(sym: str) -> Lattice:
    """Parse ``U``, ``U(2)``, ``E8(-1)``, ``<-2>`` and similar."""
    m = _SYMBOL.match(sym)
    if not m:
        raise ValueError(f"unknown lattice symbol {sym!r}")
    head, n, tw = m.groups()
    base = U() if head == "U" else E8() if head == "E8" else rank_one(int(n))
    return twist(base, int(tw)) if tw is not None else base


def from_symbols(syms: Sequence[str], label: str | None = None) -> Lattice:
    return direct_sum([from_symbol(s) for s in syms], label)


# -- vector invariants ----------------------------------------------------------

def divisibility(L: Lattice, v) -> int:
    """gcd of the pairings of ``v`` with every basis vector."""
    _check_dims(L, v)
    if not any(np.asarray(v)):
        raise ValueError("divisibility of the zero vector is undefined")
    g = 0
    for x in L.gram @ np.asarray(v, dtype=object):
        g = gcd(g, int(x))
    return g


def _as_columns(L: Lattice, S) -> np.ndarray:
    if isinstance(S, np.ndarray) and S.ndim == 2:
        cols = imat(S)
    else:
        cols = imat([list(s) for s in S]).T if len(S) else np.zeros((L.rank, 0), dtype=object)
    if cols.shape[0] != L.rank:
        raise ValueError("vectors do not match the lattice rank")
    return cols


def orthogonal_complement(L: Lattice, S) -> np.ndarray:
    """Saturated basis (columns) of ``{v : (v, s) = 0 for all s in S}``.

    ``S`` is a list of vectors or a matrix whose columns are the vectors.
    """
    cols = _as_columns(L, S)
    if cols.shape[1] == 0:
        return imat(np.eye(L.rank, dtype=int))
    return integer_kernel(cols.T @ L.gram)


def saturate(L: Lattice, S) -> np.ndarray:
    """Basis (columns) of ``span_Q(S) ∩ L``."""
    return saturation(_as_columns(L, S))


def is_primitive(L: Lattice, S) -> bool:
    cols = _as_columns(L, S)
    f = invariant_factors(cols)
    if len(f) != cols.shape[1]:
        raise ValueError("vectors are linearly dependent")
    return all(d == 1 for d in f)


def sublattice_of_divisibility(gram: np.ndarray, modulus: int) -> np.ndarray:
    """Basis (columns, in the Gram's own coordinates) of
    ``{c : gram @ c ≡ 0 mod modulus}``: the vectors whose divisibility inside
    the lattice with this Gram is a multiple of ``modulus``."""
    from .intlinalg import smith_normal_form

    _, d, v = smith_normal_form(gram)
    scale = [modulus // gcd(modulus, int(d[i, i])) for i in range(d.shape[0])]
    return v @ block_diag([imat([[s]]) for s in scale])
