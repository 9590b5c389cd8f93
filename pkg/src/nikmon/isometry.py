"""Isometries of lattices, reflections and the real spinor norm.

Matrices act on column vectors of lattice coordinates.  The real spinor norm
sends the reflection in ``v`` to ``-sign(v^2)``; its kernel is ``O^+``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

import numpy as np

from .discriminant import DiscriminantIsometry, DiscriminantModule, discriminant_module
from .intlinalg import content, determinant, identity, imat, is_integral, ivec, rational_inverse, to_fraction, to_int
from .lattice import Lattice, inner


class NonIntegralReflection(ValueError):
    def __init__(self, v, witness: int):
        super().__init__(f"reflection in {list(v)} does not preserve the lattice "
                         f"(basis vector {witness} leaves it)")
        self.witness = witness


class IsotropicVector(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Isometry:
    lattice: Lattice
    matrix: np.ndarray

    def __post_init__(self):
        m = imat(self.matrix)
        n = self.lattice.rank
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not fit rank {n}")
        if not np.array_equal(m.T @ self.lattice.gram @ m, self.lattice.gram):
            raise ValueError("matrix does not preserve the Gram matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=object)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)

    def __neg__(self) -> "Isometry":
        return Isometry(self.lattice, -self.matrix)

    def __eq__(self, other):
        return (isinstance(other, Isometry) and self.lattice == other.lattice
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash(tuple(self.matrix.flat))

    def is_identity(self) -> bool:
        return np.array_equal(self.matrix, identity(self.lattice.rank))

    def to_json(self) -> dict:
        return {"lattice": self.lattice.label, "matrix": [[int(x) for x in row] for row in self.matrix]}


def identity_isometry(L: Lattice) -> Isometry:
    return Isometry(L, identity(L.rank))


def minus_identity(L: Lattice) -> Isometry:
    return Isometry(L, -identity(L.rank))


def compose(f: Isometry, g: Isometry) -> Isometry:
    """``f ∘ g``."""
    if f.lattice != g.lattice:
        raise ValueError("isometries of different lattices")
    return Isometry(f.lattice, f.matrix @ g.matrix)


def inverse(f: Isometry) -> Isometry:
    # M^{-1} = G^{-1} M^T G for an isometry
    g = f.lattice.gram
    return Isometry(f.lattice, to_int(rational_inverse(g) @ f.matrix.T @ g))


def reflection_matrix(gram: np.ndarray, v) -> np.ndarray:
    """Rational matrix of ``x -> x - 2 (x, v)/(v, v) v``."""
    v = np.asarray(v, dtype=object)
    vv = v @ gram @ v
    if vv == 0:
        raise IsotropicVector(f"cannot reflect in isotropic vector {list(v)}")
    row = (v @ gram) * Fraction(2) / vv
    return identity(len(v)) - np.outer(v, row)


def reflection(L: Lattice, v) -> Isometry:
    """The reflection ``R_v``; raises unless it maps ``L`` into itself."""
    v = L.vector(v)
    m = reflection_matrix(L.gram, v)
    for j in range(L.rank):
        if not is_integral(m[:, j]):
            raise NonIntegralReflection(v, j)
    return Isometry(L, to_int(m))


def is_integral_reflection(L: Lattice, v) -> bool:
    try:
        reflection(L, v)
    except (NonIntegralReflection, IsotropicVector):
        return False
    return True


# -- spinor norm ----------------------------------------------------------------

def orthogonal_basis(gram: np.ndarray) -> list[np.ndarray]:
    """A Q-basis of pairwise orthogonal, non-isotropic vectors (deterministic)."""
    key = tuple(tuple(int(x) for x in row) for row in np.asarray(gram))
    return [w.copy() for w in _orthogonal_basis(key)]


@lru_cache(maxsize=64)
def _orthogonal_basis(key: tuple) -> tuple[np.ndarray, ...]:
    gram = to_fraction(imat(key))
    n = gram.shape[0]
    pool = [to_fraction(identity(n)[:, i]) for i in range(n)]
    out = []

    def pair(a, b):
        return a @ gram @ b

    while pool:
        k = next((i for i, b in enumerate(pool) if pair(b, b) != 0), None)
        if k is None:
            hit = next(((i, j) for i in range(len(pool)) for j in range(i + 1, len(pool))
                        if pair(pool[i], pool[j]) != 0), None)
            if hit is None:
                raise ValueError("degenerate form")
            i, j = hit
            pool[i] = pool[i] + pool[j]
            k = i
        w = pool.pop(k)
        gw = gram @ w
        ww = w @ gw
        pool = [b - ((b @ gw) / ww) * w for b in pool]
        out.append(w)
    return tuple(out)


def signature(L: Lattice) -> tuple[int, int]:
    sq = [w @ to_fraction(L.gram) @ w for w in orthogonal_basis(L.gram)]
    return sum(1 for s in sq if s > 0), sum(1 for s in sq if s < 0)


def _integral_orthogonal_basis(gram) -> list[np.ndarray]:
    # rescaling keeps orthogonality and the sign of every square
    out = []
    for w in orthogonal_basis(gram):
        den = lcm(*(Fraction(x).denominator for x in w))
        out.append(to_int(w * den))
    return out


def reflection_factorization(f: Isometry) -> list[np.ndarray]:
    """Integer vectors ``d_1, ..., d_k`` with ``f = R_{d_1} ... R_{d_k}``.

    Runs through a Q-orthogonal basis ``w_1, ..., w_n``; at each step the
    current map already fixes ``w_1 .. w_{i-1}``.  If ``g w_i - w_i`` is
    isotropic, reflect first in ``g w_i + w_i`` and then in ``w_i``.  The
    current map is held as ``G / den`` with ``G`` integral.
    """
    gram = imat(f.lattice.gram)
    G, den = imat(f.matrix), 1
    factors = []

    def apply_reflection(d):
        nonlocal G, den
        d = d // content(d)
        dd = int(d @ gram @ d)
        G = G * dd - np.outer(d, 2 * (d @ gram @ G))
        den *= dd
        c = gcd(content(G.flat), den)
        G, den = G // c, den // c
        if den < 0:
            G, den = -G, -den
        factors.append(d)

    for w in _integral_orthogonal_basis(gram):
        gw = G @ w
        d = gw - den * w
        if not any(d):
            continue
        if d @ gram @ d != 0:
            apply_reflection(d)
        else:
            apply_reflection(gw + den * w)
            apply_reflection(w)
    if den != 1 or not np.array_equal(G, identity(gram.shape[0])):
        raise AssertionError("reflection factorization did not terminate at the identity")
    return factors


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def spinor_norm(f: Isometry) -> int:
    """Real spinor norm, computed from a reflection factorization."""
    gram = imat(f.lattice.gram)
    s = 1
    for d in reflection_factorization(f):
        s *= -_sign(d @ gram @ d)
    return s


def spinor_norm_by_orientation(f: Isometry) -> int:
    """Independent check of the spinor norm: the sign of the determinant of
    ``f`` followed by orthogonal projection onto a maximal positive subspace."""
    gram = imat(f.lattice.gram)
    pos = [w for w in _integral_orthogonal_basis(gram) if w @ gram @ w > 0]
    if not pos:
        return 1
    p = np.array(pos, dtype=object).T
    return _sign(determinant(p.T @ gram @ imat(f.matrix) @ p))


def is_orientation_preserving(f: Isometry) -> bool:
    return spinor_norm(f) == 1


# -- discriminant action --------------------------------------------------------

def induced_discriminant_action(f: Isometry, A: DiscriminantModule | None = None) -> DiscriminantIsometry:
    """The automorphism of ``A_L`` sending the class of a dual vector ``x`` to that of ``f x``."""
    if A is None:
        A = discriminant_module(f.lattice)
    m = to_fraction(f.matrix)
    images = [A.coords(m @ A.lift(A.basis_element(j))) for j in range(A.ngens)]
    act = DiscriminantIsometry.from_images(A, images)
    if not act.preserves_form():
        raise AssertionError("induced action does not preserve the discriminant form")
    return act


# -- random words ---------------------------------------------------------------

def random_word(L: Lattice, generators: Sequence[Isometry], length: int, seed: int) -> Isometry:
    """Deterministic product of ``length`` generators drawn with ``random.Random(seed)``."""
    rng = random.Random(seed)
    m = identity(L.rank)
    for _ in range(length):
        g = generators[rng.randrange(len(generators))]
        if g.lattice != L:
            raise ValueError("generator of a different lattice")
        m = g.matrix @ m
    return Isometry(L, m)


def random_reflection_vector(L: Lattice, rng: random.Random, *, max_support: int = 3,
                             bound: int = 2, sign: int | None = None,
                             orthogonal_to=None, tries: int = 100000) -> np.ndarray:
    """A random sparse vector whose reflection is integral on ``L``.

    ``sign`` restricts the sign of ``v^2``; ``orthogonal_to`` a vector that
    ``v`` must be orthogonal to.
    """
    n = L.rank
    for _ in range(tries):
        v = [0] * n
        for i in rng.sample(range(n), rng.randint(1, min(max_support, n))):
            v[i] = rng.choice([x for x in range(-bound, bound + 1) if x])
        if orthogonal_to is not None:
            # push v into the orthogonal complement using a coordinate with odd-free pairing
            w = np.asarray(orthogonal_to, dtype=object)
            c = inner(L, v, w)
            if c:
                gw = L.gram @ w
                piv = next((i for i in range(n) if gw[i] and c % gw[i] == 0), None)
                if piv is None:
                    continue
                v[piv] -= c // gw[piv]
        vv = inner(L, v, v)
        if vv == 0 or (sign is not None and _sign(vv) != sign):
            continue
        if is_integral_reflection(L, v):
            return ivec(v)
    raise RuntimeError("no integral reflection vector found")


__all__ = [
    "Isometry", "IsotropicVector", "NonIntegralReflection", "compose",
    "identity_isometry", "induced_discriminant_action", "inverse", "is_orientation_preserving",
    "minus_identity", "random_reflection_vector", "random_word", "reflection",
    "reflection_factorization", "signature", "spinor_norm", "spinor_norm_by_orientation",
]
